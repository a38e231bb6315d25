//! Godsil–McKay and Wang–Qiu–Hu switching.
//!
//! GM: a partition `{C_1, …, C_k, D}` where every cell is internally
//! "equitable" (any two vertices of `C_i` see the same number of vertices of
//! `C_j`), and every vertex of `D` sees 0, half, or all of each cell. Switching
//! reverses the adjacency between each cell and the outside vertices seeing
//! exactly half of it.
//!
//! WQH: two disjoint equal-size sets whose members all have the same
//! (own − other) neighbour difference `c`, and where every outside vertex
//! sees all of `C_1` and none of `C_2`, the reverse, or equally many of
//! each. Switching reverses the adjacency between `C_1 ∪ C_2` and the outside
//! vertices of the first two kinds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGm")]
pub struct GmSpec {
    cells: Vec<VertexSet>,
}

#[derive(Deserialize)]
struct RawGm {
    cells: Vec<VertexSet>,
}

impl TryFrom<RawGm> for GmSpec {
    type Error = Error;
    fn try_from(r: RawGm) -> Result<Self> {
        GmSpec::new(r.cells)
    }
}

impl GmSpec {
    pub fn new(cells: Vec<VertexSet>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidSpec("GM spec needs at least one cell".into()));
        }
        for (i, c) in cells.iter().enumerate() {
            if c.len() < 2 || c.len() % 2 != 0 {
                return Err(Error::InvalidSpec(format!(
                    "cell C{} has size {}; GM cells must have even size >= 2",
                    i + 1,
                    c.len()
                )));
            }
            for (j, d) in cells.iter().enumerate().skip(i + 1) {
                if !c.is_disjoint(d) {
                    return Err(Error::InvalidSpec(format!("cells C{} and C{} overlap", i + 1, j + 1)));
                }
            }
        }
        Ok(GmSpec { cells })
    }

    pub fn cells(&self) -> &[VertexSet] {
        &self.cells
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWqh")]
pub struct WqhSpec {
    c1: VertexSet,
    c2: VertexSet,
}

#[derive(Deserialize)]
struct RawWqh {
    c1: VertexSet,
    c2: VertexSet,
}

impl TryFrom<RawWqh> for WqhSpec {
    type Error = Error;
    fn try_from(r: RawWqh) -> Result<Self> {
        WqhSpec::new(r.c1, r.c2)
    }
}

impl WqhSpec {
    pub fn new(c1: VertexSet, c2: VertexSet) -> Result<Self> {
        if c1.is_empty() {
            return Err(Error::InvalidSpec("WQH sets must be nonempty".into()));
        }
        if c1.len() != c2.len() {
            return Err(Error::InvalidSpec(format!(
                "|C1| = {} differs from |C2| = {}",
                c1.len(),
                c2.len()
            )));
        }
        if !c1.is_disjoint(&c2) {
            return Err(Error::InvalidSpec("C1 and C2 are not disjoint".into()));
        }
        Ok(WqhSpec { c1, c2 })
    }

    pub fn c1(&self) -> &VertexSet {
        &self.c1
    }

    pub fn c2(&self) -> &VertexSet {
        &self.c2
    }

    /// Same switching with the roles of the two sets exchanged.
    pub fn swapped(&self) -> WqhSpec {
        WqhSpec { c1: self.c2.clone(), c2: self.c1.clone() }
    }
}

/// Either kind of switching set; serializes as `{"gm": {...}}` or `{"wqh": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchSpec {
    Gm(GmSpec),
    Wqh(WqhSpec),
}

impl SwitchSpec {
    pub fn validate(&self, g: &Graph) -> Result<ValidationReport> {
        match self {
            SwitchSpec::Gm(s) => validate_gm(g, s),
            SwitchSpec::Wqh(s) => validate_wqh(g, s),
        }
    }

    pub fn apply(&self, g: &Graph) -> Result<Graph> {
        match self {
            SwitchSpec::Gm(s) => apply_gm(g, s),
            SwitchSpec::Wqh(s) => apply_wqh(g, s),
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            SwitchSpec::Gm(_) => "GM",
            SwitchSpec::Wqh(_) => "WQH",
        }
    }

    fn sets(&self) -> Vec<&VertexSet> {
        match self {
            SwitchSpec::Gm(s) => s.cells.iter().collect(),
            SwitchSpec::Wqh(s) => vec![&s.c1, &s.c2],
        }
    }

    fn check_indices(&self, g: &Graph) -> Result<()> {
        for set in self.sets() {
            if let Some(m) = set.max() {
                g.check_vertex(m)?;
            }
        }
        Ok(())
    }

    fn in_some_set(&self, v: usize) -> bool {
        self.sets().iter().any(|s| s.contains(v))
    }
}

/// How an outside vertex relates to the switching sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutsideClass {
    /// WQH (a): all of `C_1`, none of `C_2`.
    #[serde(rename = "full-C1")]
    FullC1,
    /// WQH (b): none of `C_1`, all of `C_2`.
    #[serde(rename = "full-C2")]
    FullC2,
    /// WQH (c): equally many in both.
    #[serde(rename = "balanced")]
    Balanced,
    #[serde(rename = "gm-zero")]
    GmZero,
    #[serde(rename = "gm-half")]
    GmHalf,
    #[serde(rename = "gm-full")]
    GmFull,
    /// Violates the outside-vertex condition.
    #[serde(rename = "irregular")]
    Irregular,
}

impl OutsideClass {
    /// Whether switching reverses this vertex's adjacencies.
    pub fn switches(self) -> bool {
        matches!(self, OutsideClass::FullC1 | OutsideClass::FullC2 | OutsideClass::GmHalf)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// `gm-i`, `gm-ii`, `wqh-ii` or `wqh-iii`.
    pub condition: String,
    pub vertex: usize,
    /// Cell (GM, 1-based) or set (WQH, 1 or 2) involved, when applicable.
    pub cell: Option<usize>,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "condition {} at vertex {}", self.condition, self.vertex)?;
        if let Some(c) = self.cell {
            write!(f, " (set {c})")?;
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutsideEntry {
    pub vertex: usize,
    /// One class per GM cell, or a single class for WQH.
    pub classes: Vec<OutsideClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub wqh_constant: Option<i64>,
    pub outside_classes: Vec<OutsideEntry>,
}

impl ValidationReport {
    fn from_parts(violations: Vec<Violation>, wqh_constant: Option<i64>, outside_classes: Vec<OutsideEntry>) -> Self {
        ValidationReport { valid: violations.is_empty(), violations, wqh_constant, outside_classes }
    }

    /// Number of outside vertices whose adjacencies get reversed.
    pub fn switching_vertex_count(&self) -> usize {
        self.outside_classes
            .iter()
            .filter(|e| e.classes.iter().any(|c| c.switches()))
            .count()
    }

    pub fn summary(&self) -> String {
        match self.violations.first() {
            None => "valid".into(),
            Some(v) => format!(
                "{} violation(s); first: condition {} at vertex {}: {}",
                self.violations.len(),
                v.condition,
                v.vertex,
                v.detail
            ),
        }
    }
}

#[inline]
fn count_in(g: &Graph, v: usize, mask: &[u64]) -> usize {
    g.row(v).iter().zip(mask).map(|(a, b)| (a & b).count_ones() as usize).sum()
}

fn gm_class(count: usize, size: usize) -> OutsideClass {
    if count == 0 {
        OutsideClass::GmZero
    } else if count == size {
        OutsideClass::GmFull
    } else if 2 * count == size {
        OutsideClass::GmHalf
    } else {
        OutsideClass::Irregular
    }
}

fn wqh_class(in_c1: usize, in_c2: usize, size: usize) -> OutsideClass {
    if in_c1 == size && in_c2 == 0 {
        OutsideClass::FullC1
    } else if in_c1 == 0 && in_c2 == size {
        OutsideClass::FullC2
    } else if in_c1 == in_c2 {
        OutsideClass::Balanced
    } else {
        OutsideClass::Irregular
    }
}

pub fn validate_gm(g: &Graph, spec: &GmSpec) -> Result<ValidationReport> {
    let as_switch = SwitchSpec::Gm(spec.clone());
    as_switch.check_indices(g)?;
    let masks: Vec<Vec<u64>> = spec.cells.iter().map(|c| c.to_mask(g.n())).collect();
    let mut violations = Vec::new();

    for (i, ci) in spec.cells.iter().enumerate() {
        for (j, mask) in masks.iter().enumerate() {
            let first = ci.as_slice()[0];
            let expected = count_in(g, first, mask);
            for v in ci.iter().skip(1) {
                let got = count_in(g, v, mask);
                if got != expected {
                    violations.push(Violation {
                        condition: "gm-i".into(),
                        vertex: v,
                        cell: Some(i + 1),
                        detail: format!(
                            "vertex {v} of C{} has {got} neighbours in C{}, vertex {first} has {expected}",
                            i + 1,
                            j + 1
                        ),
                    });
                }
            }
        }
    }

    let outside: Vec<usize> = (0..g.n()).filter(|&v| !as_switch.in_some_set(v)).collect();
    let outside_classes: Vec<OutsideEntry> = outside
        .par_iter()
        .map(|&v| OutsideEntry {
            vertex: v,
            classes: spec
                .cells
                .iter()
                .zip(&masks)
                .map(|(c, m)| gm_class(count_in(g, v, m), c.len()))
                .collect(),
        })
        .collect();
    for e in &outside_classes {
        for (i, class) in e.classes.iter().enumerate() {
            if *class == OutsideClass::Irregular {
                let size = spec.cells[i].len();
                violations.push(Violation {
                    condition: "gm-ii".into(),
                    vertex: e.vertex,
                    cell: Some(i + 1),
                    detail: format!(
                        "outside vertex {} has {} neighbours in C{} (allowed: 0, {}, {size})",
                        e.vertex,
                        count_in(g, e.vertex, &masks[i]),
                        i + 1,
                        size / 2
                    ),
                });
            }
        }
    }
    Ok(ValidationReport::from_parts(violations, None, outside_classes))
}

pub fn validate_wqh(g: &Graph, spec: &WqhSpec) -> Result<ValidationReport> {
    let as_switch = SwitchSpec::Wqh(spec.clone());
    as_switch.check_indices(g)?;
    let m1 = spec.c1.to_mask(g.n());
    let m2 = spec.c2.to_mask(g.n());
    let diff = |v: usize, own: &[u64], other: &[u64]| count_in(g, v, own) as i64 - count_in(g, v, other) as i64;

    let c = diff(spec.c1.as_slice()[0], &m1, &m2);
    let mut violations = Vec::new();
    let members = spec
        .c1
        .iter()
        .map(|v| (v, 1, diff(v, &m1, &m2)))
        .chain(spec.c2.iter().map(|v| (v, 2, diff(v, &m2, &m1))));
    for (v, set, d) in members {
        if d != c {
            violations.push(Violation {
                condition: "wqh-ii".into(),
                vertex: v,
                cell: Some(set),
                detail: format!("vertex {v} of C{set} has own-minus-other difference {d}, expected c = {c}"),
            });
        }
    }

    let size = spec.c1.len();
    let outside: Vec<usize> = (0..g.n()).filter(|&v| !as_switch.in_some_set(v)).collect();
    let counted: Vec<(usize, usize, usize)> =
        outside.par_iter().map(|&v| (v, count_in(g, v, &m1), count_in(g, v, &m2))).collect();
    let mut outside_classes = Vec::with_capacity(counted.len());
    for (v, a, b) in counted {
        let class = wqh_class(a, b, size);
        if class == OutsideClass::Irregular {
            violations.push(Violation {
                condition: "wqh-iii".into(),
                vertex: v,
                cell: None,
                detail: format!("outside vertex {v} has {a} neighbours in C1 and {b} in C2"),
            });
        }
        outside_classes.push(OutsideEntry { vertex: v, classes: vec![class] });
    }
    Ok(ValidationReport::from_parts(violations, Some(c), outside_classes))
}

/// Class tags of one outside vertex: one per GM cell, or one for WQH.
pub fn classify_outside_vertex(g: &Graph, spec: &SwitchSpec, v: usize) -> Result<Vec<OutsideClass>> {
    spec.check_indices(g)?;
    g.check_vertex(v)?;
    if spec.in_some_set(v) {
        return Err(Error::InvalidInput(format!("vertex {v} belongs to a switching set")));
    }
    Ok(match spec {
        SwitchSpec::Gm(s) => s
            .cells
            .iter()
            .map(|c| gm_class(count_in(g, v, &c.to_mask(g.n())), c.len()))
            .collect(),
        SwitchSpec::Wqh(s) => {
            let a = count_in(g, v, &s.c1.to_mask(g.n()));
            let b = count_in(g, v, &s.c2.to_mask(g.n()));
            vec![wqh_class(a, b, s.c1.len())]
        }
    })
}

fn refuse(report: &ValidationReport) -> Error {
    Error::ConditionsViolated(report.summary())
}

pub fn apply_gm(g: &Graph, spec: &GmSpec) -> Result<Graph> {
    let report = validate_gm(g, spec)?;
    if !report.valid {
        return Err(refuse(&report));
    }
    let mut b = g.to_builder();
    for e in &report.outside_classes {
        for (cell, class) in spec.cells.iter().zip(&e.classes) {
            if *class == OutsideClass::GmHalf {
                for u in cell.iter() {
                    b.toggle(u, e.vertex);
                }
            }
        }
    }
    Ok(b.build())
}

pub fn apply_wqh(g: &Graph, spec: &WqhSpec) -> Result<Graph> {
    let report = validate_wqh(g, spec)?;
    if !report.valid {
        return Err(refuse(&report));
    }
    let mut b = g.to_builder();
    for e in &report.outside_classes {
        if e.classes[0].switches() {
            for u in spec.c1.iter().chain(spec.c2.iter()) {
                b.toggle(u, e.vertex);
            }
        }
    }
    Ok(b.build())
}
