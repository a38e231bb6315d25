//! Named constructions: a scheme graph, a switching set on it, and the
//! vertex pairs or triples whose common-neighbour behaviour tells the mate
//! apart from the original.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{binom_u64, intersection_dim, FieldTable, MatrixFq};
use crate::certify::{
    nonisomorphic, random_independent_triples, scan_triple_property, selective_neighbor_count, NonIsoVerdict,
    TripleScan, DEFAULT_NODE_BUDGET,
};
use crate::graph::{Graph, VertexSet};
use crate::schemes::{Scheme, SchemeParams, DEFAULT_VERTEX_CAP};
use crate::spectra::{cospectral, CospectralVerdict, DEFAULT_NUM_PRIMES, DEFAULT_SEED};
use crate::switching::{GmSpec, SwitchSpec, WqhSpec};
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: &str = "1.0.0";

pub const SPORADIC_NAMES: [&str; 3] = ["J1-11-4", "J24-10-5", "J24-12-6"];

/// Expected relation for specific vertices of the original graph and its mate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `u ~ v` in both graphs and λ grows by exactly `gain`.
    LambdaGain { u: usize, v: usize, gain: i64 },
    /// `u ≁ v` before, `u ~ v` after, with at least `min` common neighbours after.
    LambdaAtLeast { u: usize, v: usize, min: usize },
    /// Switching creates exactly `added` common neighbours and destroys at
    /// least `lost_at_least`, so λ strictly drops.
    LambdaDecrease { u: usize, v: usize, added: usize, lost_at_least: usize },
    /// Pairwise non-adjacent triple whose selective count is `mate_count` in
    /// the mate and anything else in the original.
    SelectiveTriple { a: usize, b: usize, c: usize, mate_count: usize },
}

impl Witness {
    fn vertices(&self) -> Vec<usize> {
        match *self {
            Witness::LambdaGain { u, v, .. } | Witness::LambdaAtLeast { u, v, .. } | Witness::LambdaDecrease { u, v, .. } => {
                vec![u, v]
            }
            Witness::SelectiveTriple { a, b, c, .. } => vec![a, b, c],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recipe {
    pub name: String,
    pub params: SchemeParams,
    pub spec: SwitchSpec,
    pub witnesses: Vec<Witness>,
    pub provenance: String,
}

fn set_index(scheme: &Scheme, elements: &[usize]) -> Result<usize> {
    scheme
        .index_of_set(elements)
        .ok_or_else(|| Error::InvalidInput(format!("{elements:?} is not a vertex of {}", scheme.params())))
}

fn set_indices(scheme: &Scheme, sets: &[&[usize]]) -> Result<VertexSet> {
    VertexSet::new(sets.iter().map(|s| set_index(scheme, s)).collect::<Result<_>>()?)
}

/// WQH switching on `J_{2}(n,4)` with `C1 = {1234, 1235, 1236}` and
/// `C2 = {1456, 2456, 3456}`.
pub fn recipe_j2n4(n: usize) -> Result<Recipe> {
    if n < 8 {
        return Err(Error::InvalidParams(format!("j2n4 needs n >= 8, got {n}")));
    }
    let params = SchemeParams::johnson(n, 4, &[2])?;
    let scheme = Scheme::new(params.clone())?;
    let c1 = set_indices(&scheme, &[&[1, 2, 3, 4], &[1, 2, 3, 5], &[1, 2, 3, 6]])?;
    let c2 = set_indices(&scheme, &[&[1, 4, 5, 6], &[2, 4, 5, 6], &[3, 4, 5, 6]])?;
    let v = set_index(&scheme, &[1, 2, 3, 4])?;
    let mut witnesses = vec![Witness::LambdaGain {
        u: v,
        v: set_index(&scheme, &[1, 4, 5, 7])?,
        gain: binom_u64(n as u64 - 7, 2) as i64,
    }];
    if n == 8 {
        witnesses.push(Witness::LambdaAtLeast { u: v, v: set_index(&scheme, &[5, 6, 7, 8])?, min: 30 });
    }
    Ok(Recipe {
        name: format!("j2n4-n{n}"),
        params,
        spec: SwitchSpec::Wqh(WqhSpec::new(c1, c2)?),
        witnesses,
        provenance: "WQH switching of J_{2}(n,4) on three 4-sets through {1,2,3} against three through {4,5,6}"
            .into(),
    })
}

/// GM switching on `J_{1..(k-1)/2}(2k,k)` with one cell of the k-sets
/// containing `{1..k-1}` and one cell of their complements.
pub fn recipe_halfrange_2kk(k: usize) -> Result<Recipe> {
    if k < 5 || k % 2 == 0 {
        return Err(Error::InvalidParams(format!("halfrange needs odd k >= 5, got {k}")));
    }
    let n = 2 * k;
    let s: Vec<usize> = (1..=(k - 1) / 2).collect();
    let params = SchemeParams::johnson(n, k, &s)?;
    let scheme = Scheme::new(params.clone())?;
    let core: Vec<usize> = (1..k).collect();
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    for x in k..=n {
        let mut set = core.clone();
        set.push(x);
        let comp: Vec<usize> = (1..=n).filter(|e| !set.contains(e)).collect();
        c1.push(set_index(&scheme, &set)?);
        c2.push(set_index(&scheme, &comp)?);
    }
    let v: Vec<usize> = (1..=k).collect();
    let w: Vec<usize> = (2..=k + 1).collect();
    let h = (k - 3) / 2;
    let witnesses = vec![Witness::LambdaDecrease {
        u: set_index(&scheme, &v)?,
        v: set_index(&scheme, &w)?,
        added: (binom_u64(k as u64 - 2, h as u64) * binom_u64(k as u64 - 1, (k as u64 - 1) / 2)) as usize,
        lost_at_least: (binom_u64(k as u64 - 2, h as u64) * binom_u64(k as u64, (k as u64 + 1) / 2)) as usize,
    }];
    Ok(Recipe {
        name: format!("halfrange-k{k}"),
        params,
        spec: SwitchSpec::Gm(GmSpec::new(vec![VertexSet::new(c1)?, VertexSet::new(c2)?])?),
        witnesses,
        provenance: "GM switching of J_{1..(k-1)/2}(2k,k) on the k-sets containing {1..k-1} and their complements"
            .into(),
    })
}

fn unit(n: usize, support: &[usize]) -> Vec<u8> {
    let mut v = vec![0u8; n];
    for &i in support {
        v[i - 1] = 1;
    }
    v
}

/// GM switching on the binary q-Kneser graph `K_2(n,k)` with the 4-cell
/// `{p1p2π, p1p3π, p2p3π, p4p5π}` where `p4 = p1+p2`, `p5 = p1+p3` and
/// `π = ⟨e4..e_{k+1}⟩`. The witness triple is `(p1τ, p2τ, p4τ)` with
/// `τ = ⟨e_{k+2}..e_{2k}⟩`.
pub fn recipe_qkneser(n: usize, k: usize) -> Result<Recipe> {
    if k < 2 || n < 2 * k {
        return Err(Error::InvalidParams(format!("qkneser needs k >= 2 and n >= 2k, got (n,k) = ({n},{k})")));
    }
    let params = SchemeParams::grassmann(n, k, 2, &[0])?;
    let scheme = Scheme::new(params.clone())?;
    let f = FieldTable::get(2)?;
    let p = [unit(n, &[1]), unit(n, &[2]), unit(n, &[3]), unit(n, &[1, 2]), unit(n, &[1, 3])];
    let pi: Vec<Vec<u8>> = (4..=k + 1).map(|i| unit(n, &[i])).collect();
    let tau: Vec<Vec<u8>> = (k + 2..=2 * k).map(|i| unit(n, &[i])).collect();

    let span_index = |gens: &[&Vec<u8>], extra: &[Vec<u8>]| -> Result<usize> {
        let rows: Vec<Vec<u8>> = gens.iter().map(|r| (*r).clone()).chain(extra.iter().cloned()).collect();
        let m = MatrixFq::from_rows(f, n, &rows)?;
        if m.rank() != k {
            return Err(Error::InvalidInput(format!("generators span dimension {} instead of {k}", m.rank())));
        }
        scheme
            .index_of_subspace(&m)
            .ok_or_else(|| Error::InvalidInput("subspace missing from the vertex list".into()))
    };

    // τ must meet p1p2p3π trivially
    let mut big: Vec<Vec<u8>> = p[..3].to_vec();
    big.extend(pi.iter().cloned());
    let big = MatrixFq::from_rows(f, n, &big)?;
    let tau_m = MatrixFq::from_rows(f, n, &tau)?;
    if intersection_dim(&big, &tau_m)? != 0 {
        return Err(Error::InvalidInput("τ meets p1p2p3π nontrivially".into()));
    }

    let cell = VertexSet::new(vec![
        span_index(&[&p[0], &p[1]], &pi)?,
        span_index(&[&p[0], &p[2]], &pi)?,
        span_index(&[&p[1], &p[2]], &pi)?,
        span_index(&[&p[3], &p[4]], &pi)?,
    ])?;
    let witnesses = vec![Witness::SelectiveTriple {
        a: span_index(&[&p[0]], &tau)?,
        b: span_index(&[&p[1]], &tau)?,
        c: span_index(&[&p[3]], &tau)?,
        mate_count: 1,
    }];
    Ok(Recipe {
        name: format!("qkneser-n{n}-k{k}"),
        params,
        spec: SwitchSpec::Gm(GmSpec::new(vec![cell])?),
        witnesses,
        provenance: "GM switching of the binary q-Kneser graph on four k-spaces through a common (k-2)-space".into(),
    })
}

/// The three computer-found mates on `J_{1}(11,4)`, `J_{2,4}(10,5)` and `J_{2,4}(12,6)`.
pub fn recipe_sporadic(name: &str) -> Result<Recipe> {
    type Sets = &'static [&'static [usize]];
    let (params, cells): (SchemeParams, Vec<Sets>) = match name {
        "J1-11-4" => (
            SchemeParams::johnson(11, 4, &[1])?,
            vec![
                &[&[1, 2, 3, 10], &[4, 5, 6, 10], &[7, 8, 9, 10]],
                &[&[1, 2, 3, 11], &[4, 5, 6, 11], &[7, 8, 9, 11]],
            ],
        ),
        "J24-10-5" => (
            SchemeParams::johnson(10, 5, &[2, 4])?,
            vec![
                &[&[1, 2, 3, 4, 5], &[1, 2, 3, 6, 7], &[1, 2, 4, 6, 8], &[1, 2, 5, 7, 8]],
                &[&[6, 7, 8, 9, 10], &[4, 5, 8, 9, 10], &[3, 5, 7, 9, 10], &[3, 4, 6, 9, 10]],
            ],
        ),
        "J24-12-6" => (
            SchemeParams::johnson(12, 6, &[2, 4])?,
            vec![
                &[&[1, 2, 3, 4, 5, 6], &[1, 2, 3, 4, 7, 8], &[1, 2, 3, 5, 7, 9], &[1, 2, 3, 6, 8, 9]],
                &[&[7, 8, 9, 10, 11, 12], &[5, 6, 9, 10, 11, 12], &[4, 6, 8, 10, 11, 12], &[4, 5, 7, 10, 11, 12]],
            ],
        ),
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown sporadic recipe {name:?} (expected one of {})",
                SPORADIC_NAMES.join(", ")
            )))
        }
    };
    let scheme = Scheme::new(params.clone())?;
    let sets: Vec<VertexSet> = cells.iter().map(|c| set_indices(&scheme, c)).collect::<Result<_>>()?;
    let spec = if name == "J1-11-4" {
        let mut it = sets.into_iter();
        let (c1, c2) = (it.next().expect("two sets"), it.next().expect("two sets"));
        SwitchSpec::Wqh(WqhSpec::new(c1, c2)?)
    } else {
        SwitchSpec::Gm(GmSpec::new(sets)?)
    };
    Ok(Recipe {
        name: name.to_string(),
        params,
        spec,
        witnesses: Vec::new(),
        provenance: "computer-found switching sets; non-isomorphism left to the invariant ladder".into(),
    })
}

/// Knobs for [`run_recipe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub num_primes: usize,
    pub seed: u64,
    pub node_budget: u64,
    pub vertex_cap: usize,
    /// Exhaustive triple scans run when the graph has at most this many
    /// independent triples.
    pub triple_budget: u64,
    /// Random triples tried (besides the witness) when the scan is not exhaustive.
    pub random_triples: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            num_primes: DEFAULT_NUM_PRIMES,
            seed: DEFAULT_SEED,
            node_budget: DEFAULT_NODE_BUDGET,
            vertex_cap: DEFAULT_VERTEX_CAP,
            triple_budget: 5_000_000,
            random_triples: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub witness: Witness,
    pub labels: Vec<String>,
    pub passed: bool,
    /// Measured quantities, e.g. λ before and after.
    pub observed: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleScanPair {
    pub original: TripleScan,
    pub mate: TripleScan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub valid: bool,
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wqh_constant: Option<i64>,
    pub switching_vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecipeReport {
    pub schema_version: String,
    pub recipe: String,
    pub params: String,
    pub method: String,
    pub provenance: String,
    pub vertices: usize,
    pub edges: usize,
    pub degree: Option<usize>,
    pub edges_changed: usize,
    pub validation: ValidationSummary,
    pub involution: bool,
    pub cospectral: CospectralVerdict,
    pub noniso: NonIsoVerdict,
    pub witnesses: Vec<WitnessCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple_scan: Option<TripleScanPair>,
    pub timings_ms: BTreeMap<String, u64>,
    pub passed: bool,
}

/// Graphs and report from a recipe run.
#[derive(Debug, Clone)]
pub struct RecipeRun {
    pub graph: Graph,
    pub mate: Graph,
    pub report: RecipeReport,
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage { stage: name.to_string(), source: Box::new(e) })
}

fn common_set(g: &Graph, u: usize, v: usize) -> Vec<u64> {
    g.row(u).iter().zip(g.row(v)).map(|(a, b)| a & b).collect()
}

fn popcount_diff(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & !y).count_ones() as usize).sum()
}

fn check_witness(g: &Graph, h: &Graph, w: &Witness) -> Result<WitnessCheck> {
    for v in w.vertices() {
        g.check_vertex(v)?;
    }
    let mut observed = BTreeMap::new();
    let passed = match *w {
        Witness::LambdaGain { u, v, gain } => {
            let (before, after) = (g.common_unchecked(u, v) as i64, h.common_unchecked(u, v) as i64);
            observed.insert("lambda_before".into(), before);
            observed.insert("lambda_after".into(), after);
            g.has_edge(u, v) && h.has_edge(u, v) && after - before == gain
        }
        Witness::LambdaAtLeast { u, v, min } => {
            let after = h.common_unchecked(u, v);
            observed.insert("lambda_before".into(), g.common_unchecked(u, v) as i64);
            observed.insert("lambda_after".into(), after as i64);
            !g.has_edge(u, v) && h.has_edge(u, v) && after >= min
        }
        Witness::LambdaDecrease { u, v, added, lost_at_least } => {
            let (cg, ch) = (common_set(g, u, v), common_set(h, u, v));
            let (gained, lost) = (popcount_diff(&ch, &cg), popcount_diff(&cg, &ch));
            observed.insert("added".into(), gained as i64);
            observed.insert("lost".into(), lost as i64);
            observed.insert("lambda_before".into(), g.common_unchecked(u, v) as i64);
            observed.insert("lambda_after".into(), h.common_unchecked(u, v) as i64);
            gained == added && lost >= lost_at_least && lost > gained
        }
        Witness::SelectiveTriple { a, b, c, mate_count } => {
            let before = selective_neighbor_count(g, a, b, c)?;
            let after = selective_neighbor_count(h, a, b, c)?;
            observed.insert("count_original".into(), before as i64);
            observed.insert("count_mate".into(), after as i64);
            let independent = |x: &Graph| !x.has_edge(a, b) && !x.has_edge(a, c) && !x.has_edge(b, c);
            independent(g) && independent(h) && after == mate_count && before != mate_count
        }
    };
    let labels = w.vertices().iter().map(|&v| g.label(v).unwrap_or_default().to_string()).collect();
    Ok(WitnessCheck { witness: w.clone(), labels, passed, observed })
}

/// Builds, validates, switches, compares spectra, checks witnesses and runs
/// the non-isomorphism ladder. Stage failures carry the stage name.
pub fn run_recipe(r: &Recipe, opts: &RunOptions) -> Result<RecipeRun> {
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, u64>| {
        timings.insert(name.to_string(), clock.elapsed().as_millis() as u64);
        clock = Instant::now();
    };

    let scheme = stage("build", Scheme::with_cap(r.params.clone(), opts.vertex_cap))?;
    let g = scheme.build();
    lap("build", &mut timings);

    let validation = stage("validate", r.spec.validate(&g))?;
    let summary = ValidationSummary {
        valid: validation.valid,
        violations: validation.violations.iter().map(|v| v.to_string()).collect(),
        wqh_constant: validation.wqh_constant,
        switching_vertices: validation.switching_vertex_count(),
    };
    if !validation.valid {
        let source = Box::new(Error::ConditionsViolated(validation.summary()));
        return Err(Error::Stage { stage: "validate".into(), source });
    }
    let h = stage("switch", r.spec.apply(&g))?;
    let back = stage("switch", r.spec.apply(&h))?;
    let involution = back.same_adjacency(&g);
    let edges_changed: usize =
        (0..g.n()).map(|v| popcount_diff(g.row(v), h.row(v)) + popcount_diff(h.row(v), g.row(v))).sum::<usize>() / 2;
    lap("switch", &mut timings);

    let spectrum = stage("cospectral", cospectral(&g, &h, opts.num_primes, opts.seed))?;
    lap("cospectral", &mut timings);

    let witnesses: Vec<WitnessCheck> =
        stage("witness", r.witnesses.iter().map(|w| check_witness(&g, &h, w)).collect())?;
    let mut triple_scan = None;
    if let Some(&Witness::SelectiveTriple { a, b, c, .. }) =
        r.witnesses.iter().find(|w| matches!(w, Witness::SelectiveTriple { .. }))
    {
        let mut cands = vec![[a, b, c]];
        cands.extend(random_independent_triples(&g, opts.random_triples, opts.seed));
        let original = stage("triple-scan", scan_triple_property(&g, opts.triple_budget, &cands))?;
        let mate = stage("triple-scan", scan_triple_property(&h, opts.triple_budget, &cands))?;
        triple_scan = Some(TripleScanPair { original, mate });
        lap("triple-scan", &mut timings);
    }

    let noniso = nonisomorphic(&g, &h, opts.node_budget);
    lap("noniso", &mut timings);

    let passed = summary.valid
        && involution
        && spectrum.equal
        && noniso.distinguished
        && witnesses.iter().all(|w| w.passed)
        && triple_scan.as_ref().map_or(true, |t| !t.original.holds() && t.mate.holds());
    let report = RecipeReport {
        schema_version: REPORT_SCHEMA_VERSION.into(),
        recipe: r.name.clone(),
        params: r.params.to_string(),
        method: r.spec.method().into(),
        provenance: r.provenance.clone(),
        vertices: g.n(),
        edges: g.edge_count(),
        degree: g.regular_degree(),
        edges_changed,
        validation: summary,
        involution,
        cospectral: spectrum,
        noniso,
        witnesses,
        triple_scan,
        timings_ms: timings,
        passed,
    };
    Ok(RecipeRun { graph: g, mate: h, report })
}
