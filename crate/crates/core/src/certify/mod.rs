//! Non-isomorphism certification.
//!
//! Cheap invariants first (degree sequence, common-neighbour multisets on
//! edges and non-edges, WL-1 histograms), then canonical labeling as the
//! backstop. Verdicts are three-valued: distinguished, isomorphic with an
//! explicit isomorphism, or unknown when the canonical search runs out of
//! budget.

mod canon;
mod wl;

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use canon::{canonical_form, BudgetExhausted, CanonicalForm};
pub use wl::{histogram as wl_histogram, mix as wl_mix, wl_compare, wl_round, WlComparison, INITIAL_COLOR};

use crate::graph::Graph;
use crate::{Error, Result};

pub const DEFAULT_NODE_BUDGET: u64 = 20_000;

/// Common-neighbour counts, as value → multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LambdaProfile {
    pub edge_lambdas: BTreeMap<usize, u64>,
    pub nonedge_lambdas: BTreeMap<usize, u64>,
}

impl LambdaProfile {
    pub fn edge_pairs(&self) -> u64 {
        self.edge_lambdas.values().sum()
    }

    pub fn nonedge_pairs(&self) -> u64 {
        self.nonedge_lambdas.values().sum()
    }
}

pub fn lambda_profile(g: &Graph) -> LambdaProfile {
    let n = g.n();
    (0..n)
        .into_par_iter()
        .fold(LambdaProfile::default, |mut acc, u| {
            for v in u + 1..n {
                let l = g.common_unchecked(u, v);
                let side = if g.has_edge(u, v) { &mut acc.edge_lambdas } else { &mut acc.nonedge_lambdas };
                *side.entry(l).or_insert(0) += 1;
            }
            acc
        })
        .reduce(LambdaProfile::default, |mut a, b| {
            for (l, c) in b.edge_lambdas {
                *a.edge_lambdas.entry(l).or_insert(0) += c;
            }
            for (l, c) in b.nonedge_lambdas {
                *a.nonedge_lambdas.entry(l).or_insert(0) += c;
            }
            a
        })
}

/// Number of `x ∉ {a,b,c}` adjacent to `a` and to neither `b` nor `c`.
pub fn selective_neighbor_count(g: &Graph, a: usize, b: usize, c: usize) -> Result<usize> {
    for v in [a, b, c] {
        g.check_vertex(v)?;
    }
    if a == b || a == c || b == c {
        return Err(Error::InvalidInput(format!("triple ({a},{b},{c}) repeats a vertex")));
    }
    Ok(selective_unchecked(g, a, b, c))
}

fn selective_unchecked(g: &Graph, a: usize, b: usize, c: usize) -> usize {
    let (ra, rb, rc) = (g.row(a), g.row(b), g.row(c));
    let mut count: usize = ra.iter().zip(rb).zip(rc).map(|((x, y), z)| (x & !y & !z).count_ones() as usize).sum();
    // a itself is never in its own row; b and c may be
    count -= usize::from(g.has_edge(a, b) && !g.has_edge(b, c));
    count -= usize::from(g.has_edge(a, c) && !g.has_edge(b, c));
    count
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleScan {
    /// A pairwise non-adjacent triple `(a,b,c)` with count exactly one.
    pub found: Option<[usize; 3]>,
    pub exhaustive: bool,
    pub triples_checked: u64,
}

impl TripleScan {
    pub fn holds(&self) -> bool {
        self.found.is_some()
    }
}

/// Number of unordered pairwise non-adjacent triples.
pub fn count_independent_triples(g: &Graph) -> u128 {
    let n = g.n();
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut total = 0u128;
            for b in a + 1..n {
                if g.has_edge(a, b) {
                    continue;
                }
                total += ((b + 1)..n).filter(|&c| !g.has_edge(a, c) && !g.has_edge(b, c)).count() as u128;
            }
            total
        })
        .sum()
}

fn check_rotations(g: &Graph, [a, b, c]: [usize; 3]) -> Option<[usize; 3]> {
    [[a, b, c], [b, a, c], [c, a, b]].into_iter().find(|&[x, y, z]| selective_unchecked(g, x, y, z) == 1)
}

/// Searches for a pairwise non-adjacent triple whose first vertex has exactly
/// one neighbour outside the other two's neighbourhoods. Exhaustive when the
/// graph has at most `budget` such (unordered) triples; otherwise only the
/// `candidates` are tried, in every choice of the first vertex. Candidates
/// that repeat a vertex or contain an edge are skipped.
pub fn scan_triple_property(g: &Graph, budget: u64, candidates: &[[usize; 3]]) -> Result<TripleScan> {
    let n = g.n();
    for t in candidates {
        for &v in t {
            g.check_vertex(v)?;
        }
    }
    if count_independent_triples(g) <= u128::from(budget) {
        let (found, checked) = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut checked = 0u64;
                for b in a + 1..n {
                    if g.has_edge(a, b) {
                        continue;
                    }
                    for c in b + 1..n {
                        if g.has_edge(a, c) || g.has_edge(b, c) {
                            continue;
                        }
                        checked += 1;
                        if let Some(t) = check_rotations(g, [a, b, c]) {
                            return (Some(t), checked);
                        }
                    }
                }
                (None, checked)
            })
            .reduce(|| (None, 0), |x, y| (x.0.or(y.0), x.1 + y.1));
        return Ok(TripleScan { found, exhaustive: true, triples_checked: checked });
    }
    let independent = |&[a, b, c]: &[usize; 3]| {
        a != b && a != c && b != c && !g.has_edge(a, b) && !g.has_edge(a, c) && !g.has_edge(b, c)
    };
    let usable: Vec<[usize; 3]> = candidates.iter().copied().filter(independent).collect();
    let found = usable.par_iter().find_map_first(|&t| check_rotations(g, t));
    Ok(TripleScan { found, exhaustive: false, triples_checked: usable.len() as u64 })
}

/// Uniformly drawn vertex `a`, then a non-neighbour `b`, then a common
/// non-neighbour `c`; draws that dead-end are retried.
pub fn random_independent_triples(g: &Graph, count: usize, seed: u64) -> Vec<[usize; 3]> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if n < 3 {
        return out;
    }
    let mut attempts = 0usize;
    while out.len() < count && attempts < count.saturating_mul(20).max(1000) {
        attempts += 1;
        let a = rng.gen_range(0..n);
        let non_a: Vec<usize> = (0..n).filter(|&x| x != a && !g.has_edge(a, x)).collect();
        if non_a.is_empty() {
            continue;
        }
        let b = non_a[rng.gen_range(0..non_a.len())];
        let non_ab: Vec<usize> = non_a.iter().copied().filter(|&x| x != b && !g.has_edge(b, x)).collect();
        if non_ab.is_empty() {
            continue;
        }
        let c = non_ab[rng.gen_range(0..non_ab.len())];
        out.push([a, b, c]);
        // draw many triples per anchor pair to amortize the scans
        for _ in 1..non_ab.len().min(64) {
            if out.len() == count {
                break;
            }
            let c = non_ab[rng.gen_range(0..non_ab.len())];
            out.push([a, b, c]);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderLevel {
    DegreeSeq,
    EdgeLambda,
    NonedgeLambda,
    Wl1Histogram,
    CanonicalForm,
}

impl fmt::Display for LadderLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LadderLevel::DegreeSeq => "degree-seq",
            LadderLevel::EdgeLambda => "edge-lambda",
            LadderLevel::NonedgeLambda => "nonedge-lambda",
            LadderLevel::Wl1Histogram => "wl1-histogram",
            LadderLevel::CanonicalForm => "canonical-form",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Distinguished,
    Isomorphic,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonIsoVerdict {
    pub distinguished: bool,
    pub outcome: Outcome,
    pub level: Option<LadderLevel>,
    pub witness: Option<String>,
    pub node_budget_exhausted: bool,
    pub node_budget: u64,
    pub nodes_used: u64,
    /// For isomorphic inputs, `isomorphism[v]` is the vertex of the second
    /// graph that vertex `v` of the first maps to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isomorphism: Option<Vec<usize>>,
}

impl NonIsoVerdict {
    fn distinguished(level: LadderLevel, witness: String, budget: u64, nodes: u64) -> Self {
        NonIsoVerdict {
            distinguished: true,
            outcome: Outcome::Distinguished,
            level: Some(level),
            witness: Some(witness),
            node_budget_exhausted: false,
            node_budget: budget,
            nodes_used: nodes,
            isomorphism: None,
        }
    }
}

fn multiset_witness(kind: &str, a: &BTreeMap<usize, u64>, b: &BTreeMap<usize, u64>) -> String {
    let mut keys: Vec<usize> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    // largest differing value reads best: "λ=30 only in the second graph"
    let l = *keys
        .iter()
        .rev()
        .find(|l| a.get(l) != b.get(l))
        .expect("multisets differ");
    let (x, y) = (a.get(&l).copied().unwrap_or(0), b.get(&l).copied().unwrap_or(0));
    match (x, y) {
        (0, _) => format!("{kind} with λ={l} exists only in the second graph ({y} of them)"),
        (_, 0) => format!("{kind} with λ={l} exists only in the first graph ({x} of them)"),
        _ => format!("{kind} with λ={l} occurs {x} times in the first graph and {y} times in the second"),
    }
}

/// Runs the invariant ladder, stopping at the first level that separates the
/// graphs.
pub fn nonisomorphic(g1: &Graph, g2: &Graph, budget: u64) -> NonIsoVerdict {
    if g1.n() != g2.n() {
        let w = format!("vertex counts {} and {}", g1.n(), g2.n());
        return NonIsoVerdict::distinguished(LadderLevel::DegreeSeq, w, budget, 0);
    }
    let (mut d1, mut d2) = (g1.degree_sequence(), g2.degree_sequence());
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        let pos = d1.iter().zip(&d2).position(|(a, b)| a != b).expect("sequences differ");
        let w = format!("sorted degree sequences differ at position {pos}: {} vs {}", d1[pos], d2[pos]);
        return NonIsoVerdict::distinguished(LadderLevel::DegreeSeq, w, budget, 0);
    }
    let (p1, p2) = (lambda_profile(g1), lambda_profile(g2));
    if p1.edge_lambdas != p2.edge_lambdas {
        let w = multiset_witness("edge", &p1.edge_lambdas, &p2.edge_lambdas);
        return NonIsoVerdict::distinguished(LadderLevel::EdgeLambda, w, budget, 0);
    }
    if p1.nonedge_lambdas != p2.nonedge_lambdas {
        let w = multiset_witness("non-edge", &p1.nonedge_lambdas, &p2.nonedge_lambdas);
        return NonIsoVerdict::distinguished(LadderLevel::NonedgeLambda, w, budget, 0);
    }
    let cmp = wl_compare(g1, g2);
    if let Some(r) = cmp.differs_at_round {
        let w = format!(
            "WL-1 colour histograms differ after round {r} ({} vs {} classes)",
            cmp.classes_first, cmp.classes_second
        );
        return NonIsoVerdict::distinguished(LadderLevel::Wl1Histogram, w, budget, 0);
    }
    let unknown = |nodes: u64| NonIsoVerdict {
        distinguished: false,
        outcome: Outcome::Unknown,
        level: None,
        witness: None,
        node_budget_exhausted: true,
        node_budget: budget,
        nodes_used: nodes,
        isomorphism: None,
    };
    let c1 = match canonical_form(g1, budget) {
        Ok(c) => c,
        Err(e) => return unknown(e.nodes),
    };
    let c2 = match canonical_form(g2, budget) {
        Ok(c) => c,
        Err(e) => return unknown(c1.nodes + e.nodes),
    };
    let nodes = c1.nodes + c2.nodes;
    if c1.bytes != c2.bytes {
        let w = "canonical adjacency encodings differ".to_string();
        return NonIsoVerdict::distinguished(LadderLevel::CanonicalForm, w, budget, nodes);
    }
    let mut iso = vec![0usize; g1.n()];
    for (&u, &v) in c1.labeling.iter().zip(&c2.labeling) {
        iso[u] = v;
    }
    debug_assert!(g1.edges().all(|(u, v)| g2.has_edge(iso[u], iso[v])));
    NonIsoVerdict {
        distinguished: false,
        outcome: Outcome::Isomorphic,
        level: Some(LadderLevel::CanonicalForm),
        witness: None,
        node_budget_exhausted: false,
        node_budget: budget,
        nodes_used: nodes,
        isomorphism: Some(iso),
    }
}
