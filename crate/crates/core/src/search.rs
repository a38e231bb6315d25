//! Bounded brute-force search for switching sets.
//!
//! `gm4` walks 4-subsets in lexicographic order. A 4-set is a GM cell iff its
//! induced subgraph is regular and every outside vertex sees an even number
//! of its members, which is one XOR of four rows. `wqh33` checks pairs drawn
//! from caller-supplied candidate lists; [`partition_pattern`] and
//! [`star_pattern`] produce such lists on Johnson graphs.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::binom_u64;
use crate::certify::{canonical_form, lambda_profile, LambdaProfile, DEFAULT_NODE_BUDGET};
use crate::graph::{words_for, Graph, VertexSet};
use crate::schemes::Scheme;
use crate::spectra::{charpoly_mod_p, coefficient_hash, primes_from_seed, DEFAULT_SEED};
use crate::switching::{validate_gm, validate_wqh, GmSpec, SwitchSpec, WqhSpec};
use crate::{Error, Result};

/// Above this many vertices, found mates are compared by fingerprint only.
pub const CANONICAL_DEDUP_MAX_N: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Gm4,
    Wqh33,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub max_candidates: u64,
    pub time_budget: Duration,
    /// Drop identity switches and keep one spec per isomorphism class of mate.
    pub dedup: bool,
    pub node_budget: u64,
}

impl SearchConfig {
    pub fn new(mode: SearchMode, max_candidates: u64, time_budget: Duration, dedup: bool) -> Result<Self> {
        if max_candidates == 0 || time_budget.is_zero() {
            return Err(Error::InvalidInput("search budgets must be positive".into()));
        }
        Ok(SearchConfig { mode, max_candidates, time_budget, dedup, node_budget: DEFAULT_NODE_BUDGET })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Found {
    pub spec: SwitchSpec,
    pub switching_vertices: usize,
    pub edges_changed: usize,
    /// Index of the mate's isomorphism class among the returned specs (dedup only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mate_class: Option<usize>,
    /// Fingerprint matched an earlier mate but isomorphism was not decided.
    pub possibly_duplicate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub mode: SearchMode,
    pub found: Vec<Found>,
    pub candidates_examined: u64,
    pub candidates_total: u128,
    /// Candidate or time budget ran out before the space was covered.
    pub partial: bool,
    pub elapsed_ms: u64,
}

fn changed_edges(g: &Graph, h: &Graph) -> usize {
    (0..g.n())
        .map(|v| g.row(v).iter().zip(h.row(v)).map(|(a, b)| (a ^ b).count_ones() as usize).sum::<usize>())
        .sum::<usize>()
        / 2
}

fn induced_regular(g: &Graph, c: [usize; 4]) -> bool {
    let deg = |i: usize| c.iter().filter(|&&x| x != c[i] && g.has_edge(c[i], x)).count();
    let d0 = deg(0);
    (1..4).all(|i| deg(i) == d0)
}

fn gm4_cell(g: &Graph, c: [usize; 4], scratch: &mut [u64]) -> bool {
    if !induced_regular(g, c) {
        return false;
    }
    let (ra, rb, rc, rd) = (g.row(c[0]), g.row(c[1]), g.row(c[2]), g.row(c[3]));
    for (i, s) in scratch.iter_mut().enumerate() {
        *s = ra[i] ^ rb[i] ^ rc[i] ^ rd[i];
    }
    for &v in &c {
        scratch[v / 64] &= !(1u64 << (v % 64));
    }
    scratch.iter().all(|&w| w == 0)
}

/// All single-cell GM specs on 4 vertices, in lexicographic order of the cell.
pub fn search_gm4(g: &Graph, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let start = Instant::now();
    let n = g.n();
    let total = u128::from(binom_u64(n as u64, 4));
    let examined = AtomicU64::new(0);
    let timed_out = AtomicBool::new(false);

    // lexicographic prefix: vertex `a` may use what the earlier anchors left over
    let mut limits = Vec::with_capacity(n);
    let mut left = cfg.max_candidates;
    for a in 0..n {
        let here = if n - a - 1 >= 3 { binom_u64((n - a - 1) as u64, 3) } else { 0 };
        limits.push(here.min(left));
        left -= here.min(left);
    }
    let cells: Vec<[usize; 4]> = (0..n)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            let mut scratch = vec![0u64; words_for(n)];
            let mut budget = limits[a];
            'outer: for b in a + 1..n {
                for c in b + 1..n {
                    if timed_out.load(Ordering::Relaxed) {
                        break 'outer;
                    }
                    for d in c + 1..n {
                        if budget == 0 {
                            break 'outer;
                        }
                        budget -= 1;
                        if gm4_cell(g, [a, b, c, d], &mut scratch) {
                            out.push([a, b, c, d]);
                        }
                    }
                    if start.elapsed() > cfg.time_budget {
                        timed_out.store(true, Ordering::Relaxed);
                    }
                }
            }
            examined.fetch_add(limits[a] - budget, Ordering::Relaxed);
            out
        })
        .collect();

    let mut specs = Vec::with_capacity(cells.len());
    for c in cells {
        let spec = GmSpec::new(vec![VertexSet::new(c.to_vec())?])?;
        let report = validate_gm(g, &spec)?;
        debug_assert!(report.valid, "fast GM check disagrees with the validator on {c:?}");
        if report.valid {
            specs.push((SwitchSpec::Gm(spec), report.switching_vertex_count()));
        }
    }
    let examined = examined.into_inner();
    let partial = u128::from(examined) < total;
    finish(g, cfg, SearchMode::Gm4, specs, examined, total, partial, start)
}

struct Masks {
    bits: Vec<u64>,
}

impl Masks {
    fn new(set: &VertexSet, n: usize) -> Self {
        Masks { bits: set.to_mask(n) }
    }

    fn count(&self, g: &Graph, v: usize) -> usize {
        g.row(v).iter().zip(&self.bits).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }
}

fn quick_wqh(g: &Graph, c1: &VertexSet, m1: &Masks, c2: &VertexSet, m2: &Masks) -> bool {
    let t = c1.len();
    if t == 0 || t != c2.len() || !c1.is_disjoint(c2) {
        return false;
    }
    let first = c1.iter().next().expect("non-empty");
    let c = m1.count(g, first) as i64 - m2.count(g, first) as i64;
    if c1.iter().any(|v| m1.count(g, v) as i64 - m2.count(g, v) as i64 != c)
        || c2.iter().any(|v| m2.count(g, v) as i64 - m1.count(g, v) as i64 != c)
    {
        return false;
    }
    (0..g.n()).filter(|&v| !c1.contains(v) && !c2.contains(v)).all(|v| {
        let (a, b) = (m1.count(g, v), m2.count(g, v));
        a == b || (a == t && b == 0) || (a == 0 && b == t)
    })
}

/// All validating pairs `(C1, C2)` from the two candidate lists. A pair and
/// its swap give the same switching, so each is reported once with the
/// smaller set first.
pub fn search_wqh33(g: &Graph, candidates1: &[VertexSet], candidates2: &[VertexSet], cfg: &SearchConfig) -> Result<SearchOutcome> {
    let start = Instant::now();
    let n = g.n();
    for s in candidates1.iter().chain(candidates2) {
        if let Some(m) = s.max() {
            g.check_vertex(m)?;
        }
    }
    let total = candidates1.len() as u128 * candidates2.len() as u128;
    let m2: Vec<Masks> = candidates2.iter().map(|s| Masks::new(s, n)).collect();
    let timed_out = AtomicBool::new(false);
    let examined = AtomicU64::new(0);
    let cap = cfg.max_candidates;
    let row_len = candidates2.len() as u64;
    let mut pairs: Vec<(usize, usize)> = candidates1
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, c1)| {
            let mut out = Vec::new();
            let offset = i as u64 * row_len;
            if offset >= cap || timed_out.load(Ordering::Relaxed) {
                return out;
            }
            if start.elapsed() > cfg.time_budget {
                timed_out.store(true, Ordering::Relaxed);
                return out;
            }
            let mask1 = Masks::new(c1, n);
            let take = (cap - offset).min(row_len) as usize;
            for (j, c2) in candidates2.iter().enumerate().take(take) {
                if quick_wqh(g, c1, &mask1, c2, &m2[j]) {
                    out.push((i, j));
                }
            }
            examined.fetch_add(take as u64, Ordering::Relaxed);
            out
        })
        .collect();
    pairs.sort_unstable();

    let mut specs: Vec<(SwitchSpec, usize)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (i, j) in pairs {
        let (a, b) = (&candidates1[i], &candidates2[j]);
        let (c1, c2) = if a <= b { (a, b) } else { (b, a) };
        if !seen.insert((c1.clone(), c2.clone())) {
            continue;
        }
        let spec = WqhSpec::new(c1.clone(), c2.clone())?;
        let report = validate_wqh(g, &spec)?;
        debug_assert!(report.valid, "fast WQH check disagrees with the validator");
        if report.valid {
            specs.push((SwitchSpec::Wqh(spec), report.switching_vertex_count()));
        }
    }
    let examined = examined.into_inner();
    let partial = u128::from(examined) < total;
    finish(g, cfg, SearchMode::Wqh33, specs, examined, total, partial, start)
}

#[derive(PartialEq, Eq)]
enum MateKey {
    Canonical(Vec<u8>),
    Fingerprint { degrees: Vec<usize>, lambdas: LambdaProfile, charpoly: String },
}

fn fingerprint(h: &Graph) -> Result<MateKey> {
    let mut degrees = h.degree_sequence();
    degrees.sort_unstable();
    let p = primes_from_seed(DEFAULT_SEED, 1)[0];
    Ok(MateKey::Fingerprint { degrees, lambdas: lambda_profile(h), charpoly: coefficient_hash(&charpoly_mod_p(h, p)?) })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    g: &Graph,
    cfg: &SearchConfig,
    mode: SearchMode,
    specs: Vec<(SwitchSpec, usize)>,
    examined: u64,
    total: u128,
    partial: bool,
    start: Instant,
) -> Result<SearchOutcome> {
    let mut found = Vec::new();
    let mut keys: Vec<MateKey> = Vec::new();
    for (spec, switching_vertices) in specs {
        let h = spec.apply(g)?;
        let edges_changed = changed_edges(g, &h);
        let mut entry = Found { spec, switching_vertices, edges_changed, mate_class: None, possibly_duplicate: false };
        if cfg.dedup {
            if edges_changed == 0 {
                continue;
            }
            let canonical = if g.n() <= CANONICAL_DEDUP_MAX_N { canonical_form(&h, cfg.node_budget).ok() } else { None };
            let key = match canonical {
                Some(c) => MateKey::Canonical(c.bytes),
                None => fingerprint(&h)?,
            };
            match keys.iter().position(|k| *k == key) {
                Some(_) if matches!(key, MateKey::Canonical(_)) => continue,
                Some(i) => {
                    entry.mate_class = Some(i);
                    entry.possibly_duplicate = true;
                }
                None => {
                    entry.mate_class = Some(keys.len());
                    keys.push(key);
                }
            }
        }
        found.push(entry);
    }
    Ok(SearchOutcome {
        mode,
        found,
        candidates_examined: examined,
        candidates_total: total,
        partial,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

fn index_sets(scheme: &Scheme, sets: &[Vec<usize>]) -> Result<VertexSet> {
    let idx = sets
        .iter()
        .map(|s| {
            scheme
                .index_of_set(s)
                .ok_or_else(|| Error::InvalidInput(format!("{s:?} is not a vertex of {}", scheme.params())))
        })
        .collect::<Result<Vec<_>>>()?;
    VertexSet::new(idx)
}

fn check_elements(scheme: &Scheme, elems: &[usize]) -> Result<()> {
    let n = scheme.params().n();
    if let Some(&e) = elems.iter().find(|&&e| e == 0 || e > n) {
        return Err(Error::InvalidInput(format!("element {e} outside 1..={n}")));
    }
    let mut sorted = elems.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != elems.len() {
        return Err(Error::InvalidInput("repeated element in pattern".into()));
    }
    Ok(())
}

/// Set partitions of `ground` into blocks of size `block`, blocks sorted.
fn block_partitions(ground: &[usize], block: usize) -> Vec<Vec<Vec<usize>>> {
    if ground.is_empty() {
        return vec![Vec::new()];
    }
    let (first, rest) = (ground[0], &ground[1..]);
    let mut out = Vec::new();
    for others in combinations(rest, block - 1) {
        let mut b = vec![first];
        b.extend(&others);
        let remaining: Vec<usize> = rest.iter().copied().filter(|x| !others.contains(x)).collect();
        for mut tail in block_partitions(&remaining, block) {
            tail.insert(0, b.clone());
            out.push(tail);
        }
    }
    out
}

fn combinations(items: &[usize], r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    if items.len() < r {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..=items.len() - r {
        for mut c in combinations(&items[i + 1..], r - 1) {
            c.insert(0, items[i]);
            out.push(c);
        }
    }
    out
}

/// Candidates `{B ∪ {x} : B ∈ P}` for every partition `P` of `ground` into
/// (k−1)-blocks and every `x` in `extras`, on a Johnson scheme.
pub fn partition_pattern(scheme: &Scheme, ground: &[usize], extras: &[usize]) -> Result<Vec<VertexSet>> {
    check_elements(scheme, &[ground, extras].concat())?;
    let k = scheme.params().k();
    if k < 2 || ground.len() % (k - 1) != 0 {
        return Err(Error::InvalidInput(format!("ground of size {} does not split into {}-blocks", ground.len(), k.saturating_sub(1))));
    }
    let mut out = Vec::new();
    for p in block_partitions(ground, k - 1) {
        for &x in extras {
            let sets: Vec<Vec<usize>> = p.iter().map(|b| [b.as_slice(), &[x]].concat()).collect();
            out.push(index_sets(scheme, &sets)?);
        }
    }
    Ok(out)
}

/// Candidates `{core ∪ {x} : x ∈ pool}` for every (k−1)-subset `core` of
/// `ground` and every `pool_size`-subset `pool` of `ground ∖ core`.
pub fn star_pattern(scheme: &Scheme, ground: &[usize], pool_size: usize) -> Result<Vec<VertexSet>> {
    check_elements(scheme, ground)?;
    let k = scheme.params().k();
    let mut out = Vec::new();
    for core in combinations(ground, k.saturating_sub(1)) {
        let rest: Vec<usize> = ground.iter().copied().filter(|x| !core.contains(x)).collect();
        for pool in combinations(&rest, pool_size) {
            let sets: Vec<Vec<usize>> = pool.iter().map(|&x| [core.as_slice(), &[x]].concat()).collect();
            out.push(index_sets(scheme, &sets)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: SearchMode, dedup: bool) -> SearchConfig {
        SearchConfig::new(mode, u64::MAX, Duration::from_secs(60), dedup).unwrap()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(block_partitions(&[1, 2, 3, 4, 5, 6, 7, 8, 9], 3).len(), 280);
        assert_eq!(combinations(&[1, 2, 3, 4, 5], 3).len(), 10);
    }

    #[test]
    fn edgeless_graph_gm4() {
        let g = Graph::empty(6);
        let all = search_gm4(&g, &cfg(SearchMode::Gm4, false)).unwrap();
        assert_eq!(all.found.len(), 15);
        assert!(!all.partial);
        let dedup = search_gm4(&g, &cfg(SearchMode::Gm4, true)).unwrap();
        assert!(dedup.found.is_empty());
    }

    #[test]
    fn candidate_prefix_is_lexicographic() {
        let g = Graph::empty(6);
        let mut c = cfg(SearchMode::Gm4, false);
        c.max_candidates = 11;
        let out = search_gm4(&g, &c).unwrap();
        assert!(out.partial);
        assert_eq!(out.candidates_examined, 11);
        // 10 cells start with vertex 0, the 11th is {1,2,3,4}
        let SwitchSpec::Gm(last) = &out.found.last().unwrap().spec else { panic!() };
        assert_eq!(last.cells()[0].as_slice(), &[1, 2, 3, 4]);
    }

    #[test]
    fn empty_candidate_lists() {
        let g = Graph::complete(5);
        assert!(search_wqh33(&g, &[], &[], &cfg(SearchMode::Wqh33, false)).unwrap().found.is_empty());
    }

    #[test]
    fn zero_budget_rejected() {
        assert!(SearchConfig::new(SearchMode::Gm4, 0, Duration::from_secs(1), false).is_err());
    }
}
