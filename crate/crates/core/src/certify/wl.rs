//! 1-dimensional Weisfeiler–Leman colour refinement.
//!
//! Colours are `u64` hashes so that two graphs refined separately stay
//! comparable: every vertex starts with colour [`INITIAL_COLOR`], and a round
//! maps colour `c` with sorted neighbour colours `d_1 ≤ … ≤ d_r` to
//! `fold(mix(c ^ SEED), d_1, …, d_r)` where `fold(h, d) = mix(h ^ mix(d))`
//! and `mix` is the splitmix64 finalizer.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::graph::Graph;

pub const INITIAL_COLOR: u64 = 0;
const SEED: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One refinement round.
pub fn wl_round(g: &Graph, colors: &[u64]) -> Vec<u64> {
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            let mut nb: Vec<u64> = g.neighbors(v).map(|u| colors[u]).collect();
            nb.sort_unstable();
            nb.into_iter().fold(mix(colors[v] ^ SEED), |h, d| mix(h ^ mix(d)))
        })
        .collect()
}

/// Colour class sizes keyed by colour.
pub fn histogram(colors: &[u64]) -> BTreeMap<u64, usize> {
    let mut h = BTreeMap::new();
    for &c in colors {
        *h.entry(c).or_insert(0) += 1;
    }
    h
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WlComparison {
    /// First round (1-based) at which the histograms differ.
    pub differs_at_round: Option<usize>,
    pub rounds: usize,
    pub classes_first: usize,
    pub classes_second: usize,
}

/// Refines both graphs in lockstep until the histograms differ or both
/// colourings are stable.
pub fn wl_compare(g1: &Graph, g2: &Graph) -> WlComparison {
    let mut c1 = vec![INITIAL_COLOR; g1.n()];
    let mut c2 = vec![INITIAL_COLOR; g2.n()];
    let mut k1 = usize::from(g1.n() > 0);
    let mut k2 = usize::from(g2.n() > 0);
    let mut round = 0;
    loop {
        round += 1;
        c1 = wl_round(g1, &c1);
        c2 = wl_round(g2, &c2);
        let (h1, h2) = (histogram(&c1), histogram(&c2));
        if h1 != h2 {
            return WlComparison {
                differs_at_round: Some(round),
                rounds: round,
                classes_first: h1.len(),
                classes_second: h2.len(),
            };
        }
        if h1.len() == k1 && h2.len() == k2 {
            return WlComparison { differs_at_round: None, rounds: round, classes_first: k1, classes_second: k2 };
        }
        k1 = h1.len();
        k2 = h2.len();
    }
}
