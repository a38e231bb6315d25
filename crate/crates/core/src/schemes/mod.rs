//! Generalized Johnson graphs `J_S(n,k)` and generalized Grassmann graphs
//! `J_{q,S}(n,k)`.
//!
//! Vertices are listed in a fixed canonical order: k-subsets by increasing
//! bitmask (colex), k-subspaces by pivot-column mask and then by the
//! row-major entries of their RREF basis. Switching specs refer to vertices by
//! their index in this order.

mod params;
mod vertex;

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::algebra::{binom, eliminate, gauss_binom, BigNat, FieldTable, MatrixFq};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};

pub use params::{SchemeKind, SchemeParams};
pub use vertex::{SetVertex, SubspaceVertex};

pub const DEFAULT_VERTEX_CAP: usize = 100_000;

/// Vertex list of a scheme graph in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Vertices {
    Sets(Vec<SetVertex>),
    Subspaces(Vec<SubspaceVertex>),
}

impl Vertices {
    pub fn len(&self) -> usize {
        match self {
            Vertices::Sets(v) => v.len(),
            Vertices::Subspaces(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            Vertices::Sets(v) => v.iter().map(SetVertex::label).collect(),
            Vertices::Subspaces(v) => v.iter().map(SubspaceVertex::label).collect(),
        }
    }
}

pub fn enumerate_vertices(p: &SchemeParams, cap: usize) -> Result<Vertices> {
    let count = p.vertex_count();
    let count_u = count.to_u128().unwrap_or(u128::MAX);
    if count_u > cap as u128 {
        return Err(Error::CapExceeded { count: count_u, cap });
    }
    let (n, k) = (p.n(), p.k());
    Ok(match p.kind() {
        SchemeKind::Johnson => Vertices::Sets(
            k_subset_masks(n, k).map(|mask| SetVertex::new(mask, n).expect("valid mask")).collect(),
        ),
        SchemeKind::Grassmann { q } => Vertices::Subspaces(enumerate_subspaces(n, k, q)),
    })
}

/// k-subsets of `0..n` as bitmasks in increasing numeric (colex) order.
pub(crate) fn k_subset_masks(n: usize, k: usize) -> impl Iterator<Item = u128> {
    let limit: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let first: Option<u128> = if k > n {
        None
    } else if k == 0 {
        Some(0)
    } else if k == 128 {
        Some(u128::MAX)
    } else {
        Some((1u128 << k) - 1)
    };
    std::iter::successors(first, move |&x| {
        if x == 0 {
            return None;
        }
        // Gosper's hack
        let c = x & x.wrapping_neg();
        let r = x.checked_add(c)?;
        let next = (((r ^ x) >> 2) / c) | r;
        (next <= limit && next.count_ones() as usize == k).then_some(next)
    })
}

fn enumerate_subspaces(n: usize, k: usize, q: u32) -> Vec<SubspaceVertex> {
    let field = FieldTable::get(q).expect("params validated the field");
    let mut out = Vec::new();
    for pivot_mask in k_subset_masks(n, k) {
        let pivots: Vec<usize> = (0..n).filter(|&c| pivot_mask >> c & 1 == 1).collect();
        let free: Vec<usize> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| {
                let pivots = &pivots;
                ((pc + 1)..n).filter(move |c| !pivots.contains(c)).map(move |c| r * n + c)
            })
            .collect();
        let mut data = vec![0u8; k * n];
        for (r, &pc) in pivots.iter().enumerate() {
            data[r * n + pc] = 1;
        }
        // odometer over the free entries, last position fastest => lexicographic
        loop {
            let rows: Vec<Vec<u8>> = data.chunks(n).map(<[u8]>::to_vec).collect();
            let basis = MatrixFq::from_rows(field, n, &rows).expect("entries in field");
            out.push(SubspaceVertex::from_rref(basis).expect("constructed in RREF"));
            let mut advanced = false;
            for &pos in free.iter().rev() {
                if u32::from(data[pos]) + 1 < q {
                    data[pos] += 1;
                    advanced = true;
                    break;
                }
                data[pos] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
    debug_assert!(out.windows(2).all(|w| w[0] < w[1]));
    out
}

/// `|u ∩ v|` for two k-subsets of the same ground set.
pub fn intersection_size(u: &SetVertex, v: &SetVertex) -> Result<usize> {
    if u.n() != v.n() || u.k() != v.k() {
        return Err(Error::InvalidInput(format!(
            "sets from different schemes: ({},{}) vs ({},{})",
            u.n(),
            u.k(),
            v.n(),
            v.k()
        )));
    }
    Ok((u.mask() & v.mask()).count_ones() as usize)
}

/// Valency of the scheme graph, computed from the parameters alone.
pub fn degree_formula(p: &SchemeParams) -> BigNat {
    let (n, k) = (p.n() as u64, p.k() as u64);
    p.s()
        .iter()
        .map(|&s| {
            let s = s as u64;
            match p.kind() {
                SchemeKind::Johnson => binom(k, s) * binom(n - k, k - s),
                SchemeKind::Grassmann { q } => {
                    let q = u64::from(q);
                    BigNat::from(q).pow(((k - s) * (k - s)) as u32)
                        * gauss_binom(k, s, q)
                        * gauss_binom(n - k, k - s, q)
                }
            }
        })
        .sum()
}

/// Scheme parameters together with their canonical vertex list.
#[derive(Debug, Clone)]
pub struct Scheme {
    params: SchemeParams,
    vertices: Vertices,
}

impl Scheme {
    pub fn new(params: SchemeParams) -> Result<Self> {
        Self::with_cap(params, DEFAULT_VERTEX_CAP)
    }

    pub fn with_cap(params: SchemeParams, cap: usize) -> Result<Self> {
        let vertices = enumerate_vertices(&params, cap)?;
        Ok(Scheme { params, vertices })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn vertices(&self) -> &Vertices {
        &self.vertices
    }

    /// Index of the k-set given by 1-based elements.
    pub fn index_of_set(&self, elements: &[usize]) -> Option<usize> {
        let Vertices::Sets(sets) = &self.vertices else { return None };
        let target = SetVertex::from_elements(elements, self.params.n()).ok()?;
        if target.k() != self.params.k() {
            return None;
        }
        sets.binary_search(&target).ok()
    }

    /// Index of the subspace spanned by the rows of `span` (any basis).
    pub fn index_of_subspace(&self, span: &MatrixFq) -> Option<usize> {
        let Vertices::Subspaces(spaces) = &self.vertices else { return None };
        let target = SubspaceVertex::span(span).ok()?;
        if target.dim() != self.params.k() || target.ambient() != self.params.n() {
            return None;
        }
        spaces.binary_search(&target).ok()
    }

    pub fn build(&self) -> Graph {
        let n = self.vertices.len();
        let rows: Vec<Vec<usize>> = match &self.vertices {
            Vertices::Sets(sets) => {
                let s_mask = s_bitmask(self.params.s());
                (0..n)
                    .into_par_iter()
                    .map(|u| {
                        let mu = sets[u].mask();
                        (u + 1..n)
                            .filter(|&v| s_mask >> (mu & sets[v].mask()).count_ones() & 1 == 1)
                            .collect()
                    })
                    .collect()
            }
            Vertices::Subspaces(spaces) => {
                let s_mask = s_bitmask(self.params.s());
                let field = FieldTable::get(self.params.q().expect("grassmann")).expect("valid q");
                let (dim, amb) = (self.params.k(), self.params.n());
                (0..n)
                    .into_par_iter()
                    .map_init(
                        || vec![0u8; 2 * dim * amb],
                        |buf, u| {
                            let bu = spaces[u].basis().raw();
                            (u + 1..n)
                                .filter(|&v| {
                                    buf[..bu.len()].copy_from_slice(bu);
                                    buf[bu.len()..].copy_from_slice(spaces[v].basis().raw());
                                    let sum = eliminate(field, buf, 2 * dim, amb, false);
                                    s_mask >> (2 * dim - sum) & 1 == 1
                                })
                                .collect()
                        },
                    )
                    .collect()
            }
        };
        let mut b = GraphBuilder::new(n);
        for (u, row) in rows.iter().enumerate() {
            for &v in row {
                b.set(u, v, true);
            }
        }
        b.labels(Some(self.vertices.labels())).build()
    }
}

fn s_bitmask(s: &BTreeSet<usize>) -> u128 {
    s.iter().fold(0u128, |m, &x| m | 1 << x)
}

/// Builds the scheme graph with the default vertex cap.
pub fn build(p: &SchemeParams) -> Result<Graph> {
    Ok(Scheme::new(p.clone())?.build())
}

pub fn build_with_cap(p: &SchemeParams, cap: usize) -> Result<Graph> {
    Ok(Scheme::with_cap(p.clone(), cap)?.build())
}
