//! Immutable simple graphs on bit-packed adjacency rows.

mod graph6;
mod vertex_set;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use graph6::{decode_graph6, encode_graph6};
pub use vertex_set::VertexSet;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// A simple undirected loopless graph.
///
/// Row `v` is a bitset of the neighbours of `v`; rows are padded with zero
/// bits up to a multiple of 64.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.edge_count())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        GraphBuilder::new(n).build()
    }

    pub fn complete(n: usize) -> Self {
        Self::empty(n).complement()
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    /// Index of the vertex carrying `label`, if labels are present.
    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.degree_unchecked(v))
    }

    #[inline]
    pub(crate) fn degree_unchecked(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn common_neighbors(&self, u: usize, v: usize) -> Result<usize> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidInput(format!(
                "common_neighbors needs distinct vertices, got {u} twice"
            )));
        }
        Ok(self.common_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn common_unchecked(&self, u: usize, v: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(v))
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree_unchecked(v)).collect()
    }

    /// Common degree when the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = if self.n == 0 { 0 } else { self.degree_unchecked(0) };
        (1..self.n).all(|v| self.degree_unchecked(v) == d).then_some(d)
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Off-diagonal complement; labels carried over.
    pub fn complement(&self) -> Graph {
        let mut bits: Vec<u64> = self.bits.iter().map(|w| !w).collect();
        let tail = self.n % 64;
        for v in 0..self.n {
            let row = &mut bits[v * self.words..(v + 1) * self.words];
            row[v / 64] &= !(1u64 << (v % 64));
            if tail != 0 {
                row[self.words - 1] &= (1u64 << tail) - 1;
            }
        }
        Graph { n: self.n, words: self.words, bits, labels: self.labels.clone() }
    }

    /// The graph with vertex `v` renamed to `perm[v]`. Labels follow their vertices.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        check_permutation(perm, self.n)?;
        let mut b = GraphBuilder::new(self.n);
        for (u, v) in self.edges() {
            b.set(perm[u], perm[v], true);
        }
        let mut g = b.build();
        if let Some(labels) = &self.labels {
            let mut moved = vec![String::new(); self.n];
            for (v, l) in labels.iter().enumerate() {
                moved[perm[v]] = l.clone();
            }
            g.labels = Some(moved);
        }
        Ok(g)
    }

    pub fn same_adjacency(&self, other: &Graph) -> bool {
        self.n == other.n && self.bits == other.bits
    }

    pub fn to_builder(&self) -> GraphBuilder {
        GraphBuilder { n: self.n, words: self.words, bits: self.bits.clone(), labels: self.labels.clone() }
    }

    pub fn to_edge_list(&self) -> EdgeListJson {
        EdgeListJson {
            n: self.n,
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_edge_list(e: &EdgeListJson) -> Result<Graph> {
        let edges: Vec<(usize, usize)> = e.edges.iter().map(|&[u, v]| (u, v)).collect();
        let g = Graph::from_edges(e.n, &edges)?;
        match &e.labels {
            Some(l) => g.with_labels(l.clone()),
            None => Ok(g),
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidInput(format!("permutation of length {} for {n} vertices", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
    }
    Ok(())
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + t)
        })
    })
}

/// Edge-list interchange form used in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeListJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Mutable adjacency used while constructing or switching a graph.
#[derive(Clone)]
pub struct GraphBuilder {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        let words = words_for(n);
        GraphBuilder { n, words, bits: vec![0; n * words], labels: None }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if u == v {
            return Err(Error::InvalidInput(format!("loop at vertex {u}")));
        }
        self.set(u, v, true);
        Ok(())
    }

    /// Sets both `(u,v)` and `(v,u)`; indices must be valid and distinct.
    #[inline]
    pub fn set(&mut self, u: usize, v: usize, on: bool) {
        debug_assert!(u != v && u < self.n && v < self.n);
        let (iu, mu) = (u * self.words + v / 64, 1u64 << (v % 64));
        let (iv, mv) = (v * self.words + u / 64, 1u64 << (u % 64));
        if on {
            self.bits[iu] |= mu;
            self.bits[iv] |= mv;
        } else {
            self.bits[iu] &= !mu;
            self.bits[iv] &= !mv;
        }
    }

    #[inline]
    pub fn toggle(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.n && v < self.n);
        self.bits[u * self.words + v / 64] ^= 1u64 << (v % 64);
        self.bits[v * self.words + u / 64] ^= 1u64 << (u % 64);
    }

    pub fn labels(mut self, labels: Option<Vec<String>>) -> Self {
        self.labels = labels;
        self
    }

    pub fn build(self) -> Graph {
        Graph { n: self.n, words: self.words, bits: self.bits, labels: self.labels }
    }
}
