use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing list of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Sorts the input; repeated vertices are an error.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("vertex {} listed twice", w[0])));
        }
        Ok(VertexSet(vertices))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    /// Bitset over `n` vertices, laid out like a graph row.
    pub fn to_mask(&self, n: usize) -> Vec<u64> {
        let mut mask = vec![0u64; super::words_for(n)];
        for v in self.iter() {
            mask[v / 64] |= 1 << (v % 64);
        }
        mask
    }
}

impl TryFrom<Vec<usize>> for VertexSet {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        VertexSet::new(v)
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(s: VertexSet) -> Vec<usize> {
        s.0
    }
}
