use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{binom, gauss_binom, BigNat, FieldTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SchemeKind {
    Johnson,
    Grassmann { q: u32 },
}

/// `(n, k, S)` plus the scheme kind. `S` must be a nonempty subset of
/// `{0, …, k−1}`; `k ≤ n/2` is not required.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SchemeParams {
    kind: SchemeKind,
    n: usize,
    k: usize,
    s: BTreeSet<usize>,
}

const MAX_GROUND: usize = 128;

impl SchemeParams {
    pub fn johnson(n: usize, k: usize, s: &[usize]) -> Result<Self> {
        Self::new(SchemeKind::Johnson, n, k, s.iter().copied().collect())
    }

    pub fn grassmann(n: usize, k: usize, q: u32, s: &[usize]) -> Result<Self> {
        Self::new(SchemeKind::Grassmann { q }, n, k, s.iter().copied().collect())
    }

    pub fn new(kind: SchemeKind, n: usize, k: usize, s: BTreeSet<usize>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if k == 0 || k > n {
            return bad(format!("need 1 <= k <= n, got n={n}, k={k}"));
        }
        if n > MAX_GROUND {
            return bad(format!("n={n} exceeds the supported maximum {MAX_GROUND}"));
        }
        if let SchemeKind::Grassmann { q } = kind {
            FieldTable::get(q).map_err(|e| Error::InvalidParams(e.to_string()))?;
        }
        if s.is_empty() {
            return bad("S is empty (the graph would be edgeless)".into());
        }
        if let Some(&x) = s.iter().find(|&&x| x >= k) {
            return bad(format!("S contains {x}, outside {{0,...,{}}}", k - 1));
        }
        Ok(SchemeParams { kind, n, k, s })
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> Option<u32> {
        match self.kind {
            SchemeKind::Johnson => None,
            SchemeKind::Grassmann { q } => Some(q),
        }
    }

    pub fn s(&self) -> &BTreeSet<usize> {
        &self.s
    }

    pub fn vertex_count(&self) -> BigNat {
        match self.kind {
            SchemeKind::Johnson => binom(self.n as u64, self.k as u64),
            SchemeKind::Grassmann { q } => gauss_binom(self.n as u64, self.k as u64, u64::from(q)),
        }
    }

    /// Parameters of the complement graph: `S ↦ {0,…,k−1} ∖ S`.
    pub fn complement(&self) -> Result<Self> {
        let s = (0..self.k).filter(|x| !self.s.contains(x)).collect();
        Self::new(self.kind, self.n, self.k, s)
    }

    /// Parameters of the isomorphic graph on `(n−k)`-sets (or spaces):
    /// `s ↦ s + n − 2k`. Values of `s` below `2k − n` cannot occur and are dropped.
    pub fn dual(&self) -> Result<Self> {
        let shift = self.n as isize - 2 * self.k as isize;
        let s = self
            .s
            .iter()
            .map(|&x| x as isize + shift)
            .filter(|&x| x >= 0)
            .map(|x| x as usize)
            .collect();
        Self::new(self.kind, self.n, self.n - self.k, s)
    }
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.s.iter().map(usize::to_string).collect();
        match self.kind {
            SchemeKind::Johnson => write!(f, "J{{{}}}({},{})", s.join(","), self.n, self.k),
            SchemeKind::Grassmann { q } => {
                write!(f, "Jq{{{}}}({},{};q={})", s.join(","), self.n, self.k, q)
            }
        }
    }
}

impl FromStr for SchemeParams {
    type Err = Error;

    /// Parses `J{2}(8,4)`, `J{2,4}(10,5)` or `Jq{0}(6,3;q=2)`.
    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidParams(format!("cannot parse scheme `{text}`"));
        let (grassmann, rest) = if let Some(r) = compact.strip_prefix("Jq") {
            (true, r)
        } else if let Some(r) = compact.strip_prefix('J') {
            (false, r)
        } else {
            return Err(bad());
        };
        let rest = rest.strip_prefix('{').ok_or_else(bad)?;
        let (s_part, rest) = rest.split_once('}').ok_or_else(bad)?;
        let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let s: BTreeSet<usize> = if s_part.is_empty() {
            BTreeSet::new()
        } else {
            s_part.split(',').map(|x| x.parse().map_err(|_| bad())).collect::<Result<_>>()?
        };
        let (nk, q) = match inner.split_once(';') {
            Some((nk, q)) if grassmann => {
                let q = q.strip_prefix("q=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                (nk, Some(q))
            }
            None if !grassmann => (inner, None),
            _ => return Err(bad()),
        };
        let (n, k) = nk.split_once(',').ok_or_else(bad)?;
        let n = n.parse().map_err(|_| bad())?;
        let k = k.parse().map_err(|_| bad())?;
        let kind = match q {
            Some(q) => SchemeKind::Grassmann { q },
            None => SchemeKind::Johnson,
        };
        Self::new(kind, n, k, s)
    }
}

impl TryFrom<String> for SchemeParams {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SchemeParams> for String {
    fn from(p: SchemeParams) -> String {
        p.to_string()
    }
}
