//! Canonical labeling by individualization–refinement.
//!
//! Ordered partitions are refined to equitable ones by splitting cells on
//! neighbour counts into a splitter cell (fragments ordered by count). The
//! search tree individualizes a vertex of the first smallest non-singleton
//! cell at each node. A leaf's certificate is the sequence of refinement
//! trace hashes along its path followed by the relabelled adjacency matrix;
//! the canonical form is the largest certificate. Subtrees whose trace prefix
//! is already below the best leaf are cut. Automorphisms (leaves equal to the
//! first or the best leaf) prune the tree in two ways: children in a known
//! orbit of the pointwise stabilizer of the current path are skipped, and the
//! search jumps back to where the new leaf's path left the old one.

use super::wl::mix;
use crate::graph::{words_for, Graph};

/// Canonical adjacency encoding plus the labeling that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// Vertex count (u64 LE) followed by the relabelled adjacency rows.
    pub bytes: Vec<u8>,
    /// `labeling[i]` is the original vertex placed at canonical position `i`.
    pub labeling: Vec<usize>,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExhausted {
    pub nodes: u64,
}

impl std::fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "search-tree budget exhausted after {} nodes", self.nodes)
    }
}

#[derive(Clone)]
struct Partition {
    lab: Vec<usize>,
    /// `cell_end[start]` is one past the last position of the cell starting at `start`.
    cell_end: Vec<usize>,
    /// Start position of the cell holding each vertex.
    cell_of: Vec<usize>,
}

impl Partition {
    fn unit(n: usize) -> Self {
        let mut cell_end = vec![0; n];
        if n > 0 {
            cell_end[0] = n;
        }
        Partition { lab: (0..n).collect(), cell_end, cell_of: vec![0; n] }
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.lab.len();
        let mut s = 0;
        std::iter::from_fn(move || {
            if s >= n {
                return None;
            }
            let e = self.cell_end[s];
            let out = (s, e);
            s = e;
            Some(out)
        })
    }

    fn is_discrete(&self) -> bool {
        self.cells().all(|(s, e)| e - s == 1)
    }

    fn target_cell(&self) -> Option<(usize, usize)> {
        self.cells()
            .filter(|(s, e)| e - s > 1)
            .min_by_key(|&(s, e)| (e - s, s))
    }

    /// Moves `v` into a new singleton cell placed at the front of its cell.
    fn individualize(&mut self, v: usize) -> usize {
        let s = self.cell_of[v];
        let e = self.cell_end[s];
        let pos = self.lab[s..e].iter().position(|&x| x == v).expect("v in its cell") + s;
        self.lab.swap(s, pos);
        self.cell_end[s] = s + 1;
        self.cell_end[s + 1] = e;
        for &x in &self.lab[s + 1..e] {
            self.cell_of[x] = s + 1;
        }
        s
    }

    /// Refines to an equitable partition. Returns a hash of the splitting
    /// trace, which depends only on the ordered partition, not on labels.
    fn refine(&mut self, g: &Graph, mut queue: Vec<usize>) -> u64 {
        let mut h = 0u64;
        let words = words_for(g.n());
        let mut mask = vec![0u64; words];
        let mut counts: Vec<(usize, usize)> = Vec::new();
        let mut head = 0;
        let mut in_queue = vec![false; self.lab.len()];
        for &s in &queue {
            in_queue[s] = true;
        }
        while head < queue.len() {
            let w = queue[head];
            head += 1;
            in_queue[w] = false;
            mask.iter_mut().for_each(|m| *m = 0);
            for &x in &self.lab[w..self.cell_end[w]] {
                mask[x / 64] |= 1 << (x % 64);
            }
            let starts: Vec<(usize, usize)> = self.cells().filter(|(s, e)| e - s > 1).collect();
            for (s, e) in starts {
                counts.clear();
                counts.extend(self.lab[s..e].iter().map(|&v| {
                    let c: u32 = g.row(v).iter().zip(&mask).map(|(a, b)| (a & b).count_ones()).sum();
                    (c as usize, v)
                }));
                if counts.iter().all(|&(c, _)| c == counts[0].0) {
                    h = mix(h ^ ((w as u64) << 40) ^ ((s as u64) << 20) ^ counts[0].0 as u64);
                    continue;
                }
                counts.sort_unstable();
                let mut start = s;
                for (i, &(c, v)) in counts.iter().enumerate() {
                    self.lab[s + i] = v;
                    if i > 0 && c != counts[i - 1].0 {
                        self.cell_end[start] = s + i;
                        h = mix(h ^ ((start as u64) << 32) ^ ((s + i) as u64) ^ mix(counts[i - 1].0 as u64));
                        start = s + i;
                    }
                    self.cell_of[v] = start;
                }
                self.cell_end[start] = e;
                h = mix(h ^ ((start as u64) << 32) ^ (e as u64) ^ mix(counts[e - s - 1].0 as u64));
                let mut p = s;
                while p < e {
                    if !in_queue[p] {
                        in_queue[p] = true;
                        queue.push(p);
                    }
                    p = self.cell_end[p];
                }
            }
        }
        h
    }
}

fn relabelled_rows(g: &Graph, lab: &[usize]) -> Vec<u64> {
    let n = g.n();
    let words = words_for(n);
    let mut pos = vec![0usize; n];
    for (i, &v) in lab.iter().enumerate() {
        pos[v] = i;
    }
    let mut out = vec![0u64; n * words];
    for (i, &v) in lab.iter().enumerate() {
        for u in g.neighbors(v) {
            let j = pos[u];
            out[i * words + j / 64] |= 1 << (j % 64);
        }
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// A discrete partition reached by the search, with its certificate.
struct Leaf {
    trace: Vec<u64>,
    rows: Vec<u64>,
    lab: Vec<usize>,
    path: Vec<usize>,
}

impl Leaf {
    /// `self.lab[i] ↦ other.lab[i]`
    fn map_to(&self, other: &[usize]) -> Vec<usize> {
        let mut gamma = vec![0usize; self.lab.len()];
        for (i, &v) in self.lab.iter().enumerate() {
            gamma[v] = other[i];
        }
        gamma
    }

    fn common_prefix(&self, path: &[usize]) -> usize {
        path.iter().zip(&self.path).take_while(|(a, b)| a == b).count()
    }
}

struct Search<'g> {
    g: &'g Graph,
    budget: u64,
    nodes: u64,
    first: Option<Leaf>,
    best: Option<Leaf>,
    /// Refinement invariants of the nodes on the current path.
    trace: Vec<u64>,
    automorphisms: Vec<Vec<usize>>,
}

enum Step {
    Continue,
    /// Unwind to the ancestor at this depth and carry on with its next child.
    JumpTo(usize),
}

impl<'g> Search<'g> {
    fn run(&mut self, part: Partition, path: &mut Vec<usize>) -> Result<Step, BudgetExhausted> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExhausted { nodes: self.nodes });
        }
        if let Some(best) = &self.best {
            let d = self.trace.len().min(best.trace.len());
            if self.trace[..] < best.trace[..d] {
                return Ok(Step::Continue);
            }
        }
        if part.is_discrete() {
            return Ok(self.leaf(&part, path));
        }
        let (s, e) = part.target_cell().expect("non-discrete partition has a target cell");
        let mut children: Vec<usize> = part.lab[s..e].to_vec();
        children.sort_unstable();
        let depth = path.len();
        let mut explored: Vec<usize> = Vec::new();
        let mut orbits = Orbits { uf: UnionFind::new(self.g.n()), seen: 0 };
        for &v in &children {
            if !explored.is_empty() && self.in_explored_orbit(&mut orbits, path, v, &explored) {
                continue;
            }
            let mut child = part.clone();
            let cell = child.individualize(v);
            let inv = child.refine(self.g, vec![cell]);
            path.push(v);
            self.trace.push(inv);
            let step = self.run(child, path)?;
            path.pop();
            self.trace.pop();
            explored.push(v);
            if let Step::JumpTo(d) = step {
                if d < depth {
                    return Ok(step);
                }
            }
        }
        Ok(Step::Continue)
    }

    fn leaf(&mut self, part: &Partition, path: &[usize]) -> Step {
        let leaf = Leaf {
            trace: self.trace.clone(),
            rows: relabelled_rows(self.g, &part.lab),
            lab: part.lab.clone(),
            path: path.to_vec(),
        };
        let Some(first) = &self.first else {
            self.first = Some(Leaf { trace: leaf.trace.clone(), rows: leaf.rows.clone(), lab: leaf.lab.clone(), path: leaf.path.clone() });
            self.best = Some(leaf);
            return Step::Continue;
        };
        if leaf.trace == first.trace && leaf.rows == first.rows {
            self.automorphisms.push(first.map_to(&leaf.lab));
            return Step::JumpTo(first.common_prefix(path));
        }
        let best = self.best.as_ref().expect("best is set with first");
        match (&leaf.trace, &leaf.rows).cmp(&(&best.trace, &best.rows)) {
            std::cmp::Ordering::Greater => {
                self.best = Some(leaf);
                Step::Continue
            }
            std::cmp::Ordering::Equal => {
                self.automorphisms.push(best.map_to(&leaf.lab));
                Step::JumpTo(best.common_prefix(path))
            }
            std::cmp::Ordering::Less => Step::Continue,
        }
    }

    /// Whether `v` shares an orbit with an explored child under the known
    /// automorphisms fixing `path` pointwise.
    fn in_explored_orbit(&self, orbits: &mut Orbits, path: &[usize], v: usize, explored: &[usize]) -> bool {
        for gamma in &self.automorphisms[orbits.seen..] {
            if path.iter().all(|&x| gamma[x] == x) {
                for (x, &y) in gamma.iter().enumerate() {
                    orbits.uf.union(x, y);
                }
            }
        }
        orbits.seen = self.automorphisms.len();
        let root = orbits.uf.find(v);
        explored.iter().any(|&x| orbits.uf.find(x) == root)
    }
}

/// Orbits of the automorphisms seen so far that fix a first-path prefix.
struct Orbits {
    uf: UnionFind,
    seen: usize,
}

/// Canonical form with at most `budget` search-tree nodes.
pub fn canonical_form(g: &Graph, budget: u64) -> Result<CanonicalForm, BudgetExhausted> {
    let n = g.n();
    let mut part = Partition::unit(n);
    if n > 0 {
        part.refine(g, vec![0]);
    }
    let mut search = Search {
        g,
        budget,
        nodes: 0,
        first: None,
        best: None,
        trace: Vec::new(),
        automorphisms: Vec::new(),
    };
    search.run(part, &mut Vec::new())?;
    let Leaf { rows, lab: labeling, .. } = search.best.expect("search visits at least one leaf");
    let mut bytes = (n as u64).to_le_bytes().to_vec();
    for w in &rows {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    Ok(CanonicalForm { bytes, labeling, nodes: search.nodes })
}
