//! Simple labeled graphs, connected components as set partitions, and the
//! quotient constructions used by the cumulant decay bound.
//!
//! Vertices are `1..=n`. A graph on a doubled vertex set `W + W` stores
//! the plain copy as `1..=m` and the barred copy as `m+1..=2m`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::dsu::Dsu;
use crate::setpart::SetPartition;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// Edge endpoint outside `1..=n`.
    VertexOutOfRange(usize),
    /// Loops are not allowed.
    Loop(usize),
    /// A quotient map must be total with values `1..=m` and surjective.
    BadQuotientMap,
    /// Strong quotients need an even vertex count (a doubled vertex set).
    NotDoubled(usize),
    /// Paired lists of different lengths.
    LengthMismatch,
    /// Empty vertex set.
    Empty,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::VertexOutOfRange(v) => write!(f, "vertex {v} out of range"),
            GraphError::Loop(v) => write!(f, "loop at vertex {v}"),
            GraphError::BadQuotientMap => write!(f, "quotient map not a surjection"),
            GraphError::NotDoubled(n) => write!(f, "vertex set of size {n} is not doubled"),
            GraphError::LengthMismatch => write!(f, "paired lists differ in length"),
            GraphError::Empty => write!(f, "empty vertex set"),
        }
    }
}

/// Simple undirected graph: no loops, no multi-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(SimpleGraph {
            n,
            edges: BTreeSet::new(),
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = SimpleGraph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u == 0 || u > self.n {
            return Err(GraphError::VertexOutOfRange(u));
        }
        if v == 0 || v > self.n {
            return Err(GraphError::VertexOutOfRange(v));
        }
        if u == v {
            return Err(GraphError::Loop(u));
        }
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Connected components as a set partition of the vertex set.
    pub fn connected_components(&self) -> SetPartition {
        let mut dsu = Dsu::new(self.n);
        for &(u, v) in &self.edges {
            dsu.union(u - 1, v - 1);
        }
        SetPartition::from_labels(&dsu.labels())
    }

    pub fn num_components(&self) -> usize {
        self.connected_components().num_blocks()
    }

    /// Component count of the subgraph induced on `subset`.
    pub fn num_components_within(&self, subset: &[usize]) -> usize {
        let mut dsu = Dsu::new(subset.len());
        for (i, &u) in subset.iter().enumerate() {
            for (j, &v) in subset.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    dsu.union(i, j);
                }
            }
        }
        SetPartition::from_labels(&dsu.labels()).num_blocks()
    }

    /// Quotient along a surjection `f: {1..n} -> {1..m}` given as a slice
    /// with `f[v-1]` the image of `v`: images are joined whenever any edge
    /// joins their fibers.
    pub fn quotient(&self, f: &[usize], m: usize) -> Result<SimpleGraph, GraphError> {
        if f.len() != self.n || m == 0 {
            return Err(GraphError::BadQuotientMap);
        }
        let mut hit = alloc::vec![false; m];
        for &w in f {
            if w == 0 || w > m {
                return Err(GraphError::BadQuotientMap);
            }
            hit[w - 1] = true;
        }
        if !hit.iter().all(|&h| h) {
            return Err(GraphError::BadQuotientMap);
        }
        let mut g = SimpleGraph::new(m)?;
        for &(u, v) in &self.edges {
            let (fu, fv) = (f[u - 1], f[v - 1]);
            if fu != fv {
                g.add_edge(fu, fv)?;
            }
        }
        Ok(g)
    }

    /// Strong quotient of a graph on a doubled vertex set: vertices `w` and
    /// `w'` of the base copy are joined when both `(w, w')` and the barred
    /// pair `(w+m, w'+m)` are edges.
    pub fn strong_quotient(&self) -> Result<SimpleGraph, GraphError> {
        if self.n % 2 != 0 {
            return Err(GraphError::NotDoubled(self.n));
        }
        let m = self.n / 2;
        let mut g = SimpleGraph::new(m)?;
        for u in 1..=m {
            for v in u + 1..=m {
                if self.has_edge(u, v) && self.has_edge(u + m, v + m) {
                    g.add_edge(u, v)?;
                }
            }
        }
        Ok(g)
    }

    /// The canonical doubling map `{1..2m} -> {1..m}` that forgets bars.
    pub fn forget_bars_map(&self) -> Result<(Vec<usize>, usize), GraphError> {
        if self.n % 2 != 0 {
            return Err(GraphError::NotDoubled(self.n));
        }
        let m = self.n / 2;
        Ok(((0..self.n).map(|k| k % m + 1).collect(), m))
    }
}

/// The two collision graphs of paired index lists on vertex set
/// `{1..r}`: in the first, `j` and `h` are joined when the pairs
/// `(i_j, s_j)` and `(i_h, s_h)` are equal; in the second, when the pairs
/// share any symbol.
pub fn collision_graphs(
    i: &[usize],
    s: &[usize],
) -> Result<(SimpleGraph, SimpleGraph), GraphError> {
    if i.len() != s.len() {
        return Err(GraphError::LengthMismatch);
    }
    let r = i.len();
    if r == 0 {
        return Err(GraphError::Empty);
    }
    let mut g1 = SimpleGraph::new(r)?;
    let mut g2 = SimpleGraph::new(r)?;
    for j in 0..r {
        for h in j + 1..r {
            if i[j] == i[h] && s[j] == s[h] {
                g1.add_edge(j + 1, h + 1)?;
            }
            if i[j] == i[h] || i[j] == s[h] || s[j] == i[h] || s[j] == s[h] {
                g2.add_edge(j + 1, h + 1)?;
            }
        }
    }
    Ok((g1, g2))
}

/// The doubled symbol graph of paired lists: vertex set `{1..r} + {1..r}`,
/// with `j ~ h` when `i_j = i_h`, `j ~ barred h` when `i_j = s_h`, and
/// `barred j ~ barred h` when `s_j = s_h`. Its strong and plain quotients
/// are exactly the two collision graphs.
pub fn symbol_graph(i: &[usize], s: &[usize]) -> Result<SimpleGraph, GraphError> {
    if i.len() != s.len() {
        return Err(GraphError::LengthMismatch);
    }
    let r = i.len();
    if r == 0 {
        return Err(GraphError::Empty);
    }
    let mut g = SimpleGraph::new(2 * r)?;
    for j in 0..r {
        for h in 0..r {
            if j != h && i[j] == i[h] {
                g.add_edge(j + 1, h + 1)?;
            }
            if i[j] == s[h] {
                g.add_edge(j + 1, h + 1 + r)?;
            }
            if j != h && s[j] == s[h] {
                g.add_edge(j + 1 + r, h + 1 + r)?;
            }
        }
    }
    Ok(g)
}

/// Witness counts for the quotient component inequality
/// `#Conn(G) <= #Conn(G/f) + sum over fibers of (#Conn(G[fiber]) - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientBoundReport {
    pub components: usize,
    pub quotient_components: usize,
    pub fiber_excess: usize,
    pub holds: bool,
}

pub fn check_quotient_bound(
    g: &SimpleGraph,
    f: &[usize],
    m: usize,
) -> Result<QuotientBoundReport, GraphError> {
    let q = g.quotient(f, m)?;
    let components = g.num_components();
    let quotient_components = q.num_components();
    let mut fiber_excess = 0;
    for w in 1..=m {
        let fiber: Vec<usize> = (1..=g.num_vertices()).filter(|&v| f[v - 1] == w).collect();
        fiber_excess += g.num_components_within(&fiber) - 1;
    }
    Ok(QuotientBoundReport {
        components,
        quotient_components,
        fiber_excess,
        holds: components <= quotient_components + fiber_excess,
    })
}

/// Witness counts for the doubled-fiber inequality
/// `#Conn(G) <= #Conn(G/f) + #Conn(G//f)` on a doubled vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubledBoundReport {
    pub components: usize,
    pub quotient_components: usize,
    pub strong_quotient_components: usize,
    pub holds: bool,
}

pub fn check_doubled_bound(g: &SimpleGraph) -> Result<DoubledBoundReport, GraphError> {
    let (f, m) = g.forget_bars_map()?;
    let quotient_components = g.quotient(&f, m)?.num_components();
    let strong_quotient_components = g.strong_quotient()?.num_components();
    let components = g.num_components();
    Ok(DoubledBoundReport {
        components,
        quotient_components,
        strong_quotient_components,
        holds: components <= quotient_components + strong_quotient_components,
    })
}
