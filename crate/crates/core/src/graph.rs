//! Simple undirected graphs stored as one adjacency bit row per vertex.
//!
//! Rows are packed into `u64` words so that counting the edges induced by a
//! vertex set is a popcount over `row(v) & set`. Graphs are immutable once
//! built; use [`GraphBuilder`] to assemble one.

use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

/// A subset of `0..n` as a packed bitmask.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        Self { n, words: vec![0; words_for(n)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    /// Builds a set from vertex indices; panics on an index `>= n`.
    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Universe size `n`.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} outside universe of size {}", self.n);
        self.words[v / WORD] |= 1 << (v % WORD);
    }

    pub fn remove(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} outside universe of size {}", self.n);
        self.words[v / WORD] &= !(1 << (v % WORD));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / WORD] >> (v % WORD) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(other.words.iter().chain(std::iter::repeat(&0))).all(|(a, b)| a & !b == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * WORD + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Immutable simple graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
    m: usize,
}

/// Mutable staging area for a [`Graph`].
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        let stride = words_for(n);
        Self { n, stride, rows: vec![0; n * stride] }
    }

    /// Adds the undirected edge `{u, v}`; duplicates are idempotent.
    /// Panics on self-loops and out-of-range endpoints.
    pub fn add_edge(&mut self, u: usize, v: usize) -> &mut Self {
        assert!(u < self.n && v < self.n, "edge ({u}, {v}) out of range for n = {}", self.n);
        assert_ne!(u, v, "self-loop on vertex {u}");
        self.rows[u * self.stride + v / WORD] |= 1 << (v % WORD);
        self.rows[v * self.stride + u / WORD] |= 1 << (u % WORD);
        self
    }

    pub fn build(self) -> Graph {
        let twice: usize = self.rows.iter().map(|w| w.count_ones() as usize).sum();
        Graph { n: self.n, stride: self.stride, rows: self.rows, m: twice / 2 }
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        GraphBuilder::new(n).build()
    }

    pub fn complete(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in u + 1..n {
                b.add_edge(u, v);
            }
        }
        b.build()
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            b.add_edge(u, (u + 1) % n);
        }
        b.build()
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.add_edge(u, v);
        }
        b.build()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub(crate) fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.stride..(v + 1) * self.stride]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.row(u)[v / WORD] >> (v % WORD) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of neighbours of `v` inside `s`.
    #[inline]
    pub fn degree_into(&self, v: usize, s: &VertexSet) -> usize {
        self.row(v).iter().zip(s.words()).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(v);
        (0..self.n).filter(move |&u| row[u / WORD] >> (u % WORD) & 1 == 1)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Number of edges with both endpoints in `s`.
    pub fn edge_count_induced(&self, s: &VertexSet) -> usize {
        debug_assert_eq!(s.universe(), self.n);
        let twice: usize = s.iter().map(|v| self.degree_into(v, s)).sum();
        twice / 2
    }

    /// `G[S]`, relabelled `0..|S|` in ascending original order.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Graph {
        let verts = s.to_vec();
        let mut b = GraphBuilder::new(verts.len());
        for (a, &u) in verts.iter().enumerate() {
            for (c, &v) in verts.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    b.add_edge(a, c);
                }
            }
        }
        b.build()
    }

    /// True when every edge of `self` is an edge of `other` (same `n`).
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    /// Parses DIMACS ascii (`c` comments, one `p edge n m`, `e i j` with
    /// 1-based endpoints). Duplicate and reversed edges collapse.
    pub fn read_dimacs<R: BufRead>(reader: R) -> Result<Graph, GraphError> {
        let mut builder: Option<GraphBuilder> = None;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line?;
            let mut tok = line.split_whitespace();
            match tok.next() {
                None | Some("c") => {}
                Some("p") => {
                    if builder.is_some() {
                        return Err(parse_err(lineno, "duplicate problem line"));
                    }
                    if tok.next() != Some("edge") {
                        return Err(parse_err(lineno, "expected `p edge <n> <m>`"));
                    }
                    let n: usize = tok
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_err(lineno, "missing or invalid vertex count"))?;
                    tok.next()
                        .and_then(|t| t.parse::<usize>().ok())
                        .ok_or_else(|| parse_err(lineno, "missing or invalid edge count"))?;
                    builder = Some(GraphBuilder::new(n));
                }
                Some("e") => {
                    let mut ends = [0usize; 2];
                    for e in &mut ends {
                        *e = tok
                            .next()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| parse_err(lineno, "expected `e <i> <j>`"))?;
                    }
                    let [i, j] = ends;
                    if i == j {
                        return Err(parse_err(lineno, format!("self-loop on vertex {i}")));
                    }
                    let b = match builder.as_mut() {
                        Some(b) => b,
                        None if i >= 1 && j >= 1 => return Err(parse_err(lineno, "edge line before `p edge` header")),
                        None => return Err(parse_err(lineno, "endpoint out of range")),
                    };
                    if i == 0 || j == 0 || i > b.n || j > b.n {
                        return Err(parse_err(lineno, format!("endpoint out of range 1..={} in `e {i} {j}`", b.n)));
                    }
                    b.add_edge(i - 1, j - 1);
                }
                Some(other) => {
                    return Err(parse_err(lineno, format!("unknown line type `{other}`")));
                }
            }
        }
        builder.map(GraphBuilder::build).ok_or_else(|| parse_err(0, "missing `p edge` header"))
    }

    pub fn write_dimacs(&self) -> String {
        let mut out = format!("p edge {} {}\n", self.n, self.m);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        out
    }
}
