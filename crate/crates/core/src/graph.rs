//! Symmetric adjacency bit-matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::{self, BitSet};
use crate::error::{invalid, Error};
use crate::pair::Pair;

/// Simple undirected graph on `[0, n)` stored as one bitset row per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjMatrix {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    degree: Vec<u32>,
    edges: usize,
}

impl AdjMatrix {
    pub fn new(n: usize) -> Self {
        let words = bitset::words_for(n);
        AdjMatrix {
            n,
            words,
            rows: vec![0; n * words],
            degree: vec![0; n],
            edges: 0,
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Pair>) -> Result<Self, Error> {
        let mut g = AdjMatrix::new(n);
        for e in edges {
            if e.v as usize >= n {
                return Err(invalid("edge endpoint out of range"));
            }
            g.add_edge(e);
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Words per adjacency row.
    #[inline]
    pub fn words_len(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        bitset::test_bit(self.row(a as usize), b as usize)
    }

    /// Inserts `e`; returns false if it was already present.
    pub fn add_edge(&mut self, e: Pair) -> bool {
        if self.has_edge(e.u, e.v) {
            return false;
        }
        let (u, v) = (e.u as usize, e.v as usize);
        self.rows[u * self.words + (v >> 6)] |= 1 << (v & 63);
        self.rows[v * self.words + (u >> 6)] |= 1 << (u & 63);
        self.degree[u] += 1;
        self.degree[v] += 1;
        self.edges += 1;
        true
    }

    pub fn remove_edge(&mut self, e: Pair) -> bool {
        if !self.has_edge(e.u, e.v) {
            return false;
        }
        let (u, v) = (e.u as usize, e.v as usize);
        self.rows[u * self.words + (v >> 6)] &= !(1 << (v & 63));
        self.rows[v * self.words + (u >> 6)] &= !(1 << (u & 63));
        self.degree[u] -= 1;
        self.degree[v] -= 1;
        self.edges -= 1;
        true
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn min_degree(&self) -> usize {
        self.degree.iter().copied().min().unwrap_or(0) as usize
    }

    pub fn neighbors(&self, v: usize) -> bitset::Ones<'_> {
        bitset::ones(self.row(v))
    }

    #[inline]
    pub fn codegree(&self, a: usize, b: usize) -> usize {
        bitset::count_and(self.row(a), self.row(b))
    }

    pub fn common_neighbors(&self, a: usize, b: usize) -> BitSet {
        let mut s = BitSet::new(self.n);
        s.union_with(self.row(a));
        s.intersect_with(self.row(b));
        s
    }

    /// `|Γ(v) ∩ set|`.
    #[inline]
    pub fn degree_into(&self, v: usize, set: &BitSet) -> usize {
        set.count_and(self.row(v))
    }

    /// All edges in ascending `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = Pair> + '_ {
        (0..self.n).flat_map(move |u| {
            bitset::ones(self.row(u))
                .filter(move |&v| v > u)
                .map(move |v| Pair::new(u as u32, v as u32))
        })
    }

    /// Returns some 4-clique if one exists. Every K4 contains an edge `uv`
    /// whose common neighbourhood holds another edge, so it suffices to scan
    /// the common neighbourhood of each edge.
    pub fn find_k4(&self) -> Option<[u32; 4]> {
        let mut common = BitSet::new(self.n);
        for u in 0..self.n {
            for v in bitset::ones(self.row(u)).filter(|&v| v > u) {
                common.clear();
                common.union_with(self.row(u));
                common.intersect_with(self.row(v));
                for w in common.iter() {
                    if let Some(x) =
                        bitset::ones(self.row(w)).find(|&x| x > w && common.contains(x))
                    {
                        return Some([u as u32, v as u32, w as u32, x as u32]);
                    }
                }
            }
        }
        None
    }

    /// Does `G` contain a K4 that uses the edge `e`? Used to certify each
    /// newly inserted edge, which by induction certifies every state.
    pub fn k4_through(&self, e: Pair) -> Option<[u32; 4]> {
        let common = self.common_neighbors(e.u as usize, e.v as usize);
        for w in common.iter() {
            if let Some(x) = bitset::ones(self.row(w)).find(|&x| x > w && common.contains(x)) {
                return Some([e.u, e.v, w as u32, x as u32]);
            }
        }
        None
    }
}
