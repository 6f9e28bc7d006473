use super::WitnessCodec;
use crate::bitcodes::{binomial, fixed_decode, fixed_encode_into, fixed_width, subset_rank, subset_unrank, BitString};
use crate::error::{Error, Result};

/// Largest graph the exhaustive clique finder accepts.
pub const MAX_FINDER_VERTICES: usize = 24;

/// Simple undirected graph on vertices `0..n`, adjacency rows as bitsets.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    rows: Vec<Vec<u64>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { n, rows: vec![vec![0; n.div_ceil(64)]; n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set_edge(u, v, true);
            }
        }
        g
    }

    /// Builds a graph from its `C(n, 2)` upper-triangle bits in row-major order.
    pub fn from_upper_bits(n: usize, bits: &BitString) -> Result<Self> {
        if bits.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::arg("bits", format!("{} bits do not describe a graph on {n} vertices", bits.len())));
        }
        let mut g = Self::empty(n);
        let mut it = bits.iter();
        for u in 0..n {
            for v in u + 1..n {
                g.set_edge(u, v, it.next().unwrap());
            }
        }
        Ok(g)
    }

    pub fn upper_bits(&self) -> BitString {
        let mut b = BitString::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for u in 0..self.n {
            for v in u + 1..self.n {
                b.push(self.has_edge(u, v));
            }
        }
        b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u][v / 64] >> (v % 64) & 1 == 1
    }

    pub fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        debug_assert_ne!(u, v);
        for (a, b) in [(u, v), (v, u)] {
            if present {
                self.rows[a][b / 64] |= 1 << (b % 64);
            } else {
                self.rows[a][b / 64] &= !(1 << (b % 64));
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().flatten().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::complete(self.n);
        for u in 0..self.n {
            for (w, &own) in g.rows[u].iter_mut().zip(&self.rows[u]) {
                *w &= !own;
            }
        }
        g
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }

    pub fn has_triangle(&self) -> bool {
        (0..self.n).any(|u| {
            (u + 1..self.n)
                .filter(|&v| self.has_edge(u, v))
                .any(|v| self.rows[u].iter().zip(&self.rows[v]).any(|(a, b)| a & b != 0))
        })
    }

    pub fn triangle_count(&self) -> u64 {
        let mut count = 0;
        for u in 0..self.n {
            for v in (u + 1..self.n).filter(|&v| self.has_edge(u, v)) {
                count += (v + 1..self.n).filter(|&w| self.has_edge(u, w) && self.has_edge(v, w)).count() as u64;
            }
        }
        count
    }

    fn small_rows(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r[0] as u32).collect()
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, {})", self.n, self.upper_bits())
    }
}

/// Extends `chosen` to a clique of size `t` inside `cand`, trying vertices in
/// increasing order, so the first clique found is lexicographically least.
fn extend_clique(adj: &[u32], cand: u32, chosen: &mut Vec<usize>, t: usize) -> bool {
    if chosen.len() == t {
        return true;
    }
    let mut rest = cand;
    while chosen.len() + rest.count_ones() as usize >= t && rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        chosen.push(v);
        if extend_clique(adj, rest & adj[v], chosen, t) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Lexicographically least clique of size `t`, else the least independent
/// set; the flag is `true` for a clique. Exhaustive, so `n ≤ 24`.
pub fn find_clique_or_independent_set(g: &Graph, t: usize) -> Result<Option<(Vec<usize>, bool)>> {
    if g.n > MAX_FINDER_VERTICES {
        return Err(Error::range(g.n, format!("<= {MAX_FINDER_VERTICES} vertices for exhaustive search")));
    }
    let all = (1u32 << g.n) - 1;
    for (graph, flag) in [(g.clone(), true), (g.complement(), false)] {
        let mut chosen = Vec::with_capacity(t);
        if extend_clique(&graph.small_rows(), all, &mut chosen, t) {
            return Ok(Some((chosen, flag)));
        }
    }
    Ok(None)
}

/// How the vertex set `S` is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VertexEncoding {
    /// `t` indices of `⌈log n⌉` bits each.
    #[default]
    Indices,
    /// One colex rank in `⌈log C(n, t)⌉` bits.
    SubsetRank,
}

/// A graph with a clique or independent set `S` of size `t`: one flag bit,
/// the vertices of `S`, then the adjacency bits not fixed by `S`, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliqueCodec {
    n: usize,
    t: usize,
    vertices: VertexEncoding,
}

impl CliqueCodec {
    pub fn new(n: usize, t: usize, vertices: VertexEncoding) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("n", "must be positive"));
        }
        if t > n {
            return Err(Error::range(t, format!("<= n = {n}")));
        }
        if vertices == VertexEncoding::SubsetRank {
            binomial(n as u64, t as u64)?;
        }
        Ok(CliqueCodec { n, t, vertices })
    }

    fn vertex_bits(&self) -> usize {
        match self.vertices {
            VertexEncoding::Indices => self.t * fixed_width(self.n as u128).unwrap() as usize,
            VertexEncoding::SubsetRank => {
                fixed_width(binomial(self.n as u64, self.t as u64).unwrap()).unwrap() as usize
            }
        }
    }

    /// `1 + t⌈log n⌉ + C(n, 2) − C(t, 2)` in the default vertex encoding.
    pub fn codeword_len(&self) -> usize {
        let pairs = |k: usize| k * k.saturating_sub(1) / 2;
        1 + self.vertex_bits() + pairs(self.n) - pairs(self.t)
    }

    /// Encodes `g` around a caller-supplied set, which must be a clique
    /// (`is_clique`) or an independent set of size `t`.
    pub fn encode_with(&self, g: &Graph, set: &[usize], is_clique: bool) -> Result<BitString> {
        if g.n != self.n {
            return Err(Error::arg("g", format!("has {} vertices, expected {}", g.n, self.n)));
        }
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != self.t || s.last().is_some_and(|&v| v >= self.n) {
            return Err(Error::arg("set", format!("must be {} distinct vertices below {}", self.t, self.n)));
        }
        let holds = if is_clique { g.is_clique(&s) } else { g.is_independent(&s) };
        if !holds {
            let kind = if is_clique { "clique" } else { "independent set" };
            return Err(Error::NoWitness(format!("{s:?} is not a {kind}")));
        }
        let mut c = BitString::with_capacity(self.codeword_len());
        c.push(is_clique);
        match self.vertices {
            VertexEncoding::Indices => {
                for &v in &s {
                    fixed_encode_into(&mut c, v as u128, self.n as u128)?;
                }
            }
            VertexEncoding::SubsetRank => {
                let set: Vec<u64> = s.iter().map(|&v| v as u64).collect();
                let total = binomial(self.n as u64, self.t as u64)?;
                fixed_encode_into(&mut c, subset_rank(self.n as u64, &set)?, total)?;
            }
        }
        let mut in_s = vec![false; self.n];
        for &v in &s {
            in_s[v] = true;
        }
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !(in_s[u] && in_s[v]) {
                    c.push(g.has_edge(u, v));
                }
            }
        }
        Ok(c)
    }
}

impl WitnessCodec for CliqueCodec {
    type Input = Graph;

    /// Uses the exhaustive finder to pick `S`.
    fn encode(&self, g: &Graph) -> Result<BitString> {
        let (set, flag) = find_clique_or_independent_set(g, self.t)?
            .ok_or_else(|| Error::NoWitness(format!("no clique or independent set of size {}", self.t)))?;
        self.encode_with(g, &set, flag)
    }

    fn decode(&self, c: &BitString) -> Result<Graph> {
        if c.len() != self.codeword_len() {
            return Err(Error::Malformed(format!("{} bits, expected {}", c.len(), self.codeword_len())));
        }
        let mut r = c.reader();
        let flag = r.read_bit()?;
        let set: Vec<usize> = match self.vertices {
            VertexEncoding::Indices => {
                let s = (0..self.t)
                    .map(|_| fixed_decode(&mut r, self.n as u128).map(|v| v as usize))
                    .collect::<Result<Vec<_>>>()?;
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Malformed("vertex list is not strictly increasing".into()));
                }
                s
            }
            VertexEncoding::SubsetRank => {
                let total = binomial(self.n as u64, self.t as u64)?;
                let rank = fixed_decode(&mut r, total)?;
                subset_unrank(self.n as u64, self.t as u64, rank)?.into_iter().map(|v| v as usize).collect()
            }
        };
        let mut in_s = vec![false; self.n];
        for &v in &set {
            in_s[v] = true;
        }
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                let edge = if in_s[u] && in_s[v] { flag } else { r.read_bit()? };
                g.set_edge(u, v, edge);
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witnesses::domain::graphs as all_graphs;
    use crate::witnesses::roundtrip;

    #[test]
    fn complete_and_empty_k4() {
        let codec = CliqueCodec::new(4, 4, VertexEncoding::Indices).unwrap();
        assert_eq!(codec.codeword_len(), 9);
        let k4 = Graph::complete(4);
        let c = codec.encode(&k4).unwrap();
        assert_eq!(c.to_string(), "100011011");
        assert_eq!(codec.decode(&c).unwrap(), k4);
        let e4 = Graph::empty(4);
        let c = codec.encode(&e4).unwrap();
        assert_eq!(c.len(), 9);
        assert!(!c.get(0).unwrap());
        assert_eq!(codec.decode(&c).unwrap(), e4);
    }

    #[test]
    fn exhaustive_n5_t3() {
        for mode in [VertexEncoding::Indices, VertexEncoding::SubsetRank] {
            let codec = CliqueCodec::new(5, 3, mode).unwrap();
            let report = roundtrip(&codec, all_graphs(5));
            assert_eq!(report.failures, 0);
            // R(3,3) = 6: every graph on 5 vertices but C5 and its complement
            // (12 labelled copies in all) has a triangle or an independent triple.
            assert_eq!(report.domain, 1024 - 12);
            assert_eq!(report.distinct, report.domain);
        }
    }

    #[test]
    fn codeword_length_matches_formula() {
        let codec = CliqueCodec::new(6, 3, VertexEncoding::Indices).unwrap();
        assert_eq!(codec.codeword_len(), 1 + 3 * 3 + 15 - 3);
        let ranked = CliqueCodec::new(6, 3, VertexEncoding::SubsetRank).unwrap();
        assert_eq!(ranked.codeword_len(), 1 + 5 + 15 - 3);
        for g in all_graphs(6).step_by(97) {
            for codec in [codec, ranked] {
                if let Ok(c) = codec.encode(&g) {
                    assert_eq!(c.len(), codec.codeword_len());
                }
            }
        }
    }

    #[test]
    fn finder_agrees_with_brute_force() {
        for g in all_graphs(5).step_by(7) {
            let found = find_clique_or_independent_set(&g, 3).unwrap();
            let brute = (0..5)
                .flat_map(|a| (a + 1..5).flat_map(move |b| (b + 1..5).map(move |c| vec![a, b, c])))
                .find(|s| g.is_clique(s))
                .map(|s| (s, true))
                .or_else(|| {
                    (0..5)
                        .flat_map(|a| (a + 1..5).flat_map(move |b| (b + 1..5).map(move |c| vec![a, b, c])))
                        .find(|s| g.is_independent(s))
                        .map(|s| (s, false))
                });
            assert_eq!(found, brute);
        }
        assert!(find_clique_or_independent_set(&Graph::empty(25), 3).is_err());
    }

    #[test]
    fn triangles() {
        assert!(Graph::complete(3).has_triangle());
        assert!(!Graph::empty(3).has_triangle());
        assert_eq!(Graph::complete(5).triangle_count(), 10);
        let mut g = Graph::empty(130);
        g.set_edge(0, 70, true);
        g.set_edge(70, 129, true);
        assert!(!g.has_triangle());
        g.set_edge(0, 129, true);
        assert!(g.has_triangle());
        assert_eq!(g.edge_count(), 3);
    }
}
