//! Graph and weighted-graph states, the GF(2) test for whether a
//! measurement on `A` can leave a maximal n-tangle on `B`, and the
//! rank formula for the concentratable entanglement of graph states.

mod f2;
mod weighted;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum_core::{check_capacity, StateVector, SubsystemMask, C64};

pub use f2::{f2_rank, f2_solve, F2Matrix, F2Vector};
pub use weighted::{
    ghz_extraction_probability, line_protocol, rotated_x_basis, rotated_x_operator, weighted_trace_distance,
    LineProtocol, WeightedGraph,
};

/// Largest vertex count a [`Graph`] can hold.
pub const MAX_VERTICES: usize = 64;

/// Simple undirected graph; `adj[u]` has bit `v` set iff `u ~ v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::InvalidArgument(format!("graphs are limited to {MAX_VERTICES} vertices")));
        }
        Ok(Self { n, adj: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Self::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_edges(n, &edges)
    }

    /// Graph whose edge set is given by the bits of `code` over the pairs
    /// (0,1), (0,2), …, (n−2, n−1) in lexicographic order.
    pub fn from_edge_code(n: usize, code: u64) -> Result<Self> {
        let mut g = Self::empty(n)?;
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if code >> k & 1 == 1 {
                    g.add_edge(u, v)?;
                }
                k += 1;
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::IndexOutOfRange { index: w, total: self.n });
            }
        }
        if u == v {
            return Err(Error::InvalidArgument(format!("self-loop on vertex {u}")));
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn neighbors(&self, u: usize) -> u64 {
        self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|u| (u + 1..self.n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v))).collect()
    }

    /// Number of edges with both ends in the vertex set `support` (bit v = vertex v).
    pub fn edges_within(&self, support: u64) -> u32 {
        let mut twice = 0;
        let mut rest = support;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            twice += (self.adj[u] & support).count_ones();
        }
        twice / 2
    }

    /// Edge count inside the support of every basis index, in index order.
    pub(crate) fn support_edge_counts(&self) -> Result<Vec<u32>> {
        check_capacity(self.n)?;
        let n = self.n;
        Ok((0..1usize << n).map(|z| self.edges_within(index_to_vertices(z, n))).collect())
    }

    /// Γ restricted to rows `rows` and columns `cols` (vertex lists).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> F2Matrix {
        F2Matrix::from_fn(rows.len(), cols.len(), |r, c| self.has_edge(rows[r], cols[c]))
    }
}

/// Basis index (qubit 0 = most significant bit) to vertex bitmask (bit v = vertex v).
#[inline]
pub(crate) fn index_to_vertices(z: usize, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        (z as u64).reverse_bits() >> (64 - n)
    }
}

fn check_mask(g: &Graph, m: &SubsystemMask) -> Result<()> {
    if m.total_qubits() != g.n {
        return Err(Error::Dimension { expected: g.n, got: m.total_qubits() });
    }
    Ok(())
}

fn vertex_bits(m: &SubsystemMask) -> u64 {
    m.members().iter().fold(0, |acc, &v| acc | 1 << v)
}

/// |G⟩ = Π_{(u,v)∈E} CZ_{uv} |+⟩^⊗n.
pub fn build_graph_state(g: &Graph) -> Result<StateVector> {
    let counts = g.support_edge_counts()?;
    let amp = (0.5f64).powf(g.n as f64 / 2.0);
    let amps = counts.iter().map(|&k| C64::new(if k % 2 == 0 { amp } else { -amp }, 0.0)).collect();
    Ok(StateVector::from_parts(g.n, amps))
}

/// D_b = 1 iff b ∈ B has even degree in the graph with `A` removed.
pub fn degree_vector(g: &Graph, a: &SubsystemMask) -> Result<F2Vector> {
    check_mask(g, a)?;
    let b = a.complement();
    if b.is_empty() {
        return Err(Error::InvalidMask("kept subsystem is empty".into()));
    }
    let b_bits = vertex_bits(&b);
    let bits: Vec<bool> = b.members().iter().map(|&v| (g.adj[v] & b_bits).count_ones() % 2 == 0).collect();
    Ok(F2Vector::from_bits(&bits))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TauClass {
    /// Every measurement on `A` leaves states with vanishing n-tangle.
    TauZeroOnly,
    /// Some measurement leaves every branch with n-tangle 1.
    TauOneAchievable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauCriterion {
    pub class: TauClass,
    /// Solution of Γ_BA x = D when one exists, indexed like `A`.
    pub solution: Option<F2Vector>,
    /// Set when the neighbor-free even-degree shortcut decided the answer.
    pub fast_path: Option<TauClass>,
    pub degree_vector: F2Vector,
}

fn check_even_b(g: &Graph, a: &SubsystemMask) -> Result<SubsystemMask> {
    check_mask(g, a)?;
    let b = a.complement();
    if b.is_empty() || b.len() % 2 == 1 {
        return Err(Error::InvalidArgument(format!("kept subsystem has {} vertices; it must be even and nonempty", b.len())));
    }
    Ok(b)
}

/// Solves Γ_BA x = D over GF(2).
pub fn tau_criterion(g: &Graph, a: &SubsystemMask) -> Result<TauCriterion> {
    let b = check_even_b(g, a)?;
    let d = degree_vector(g, a)?;
    let gamma = g.submatrix(b.members(), a.members());
    let solution = f2_solve(&gamma, &d)?;
    let class = if solution.is_some() { TauClass::TauOneAchievable } else { TauClass::TauZeroOnly };
    Ok(TauCriterion { class, solution, fast_path: neighbor_free_fast_path(g, a)?, degree_vector: d })
}

pub fn tau_classify(g: &Graph, a: &SubsystemMask) -> Result<TauClass> {
    Ok(tau_criterion(g, a)?.class)
}

/// Shortcut: a kept vertex with no neighbor in `A` and even degree inside
/// `B` forces the zero class. Returns `None` when inconclusive.
pub fn neighbor_free_fast_path(g: &Graph, a: &SubsystemMask) -> Result<Option<TauClass>> {
    let b = check_even_b(g, a)?;
    let a_bits = vertex_bits(a);
    let b_bits = vertex_bits(&b);
    let hit = b.members().iter().any(|&v| g.adj[v] & a_bits == 0 && (g.adj[v] & b_bits).count_ones() % 2 == 0);
    Ok(hit.then_some(TauClass::TauZeroOnly))
}

/// C(|G⟩; s) = 1 − 2^{−|s|} Σ_{γ⊆s} 2^{−rk Γ_{γ,γ̄}}.
pub fn graph_ce(g: &Graph, s: &SubsystemMask) -> Result<f64> {
    check_mask(g, s)?;
    if s.is_empty() {
        return Err(Error::InvalidMask("label set must be nonempty".into()));
    }
    if s.len() > crate::measures::MAX_CE_LABELS {
        return Err(Error::InvalidMask("label set too large".into()));
    }
    let members = s.members();
    let mut total = 0.0;
    for sub in 0..1usize << members.len() {
        let gamma: Vec<usize> = (0..members.len()).filter(|k| sub >> k & 1 == 1).map(|k| members[k]).collect();
        let rest: Vec<usize> = (0..g.n).filter(|v| !gamma.contains(v)).collect();
        let rank = f2_rank(&g.submatrix(&gamma, &rest));
        total += 0.5f64.powi(rank as i32);
    }
    Ok(1.0 - total / (1u64 << members.len()) as f64)
}

/// Wheel graph: a 5-cycle on vertices 0..=4 plus vertex 5 joined to all of
/// them. Its graph state is absolutely maximally entangled (see
/// [`is_ame`]).
pub fn ame6_graph() -> Graph {
    let mut edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    edges.extend((0..5).map(|i| (i, 5)));
    Graph::from_edges(6, &edges).expect("valid wheel")
}

/// True when every ⌊n/2⌋-qubit marginal of `psi` is maximally mixed.
pub fn is_ame(psi: &StateVector, tol: f64) -> bool {
    let n = psi.n_qubits();
    let k = n / 2;
    let target = 0.5f64.powi(k as i32);
    (0usize..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .all(|m| (crate::quantum_core::subsystem_purity(psi.amplitudes(), n, m) - target).abs() < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::concentratable_entanglement;

    fn mask(n: usize, m: &[usize]) -> SubsystemMask {
        SubsystemMask::new(n, m.iter().copied()).unwrap()
    }

    #[test]
    fn single_edge_state() {
        let psi = build_graph_state(&Graph::path(2).unwrap()).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in psi.amplitudes().iter().zip(want) {
            assert_eq!(*a, C64::new(w, 0.0));
        }
    }

    #[test]
    fn empty_graph_is_plus_state() {
        let psi = build_graph_state(&Graph::empty(3).unwrap()).unwrap();
        assert_eq!(psi, StateVector::plus(3).unwrap());
    }

    #[test]
    fn triangle_signs() {
        let psi = build_graph_state(&Graph::complete(3).unwrap()).unwrap();
        let amp = 1.0 / 8f64.sqrt();
        for z in 0..8usize {
            let (z1, z2, z3) = (z >> 2 & 1, z >> 1 & 1, z & 1);
            let sign = if (z1 * z2 + z2 * z3 + z1 * z3) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((psi.amplitudes()[z].re - sign * amp).abs() < 1e-15);
        }
    }

    #[test]
    fn degree_vectors() {
        let p7 = Graph::path(7).unwrap();
        let d = degree_vector(&p7, &mask(7, &[1, 3, 5])).unwrap();
        assert!(d.to_bits().iter().all(|&b| b));
        let c4 = Graph::cycle(4).unwrap();
        assert!(degree_vector(&c4, &SubsystemMask::empty(4)).unwrap().to_bits().iter().all(|&b| b));
        // B induces a path b0 - b1 - b2 once vertex 3 is removed
        let p4 = Graph::path(4).unwrap();
        assert_eq!(degree_vector(&p4, &mask(4, &[3])).unwrap().to_bits(), vec![false, true, false]);
    }

    #[test]
    fn classification_examples() {
        let p7 = Graph::path(7).unwrap();
        let c = tau_criterion(&p7, &mask(7, &[1, 3, 5])).unwrap();
        assert_eq!(c.class, TauClass::TauOneAchievable);
        assert_eq!(c.solution.unwrap().to_bits(), vec![true, false, true]);
        assert_eq!(c.fast_path, None);

        // square 0-1-2-3 with pendant 4 on vertex 0, pendant measured
        let sq = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)]).unwrap();
        let a = mask(5, &[4]);
        assert_eq!(tau_classify(&sq, &a).unwrap(), TauClass::TauZeroOnly);
        assert_eq!(neighbor_free_fast_path(&sq, &a).unwrap(), Some(TauClass::TauZeroOnly));

        let iso = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(tau_classify(&iso, &mask(4, &[0, 1])).unwrap(), TauClass::TauZeroOnly);

        let k5 = Graph::complete(5).unwrap();
        assert_eq!(neighbor_free_fast_path(&k5, &mask(5, &[0])).unwrap(), None);
        assert!(tau_classify(&p7, &mask(7, &[0, 1])).is_err());
    }

    #[test]
    fn graph_ce_examples() {
        let edge = Graph::path(2).unwrap();
        assert!((graph_ce(&edge, &mask(2, &[0, 1])).unwrap() - 0.25).abs() < 1e-15);
        let p9 = Graph::path(9).unwrap();
        assert!((graph_ce(&p9, &mask(9, &[3, 4, 5])).unwrap() - 0.5625).abs() < 1e-15);
        let ame = ame6_graph();
        assert!((graph_ce(&ame, &mask(6, &[0, 1, 2])).unwrap() - 0.578125).abs() < 1e-15);
    }

    #[test]
    fn graph_ce_matches_statevector() {
        for code in [0b1011_0110_1101u64, 0b0111_1000_0011, 0b1111_1111_1111] {
            let g = Graph::from_edge_code(6, code).unwrap();
            let psi = build_graph_state(&g).unwrap();
            for s in [vec![0], vec![1, 4], vec![0, 2, 5], vec![0, 1, 2, 3, 4, 5]] {
                let s = mask(6, &s);
                let a = graph_ce(&g, &s).unwrap();
                let b = concentratable_entanglement(&psi, &s).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wheel_is_ame() {
        assert!(is_ame(&build_graph_state(&ame6_graph()).unwrap(), 1e-12));
        assert!(!is_ame(&build_graph_state(&Graph::path(6).unwrap()).unwrap(), 1e-12));
    }

    #[test]
    fn edge_code_enumerates_pairs() {
        let g = Graph::from_edge_code(4, 0b100001).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (2, 3)]);
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
    }
}
