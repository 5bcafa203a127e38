use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};
use crate::localization::{average_entanglement, measure_local, Ensemble, LocalBasisParams};
use crate::measures::MeasureKind;
use crate::quantum_core::{check_capacity, StateVector, SubsystemMask, C64};

/// Graph with a uniform controlled-phase angle on every edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub graph: Graph,
    pub phase: f64,
}

impl WeightedGraph {
    pub fn new(graph: Graph, phase: f64) -> Self {
        Self { graph, phase: phase.rem_euclid(2.0 * PI) }
    }

    /// Amplitude at basis index z: 2^{−n/2} e^{iφ e(z)}, where e(z) counts
    /// the edges inside the support of z.
    pub fn state(&self) -> Result<StateVector> {
        let n = self.graph.n();
        let counts = self.graph.support_edge_counts()?;
        let amp = 0.5f64.powf(n as f64 / 2.0);
        let amps = counts.iter().map(|&k| amp * unit_power(self.phase, k)).collect();
        Ok(StateVector::from_parts(n, amps))
    }
}

/// e^{iφk}, exact at φ ∈ {0, π} so the ordinary graph state is reproduced
/// without stray imaginary parts.
fn unit_power(phi: f64, k: u32) -> C64 {
    if phi == 0.0 {
        C64::new(1.0, 0.0)
    } else if phi == PI {
        C64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    } else {
        C64::from_polar(1.0, (phi * k as f64).rem_euclid(2.0 * PI))
    }
}

/// Local basis whose outcome 0/1 are the ±1 eigenvectors of
/// M_x(φ) = cos φ σ_x + sin φ σ_y.
pub fn rotated_x_basis(phi: f64) -> (f64, f64) {
    (PI / 2.0, phi.rem_euclid(2.0 * PI))
}

/// M_x(φ) as a 2×2 matrix `[row][col]`.
pub fn rotated_x_operator(phi: f64) -> [[C64; 2]; 2] {
    let z = C64::new(0.0, 0.0);
    [[z, C64::from_polar(1.0, -phi)], [C64::from_polar(1.0, phi), z]]
}

/// Probability 2^{−N}|sin(φ/2)|^N of extracting an exact GHZ state from a
/// weighted line on 2N + 1 vertices.
pub fn ghz_extraction_probability(n_pairs: usize, phi: f64) -> Result<f64> {
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("need at least one measured vertex".into()));
    }
    let n = n_pairs as i32;
    Ok(0.5f64.powi(n) * (phi / 2.0).sin().abs().powi(n))
}

/// ‖G_φ − G_χ‖₁ = 2√(1 − |⟨G_φ|G_χ⟩|²) for uniformly weighted graph states.
///
/// The overlap only depends on the histogram w_k of edge counts, and
/// 1 − |Σ w_k e^{iδk}|² = Σ_{k,l} w_k w_l · 2 sin²(δ(k−l)/2) avoids the
/// cancellation of the direct form when φ ≈ χ.
pub fn weighted_trace_distance(g: &Graph, phi: f64, chi: f64) -> Result<f64> {
    check_capacity(g.n())?;
    let mut hist: BTreeMap<u32, f64> = BTreeMap::new();
    for k in g.support_edge_counts()? {
        *hist.entry(k).or_default() += 1.0;
    }
    let d = (1u64 << g.n()) as f64;
    let w: Vec<(f64, f64)> = hist.into_iter().map(|(k, c)| (k as f64, c / d)).collect();
    let delta = phi - chi;
    let mut deficit = 0.0;
    for &(k, wk) in &w {
        for &(l, wl) in &w {
            let s = (delta * (k - l) / 2.0).sin();
            deficit += wk * wl * 2.0 * s * s;
        }
    }
    Ok(2.0 * deficit.clamp(0.0, 1.0).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineProtocol {
    pub measured: SubsystemMask,
    pub ensemble: Ensemble,
    /// Average n-tangle on the kept vertices; `None` for an odd count.
    pub avg_tau: Option<f64>,
}

/// Measures vertices 1, 3, …, 2N−1 (0-indexed) of a φ-weighted line on
/// 2N + 1 vertices in the eigenbasis of M_x(φ).
pub fn line_protocol(n_pairs: usize, phi: f64) -> Result<LineProtocol> {
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("need at least one measured vertex".into()));
    }
    let n = 2 * n_pairs + 1;
    check_capacity(n)?;
    let psi = WeightedGraph::new(Graph::path(n)?, phi).state()?;
    let measured = SubsystemMask::new(n, (0..n_pairs).map(|k| 2 * k + 1))?;
    let (t, p) = rotated_x_basis(phi);
    let ensemble = measure_local(&psi, &measured, &LocalBasisParams::uniform(n_pairs, t, p))?;
    let kept = n_pairs + 1;
    let avg_tau = if kept % 2 == 0 { Some(average_entanglement(&ensemble, &MeasureKind::NTangle)?) } else { None };
    Ok(LineProtocol { measured, ensemble, avg_tau })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_states::build_graph_state;
    use crate::localization::qubit_basis;
    use crate::quantum_core::pure_trace_distance;

    #[test]
    fn phase_limits() {
        let g = Graph::from_edge_code(5, 0b10_1101_0110).unwrap();
        assert_eq!(WeightedGraph::new(g.clone(), PI).state().unwrap(), build_graph_state(&g).unwrap());
        assert_eq!(WeightedGraph::new(g, 0.0).state().unwrap(), StateVector::plus(5).unwrap());
    }

    #[test]
    fn single_edge_quarter_phase() {
        let psi = WeightedGraph::new(Graph::path(2).unwrap(), PI / 2.0).state().unwrap();
        let want = [C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.5)];
        for (a, w) in psi.amplitudes().iter().zip(want) {
            assert!((a - w).norm() < 1e-15);
        }
    }

    #[test]
    fn rotated_x_eigenvectors() {
        for phi in [0.0, 0.3, PI / 2.0, PI, 4.0, 2.0 * PI - 0.1] {
            let (t, p) = rotated_x_basis(phi);
            let b = qubit_basis(t, p);
            let m = rotated_x_operator(phi);
            for (sign, v) in [(1.0, b[0]), (-1.0, b[1])] {
                for r in 0..2 {
                    let mv = m[r][0] * v[0] + m[r][1] * v[1];
                    assert!((mv - v[r] * sign).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ghz_probability_values() {
        assert!((ghz_extraction_probability(1, PI).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(ghz_extraction_probability(4, 0.0).unwrap(), 0.0);
        assert!((ghz_extraction_probability(2, PI / 2.0).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_formula() {
        let edge = Graph::path(2).unwrap();
        assert_eq!(weighted_trace_distance(&edge, 1.1, 1.1).unwrap(), 0.0);
        assert!((weighted_trace_distance(&edge, PI, 0.0).unwrap() - 3f64.sqrt()).abs() < 1e-14);
        let g = Graph::from_edge_code(6, 0b101_1010_0111_0110).unwrap();
        let (phi, chi) = (2.1, 0.4);
        let a = WeightedGraph::new(g.clone(), phi).state().unwrap();
        let b = WeightedGraph::new(g.clone(), chi).state().unwrap();
        let direct = pure_trace_distance(&a, &b).unwrap();
        assert!((weighted_trace_distance(&g, phi, chi).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn protocol_limits() {
        let r = line_protocol(3, PI).unwrap();
        assert!((r.avg_tau.unwrap() - 1.0).abs() < 1e-12);
        assert!(line_protocol(3, 0.0).unwrap().avg_tau.unwrap().abs() < 1e-12);
        assert_eq!(r.measured.members(), &[1, 3, 5]);
        assert!(line_protocol(2, PI).unwrap().avg_tau.is_none());
    }
}
