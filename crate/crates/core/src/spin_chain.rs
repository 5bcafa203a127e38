//! Transverse-field Ising chains: dense Hamiltonians, ground states and
//! sweeps of localizable entanglement along the coupling axis.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::bounds_for;
use crate::localization::lme_estimate;
use crate::quantum_core::linalg::real_symmetric_eig;
use crate::quantum_core::{check_capacity, StateVector, SubsystemMask, C64};
use crate::swarm::PsoConfig;
use crate::MeasureKind;

/// Largest chain handled by the dense eigensolver.
pub const MAX_SITES: usize = 12;

/// Eigenvalues closer than this to the minimum count as ground states.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

/// H = −J Σ σˣᵢσˣᵢ₊₁ − h Σ σᶻᵢ − h_x Σ σˣᵢ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    pub n: usize,
    pub j: f64,
    pub h: f64,
    pub h_x: f64,
    pub periodic: bool,
}

impl TfimParams {
    pub fn new(n: usize, j: f64, h: f64) -> Self {
        Self { n, j, h, h_x: 0.0, periodic: true }
    }

    pub fn with_longitudinal(mut self, h_x: f64) -> Self {
        self.h_x = h_x;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument("chain needs at least two sites".into()));
        }
        if self.n > MAX_SITES {
            return Err(Error::Capacity { requested: self.n, limit: MAX_SITES });
        }
        check_capacity(self.n)?;
        if !(self.h >= 0.0) || !self.j.is_finite() || !self.h_x.is_finite() || !self.h.is_finite() {
            return Err(Error::InvalidArgument("need finite J, h_x and finite h >= 0".into()));
        }
        Ok(())
    }

    /// Nearest-neighbour bonds; a periodic chain includes (n−1, 0), so for
    /// n = 2 the single pair is counted twice.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let m = if self.periodic { self.n } else { self.n - 1 };
        (0..m).map(|i| (i, (i + 1) % self.n)).collect()
    }
}

/// Real symmetric Hamiltonian in the computational basis.
pub fn tfim_hamiltonian(p: &TfimParams) -> Result<DMatrix<f64>> {
    p.validate()?;
    let n = p.n;
    let d = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mut h = DMatrix::zeros(d, d);
    for x in 0..d {
        let up = (0..n).filter(|&q| x & bit(q) == 0).count() as f64;
        h[(x, x)] -= p.h * (2.0 * up - n as f64);
        for &(a, b) in &p.bonds() {
            h[(x ^ bit(a) ^ bit(b), x)] -= p.j;
        }
        if p.h_x != 0.0 {
            for q in 0..n {
                h[(x ^ bit(q), x)] -= p.h_x;
            }
        }
    }
    Ok(h)
}

/// Lowest eigenpair. In a degenerate ground space the returned state is
/// the normalized projection of (|+⟩^⊗n + |−⟩^⊗n)/√2 onto that space.
/// The overall sign makes the largest-magnitude amplitude positive.
pub fn ground_state(p: &TfimParams) -> Result<(f64, StateVector)> {
    let h = tfim_hamiltonian(p)?;
    let (vals, vecs) = real_symmetric_eig(&h)?;
    let d = vals.len();
    let e0 = vals[d - 1];
    let ground: Vec<usize> = (0..d).filter(|&k| vals[k] - e0 < DEGENERACY_TOLERANCE).collect();
    let mut v: Vec<f64> = if ground.len() == 1 {
        vecs.column(ground[0]).iter().copied().collect()
    } else {
        // |+⟩^n + |−⟩^n has amplitude 2·2^{−n/2} on even-weight indices
        let n = p.n;
        let amp = 2.0 * 0.5f64.powf(n as f64 / 2.0) / 2f64.sqrt();
        let target: Vec<f64> = (0..d).map(|x| if x.count_ones() % 2 == 0 { amp } else { 0.0 }).collect();
        let mut proj = vec![0.0; d];
        for &k in &ground {
            let col = vecs.column(k);
            let c: f64 = col.iter().zip(&target).map(|(a, b)| a * b).sum();
            proj.iter_mut().zip(col.iter()).for_each(|(p, a)| *p += c * a);
        }
        let norm = proj.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            proj.iter_mut().for_each(|a| *a /= norm);
            proj
        } else {
            vecs.column(ground[0]).iter().copied().collect()
        }
    };
    let (imax, _) = v.iter().enumerate().fold((0, 0.0), |(bi, bv), (i, a)| if a.abs() > bv + 1e-12 { (i, a.abs()) } else { (bi, bv) });
    if v[imax] < 0.0 {
        v.iter_mut().for_each(|a| *a = -*a);
    }
    let amps = v.into_iter().map(|a| C64::new(a, 0.0)).collect();
    Ok((e0, StateVector::normalized(p.n, amps)?))
}

/// One grid point of an Ising sweep. Columns that do not apply to the
/// requested measures are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingRow {
    pub j_over_h: f64,
    pub h_x: f64,
    pub energy: f64,
    pub lme_tau: Option<f64>,
    pub mea_tau: Option<f64>,
    pub lme_ce: Option<f64>,
    pub ce_ub: Option<f64>,
    pub ce_lb: Option<f64>,
}

/// Ground-state localizable entanglement over a parameter grid.
///
/// `kinds` may contain the n-tangle and the concentratable entanglement
/// (label sets on full-chain indices). Grid points are processed in
/// parallel; point `k` uses PSO seed `cfg.seed + k`.
pub fn ising_sweep(grid: &[TfimParams], a: &SubsystemMask, kinds: &[MeasureKind], cfg: &PsoConfig) -> Result<Vec<IsingRow>> {
    cfg.validate()?;
    for kind in kinds {
        if !matches!(kind, MeasureKind::NTangle | MeasureKind::ConcentratableEntanglement(_)) {
            return Err(Error::InvalidArgument(format!("ising sweep does not support measure {}", kind.name())));
        }
    }
    for p in grid {
        p.validate()?;
        if a.total_qubits() != p.n {
            return Err(Error::Dimension { expected: p.n, got: a.total_qubits() });
        }
    }
    grid.par_iter()
        .enumerate()
        .map(|(k, p)| {
            let (energy, psi) = ground_state(p)?;
            let pso = cfg.clone().with_seed(cfg.seed.wrapping_add(k as u64));
            let mut row = IsingRow {
                j_over_h: if p.h == 0.0 { f64::INFINITY } else { p.j / p.h },
                h_x: p.h_x,
                energy,
                lme_tau: None,
                mea_tau: None,
                lme_ce: None,
                ce_ub: None,
                ce_lb: None,
            };
            for kind in kinds {
                match kind {
                    MeasureKind::NTangle => {
                        row.lme_tau = Some(lme_estimate(&psi, a, kind, &pso)?.value);
                        row.mea_tau = Some(bounds_for(&psi, a, kind)?.0);
                    }
                    MeasureKind::ConcentratableEntanglement(_) => {
                        row.lme_ce = Some(lme_estimate(&psi, a, kind, &pso)?.value);
                        let (ub, lb) = bounds_for(&psi, a, kind)?;
                        row.ce_ub = Some(ub);
                        row.ce_lb = Some(lb);
                    }
                    _ => unreachable!("validated above"),
                }
            }
            Ok(row)
        })
        .collect()
}
