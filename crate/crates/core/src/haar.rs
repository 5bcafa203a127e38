//! Haar-random pure states, closed-form moments of their marginals,
//! concentration thresholds, and batch sweeps comparing localizable
//! entanglement with its bounds.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localization::{
    average_entanglement, ce_lower_bound, ce_upper_bound, gme_upper_bound, lme_estimate, mea_tau_exact,
    measure_global, measure_local, GlobalBasis, LocalBasisParams,
};
use crate::measures::MeasureKind;
use crate::quantum_core::{check_capacity, partial_trace, wootters_tilde, StateVector, SubsystemMask, C64};
use crate::swarm::PsoConfig;

/// Draws a Haar-random state by normalizing i.i.d. complex Gaussians.
pub fn sample_haar<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<StateVector> {
    check_capacity(n_qubits)?;
    loop {
        let amps: Vec<C64> = (0..1usize << n_qubits)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok(StateVector::from_parts(n_qubits, amps.into_iter().map(|a| a / norm).collect()));
        }
    }
}

/// Haar-random measurement basis: QR of a complex Gaussian matrix with
/// the phases of R's diagonal moved into Q.
pub fn sample_basis<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<GlobalBasis> {
    if dim == 0 {
        return Err(Error::InvalidArgument("basis dimension must be positive".into()));
    }
    let g = DMatrix::from_fn(dim, dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    GlobalBasis::new(q)
}

/// Random stream `index` of the generator seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The `index`-th state of the reproducible sequence for `seed`.
pub fn haar_state(n_qubits: usize, seed: u64, index: u64) -> Result<StateVector> {
    sample_haar(n_qubits, &mut sample_rng(seed, index))
}

fn check_dims(d_a: usize, d_b: usize) -> Result<()> {
    if d_a < 1 || d_b < 1 {
        return Err(Error::InvalidArgument("dimensions must be positive".into()));
    }
    Ok(())
}

/// E[Tr Ψ_B²] = (d_A + d_B)/(d_A d_B + 1).
pub fn expected_purity(d_a: usize, d_b: usize) -> Result<f64> {
    check_dims(d_a, d_b)?;
    let (a, b) = (d_a as f64, d_b as f64);
    Ok((a + b) / (a * b + 1.0))
}

/// E[Tr Ψ_B Ψ̃_B] = (d_A + (−1)^{N_B})/(d_A d_B + 1) for d_B = 2^{N_B}.
///
/// With Y = σ_y^⊗N_B one has Yᵀ = (−1)^{N_B} Y, which fixes the sign of the
/// swap-operator contribution. For even N_B this is (d_A + 1)/(d_A d_B + 1).
pub fn expected_tilde_overlap(d_a: usize, d_b: usize) -> Result<f64> {
    check_dims(d_a, d_b)?;
    if !d_b.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("d_B = {d_b} is not a power of two")));
    }
    let n_b = d_b.trailing_zeros();
    let sign = if n_b % 2 == 0 { 1.0 } else { -1.0 };
    let (a, b) = (d_a as f64, d_b as f64);
    Ok((a + sign) / (a * b + 1.0))
}

/// Haar average of the post-measurement CE for any fixed basis on `A`:
/// 1 − 3^{|s|}(2^{N_B−|s|} + 1)/(2^{|s|}(2^{N_B} + 1)).
pub fn expected_avg_ce(n_b: usize, s_size: usize) -> Result<f64> {
    if s_size < 1 || s_size > n_b {
        return Err(Error::InvalidArgument(format!("need 1 <= |s| <= N_B, got |s| = {s_size}, N_B = {n_b}")));
    }
    let s = s_size as i32;
    let num = 3f64.powi(s) * (2f64.powi(n_b as i32 - s) + 1.0);
    let den = 2f64.powi(s) * (2f64.powi(n_b as i32) + 1.0);
    Ok(1.0 - num / den)
}

/// E[τ] ≤ √(2/(d_B + 1)) for Haar-random states on `B`.
pub fn ntangle_mean_bound(d_b: usize) -> f64 {
    (2.0 / (d_b as f64 + 1.0)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationBounds {
    /// 1 − √(2 d_B / d_A) − ε: assisted n-tangle falls below this with
    /// probability at most `tau_tail`.
    pub tau_threshold: f64,
    /// 2 exp(−2 d_A d_B ε² / (9π³(4√2 + 2)²)).
    pub tau_tail: f64,
    /// Expected fixed-basis CE with s = B, minus ε.
    pub ce_threshold: f64,
}

pub fn concentration_bounds(n_a: usize, n_b: usize, epsilon: f64) -> Result<ConcentrationBounds> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if n_b == 0 {
        return Err(Error::InvalidArgument("kept subsystem must be nonempty".into()));
    }
    let d_a = (1u64 << n_a) as f64;
    let d_b = (1u64 << n_b) as f64;
    let tau_threshold = 1.0 - (2.0 * d_b / d_a).sqrt() - epsilon;
    let k = 9.0 * std::f64::consts::PI.powi(3) * (4.0 * std::f64::consts::SQRT_2 + 2.0).powi(2);
    let tau_tail = (2.0 * (-2.0 * d_a * d_b * epsilon * epsilon / k).exp()).min(1.0);
    let ce_threshold = expected_avg_ce(n_b, n_b)? - epsilon;
    Ok(ConcentrationBounds { tau_threshold, tau_tail, ce_threshold })
}

/// How the `lme` column of a sweep is produced.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepMeasurement {
    /// Swarm search over local bases.
    LocalPso(PsoConfig),
    /// Computational basis on every measured qubit.
    Computational,
    /// A fixed basis on `A`.
    Global(GlobalBasis),
}

#[derive(Clone, Debug, PartialEq)]
pub struct HaarSweepConfig {
    pub n_a: usize,
    pub n_b: usize,
    pub samples: usize,
    pub seed: u64,
    /// Label sets refer to full-register indices; the first `n_a` qubits are measured.
    pub measure: MeasureKind,
    pub measurement: SweepMeasurement,
    /// Fill the `seconds` column with wall-clock time; off by default so
    /// repeated runs produce identical output.
    pub record_timing: bool,
}

impl HaarSweepConfig {
    pub fn measured(&self) -> Result<SubsystemMask> {
        SubsystemMask::new(self.n_a + self.n_b, 0..self.n_a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        if self.n_a < 1 || self.n_b < 1 {
            return Err(Error::InvalidArgument("both subsystems must be nonempty".into()));
        }
        check_capacity(self.n_a + self.n_b)?;
        self.measure.relative_to(&self.measured()?.complement())?.validate_for(self.n_b)?;
        match &self.measurement {
            SweepMeasurement::LocalPso(cfg) => cfg.validate(),
            SweepMeasurement::Global(b) if b.dim() != 1 << self.n_a => {
                Err(Error::Dimension { expected: 1 << self.n_a, got: b.dim() })
            }
            _ => Ok(()),
        }
    }
}

/// One sample of a sweep. For the n-tangle `mea_or_ub` is the exact
/// assisted value; for other measures it repeats the upper bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sample_index: usize,
    pub lme: f64,
    pub mea_or_ub: f64,
    pub ub: f64,
    pub lb: f64,
    pub seconds: f64,
}

/// Upper and lower bounds on the localizable value of `kind` for `psi`.
///
/// * n-tangle: ub = F(Ψ_B, Ψ̃_B) (needs even |B|, otherwise 0), lb = 0.
/// * GME concurrence: ub = min-marginal bound, lb = 0.
/// * CE: ub = C(Ψ; s), lb = (½ max σ_max Q)² since √L ≥ L^√CE.
/// * √CE: ub = √C(Ψ; s), lb = ½ max σ_max Q.
///
/// The correlation bound needs |s| ≥ 2; for a single label it is 0.
pub fn bounds_for(psi: &StateVector, a: &SubsystemMask, kind: &MeasureKind) -> Result<(f64, f64)> {
    match kind {
        MeasureKind::NTangle => {
            let b_len = psi.n_qubits() - a.len();
            let ub = if b_len % 2 == 0 { mea_tau_exact(psi, a)? } else { 0.0 };
            Ok((ub, 0.0))
        }
        MeasureKind::GmeConcurrence => Ok((gme_upper_bound(psi, a)?, 0.0)),
        MeasureKind::ConcentratableEntanglement(s) => {
            let ub = ce_upper_bound(psi, a, s)?;
            let lb = if s.len() >= 2 { ce_lower_bound(psi, s)?.powi(2) } else { 0.0 };
            Ok((ub, lb))
        }
        MeasureKind::SqrtConcentratableEntanglement(s) => {
            let ub = ce_upper_bound(psi, a, s)?.sqrt();
            let lb = if s.len() >= 2 { ce_lower_bound(psi, s)? } else { 0.0 };
            Ok((ub, lb))
        }
    }
}

/// Evaluates one state of a sweep.
pub fn sweep_row(psi: &StateVector, cfg: &HaarSweepConfig, index: usize) -> Result<SweepRow> {
    let start = Instant::now();
    let a = cfg.measured()?;
    let b = a.complement();
    let lme = match &cfg.measurement {
        SweepMeasurement::LocalPso(pso) => {
            let pso = pso.clone().with_seed(pso.seed ^ index as u64);
            lme_estimate(psi, &a, &cfg.measure, &pso)?.value
        }
        SweepMeasurement::Computational => {
            let ens = measure_local(psi, &a, &LocalBasisParams::computational(a.len()))?;
            average_entanglement(&ens, &cfg.measure.relative_to(&b)?)?
        }
        SweepMeasurement::Global(basis) => {
            let ens = measure_global(psi, &a, basis)?;
            average_entanglement(&ens, &cfg.measure.relative_to(&b)?)?
        }
    };
    let (ub, lb) = bounds_for(psi, &a, &cfg.measure)?;
    let seconds = if cfg.record_timing { start.elapsed().as_secs_f64() } else { 0.0 };
    Ok(SweepRow { sample_index: index, lme, mea_or_ub: ub, ub, lb, seconds })
}

/// Runs a sweep over `cfg.samples` Haar states, in parallel, returning rows
/// in sample order.
pub fn haar_sweep(cfg: &HaarSweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let n = cfg.n_a + cfg.n_b;
    (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let psi = haar_state(n, cfg.seed, i as u64)?;
            sweep_row(&psi, cfg, i)
        })
        .collect()
}

/// Monte Carlo mean of one marginal statistic next to its closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub name: String,
    pub mean: f64,
    pub standard_error: f64,
    pub expected: f64,
}

impl MomentEstimate {
    /// Deviation from the closed form in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.expected).abs() / self.standard_error
    }
}

/// Tr Ψ_B², Tr Ψ_B Ψ̃_B and the computational-basis average CE for every
/// label-set size, over `samples` Haar states on the first `n_a` measured
/// and last `n_b` kept qubits.
pub fn monte_carlo_moments(n_a: usize, n_b: usize, samples: usize, seed: u64) -> Result<Vec<MomentEstimate>> {
    if n_a == 0 || n_b == 0 || samples < 2 {
        return Err(Error::InvalidArgument("need n_a, n_b >= 1 and at least two samples".into()));
    }
    let n = n_a + n_b;
    check_capacity(n)?;
    let a = SubsystemMask::new(n, 0..n_a)?;
    let b = a.complement();
    let kinds: Vec<MeasureKind> = (1..=n_b)
        .map(|k| SubsystemMask::new(n_b, 0..k).map(MeasureKind::ConcentratableEntanglement))
        .collect::<Result<_>>()?;
    let per_sample: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let psi = haar_state(n, seed, i as u64)?;
            let rho = partial_trace(&psi, &b)?;
            let mut row = vec![rho.purity(), (rho.matrix() * wootters_tilde(&rho).matrix()).trace().re];
            let ens = measure_local(&psi, &a, &LocalBasisParams::computational(n_a))?;
            for kind in &kinds {
                row.push(average_entanglement(&ens, kind)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let (d_a, d_b) = (1usize << n_a, 1usize << n_b);
    let mut expected = vec![expected_purity(d_a, d_b)?, expected_tilde_overlap(d_a, d_b)?];
    let mut names = vec!["purity".to_string(), "tilde_overlap".to_string()];
    for k in 1..=n_b {
        expected.push(expected_avg_ce(n_b, k)?);
        names.push(format!("avg_ce_s{k}"));
    }
    Ok(names
        .into_iter()
        .zip(expected)
        .enumerate()
        .map(|(col, (name, expected))| {
            let xs: Vec<f64> = per_sample.iter().map(|r| r[col]).collect();
            let (mean, standard_error) = mean_and_se(&xs);
            MomentEstimate { name, mean, standard_error, expected }
        })
        .collect())
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
