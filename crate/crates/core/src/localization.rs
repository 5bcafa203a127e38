//! Projective measurements on a subsystem `A`, the ensembles they leave on
//! `B`, localizable and assisted entanglement, and the bounds relating them.

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::measures::{concurrence_from_purity, evaluate_raw, MeasureKind};
use crate::quantum_core::density::sigma_y_phase;
use crate::quantum_core::linalg::{svd, trace_norm};
use crate::quantum_core::{subsystem_purity, takagi_factorization, StateVector, SubsystemMask, C64};
use crate::swarm::{maximize, BoxBounds, Dimension, PsoConfig};

/// Branches with probability below this carry the zero vector.
pub const ZERO_BRANCH: f64 = 1e-14;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// One (θ, φ) pair per measured qubit. Outcome 0 is
/// |v⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩, outcome 1 is its orthogonal partner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBasisParams {
    pub angles: Vec<(f64, f64)>,
}

impl LocalBasisParams {
    pub fn new(angles: Vec<(f64, f64)>) -> Self {
        Self { angles }
    }

    /// Computational basis on `n` qubits.
    pub fn computational(n: usize) -> Self {
        Self { angles: vec![(0.0, 0.0); n] }
    }

    /// Every qubit measured in the same basis.
    pub fn uniform(n: usize, theta: f64, phi: f64) -> Self {
        Self { angles: vec![(theta, phi); n] }
    }

    /// From `[θ0, φ0, θ1, φ1, …]`.
    pub fn from_flat(x: &[f64]) -> Self {
        Self { angles: x.chunks_exact(2).map(|c| (c[0], c[1])).collect() }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.angles.iter().flat_map(|&(t, p)| [t, p]).collect()
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Search box: θ ∈ [0, π] reflecting, φ ∈ [0, 2π) periodic.
    pub fn search_box(n: usize) -> BoxBounds {
        let dims = (0..n)
            .flat_map(|_| {
                [Dimension { lo: 0.0, hi: PI, periodic: false }, Dimension { lo: 0.0, hi: 2.0 * PI, periodic: true }]
            })
            .collect();
        BoxBounds::from_dimensions(dims).expect("nonempty box")
    }
}

/// The two basis vectors `[outcome][component]` for one qubit.
pub fn qubit_basis(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    [[C64::new(c, 0.0), e * s], [-e.conj() * s, C64::new(c, 0.0)]]
}

/// Orthonormal measurement basis on `A`; column `i` is outcome `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalBasis {
    columns: DMatrix<C64>,
}

impl GlobalBasis {
    pub fn new(columns: DMatrix<C64>) -> Result<Self> {
        let d = columns.nrows();
        if columns.ncols() != d {
            return Err(Error::Dimension { expected: d, got: columns.ncols() });
        }
        let res = (columns.adjoint() * &columns - DMatrix::identity(d, d)).camax();
        if res > 1e-9 {
            return Err(Error::NotUnitary(res));
        }
        Ok(Self { columns })
    }

    pub fn identity(dim: usize) -> Self {
        Self { columns: DMatrix::identity(dim, dim) }
    }

    /// Tensor product of single-qubit bases.
    pub fn from_local(params: &LocalBasisParams) -> Self {
        let mut m = DMatrix::from_element(1, 1, ONE);
        for &(t, p) in &params.angles {
            let b = qubit_basis(t, p);
            let q = DMatrix::from_fn(2, 2, |r, c| b[c][r]);
            m = m.kronecker(&q);
        }
        Self { columns: m }
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn columns(&self) -> &DMatrix<C64> {
        &self.columns
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub state: StateVector,
}

/// Outcomes of a measurement on `A`, in outcome order.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub branches: Vec<Branch>,
}

impl Ensemble {
    /// Builds branches from unnormalized rows (one per outcome).
    fn from_rows(rows: &DMatrix<C64>, n_b: usize) -> Self {
        let branches = (0..rows.nrows())
            .map(|i| {
                let amps: Vec<C64> = rows.row(i).iter().copied().collect();
                branch_from(amps, n_b)
            })
            .collect();
        Self { branches }
    }

    pub fn n_kept(&self) -> usize {
        self.branches.first().map_or(0, |b| b.state.n_qubits())
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Σ pᵢ |φᵢ⟩⟨φᵢ|, which equals the reduced state on `B`.
    pub fn average_state(&self) -> DMatrix<C64> {
        let d = 1 << self.n_kept();
        let mut acc = DMatrix::zeros(d, d);
        for b in &self.branches {
            let v = DMatrix::from_column_slice(d, 1, b.state.amplitudes());
            acc += (&v * v.adjoint()) * C64::new(b.probability, 0.0);
        }
        acc
    }
}

fn branch_from(mut amps: Vec<C64>, n_b: usize) -> Branch {
    let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if p < ZERO_BRANCH {
        return Branch { probability: 0.0, state: StateVector::zero(n_b) };
    }
    let s = p.sqrt();
    amps.iter_mut().for_each(|a| *a /= s);
    Branch { probability: p, state: StateVector::from_parts(n_b, amps) }
}

fn check_split(psi: &StateVector, a: &SubsystemMask) -> Result<SubsystemMask> {
    if a.total_qubits() != psi.n_qubits() {
        return Err(Error::Dimension { expected: psi.n_qubits(), got: a.total_qubits() });
    }
    if a.is_empty() || a.len() == psi.n_qubits() {
        return Err(Error::InvalidMask("measured subsystem must be a proper nonempty subset".into()));
    }
    Ok(a.complement())
}

/// Row-by-row rotation of the `A × B` coefficient matrix: afterwards row `i`
/// holds the unnormalized branch for local outcome `i`.
fn rotate_rows(m: &mut DMatrix<C64>, params: &LocalBasisParams) {
    let k = params.len();
    let d_b = m.ncols();
    for (pos, &(t, p)) in params.angles.iter().enumerate() {
        let b = qubit_basis(t, p);
        let w = [[b[0][0].conj(), b[0][1].conj()], [b[1][0].conj(), b[1][1].conj()]];
        let stride = 1usize << (k - 1 - pos);
        for r0 in (0..m.nrows()).filter(|r| r & stride == 0) {
            let r1 = r0 | stride;
            for c in 0..d_b {
                let (x0, x1) = (m[(r0, c)], m[(r1, c)]);
                m[(r0, c)] = w[0][0] * x0 + w[0][1] * x1;
                m[(r1, c)] = w[1][0] * x0 + w[1][1] * x1;
            }
        }
    }
}

/// Measures every qubit of `a` in its own basis.
pub fn measure_local(psi: &StateVector, a: &SubsystemMask, params: &LocalBasisParams) -> Result<Ensemble> {
    let b = check_split(psi, a)?;
    if params.len() != a.len() {
        return Err(Error::Dimension { expected: a.len(), got: params.len() });
    }
    let mut m = psi.bipartite_matrix(a)?;
    rotate_rows(&mut m, params);
    Ok(Ensemble::from_rows(&m, b.len()))
}

/// Measures `a` in an arbitrary orthonormal basis.
pub fn measure_global(psi: &StateVector, a: &SubsystemMask, basis: &GlobalBasis) -> Result<Ensemble> {
    let b = check_split(psi, a)?;
    if basis.dim() != a.dim() {
        return Err(Error::Dimension { expected: a.dim(), got: basis.dim() });
    }
    let m = psi.bipartite_matrix(a)?;
    Ok(Ensemble::from_rows(&(basis.columns.adjoint() * m), b.len()))
}

/// Σ pᵢ E(φᵢ); `kind` refers to qubit positions inside the kept subsystem.
pub fn average_entanglement(ens: &Ensemble, kind: &MeasureKind) -> Result<f64> {
    let n = ens.n_kept();
    kind.validate_for(n)?;
    Ok(ens
        .branches
        .iter()
        .map(|b| if b.probability == 0.0 { 0.0 } else { b.probability * evaluate_raw(kind, b.state.amplitudes(), n) })
        .sum())
}

/// F(Ψ_B, Ψ̃_B): the largest average n-tangle any measurement on `A` can
/// leave on an even-sized `B`.
///
/// With `M` the `B × A` coefficient matrix, Ψ_B = MM† and Ψ̃_B = NN† for
/// `N = Y M̄`, so the fidelity is ‖M†N‖₁.
pub fn mea_tau_exact(psi: &StateVector, a: &SubsystemMask) -> Result<f64> {
    let b = check_split(psi, a)?;
    if b.len() % 2 == 1 {
        return Err(Error::InvalidArgument(format!("kept subsystem has {} qubits; it must be even", b.len())));
    }
    let m = psi.bipartite_matrix(&b)?;
    let n = tilde_columns(&m, b.len());
    Ok(trace_norm(&(m.adjoint() * n))?.clamp(0.0, 1.0))
}

/// Applies the spin flip σ_y^⊗n ∘ conj to every column.
fn tilde_columns(m: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let all = m.nrows() - 1;
    DMatrix::from_fn(m.nrows(), m.ncols(), |x, c| sigma_y_phase(n, all ^ x) * m[(all ^ x, c)].conj())
}

/// A measurement basis on `A` whose average n-tangle on `B` equals
/// [`mea_tau_exact`].
///
/// From the Schmidt form Ψ = Σⱼ √λⱼ |aⱼ⟩|vⱼ⟩, the symmetric matrix
/// τᵢⱼ = √(λᵢλⱼ)⟨vᵢ|ṽⱼ⟩ is Takagi-factorized as VΣVᵀ; measuring
/// bᵢ = Σⱼ (V†)ᵢⱼ aⱼ leaves branches xᵢ with ⟨xᵢ|x̃ⱼ⟩ = σᵢδᵢⱼ.
pub fn optimal_global_basis(psi: &StateVector, a: &SubsystemMask) -> Result<GlobalBasis> {
    let b = check_split(psi, a)?;
    if b.len() % 2 == 1 {
        return Err(Error::InvalidArgument(format!("kept subsystem has {} qubits; it must be even", b.len())));
    }
    let d_a = a.dim();
    let m = psi.bipartite_matrix(&b)?;
    let dec = svd(&m)?;
    let top = dec.singular_values.first().copied().unwrap_or(0.0);
    let rank = dec.singular_values.iter().take_while(|&&s| s > 1e-12 * top.max(1.0)).count();
    let v = dec.u.columns(0, rank).into_owned();
    let sv = &dec.singular_values[..rank];
    let vt = tilde_columns(&v, b.len());
    let overlaps = v.adjoint() * vt;
    let tau = DMatrix::from_fn(rank, rank, |i, j| overlaps[(i, j)] * (sv[i] * sv[j]));
    // symmetric up to rounding
    let tau = (&tau + tau.transpose()) * C64::new(0.5, 0.0);
    let tk = takagi_factorization(&tau)?;
    let u = tk.u.adjoint();
    // a_j = conj(Z[:, j]); basis vectors b_i = Σ_j U_ij a_j
    let a_vecs = dec.v.columns(0, rank).map(|z| z.conj());
    let mut cols: Vec<Vec<C64>> = (0..rank)
        .map(|i| (0..d_a).map(|r| (0..rank).map(|j| u[(i, j)] * a_vecs[(r, j)]).sum()).collect())
        .collect();
    complete_basis(&mut cols, d_a)?;
    GlobalBasis::new(DMatrix::from_fn(d_a, d_a, |r, c| cols[c][r]))
}

fn complete_basis(cols: &mut Vec<Vec<C64>>, d: usize) -> Result<()> {
    let mut e = 0;
    while cols.len() < d {
        if e >= d {
            return Err(Error::Numerical("could not complete measurement basis".into()));
        }
        let mut v = vec![ZERO; d];
        v[e] = ONE;
        e += 1;
        for _ in 0..2 {
            for b in cols.iter() {
                let proj: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(b).for_each(|(y, x)| *y -= proj * x);
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
    }
    Ok(())
}

/// min over ∅ ≠ γ ⊊ B of √(2(1 − Tr Ψ_γ²)), using marginals of the full state.
pub fn gme_upper_bound(psi: &StateVector, a: &SubsystemMask) -> Result<f64> {
    let b = check_split(psi, a)?;
    if b.len() < 2 {
        return Err(Error::InvalidArgument("kept subsystem needs at least two qubits".into()));
    }
    let n = psi.n_qubits();
    let b_bits = b.bits();
    let mut best = f64::INFINITY;
    let mut gamma = (0usize.wrapping_sub(b_bits)) & b_bits;
    while gamma != b_bits {
        best = best.min(concurrence_from_purity(subsystem_purity(psi.amplitudes(), n, gamma)));
        gamma = (gamma.wrapping_sub(b_bits)) & b_bits;
    }
    Ok(best)
}

/// C(Ψ; s) for s ⊆ B, an upper bound on the assisted CE.
pub fn ce_upper_bound(psi: &StateVector, a: &SubsystemMask, s: &SubsystemMask) -> Result<f64> {
    let b = check_split(psi, a)?;
    if s.total_qubits() != psi.n_qubits() {
        return Err(Error::Dimension { expected: psi.n_qubits(), got: s.total_qubits() });
    }
    if s.is_empty() || !s.is_subset_of(&b) {
        return Err(Error::InvalidMask("label set must be a nonempty subset of the kept qubits".into()));
    }
    crate::measures::concentratable_entanglement(psi, s)
}

/// Connected two-point correlations Q_pq = ⟨σ_p σ_q⟩ − ⟨σ_p⟩⟨σ_q⟩ with p, q ∈ {x, y, z}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub i: usize,
    pub j: usize,
    pub q: [[f64; 3]; 3],
}

impl CorrelationMatrix {
    pub fn max_singular_value(&self) -> f64 {
        let m = Matrix3::from_fn(|r, c| self.q[r][c]);
        m.singular_values().max()
    }
}

fn apply_pauli(amps: &[C64], n: usize, qubit: usize, pauli: usize) -> Vec<C64> {
    let bit = 1usize << (n - 1 - qubit);
    (0..amps.len())
        .map(|x| {
            let src = amps[x ^ bit];
            let one = x & bit != 0;
            match pauli {
                0 => src,
                1 => {
                    // σ_y|0⟩ = i|1⟩, σ_y|1⟩ = −i|0⟩
                    if one {
                        C64::new(0.0, 1.0) * src
                    } else {
                        C64::new(0.0, -1.0) * src
                    }
                }
                _ => {
                    if one {
                        -amps[x]
                    } else {
                        amps[x]
                    }
                }
            }
        })
        .collect()
}

fn expectation(amps: &[C64], other: &[C64]) -> C64 {
    amps.iter().zip(other).map(|(a, b)| a.conj() * b).sum()
}

pub fn correlation_matrix(psi: &StateVector, i: usize, j: usize) -> Result<CorrelationMatrix> {
    let n = psi.n_qubits();
    for q in [i, j] {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, total: n });
        }
    }
    if i == j {
        return Err(Error::InvalidArgument("correlation needs two distinct qubits".into()));
    }
    let amps = psi.amplitudes();
    let pi: Vec<Vec<C64>> = (0..3).map(|p| apply_pauli(amps, n, i, p)).collect();
    let mean_i: Vec<f64> = pi.iter().map(|v| expectation(amps, v).re).collect();
    let mean_j: Vec<f64> = (0..3).map(|p| expectation(amps, &apply_pauli(amps, n, j, p)).re).collect();
    let mut q = [[0.0; 3]; 3];
    for (p, row) in q.iter_mut().enumerate() {
        for (r, cell) in row.iter_mut().enumerate() {
            let both = apply_pauli(&pi[p], n, j, r);
            let v = expectation(amps, &both);
            *cell = v.re - mean_i[p] * mean_j[r];
        }
    }
    Ok(CorrelationMatrix { i, j, q })
}

/// ½ σ_max(Q^{ij}) for every pair i < j in `s`.
pub fn pair_lower_bounds(psi: &StateVector, s: &SubsystemMask) -> Result<Vec<(usize, usize, f64)>> {
    let m = s.members();
    let mut out = Vec::new();
    for (k, &i) in m.iter().enumerate() {
        for &j in &m[k + 1..] {
            out.push((i, j, 0.5 * correlation_matrix(psi, i, j)?.max_singular_value()));
        }
    }
    Ok(out)
}

/// ½ max over pairs in `s` of σ_max(Q^{ij}): a lower bound on the
/// localizable square-root CE.
pub fn ce_lower_bound(psi: &StateVector, s: &SubsystemMask) -> Result<f64> {
    if s.total_qubits() != psi.n_qubits() {
        return Err(Error::Dimension { expected: psi.n_qubits(), got: s.total_qubits() });
    }
    if s.len() < 2 {
        return Err(Error::InvalidMask("lower bound needs at least two labels".into()));
    }
    Ok(pair_lower_bounds(psi, s)?.into_iter().map(|(_, _, v)| v).fold(0.0, f64::max).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LmeEstimate {
    pub value: f64,
    pub params: LocalBasisParams,
    pub restarts: usize,
    pub evaluations: usize,
}

/// Objective for local-measurement searches with the coefficient matrix
/// computed once.
pub struct LocalObjective {
    m: DMatrix<C64>,
    kind: MeasureKind,
    n_a: usize,
    n_b: usize,
}

impl LocalObjective {
    /// `kind` uses full-register labels, which must lie in `B`.
    pub fn new(psi: &StateVector, a: &SubsystemMask, kind: &MeasureKind) -> Result<Self> {
        let b = check_split(psi, a)?;
        let kind = kind.relative_to(&b)?;
        kind.validate_for(b.len())?;
        Ok(Self { m: psi.bipartite_matrix(a)?, kind, n_a: a.len(), n_b: b.len() })
    }

    pub fn value(&self, params: &LocalBasisParams) -> f64 {
        let mut m = self.m.clone();
        rotate_rows(&mut m, params);
        let mut total = 0.0;
        let mut row = vec![ZERO; m.ncols()];
        for i in 0..m.nrows() {
            for (c, r) in row.iter_mut().enumerate() {
                *r = m[(i, c)];
            }
            let p: f64 = row.iter().map(|a| a.norm_sqr()).sum();
            if p < ZERO_BRANCH {
                continue;
            }
            let s = p.sqrt();
            row.iter_mut().for_each(|a| *a /= s);
            total += p * evaluate_raw(&self.kind, &row, self.n_b);
        }
        total
    }
}

/// Heuristic lower estimate of the localizable entanglement by swarm search
/// over local bases on `A`. Label sets in `kind` use full-register indices.
pub fn lme_estimate(psi: &StateVector, a: &SubsystemMask, kind: &MeasureKind, cfg: &PsoConfig) -> Result<LmeEstimate> {
    let obj = LocalObjective::new(psi, a, kind)?;
    let bounds = LocalBasisParams::search_box(obj.n_a);
    let res = maximize(|x| obj.value(&LocalBasisParams::from_flat(x)), &bounds, cfg)?;
    Ok(LmeEstimate {
        value: res.best_value,
        params: LocalBasisParams::from_flat(&res.best_point),
        restarts: cfg.restarts,
        evaluations: res.evaluations,
    })
}

fn reject_sqrt_ce(kind: &MeasureKind) -> Result<()> {
    if matches!(kind, MeasureKind::SqrtConcentratableEntanglement(_)) {
        return Err(Error::InvalidArgument("no continuity bound is available for the square-root CE".into()));
    }
    Ok(())
}

fn check_distance(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("trace distance must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

/// Modulus of continuity of a measure on pure states in terms of ‖ψ − ψ′‖₁.
pub fn measure_continuity(kind: &MeasureKind, t: f64) -> Result<f64> {
    check_distance(t)?;
    reject_sqrt_ce(kind)?;
    Ok(match kind {
        MeasureKind::GmeConcurrence => 2f64.powf(0.75) * t.sqrt(),
        _ => SQRT_2 * t,
    })
}

/// Bound on |Ē_β(Ψ) − Ē_β(Ψ′)| for one fixed basis β: f(2t) + t.
pub fn fixed_basis_continuity(kind: &MeasureKind, t: f64) -> Result<f64> {
    Ok(measure_continuity(kind, 2.0 * t)? + t)
}

/// Bound on the change of localizable or assisted entanglement:
/// (2√2 + 1)t for τ and CE, 2^{5/4}√t + t for the GME concurrence.
pub fn continuity_rhs(kind: &MeasureKind, t: f64) -> Result<f64> {
    fixed_basis_continuity(kind, t)
}
