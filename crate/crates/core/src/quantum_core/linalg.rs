//! Dense factorizations and distance measures on complex matrices.
//!
//! Eigen- and singular values are always returned sorted in descending
//! order together with matching column vectors.

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use super::{DensityOperator, StateVector, C64};
use crate::error::{Error, Result};

/// Relative cut-off below which eigenvalues of a density operator are
/// treated as numerical noise when forming square roots.
const RANK_CUTOFF: f64 = 1e-12;

fn check_square(m: &DMatrix<C64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension { expected: m.nrows(), got: m.ncols() });
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix: `m = V diag(λ) V†`.
pub fn hermitian_eig(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    // symmetrize to kill rounding asymmetry before handing to the solver
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((vals, vecs))
}

/// Eigendecomposition of a real symmetric matrix, descending order.
pub fn real_symmetric_eig(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension { expected: n, got: m.ncols() });
    }
    let h = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((vals, vecs))
}

/// Thin singular value decomposition `m = U diag(s) V†`.
pub struct Svd {
    pub u: DMatrix<C64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<C64>,
}

pub fn svd(m: &DMatrix<C64>) -> Result<Svd> {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Ok(Svd {
            u: DMatrix::zeros(m.nrows(), 0),
            singular_values: Vec::new(),
            v: DMatrix::zeros(m.ncols(), 0),
        });
    }
    let dec = SVD::try_new(m.clone(), true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let u = dec.u.ok_or_else(|| Error::Numerical("SVD returned no U".into()))?;
    let v_t = dec.v_t.ok_or_else(|| Error::Numerical("SVD returned no V".into()))?;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    Ok(Svd {
        u: DMatrix::from_fn(m.nrows(), k, |r, c| u[(r, order[c])]),
        singular_values: order.iter().map(|&i| dec.singular_values[i]).collect(),
        v: DMatrix::from_fn(m.ncols(), k, |r, c| v_t[(order[c], r)].conj()),
    })
}

pub fn singular_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    if m.nrows().min(m.ncols()) == 0 {
        return Ok(Vec::new());
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

pub fn max_singular_value(m: &DMatrix<C64>) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Sum of singular values.
pub fn trace_norm(m: &DMatrix<C64>) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

/// ‖ρ − σ‖₁ without the conventional factor ½ (orthogonal pure states are
/// at distance 2).
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), got: b.dim() });
    }
    let (vals, _) = hermitian_eig(&(a.matrix() - b.matrix()))?;
    Ok(vals.iter().map(|v| v.abs()).sum())
}

/// ‖ψψ† − φφ†‖₁ for two pure states, computed from the 2×2 restriction of
/// the difference to span{ψ, φ}. Does not form 2^n × 2^n matrices.
pub fn pure_trace_distance(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    let overlap = psi.inner(phi)?;
    // orthonormal frame e0 = ψ, e1 ∝ φ − ⟨ψ|φ⟩ψ
    let perp: Vec<C64> =
        phi.amplitudes().iter().zip(psi.amplitudes()).map(|(p, s)| p - overlap * s).collect();
    let pn = perp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    // φ = overlap e0 + pn e1 (pn real); difference in the frame:
    // [[1 − |o|², −o pn], [−o* pn, −pn²]]
    let d = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0 - overlap.norm_sqr(), 0.0),
            -overlap * pn,
            -overlap.conj() * pn,
            C64::new(-pn * pn, 0.0),
        ],
    );
    let (vals, _) = hermitian_eig(&d)?;
    Ok(vals.iter().map(|v| v.abs()).sum())
}

/// Factor `ρ = L L†` with `L = V √Λ` restricted to eigenvalues above the
/// rank cut-off.
fn sqrt_factor(rho: &DensityOperator) -> Result<DMatrix<C64>> {
    let (vals, vecs) = hermitian_eig(rho.matrix())?;
    if let Some(&min) = vals.last() {
        if min < -super::density::PSD_TOLERANCE {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:.3e}")));
        }
    }
    let top = vals.first().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > RANK_CUTOFF * top.max(1.0)).collect();
    Ok(DMatrix::from_fn(rho.dim(), keep.len(), |r, c| vecs[(r, keep[c])] * vals[keep[c]].sqrt()))
}

/// Uhlmann fidelity F(ρ, σ) = Tr √(√ρ σ √ρ), evaluated as ‖√ρ √σ‖₁ so that
/// no square root of a noisy near-zero eigenvalue enters the sum.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension { expected: rho.dim(), got: sigma.dim() });
    }
    let l = sqrt_factor(rho)?;
    let k = sqrt_factor(sigma)?;
    if l.ncols() == 0 || k.ncols() == 0 {
        return Ok(0.0);
    }
    let f = trace_norm(&(l.adjoint() * k))?;
    Ok(f.clamp(0.0, 1.0))
}
