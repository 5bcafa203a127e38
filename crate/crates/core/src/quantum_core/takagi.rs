use nalgebra::DMatrix;

use super::linalg::real_symmetric_eig;
use super::C64;
use crate::error::{Error, Result};

/// Maximum allowed |m − mᵀ| entry for a Takagi input.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// `m = U diag(σ) Uᵀ` with `U` unitary and `σ` nonnegative, descending.
#[derive(Clone, Debug)]
pub struct Takagi {
    pub u: DMatrix<C64>,
    pub sigma: Vec<f64>,
}

impl Takagi {
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let n = self.sigma.len();
        let s = DMatrix::from_fn(n, n, |r, c| if r == c { C64::new(self.sigma[r], 0.0) } else { C64::new(0.0, 0.0) });
        &self.u * s * self.u.transpose()
    }
}

/// Takagi factorization of a complex symmetric matrix.
///
/// Writing `m = X + iY`, the real symmetric matrix `[[X, Y], [Y, −X]]` has
/// eigenvalues ±σₖ. An eigenvector `(u, v)` for `+σ` gives a vector
/// `w = u + iv` with `m w̄ = σ w`. Real eigenvectors of a `+σ` eigenspace
/// are complex-orthonormal, which handles degenerate σ without extra
/// rotation. The null space is completed separately since `(u, v)` and
/// `(−v, u)` both lie in the zero eigenspace.
pub fn takagi_factorization(m: &DMatrix<C64>) -> Result<Takagi> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension { expected: n, got: m.ncols() });
    }
    let asym = (m - m.transpose()).camax();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric(asym));
    }
    if n == 0 {
        return Ok(Takagi { u: DMatrix::zeros(0, 0), sigma: Vec::new() });
    }
    let sym = (m + m.transpose()) * C64::new(0.5, 0.0);
    let big = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let (ri, ci) = (r % n, c % n);
        let z = sym[(ri, ci)];
        match (r < n, c < n) {
            (true, true) => z.re,
            (true, false) | (false, true) => z.im,
            (false, false) => -z.re,
        }
    });
    let (vals, vecs) = real_symmetric_eig(&big)?;
    let scale = vals.first().copied().unwrap_or(0.0).abs().max(1.0);
    let cutoff = 1e-12 * scale;

    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &val) in vals.iter().enumerate().take(n) {
        if val <= cutoff {
            break;
        }
        let w: Vec<C64> = (0..n).map(|i| C64::new(vecs[(i, k)], vecs[(i + n, k)])).collect();
        // (u, v) has unit real norm, so w has unit complex norm
        columns.push(w);
        sigma.push(val);
    }
    // Re-orthonormalize the nonzero part: near-degenerate ±σ pairs can leak
    // into one another at the 1e-9 level when σ is small.
    gram_schmidt(&mut columns)?;
    // Complete with an orthonormal basis of the complement (σ = 0).
    let mut e = 0;
    while columns.len() < n {
        let mut cand = vec![C64::new(0.0, 0.0); n];
        cand[e] = C64::new(1.0, 0.0);
        e += 1;
        if let Some(v) = orthogonalize(&columns, cand) {
            columns.push(v);
            sigma.push(0.0);
        }
        if e > n && columns.len() < n {
            return Err(Error::Numerical("failed to complete Takagi basis".into()));
        }
    }
    let u = DMatrix::from_fn(n, n, |r, c| columns[c][r]);
    Ok(Takagi { u, sigma })
}

fn orthogonalize(basis: &[Vec<C64>], mut v: Vec<C64>) -> Option<Vec<C64>> {
    for _ in 0..2 {
        for b in basis {
            let proj: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            v.iter_mut().zip(b).for_each(|(y, x)| *y -= proj * x);
        }
    }
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-8 {
        return None;
    }
    v.iter_mut().for_each(|a| *a /= norm);
    Some(v)
}

fn gram_schmidt(cols: &mut Vec<Vec<C64>>) -> Result<()> {
    let mut done: Vec<Vec<C64>> = Vec::with_capacity(cols.len());
    for c in cols.drain(..) {
        let v = orthogonalize(&done, c)
            .ok_or_else(|| Error::Numerical("degenerate Takagi vectors".into()))?;
        done.push(v);
    }
    *cols = done;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn unitarity(u: &DMatrix<C64>) -> f64 {
        (u.adjoint() * u - DMatrix::identity(u.nrows(), u.ncols())).camax()
    }

    #[test]
    fn diagonal_input() {
        let m = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let t = takagi_factorization(&m).unwrap();
        assert!((t.sigma[0] - 3.0).abs() < 1e-14 && (t.sigma[1] - 2.0).abs() < 1e-14);
        // U is a permutation up to column phases
        for r in 0..2 {
            let row: f64 = (0..2).map(|cc| t.u[(r, cc)].norm()).fold(0.0, f64::max);
            assert!((row - 1.0).abs() < 1e-12);
        }
        assert!((t.reconstruct() - m).camax() < 1e-12);
    }

    #[test]
    fn swap_matrix_is_degenerate() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let t = takagi_factorization(&m).unwrap();
        assert!((t.sigma[0] - 1.0).abs() < 1e-12 && (t.sigma[1] - 1.0).abs() < 1e-12);
        assert!(unitarity(&t.u) < 1e-12);
        assert!((t.reconstruct() - m).camax() < 1e-12);
    }

    #[test]
    fn rank_deficient_and_zero() {
        let v = [c(0.6, 0.1), c(-0.2, 0.3), c(0.5, -0.4)];
        let m = DMatrix::from_fn(3, 3, |r, cc| v[r] * v[cc]);
        let t = takagi_factorization(&m).unwrap();
        assert!(t.sigma[1].abs() < 1e-12 && t.sigma[2].abs() < 1e-12);
        assert!(unitarity(&t.u) < 1e-12);
        assert!((t.reconstruct() - &m).camax() < 1e-12);

        let z = DMatrix::<C64>::zeros(3, 3);
        let t = takagi_factorization(&z).unwrap();
        assert!(unitarity(&t.u) < 1e-12);
        assert!(t.sigma.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(takagi_factorization(&m), Err(Error::NotSymmetric(_))));
    }
}
