use nalgebra::DMatrix;

use super::linalg::hermitian_eig;
use super::{check_capacity, StateVector, SubsystemMask, C64};
use crate::error::{Error, Result};

/// Tolerances used when validating a density operator.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const PSD_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// A density operator on `n_qubits` qubits, in the same big-endian basis as
/// [`StateVector`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n_qubits: usize,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(n_qubits: usize, matrix: DMatrix<C64>) -> Result<Self> {
        check_capacity(n_qubits)?;
        let d = 1 << n_qubits;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension { expected: d, got: matrix.nrows().max(matrix.ncols()) });
        }
        let herm = (&matrix - matrix.adjoint()).camax();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::NotDensity(format!("not Hermitian (residual {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::NotDensity(format!("trace is {tr}")));
        }
        let rho = Self { n_qubits, matrix };
        let (vals, _) = hermitian_eig(&rho.matrix)?;
        if let Some(&min) = vals.last() {
            if min < -PSD_TOLERANCE {
                return Err(Error::NotDensity(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(n_qubits: usize, matrix: DMatrix<C64>) -> Self {
        Self { n_qubits, matrix }
    }

    /// I/2^n
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let d = 1 << n_qubits;
        Ok(Self { n_qubits, matrix: DMatrix::identity(d, d) / C64::new(d as f64, 0.0) })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Tr ρ²
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Anything that has a reduced state on a subset of its qubits.
pub trait Reducible {
    fn n_qubits(&self) -> usize;
    fn reduce(&self, keep: &SubsystemMask) -> Result<DensityOperator>;
}

impl Reducible for StateVector {
    fn n_qubits(&self) -> usize {
        StateVector::n_qubits(self)
    }

    fn reduce(&self, keep: &SubsystemMask) -> Result<DensityOperator> {
        let m = self.bipartite_matrix(keep)?;
        Ok(DensityOperator::from_parts(keep.len(), &m * m.adjoint()))
    }
}

impl Reducible for DensityOperator {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn reduce(&self, keep: &SubsystemMask) -> Result<DensityOperator> {
        let kt = keep.scatter_table();
        let rt = keep.complement().scatter_table();
        let d = kt.len();
        let m = DMatrix::from_fn(d, d, |i, j| {
            rt.iter().map(|&r| self.matrix[(kt[i] | r, kt[j] | r)]).sum::<C64>()
        });
        Ok(DensityOperator::from_parts(keep.len(), m))
    }
}

/// Reduced density operator on the qubits in `keep`.
pub fn partial_trace<S: Reducible + ?Sized>(state: &S, keep: &SubsystemMask) -> Result<DensityOperator> {
    if keep.total_qubits() != state.n_qubits() {
        return Err(Error::Dimension { expected: state.n_qubits(), got: keep.total_qubits() });
    }
    if keep.is_empty() {
        return Err(Error::InvalidMask("partial trace must keep at least one qubit".into()));
    }
    state.reduce(keep)
}

/// Tr ψ_γ² for the reduced state of a pure state on the qubits whose bit
/// is set in `gamma_bits` (bit q = qubit q). Works on raw amplitudes and
/// treats the empty subset as purity 1.
pub fn subsystem_purity(amps: &[C64], n_qubits: usize, gamma_bits: usize) -> f64 {
    let all = (1usize << n_qubits) - 1;
    let gamma_bits = gamma_bits & all;
    if gamma_bits == 0 || gamma_bits == all {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        return norm * norm;
    }
    let gamma = SubsystemMask::from_bits(n_qubits, gamma_bits);
    let rest = gamma.complement();
    // Gram matrix on the smaller side; Tr(MM†)² = Tr(M†M)².
    let (small, big) = if gamma.len() <= rest.len() { (gamma, rest) } else { (rest, gamma) };
    let st = small.scatter_table();
    let bt = big.scatter_table();
    let ds = st.len();
    let mut purity = 0.0;
    for i in 0..ds {
        for j in i..ds {
            let g: C64 = bt.iter().map(|&b| amps[st[i] | b] * amps[st[j] | b].conj()).sum();
            purity += if i == j { g.norm_sqr() } else { 2.0 * g.norm_sqr() };
        }
    }
    purity
}

/// Phase of σ_y^⊗n acting on basis state |x⟩: σ_y^⊗n|x⟩ = i^n (−1)^{|x|} |x̄⟩.
#[inline]
pub(crate) fn sigma_y_phase(n: usize, x: usize) -> C64 {
    let i_pow = match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    };
    if x.count_ones() % 2 == 1 {
        -i_pow
    } else {
        i_pow
    }
}

/// Spin flip |ψ̃⟩ = σ_y^⊗n |ψ*⟩ with σ_y = [[0, −i], [i, 0]].
pub fn wootters_tilde_state(psi: &StateVector) -> StateVector {
    let n = psi.n_qubits();
    let all = psi.dim() - 1;
    let a = psi.amplitudes();
    let out = (0..psi.dim()).map(|x| sigma_y_phase(n, all ^ x) * a[all ^ x].conj()).collect();
    StateVector::from_parts(n, out)
}

/// ρ̃ = σ_y^⊗n ρ* σ_y^⊗n.
pub fn wootters_tilde_density(rho: &DensityOperator) -> DensityOperator {
    let n = rho.n_qubits();
    let all = rho.dim() - 1;
    let m = rho.matrix();
    let out = DMatrix::from_fn(rho.dim(), rho.dim(), |x, y| {
        // (σ ρ* σ)_{xy} = phase(x̄) conj(ρ_{x̄ ȳ}) conj(phase(ȳ))
        sigma_y_phase(n, all ^ x) * m[(all ^ x, all ^ y)].conj() * sigma_y_phase(n, all ^ y).conj()
    });
    DensityOperator::from_parts(n, out)
}

/// Either kind of operand accepted by [`wootters_tilde`].
pub trait Tilde {
    fn tilde(&self) -> Self;
}

impl Tilde for StateVector {
    fn tilde(&self) -> Self {
        wootters_tilde_state(self)
    }
}

impl Tilde for DensityOperator {
    fn tilde(&self) -> Self {
        wootters_tilde_density(self)
    }
}

pub fn wootters_tilde<T: Tilde>(x: &T) -> T {
    x.tilde()
}
