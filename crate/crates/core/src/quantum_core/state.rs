use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{capacity, check_capacity, SubsystemMask, C64};
use crate::error::{Error, Result};

/// Tolerance on the Euclidean norm of a normalized state.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A pure state on `n_qubits` qubits in the computational basis.
///
/// Index `i` of `amplitudes` is the basis state whose big-endian bit pattern
/// is `i` (qubit 0 is the most significant bit). The all-zero vector is
/// allowed and stands for the state attached to a zero-probability
/// measurement outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Builds a state, checking the length and that the norm is 1.
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let state = Self::from_raw(n_qubits, amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Builds a state from arbitrary amplitudes and rescales them to unit
    /// norm. A vector of norm zero is rejected.
    pub fn normalized(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let mut state = Self::from_raw(n_qubits, amplitudes)?;
        let norm = state.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        state.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    fn from_raw(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_capacity(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::Dimension { expected: 1 << n_qubits, got: amplitudes.len() });
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Unchecked constructor for internal hot paths.
    pub(crate) fn from_parts(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_qubits);
        Self { n_qubits, amplitudes }
    }

    /// The designated zero vector.
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, amplitudes: vec![C64::new(0.0, 0.0); 1 << n_qubits] }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        if index >= 1 << n_qubits {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut s = Self::zero(n_qubits);
        s.amplitudes[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// (|0…0⟩ + |1…1⟩)/√2
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("GHZ state needs at least one qubit".into()));
        }
        let mut s = Self::zero(n_qubits);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        s.amplitudes[0] = C64::new(h, 0.0);
        s.amplitudes[(1 << n_qubits) - 1] = C64::new(h, 0.0);
        Ok(s)
    }

    /// Equal superposition of all single-excitation basis states.
    pub fn w(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("W state needs at least one qubit".into()));
        }
        let mut s = Self::zero(n_qubits);
        let a = 1.0 / (n_qubits as f64).sqrt();
        for q in 0..n_qubits {
            s.amplitudes[1 << q] = C64::new(a, 0.0);
        }
        Ok(s)
    }

    /// |+⟩^⊗n
    pub fn plus(n_qubits: usize) -> Result<Self> {
        check_capacity(n_qubits)?;
        let a = (0.5f64).powf(n_qubits as f64 / 2.0);
        Ok(Self { n_qubits, amplitudes: vec![C64::new(a, 0.0); 1 << n_qubits] })
    }

    /// Tensor product of single-qubit states given as (α, β) pairs.
    pub fn product(qubits: &[(C64, C64)]) -> Result<Self> {
        let mut state = Self { n_qubits: 0, amplitudes: vec![C64::new(1.0, 0.0)] };
        for &(a, b) in qubits {
            let q = Self::normalized(1, vec![a, b])?;
            state = state.tensor(&q)?;
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.iter().all(|a| *a == C64::new(0.0, 0.0))
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// |self⟩ ⊗ |other⟩ with `self` on the more significant qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        tensor_product(self, other)
    }

    /// |ψ⟩⟨ψ|
    pub fn density(&self) -> super::DensityOperator {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        super::DensityOperator::from_parts(self.n_qubits, &v * v.adjoint())
    }

    /// Applies a 2×2 matrix to one qubit.
    pub fn apply_single(&self, qubit: usize, u: &[[C64; 2]; 2]) -> Result<StateVector> {
        if qubit >= self.n_qubits {
            return Err(Error::IndexOutOfRange { index: qubit, total: self.n_qubits });
        }
        let mut out = self.amplitudes.clone();
        let bit = 1 << (self.n_qubits - 1 - qubit);
        for i in 0..self.dim() {
            if i & bit == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                out[i] = u[0][0] * a0 + u[0][1] * a1;
                out[i | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(Self { n_qubits: self.n_qubits, amplitudes: out })
    }

    /// Multiplies by a global phase e^{iθ}.
    pub fn with_phase(&self, theta: f64) -> StateVector {
        let p = Complex64::from_polar(1.0, theta);
        Self { n_qubits: self.n_qubits, amplitudes: self.amplitudes.iter().map(|a| a * p).collect() }
    }

    /// Reshapes the amplitudes into a `rows.dim() × complement.dim()` matrix
    /// whose row index is the local index on `rows` and column index the
    /// local index on the complement.
    pub fn bipartite_matrix(&self, rows: &SubsystemMask) -> Result<DMatrix<C64>> {
        if rows.total_qubits() != self.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, got: rows.total_qubits() });
        }
        let cols = rows.complement();
        let rt = rows.scatter_table();
        let ct = cols.scatter_table();
        Ok(DMatrix::from_fn(rt.len(), ct.len(), |r, c| self.amplitudes[rt[r] | ct[c]]))
    }
}

/// Tensor product with `a` on the more significant qubits.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let n = a.n_qubits + b.n_qubits;
    if n > capacity() {
        return Err(Error::Capacity { requested: n, limit: capacity() });
    }
    let mut amps = Vec::with_capacity(1 << n);
    for x in &a.amplitudes {
        amps.extend(b.amplitudes.iter().map(|y| x * y));
    }
    Ok(StateVector { n_qubits: n, amplitudes: amps })
}

/// JSON form `{ "n_qubits": n, "re": [...], "im": [...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub n_qubits: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&StateVector> for StateFile {
    fn from(s: &StateVector) -> Self {
        Self {
            n_qubits: s.n_qubits,
            re: s.amplitudes.iter().map(|a| a.re).collect(),
            im: s.amplitudes.iter().map(|a| a.im).collect(),
        }
    }
}

impl TryFrom<StateFile> for StateVector {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        if f.re.len() != f.im.len() {
            return Err(Error::Parse(format!(
                "re has {} entries but im has {}",
                f.re.len(),
                f.im.len()
            )));
        }
        let amps = f.re.iter().zip(&f.im).map(|(&r, &i)| C64::new(r, i)).collect();
        // Files written with limited precision are renormalized if close.
        let s = StateVector::from_raw(f.n_qubits, amps)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized(norm));
        }
        StateVector::normalized(s.n_qubits, s.amplitudes)
    }
}

impl StateVector {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateFile::from(self)).expect("state serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        f.try_into()
    }
}
