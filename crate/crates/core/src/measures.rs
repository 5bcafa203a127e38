//! Entanglement measures on pure states: n-tangle, GME concurrence and
//! concentratable entanglement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum_core::{subsystem_purity, StateVector, SubsystemMask, C64};

/// Largest label set accepted by the concentratable entanglement.
pub const MAX_CE_LABELS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MeasureKind {
    NTangle,
    GmeConcurrence,
    ConcentratableEntanglement(SubsystemMask),
    SqrtConcentratableEntanglement(SubsystemMask),
}

impl MeasureKind {
    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::NTangle => "ntangle",
            MeasureKind::GmeConcurrence => "gme",
            MeasureKind::ConcentratableEntanglement(_) => "ce",
            MeasureKind::SqrtConcentratableEntanglement(_) => "sqrt-ce",
        }
    }

    pub fn label_set(&self) -> Option<&SubsystemMask> {
        match self {
            MeasureKind::ConcentratableEntanglement(s) | MeasureKind::SqrtConcentratableEntanglement(s) => Some(s),
            _ => None,
        }
    }

    /// Rewrites a label set given on the full register into positions
    /// inside the kept subsystem `b`. Fails unless `s ⊆ b`.
    pub fn relative_to(&self, b: &SubsystemMask) -> Result<MeasureKind> {
        Ok(match self {
            MeasureKind::ConcentratableEntanglement(s) => {
                MeasureKind::ConcentratableEntanglement(check_labels(s, b)?)
            }
            MeasureKind::SqrtConcentratableEntanglement(s) => {
                MeasureKind::SqrtConcentratableEntanglement(check_labels(s, b)?)
            }
            other => other.clone(),
        })
    }

    /// Checks that this kind can be evaluated on an `n_qubits` state.
    pub fn validate_for(&self, n_qubits: usize) -> Result<()> {
        match self {
            MeasureKind::NTangle => Ok(()),
            MeasureKind::GmeConcurrence => {
                if n_qubits < 2 {
                    Err(Error::InvalidArgument("GME concurrence needs at least two qubits".into()))
                } else {
                    Ok(())
                }
            }
            MeasureKind::ConcentratableEntanglement(s) | MeasureKind::SqrtConcentratableEntanglement(s) => {
                validate_labels(s, n_qubits)
            }
        }
    }
}

fn check_labels(s: &SubsystemMask, b: &SubsystemMask) -> Result<SubsystemMask> {
    if s.total_qubits() != b.total_qubits() {
        return Err(Error::Dimension { expected: b.total_qubits(), got: s.total_qubits() });
    }
    if s.is_empty() {
        return Err(Error::InvalidMask("label set must be nonempty".into()));
    }
    if !s.is_subset_of(b) {
        return Err(Error::InvalidMask(format!("label set {:?} is not inside the kept qubits {:?}", s.members(), b.members())));
    }
    s.relative_to(b)
}

fn validate_labels(s: &SubsystemMask, n_qubits: usize) -> Result<()> {
    if s.total_qubits() != n_qubits {
        return Err(Error::Dimension { expected: n_qubits, got: s.total_qubits() });
    }
    if s.is_empty() {
        return Err(Error::InvalidMask("label set must be nonempty".into()));
    }
    if s.len() > MAX_CE_LABELS {
        return Err(Error::InvalidMask(format!("label set larger than {MAX_CE_LABELS}")));
    }
    Ok(())
}

/// τ(ψ) = |⟨ψ|ψ̃⟩|. Exactly zero for an odd number of qubits.
pub fn n_tangle(psi: &StateVector) -> f64 {
    n_tangle_raw(psi.amplitudes(), psi.n_qubits())
}

pub(crate) fn n_tangle_raw(amps: &[C64], n: usize) -> f64 {
    if n % 2 == 1 || n == 0 {
        return 0.0;
    }
    let all = (1usize << n) - 1;
    // pairs (x, x̄) contribute equal terms; sum over x < x̄ and double
    let mut acc = C64::new(0.0, 0.0);
    for x in 0..(1usize << (n - 1)) {
        let t = amps[x] * amps[all ^ x];
        if x.count_ones() % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    (2.0 * acc.norm()).min(1.0)
}

/// min over bipartitions γ|γ̄ of √(2(1 − Tr ψ_γ²)).
pub fn gme_concurrence(psi: &StateVector) -> Result<f64> {
    let n = psi.n_qubits();
    if n < 2 {
        return Err(Error::InvalidArgument("GME concurrence needs at least two qubits".into()));
    }
    Ok(gme_raw(psi.amplitudes(), n))
}

pub(crate) fn gme_raw(amps: &[C64], n: usize) -> f64 {
    // γ and its complement give the same purity; fix qubit n−1 outside γ
    let half = 1usize << (n - 1);
    let mut best = f64::INFINITY;
    for gamma in 1..half {
        best = best.min(concurrence_from_purity(subsystem_purity(amps, n, gamma)));
    }
    best
}

/// √(2(1 − p)), with rounding noise in a unit purity mapped to exactly 0.
pub(crate) fn concurrence_from_purity(p: f64) -> f64 {
    let x = 1.0 - p;
    if x < PURITY_NOISE {
        0.0
    } else {
        (2.0 * x).sqrt()
    }
}

/// Purity deficits below this are rounding noise; the square root would
/// otherwise turn a 1e-16 error into a 1e-8 concurrence.
const PURITY_NOISE: f64 = 1e-14;

/// C(ψ; s) = 1 − 2^{−|s|} Σ_{γ⊆s} Tr ψ_γ², with the empty subset contributing 1.
pub fn concentratable_entanglement(psi: &StateVector, s: &SubsystemMask) -> Result<f64> {
    validate_labels(s, psi.n_qubits())?;
    Ok(ce_raw(psi.amplitudes(), psi.n_qubits(), s.bits()))
}

pub(crate) fn ce_raw(amps: &[C64], n: usize, s_bits: usize) -> f64 {
    let size = s_bits.count_ones();
    let mut total = 0.0;
    // enumerate submasks of s in increasing order
    let mut gamma = 0usize;
    loop {
        total += subsystem_purity(amps, n, gamma);
        if gamma == s_bits {
            break;
        }
        gamma = (gamma.wrapping_sub(s_bits)) & s_bits;
    }
    (1.0 - total / (1u64 << size) as f64).max(0.0)
}

/// Evaluates `kind` on `psi`. The zero vector has zero entanglement.
pub fn evaluate(kind: &MeasureKind, psi: &StateVector) -> Result<f64> {
    kind.validate_for(psi.n_qubits())?;
    Ok(evaluate_raw(kind, psi.amplitudes(), psi.n_qubits()))
}

/// Unchecked evaluation on raw amplitudes; `kind` must already be valid.
pub(crate) fn evaluate_raw(kind: &MeasureKind, amps: &[C64], n: usize) -> f64 {
    if amps.iter().all(|a| *a == C64::new(0.0, 0.0)) {
        return 0.0;
    }
    match kind {
        MeasureKind::NTangle => n_tangle_raw(amps, n),
        MeasureKind::GmeConcurrence => gme_raw(amps, n),
        MeasureKind::ConcentratableEntanglement(s) => ce_raw(amps, n, s.bits()),
        MeasureKind::SqrtConcentratableEntanglement(s) => {
            let c = ce_raw(amps, n, s.bits());
            if c < PURITY_NOISE {
                0.0
            } else {
                c.sqrt()
            }
        }
    }
}
