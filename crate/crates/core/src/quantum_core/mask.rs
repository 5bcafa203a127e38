use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered set of qubit labels inside a register of `total_qubits`.
///
/// Qubit 0 is the most significant bit of a basis index. Members are kept
/// sorted, so the first member is the most significant bit of the local
/// index of the subsystem.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemMask {
    total_qubits: usize,
    members: Vec<usize>,
}

impl SubsystemMask {
    pub fn new(total_qubits: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidMask(format!("duplicate qubit {}", w[0])));
        }
        if let Some(&last) = members.last() {
            if last >= total_qubits {
                return Err(Error::IndexOutOfRange { index: last, total: total_qubits });
            }
        }
        Ok(Self { total_qubits, members })
    }

    pub fn empty(total_qubits: usize) -> Self {
        Self { total_qubits, members: Vec::new() }
    }

    pub fn all(total_qubits: usize) -> Self {
        Self { total_qubits, members: (0..total_qubits).collect() }
    }

    /// Mask from a bit pattern where bit `q` (least significant = qubit 0)
    /// marks membership of qubit `q`.
    pub fn from_bits(total_qubits: usize, bits: usize) -> Self {
        let members = (0..total_qubits).filter(|&q| bits >> q & 1 == 1).collect();
        Self { total_qubits, members }
    }

    /// Inverse of [`SubsystemMask::from_bits`].
    pub fn bits(&self) -> usize {
        self.members.iter().fold(0, |acc, &q| acc | 1 << q)
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.members.binary_search(&qubit).is_ok()
    }

    pub fn complement(&self) -> Self {
        let members = (0..self.total_qubits).filter(|q| !self.contains(*q)).collect();
        Self { total_qubits: self.total_qubits, members }
    }

    pub fn is_subset_of(&self, other: &SubsystemMask) -> bool {
        self.members.iter().all(|&q| other.contains(q))
    }

    /// Position of each member of `self` inside `parent`, as a mask over
    /// `parent.len()` qubits.
    pub fn relative_to(&self, parent: &SubsystemMask) -> Result<SubsystemMask> {
        let mut local = Vec::with_capacity(self.len());
        for &q in &self.members {
            match parent.members.binary_search(&q) {
                Ok(pos) => local.push(pos),
                Err(_) => {
                    return Err(Error::InvalidMask(format!(
                        "qubit {q} is not part of the parent subsystem {:?}",
                        parent.members
                    )))
                }
            }
        }
        Ok(SubsystemMask { total_qubits: parent.len(), members: local })
    }

    /// Dimension 2^len of the subsystem's Hilbert space.
    pub fn dim(&self) -> usize {
        1 << self.members.len()
    }

    /// Extracts the local index of this subsystem from a global basis index.
    #[inline]
    pub fn local_index(&self, global: usize) -> usize {
        let n = self.total_qubits;
        self.members.iter().fold(0, |acc, &q| (acc << 1) | (global >> (n - 1 - q) & 1))
    }

    /// Global bit pattern contributed by a local index of this subsystem.
    #[inline]
    pub fn scatter(&self, local: usize) -> usize {
        let n = self.total_qubits;
        let k = self.members.len();
        self.members
            .iter()
            .enumerate()
            .fold(0, |acc, (pos, &q)| acc | ((local >> (k - 1 - pos) & 1) << (n - 1 - q)))
    }

    /// Table mapping every local index to its global bit pattern.
    pub fn scatter_table(&self) -> Vec<usize> {
        (0..self.dim()).map(|l| self.scatter(l)).collect()
    }
}
