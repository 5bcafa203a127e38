use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Bit-packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(WORD)] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "F2Vector index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "F2Vector index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &F2Vector) {
        debug_assert_eq!(self.len, other.len);
        self.words.iter_mut().zip(&other.words).for_each(|(a, b)| *a ^= b);
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &F2Vector) -> bool {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    fn first_set_from(&self, start: usize) -> Option<usize> {
        (start..self.len).find(|&i| self.get(i))
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.to_bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "F2[{s}]")
    }
}

/// Dense GF(2) matrix stored as bit-packed rows.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F2Vector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Parses rows written as strings of '0'/'1'.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, text) in rows.iter().enumerate() {
            if text.len() != cols {
                return Err(Error::Dimension { expected: cols, got: text.len() });
            }
            for (c, ch) in text.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    _ => return Err(Error::Parse(format!("invalid F2 digit {ch:?}"))),
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &F2Vector {
        &self.data[r]
    }

    pub fn mul_vec(&self, x: &F2Vector) -> Result<F2Vector> {
        if x.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: x.len() });
        }
        Ok(F2Vector::from_bits(&self.data.iter().map(|row| row.dot(x)).collect::<Vec<_>>()))
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.data).finish()
    }
}

/// Rank over GF(2).
pub fn f2_rank(m: &F2Matrix) -> usize {
    let mut rows = m.data.clone();
    let mut rank = 0;
    for c in 0..m.cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
    }
    rank
}

/// Some `x` with `m x = rhs` over GF(2), free variables set to 0; `None`
/// if the system is inconsistent.
pub fn f2_solve(m: &F2Matrix, rhs: &F2Vector) -> Result<Option<F2Vector>> {
    if rhs.len() != m.rows {
        return Err(Error::Dimension { expected: m.rows, got: rhs.len() });
    }
    // augmented rows [m | rhs]
    let n = m.cols;
    let mut rows: Vec<F2Vector> = (0..m.rows)
        .map(|r| {
            let mut v = F2Vector::zeros(n + 1);
            for c in 0..n {
                if m.get(r, c) {
                    v.set(c, true);
                }
            }
            v.set(n, rhs.get(r));
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(c);
        rank += 1;
    }
    // a zero row with rhs 1 means no solution
    if rows[rank..].iter().any(|r| r.first_set_from(0) == Some(n)) {
        return Ok(None);
    }
    let mut x = F2Vector::zeros(n);
    for (r, &c) in pivots.iter().enumerate() {
        x.set(c, rows[r].get(n));
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solves_to_rhs() {
        let rhs = F2Vector::from_bits(&[true, false, true, true]);
        assert_eq!(f2_solve(&F2Matrix::identity(4), &rhs).unwrap(), Some(rhs));
    }

    #[test]
    fn zero_matrix_nonzero_rhs_has_no_solution() {
        let rhs = F2Vector::from_bits(&[false, true]);
        assert_eq!(f2_solve(&F2Matrix::zeros(2, 3), &rhs).unwrap(), None);
    }

    #[test]
    fn dependent_rows() {
        let m = F2Matrix::from_rows(&["110", "011", "101"]).unwrap();
        assert_eq!(f2_rank(&m), 2);
        let x = f2_solve(&m, &F2Vector::zeros(3)).unwrap().unwrap();
        assert!(x.is_zero());
        // consistent rhs: sum of the first two rows' images
        let rhs = F2Vector::from_bits(&[true, true, false]);
        let x = f2_solve(&m, &rhs).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), rhs);
        assert_eq!(f2_solve(&m, &F2Vector::from_bits(&[true, false, false])).unwrap(), None);
    }

    #[test]
    fn wide_vectors_cross_word_boundaries() {
        let mut v = F2Vector::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.weight(), 3);
        assert!(v.get(129) && !v.get(128));
        let m = F2Matrix::identity(130);
        assert_eq!(f2_rank(&m), 130);
        assert_eq!(m.mul_vec(&v).unwrap(), v);
    }
}
