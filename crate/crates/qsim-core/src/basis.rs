//! Computational basis states and operand-block bit addressing.
//!
//! A [`BasisState`] is a classical bit configuration of a fixed-width qubit
//! register. Qubit 0 is the least significant bit; printed bitstrings are
//! most-significant-first, so the state with qubit 1 set on a width-4
//! register displays as `0010`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Maximum register width supported.
pub const MAX_WIDTH: usize = 1024;

const WORD_BITS: usize = 64;

/// A classical bit configuration labelling one computational basis vector.
///
/// Equality and hashing are value-based over `(width, bits)`; all bit
/// positions at or above `width` are kept zero so derived impls are sound.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    width: usize,
    words: Vec<u64>,
}

impl BasisState {
    /// All-zero state of the given width.
    pub fn zeros(width: usize) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::InvalidWidth(width));
        }
        Ok(BasisState {
            width,
            words: vec![0; width.div_ceil(WORD_BITS)],
        })
    }

    /// State whose low 64 bits are taken from `value`.
    pub fn from_value(width: usize, value: u64) -> Result<Self> {
        let mut state = Self::zeros(width)?;
        if width < WORD_BITS && value >> width != 0 {
            return Err(Error::LocalIndexOutOfRange {
                local: value as usize,
                dim: 1 << width,
            });
        }
        state.words[0] = value;
        Ok(state)
    }

    /// Parse a most-significant-first bitstring such as `0110`.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let mut state = Self::zeros(s.len())?;
        for (i, ch) in s.chars().rev().enumerate() {
            match ch {
                '0' => {}
                '1' => state.set_bit(i, true),
                _ => return Err(Error::InvalidBitstring(s.to_string())),
            }
        }
        Ok(state)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Value of qubit `i`.
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.width);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.width);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Numeric value of the state, if it fits in a u64.
    pub fn value_u64(&self) -> Option<u64> {
        if self.words.iter().skip(1).any(|&w| w != 0) {
            None
        } else {
            Some(self.words[0])
        }
    }

    /// Extract the local block index addressed by `operands`: bit `j` of the
    /// result is qubit `operands[j]` of the state.
    pub fn substate_index(&self, operands: &[usize]) -> Result<usize> {
        self.check_operands(operands)?;
        Ok(self.substate_index_raw(operands))
    }

    /// Replace the operand qubits with the bits of `local`, leaving every
    /// other qubit unchanged. Inverse of [`BasisState::substate_index`].
    pub fn with_substate(&self, operands: &[usize], local: usize) -> Result<Self> {
        self.check_operands(operands)?;
        if local >> operands.len() != 0 {
            return Err(Error::LocalIndexOutOfRange {
                local,
                dim: 1 << operands.len(),
            });
        }
        let mut out = self.clone();
        out.set_substate_raw(operands, local);
        Ok(out)
    }

    fn check_operands(&self, operands: &[usize]) -> Result<()> {
        if operands.is_empty() {
            return Err(Error::EmptyOperands);
        }
        for &q in operands {
            if q >= self.width {
                return Err(Error::OperandOutOfRange {
                    operand: q,
                    width: self.width,
                });
            }
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn substate_index_raw(&self, operands: &[usize]) -> usize {
        let mut local = 0;
        for (j, &q) in operands.iter().enumerate() {
            local |= (self.bit(q) as usize) << j;
        }
        local
    }

    #[inline]
    pub(crate) fn set_substate_raw(&mut self, operands: &[usize], local: usize) {
        for (j, &q) in operands.iter().enumerate() {
            self.set_bit(q, local >> j & 1 == 1);
        }
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.width).rev() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self)
    }
}

impl Ord for BasisState {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for BasisState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
