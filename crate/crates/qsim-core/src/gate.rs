//! Unitary gate matrices, triviality classification, and branching factors.
//!
//! A gate is *trivial* when its matrix is monomial (a generalized
//! permutation: one nonzero entry per column). Trivial gates map each basis
//! state to exactly one basis state with a phase, so a simulated trajectory
//! crosses them without branching. Everything else is *nontrivial* and forces
//! the path engine to consider amplitudes of neighboring basis states.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Matrix entries with magnitude at or below this threshold count as zero.
pub const EPS_ZERO: f64 = 1e-12;

/// Maximum allowed max-norm of `U†U − I`.
pub const UNITARY_TOL: f64 = 1e-10;

/// Largest supported gate arity. Bounds every per-gate block at 2^4 = 16
/// amplitudes regardless of circuit width.
pub const MAX_ARITY: usize = 4;

/// Classification of a gate matrix for the path engine.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Triviality {
    /// Monomial matrix: single-successor columns, branching factor 1.
    Trivial,
    /// Branches amplitude across the operand block.
    Nontrivial,
}

/// A small unitary of arity 1..=4, stored row-major. Row index = output
/// local index, column index = input local index.
#[derive(Clone, Debug)]
pub struct GateMatrix {
    name: String,
    arity: usize,
    entries: Vec<Complex64>,
    // classified once at construction; the engines query this per crossing
    triviality: Triviality,
}

impl GateMatrix {
    /// Validate and construct a gate. Rejects bad arity, wrong entry counts,
    /// non-finite entries, and matrices failing the unitarity tolerance.
    pub fn new(name: impl Into<String>, arity: usize, entries: Vec<Complex64>) -> Result<Self> {
        let name = name.into();
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::InvalidArity(arity));
        }
        let dim = 1usize << arity;
        if entries.len() != dim * dim {
            return Err(Error::MatrixSizeMismatch {
                name,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::NonFiniteEntry { name });
        }
        let mut gate = GateMatrix {
            name,
            arity,
            entries,
            triviality: Triviality::Nontrivial,
        };
        let deviation = gate.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary {
                name: gate.name,
                deviation,
            });
        }
        gate.triviality = gate.compute_triviality();
        Ok(gate)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Block dimension 2^arity.
    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Max-norm of `U†U − I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let mut dot = Complex64::ZERO;
                for k in 0..dim {
                    dot += self.entry(k, i).conj() * self.entry(k, j);
                }
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// Trivial iff the matrix is monomial: exactly one entry per column with
    /// magnitude above [`EPS_ZERO`]. Unitarity then forces one per row.
    pub fn classify(&self) -> Triviality {
        self.triviality
    }

    pub fn is_trivial(&self) -> bool {
        self.triviality == Triviality::Trivial
    }

    fn compute_triviality(&self) -> Triviality {
        let dim = self.dim();
        for col in 0..dim {
            let nonzero = (0..dim)
                .filter(|&row| self.entry(row, col).norm() > EPS_ZERO)
                .count();
            if nonzero != 1 {
                return Triviality::Nontrivial;
            }
        }
        Triviality::Trivial
    }

    /// Branching factor for a local input: the number of input configurations
    /// that share a reachable output with `local_input`. Trivial gates give 1;
    /// a fully dense column gives 2^arity.
    pub fn branching_factor(&self, local_input: usize) -> usize {
        let dim = self.dim();
        debug_assert!(local_input < dim);
        let reachable: Vec<usize> = (0..dim)
            .filter(|&row| self.entry(row, local_input).norm() > EPS_ZERO)
            .collect();
        (0..dim)
            .filter(|&col| {
                reachable
                    .iter()
                    .any(|&row| self.entry(row, col).norm() > EPS_ZERO)
            })
            .count()
    }

    /// Maximum branching factor over all local inputs.
    pub fn max_branching_factor(&self) -> usize {
        (0..self.dim())
            .map(|col| self.branching_factor(col))
            .max()
            .unwrap_or(1)
    }

    /// Largest number of nonzero rows in any column; bounds how much a gate
    /// can grow the support of a sparse state vector.
    pub(crate) fn max_column_fanout(&self) -> usize {
        let dim = self.dim();
        (0..dim)
            .map(|col| {
                (0..dim)
                    .filter(|&row| self.entry(row, col).norm() > EPS_ZERO)
                    .count()
            })
            .max()
            .unwrap_or(0)
    }

    /// For a trivial gate, the unique (output row, entry) fed by input `col`.
    #[inline]
    pub(crate) fn single_successor(&self, col: usize) -> Option<(usize, Complex64)> {
        let dim = self.dim();
        let mut found = None;
        for row in 0..dim {
            let e = self.entry(row, col);
            if e.norm() > EPS_ZERO {
                if found.is_some() {
                    return None;
                }
                found = Some((row, e));
            }
        }
        found
    }

    /// For a trivial gate, the unique (input column, entry) feeding output `row`.
    #[inline]
    pub(crate) fn single_predecessor(&self, row: usize) -> Option<(usize, Complex64)> {
        let dim = self.dim();
        let mut found = None;
        for col in 0..dim {
            let e = self.entry(row, col);
            if e.norm() > EPS_ZERO {
                if found.is_some() {
                    return None;
                }
                found = Some((col, e));
            }
        }
        found
    }

    /// Conjugate transpose. Hermitian gates keep their name; names of the
    /// form `NAME(q)` toggle a `DG` suffix (`CPHASE(1)` ↔ `CPHASEDG(1)`), so
    /// inverses of the built-in phase family stay serializable.
    pub fn dagger(&self) -> GateMatrix {
        let dim = self.dim();
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for row in 0..dim {
            for col in 0..dim {
                entries[row * dim + col] = self.entry(col, row).conj();
            }
        }
        let hermitian = (0..dim * dim).all(|i| (entries[i] - self.entries[i]).norm() <= EPS_ZERO);
        let name = if hermitian {
            self.name.clone()
        } else {
            toggle_dagger_name(&self.name)
        };
        GateMatrix {
            name,
            arity: self.arity,
            entries,
            // the transpose of a monomial matrix is monomial
            triviality: self.triviality,
        }
    }

    /// Max-norm distance to another matrix of the same shape.
    pub fn max_entry_distance(&self, other: &GateMatrix) -> f64 {
        debug_assert_eq!(self.arity, other.arity);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn toggle_dagger_name(name: &str) -> String {
    let (base, param) = match name.find('(') {
        Some(i) => (&name[..i], &name[i..]),
        None => (name, ""),
    };
    match base.strip_suffix("DG") {
        Some(stripped) => format!("{stripped}{param}"),
        None => format!("{base}DG{param}"),
    }
}

/// A gate bound to an ordered list of distinct circuit qubits. Operand `j`
/// carries local bit `j` of the gate's block index.
#[derive(Clone, Debug)]
pub struct GateApplication {
    gate: GateMatrix,
    operands: Vec<usize>,
}

impl GateApplication {
    pub fn new(gate: GateMatrix, operands: Vec<usize>) -> Result<Self> {
        if operands.len() != gate.arity() {
            return Err(Error::OperandCountMismatch {
                arity: gate.arity(),
                got: operands.len(),
            });
        }
        for (i, &q) in operands.iter().enumerate() {
            if operands[..i].contains(&q) {
                return Err(Error::DuplicateOperand(q));
            }
        }
        Ok(GateApplication { gate, operands })
    }

    pub fn gate(&self) -> &GateMatrix {
        &self.gate
    }

    pub fn operands(&self) -> &[usize] {
        &self.operands
    }

    pub fn max_operand(&self) -> usize {
        *self.operands.iter().max().expect("arity >= 1")
    }
}
