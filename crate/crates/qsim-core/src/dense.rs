//! Sparse-map state-vector simulation: the conventional engine and the
//! oracle the path engine is checked against.
//!
//! Amplitudes live in a hash map keyed by basis state; entries whose
//! magnitude falls to the prune threshold are dropped, keeping the map at
//! the true support size rather than 2^s.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_complex::Complex64;
use rand::Rng;

use crate::basis::BasisState;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateApplication;
use crate::path::shot_rng;

/// Stored entries keep magnitude strictly above this; well below the
/// engines' zero threshold so pruning never shifts a sampled distribution.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// A basis-state → amplitude map over a fixed-width register.
#[derive(Clone, Debug)]
pub struct SparseStateVector {
    width: usize,
    amps: HashMap<BasisState, Complex64>,
}

impl SparseStateVector {
    /// The unit vector concentrated on a single basis state.
    pub fn unit(state: BasisState) -> Self {
        let width = state.width();
        let mut amps = HashMap::new();
        amps.insert(state, Complex64::ONE);
        SparseStateVector { width, amps }
    }

    /// Build a vector from explicit entries, pruning negligible amplitudes.
    /// Does not renormalize.
    pub fn from_entries(
        width: usize,
        entries: impl IntoIterator<Item = (BasisState, Complex64)>,
    ) -> Result<Self> {
        let mut amps = HashMap::new();
        for (state, amp) in entries {
            if state.width() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    got: state.width(),
                });
            }
            if amp.norm() > PRUNE_THRESHOLD {
                amps.insert(state, amp);
            }
        }
        Ok(SparseStateVector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of stored (nonzero) entries.
    pub fn support(&self) -> usize {
        self.amps.len()
    }

    /// Amplitude of a basis state, zero if absent.
    pub fn amplitude(&self, state: &BasisState) -> Complex64 {
        self.amps.get(state).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisState, &Complex64)> {
        self.amps.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Entries in ascending basis-state order.
    pub fn sorted_entries(&self) -> Vec<(BasisState, Complex64)> {
        let mut entries: Vec<_> = self.amps.iter().map(|(s, a)| (s.clone(), *a)).collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        entries
    }

    /// Apply one gate: every block of entries sharing non-operand bits is
    /// multiplied by the gate matrix; results below the prune threshold are
    /// dropped.
    pub fn apply_gate(&self, app: &GateApplication) -> Result<SparseStateVector> {
        let gate = app.gate();
        let ops = app.operands();
        if app.max_operand() >= self.width {
            return Err(Error::OperandOutOfRange {
                operand: app.max_operand(),
                width: self.width,
            });
        }
        let dim = gate.dim();

        let mut bases: HashSet<BasisState> = HashSet::new();
        for state in self.amps.keys() {
            let mut base = state.clone();
            base.set_substate_raw(ops, 0);
            bases.insert(base);
        }

        let mut out: HashMap<BasisState, Complex64> = HashMap::with_capacity(self.amps.len());
        let mut block = [Complex64::ZERO; 16];
        for base in bases {
            let mut scratch = base.clone();
            for (local, slot) in block.iter_mut().enumerate().take(dim) {
                scratch.set_substate_raw(ops, local);
                *slot = self.amplitude(&scratch);
            }
            for row in 0..dim {
                let mut sum = Complex64::ZERO;
                for (col, amp) in block.iter().enumerate().take(dim) {
                    sum += gate.entry(row, col) * amp;
                }
                if sum.norm() > PRUNE_THRESHOLD {
                    scratch.set_substate_raw(ops, row);
                    out.insert(scratch.clone(), sum);
                }
            }
        }
        Ok(SparseStateVector {
            width: self.width,
            amps: out,
        })
    }

    /// Squared magnitudes renormalized by their sum.
    pub fn distribution(&self) -> Result<BTreeMap<BasisState, f64>> {
        let total = self.norm_sqr();
        if self.amps.is_empty() || total <= 0.0 {
            return Err(Error::EmptyStateVector);
        }
        Ok(self
            .amps
            .iter()
            .map(|(s, a)| (s.clone(), a.norm_sqr() / total))
            .collect())
    }
}

/// Fold the whole circuit over `{input: 1}`.
pub fn simulate_dense(circuit: &Circuit, input: &BasisState) -> Result<SparseStateVector> {
    if input.width() != circuit.width() {
        return Err(Error::WidthMismatch {
            expected: circuit.width(),
            got: input.width(),
        });
    }
    let mut sv = SparseStateVector::unit(input.clone());
    for app in circuit.gates() {
        sv = sv.apply_gate(app)?;
    }
    Ok(sv)
}

/// Draw `shots` basis states from a probability map, one uniform variate per
/// shot on the same per-shot streams the path engine uses.
pub fn sample_distribution(
    dist: &BTreeMap<BasisState, f64>,
    shots: u64,
    seed: u64,
) -> Result<BTreeMap<BasisState, u64>> {
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    if dist.is_empty() {
        return Err(Error::EmptyStateVector);
    }
    let mut histogram: BTreeMap<BasisState, u64> = BTreeMap::new();
    for shot in 0..shots {
        let mut rng = shot_rng(seed, shot);
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut chosen = None;
        for (state, &p) in dist {
            if p <= 0.0 {
                continue;
            }
            cumulative += p;
            if u <= cumulative {
                chosen = Some(state.clone());
                break;
            }
            chosen = Some(state.clone()); // fallback to last positive bin
        }
        let state = chosen.expect("distribution has a positive bin");
        *histogram.entry(state).or_insert(0) += 1;
    }
    Ok(histogram)
}
