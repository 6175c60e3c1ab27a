//! Circuits: an ordered gate list over a fixed-width register, plus the
//! statistics that govern simulation cost.

use std::fmt;

use crate::basis::MAX_WIDTH;
use crate::error::{Error, Result};
use crate::gate::GateApplication;

/// A fixed-width register and an ordered list of gate applications.
#[derive(Clone, Debug)]
pub struct Circuit {
    width: usize,
    gates: Vec<GateApplication>,
}

impl Circuit {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::InvalidWidth(width));
        }
        Ok(Circuit {
            width,
            gates: Vec::new(),
        })
    }

    pub fn with_gates(width: usize, gates: Vec<GateApplication>) -> Result<Self> {
        let mut circuit = Circuit::new(width)?;
        for app in gates {
            circuit.push(app)?;
        }
        Ok(circuit)
    }

    /// Append a gate application, validating its operands against the width.
    pub fn push(&mut self, app: GateApplication) -> Result<()> {
        let worst = app.max_operand();
        if worst >= self.width {
            return Err(Error::OperandOutOfRange {
                operand: worst,
                width: self.width,
            });
        }
        self.gates.push(app);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[GateApplication] {
        &self.gates
    }

    /// Gate count `t`.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Width, gate count, nontrivial count, and maximum branching factor.
    pub fn stats(&self) -> CircuitStats {
        let nontrivial = self.gates.iter().filter(|g| !g.gate().is_trivial()).count();
        let max_branching = self
            .gates
            .iter()
            .map(|g| g.gate().max_branching_factor())
            .max()
            .unwrap_or(1);
        CircuitStats {
            width: self.width,
            gate_count: self.gates.len(),
            nontrivial_count: nontrivial,
            max_branching,
        }
    }
}

/// Complexity parameters of a circuit: width `s`, gate count `t`, nontrivial
/// gate count `k`, and maximum branching factor `b_max`. Worst-case recursion
/// leaf count is bounded by `b_max^k`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CircuitStats {
    pub width: usize,
    pub gate_count: usize,
    pub nontrivial_count: usize,
    pub max_branching: usize,
}

impl CircuitStats {
    /// `b_max^k`, or `None` on overflow.
    pub fn leaf_bound(&self) -> Option<u128> {
        let b = self.max_branching as u128;
        let mut bound: u128 = 1;
        for _ in 0..self.nontrivial_count {
            bound = bound.checked_mul(b)?;
        }
        Some(bound)
    }
}

impl fmt::Display for CircuitStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "s={} t={} k={} b_max={}",
            self.width, self.gate_count, self.nontrivial_count, self.max_branching
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateApplication;
    use crate::gates;

    #[test]
    fn empty_circuit_stats() {
        let c = Circuit::new(3).unwrap();
        let stats = c.stats();
        assert_eq!(
            stats,
            CircuitStats {
                width: 3,
                gate_count: 0,
                nontrivial_count: 0,
                max_branching: 1
            }
        );
        assert_eq!(stats.leaf_bound(), Some(1));
    }

    #[test]
    fn single_hadamard_stats() {
        let mut c = Circuit::new(1).unwrap();
        c.push(GateApplication::new(gates::hadamard(), vec![0]).unwrap())
            .unwrap();
        let stats = c.stats();
        assert_eq!(
            stats,
            CircuitStats {
                width: 1,
                gate_count: 1,
                nontrivial_count: 1,
                max_branching: 2
            }
        );
        assert_eq!(stats.leaf_bound(), Some(2));
    }

    #[test]
    fn draper_adder_stats() {
        let c = gates::draper_adder(2).unwrap();
        let stats = c.stats();
        assert_eq!(
            stats,
            CircuitStats {
                width: 4,
                gate_count: 9,
                nontrivial_count: 4,
                max_branching: 2
            }
        );
        assert_eq!(stats.leaf_bound(), Some(16));
    }

    #[test]
    fn nontrivial_count_matches_recount() {
        let c = gates::draper_adder(3).unwrap();
        let recount = c
            .gates()
            .iter()
            .filter(|g| !g.gate().is_trivial())
            .count();
        assert_eq!(c.stats().nontrivial_count, recount);
    }

    #[test]
    fn rejects_out_of_range_operand() {
        let mut c = Circuit::new(2).unwrap();
        let app = GateApplication::new(gates::hadamard(), vec![2]).unwrap();
        assert!(c.push(app).is_err());
    }
}
