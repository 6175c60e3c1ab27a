//! Memory-budgeted hybrid engine: simulate densely while the state vector
//! fits the budget, then freeze it and continue with the path engine.
//!
//! The handoff test is pre-gate: a gate is applied densely only if the
//! projected post-gate support — current support times the gate's maximum
//! column fan-out, capped at 2^width — stays within the budget, so the
//! budget is never transiently exceeded.

use std::collections::BTreeMap;

use crate::basis::BasisState;
use crate::circuit::Circuit;
use crate::dense::{sample_distribution, SparseStateVector};
use crate::error::{Error, Result};
use crate::path::{sample_parallel, EngineMetrics, InitialCondition, Snapshot};

/// Outcome of a hybrid run.
#[derive(Clone, Debug)]
pub struct HybridReport {
    /// Gate index where dense simulation handed off to the path engine;
    /// equal to the gate count if the whole circuit fit the budget.
    pub switch_pc: usize,
    /// State-vector entry count at the handoff (or at circuit end).
    pub snapshot_size: usize,
    /// Final sampling histogram.
    pub histogram: BTreeMap<BasisState, u64>,
    /// Path-engine metrics; all zero when the circuit fit the budget.
    pub metrics: EngineMetrics,
}

/// Run dense up to `budget` state-vector entries, then sample the remaining
/// gates with the path engine seeded from the frozen vector.
pub fn run_hybrid(
    circuit: &Circuit,
    input: &BasisState,
    budget: usize,
    shots: u64,
    seed: u64,
) -> Result<HybridReport> {
    run_hybrid_parallel(circuit, input, budget, shots, seed, 1)
}

/// [`run_hybrid`] with the path phase distributed over `jobs` workers.
pub fn run_hybrid_parallel(
    circuit: &Circuit,
    input: &BasisState,
    budget: usize,
    shots: u64,
    seed: u64,
    jobs: usize,
) -> Result<HybridReport> {
    if budget == 0 {
        return Err(Error::InvalidBudget);
    }
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    if input.width() != circuit.width() {
        return Err(Error::WidthMismatch {
            expected: circuit.width(),
            got: input.width(),
        });
    }

    let width = circuit.width();
    let full_dim: u128 = if width < 128 { 1u128 << width } else { u128::MAX };
    let mut sv = SparseStateVector::unit(input.clone());
    let mut switch_pc = circuit.len();

    for (pc, app) in circuit.gates().iter().enumerate() {
        let fanout = app.gate().max_column_fanout().max(1) as u128;
        let projected = (sv.support() as u128).saturating_mul(fanout).min(full_dim);
        if projected > budget as u128 {
            switch_pc = pc;
            break;
        }
        sv = sv.apply_gate(app)?;
    }

    if switch_pc == circuit.len() {
        // whole circuit fit: sample the dense distribution directly
        let histogram = sample_distribution(&sv.distribution()?, shots, seed)?;
        return Ok(HybridReport {
            switch_pc,
            snapshot_size: sv.support(),
            histogram,
            metrics: EngineMetrics::default(),
        });
    }

    let snapshot = Snapshot::new(&sv, switch_pc)?;
    let snapshot_size = snapshot.len();
    let init = InitialCondition::Snapshot(snapshot);
    let outcome = sample_parallel(circuit, &init, shots, seed, jobs)?;
    Ok(HybridReport {
        switch_pc,
        snapshot_size,
        histogram: outcome.histogram,
        metrics: outcome.metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::simulate_dense;
    use crate::gate::GateApplication;
    use crate::gates;

    fn bits(s: &str) -> BasisState {
        BasisState::from_bitstring(s).unwrap()
    }

    fn tv_distance(
        histogram: &BTreeMap<BasisState, u64>,
        shots: u64,
        dist: &BTreeMap<BasisState, f64>,
    ) -> f64 {
        let mut states: std::collections::BTreeSet<&BasisState> = histogram.keys().collect();
        states.extend(dist.keys());
        0.5 * states
            .into_iter()
            .map(|s| {
                let observed = *histogram.get(s).unwrap_or(&0) as f64 / shots as f64;
                let expected = *dist.get(s).unwrap_or(&0.0);
                (observed - expected).abs()
            })
            .sum::<f64>()
    }

    #[test]
    fn zero_budget_rejected() {
        let circuit = gates::draper_adder(1).unwrap();
        assert!(matches!(
            run_hybrid(&circuit, &bits("00"), 0, 10, 1),
            Err(Error::InvalidBudget)
        ));
    }

    #[test]
    fn large_budget_never_switches() {
        let circuit = gates::draper_adder(2).unwrap();
        let report = run_hybrid(&circuit, &bits("0101"), 16, 200, 5).unwrap();
        assert_eq!(report.switch_pc, 9);
        assert_eq!(report.metrics.calc_amp_calls, 0);
        assert_eq!(report.histogram.get(&bits("0110")), Some(&200));
    }

    #[test]
    fn unit_budget_switches_at_first_hadamard() {
        let circuit = gates::draper_adder(2).unwrap();
        let report = run_hybrid(&circuit, &bits("0101"), 1, 300, 5).unwrap();
        assert_eq!(report.switch_pc, 0);
        assert_eq!(report.snapshot_size, 1);
        assert_eq!(report.histogram.get(&bits("0110")), Some(&300));
    }

    #[test]
    fn budget_two_uniform_pair_of_hadamards() {
        let apps = vec![
            GateApplication::new(gates::hadamard(), vec![0]).unwrap(),
            GateApplication::new(gates::hadamard(), vec![1]).unwrap(),
        ];
        let circuit = Circuit::with_gates(2, apps).unwrap();
        let report = run_hybrid(&circuit, &bits("00"), 2, 10_000, 21).unwrap();
        assert_eq!(report.switch_pc, 1);
        // all four outcomes within 3σ of 2500
        let sigma = (10_000.0f64 * 0.25 * 0.75).sqrt();
        for value in 0..4u64 {
            let state = BasisState::from_value(2, value).unwrap();
            let count = *report.histogram.get(&state).unwrap_or(&0) as f64;
            assert!((count - 2500.0).abs() < 3.0 * sigma, "{state}: {count}");
        }
    }

    #[test]
    fn all_budgets_agree_with_dense() {
        let circuit = gates::draper_adder(2).unwrap();
        let input = bits("1101");
        let dense = simulate_dense(&circuit, &input).unwrap().distribution().unwrap();
        for budget in [1usize, 2, 4, 8, 16] {
            let report = run_hybrid(&circuit, &input, budget, 2000, 33).unwrap();
            let tv = tv_distance(&report.histogram, 2000, &dense);
            assert!(tv < 0.05, "budget {budget}: tv {tv}");
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let circuit = gates::draper_adder(2).unwrap();
        let a = run_hybrid(&circuit, &bits("0101"), 2, 400, 9).unwrap();
        let b = run_hybrid_parallel(&circuit, &bits("0101"), 2, 400, 9, 4).unwrap();
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(a.switch_pc, b.switch_pc);
    }
}
