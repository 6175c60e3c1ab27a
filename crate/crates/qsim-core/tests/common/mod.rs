//! Shared helpers for integration tests: seeded random circuits in the
//! H/X/CNOT/CPHASE/custom-unitary family, and histogram comparisons.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsim_core::{gates, BasisState, Circuit, GateApplication, GateMatrix};

/// Random unitary built by Gram-Schmidt on a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, arity: usize, name: &str) -> GateMatrix {
    let dim = 1usize << arity;
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        let mut ok = true;
        for i in 0..dim {
            for j in 0..i {
                let proj: Complex64 = (0..dim).map(|k| cols[j][k].conj() * cols[i][k]).sum();
                for k in 0..dim {
                    let delta = proj * cols[j][k];
                    cols[i][k] -= delta;
                }
            }
            let norm: f64 = cols[i].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for k in 0..dim {
                cols[i][k] /= norm;
            }
        }
        if !ok {
            continue;
        }
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for (col, column) in cols.iter().enumerate() {
            for (row, value) in column.iter().enumerate() {
                entries[row * dim + col] = *value;
            }
        }
        if let Ok(gate) = GateMatrix::new(name, arity, entries) {
            return gate;
        }
    }
}

fn distinct_pair(rng: &mut ChaCha8Rng, width: usize) -> (usize, usize) {
    let a = rng.random_range(0..width);
    let mut b = rng.random_range(0..width);
    while b == a {
        b = rng.random_range(0..width);
    }
    (a, b)
}

/// Random circuit with gates drawn from
/// {H, X, CNOT, CPHASE(q≤3), random unitary of arity ≤ 2}, rejected until
/// the total branching work Σ log2(b_max) fits `branch_bit_cap`.
pub fn random_circuit(
    rng: &mut ChaCha8Rng,
    max_width: usize,
    max_gates: usize,
    branch_bit_cap: f64,
) -> Circuit {
    let mut unitary_counter = 0usize;
    loop {
        let width = rng.random_range(1..=max_width);
        let gate_count = rng.random_range(1..=max_gates);
        let mut apps = Vec::with_capacity(gate_count);
        for _ in 0..gate_count {
            let app = match rng.random_range(0..5u32) {
                0 => GateApplication::new(gates::hadamard(), vec![rng.random_range(0..width)]),
                1 => GateApplication::new(gates::pauli_x(), vec![rng.random_range(0..width)]),
                2 if width >= 2 => {
                    let (t, c) = distinct_pair(rng, width);
                    GateApplication::new(gates::cnot(), vec![t, c])
                }
                3 if width >= 2 => {
                    let (t, c) = distinct_pair(rng, width);
                    GateApplication::new(gates::cphase(rng.random_range(0..=3)), vec![t, c])
                }
                2 | 3 => GateApplication::new(
                    gates::phase(rng.random_range(0..=3)),
                    vec![rng.random_range(0..width)],
                ),
                _ => {
                    let arity = if width >= 2 && rng.random_bool(0.5) { 2 } else { 1 };
                    unitary_counter += 1;
                    let gate = random_unitary(rng, arity, &format!("U{unitary_counter}"));
                    if arity == 2 {
                        let (a, b) = distinct_pair(rng, width);
                        GateApplication::new(gate, vec![a, b])
                    } else {
                        GateApplication::new(gate, vec![rng.random_range(0..width)])
                    }
                }
            };
            apps.push(app.expect("operands are valid by construction"));
        }
        let circuit = Circuit::with_gates(width, apps).expect("valid circuit");
        let branch_bits: f64 = circuit
            .gates()
            .iter()
            .map(|g| (g.gate().max_branching_factor() as f64).log2())
            .sum();
        if branch_bits <= branch_bit_cap {
            return circuit;
        }
    }
}

/// Random basis input for a circuit.
pub fn random_input(rng: &mut ChaCha8Rng, circuit: &Circuit) -> BasisState {
    let mut state = BasisState::zeros(circuit.width()).unwrap();
    for q in 0..circuit.width() {
        state.set_bit(q, rng.random_bool(0.5));
    }
    state
}

/// Total-variation distance between a shot histogram and a probability map.
pub fn tv_distance(
    histogram: &BTreeMap<BasisState, u64>,
    shots: u64,
    expected: &BTreeMap<BasisState, f64>,
) -> f64 {
    let mut states: std::collections::BTreeSet<&BasisState> = histogram.keys().collect();
    states.extend(expected.keys());
    0.5 * states
        .into_iter()
        .map(|s| {
            let observed = *histogram.get(s).unwrap_or(&0) as f64 / shots as f64;
            let reference = *expected.get(s).unwrap_or(&0.0);
            (observed - reference).abs()
        })
        .sum::<f64>()
}

/// Total-variation distance between two shot histograms.
pub fn tv_between(
    a: &BTreeMap<BasisState, u64>,
    a_shots: u64,
    b: &BTreeMap<BasisState, u64>,
    b_shots: u64,
) -> f64 {
    let mut states: std::collections::BTreeSet<&BasisState> = a.keys().collect();
    states.extend(b.keys());
    0.5 * states
        .into_iter()
        .map(|s| {
            let pa = *a.get(s).unwrap_or(&0) as f64 / a_shots as f64;
            let pb = *b.get(s).unwrap_or(&0) as f64 / b_shots as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
}
