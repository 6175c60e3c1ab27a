//! Constructors for the built-in gate set and builders for the QFT and the
//! Draper phase-space adder.
//!
//! Gate names double as the serialization vocabulary of the text circuit
//! format: `H`, `X`, `CNOT`, `CCNOT`, `SWAP`, `PHASE(q)`, `CPHASE(q)`, and
//! the conjugated variants `PHASEDG(q)` / `CPHASEDG(q)` produced by gate
//! inversion.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{GateApplication, GateMatrix, MAX_ARITY};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The Hadamard transform, `[1, 1; 1, -1]/√2`.
pub fn hadamard() -> GateMatrix {
    let h = FRAC_1_SQRT_2;
    GateMatrix::new("H", 1, vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
        .expect("H is unitary")
}

/// Pauli X (bit flip).
pub fn pauli_x() -> GateMatrix {
    GateMatrix::new(
        "X",
        1,
        vec![Complex64::ZERO, Complex64::ONE, Complex64::ONE, Complex64::ZERO],
    )
    .expect("X is unitary")
}

fn permutation_gate(name: &str, arity: usize, image: &[usize]) -> GateMatrix {
    let dim = 1usize << arity;
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for (col, &row) in image.iter().enumerate() {
        entries[row * dim + col] = Complex64::ONE;
    }
    GateMatrix::new(name, arity, entries).expect("permutation matrices are unitary")
}

/// CNOT with target = operand 0, control = operand 1.
pub fn cnot() -> GateMatrix {
    permutation_gate("CNOT", 2, &[0, 1, 3, 2])
}

/// Toffoli with target = operand 0, controls = operands 1 and 2.
pub fn ccnot() -> GateMatrix {
    permutation_gate("CCNOT", 3, &[0, 1, 2, 3, 4, 5, 7, 6])
}

/// Exchange of operands 0 and 1.
pub fn swap() -> GateMatrix {
    permutation_gate("SWAP", 2, &[0, 2, 1, 3])
}

/// Look up one of the classical permutation gates by name
/// (case-insensitive): X, CNOT, CCNOT, SWAP.
pub fn standard_gate(name: &str) -> Result<GateMatrix> {
    match name.to_ascii_uppercase().as_str() {
        "X" => Ok(pauli_x()),
        "CNOT" => Ok(cnot()),
        "CCNOT" => Ok(ccnot()),
        "SWAP" => Ok(swap()),
        _ => Err(Error::UnknownGate(name.to_string())),
    }
}

fn phase_factor(q: u32) -> Complex64 {
    Complex64::from_polar(1.0, PI * 0.5f64.powi(q as i32))
}

/// Single-qubit relative phase of `1/2^q` of a half-circle:
/// `diag(1, exp(iπ·2^−q))`. `phase(0)` is Pauli Z, `phase(1)` is S.
pub fn phase(q: u32) -> GateMatrix {
    GateMatrix::new(
        format!("PHASE({q})"),
        1,
        vec![Complex64::ONE, Complex64::ZERO, Complex64::ZERO, phase_factor(q)],
    )
    .expect("phase gates are unitary")
}

/// Conjugate of [`phase`]: `diag(1, exp(−iπ·2^−q))`.
pub fn phase_dg(q: u32) -> GateMatrix {
    phase(q).dagger()
}

/// Controlled phase `diag(1, 1, 1, exp(iπ·2^−q))`, target = operand 0,
/// control = operand 1 (the matrix is symmetric in the two roles).
pub fn cphase(q: u32) -> GateMatrix {
    let mut entries = vec![Complex64::ZERO; 16];
    for i in 0..4 {
        entries[i * 4 + i] = Complex64::ONE;
    }
    entries[15] = phase_factor(q);
    GateMatrix::new(format!("CPHASE({q})"), 2, entries).expect("cphase gates are unitary")
}

/// Conjugate of [`cphase`]: `diag(1, 1, 1, exp(−iπ·2^−q))`.
pub fn cphase_dg(q: u32) -> GateMatrix {
    cphase(q).dagger()
}

/// Conjugate transpose of any gate. `inverse(inverse(g)) = g`.
pub fn inverse(gate: &GateMatrix) -> GateMatrix {
    gate.dagger()
}

/// Embed `gate` in an identity block controlled on `controls` extra qubits:
/// target bits are the low operands, controls the high ones. The result acts
/// as `gate` exactly when every control bit is 1.
pub fn controlled(gate: &GateMatrix, controls: usize) -> Result<GateMatrix> {
    let arity = gate.arity() + controls;
    if controls == 0 || arity > MAX_ARITY {
        return Err(Error::InvalidArity(arity));
    }
    let dim = 1usize << arity;
    let inner = gate.dim();
    let active = dim - inner; // block where all control bits are set
    let mut entries = vec![Complex64::ZERO; dim * dim];
    for i in 0..active {
        entries[i * dim + i] = Complex64::ONE;
    }
    for row in 0..inner {
        for col in 0..inner {
            entries[(active + row) * dim + (active + col)] = gate.entry(row, col);
        }
    }
    GateMatrix::new(format!("C{}[{}]", controls, gate.name()), arity, entries)
}

/// Quantum Fourier transform gate sequence over `qubits`, listed
/// most-significant-first, without terminal swaps. The 1-qubit QFT is a
/// single Hadamard.
pub fn qft_gates(qubits: &[usize]) -> Result<Vec<GateApplication>> {
    if qubits.is_empty() {
        return Err(Error::EmptyOperands);
    }
    for (i, &q) in qubits.iter().enumerate() {
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateOperand(q));
        }
    }
    let n = qubits.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        out.push(GateApplication::new(hadamard(), vec![qubits[i]])?);
        for j in i + 1..n {
            // rotation shrinks with distance from the target wire
            out.push(GateApplication::new(
                cphase((j - i) as u32),
                vec![qubits[i], qubits[j]],
            )?);
        }
    }
    Ok(out)
}

/// Gate-wise inverse of [`qft_gates`] in reverse order.
pub fn inverse_qft_gates(qubits: &[usize]) -> Result<Vec<GateApplication>> {
    let forward = qft_gates(qubits)?;
    forward
        .into_iter()
        .rev()
        .map(|app| GateApplication::new(app.gate().dagger(), app.operands().to_vec()))
        .collect()
}

/// In-place modular adder on two `n`-bit registers: qubits `0..n` hold `a`,
/// qubits `n..2n` hold `b`, and the circuit maps `|a⟩|b⟩` to
/// `|(a+b) mod 2^n⟩|b⟩` with probability 1. QFT on `a`, a controlled-phase
/// ladder with controls in `b`, then the inverse QFT.
pub fn draper_adder(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidWidth(0));
    }
    let mut circuit = Circuit::new(2 * n)?;
    let a_msb_first: Vec<usize> = (0..n).rev().collect();

    for app in qft_gates(&a_msb_first)? {
        circuit.push(app)?;
    }
    // after the QFT, qubit p of `a` carries the phase e^{2πi·a/2^{p+1}};
    // bit j of `b` must add e^{2πi·2^j/2^{p+1}} = e^{iπ/2^{p−j}} to it
    for p in (0..n).rev() {
        for j in 0..=p {
            circuit.push(GateApplication::new(
                cphase((p - j) as u32),
                vec![p, n + j],
            )?)?;
        }
    }
    for app in inverse_qft_gates(&a_msb_first)? {
        circuit.push(app)?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::simulate_dense;
    use crate::BasisState;

    #[test]
    fn hadamard_entries() {
        let h = hadamard();
        let v = FRAC_1_SQRT_2;
        assert!((h.entry(0, 0).re - v).abs() < 1e-15);
        assert!((h.entry(0, 1).re - v).abs() < 1e-15);
        assert!((h.entry(1, 0).re - v).abs() < 1e-15);
        assert!((h.entry(1, 1).re + v).abs() < 1e-15);
        assert!(h.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn hadamard_self_inverse() {
        let h = hadamard();
        for row in 0..2 {
            for col in 0..2 {
                let mut prod = Complex64::ZERO;
                for k in 0..2 {
                    prod += h.entry(row, k) * h.entry(k, col);
                }
                let expected = if row == col { 1.0 } else { 0.0 };
                assert!((prod - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn cphase_entries() {
        let cp1 = cphase(1);
        assert!((cp1.entry(3, 3) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let cp0 = cphase(0);
        assert!((cp0.entry(3, 3) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        for g in [cphase(0), cphase(1), cphase(5)] {
            assert!(g.is_trivial());
        }
    }

    #[test]
    fn phase_entries() {
        assert!((phase(0).entry(1, 1) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((phase(1).entry(1, 1) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(phase(3).is_trivial());
    }

    #[test]
    fn standard_gate_lookup() {
        let x = standard_gate("x").unwrap();
        assert!((x.entry(0, 1) - Complex64::ONE).norm() < 1e-15);
        assert!((x.entry(1, 0) - Complex64::ONE).norm() < 1e-15);
        // CNOT swaps local |10⟩ and |11⟩ (control = operand 1)
        let cx = standard_gate("CNOT").unwrap();
        assert!((cx.entry(3, 2) - Complex64::ONE).norm() < 1e-15);
        assert!((cx.entry(2, 3) - Complex64::ONE).norm() < 1e-15);
        assert!(standard_gate("FOO").is_err());
        for name in ["X", "CNOT", "CCNOT", "SWAP"] {
            assert!(standard_gate(name).unwrap().is_trivial(), "{name}");
        }
    }

    #[test]
    fn inverse_examples() {
        let inv = inverse(&cphase(1));
        assert!((inv.entry(3, 3) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(inverse(&hadamard()).max_entry_distance(&hadamard()), 0.0);
        let g = controlled(&hadamard(), 1).unwrap();
        assert!(inverse(&inverse(&g)).max_entry_distance(&g) < 1e-15);
    }

    #[test]
    fn qft_small_cases() {
        assert_eq!(qft_gates(&[0]).unwrap().len(), 1);
        assert_eq!(qft_gates(&[0]).unwrap()[0].gate().name(), "H");
        let two = qft_gates(&[1, 0]).unwrap();
        assert_eq!(two.len(), 3);
        let h_count = two.iter().filter(|a| a.gate().name() == "H").count();
        assert_eq!(h_count, 2);
        assert!(matches!(qft_gates(&[1, 1]), Err(Error::DuplicateOperand(1))));
        assert!(matches!(qft_gates(&[]), Err(Error::EmptyOperands)));
    }

    #[test]
    fn qft_times_inverse_is_identity() {
        for n in 1..=3usize {
            let qubits: Vec<usize> = (0..n).rev().collect();
            let mut gates = qft_gates(&qubits).unwrap();
            gates.extend(inverse_qft_gates(&qubits).unwrap());
            let circuit = Circuit::with_gates(n, gates).unwrap();
            for value in 0..1u64 << n {
                let input = BasisState::from_value(n, value).unwrap();
                let sv = simulate_dense(&circuit, &input).unwrap();
                let amp = sv.amplitude(&input);
                assert!(
                    (amp - Complex64::ONE).norm() < 1e-9,
                    "n={n} value={value} amp={amp}"
                );
            }
        }
    }

    #[test]
    fn draper_n2_structure() {
        let circuit = draper_adder(2).unwrap();
        assert_eq!(circuit.width(), 4);
        assert_eq!(circuit.len(), 9);
        let names: Vec<&str> = circuit.gates().iter().map(|g| g.gate().name()).collect();
        let h_count = names.iter().filter(|n| **n == "H").count();
        assert_eq!(h_count, 4);
        assert_eq!(names.len() - h_count, 5); // the cphase family
        assert_eq!(*names.last().unwrap(), "H");
    }

    #[test]
    fn draper_one_plus_one() {
        let circuit = draper_adder(2).unwrap();
        let input = BasisState::from_bitstring("0101").unwrap(); // b=01, a=01
        let sv = simulate_dense(&circuit, &input).unwrap();
        let expected = BasisState::from_bitstring("0110").unwrap(); // b=01, a=10
        assert!(sv.amplitude(&expected).norm_sqr() > 1.0 - 1e-9);
    }

    #[test]
    fn draper_three_plus_two_mod_four() {
        let circuit = draper_adder(2).unwrap();
        let input = BasisState::from_bitstring("1011").unwrap(); // b=10, a=11
        let sv = simulate_dense(&circuit, &input).unwrap();
        let expected = BasisState::from_bitstring("1001").unwrap(); // b=10, a=01
        assert!(sv.amplitude(&expected).norm_sqr() > 1.0 - 1e-9);
    }

    #[test]
    fn draper_identity_when_b_zero() {
        let circuit = draper_adder(2).unwrap();
        for a in 0..4u64 {
            let input = BasisState::from_value(4, a).unwrap();
            let sv = simulate_dense(&circuit, &input).unwrap();
            assert!(sv.amplitude(&input).norm_sqr() > 1.0 - 1e-9, "a={a}");
        }
    }

    #[test]
    fn draper_exhaustive_small() {
        for n in 1..=3usize {
            let circuit = draper_adder(n).unwrap();
            let mask = (1u64 << n) - 1;
            for value in 0..1u64 << (2 * n) {
                let a = value & mask;
                let b = value >> n;
                let input = BasisState::from_value(2 * n, value).unwrap();
                let sv = simulate_dense(&circuit, &input).unwrap();
                let expected_value = ((a + b) & mask) | (b << n);
                let expected = BasisState::from_value(2 * n, expected_value).unwrap();
                assert!(
                    sv.amplitude(&expected).norm_sqr() >= 1.0 - 1e-9,
                    "n={n} a={a} b={b}"
                );
            }
        }
    }

    #[test]
    fn controlled_rejects_oversized() {
        assert!(controlled(&cnot(), 3).is_err());
        assert!(controlled(&hadamard(), 3).is_ok());
    }
}
