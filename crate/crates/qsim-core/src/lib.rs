//! Quantum circuit simulation with a space-efficient single-trajectory
//! path-integral engine, a sparse state-vector oracle, and a
//! memory-budgeted hybrid of the two.
//!
//! The path engine follows one classical basis state through the circuit,
//! recomputing neighbor amplitudes on demand by summing over configuration-
//! space paths instead of storing the 2^s state vector; its working set is
//! linear in circuit size. The dense engine is the conventional approach and
//! doubles as the correctness oracle. The hybrid engine runs dense until a
//! state-vector entry budget would be exceeded, freezes the vector, and
//! finishes with the path engine.
//!
//! ```
//! use qsim_core::{gates, BasisState, EngineRegistry, RunRequest};
//!
//! let circuit = gates::draper_adder(2).unwrap(); // adds 2-bit a and b
//! let input = BasisState::from_bitstring("0101").unwrap(); // b=01, a=01
//! let registry = EngineRegistry::with_builtins();
//! let engine = registry.get("path").unwrap();
//! let output = engine.run(&RunRequest::new(&circuit, input, 100, 7)).unwrap();
//! let sum = BasisState::from_bitstring("0110").unwrap(); // a = 1+1 = 2
//! assert_eq!(output.histogram.get(&sum), Some(&100));
//! ```

pub mod basis;
pub mod circuit;
pub mod dense;
pub mod engine;
pub mod error;
pub mod gate;
pub mod gates;
pub mod hybrid;
pub mod parse;
pub mod path;
pub mod report;

pub use basis::{BasisState, MAX_WIDTH};
pub use circuit::{Circuit, CircuitStats};
pub use dense::{sample_distribution, simulate_dense, SparseStateVector, PRUNE_THRESHOLD};
pub use engine::{DenseEngine, Engine, EngineOutput, EngineRegistry, HybridEngine, PathEngine, RunRequest};
pub use error::{Error, Result};
pub use gate::{GateApplication, GateMatrix, Triviality, EPS_ZERO, MAX_ARITY, UNITARY_TOL};
pub use hybrid::{run_hybrid, run_hybrid_parallel, HybridReport};
pub use parse::{parse_circuit, serialize_circuit, CircuitDocument, ParseError, ParseErrorKind};
pub use path::{
    block_inputs, calc_amp, final_amplitude, run_trajectory, sample, sample_parallel,
    EngineMetrics, InitialCondition, SampleOutcome, Snapshot, TraceRecord, TrajectoryRun,
    TrajectoryState,
};
pub use report::{format_result, OutputMode, ResultMetrics, RunResult};

/// Complex amplitude of a basis state.
pub type Amplitude = num_complex::Complex64;
