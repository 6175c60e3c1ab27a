//! Single-trajectory path-integral engine.
//!
//! One run follows a single classical basis state through the circuit. At a
//! trivial gate the walker moves to its unique successor and picks up a
//! phase. At a nontrivial gate the amplitudes of every basis state in the
//! gate's operand block are needed; the walker's own amplitude is carried
//! along, and the neighbors' amplitudes are recomputed from scratch by
//! [`calc_amp`], which sums over paths back to the initial condition instead
//! of reading a stored state vector. The successor is then drawn from the
//! block's normalized output probabilities.
//!
//! The recursion is realized with an explicit frame stack. Each frame holds
//! a loop position, a local block index, and a 2^arity amplitude scratch
//! buffer, so peak memory is the frame stack (≤ one frame per gate) plus the
//! walker — linear in circuit size, never a function of 2^width.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::basis::BasisState;
use crate::circuit::Circuit;
use crate::dense::SparseStateVector;
use crate::error::{Error, Result};
use crate::gate::{GateApplication, EPS_ZERO};

/// Amplitudes with squared magnitude at or below this count as zero
/// probability when drawing a successor.
const EPS_ZERO_SQR: f64 = EPS_ZERO * EPS_ZERO;

/// Independent, reproducible random stream for one shot of one seed.
pub(crate) fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Counters instrumenting the engine's space and time behavior.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct EngineMetrics {
    /// Amplitude evaluations performed by the recursive path sum (one per
    /// node of the recursion tree, including base cases).
    pub calc_amp_calls: u64,
    /// Peak recursion depth in gate crossings; at most the gate count.
    pub max_depth: usize,
    /// Peak simultaneously-live recursion frames (nontrivial gates only).
    pub peak_frames: usize,
    /// Largest amplitude/probability buffer used, in elements; bounded by
    /// 2^arity ≤ 16 and never a function of 2^width.
    pub largest_alloc: usize,
}

impl EngineMetrics {
    #[inline]
    fn record_alloc(&mut self, elements: usize) {
        self.largest_alloc = self.largest_alloc.max(elements);
    }

    /// Combine metrics from independent shots: calls add, peaks take max.
    pub fn merge(&mut self, other: &EngineMetrics) {
        self.calc_amp_calls += other.calc_amp_calls;
        self.max_depth = self.max_depth.max(other.max_depth);
        self.peak_frames = self.peak_frames.max(other.peak_frames);
        self.largest_alloc = self.largest_alloc.max(other.largest_alloc);
    }
}

/// A frozen sparse state vector used as the starting point for the path
/// engine partway through a circuit.
#[derive(Clone, Debug)]
pub struct Snapshot {
    start_pc: usize,
    width: usize,
    lookup: HashMap<BasisState, Complex64>,
    // entries with non-negligible amplitude, sorted, with cumulative
    // probability for inverse-CDF start-state draws
    draw: Vec<(BasisState, Complex64, f64)>,
}

impl Snapshot {
    /// Freeze a state vector at gate index `start_pc`. The vector must be
    /// normalized within 1e-9.
    pub fn new(vector: &SparseStateVector, start_pc: usize) -> Result<Self> {
        let width = vector.width();
        let entries = vector.sorted_entries();
        if entries.is_empty() {
            return Err(Error::EmptyStateVector);
        }
        let total: f64 = entries.iter().map(|(_, a)| a.norm_sqr()).sum();
        if (total.sqrt() - 1.0).abs() > 1e-9 {
            return Err(Error::SnapshotNotNormalized(total.sqrt()));
        }
        let mut lookup = HashMap::with_capacity(entries.len());
        let mut draw = Vec::with_capacity(entries.len());
        let mut cumulative = 0.0;
        for (state, amp) in entries {
            if state.width() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    got: state.width(),
                });
            }
            lookup.insert(state.clone(), amp);
            if amp.norm_sqr() > EPS_ZERO_SQR {
                cumulative += amp.norm_sqr() / total;
                draw.push((state, amp, cumulative));
            }
        }
        Ok(Snapshot {
            start_pc,
            width,
            lookup,
            draw,
        })
    }

    pub fn start_pc(&self) -> usize {
        self.start_pc
    }

    pub fn len(&self) -> usize {
        self.lookup.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lookup.is_empty()
    }

    fn draw_start(&self, rng: &mut dyn RngCore) -> (BasisState, Complex64) {
        let u: f64 = rng.random();
        for (state, amp, cumulative) in &self.draw {
            if u <= *cumulative {
                return (state.clone(), *amp);
            }
        }
        let last = self.draw.last().expect("snapshot has a drawable entry");
        (last.0.clone(), last.1)
    }
}

/// Where a trajectory starts: a single basis state with amplitude 1 at the
/// beginning of the circuit, or a frozen state vector partway through.
#[derive(Clone, Debug)]
pub enum InitialCondition {
    SingleState(BasisState),
    Snapshot(Snapshot),
}

impl InitialCondition {
    pub fn start_pc(&self) -> usize {
        match self {
            InitialCondition::SingleState(_) => 0,
            InitialCondition::Snapshot(snap) => snap.start_pc,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            InitialCondition::SingleState(state) => state.width(),
            InitialCondition::Snapshot(snap) => snap.width,
        }
    }

    /// Amplitude of `state` at the start of the simulated region.
    fn base_amplitude(&self, state: &BasisState) -> Complex64 {
        match self {
            InitialCondition::SingleState(input) => {
                if input == state {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                }
            }
            InitialCondition::Snapshot(snap) => {
                snap.lookup.get(state).copied().unwrap_or(Complex64::ZERO)
            }
        }
    }

    fn draw_start(&self, rng: &mut dyn RngCore) -> (BasisState, Complex64) {
        match self {
            InitialCondition::SingleState(state) => (state.clone(), Complex64::ONE),
            InitialCondition::Snapshot(snap) => snap.draw_start(rng),
        }
    }

    fn check(&self, circuit: &Circuit) -> Result<()> {
        if self.width() != circuit.width() {
            return Err(Error::WidthMismatch {
                expected: circuit.width(),
                got: self.width(),
            });
        }
        if self.start_pc() > circuit.len() {
            return Err(Error::PcOutOfRange {
                pc: self.start_pc(),
                start: 0,
                end: circuit.len(),
            });
        }
        Ok(())
    }
}

/// One record per executed gate when tracing is enabled.
#[derive(Clone, Debug)]
pub struct TraceRecord {
    /// Index of the gate that was applied.
    pub pc: usize,
    /// Walker state after the gate.
    pub state: BasisState,
    /// Walker amplitude after the gate (unnormalized).
    pub amplitude: Complex64,
    /// Normalized probability of the branch that was taken (1 for trivial
    /// gates).
    pub chosen_probability: f64,
}

/// The walker: program counter, current basis state, current amplitude, and
/// an optional trace.
#[derive(Clone, Debug)]
pub struct TrajectoryState {
    pub pc: usize,
    pub state: BasisState,
    pub amplitude: Complex64,
    pub trace: Option<Vec<TraceRecord>>,
}

impl TrajectoryState {
    pub fn new(init: &InitialCondition, state: BasisState, amplitude: Complex64, record_trace: bool) -> Self {
        TrajectoryState {
            pc: init.start_pc(),
            state,
            amplitude,
            trace: record_trace.then(Vec::new),
        }
    }
}

/// Result of one completed trajectory.
#[derive(Clone, Debug)]
pub struct TrajectoryRun {
    pub state: BasisState,
    pub amplitude: Complex64,
    pub trace: Option<Vec<TraceRecord>>,
    pub metrics: EngineMetrics,
}

/// Histogram over final states plus merged metrics.
#[derive(Clone, Debug)]
pub struct SampleOutcome {
    pub histogram: BTreeMap<BasisState, u64>,
    pub metrics: EngineMetrics,
}

/// The 2^arity basis states agreeing with `state` everywhere off the gate's
/// operands, in local-index order; `state` itself is among them.
pub fn block_inputs(state: &BasisState, app: &GateApplication) -> Result<Vec<BasisState>> {
    let ops = app.operands();
    state.substate_index(ops)?; // validates operands
    let dim = app.gate().dim();
    Ok((0..dim)
        .map(|local| {
            let mut neighbor = state.clone();
            neighbor.set_substate_raw(ops, local);
            neighbor
        })
        .collect())
}

// One delta record per gate crossing: the walker's local block index before
// the crossing, so the mutation can be undone on return. Trivial crossings
// also carry the single matrix entry; branch crossings own a frame with the
// loop position and amplitude scratch buffer.
struct Crossing {
    out_local: u8,
    branch: bool,
    entry: Complex64,
}

struct Frame {
    next_input: usize,
    amps: [Complex64; 16],
}

/// Amplitude ⟨state|ψ_pc⟩ of `state` after applying gates
/// `[start_pc, pc)` to the initial condition, computed as a sum over paths.
///
/// At `pc = start_pc` this is the initial amplitude of `state`. Crossing a
/// trivial gate follows the unique predecessor and scales by the single
/// matrix entry; crossing a nontrivial gate recurses over all 2^arity block
/// inputs and takes the output row of the matrix-vector product.
pub fn calc_amp(
    circuit: &Circuit,
    init: &InitialCondition,
    pc: usize,
    state: &BasisState,
    metrics: &mut EngineMetrics,
) -> Result<Complex64> {
    init.check(circuit)?;
    let start = init.start_pc();
    if pc < start || pc > circuit.len() {
        return Err(Error::PcOutOfRange {
            pc,
            start,
            end: circuit.len(),
        });
    }
    if state.width() != circuit.width() {
        return Err(Error::WidthMismatch {
            expected: circuit.width(),
            got: state.width(),
        });
    }

    let gates = circuit.gates();
    // the walker is mutated in place on descent; every crossing leaves a
    // delta record so the mutation is undone on return
    let mut cur = state.clone();
    let mut level = pc;
    let mut crossings: Vec<Crossing> = Vec::new();
    let mut frames: Vec<Frame> = Vec::new();

    'eval: loop {
        // descend: evaluate the amplitude of `cur` at time `level`
        let mut value = loop {
            metrics.calc_amp_calls += 1;
            metrics.max_depth = metrics.max_depth.max(pc - level);
            debug_assert_eq!(crossings.len(), pc - level);
            if level == start {
                break init.base_amplitude(&cur);
            }
            let app = &gates[level - 1];
            let gate = app.gate();
            let ops = app.operands();
            let out_local = cur.substate_index_raw(ops);
            if gate.is_trivial() {
                let (col, entry) = gate
                    .single_predecessor(out_local)
                    .expect("trivial gate has a unique predecessor");
                crossings.push(Crossing {
                    out_local: out_local as u8,
                    branch: false,
                    entry,
                });
                cur.set_substate_raw(ops, col);
            } else {
                metrics.record_alloc(gate.dim());
                crossings.push(Crossing {
                    out_local: out_local as u8,
                    branch: true,
                    entry: Complex64::ZERO,
                });
                frames.push(Frame {
                    next_input: 0,
                    amps: [Complex64::ZERO; 16],
                });
                metrics.peak_frames = metrics.peak_frames.max(frames.len());
                cur.set_substate_raw(ops, 0);
            }
            level -= 1;
        };

        // return: fold the value upward, undoing one crossing at a time,
        // until a branch frame needs another block input
        loop {
            let Some(top) = crossings.last() else {
                return Ok(value);
            };
            // the gate crossed from level+1 down to level
            let app = &gates[level];
            let gate = app.gate();
            let ops = app.operands();
            if !top.branch {
                value *= top.entry;
                cur.set_substate_raw(ops, top.out_local as usize);
                level += 1;
                crossings.pop();
                continue;
            }
            let frame = frames.last_mut().expect("branch crossing has a frame");
            frame.amps[frame.next_input] = value;
            frame.next_input += 1;
            if frame.next_input < gate.dim() {
                cur.set_substate_raw(ops, frame.next_input);
                continue 'eval;
            }
            // block complete: output amplitude is one row of U * amps
            let row = top.out_local as usize;
            let mut out = Complex64::ZERO;
            for col in 0..gate.dim() {
                out += gate.entry(row, col) * frame.amps[col];
            }
            value = out;
            cur.set_substate_raw(ops, row);
            level += 1;
            frames.pop();
            crossings.pop();
        }
    }
}

/// Advance the walker across one gate.
///
/// Trivial gates update state and amplitude directly without consuming
/// randomness. Nontrivial gates assemble the block's input amplitudes
/// (reusing the walker's own, recomputing neighbors via [`calc_amp`]),
/// apply the gate matrix, and draw the successor from the normalized output
/// probabilities with a single uniform variate.
pub fn step(
    traj: &mut TrajectoryState,
    circuit: &Circuit,
    init: &InitialCondition,
    rng: &mut dyn RngCore,
    metrics: &mut EngineMetrics,
) -> Result<()> {
    let gates = circuit.gates();
    if traj.pc >= gates.len() {
        return Err(Error::PcOutOfRange {
            pc: traj.pc,
            start: init.start_pc(),
            end: gates.len(),
        });
    }
    let gate_pc = traj.pc;
    let app = &gates[gate_pc];
    let gate = app.gate();
    let ops = app.operands();
    let in_local = traj.state.substate_index_raw(ops);

    if gate.is_trivial() {
        let (out_local, entry) = gate
            .single_successor(in_local)
            .expect("trivial gate has a unique successor");
        traj.state.set_substate_raw(ops, out_local);
        traj.amplitude *= entry;
        traj.pc += 1;
        if let Some(trace) = traj.trace.as_mut() {
            trace.push(TraceRecord {
                pc: gate_pc,
                state: traj.state.clone(),
                amplitude: traj.amplitude,
                chosen_probability: 1.0,
            });
        }
        return Ok(());
    }

    let dim = gate.dim();
    metrics.record_alloc(dim);
    let mut in_amps = [Complex64::ZERO; 16];
    for (local, slot) in in_amps.iter_mut().enumerate().take(dim) {
        if local == in_local {
            *slot = traj.amplitude;
        } else {
            let mut neighbor = traj.state.clone();
            neighbor.set_substate_raw(ops, local);
            *slot = calc_amp(circuit, init, gate_pc, &neighbor, metrics)?;
        }
    }

    let mut out_amps = [Complex64::ZERO; 16];
    let mut total = 0.0;
    for (row, out) in out_amps.iter_mut().enumerate().take(dim) {
        let mut sum = Complex64::ZERO;
        for (col, amp) in in_amps.iter().enumerate().take(dim) {
            sum += gate.entry(row, col) * amp;
        }
        *out = sum;
        total += sum.norm_sqr();
    }

    if out_amps.iter().take(dim).all(|a| a.norm_sqr() < EPS_ZERO_SQR) {
        return Err(Error::CorruptedTrajectory { pc: gate_pc });
    }

    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut pick: Option<(usize, f64)> = None;
    for (row, out) in out_amps.iter().enumerate().take(dim) {
        let weight = out.norm_sqr();
        if weight <= EPS_ZERO_SQR {
            continue;
        }
        let p = weight / total;
        pick = Some((row, p));
        cumulative += p;
        if u <= cumulative {
            break;
        }
    }
    let (chosen, chosen_probability) = pick.expect("block has a drawable output");

    traj.state.set_substate_raw(ops, chosen);
    traj.amplitude = out_amps[chosen];
    traj.pc += 1;
    if let Some(trace) = traj.trace.as_mut() {
        trace.push(TraceRecord {
            pc: gate_pc,
            state: traj.state.clone(),
            amplitude: traj.amplitude,
            chosen_probability,
        });
    }
    Ok(())
}

pub(crate) fn run_trajectory_with_rng(
    circuit: &Circuit,
    init: &InitialCondition,
    rng: &mut dyn RngCore,
    record_trace: bool,
) -> Result<TrajectoryRun> {
    init.check(circuit)?;
    let mut metrics = EngineMetrics::default();
    let (state, amplitude) = init.draw_start(rng);
    let mut traj = TrajectoryState::new(init, state, amplitude, record_trace);
    while traj.pc < circuit.len() {
        step(&mut traj, circuit, init, rng, &mut metrics)?;
    }
    Ok(TrajectoryRun {
        state: traj.state,
        amplitude: traj.amplitude,
        trace: traj.trace,
        metrics,
    })
}

/// Run one complete trajectory from the initial condition with a fresh
/// random stream derived from `seed`. Identical inputs give identical runs.
pub fn run_trajectory(
    circuit: &Circuit,
    init: &InitialCondition,
    seed: u64,
    record_trace: bool,
) -> Result<TrajectoryRun> {
    let mut rng = shot_rng(seed, 0);
    run_trajectory_with_rng(circuit, init, &mut rng, record_trace)
}

/// Run `shots` independent trajectories, shot `i` on a stream derived from
/// `(seed, i)`, and histogram the final states.
pub fn sample(
    circuit: &Circuit,
    init: &InitialCondition,
    shots: u64,
    seed: u64,
) -> Result<SampleOutcome> {
    sample_parallel(circuit, init, shots, seed, 1)
}

/// [`sample`] with shots distributed over `jobs` worker threads. The
/// per-shot streams make the merged histogram independent of scheduling.
pub fn sample_parallel(
    circuit: &Circuit,
    init: &InitialCondition,
    shots: u64,
    seed: u64,
    jobs: usize,
) -> Result<SampleOutcome> {
    if shots == 0 {
        return Err(Error::InvalidShots);
    }
    init.check(circuit)?;
    let run_shot = |shot: u64| -> Result<(BasisState, EngineMetrics)> {
        let mut rng = shot_rng(seed, shot);
        let run = run_trajectory_with_rng(circuit, init, &mut rng, false)?;
        Ok((run.state, run.metrics))
    };
    let results: Result<Vec<(BasisState, EngineMetrics)>> = if jobs <= 1 {
        (0..shots).map(run_shot).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("worker pool");
        pool.install(|| (0..shots).into_par_iter().map(run_shot).collect())
    };
    let mut histogram = BTreeMap::new();
    let mut metrics = EngineMetrics::default();
    for (state, shot_metrics) in results? {
        *histogram.entry(state).or_insert(0) += 1;
        metrics.merge(&shot_metrics);
    }
    Ok(SampleOutcome { histogram, metrics })
}

/// Amplitude of `target` after the whole circuit, by path summation.
pub fn final_amplitude(
    circuit: &Circuit,
    init: &InitialCondition,
    target: &BasisState,
) -> Result<Complex64> {
    let mut metrics = EngineMetrics::default();
    calc_amp(circuit, init, circuit.len(), target, &mut metrics)
}
