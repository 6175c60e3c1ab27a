//! Interchangeable simulation engines behind a common trait, selected by
//! name at runtime.
//!
//! Three built-ins: `path` (single-trajectory path integral), `dense`
//! (sparse state-vector), and `hybrid` (dense up to a memory budget, then
//! path). New engines can be registered alongside them.

use std::collections::BTreeMap;

use crate::basis::BasisState;
use crate::circuit::Circuit;
use crate::dense::{sample_distribution, simulate_dense};
use crate::error::{Error, Result};
use crate::hybrid::run_hybrid_parallel;
use crate::path::{
    run_trajectory_with_rng, sample_parallel, shot_rng, EngineMetrics, InitialCondition,
    TraceRecord,
};

/// Everything an engine needs for one sampling run.
#[derive(Clone, Debug)]
pub struct RunRequest<'a> {
    pub circuit: &'a Circuit,
    pub input: BasisState,
    pub shots: u64,
    pub seed: u64,
    /// Worker threads for shot-level parallelism; 1 = sequential.
    pub jobs: usize,
    /// Dense-phase entry budget; required by the hybrid engine.
    pub mem_budget: Option<usize>,
    /// Record per-step trajectory traces (path engine only).
    pub trace: bool,
}

impl<'a> RunRequest<'a> {
    pub fn new(circuit: &'a Circuit, input: BasisState, shots: u64, seed: u64) -> Self {
        RunRequest {
            circuit,
            input,
            shots,
            seed,
            jobs: 1,
            mem_budget: None,
            trace: false,
        }
    }
}

/// Histogram, metrics, and engine-specific extras from one run.
#[derive(Clone, Debug, Default)]
pub struct EngineOutput {
    pub histogram: BTreeMap<BasisState, u64>,
    pub metrics: EngineMetrics,
    /// Hybrid only: gate index of the dense→path handoff.
    pub switch_pc: Option<usize>,
    /// Hybrid only: state-vector entries at the handoff.
    pub snapshot_size: Option<usize>,
    /// One `(shot, records)` entry per shot when tracing was requested.
    pub traces: Vec<(u64, Vec<TraceRecord>)>,
}

/// A simulation strategy: turns a run request into a histogram.
pub trait Engine: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, request: &RunRequest) -> Result<EngineOutput>;
}

/// The space-efficient single-trajectory engine.
pub struct PathEngine;

impl Engine for PathEngine {
    fn name(&self) -> &'static str {
        "path"
    }

    fn run(&self, request: &RunRequest) -> Result<EngineOutput> {
        let init = InitialCondition::SingleState(request.input.clone());
        if !request.trace {
            let outcome =
                sample_parallel(request.circuit, &init, request.shots, request.seed, request.jobs)?;
            return Ok(EngineOutput {
                histogram: outcome.histogram,
                metrics: outcome.metrics,
                ..EngineOutput::default()
            });
        }
        if request.shots == 0 {
            return Err(Error::InvalidShots);
        }
        let mut output = EngineOutput::default();
        for shot in 0..request.shots {
            let mut rng = shot_rng(request.seed, shot);
            let run = run_trajectory_with_rng(request.circuit, &init, &mut rng, true)?;
            *output.histogram.entry(run.state).or_insert(0) += 1;
            output.metrics.merge(&run.metrics);
            output.traces.push((shot, run.trace.unwrap_or_default()));
        }
        Ok(output)
    }
}

/// The conventional sparse state-vector engine.
pub struct DenseEngine;

impl Engine for DenseEngine {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn run(&self, request: &RunRequest) -> Result<EngineOutput> {
        let vector = simulate_dense(request.circuit, &request.input)?;
        let histogram = sample_distribution(&vector.distribution()?, request.shots, request.seed)?;
        Ok(EngineOutput {
            histogram,
            ..EngineOutput::default()
        })
    }
}

/// Dense until the memory budget would be exceeded, then path.
pub struct HybridEngine;

impl Engine for HybridEngine {
    fn name(&self) -> &'static str {
        "hybrid"
    }

    fn run(&self, request: &RunRequest) -> Result<EngineOutput> {
        let budget = request.mem_budget.ok_or(Error::BudgetRequired)?;
        let report = run_hybrid_parallel(
            request.circuit,
            &request.input,
            budget,
            request.shots,
            request.seed,
            request.jobs,
        )?;
        Ok(EngineOutput {
            histogram: report.histogram,
            metrics: report.metrics,
            switch_pc: Some(report.switch_pc),
            snapshot_size: Some(report.snapshot_size),
            traces: Vec::new(),
        })
    }
}

/// Name-keyed engine registry.
pub struct EngineRegistry {
    engines: Vec<Box<dyn Engine>>,
}

impl EngineRegistry {
    pub fn empty() -> Self {
        EngineRegistry { engines: Vec::new() }
    }

    /// Registry with the three built-in engines.
    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(PathEngine));
        registry.register(Box::new(DenseEngine));
        registry.register(Box::new(HybridEngine));
        registry
    }

    /// Add an engine, replacing any existing one with the same name.
    pub fn register(&mut self, engine: Box<dyn Engine>) {
        self.engines.retain(|e| e.name() != engine.name());
        self.engines.push(engine);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Engine> {
        self.engines
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.engines.iter().map(|e| e.name()).collect()
    }
}

impl Default for EngineRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}
