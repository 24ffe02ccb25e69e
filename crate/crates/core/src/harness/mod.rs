//! Simulation engine: scenario generation, the slot and frame loops, configs,
//! sweeps and CSV output.

pub mod config;
pub mod output;
pub mod scenario;
pub mod sim;
pub mod sweep;
pub mod verify;

pub use config::{ExperimentConfig, PolicySection, SweepAxis, SweepSpec, TraceSource};
pub use scenario::{generate_scenario, synthetic_trace, ScenarioParams, BUDGET_LARGE, BUDGET_LOW, BUDGET_MIDDLE};
pub use sim::{simulate, RunRecord, SlotRecord};
pub use sweep::{sweep, sweep_with_threads, SweepPoint};

/// Runs the configured policy once.
pub fn run(config: &ExperimentConfig) -> crate::Result<RunRecord> {
    config.run()
}
