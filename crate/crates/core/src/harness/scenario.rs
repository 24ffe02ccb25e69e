//! Synthetic scenarios and mobility traces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Scenario, SlotObservation, MEGABYTES_PER_GIGABYTE};
use crate::predict::MobilityTrace;

/// Long-term budget presets in cost units per slot.
pub const BUDGET_LOW: f64 = 167.0;
pub const BUDGET_MIDDLE: f64 = 260.0;
pub const BUDGET_LARGE: f64 = 417.0;

/// Inclusive `[low, high]` range for a uniformly drawn quantity.
pub type Range = [f64; 2];

/// Generator parameters. Per-slot task quantities and per-node compute
/// capacities are drawn uniformly from their ranges every slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub node_count: usize,
    pub horizon: usize,
    pub frame_len: usize,
    pub budget_avg: f64,
    /// Rate of every inter-node link in Mbps, unless `backhaul_matrix` is set.
    pub backhaul_mbps: f64,
    pub backhaul_matrix: Option<Vec<Vec<f64>>>,
    /// Bits per second per hertz used to turn cellular bandwidth into a data rate.
    pub spectral_efficiency: f64,
    pub input_size_mb: Range,
    pub workload_gcycles: Range,
    pub cellular_bandwidth_mhz: Range,
    pub compute_capacity_ghz: Range,
    pub container_size_mb: Range,
    /// Migration price in dollars per GB.
    pub unit_cost_per_gb: Range,
    /// Cost units per dollar; one cost unit is a thousandth of a dollar by default.
    pub cost_units_per_dollar: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            node_count: 6,
            horizon: 1400,
            frame_len: 3,
            budget_avg: BUDGET_LOW,
            backhaul_mbps: 20.0,
            backhaul_matrix: None,
            spectral_efficiency: 1.0,
            input_size_mb: [5.0, 10.0],
            workload_gcycles: [2.0, 20.0],
            cellular_bandwidth_mhz: [5.0, 10.0],
            compute_capacity_ghz: [5.0, 10.0],
            container_size_mb: [25.0, 50.0],
            unit_cost_per_gb: [2.0, 10.0],
            cost_units_per_dollar: 1000.0,
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        let ranges = [
            ("input_size_mb", self.input_size_mb, true),
            ("workload_gcycles", self.workload_gcycles, false),
            ("cellular_bandwidth_mhz", self.cellular_bandwidth_mhz, true),
            ("compute_capacity_ghz", self.compute_capacity_ghz, true),
            ("container_size_mb", self.container_size_mb, true),
            ("unit_cost_per_gb", self.unit_cost_per_gb, true),
        ];
        for (name, [lo, hi], strict) in ranges {
            let low_ok = if strict { lo > 0.0 } else { lo >= 0.0 };
            if !(low_ok && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidScenario(format!("{name} range [{lo}, {hi}] is invalid")));
            }
        }
        if !(self.spectral_efficiency > 0.0) {
            return Err(Error::InvalidScenario("spectral_efficiency must be > 0".into()));
        }
        if !(self.cost_units_per_dollar > 0.0) {
            return Err(Error::InvalidScenario("cost_units_per_dollar must be > 0".into()));
        }
        self.scenario().map(|_| ())
    }

    /// The static part of the scenario.
    pub fn scenario(&self) -> Result<Scenario> {
        let mut scn =
            Scenario::uniform(self.node_count, self.backhaul_mbps, self.budget_avg, self.horizon, self.frame_len)?;
        if let Some(matrix) = &self.backhaul_matrix {
            scn.backhaul_rate = matrix.clone();
            scn.validate()?;
        }
        Ok(scn)
    }

    /// Largest migration cost any generated slot can produce, in cost units.
    pub fn max_migration_cost(&self) -> f64 {
        self.container_size_mb[1] / MEGABYTES_PER_GIGABYTE * self.unit_cost_per_gb[1] * self.cost_units_per_dollar
    }
}

fn draw(rng: &mut ChaCha8Rng, [lo, hi]: Range) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Draws the per-slot observation stream for `params.horizon` slots, with the
/// user's node taken from `trace`. Deterministic in `seed`.
pub fn generate_scenario(
    params: &ScenarioParams,
    trace: &MobilityTrace,
    seed: u64,
) -> Result<(Scenario, Vec<SlotObservation>)> {
    params.validate()?;
    let scn = params.scenario()?;
    trace.validate(scn.node_count, scn.horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let observations = (0..scn.horizon)
        .map(|slot| {
            let input_size = draw(&mut rng, params.input_size_mb);
            let workload = draw(&mut rng, params.workload_gcycles);
            let access_rate = draw(&mut rng, params.cellular_bandwidth_mhz) * params.spectral_efficiency;
            let compute_capacity = (0..scn.node_count).map(|_| draw(&mut rng, params.compute_capacity_ghz)).collect();
            let container_size = draw(&mut rng, params.container_size_mb);
            let unit_migration_cost = draw(&mut rng, params.unit_cost_per_gb) * params.cost_units_per_dollar;
            SlotObservation {
                slot,
                user_node: trace.regions[slot],
                input_size,
                workload,
                access_rate,
                compute_capacity,
                container_size,
                unit_migration_cost,
            }
        })
        .collect();
    Ok((scn, observations))
}

/// First-order Markov mobility: stay with probability `stickiness`, otherwise
/// jump to a uniformly chosen different region. The start region is uniform.
pub fn synthetic_trace(seed: u64, n_regions: usize, length: usize, stickiness: f64) -> Result<MobilityTrace> {
    if n_regions == 0 {
        return Err(Error::Trace("n_regions must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&stickiness) {
        return Err(Error::Trace(format!("stickiness must lie in [0, 1], got {stickiness}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut regions = Vec::with_capacity(length);
    if length == 0 {
        return Ok(MobilityTrace::new(regions));
    }
    let mut cur = rng.gen_range(0..n_regions);
    regions.push(cur);
    for _ in 1..length {
        if n_regions > 1 && !rng.gen_bool(stickiness) {
            let draw = rng.gen_range(0..n_regions - 1);
            cur = if draw >= cur { draw + 1 } else { draw };
        }
        regions.push(cur);
    }
    Ok(MobilityTrace::new(regions))
}
