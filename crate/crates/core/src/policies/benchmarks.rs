//! Benchmark policies: always migrate, never migrate, lazy migrate and
//! predictive lazy migrate.

use crate::error::{Error, Result};
use crate::model::{latency_unchecked, migration_cost, Placement, Scenario, SlotObservation};

use super::PolicyConfig;

/// Always follow the user to its associated node.
pub fn am_decide(obs: &SlotObservation) -> Placement {
    Placement(obs.user_node)
}

/// Never move from the initial placement.
pub fn nm_decide(initial: Placement) -> Placement {
    initial
}

/// Lazy migration. Accumulates the latency lost by not following the user and
/// migrates once that loss reaches `lm_gamma` times the migration cost,
/// resetting the accumulator.
pub fn lm_decide(
    accumulated: f64,
    obs: &SlotObservation,
    prev: Placement,
    scn: &Scenario,
    cfg: &PolicyConfig,
) -> Result<(Placement, f64)> {
    if !(accumulated >= 0.0) {
        return Err(Error::NegativeInput { name: "lazy accumulator", value: accumulated });
    }
    scn.check_placement(prev)?;
    scn.validate_observation(obs)?;
    let nearest = Placement(obs.user_node);
    let gap = latency_unchecked(scn, obs, prev.node()) - latency_unchecked(scn, obs, nearest.node());
    let acc = accumulated + gap.max(0.0);
    if acc >= cfg.lm_gamma * migration_cost(obs, prev, nearest) {
        Ok((nearest, 0.0))
    } else {
        Ok((prev, acc))
    }
}

/// Two-slot latency savings of moving to the current nearest node now rather
/// than staying at `prev`, with the next slot evaluated on `predicted_next`.
pub fn plm_savings(obs: &SlotObservation, predicted_next: &SlotObservation, prev: Placement, scn: &Scenario) -> f64 {
    let near = obs.user_node;
    let stay = latency_unchecked(scn, obs, prev.node()) + latency_unchecked(scn, predicted_next, prev.node());
    let moved = latency_unchecked(scn, obs, near) + latency_unchecked(scn, predicted_next, near);
    stay - moved
}

/// Predictive lazy migration: move to the user's node only when the migration
/// cost is below `plm_weight` times the two-slot savings.
pub fn plm_decide(
    obs: &SlotObservation,
    predicted_next: &SlotObservation,
    prev: Placement,
    scn: &Scenario,
    cfg: &PolicyConfig,
) -> Result<Placement> {
    scn.check_placement(prev)?;
    scn.validate_observation(obs)?;
    scn.validate_observation(predicted_next)?;
    let near = Placement(obs.user_node);
    if prev == near {
        return Ok(prev);
    }
    let savings = plm_savings(obs, predicted_next, prev, scn);
    if migration_cost(obs, prev, near) < cfg.plm_weight * savings {
        Ok(near)
    } else {
        Ok(prev)
    }
}
