use crate::error::{Error, Result};
use crate::model::{latency_unchecked, migration_cost, Placement, Scenario, SlotObservation};

use super::{argmin_lowest, PolicyConfig};

/// Per-node scores `V * H_i(t) + Q(t) * P_{prev,i}(t)`.
pub fn osp_scores(
    cfg: &PolicyConfig,
    q: f64,
    obs: &SlotObservation,
    prev: Placement,
    scn: &Scenario,
) -> Result<Vec<f64>> {
    if !(q >= 0.0) {
        return Err(Error::NegativeInput { name: "queue", value: q });
    }
    scn.check_placement(prev)?;
    scn.validate_observation(obs)?;
    Ok(scores_unchecked(cfg, q, obs, prev, scn))
}

pub(crate) fn scores_unchecked(
    cfg: &PolicyConfig,
    q: f64,
    obs: &SlotObservation,
    prev: Placement,
    scn: &Scenario,
) -> Vec<f64> {
    (0..scn.node_count)
        .map(|i| cfg.v * latency_unchecked(scn, obs, i) + q * migration_cost(obs, prev, Placement(i)))
        .collect()
}

/// One-slot placement: the node minimizing [`osp_scores`], lowest index on ties.
pub fn osp_decide(
    cfg: &PolicyConfig,
    q: f64,
    obs: &SlotObservation,
    prev: Placement,
    scn: &Scenario,
) -> Result<Placement> {
    let scores = osp_scores(cfg, q, obs, prev, scn)?;
    Ok(Placement(argmin_lowest(scores).0))
}
