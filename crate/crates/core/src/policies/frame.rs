//! Frame-level predictive placement as a shortest path over a layered graph.
//!
//! Layer `s` of the graph holds one vertex per node for slot `kT + s`. The edge
//! from node `j` in layer `s - 1` to node `i` in layer `s` weighs
//!
//! ```text
//! anchor * (P_ji(s) - E_avg + theta * (len - s)) + V * H_i(s)
//! ```
//!
//! and the first layer is entered from the previous slot's placement. Because
//! the graph is a DAG ordered by slot, a forward relaxation layer by layer
//! finds the shortest path in `O(N^2 T)`.

use crate::error::{Error, Result};
use crate::model::{latency_unchecked, migration_cost, Placement, Scenario};

use super::{argmin_lowest, FrameInput, PolicyConfig};

/// Decisions for every slot of a frame together with the objective they attain.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePlan {
    pub placements: Vec<Placement>,
    /// Frame objective, constant per-slot terms included.
    pub objective: f64,
    /// Edge weight contributed by each slot along the chosen path.
    pub slot_terms: Vec<f64>,
}

pub(crate) fn validate_frame(frame: &FrameInput, scn: &Scenario, e_avg: f64) -> Result<()> {
    if frame.slots.is_empty() {
        return Err(Error::InvalidPolicyConfig("frame has no slots".into()));
    }
    if frame.slots.len() > scn.frame_len {
        return Err(Error::InvalidPolicyConfig(format!(
            "frame has {} slots, frame length is {}",
            frame.slots.len(),
            scn.frame_len
        )));
    }
    if !(e_avg >= 0.0) {
        return Err(Error::NegativeInput { name: "budget", value: e_avg });
    }
    if !frame.q_anchor.is_finite() {
        return Err(Error::InvalidPolicyConfig(format!("frame anchor must be finite, got {}", frame.q_anchor)));
    }
    scn.check_placement(frame.prev_placement)?;
    frame.slots.iter().try_for_each(|o| scn.validate_observation(o))
}

#[inline]
pub(crate) fn edge_weight(cfg: &PolicyConfig, anchor: f64, e_avg: f64, remaining: f64, cost: f64, latency: f64) -> f64 {
    anchor * (cost - e_avg + cfg.theta * remaining) + cfg.v * latency
}

pub(crate) fn solve_frame(cfg: &PolicyConfig, frame: &FrameInput, scn: &Scenario, e_avg: f64) -> FramePlan {
    let n = scn.node_count;
    let len = frame.slots.len();
    let anchor = frame.q_anchor;

    let latency: Vec<Vec<f64>> =
        frame.slots.iter().map(|obs| (0..n).map(|i| latency_unchecked(scn, obs, i)).collect()).collect();

    // cost-so-far per terminal node and the predecessor table for path recovery
    let first = &frame.slots[0];
    let mut dist: Vec<f64> = (0..n)
        .map(|i| {
            let cost = migration_cost(first, frame.prev_placement, Placement(i));
            edge_weight(cfg, anchor, e_avg, frame.remaining(0), cost, latency[0][i])
        })
        .collect();
    let mut pred: Vec<Vec<usize>> = Vec::with_capacity(len);
    pred.push(vec![frame.prev_placement.node(); n]);

    for s in 1..len {
        let obs = &frame.slots[s];
        let remaining = frame.remaining(s);
        let mut next = Vec::with_capacity(n);
        let mut from = Vec::with_capacity(n);
        for i in 0..n {
            let (j, d) = argmin_lowest((0..n).map(|j| {
                let cost = migration_cost(obs, Placement(j), Placement(i));
                dist[j] + edge_weight(cfg, anchor, e_avg, remaining, cost, latency[s][i])
            }));
            next.push(d);
            from.push(j);
        }
        dist = next;
        pred.push(from);
    }

    let (mut node, objective) = argmin_lowest(dist.iter().copied());
    let mut nodes = vec![0usize; len];
    for s in (0..len).rev() {
        nodes[s] = node;
        node = pred[s][node];
    }

    let mut slot_terms = Vec::with_capacity(len);
    let mut before = frame.prev_placement;
    for (s, &i) in nodes.iter().enumerate() {
        let cost = migration_cost(&frame.slots[s], before, Placement(i));
        slot_terms.push(edge_weight(cfg, anchor, e_avg, frame.remaining(s), cost, latency[s][i]));
        before = Placement(i);
    }

    FramePlan { placements: nodes.into_iter().map(Placement).collect(), objective, slot_terms }
}

/// Queue-anchored frame plan. `frame.q_anchor` is the backlog at the frame start
/// and must be nonnegative.
pub fn psp_frame_decide(cfg: &PolicyConfig, frame: &FrameInput, scn: &Scenario, e_avg: f64) -> Result<FramePlan> {
    if !(frame.q_anchor >= 0.0) {
        return Err(Error::NegativeInput { name: "queue anchor", value: frame.q_anchor });
    }
    validate_frame(frame, scn, e_avg)?;
    Ok(solve_frame(cfg, frame, scn, e_avg))
}

/// Weight-anchored frame plan. Identical search with `frame.q_anchor` holding
/// the weight, which may be negative.
pub fn pspwu_frame_decide(cfg: &PolicyConfig, frame: &FrameInput, scn: &Scenario, e_avg: f64) -> Result<FramePlan> {
    validate_frame(frame, scn, e_avg)?;
    Ok(solve_frame(cfg, frame, scn, e_avg))
}
