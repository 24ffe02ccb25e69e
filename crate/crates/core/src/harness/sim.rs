//! The time-slotted simulation loop.
//!
//! Reactive policies decide slot by slot. The frame-based policies predict the
//! user's next `T - 1` locations at each frame start, commit a plan for the
//! whole frame, then play it out against the true observations. Metrics are
//! always computed from the true observations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{migration_cost, slot_outcome, Placement, Scenario, SlotObservation, MEGABYTES_PER_GIGABYTE};
use crate::policies::frame::solve_frame;
use crate::policies::online::scores_unchecked;
use crate::policies::{
    am_decide, argmin_lowest, lm_decide, nm_decide, plm_decide, FrameInput, PolicyConfig, PolicyKind,
};
use crate::predict::{Predictor, PredictorSpec};
use crate::queue::{max_queue_step, telescoped_budget_holds, CostQueueState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotRecord {
    pub t: usize,
    pub placement: Placement,
    /// Realized latency in seconds.
    pub latency: f64,
    /// Realized migration cost.
    pub cost: f64,
    /// Queue backlog at the start of the slot.
    pub q: f64,
    /// Weight at the start of the slot; equals `q` for every policy but PSP-WU.
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub policy: PolicyKind,
    pub budget_avg: f64,
    pub frame_len: usize,
    pub per_slot: Vec<SlotRecord>,
    pub avg_latency: f64,
    pub avg_cost: f64,
    pub avg_queue: f64,
    pub final_queue: f64,
    pub total_cost: f64,
    /// Frames whose weight anchor was negative (PSP-WU only).
    pub negative_w_frames: usize,
    /// Largest `|Q(tau) - Q(kT)|` seen inside any frame of length `frame_len`.
    pub max_frame_deviation: f64,
    /// Largest migration cost the observation stream admits.
    pub e_max_theoretical: f64,
    /// Largest migration cost actually incurred.
    pub e_max_observed: f64,
}

impl RunRecord {
    pub fn horizon(&self) -> usize {
        self.per_slot.len()
    }

    /// `sum E(t) <= T * E_avg + Q(T)`, which the queue recursion guarantees.
    pub fn budget_holds(&self) -> bool {
        telescoped_budget_holds(self.per_slot.iter().map(|s| s.cost), self.horizon(), self.budget_avg, self.final_queue)
    }

    /// `T * max(E_avg, E_max)`.
    pub fn frame_deviation_bound(&self) -> f64 {
        self.frame_len as f64 * max_queue_step(self.budget_avg, self.e_max_theoretical)
    }

    pub fn frame_bound_holds(&self) -> bool {
        self.max_frame_deviation <= self.frame_deviation_bound()
    }

    pub fn placements(&self) -> Vec<Placement> {
        self.per_slot.iter().map(|s| s.placement).collect()
    }
}

/// Largest migration cost over the stream: max container size times max unit cost.
pub fn stream_max_migration_cost(observations: &[SlotObservation]) -> f64 {
    let size = observations.iter().map(|o| o.container_size).fold(0.0, f64::max);
    let price = observations.iter().map(|o| o.unit_migration_cost).fold(0.0, f64::max);
    size / MEGABYTES_PER_GIGABYTE * price
}

struct Accumulator {
    per_slot: Vec<SlotRecord>,
    state: CostQueueState,
    e_avg: f64,
    frame_len: usize,
    frame_start_q: f64,
    max_dev: f64,
    e_max_observed: f64,
}

impl Accumulator {
    fn new(beta: f64, e_avg: f64, frame_len: usize, horizon: usize) -> Result<Self> {
        Ok(Accumulator {
            per_slot: Vec::with_capacity(horizon),
            state: CostQueueState::new(beta)?,
            e_avg,
            frame_len,
            frame_start_q: 0.0,
            max_dev: 0.0,
            e_max_observed: 0.0,
        })
    }

    fn step(&mut self, t: usize, placement: Placement, latency: f64, cost: f64) -> Result<()> {
        if t.is_multiple_of(self.frame_len) {
            self.frame_start_q = self.state.q;
        }
        self.per_slot.push(SlotRecord { t, placement, latency, cost, q: self.state.q, w: self.state.w });
        self.state = self.state.advance(cost, self.e_avg)?;
        self.max_dev = self.max_dev.max((self.state.q - self.frame_start_q).abs());
        self.e_max_observed = self.e_max_observed.max(cost);
        Ok(())
    }

    fn finish(self, policy: PolicyKind, negative_w_frames: usize, e_max_theoretical: f64) -> RunRecord {
        let horizon = self.per_slot.len() as f64;
        let mut total_latency = 0.0;
        let mut total_cost = 0.0;
        let mut total_queue = 0.0;
        for s in &self.per_slot {
            total_latency += s.latency;
            total_cost += s.cost;
            total_queue += s.q;
        }
        RunRecord {
            policy,
            budget_avg: self.e_avg,
            frame_len: self.frame_len,
            avg_latency: total_latency / horizon,
            avg_cost: total_cost / horizon,
            avg_queue: total_queue / horizon,
            final_queue: self.state.q,
            total_cost,
            negative_w_frames,
            max_frame_deviation: self.max_dev,
            e_max_theoretical,
            e_max_observed: self.e_max_observed,
            per_slot: self.per_slot,
        }
    }
}

/// Runs `policy` over the first `scn.horizon` observations.
///
/// The service starts at the user's node of slot 0. `predictor` is consulted by
/// PSP, PSP-WU and PLM only.
pub fn simulate(
    scn: &Scenario,
    observations: &[SlotObservation],
    policy: PolicyKind,
    cfg: &PolicyConfig,
    predictor: &PredictorSpec,
) -> Result<RunRecord> {
    scn.validate()?;
    cfg.validate()?;
    predictor.validate()?;
    if observations.len() < scn.horizon {
        return Err(Error::InvalidScenario(format!(
            "{} observations for a horizon of {} slots",
            observations.len(),
            scn.horizon
        )));
    }
    let observations = &observations[..scn.horizon];
    for obs in observations {
        scn.validate_observation(obs)?;
    }
    let regions: Vec<usize> = observations.iter().map(|o| o.user_node).collect();
    let e_avg = scn.budget_avg;
    let e_max = stream_max_migration_cost(observations);
    let beta = if policy == PolicyKind::PspWu { cfg.beta } else { 0.0 };
    let mut acc = Accumulator::new(beta, e_avg, scn.frame_len, scn.horizon)?;
    let mut predictor = Predictor::new(predictor.clone(), scn.node_count)?;
    let initial = Placement(observations[0].user_node);
    let mut prev = initial;
    let mut negative_w_frames = 0;

    if policy.is_frame_based() {
        for start in (0..scn.horizon).step_by(scn.frame_len) {
            let len = scn.frame_len.min(scn.horizon - start);
            let anchor = if policy == PolicyKind::PspWu { acc.state.w } else { acc.state.q };
            if anchor < 0.0 {
                negative_w_frames += 1;
            }
            let mut slots = Vec::with_capacity(len);
            slots.push(observations[start].clone());
            if len > 1 {
                let predicted = predictor.predict(&regions[..=start], &regions[start + 1..start + len], len - 1)?;
                for (s, node) in predicted.into_iter().enumerate() {
                    slots.push(observations[start + 1 + s].with_user_node(node));
                }
            }
            let frame =
                FrameInput { frame_index: start / scn.frame_len, slots, q_anchor: anchor, prev_placement: prev };
            let plan = solve_frame(cfg, &frame, scn, e_avg);
            for (s, &cur) in plan.placements.iter().enumerate() {
                let t = start + s;
                let (latency, cost) = slot_outcome(scn, &observations[t], prev, cur)?;
                acc.step(t, cur, latency, cost)?;
                prev = cur;
            }
        }
    } else {
        let mut lazy = 0.0;
        for (t, obs) in observations.iter().enumerate() {
            let cur = match policy {
                PolicyKind::Osp => Placement(argmin_lowest(scores_unchecked(cfg, acc.state.q, obs, prev, scn)).0),
                PolicyKind::Am => am_decide(obs),
                PolicyKind::Nm => nm_decide(initial),
                PolicyKind::Lm => {
                    let (p, a) = lm_decide(lazy, obs, prev, scn, cfg)?;
                    lazy = a;
                    p
                }
                PolicyKind::Plm => {
                    let next = if t + 1 < scn.horizon {
                        let node = predictor.predict(&regions[..=t], &regions[t + 1..t + 2], 1)?[0];
                        observations[t + 1].with_user_node(node)
                    } else {
                        obs.clone()
                    };
                    plm_decide(obs, &next, prev, scn, cfg)?
                }
                PolicyKind::Psp | PolicyKind::PspWu => unreachable!("frame-based policies handled above"),
            };
            let (latency, cost) = slot_outcome(scn, obs, prev, cur)?;
            debug_assert_eq!(cost, migration_cost(obs, prev, cur));
            acc.step(t, cur, latency, cost)?;
            prev = cur;
        }
    }

    Ok(acc.finish(policy, negative_w_frames, e_max))
}
