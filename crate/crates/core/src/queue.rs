//! Virtual cost queue and the weight recursion used by the weight-update policy.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{exact_sign, two_product, ExactSum};

fn nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeInput { name, value })
    }
}

/// One step of the virtual queue: `max(q + e - e_avg, 0)`.
///
/// The result is rounded upward, so the stored backlog never falls below the
/// exact value and the telescoped budget inequality holds without rounding slack.
pub fn update_queue(q: f64, e: f64, e_avg: f64) -> Result<f64> {
    nonnegative("queue", q)?;
    nonnegative("cost", e)?;
    nonnegative("budget", e_avg)?;
    Ok(step_queue(q, e, e_avg))
}

#[inline]
pub(crate) fn step_queue(q: f64, e: f64, e_avg: f64) -> f64 {
    let mut next = q + e - e_avg;
    while exact_sign([next, -q, -e, e_avg]) == Ordering::Less {
        next = next.next_up();
    }
    next.max(0.0)
}

/// Exact test of `sum(costs) <= horizon * e_avg + final_q`.
pub fn telescoped_budget_holds(costs: impl IntoIterator<Item = f64>, horizon: usize, e_avg: f64, final_q: f64) -> bool {
    let mut sum = ExactSum::new();
    sum.extend(costs);
    let (p, err) = two_product(horizon as f64, e_avg);
    sum.extend([-p, -err, -final_q]);
    sum.sign() != Ordering::Greater
}

/// Quadratic Lyapunov function `q^2 / 2`.
pub fn lyapunov(q: f64) -> f64 {
    0.5 * q * q
}

/// Constant of the one-slot drift bound, `(e_avg^2 + e_max^2) / 2`.
#[allow(non_snake_case)]
pub fn bound_constant_B(e_avg: f64, e_max: f64) -> f64 {
    0.5 * (e_avg * e_avg + e_max * e_max)
}

/// Largest possible one-slot queue change, `max(e_avg, e_max)`.
pub fn max_queue_step(e_avg: f64, e_max: f64) -> f64 {
    e_avg.max(e_max)
}

/// Queue estimate used for every slot of a frame: the backlog at the frame start.
pub fn frame_queue_approximation(q_at_frame_start: f64, frame_len: usize) -> Vec<f64> {
    vec![q_at_frame_start; frame_len]
}

/// Queue backlog together with the weight history `W(t)`, `W(t-1)`.
///
/// The weight is carried as `q + excess`, where `excess` accumulates only the
/// `beta`-scaled increments. With `beta = 0` and a zero start, `w == q` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostQueueState {
    pub q: f64,
    pub w: f64,
    pub w_prev: f64,
    pub beta: f64,
    pub excess: f64,
}

impl CostQueueState {
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidPolicyConfig(format!("beta must lie in [0, 1], got {beta}")));
        }
        Ok(CostQueueState { q: 0.0, w: 0.0, w_prev: 0.0, beta, excess: 0.0 })
    }

    /// Advances the queue by one slot of cost `e`, then the weight by the
    /// resulting queue change.
    pub fn advance(self, e: f64, e_avg: f64) -> Result<Self> {
        let q = update_queue(self.q, e, e_avg)?;
        let excess = self.excess + self.beta * (self.w - self.w_prev).max(0.0);
        Ok(CostQueueState { q, w: q + excess, w_prev: self.w, beta: self.beta, excess })
    }
}

/// `W(t+1) = W(t) + delta_q + beta * max(W(t) - W(t-1), 0)`. Not clamped.
pub fn update_weight(state: CostQueueState, delta_q: f64) -> CostQueueState {
    let increment = state.beta * (state.w - state.w_prev).max(0.0);
    CostQueueState { w: state.w + delta_q + increment, w_prev: state.w, excess: state.excess + increment, ..state }
}
