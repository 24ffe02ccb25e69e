//! Placement decision procedures.
//!
//! - [`osp_decide`]: one-slot drift-plus-penalty minimization.
//! - [`psp_frame_decide`] / [`pspwu_frame_decide`]: frame-level plans computed as a
//!   shortest path through a layered graph (one layer of `N` nodes per slot).
//! - [`am_decide`], [`nm_decide`], [`lm_decide`], [`plm_decide`]: benchmarks.
//! - [`brute_force_frame`], [`brute_force_horizon`]: exhaustive oracles for small instances.

mod benchmarks;
pub(crate) mod frame;
pub(crate) mod online;
mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Placement, SlotObservation};

pub use benchmarks::{am_decide, lm_decide, nm_decide, plm_decide, plm_savings};
pub use frame::{psp_frame_decide, pspwu_frame_decide, FramePlan};
pub use online::{osp_decide, osp_scores};
pub use oracle::{brute_force_frame, brute_force_horizon, HorizonOptimum, ENUMERATION_LIMIT};

/// Tunable parameters shared by all policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    /// Lyapunov trade-off weight on latency.
    pub v: f64,
    /// Per-slot frame weighting for the predictive policies.
    pub theta: f64,
    /// Weight of the historical increment in the weight-update recursion.
    pub beta: f64,
    /// Lazy-migration threshold multiplier.
    pub lm_gamma: f64,
    /// Predictive-lazy-migration savings weight.
    pub plm_weight: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig { v: 100.0, theta: 50.0, beta: 0.65, lm_gamma: 1.0, plm_weight: 1.0 }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidPolicyConfig(msg));
        if !(self.v >= 0.0 && self.v.is_finite()) {
            return fail(format!("v must be finite and >= 0, got {}", self.v));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return fail(format!("theta must be finite and >= 0, got {}", self.theta));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return fail(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        if !(self.lm_gamma > 0.0) {
            return fail(format!("lm_gamma must be > 0, got {}", self.lm_gamma));
        }
        if !(self.plm_weight > 0.0) {
            return fail(format!("plm_weight must be > 0, got {}", self.plm_weight));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Osp,
    Psp,
    PspWu,
    Am,
    Nm,
    Lm,
    Plm,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::Osp,
        PolicyKind::Psp,
        PolicyKind::PspWu,
        PolicyKind::Am,
        PolicyKind::Nm,
        PolicyKind::Lm,
        PolicyKind::Plm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Osp => "osp",
            PolicyKind::Psp => "psp",
            PolicyKind::PspWu => "psp-wu",
            PolicyKind::Am => "am",
            PolicyKind::Nm => "nm",
            PolicyKind::Lm => "lm",
            PolicyKind::Plm => "plm",
        }
    }

    /// Policies that commit a whole frame of decisions at once.
    pub fn is_frame_based(self) -> bool {
        matches!(self, PolicyKind::Psp | PolicyKind::PspWu)
    }

    /// Policies that consult a location predictor.
    pub fn uses_predictor(self) -> bool {
        matches!(self, PolicyKind::Psp | PolicyKind::PspWu | PolicyKind::Plm)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| Error::Config(format!("unknown policy `{s}`")))
    }
}

/// Inputs for one frame decision.
///
/// `slots[0]` is the current slot with its true observation; later entries may
/// carry predicted user locations. `q_anchor` is the queue backlog at the frame
/// start for the queue-based policy, or the weight for the weight-update variant.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameInput {
    pub frame_index: usize,
    pub slots: Vec<SlotObservation>,
    pub q_anchor: f64,
    pub prev_placement: Placement,
}

impl FrameInput {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Frame weighting multiplier `(frame end) - tau` for slot offset `offset`.
    pub(crate) fn remaining(&self, offset: usize) -> f64 {
        (self.slots.len() - offset) as f64
    }
}

/// Lowest index attaining the minimum.
pub(crate) fn argmin_lowest(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v < best.1 || i == 0 {
            best = (i, v);
        }
    }
    best
}
