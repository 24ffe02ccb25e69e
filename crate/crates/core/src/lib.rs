//! Service placement for mobile edge computing under a long-term migration budget.
//!
//! A user moves between regions, each served by one edge node. Every slot the
//! service hosting the user's tasks is placed on some node; running it away from
//! the user's node adds backhaul latency, moving it costs money. A virtual cost
//! queue turns the long-term budget into a per-slot penalty.
//!
//! ```text
//!   trace ──▶ scenario stream ──▶ policy ──▶ (latency, cost) ──▶ queue ──┐
//!                 ▲                  ▲                                   │
//!                 │             predictor                                │
//!                 └──────────────────────────── Q(t), W(t) ◀─────────────┘
//! ```
//!
//! Policies: one-slot online placement (OSP), frame-based predictive placement
//! (PSP) solved as a layered shortest path, its weight-update variant (PSP-WU),
//! and the always/never/lazy/predictive-lazy migration benchmarks.

// `!(x >= 0.0)` is used on purpose so that NaN fails validation, and the
// solvers index several per-slot tables with the same loop variables.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod exact;
pub mod harness;
pub mod model;
pub mod policies;
pub mod predict;
pub mod queue;

pub use error::{Error, Result};
pub use harness::{ExperimentConfig, RunRecord};
pub use model::{Placement, Scenario, SlotObservation};
pub use policies::{PolicyConfig, PolicyKind};
pub use predict::{MobilityTrace, PredictorSpec};
