//! Exhaustive enumeration oracles. Both walk every placement sequence in
//! lexicographic order (node 0 first at the earliest slot) and keep the first
//! strict improvement, so ties resolve to the lexicographically smallest sequence.

use crate::error::{Error, Result};
use crate::model::{migration_cost, service_latency, Placement, Scenario, SlotObservation};

use super::frame::validate_frame;
use super::{FrameInput, FramePlan, PolicyConfig};

/// Maximum number of sequences either oracle will enumerate.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

fn guard(n: usize, len: usize) -> Result<()> {
    let size = (n as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if size > ENUMERATION_LIMIT {
        Err(Error::EnumerationTooLarge { size, limit: ENUMERATION_LIMIT })
    } else {
        Ok(())
    }
}

/// Evaluates the frame objective of every `N^T` sequence and returns the minimizer.
pub fn brute_force_frame(frame: &FrameInput, scn: &Scenario, e_avg: f64, cfg: &PolicyConfig) -> Result<FramePlan> {
    validate_frame(frame, scn, e_avg)?;
    let n = scn.node_count;
    let len = frame.slots.len();
    guard(n, len)?;

    // slot_value[s][j][i]: frame objective contribution of moving j -> i at slot s
    let mut slot_value = vec![vec![vec![0.0; n]; n]; len];
    for (s, obs) in frame.slots.iter().enumerate() {
        let weight = cfg.theta * (len - s) as f64;
        for i in 0..n {
            let latency = service_latency(scn, obs, Placement(i))?;
            for j in 0..n {
                let cost = migration_cost(obs, Placement(j), Placement(i));
                slot_value[s][j][i] = frame.q_anchor * (cost - e_avg + weight) + cfg.v * latency;
            }
        }
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut seq = vec![0usize; len];
    enumerate(n, len, &mut seq, 0, &mut |seq| {
        let mut total = 0.0;
        let mut prev = frame.prev_placement.node();
        for (s, &i) in seq.iter().enumerate() {
            total += slot_value[s][prev][i];
            prev = i;
        }
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, seq.to_vec()));
        }
    });

    let (objective, nodes) = best.expect("at least one sequence");
    let mut slot_terms = Vec::with_capacity(len);
    let mut prev = frame.prev_placement.node();
    for (s, &i) in nodes.iter().enumerate() {
        slot_terms.push(slot_value[s][prev][i]);
        prev = i;
    }
    Ok(FramePlan { placements: nodes.into_iter().map(Placement).collect(), objective, slot_terms })
}

/// Best budget-feasible placement sequence over a whole (short) horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonOptimum {
    pub placements: Vec<Placement>,
    pub avg_latency: f64,
    pub avg_cost: f64,
}

/// Minimum time-averaged latency over all sequences whose time-averaged
/// migration cost stays within `e_avg`, starting from `initial`.
pub fn brute_force_horizon(
    scn: &Scenario,
    observations: &[SlotObservation],
    initial: Placement,
    e_avg: f64,
) -> Result<HorizonOptimum> {
    if !(e_avg >= 0.0) {
        return Err(Error::NegativeInput { name: "budget", value: e_avg });
    }
    if observations.is_empty() {
        return Err(Error::InvalidScenario("horizon oracle needs at least one slot".into()));
    }
    scn.check_placement(initial)?;
    let n = scn.node_count;
    let len = observations.len();
    guard(n, len)?;

    let mut latency = vec![vec![0.0; n]; len];
    for (s, obs) in observations.iter().enumerate() {
        scn.validate_observation(obs)?;
        for i in 0..n {
            latency[s][i] = service_latency(scn, obs, Placement(i))?;
        }
    }

    let horizon = len as f64;
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut seq = vec![0usize; len];
    enumerate(n, len, &mut seq, 0, &mut |seq| {
        let mut lat = 0.0;
        let mut cost = 0.0;
        let mut prev = initial;
        for (s, &i) in seq.iter().enumerate() {
            lat += latency[s][i];
            cost += migration_cost(&observations[s], prev, Placement(i));
            prev = Placement(i);
        }
        let (avg_lat, avg_cost) = (lat / horizon, cost / horizon);
        if avg_cost <= e_avg && best.as_ref().is_none_or(|(b, _, _)| avg_lat < *b) {
            best = Some((avg_lat, avg_cost, seq.to_vec()));
        }
    });

    let (avg_latency, avg_cost, nodes) = best.ok_or(Error::Infeasible)?;
    Ok(HorizonOptimum { placements: nodes.into_iter().map(Placement).collect(), avg_latency, avg_cost })
}

fn enumerate(n: usize, len: usize, seq: &mut [usize], depth: usize, visit: &mut impl FnMut(&[usize])) {
    if depth == len {
        visit(seq);
        return;
    }
    for i in 0..n {
        seq[depth] = i;
        enumerate(n, len, seq, depth + 1, visit);
    }
}
