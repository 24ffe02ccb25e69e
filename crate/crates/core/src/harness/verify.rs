//! Randomized oracle checks behind the `verify` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{Placement, Scenario};
use crate::policies::{
    brute_force_frame, brute_force_horizon, psp_frame_decide, pspwu_frame_decide, FrameInput, FramePlan, PolicyConfig,
    PolicyKind,
};
use crate::predict::PredictorSpec;
use crate::queue::bound_constant_B;

use super::scenario::{generate_scenario, synthetic_trace, ScenarioParams};
use super::sim::simulate;

/// Relative tolerance when comparing DP and enumeration objectives.
pub const OBJECTIVE_RTOL: f64 = 1e-9;

/// Slack on the horizon bound, as a fraction of the optimum.
pub const HORIZON_SLACK: f64 = 0.10;

/// Largest tolerated fraction of horizon instances over the bound.
pub const HORIZON_FAILURE_TOLERANCE: f64 = 0.10;

/// Random frame with `n` nodes and `t` slots drawn from the default parameter ranges.
pub fn random_frame_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    t: usize,
    anchor: f64,
) -> Result<(Scenario, FrameInput, f64)> {
    let params = ScenarioParams {
        node_count: n,
        horizon: t,
        frame_len: t,
        budget_avg: rng.gen_range(0.0..300.0),
        ..Default::default()
    };
    let trace = synthetic_trace(rng.gen(), n, t, rng.gen_range(0.0..1.0))?;
    let (scn, slots) = generate_scenario(&params, &trace, rng.gen())?;
    let frame = FrameInput { frame_index: 0, slots, q_anchor: anchor, prev_placement: Placement(rng.gen_range(0..n)) };
    let e_avg = scn.budget_avg;
    Ok((scn, frame, e_avg))
}

pub fn plans_agree(dp: &FramePlan, oracle: &FramePlan) -> bool {
    let scale = oracle.objective.abs().max(1.0);
    (dp.objective - oracle.objective).abs() <= OBJECTIVE_RTOL * scale && dp.placements == oracle.placements
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub frame_matches: usize,
    pub frame_total: usize,
    pub weight_matches: usize,
    pub weight_total: usize,
    pub horizon_within: usize,
    pub horizon_total: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        let horizon_failures = self.horizon_total - self.horizon_within;
        self.frame_matches == self.frame_total
            && self.weight_matches == self.weight_total
            && (horizon_failures as f64) < HORIZON_FAILURE_TOLERANCE * self.horizon_total.max(1) as f64
    }

    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("{}/{} oracle matches", self.frame_matches, self.frame_total),
            format!("{}/{} weight-anchored oracle matches", self.weight_matches, self.weight_total),
            format!(
                "{}/{} horizon instances within optimum + B/V + {}%",
                self.horizon_within,
                self.horizon_total,
                HORIZON_SLACK * 100.0
            ),
        ]
    }
}

/// Compares the frame DP with enumeration on `instances` random frames (queue
/// and weight anchors) and checks the online policy against the horizon optimum
/// on `instances` tiny horizons.
pub fn run_verification(seed: u64, instances: usize) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerifyReport::default();

    for _ in 0..instances {
        let n = rng.gen_range(2..=5);
        let t = rng.gen_range(2..=4);
        let cfg =
            PolicyConfig { v: rng.gen_range(1.0..2000.0), theta: rng.gen_range(0.0..100.0), ..Default::default() };
        let q = rng.gen_range(0.0..50.0);
        let (scn, frame, e_avg) = random_frame_instance(&mut rng, n, t, q)?;
        let dp = psp_frame_decide(&cfg, &frame, &scn, e_avg)?;
        let oracle = brute_force_frame(&frame, &scn, e_avg, &cfg)?;
        report.frame_total += 1;
        report.frame_matches += usize::from(plans_agree(&dp, &oracle));

        let w = rng.gen_range(-20.0..50.0);
        let frame = FrameInput { q_anchor: w, ..frame };
        let dp = pspwu_frame_decide(&cfg, &frame, &scn, e_avg)?;
        let oracle = brute_force_frame(&frame, &scn, e_avg, &cfg)?;
        report.weight_total += 1;
        report.weight_matches += usize::from(plans_agree(&dp, &oracle));
    }

    for i in 0..instances {
        let v = if i % 2 == 0 { 10.0 } else { 100.0 };
        if horizon_instance_within_bound(&mut rng, v)? {
            report.horizon_within += 1;
        }
        report.horizon_total += 1;
    }
    Ok(report)
}

/// Tiny horizon used for the online bound: 3 nodes, 6 slots, budget 100.
pub fn horizon_params() -> ScenarioParams {
    ScenarioParams { node_count: 3, horizon: 6, frame_len: 1, budget_avg: 100.0, ..Default::default() }
}

/// Runs OSP on a fresh tiny instance and checks it against the enumerated optimum.
pub fn horizon_instance_within_bound(rng: &mut ChaCha8Rng, v: f64) -> Result<bool> {
    let params = horizon_params();
    let trace = synthetic_trace(rng.gen(), params.node_count, params.horizon, 0.3)?;
    let (scn, obs) = generate_scenario(&params, &trace, rng.gen())?;
    let cfg = PolicyConfig { v, ..Default::default() };
    let rec = simulate(&scn, &obs, PolicyKind::Osp, &cfg, &PredictorSpec::default())?;
    let best = brute_force_horizon(&scn, &obs, Placement(obs[0].user_node), scn.budget_avg)?;
    let b = bound_constant_B(scn.budget_avg, params.max_migration_cost());
    Ok(rec.avg_latency <= best.avg_latency + b / v + HORIZON_SLACK * best.avg_latency)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_verification_passes() {
        let report = run_verification(1, 25).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.frame_total, 25);
        assert_eq!(report.lines()[0], "25/25 oracle matches");
    }

    #[test]
    fn report_failure_modes() {
        let mut r = VerifyReport {
            frame_matches: 10,
            frame_total: 10,
            weight_matches: 10,
            weight_total: 10,
            horizon_within: 20,
            horizon_total: 20,
        };
        assert!(r.passed());
        r.horizon_within = 18;
        assert!(!r.passed());
        r.horizon_within = 19;
        assert!(r.passed());
        r.frame_matches = 9;
        assert!(!r.passed());
    }
}
