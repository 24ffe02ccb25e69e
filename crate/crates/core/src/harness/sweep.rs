//! Parameter sweeps. Every axis value reuses the same scenario stream, trace and
//! predictor seed, so only the swept parameter changes between rows.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::policies::{PolicyConfig, PolicyKind};

use super::config::{ExperimentConfig, SweepAxis, SweepSpec};
use super::sim::{simulate, RunRecord};

pub const THREADS_ENV: &str = "EDGEPLACER_THREADS";

/// Worker count: `EDGEPLACER_THREADS` when set to a positive integer, else the
/// available parallelism.
pub fn default_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub axis: SweepAxis,
    pub value: f64,
    pub policy: PolicyKind,
    pub record: RunRecord,
}

/// Runs the config's sweep with [`default_threads`] workers.
pub fn sweep(config: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    sweep_with_threads(config, default_threads())
}

/// Runs one simulation per (axis value, policy) pair. Results come back in
/// axis order, then policy order, regardless of `threads`.
pub fn sweep_with_threads(config: &ExperimentConfig, threads: usize) -> Result<Vec<SweepPoint>> {
    let spec = config.sweep.clone().ok_or_else(|| Error::Config("config has no `sweep` section".into()))?;
    let m = config.materialize()?;
    let policies = spec.policies.clone().unwrap_or_else(|| vec![config.policy.name]);
    let jobs: Vec<(f64, PolicyKind)> =
        spec.values.iter().flat_map(|&v| policies.iter().map(move |&p| (v, p))).collect();

    let run_job = |&(value, policy): &(f64, PolicyKind)| -> Result<SweepPoint> {
        let mut scn = m.scenario.clone();
        let mut params: PolicyConfig = config.policy.params();
        apply_axis(&spec, value, &mut scn, &mut params);
        let record = simulate(&scn, &m.observations, policy, &params, &m.predictor)?;
        Ok(SweepPoint { axis: spec.axis, value, policy, record })
    };

    let workers = threads.clamp(1, jobs.len().max(1));
    if workers == 1 {
        return jobs.iter().map(run_job).collect();
    }

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<SweepPoint>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let out = run_job(&jobs[i]);
                slots.lock().expect("sweep result lock")[i] = Some(out);
            });
        }
    });
    slots.into_inner().expect("sweep result lock").into_iter().map(|r| r.expect("every job ran")).collect()
}

fn apply_axis(spec: &SweepSpec, value: f64, scn: &mut crate::model::Scenario, params: &mut PolicyConfig) {
    match spec.axis {
        SweepAxis::V => params.v = value,
        SweepAxis::EAvg => scn.budget_avg = value,
        SweepAxis::FrameLen => scn.frame_len = value as usize,
        SweepAxis::Theta => params.theta = value,
        SweepAxis::Beta => params.beta = value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(values: Vec<f64>, axis: SweepAxis) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario.horizon = 150;
        cfg.scenario.budget_avg = 40.0;
        cfg.sweep =
            Some(SweepSpec { axis, values, policies: Some(vec![PolicyKind::Osp, PolicyKind::Psp, PolicyKind::PspWu]) });
        cfg
    }

    #[test]
    fn single_value_sweep_equals_run() {
        let mut cfg = config(vec![250.0], SweepAxis::V);
        cfg.sweep.as_mut().unwrap().policies = None;
        cfg.policy.name = PolicyKind::PspWu;
        let points = sweep_with_threads(&cfg, 1).unwrap();
        cfg.policy.v = 250.0;
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].record, cfg.run().unwrap());
    }

    #[test]
    fn parallel_matches_serial_order() {
        let cfg = config(vec![10.0, 100.0, 1000.0, 4000.0], SweepAxis::V);
        let serial = sweep_with_threads(&cfg, 1).unwrap();
        let parallel = sweep_with_threads(&cfg, 4).unwrap();
        assert_eq!(serial, parallel);
        let order: Vec<_> = serial.iter().map(|p| (p.value, p.policy)).collect();
        assert_eq!(order[0], (10.0, PolicyKind::Osp));
        assert_eq!(order[2], (10.0, PolicyKind::PspWu));
        assert_eq!(order[3], (100.0, PolicyKind::Osp));
    }

    #[test]
    fn frame_len_axis() {
        let cfg = config(vec![1.0, 2.0, 3.0, 4.0], SweepAxis::FrameLen);
        for p in sweep_with_threads(&cfg, 2).unwrap() {
            assert_eq!(p.record.frame_len, p.value as usize);
            assert!(p.record.frame_bound_holds());
        }
    }

    #[test]
    fn missing_sweep_section() {
        assert!(sweep_with_threads(&ExperimentConfig::default(), 1).is_err());
    }
}
