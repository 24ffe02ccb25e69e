//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use edgeplacer::cli::main_with_args;
use edgeplacer::harness::config::Materialized;
use edgeplacer::harness::verify::{
    horizon_instance_within_bound, plans_agree, random_frame_instance, HORIZON_FAILURE_TOLERANCE,
};
use edgeplacer::harness::{simulate, ExperimentConfig, RunRecord, BUDGET_LOW};
use edgeplacer::model::{service_latency, Placement};
use edgeplacer::policies::{brute_force_frame, psp_frame_decide, pspwu_frame_decide};
use edgeplacer::predict::{AccuracyPreset, Predictor};
use edgeplacer::{PolicyConfig, PolicyKind, PredictorSpec};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Default 1400-slot synthetic scenario for `seed`, with overrides applied.
fn materialize(seed: u64, overrides: &[(&str, &str)]) -> Materialized {
    let mut cfg = ExperimentConfig { seed, ..Default::default() };
    for (k, v) in overrides {
        cfg.apply_override(k, v).unwrap();
    }
    cfg.materialize().unwrap()
}

fn run(m: &Materialized, policy: PolicyKind, cfg: &PolicyConfig, predictor: &PredictorSpec) -> RunRecord {
    simulate(&m.scenario, &m.observations, policy, cfg, predictor).unwrap()
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

fn frame_oracle(instances: usize, seed: u64, weighted: bool) -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matches = 0;
    for _ in 0..instances {
        let n = rng.gen_range(2..=5);
        let t = rng.gen_range(2..=4);
        let cfg =
            PolicyConfig { v: rng.gen_range(1.0..2000.0), theta: rng.gen_range(0.0..100.0), ..Default::default() };
        let anchor = if weighted { rng.gen_range(-20.0..50.0) } else { rng.gen_range(0.0..50.0) };
        let (scn, frame, e_avg) = random_frame_instance(&mut rng, n, t, anchor).unwrap();
        let dp = if weighted {
            pspwu_frame_decide(&cfg, &frame, &scn, e_avg)
        } else {
            psp_frame_decide(&cfg, &frame, &scn, e_avg)
        }
        .unwrap();
        let oracle = brute_force_frame(&frame, &scn, e_avg, &cfg).unwrap();
        matches += usize::from(plans_agree(&dp, &oracle));
    }
    let elapsed = started.elapsed();
    outcome(
        matches == instances && elapsed < Duration::from_secs(10),
        format!("{matches}/{instances} instances agree (rtol 1e-9, same sequence) in {:.2}s", elapsed.as_secs_f64()),
    )
}

fn budget_inequality() -> Outcome {
    let m = materialize(11, &[]);
    let cfg = PolicyConfig::default();
    let mut failing = Vec::new();
    for policy in PolicyKind::ALL {
        let rec = run(&m, policy, &cfg, &m.predictor);
        if rec.horizon() != 1400 || !rec.budget_holds() {
            failing.push(policy.name());
        }
    }
    outcome(
        failing.is_empty(),
        format!("sum E <= T*E_avg + Q(T) exactly for all 7 policies over 1400 slots; failing: {failing:?}"),
    )
}

fn frame_deviation() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut runs = 0;
    for &seed in &SEEDS {
        for e_avg in ["60", "167", "417"] {
            let m = materialize(seed, &[("scenario.budget_avg", e_avg)]);
            for policy in [PolicyKind::Psp, PolicyKind::PspWu] {
                let rec = run(&m, policy, &PolicyConfig::default(), &m.predictor);
                ok &= rec.frame_bound_holds();
                worst = worst.max(rec.max_frame_deviation / rec.frame_deviation_bound());
                runs += 1;
            }
        }
    }
    outcome(ok, format!("{runs} PSP/PSP-WU runs; worst deviation / bound = {worst:.3}"))
}

fn horizon_bound() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let per_v = 20;
    let mut failures = 0;
    let mut total = 0;
    for v in [10.0, 100.0] {
        for _ in 0..per_v {
            total += 1;
            if !horizon_instance_within_bound(&mut rng, v).unwrap() {
                failures += 1;
            }
        }
    }
    let elapsed = started.elapsed();
    outcome(
        (failures as f64) < HORIZON_FAILURE_TOLERANCE * total as f64 && elapsed < Duration::from_secs(60),
        format!(
            "{}/{total} tiny instances within L* + B/V + 10%, {failures} over, {:.2}s",
            total - failures,
            elapsed.as_secs_f64()
        ),
    )
}

fn tradeoff_trends() -> Vec<(String, Outcome)> {
    let lstm = |seed: u64| PredictorSpec::preset(AccuracyPreset::Lstm, seed);
    let cfg_at = |v: f64| PolicyConfig { v, ..Default::default() };
    let mut lat = [[0.0; 2]; 2];
    let mut queue = [[0.0; 2]; 2];
    for &seed in &SEEDS {
        let m = materialize(seed, &[("scenario.frame_len", "2")]);
        for (pi, policy) in [PolicyKind::Osp, PolicyKind::Psp].into_iter().enumerate() {
            for (vi, v) in [10.0, 4000.0].into_iter().enumerate() {
                let rec = run(&m, policy, &cfg_at(v), &lstm(seed));
                lat[pi][vi] += rec.avg_latency / SEEDS.len() as f64;
                queue[pi][vi] += rec.avg_queue / SEEDS.len() as f64;
            }
        }
    }
    let a = outcome(
        lat[0][1] < lat[0][0] && lat[1][1] < lat[1][0],
        format!(
            "avg latency V=10 -> V=4000: OSP {:.4} -> {:.4}, PSP {:.4} -> {:.4}",
            lat[0][0], lat[0][1], lat[1][0], lat[1][1]
        ),
    );
    let b = outcome(
        queue[0][1] > queue[0][0] && queue[1][1] > queue[1][0],
        format!(
            "avg queue V=10 -> V=4000: OSP {:.2} -> {:.2}, PSP {:.2} -> {:.2}",
            queue[0][0], queue[0][1], queue[1][0], queue[1][1]
        ),
    );

    let scenarios: Vec<Materialized> = SEEDS.iter().map(|&s| materialize(s, &[])).collect();
    let perfect = PredictorSpec::perfect(2);
    let mut rows = Vec::new();
    let mut all = true;
    for v in [10.0, 100.0, 1000.0, 4000.0] {
        let cfg = PolicyConfig { v, theta: 50.0, ..Default::default() };
        let osp = mean(scenarios.iter().map(|m| run(m, PolicyKind::Osp, &cfg, &perfect).avg_latency));
        let psp = mean(scenarios.iter().map(|m| run(m, PolicyKind::Psp, &cfg, &perfect).avg_latency));
        all &= psp <= osp;
        rows.push(format!("V={v}: PSP {psp:.4} vs OSP {osp:.4}"));
    }
    let c = outcome(all, format!("perfect prediction, T=3, theta=50, E_avg={BUDGET_LOW}; {}", rows.join("; ")));
    vec![("6a".into(), a), ("6b".into(), b), ("6c".into(), c)]
}

fn weight_update_effect() -> Vec<(String, Outcome)> {
    let cfg = PolicyConfig { beta: 0.65, ..Default::default() };
    let mut psp = (0.0, 0.0);
    let mut wu = (0.0, 0.0);
    let mut identical = true;
    for &seed in &SEEDS {
        let m = materialize(seed, &[]);
        let pred = PredictorSpec::preset(AccuracyPreset::Lstm, seed);
        let a = run(&m, PolicyKind::Psp, &cfg, &pred);
        let b = run(&m, PolicyKind::PspWu, &cfg, &pred);
        psp.0 += a.avg_queue / SEEDS.len() as f64;
        psp.1 += a.avg_latency / SEEDS.len() as f64;
        wu.0 += b.avg_queue / SEEDS.len() as f64;
        wu.1 += b.avg_latency / SEEDS.len() as f64;
        let zero = run(&m, PolicyKind::PspWu, &PolicyConfig { beta: 0.0, ..cfg }, &pred);
        identical &= zero.placements() == a.placements();
    }
    let effect = outcome(
        wu.0 < psp.0 && wu.1 <= psp.1 * 1.01,
        format!(
            "beta=0.65, T=3: avg queue PSP-WU {:.2} vs PSP {:.2}; avg latency PSP-WU {:.4} vs PSP {:.4} (limit {:.4})",
            wu.0,
            psp.0,
            wu.1,
            psp.1,
            psp.1 * 1.01
        ),
    );
    let zero = outcome(identical, "beta=0 PSP-WU places identically to PSP on every seed");
    vec![("7 (effect)".into(), effect), ("7 (beta=0)".into(), zero)]
}

fn benchmark_sanity() -> Outcome {
    let cfg = PolicyConfig::default();
    let mut am_minimal = true;
    let mut nm_free = true;
    let mut am_best = true;
    for &seed in &SEEDS {
        let m = materialize(seed, &[]);
        let am = run(&m, PolicyKind::Am, &cfg, &m.predictor);
        for (slot, obs) in am.per_slot.iter().zip(&m.observations) {
            let best = (0..m.scenario.node_count)
                .map(|i| service_latency(&m.scenario, obs, Placement(i)).unwrap())
                .fold(f64::INFINITY, f64::min);
            am_minimal &= slot.latency == best;
        }
        nm_free &= run(&m, PolicyKind::Nm, &cfg, &m.predictor).total_cost == 0.0;
        for policy in PolicyKind::ALL {
            am_best &= am.avg_latency <= run(&m, policy, &cfg, &m.predictor).avg_latency;
        }
    }
    outcome(
        am_minimal && nm_free && am_best,
        format!("AM per-slot minimum: {am_minimal}; NM zero cost: {nm_free}; AM best average on every seed: {am_best}"),
    )
}

fn predictor_calibration() -> Outcome {
    let trials = 10_000;
    let n = 6;
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for preset in [AccuracyPreset::Lstm, AccuracyPreset::Arima, AccuracyPreset::Sma] {
        let target = preset.accuracies();
        let mut p = Predictor::new(PredictorSpec::preset(preset, 17), n).unwrap();
        let mut hits = [0usize; 3];
        for _ in 0..trials {
            let future: Vec<usize> = (0..3).map(|_| rng.gen_range(0..n)).collect();
            let guess = p.predict(&[0], &future, 3).unwrap();
            for s in 0..3 {
                hits[s] += usize::from(guess[s] == future[s]);
            }
        }
        for s in 0..3 {
            worst = worst.max((hits[s] as f64 / trials as f64 - target[s]).abs());
        }
    }

    let cfg = PolicyConfig { theta: 0.0, ..Default::default() };
    let mut reproduces = true;
    for &seed in &SEEDS {
        let m = materialize(seed, &[("scenario.frame_len", "1")]);
        let psp = run(&m, PolicyKind::Psp, &cfg, &PredictorSpec::perfect(1));
        let osp = run(&m, PolicyKind::Osp, &cfg, &PredictorSpec::perfect(1));
        reproduces &= psp.placements() == osp.placements();
    }
    outcome(
        worst <= 0.02 && reproduces,
        format!(
            "largest accuracy error {:.2} points over {trials} trials per preset; T=1 perfect PSP equals OSP: {reproduces}",
            worst * 100.0
        ),
    )
}

fn cli(args: &[&str]) -> i32 {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with_args(std::iter::once("edgeplacer").chain(args.iter().copied()), &mut out, &mut err);
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    code
}

fn determinism(dir: &Path) -> Outcome {
    let config = dir.join("experiment.json");
    std::fs::write(
        &config,
        r#"{
  "seed": 3,
  "policy": { "name": "psp-wu", "v": 500 },
  "predictor": { "kind": "oracle_noisy", "accuracies": [0.904, 0.839] },
  "sweep": { "axis": "v", "values": [10, 100, 1000], "policies": ["osp", "psp", "psp-wu", "lm", "plm"] }
}"#,
    )
    .unwrap();
    let config = config.to_str().unwrap();
    let mut outputs = Vec::new();
    for (cmd, name) in [("run", "run_a"), ("run", "run_b"), ("sweep", "sweep_a"), ("sweep", "sweep_b")] {
        let out = dir.join(format!("{name}.csv"));
        let mut args = vec![cmd, "--config", config, "--out", out.to_str().unwrap()];
        if cmd == "run" {
            args.push("--per-slot");
        }
        cli(&args);
        let mut bytes = std::fs::read(&out).unwrap();
        if cmd == "run" {
            bytes.extend(std::fs::read(dir.join(format!("{name}.slots.csv"))).unwrap());
        }
        outputs.push(bytes);
    }
    let same = outputs[0] == outputs[1] && outputs[2] == outputs[3] && !outputs[0].is_empty();
    outcome(same, format!("run (summary + per-slot) and sweep outputs byte-identical across repeats: {same}"))
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut results: Vec<(String, Outcome)> = vec![
        ("1".into(), frame_oracle(200, 101, false)),
        ("2".into(), frame_oracle(100, 202, true)),
        ("3".into(), budget_inequality()),
        ("4".into(), frame_deviation()),
        ("5".into(), horizon_bound()),
    ];
    results.extend(tradeoff_trends());
    results.extend(weight_update_effect());
    results.push(("8".into(), benchmark_sanity()));
    results.push(("9".into(), predictor_calibration()));
    results.push(("10".into(), determinism(dir.path())));

    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} - {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
