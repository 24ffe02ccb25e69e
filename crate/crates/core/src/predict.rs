//! Mobility traces and the pluggable location predictors.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-slot region (node) index of the user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MobilityTrace {
    pub regions: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    slot: usize,
    region: usize,
}

impl MobilityTrace {
    pub fn new(regions: Vec<usize>) -> Self {
        MobilityTrace { regions }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Checks the trace covers `horizon` slots and only names nodes below `node_count`.
    pub fn validate(&self, node_count: usize, horizon: usize) -> Result<()> {
        if self.regions.len() < horizon {
            return Err(Error::Trace(format!("trace has {} slots, horizon needs {horizon}", self.regions.len())));
        }
        if let Some((slot, r)) = self.regions.iter().enumerate().find(|(_, &r)| r >= node_count) {
            return Err(Error::Trace(format!("slot {slot}: region {r} out of range for {node_count} nodes")));
        }
        Ok(())
    }

    /// Parses a `slot,region` CSV. Slots must appear in order starting at 0.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["slot", "region"] {
            return Err(Error::Trace(format!(
                "expected header `slot,region`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut regions = Vec::new();
        for (expected, row) in rdr.deserialize::<TraceRow>().enumerate() {
            let row = row.map_err(|e| Error::Trace(e.to_string()))?;
            if row.slot != expected {
                return Err(Error::Trace(format!(
                    "row {}: expected slot {expected}, found {}",
                    expected + 1,
                    row.slot
                )));
            }
            regions.push(row.region);
        }
        if regions.is_empty() {
            return Err(Error::Trace("trace has no rows".into()));
        }
        Ok(MobilityTrace { regions })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file =
            std::fs::File::open(path).map_err(|e| Error::TraceFile { path: path.to_owned(), reason: e.to_string() })?;
        Self::read_csv(file).map_err(|e| Error::TraceFile { path: path.to_owned(), reason: e.to_string() })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        for (slot, &region) in self.regions.iter().enumerate() {
            wtr.serialize(TraceRow { slot, region })?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Location-prediction accuracies per look-ahead depth (depth 1, 2, 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyPreset {
    Lstm,
    Arima,
    Sma,
}

impl AccuracyPreset {
    pub fn accuracies(self) -> [f64; 3] {
        match self {
            AccuracyPreset::Lstm => [0.904, 0.839, 0.548],
            AccuracyPreset::Arima => [0.885, 0.808, 0.509],
            AccuracyPreset::Sma => [0.355, 0.102, 0.002],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictorSpec {
    /// Returns the true region at look-ahead step `s` with probability
    /// `accuracies[s - 1]`, otherwise a uniformly drawn different region.
    OracleNoisy {
        accuracies: Vec<f64>,
        #[serde(default)]
        rng_seed: u64,
    },
    /// The most frequent region of the last `window` history entries, repeated.
    MovingMode { window: usize },
    /// Most likely path under a first-order transition model fitted on the history.
    Markov1,
}

impl Default for PredictorSpec {
    fn default() -> Self {
        PredictorSpec::perfect(3)
    }
}

impl PredictorSpec {
    /// Oracle with accuracy 1 at every depth up to `window`.
    pub fn perfect(window: usize) -> Self {
        PredictorSpec::OracleNoisy { accuracies: vec![1.0; window], rng_seed: 0 }
    }

    pub fn preset(preset: AccuracyPreset, rng_seed: u64) -> Self {
        PredictorSpec::OracleNoisy { accuracies: preset.accuracies().to_vec(), rng_seed }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PredictorSpec::OracleNoisy { accuracies, .. } => {
                if let Some(a) = accuracies.iter().find(|a| !(0.0..=1.0).contains(*a)) {
                    return Err(Error::InvalidPredictor(format!("accuracy {a} outside [0, 1]")));
                }
                Ok(())
            }
            PredictorSpec::MovingMode { window } if *window == 0 => {
                Err(Error::InvalidPredictor("moving_mode window must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// A predictor instance. Owns its random state; one per simulation run.
#[derive(Debug, Clone)]
pub struct Predictor {
    spec: PredictorSpec,
    node_count: usize,
    rng: ChaCha8Rng,
}

impl Predictor {
    pub fn new(spec: PredictorSpec, node_count: usize) -> Result<Self> {
        spec.validate()?;
        if node_count == 0 {
            return Err(Error::InvalidPredictor("node_count must be at least 1".into()));
        }
        let seed = match &spec {
            PredictorSpec::OracleNoisy { rng_seed, .. } => *rng_seed,
            _ => 0,
        };
        Ok(Predictor { spec, node_count, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn spec(&self) -> &PredictorSpec {
        &self.spec
    }

    /// Predicts the next `w` regions after `history`. `true_future` is only read
    /// by the noisy oracle.
    pub fn predict(&mut self, history: &[usize], true_future: &[usize], w: usize) -> Result<Vec<usize>> {
        if w == 0 {
            return Err(Error::InvalidPredictor("prediction window must be at least 1".into()));
        }
        let Some(&last) = history.last() else {
            return Err(Error::InvalidPredictor("history is empty".into()));
        };
        let n = self.node_count;
        if let Some(r) = history.iter().chain(true_future).find(|&&r| r >= n) {
            return Err(Error::InvalidPredictor(format!("region {r} out of range for {n} nodes")));
        }
        match &self.spec {
            PredictorSpec::OracleNoisy { accuracies, .. } => {
                if w > accuracies.len() {
                    return Err(Error::InvalidPredictor(format!(
                        "window {w} exceeds the {} configured accuracies",
                        accuracies.len()
                    )));
                }
                if true_future.len() < w {
                    return Err(Error::InvalidPredictor(format!(
                        "oracle needs {w} future regions, got {}",
                        true_future.len()
                    )));
                }
                let mut out = Vec::with_capacity(w);
                for (&truth, &acc) in true_future.iter().zip(accuracies).take(w) {
                    let hit = n == 1 || self.rng.gen_bool(acc);
                    if hit {
                        out.push(truth);
                    } else {
                        // uniform over the n - 1 other regions
                        let draw = self.rng.gen_range(0..n - 1);
                        out.push(if draw >= truth { draw + 1 } else { draw });
                    }
                }
                Ok(out)
            }
            PredictorSpec::MovingMode { window } => {
                let start = history.len().saturating_sub(*window);
                let mut counts = vec![0usize; n];
                for &r in &history[start..] {
                    counts[r] += 1;
                }
                let mode = argmax_lowest(&counts);
                Ok(vec![mode; w])
            }
            PredictorSpec::Markov1 => Ok(markov_most_likely_path(history, last, n, w)),
        }
    }
}

fn argmax_lowest<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn markov_most_likely_path(history: &[usize], last: usize, n: usize, w: usize) -> Vec<usize> {
    // Laplace-smoothed transition counts
    let mut counts = vec![vec![1.0f64; n]; n];
    for pair in history.windows(2) {
        counts[pair[0]][pair[1]] += 1.0;
    }
    let log_p: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            row.iter().map(|c| (c / total).ln()).collect()
        })
        .collect();

    let mut score: Vec<f64> = log_p[last].clone();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(w);
    back.push(vec![last; n]);
    for _ in 1..w {
        let mut next = vec![f64::NEG_INFINITY; n];
        let mut from = vec![0usize; n];
        for j in 0..n {
            for i in 0..n {
                let s = score[i] + log_p[i][j];
                if s > next[j] {
                    next[j] = s;
                    from[j] = i;
                }
            }
        }
        score = next;
        back.push(from);
    }
    let mut path = vec![0usize; w];
    path[w - 1] = argmax_lowest(&score);
    for step in (1..w).rev() {
        path[step - 1] = back[step][path[step]];
    }
    path
}
