//! Per-slot arithmetic of the edge system: service latency, migration cost and
//! the validity rules that tie observations to a scenario.
//!
//! Units are decimal throughout: 1 MB = 8 Mb, 1 GB = 1000 MB. Rates are in
//! megabits per second, workloads in giga-cycles and capacities in GHz, so
//! every latency term comes out in seconds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MEGABITS_PER_MEGABYTE: f64 = 8.0;
pub const MEGABYTES_PER_GIGABYTE: f64 = 1000.0;

/// Static description of the edge network and the experiment horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub node_count: usize,
    /// Inter-node data rates in Mbps, `backhaul_rate[from][to]`. The diagonal is unused.
    pub backhaul_rate: Vec<Vec<f64>>,
    /// Long-term per-slot migration budget `E_avg` in cost units.
    pub budget_avg: f64,
    pub horizon: usize,
    /// Slots per frame for the predictive policies; the prediction window is `frame_len - 1`.
    pub frame_len: usize,
}

impl Scenario {
    /// A scenario whose backhaul links all run at the same rate.
    pub fn uniform(
        node_count: usize,
        backhaul_mbps: f64,
        budget_avg: f64,
        horizon: usize,
        frame_len: usize,
    ) -> Result<Self> {
        let backhaul_rate = (0..node_count)
            .map(|i| (0..node_count).map(|j| if i == j { 0.0 } else { backhaul_mbps }).collect())
            .collect();
        let scn = Scenario { node_count, backhaul_rate, budget_avg, horizon, frame_len };
        scn.validate()?;
        Ok(scn)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.node_count == 0 {
            return bad("node_count must be at least 1".into());
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.frame_len == 0 {
            return bad("frame_len must be at least 1".into());
        }
        if !(self.budget_avg >= 0.0) || !self.budget_avg.is_finite() {
            return bad(format!("budget_avg must be finite and >= 0, got {}", self.budget_avg));
        }
        if self.backhaul_rate.len() != self.node_count
            || self.backhaul_rate.iter().any(|row| row.len() != self.node_count)
        {
            return bad(format!("backhaul_rate must be a {n}x{n} matrix", n = self.node_count));
        }
        for (i, row) in self.backhaul_rate.iter().enumerate() {
            for (j, &rate) in row.iter().enumerate() {
                if i != j && !(rate > 0.0 && rate.is_finite()) {
                    return bad(format!("backhaul_rate[{i}][{j}] must be > 0, got {rate}"));
                }
            }
        }
        Ok(())
    }

    /// Checks that `obs` describes a valid slot of this scenario.
    pub fn validate_observation(&self, obs: &SlotObservation) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidObservation { slot: obs.slot, reason });
        if obs.user_node >= self.node_count {
            return bad(format!("user_node {} out of range for {} nodes", obs.user_node, self.node_count));
        }
        if obs.compute_capacity.len() != self.node_count {
            return bad(format!(
                "compute_capacity has {} entries, expected {}",
                obs.compute_capacity.len(),
                self.node_count
            ));
        }
        let positive = [
            ("input_size", obs.input_size),
            ("access_rate", obs.access_rate),
            ("container_size", obs.container_size),
            ("unit_migration_cost", obs.unit_migration_cost),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be > 0, got {v}"));
            }
        }
        if !(obs.workload >= 0.0 && obs.workload.is_finite()) {
            return bad(format!("workload must be >= 0, got {}", obs.workload));
        }
        if let Some(d) = obs.compute_capacity.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return bad(format!("compute capacities must be > 0, got {d}"));
        }
        Ok(())
    }

    pub fn check_placement(&self, p: Placement) -> Result<()> {
        if p.node() >= self.node_count {
            Err(Error::PlacementOutOfRange { node: p.node(), node_count: self.node_count })
        } else {
            Ok(())
        }
    }
}

/// Everything that varies from slot to slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotObservation {
    pub slot: usize,
    /// Node the user is associated with, `z(t)`.
    pub user_node: usize,
    /// Task input size in MB.
    pub input_size: f64,
    /// Task workload in giga-cycles.
    pub workload: f64,
    /// User to associated node rate in Mbps.
    pub access_rate: f64,
    /// Per-node compute capacity in GHz.
    pub compute_capacity: Vec<f64>,
    /// Service container size in MB.
    pub container_size: f64,
    /// Cost units per GB moved.
    pub unit_migration_cost: f64,
}

impl SlotObservation {
    /// The same observation with the user relocated, used when feeding predicted locations
    /// into a frame decision.
    pub fn with_user_node(&self, user_node: usize) -> Self {
        SlotObservation { user_node, ..self.clone() }
    }
}

/// Node hosting the service in one slot. The index form encodes the one-hot
/// decision vector, so exactly one node is selected by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Placement(pub usize);

impl Placement {
    pub fn node(self) -> usize {
        self.0
    }

    /// One-hot indicator vector of length `node_count`.
    pub fn indicator(self, node_count: usize) -> Vec<u8> {
        (0..node_count).map(|i| u8::from(i == self.0)).collect()
    }

    /// Inverse of [`Placement::indicator`]; `None` unless exactly one entry is 1.
    pub fn from_indicator(x: &[u8]) -> Option<Self> {
        let mut chosen = None;
        for (i, &v) in x.iter().enumerate() {
            match v {
                0 => {}
                1 if chosen.is_none() => chosen = Some(i),
                _ => return None,
            }
        }
        chosen.map(Placement)
    }
}

impl std::fmt::Display for Placement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Latency in seconds when the service runs at `placed_at`: access transfer,
/// backhaul transfer (zero when co-located with the user's node), and compute.
pub fn service_latency(scn: &Scenario, obs: &SlotObservation, placed_at: Placement) -> Result<f64> {
    scn.check_placement(placed_at)?;
    Ok(latency_unchecked(scn, obs, placed_at.node()))
}

#[inline]
pub(crate) fn latency_unchecked(scn: &Scenario, obs: &SlotObservation, node: usize) -> f64 {
    let megabits = obs.input_size * MEGABITS_PER_MEGABYTE;
    let access = megabits / obs.access_rate;
    let backhaul = if node == obs.user_node { 0.0 } else { megabits / scn.backhaul_rate[obs.user_node][node] };
    access + backhaul + obs.workload / obs.compute_capacity[node]
}

/// Cost of moving the container from `from` to `to`; zero when it stays put.
pub fn migration_cost(obs: &SlotObservation, from: Placement, to: Placement) -> f64 {
    if from == to {
        0.0
    } else {
        obs.container_size / MEGABYTES_PER_GIGABYTE * obs.unit_migration_cost
    }
}

/// Realized `(latency, cost)` of a slot given the previous and current placement.
pub fn slot_outcome(scn: &Scenario, obs: &SlotObservation, prev: Placement, cur: Placement) -> Result<(f64, f64)> {
    scn.check_placement(prev)?;
    let latency = service_latency(scn, obs, cur)?;
    Ok((latency, migration_cost(obs, prev, cur)))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn obs(user_node: usize, capacity: Vec<f64>) -> SlotObservation {
        SlotObservation {
            slot: 0,
            user_node,
            input_size: 8.0,
            workload: 4.0,
            access_rate: 8.0,
            compute_capacity: capacity,
            container_size: 50.0,
            unit_migration_cost: 2.0,
        }
    }

    #[test]
    fn latency_colocated() {
        let scn = Scenario::uniform(2, 64.0, 1.0, 10, 1).unwrap();
        let o = obs(0, vec![8.0, 8.0]);
        assert_eq!(service_latency(&scn, &o, Placement(0)).unwrap(), 8.5);
    }

    #[test]
    fn latency_remote() {
        let scn = Scenario::uniform(2, 64.0, 1.0, 10, 1).unwrap();
        let o = obs(0, vec![8.0, 8.0]);
        assert_eq!(service_latency(&scn, &o, Placement(1)).unwrap(), 9.5);
    }

    #[test]
    fn latency_zero_work() {
        let scn = Scenario::uniform(2, 64.0, 1.0, 10, 1).unwrap();
        let mut o = obs(0, vec![8.0, 8.0]);
        o.workload = 0.0;
        o.input_size = 1e-300;
        let h = service_latency(&scn, &o, Placement(0)).unwrap();
        assert!((0.0..1e-290).contains(&h));
    }

    #[test]
    fn latency_rejects_out_of_range() {
        let scn = Scenario::uniform(2, 64.0, 1.0, 10, 1).unwrap();
        let o = obs(0, vec![8.0, 8.0]);
        assert!(matches!(
            service_latency(&scn, &o, Placement(2)),
            Err(Error::PlacementOutOfRange { node: 2, node_count: 2 })
        ));
    }

    #[test]
    fn migration_cost_examples() {
        let mut o = obs(0, vec![1.0, 1.0]);
        assert_eq!(migration_cost(&o, Placement(1), Placement(1)), 0.0);
        assert!((migration_cost(&o, Placement(0), Placement(1)) - 0.1).abs() < 1e-15);
        o.container_size = 25.0;
        o.unit_migration_cost = 10.0;
        assert!((migration_cost(&o, Placement(1), Placement(0)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn slot_outcome_components() {
        let scn = Scenario::uniform(3, 64.0, 1.0, 10, 1).unwrap();
        let o = obs(1, vec![8.0, 8.0, 8.0]);
        let (l, e) = slot_outcome(&scn, &o, Placement(2), Placement(2)).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(l, 9.5);
        let (l, e) = slot_outcome(&scn, &o, Placement(0), Placement(1)).unwrap();
        assert_eq!(l, 8.5);
        assert!(e > 0.0);
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario::uniform(0, 10.0, 1.0, 1, 1).is_err());
        assert!(Scenario::uniform(2, 0.0, 1.0, 1, 1).is_err());
        assert!(Scenario::uniform(2, 10.0, -1.0, 1, 1).is_err());
        assert!(Scenario::uniform(2, 10.0, 1.0, 0, 1).is_err());
        assert!(Scenario::uniform(2, 10.0, 1.0, 1, 0).is_err());
        let scn = Scenario::uniform(2, 10.0, 1.0, 1, 1).unwrap();
        assert!(scn.validate_observation(&obs(2, vec![1.0, 1.0])).is_err());
        assert!(scn.validate_observation(&obs(1, vec![1.0])).is_err());
        assert!(scn.validate_observation(&obs(1, vec![1.0, 0.0])).is_err());
        assert!(scn.validate_observation(&obs(1, vec![1.0, 2.0])).is_ok());
    }

    fn arb_case() -> impl Strategy<Value = (Scenario, SlotObservation, usize, usize)> {
        (1usize..6).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(1.0f64..200.0, n * n),
                0..n,
                0..n,
                0..n,
                (0.1f64..20.0, 0.0f64..30.0, 0.5f64..20.0, 1.0f64..100.0, 0.1f64..20.0),
                prop::collection::vec(0.5f64..20.0, n),
            )
                .prop_map(|(n, rates, z, a, b, (i, k, bz, s, c), cap)| {
                    let backhaul_rate = (0..n)
                        .map(|r| (0..n).map(|col| if r == col { 0.0 } else { rates[r * n + col] }).collect())
                        .collect();
                    let scn = Scenario { node_count: n, backhaul_rate, budget_avg: 1.0, horizon: 1, frame_len: 1 };
                    let o = SlotObservation {
                        slot: 0,
                        user_node: z,
                        input_size: i,
                        workload: k,
                        access_rate: bz,
                        compute_capacity: cap,
                        container_size: s,
                        unit_migration_cost: c,
                    };
                    (scn, o, a, b)
                })
        })
    }

    proptest! {
        #[test]
        fn latency_lower_bound((scn, o, a, _b) in arb_case()) {
            let h = service_latency(&scn, &o, Placement(a)).unwrap();
            let dmax = o.compute_capacity.iter().cloned().fold(f64::MIN, f64::max);
            prop_assert!(h.is_finite());
            prop_assert!(h >= o.workload / dmax);
        }

        #[test]
        fn cost_zero_iff_same_node((_scn, o, a, b) in arb_case()) {
            let e = migration_cost(&o, Placement(a), Placement(b));
            prop_assert_eq!(e == 0.0, a == b);
            prop_assert_eq!(e, migration_cost(&o, Placement(b), Placement(a)));
        }

        #[test]
        fn outcome_deterministic_and_nonnegative((scn, o, a, b) in arb_case()) {
            let first = slot_outcome(&scn, &o, Placement(a), Placement(b)).unwrap();
            let second = slot_outcome(&scn, &o, Placement(a), Placement(b)).unwrap();
            prop_assert_eq!(first.0.to_bits(), second.0.to_bits());
            prop_assert_eq!(first.1.to_bits(), second.1.to_bits());
            prop_assert!(first.0 >= 0.0 && first.1 >= 0.0);
        }

        #[test]
        fn indicator_round_trip(n in 1usize..16, pick in 0usize..16) {
            let p = Placement(pick % n);
            let x = p.indicator(n);
            prop_assert_eq!(x.iter().map(|&v| v as usize).sum::<usize>(), 1);
            prop_assert_eq!(Placement::from_indicator(&x), Some(p));
        }
    }
}
