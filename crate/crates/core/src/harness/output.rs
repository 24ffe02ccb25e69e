//! CSV writers for run summaries and per-slot dumps.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

use super::sim::RunRecord;
use super::sweep::SweepPoint;

pub const SUMMARY_HEADER: &str = "axis,policy,avg_latency_s,avg_cost,avg_queue,final_queue,negative_w_frames";
pub const PER_SLOT_HEADER: &str = "t,placement,latency_s,cost,q,w";

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    axis: &'a str,
    policy: &'a str,
    avg_latency_s: f64,
    avg_cost: f64,
    avg_queue: f64,
    final_queue: f64,
    negative_w_frames: usize,
}

#[derive(Debug, Serialize)]
struct SlotRow {
    t: usize,
    placement: usize,
    latency_s: f64,
    cost: f64,
    q: f64,
    w: f64,
}

fn summary_row<'a>(axis: &'a str, rec: &'a RunRecord) -> SummaryRow<'a> {
    SummaryRow {
        axis,
        policy: rec.policy.name(),
        avg_latency_s: rec.avg_latency,
        avg_cost: rec.avg_cost,
        avg_queue: rec.avg_queue,
        final_queue: rec.final_queue,
        negative_w_frames: rec.negative_w_frames,
    }
}

/// Axis label written for a single run.
pub const RUN_AXIS: &str = "-";

pub fn write_run_summary<W: Write>(writer: W, rec: &RunRecord) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.serialize(summary_row(RUN_AXIS, rec))?;
    wtr.flush()?;
    Ok(())
}

pub fn write_sweep_summary<W: Write>(writer: W, points: &[SweepPoint]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for p in points {
        let label = format!("{}", p.value);
        wtr.serialize(summary_row(&label, &p.record))?;
    }
    if points.is_empty() {
        wtr.write_record(SUMMARY_HEADER.split(','))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_per_slot<W: Write>(writer: W, rec: &RunRecord) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for s in &rec.per_slot {
        wtr.serialize(SlotRow {
            t: s.t,
            placement: s.placement.node(),
            latency_s: s.latency,
            cost: s.cost,
            q: s.q,
            w: s.w,
        })?;
    }
    if rec.per_slot.is_empty() {
        wtr.write_record(PER_SLOT_HEADER.split(','))?;
    }
    wtr.flush()?;
    Ok(())
}
