//! Text serializations of simulation results.
//!
//! Everything here is a pure function of its inputs, so outputs are
//! byte-identical for identical results. CSV numbers carry 17 significant
//! digits, enough to round-trip any `f64`.

use std::fmt::Write;

use serde::Serialize;

use crate::montecarlo::{ks_statistic, Histogram, SimulationPlan, SimulationResult};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `delta,reps,rejections,rate,se,seed`, one row per result.
pub fn rates_csv(results: &[SimulationResult], seed: u64) -> String {
    let mut out = String::from("delta,reps,rejections,rate,se,seed\n");
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(r.delta),
            r.reps,
            r.rejections,
            num(r.rejection_rate),
            num(r.standard_error),
            seed
        )
        .unwrap();
    }
    out
}

/// `replication,z` for every replication of one run.
pub fn z_csv(result: &SimulationResult) -> String {
    let mut out = String::from("replication,z\n");
    for (i, z) in result.z.iter().enumerate() {
        writeln!(out, "{i},{}", num(*z)).unwrap();
    }
    out
}

/// `lower,upper,count`; the tails use infinite bounds.
pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("lower,upper,count\n");
    let edges = h.edges();
    writeln!(out, "-inf,{},{}", num(h.lower), h.below).unwrap();
    for (i, c) in h.counts.iter().enumerate() {
        writeln!(out, "{},{},{c}", num(edges[i]), num(edges[i + 1])).unwrap();
    }
    writeln!(out, "{},inf,{}", num(h.upper), h.above).unwrap();
    out
}

#[derive(Debug, Serialize)]
struct RateRow {
    delta: f64,
    reps: usize,
    rejections: usize,
    rate: f64,
    se: f64,
    ks: f64,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    plan: &'a SimulationPlan,
    results: Vec<RateRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram: Option<&'a Histogram>,
}

/// Plan, per-delta rates and KS distances (and optionally a histogram) as
/// pretty-printed JSON.
pub fn summary_json(
    plan: &SimulationPlan,
    results: &[SimulationResult],
    histogram: Option<&Histogram>,
) -> String {
    let summary = Summary {
        plan,
        results: results
            .iter()
            .map(|r| RateRow {
                delta: r.delta,
                reps: r.reps,
                rejections: r.rejections,
                rate: r.rejection_rate,
                se: r.standard_error,
                ks: ks_statistic(&r.z),
            })
            .collect(),
        histogram,
    };
    serde_json::to_string_pretty(&summary).expect("summary is plain data")
}
