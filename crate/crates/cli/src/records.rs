//! Run records and their CSV/JSON renderings.
//!
//! Byte determinism is part of the contract: the same records render to the
//! same bytes, so wall-clock time is zeroed in files and reported on stderr
//! instead. A missing optimality gap (no exact oracle for the instance)
//! renders as an empty CSV field and a JSON null.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub run_id: String,
    pub algorithm: String,
    pub n: usize,
    /// Hypothesis count for finite classes, parameter dimension for convex
    /// spaces.
    pub size: usize,
    pub eps_target: f64,
    pub samples_used: u64,
    pub opt_gap: Option<f64>,
    pub worst_group_risk: f64,
    pub wall_ms: u64,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "run_id,algorithm,n,size,eps_target,samples_used,opt_gap,worst_group_risk,wall_ms,seed";

pub fn to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let gap = r.opt_gap.map(|g| g.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},0,{}\n",
            r.run_id,
            r.algorithm,
            r.n,
            r.size,
            r.eps_target,
            r.samples_used,
            gap,
            r.worst_group_risk,
            r.seed
        ));
    }
    out
}

pub fn to_json(records: &[RunRecord]) -> String {
    let zeroed: Vec<RunRecord> =
        records.iter().map(|r| RunRecord { wall_ms: 0, ..r.clone() }).collect();
    let mut out = serde_json::to_string_pretty(&zeroed).expect("records always serialize");
    out.push('\n');
    out
}
