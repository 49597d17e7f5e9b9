//! The per-inequality analysis pipeline.

use std::f64::consts::PI;

use bellcg::localpoly::{detect_lifting, facet_check, local_bound, white_noise_value};
use bellcg::quantum::{quantum_bound, QuantumBoundOptions};
use bellcg::robustness::{detection_threshold, noise_resistance};
use bellcg::symmetry::correlation_form;
use bellcg::{CgTable, Rational};
use rayon::prelude::*;

use crate::report::{AnalysisReport, ReportRow};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        let q = QuantumBoundOptions::default();
        AnalyzeOptions {
            restarts: q.restarts,
            seed: q.seed,
            tol: q.tol,
            max_sweeps: q.max_sweeps,
        }
    }
}

impl AnalyzeOptions {
    fn quantum(&self) -> QuantumBoundOptions {
        QuantumBoundOptions {
            fix_theta: None,
            restarts: self.restarts,
            seed: self.seed,
            tol: self.tol,
            max_sweeps: self.max_sweeps,
        }
    }
}

fn display_name(index: usize, table: &CgTable) -> String {
    table
        .name()
        .map(str::to_string)
        .unwrap_or_else(|| format!("#{index}"))
}

/// Runs every analysis on one table. `index` is 1-based.
pub fn analyze_table(
    index: usize,
    table: &CgTable,
    opts: &AnalyzeOptions,
) -> Result<AnalysisReport, bellcg::Error> {
    let l = local_bound(table);
    let n: Rational = white_noise_value(table);
    let facet = facet_check(table);
    let lifting = detect_lifting(table);
    let corr = correlation_form(table);

    let free = quantum_bound(table, &opts.quantum())?;
    let me = quantum_bound(table, &opts.quantum().maximally_entangled())?;
    let lambda = noise_resistance(table, free.value)?;
    let lambda_me = noise_resistance(table, me.value)?;
    let detection = detection_threshold(table, me.value);

    Ok(AnalysisReport {
        index,
        name: display_name(index, table),
        scenario: table.scenario().to_string(),
        l,
        n,
        q: free.value,
        theta_over_pi: free.strategy.theta() / PI,
        lambda,
        lambda_me,
        eta_sym: detection.eta,
        is_facet: facet.is_facet,
        correlation_form: corr.is_some(),
        lifted_from: lifting.map(|lift| lift.reduced.scenario().to_string()),
        q_me: me.value,
        noclick: detection.strategy.to_string(),
    })
}

/// Analyzes every table concurrently; rows come back in input order.
/// A numeric failure marks its row as failed without stopping the batch.
pub fn analyze(tables: &[CgTable], opts: &AnalyzeOptions) -> Vec<ReportRow> {
    tables
        .par_iter()
        .enumerate()
        .map(|(i, t)| match analyze_table(i + 1, t, opts) {
            Ok(r) => ReportRow::Ok(r),
            Err(err) => ReportRow::Failed {
                index: i + 1,
                name: display_name(i + 1, t),
                scenario: t.scenario().to_string(),
                message: err.to_string(),
            },
        })
        .collect()
}
