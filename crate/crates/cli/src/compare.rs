//! Column-wise comparison of two report CSVs.

use std::collections::BTreeMap;
use std::fmt;

use crate::report::ReportRecord;

pub const DEFAULT_TOL: f64 = 2e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub tol: f64,
    /// Per-column overrides of `tol`, keyed by column name.
    pub column_tol: BTreeMap<String, f64>,
    /// Compare `L - N` and `Q - L` instead of the raw `L`, `N` and `Q`,
    /// which depend on how the inequality is normalized.
    pub normalized: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            tol: DEFAULT_TOL,
            column_tol: BTreeMap::new(),
            normalized: false,
        }
    }
}

impl CompareOptions {
    fn tol_for(&self, column: &str) -> f64 {
        self.column_tol.get(column).copied().unwrap_or(self.tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDiff {
    pub row: usize,
    pub name: String,
    pub column: &'static str,
    pub report: Option<f64>,
    pub reference: Option<f64>,
    pub tol: f64,
}

impl ColumnDiff {
    pub fn abs_diff(&self) -> Option<f64> {
        Some((self.report? - self.reference?).abs())
    }

    /// Missing reference values are not compared; a missing report value
    /// where the reference has one is a failure.
    pub fn ok(&self) -> bool {
        match (self.report, self.reference) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => (a - b).abs() <= self.tol,
        }
    }
}

impl fmt::Display for ColumnDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6}"));
        write!(
            f,
            "row {} ({}) {}: report {} reference {} |diff| {} tol {} {}",
            self.row,
            self.name,
            self.column,
            show(self.report),
            show(self.reference),
            show(self.abs_diff()),
            self.tol,
            if self.ok() { "ok" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompareSummary {
    pub structural: Vec<String>,
    pub diffs: Vec<ColumnDiff>,
    /// Failing rows that match a different reference row within tolerance,
    /// as `(row, reference row)` pairs, both 1-based.
    pub better_matches: Vec<(usize, usize)>,
}

impl CompareSummary {
    pub fn passed(&self) -> bool {
        self.structural.is_empty() && self.diffs.iter().all(ColumnDiff::ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ColumnDiff> {
        self.diffs.iter().filter(|d| !d.ok())
    }
}

impl fmt::Display for CompareSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.structural {
            writeln!(f, "structural: {s}")?;
        }
        for d in &self.diffs {
            writeln!(f, "{d}")?;
        }
        for (row, reference) in &self.better_matches {
            writeln!(
                f,
                "hint: row {row} matches reference row {reference} within tolerance"
            )?;
        }
        let failed = self.failures().count();
        writeln!(
            f,
            "{} comparisons, {} outside tolerance: {}",
            self.diffs.len(),
            failed,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn sub(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? - b?)
}

fn columns(r: &ReportRecord, normalized: bool) -> Vec<(&'static str, Option<f64>)> {
    let mut out = if normalized {
        vec![("L-N", sub(r.l, r.n)), ("Q-L", sub(r.q, r.l))]
    } else {
        vec![("L", r.l), ("N", r.n), ("Q", r.q)]
    };
    out.extend([
        ("theta_over_pi", r.theta_over_pi),
        ("lambda", r.lambda),
        ("lambda_me", r.lambda_me),
        ("eta_sym", r.eta_sym),
    ]);
    out
}

fn row_diffs(
    row: usize,
    report: &ReportRecord,
    reference: &ReportRecord,
    opts: &CompareOptions,
) -> Vec<ColumnDiff> {
    columns(report, opts.normalized)
        .into_iter()
        .zip(columns(reference, opts.normalized))
        .map(|((column, a), (_, b))| ColumnDiff {
            row,
            name: report.name.clone(),
            column,
            report: a,
            reference: b,
            tol: opts.tol_for(column),
        })
        .collect()
}

/// Compares rows pairwise in file order.
pub fn compare(
    report: &[ReportRecord],
    reference: &[ReportRecord],
    opts: &CompareOptions,
) -> CompareSummary {
    let mut summary = CompareSummary::default();
    if report.len() != reference.len() {
        summary.structural.push(format!(
            "report has {} rows, reference has {}",
            report.len(),
            reference.len()
        ));
    }
    for (i, (a, b)) in report.iter().zip(reference).enumerate() {
        if a.name != b.name {
            summary.structural.push(format!(
                "row {}: name `{}` vs reference `{}`",
                i + 1,
                a.name,
                b.name
            ));
        }
        summary.diffs.extend(row_diffs(i + 1, a, b, opts));
    }

    // Rows whose own reference fails may simply be listed in another order.
    for (i, a) in report.iter().enumerate() {
        let own_ok = reference
            .get(i)
            .is_some_and(|b| row_diffs(i + 1, a, b, opts).iter().all(ColumnDiff::ok));
        if own_ok {
            continue;
        }
        if let Some(j) = reference
            .iter()
            .enumerate()
            .find(|&(j, b)| j != i && row_diffs(i + 1, a, b, opts).iter().all(ColumnDiff::ok))
            .map(|(j, _)| j)
        {
            summary.better_matches.push((i + 1, j + 1));
        }
    }
    summary
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    fn rec(name: &str, l: f64, n: f64, q: f64, lambda: f64) -> ReportRecord {
        ReportRecord {
            index: 1,
            name: name.into(),
            scenario: "2x2".into(),
            l: Some(l),
            n: Some(n),
            q: Some(q),
            theta_over_pi: Some(0.25),
            lambda: Some(lambda),
            lambda_me: Some(lambda),
            eta_sym: Some(0.8284),
            facet: None,
            correlation_form: None,
            lifted_from: None,
        }
    }

    #[test]
    fn identical_reports_pass() {
        let r = vec![rec("CHSH", 0.0, -0.5, 0.207107, 0.707107)];
        let s = compare(&r, &r, &CompareOptions::default());
        assert!(s.passed());
        assert!(s.diffs.iter().all(|d| d.abs_diff() == Some(0.0)));
    }

    #[test]
    fn normalized_ignores_shift() {
        let ours = vec![rec("CHSH", 0.0, -0.5, 0.207107, 0.707107)];
        let printed = vec![rec("CHSH", 1.0, 0.5, 1.2071, 0.7071)];
        assert!(!compare(&ours, &printed, &CompareOptions::default()).passed());
        let opts = CompareOptions {
            normalized: true,
            ..Default::default()
        };
        assert!(compare(&ours, &printed, &opts).passed());
    }

    #[test]
    fn perturbed_column_is_named() {
        let mut a = vec![rec("CHSH", 0.0, -0.5, 0.207107, 0.717107)];
        a[0].lambda_me = Some(0.707107);
        let b = vec![rec("CHSH", 0.0, -0.5, 0.207107, 0.707107)];
        let s = compare(&a, &b, &CompareOptions::default());
        assert!(!s.passed());
        let f: Vec<_> = s.failures().collect();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].row, f[0].column), (1, "lambda"));
        assert!(s.to_string().contains("row 1 (CHSH) lambda"));
    }

    #[test]
    fn column_override() {
        let mut a = vec![rec("CHSH", 0.0, -0.5, 0.207107, 0.717107)];
        a[0].lambda_me = Some(0.707107);
        let b = vec![rec("CHSH", 0.0, -0.5, 0.207107, 0.707107)];
        let mut opts = CompareOptions::default();
        opts.column_tol.insert("lambda".into(), 0.02);
        opts.column_tol.insert("lambda_me".into(), 0.02);
        assert!(compare(&a, &b, &opts).passed());
    }

    #[test]
    fn structural_differences() {
        let a = vec![rec("A", 0.0, 0.0, 0.1, 0.9)];
        let b = vec![rec("B", 0.0, 0.0, 0.1, 0.9), rec("C", 0.0, 0.0, 0.1, 0.9)];
        let s = compare(&a, &b, &CompareOptions::default());
        assert!(!s.passed());
        assert_eq!(s.structural.len(), 2);
    }

    #[test]
    fn swapped_rows_hinted() {
        let x = rec("X", 0.0, -0.5, 0.2, 0.7);
        let y = rec("X", 0.0, -0.5, 0.3, 0.6);
        let s = compare(&[x.clone(), y.clone()], &[y, x], &CompareOptions::default());
        assert!(!s.passed());
        assert_eq!(s.better_matches, vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn missing_report_value_fails() {
        let mut a = rec("A", 0.0, 0.0, 0.1, 0.9);
        a.eta_sym = None;
        let b = rec("A", 0.0, 0.0, 0.1, 0.9);
        assert!(!compare(
            std::slice::from_ref(&a),
            std::slice::from_ref(&b),
            &CompareOptions::default()
        )
        .passed());
        // The reverse direction only skips the cell.
        assert!(compare(&[b], &[a], &CompareOptions::default()).passed());
    }
}
