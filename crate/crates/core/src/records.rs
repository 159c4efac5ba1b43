//! Tab-separated record tables. Numbers are written with 12 significant digits so that
//! identical runs produce identical bytes and diffs stay meaningful.

use num_complex::Complex64;

use crate::dimension::{AreaVerdict, SweepResult};
use crate::gibbs::GibbsMeasure;
use crate::pressure::{BowenDimension, BowenResult, ContinuityScan};
use crate::transversality::{ScanReport, SearchReport};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` in scientific notation with [`SIGNIFICANT_DIGITS`] digits; `0`, `inf`, `-inf`, `nan`
/// are spelled out.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), num)
}

fn text(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Header row plus records, LF line endings.
    pub fn body(&self) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out
    }
}

fn t_cells(t: Complex64) -> [String; 2] {
    [num(t.re), num(t.im)]
}

fn bowen_cells(result: &BowenResult) -> Vec<String> {
    let s = match result.dimension {
        BowenDimension::Finite(s) => num(s),
        BowenDimension::Infinite => "inf".into(),
    };
    vec![
        s,
        num(result.residual),
        result.depth.to_string(),
        num(result.spread),
        num(result.bracket.0),
        num(result.bracket.1),
    ]
}

pub fn pressure_table(rows: &[(Complex64, Result<BowenResult, String>)]) -> Table {
    let mut table = Table::new(&[
        "t_re", "t_im", "s", "residual", "depth", "spread", "bracket_lo", "bracket_hi", "error",
    ]);
    for (t, result) in rows {
        let mut row: Vec<String> = t_cells(*t).to_vec();
        match result {
            Ok(r) => {
                row.extend(bowen_cells(r));
                row.push("-".into());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n("-".to_string(), 6));
                row.push(text(e));
            }
        }
        table.push(row);
    }
    table
}

pub fn continuity_table(scan: &ContinuityScan) -> Table {
    let mut table = Table::new(&["t_re", "t_im", "s", "residual", "delta_s", "ratio"]);
    for row in &scan.rows {
        let cells = bowen_cells(&row.result);
        let mut out: Vec<String> = t_cells(row.t).to_vec();
        out.extend([cells[0].clone(), cells[1].clone(), opt(row.delta_s), opt(row.ratio)]);
        table.push(out);
    }
    table
}

pub fn sweep_table(result: &SweepResult) -> Table {
    let mut table = Table::new(&[
        "t_re",
        "t_im",
        "s",
        "target",
        "box_estimate",
        "raw_box_estimate",
        "residual",
        "eps_min",
        "eps_max",
        "area_second_finest",
        "area_finest",
        "verdict",
        "conforming",
        "error",
    ]);
    for r in &result.records {
        let s = match r.bowen {
            Some(BowenDimension::Finite(s)) => num(s),
            Some(BowenDimension::Infinite) => "inf".into(),
            None => "-".into(),
        };
        let est = r.box_estimate.as_ref();
        let (lo, hi) = est.map_or((None, None), |e| {
            let (lo, hi) = e.fit_range();
            (Some(lo), Some(hi))
        });
        let area = r.area.as_ref();
        let finest = |back: usize| {
            area.and_then(|a| a.rows.len().checked_sub(back).map(|i| a.rows[i].2))
        };
        let verdict = match area.map(|a| a.verdict) {
            Some(AreaVerdict::PositiveAreaConsistent) => "positive-area-consistent",
            Some(AreaVerdict::Inconclusive) => "inconclusive",
            None => "dimension-match",
        };
        let mut row: Vec<String> = t_cells(r.t).to_vec();
        row.extend([
            s,
            opt(r.target),
            opt(est.map(|e| e.estimate)),
            opt(r.raw_box_estimate.as_ref().map(|e| e.estimate)),
            opt(est.map(|e| e.residual)),
            opt(lo),
            opt(hi),
            opt(finest(2)),
            opt(finest(1)),
            verdict.into(),
            r.conforming.to_string(),
            r.error.as_deref().map_or("-".into(), text),
        ]);
        table.push(row);
    }
    table
}

pub fn scan_table(report: &ScanReport) -> Table {
    let mut table = Table::new(&["n", "c_hat", "log_c_over_n", "c_over_n2", "worst_pair"]);
    for r in &report.rows {
        table.push(vec![
            r.level.to_string(),
            num(r.c_hat),
            num(r.log_c_over_n),
            num(r.c_over_n2),
            r.worst_pair.to_string(),
        ]);
    }
    table
}

pub fn search_table(report: &SearchReport) -> Table {
    let mut table = Table::new(&[
        "trials",
        "below_threshold",
        "threshold",
        "worst_value",
        "worst_t_re",
        "worst_t_im",
        "worst_trial",
    ]);
    let w = &report.worst;
    table.push(vec![
        report.trials.to_string(),
        report.below_threshold.to_string(),
        num(report.threshold),
        num(w.value),
        num(w.t.re),
        num(w.t.im),
        w.trial.to_string(),
    ]);
    table
}

pub fn gibbs_table(measure: &GibbsMeasure) -> Table {
    let mut table = Table::new(&["word", "mass"]);
    for (word, mass) in measure.records() {
        table.push(vec![word.to_string(), num(mass)]);
    }
    table
}
