use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use spreadlab::bounds::BoundsRow;
use spreadlab::sim::SimReport;
use spreadlab::Arrangement;

use crate::{invalid, Failure, Outcome};

const GRID_LIMIT: usize = 40;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Where a command's result goes: a file, or stdout.
pub struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    pub fn new(path: Option<PathBuf>) -> Self {
        Sink { path }
    }

    pub fn write(&self, text: &str) -> Outcome {
        let mut text = text.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &self.path {
            Some(p) => fs::write(p, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Outcome {
        let text =
            serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
        self.write(&text)
    }

    /// Header row, then one serialized record per row.
    pub fn csv<R: Serialize>(&self, header: &[&str], rows: impl IntoIterator<Item = R>) -> Outcome {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        let err = |e: csv::Error| Failure::Internal(e.to_string());
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.serialize(r).map_err(err)?;
        }
        self.write_bytes(w)
    }

    /// `n,k,l,theorem1_lb,exact_pairing_lb,merge_ub,oracle_opt`, blank
    /// where a value is absent.
    pub fn bounds_csv(&self, rows: &[BoundsRow]) -> Outcome {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)
                .map_err(|e| Failure::Internal(e.to_string()))?;
        }
        self.write_bytes(w)
    }

    fn write_bytes(&self, w: csv::Writer<Vec<u8>>) -> Outcome {
        let bytes = w
            .into_inner()
            .map_err(|e| Failure::Internal(e.to_string()))?;
        self.write(&String::from_utf8(bytes).map_err(|e| Failure::Internal(e.to_string()))?)
    }
}

pub fn fits_grid(a: &Arrangement) -> bool {
    a.shape().sizes().iter().all(|&s| s <= GRID_LIMIT)
}

/// Right-aligned rows, `.` for empty cells.
pub fn grid(a: &Arrangement) -> Outcome<String> {
    if a.shape().k() != 2 {
        return invalid(format!("grids are 2-D, got {}", a.shape()));
    }
    if !fits_grid(a) {
        return invalid(format!(
            "{} exceeds the {GRID_LIMIT}x{GRID_LIMIT} grid limit",
            a.shape()
        ));
    }
    let width = a.m().saturating_sub(1).to_string().len();
    let mut out = String::new();
    for row in a.rows()? {
        let cells: Vec<String> = row
            .iter()
            .map(|v| match v {
                Some(v) => format!("{v:>width$}"),
                None => format!("{:>width$}", "."),
            })
            .collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// `(x, y, value)` with `x` the column and `y` the row.
pub fn plot_rows(a: &Arrangement) -> Vec<(usize, usize, u64)> {
    a.order()
        .iter()
        .enumerate()
        .map(|(v, &i)| {
            let c = a.shape().coords_of(i);
            (c[1], c[0], v as u64)
        })
        .collect()
}

pub fn cells_csv(a: &Arrangement) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Internal(e.to_string());
    let mut header: Vec<String> = (0..a.shape().k()).map(|d| format!("c{d}")).collect();
    header.push("value".into());
    w.write_record(&header).map_err(err)?;
    for (v, &i) in a.order().iter().enumerate() {
        let mut rec: Vec<String> = a
            .shape()
            .coords_of(i)
            .iter()
            .map(|c| c.to_string())
            .collect();
        rec.push(v.to_string());
        w.write_record(&rec).map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Internal(e.to_string()))
}

pub fn bounds_text(rows: &[BoundsRow]) -> String {
    let opt = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
    let mut out = format!(
        "{:>3} {:>2} {:>2} {:>8} {:>8} {:>8} {:>8}\n",
        "n", "k", "l", "thm1_lb", "exact_lb", "merge_ub", "oracle"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>3} {:>2} {:>2} {:>8} {:>8} {:>8} {:>8}\n",
            r.n,
            r.k,
            r.l,
            opt(r.theorem1_lb),
            r.exact_pairing_lb,
            r.merge_ub,
            opt(r.oracle_opt)
        ));
    }
    out
}

pub fn sim_text(r: &SimReport) -> String {
    let e = &r.empirical;
    let mut out = format!(
        "{} trials, {} with every channel down; mean error {:.4}, max error {}, widest interval {}, {}\n",
        e.trials,
        e.all_failed,
        e.mean,
        e.max,
        e.max_width,
        if e.sound { "sound" } else { "UNSOUND" }
    );
    for p in &e.per_pattern {
        out.push_str(&format!(
            "mask {:>2}: D {:>4}, {:>7} trials, mean {:.4}, max {}\n",
            p.pattern, r.d[p.pattern as usize], p.trials, p.mean, p.max
        ));
    }
    out
}
