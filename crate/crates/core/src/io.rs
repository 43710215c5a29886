//! CSV artifacts: field snapshots, run reports, stage logs and
//! convergence tables.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which
//! round-trips every finite `f64`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::diagnostics::{ErrorReport, Norm};
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::Grid;
use crate::solver::StageRecord;
use crate::velocity::StreamCase;

pub const FIELD_HEADER: [&str; 5] = ["i", "j", "x_center", "y_center", "value"];
pub const REPORT_HEADER: [&str; 16] = [
    "scheme",
    "limiter",
    "case",
    "ic",
    "nx",
    "ny",
    "n_steps",
    "dt",
    "time",
    "rel_l1",
    "rel_l2",
    "rel_linf",
    "min",
    "max",
    "max_mp_violation",
    "max_courant",
];
pub const STAGES_HEADER: [&str; 5] = ["step", "stage", "t", "courant", "mp_violation"];
pub const ERRORS_HEADER: [&str; 9] = [
    "scheme",
    "limiter",
    "case",
    "n",
    "rel_l1",
    "rel_l2",
    "rel_linf",
    "max_mp_violation",
    "max_courant",
];
pub const ORDERS_HEADER: [&str; 9] = [
    "scheme", "limiter", "norm", "n_coarse", "n_fine", "diag", "quad", "sin", "sbr",
];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn parse_f64(s: &str, column: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Csv(format!("column {column}: cannot parse {s:?} as a number")))
}

fn parse_opt(s: &str, column: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(s, column).map(Some)
    }
}

fn parse_usize(s: &str, column: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Csv(format!("column {column}: cannot parse {s:?} as an index")))
}

/// Render a headered table to CSV text.
pub fn to_csv<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Csv(e.to_string()))
}

/// Parse CSV text whose header must equal `header`.
pub fn from_csv(text: impl Read, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_reader(text);
    let got = r.headers()?.clone();
    if got.len() != header.len() {
        return Err(Error::Csv(format!(
            "expected {} columns, found {}",
            header.len(),
            got.len()
        )));
    }
    if let Some((want, found)) = header.iter().zip(got.iter()).find(|(w, g)| *w != g) {
        return Err(Error::Csv(format!("expected column {want:?}, found {found:?}")));
    }
    r.records().map(|rec| Ok(rec?)).collect()
}

pub fn field_csv(u: &CellField, grid: &Grid) -> Result<String> {
    u.check_grid(grid)?;
    let rows = (0..grid.ny()).flat_map(|j| {
        (0..grid.nx()).map(move |i| {
            vec![
                i.to_string(),
                j.to_string(),
                fmt_f64(grid.x_center(i)),
                fmt_f64(grid.y_center(j)),
                fmt_f64(u.get(i, j)),
            ]
        })
    });
    to_csv(&FIELD_HEADER, rows)
}

/// Read a field snapshot; the grid shape is taken from the largest indices
/// and every cell must appear exactly once.
pub fn read_field(text: impl Read) -> Result<CellField> {
    let recs = from_csv(text, &FIELD_HEADER)?;
    let cells = recs
        .iter()
        .map(|r| {
            Ok((
                parse_usize(&r[0], "i")?,
                parse_usize(&r[1], "j")?,
                parse_f64(&r[4], "value")?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let nx = cells.iter().map(|c| c.0 + 1).max().unwrap_or(0);
    let ny = cells.iter().map(|c| c.1 + 1).max().unwrap_or(0);
    if cells.len() != nx * ny {
        return Err(Error::Csv(format!(
            "{} rows do not cover a {nx}x{ny} grid",
            cells.len()
        )));
    }
    let mut data = vec![f64::NAN; nx * ny];
    let mut seen = vec![false; nx * ny];
    for (i, j, v) in cells {
        let k = j * nx + i;
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::Csv(format!("cell ({i}, {j}) appears twice")));
        }
        data[k] = v;
    }
    CellField::from_vec(nx, ny, data)
}

/// Identifies the run a report row belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scheme: String,
    pub limiter: String,
    pub case: String,
    pub ic: String,
    pub nx: usize,
    pub ny: usize,
    pub n_steps: usize,
    pub dt: f64,
    pub time: f64,
    pub report: ErrorReport,
}

pub fn report_csv(rows: &[ReportRow]) -> Result<String> {
    to_csv(
        &REPORT_HEADER,
        rows.iter().map(|r| {
            let e = &r.report;
            vec![
                r.scheme.clone(),
                r.limiter.clone(),
                r.case.clone(),
                r.ic.clone(),
                r.nx.to_string(),
                r.ny.to_string(),
                r.n_steps.to_string(),
                fmt_f64(r.dt),
                fmt_f64(r.time),
                fmt_f64(e.rel_l1),
                fmt_f64(e.rel_l2),
                fmt_f64(e.rel_linf),
                fmt_f64(e.min),
                fmt_f64(e.max),
                fmt_opt(e.max_mp_violation),
                fmt_f64(e.max_courant),
            ]
        }),
    )
}

pub fn read_report(text: impl Read) -> Result<Vec<ReportRow>> {
    from_csv(text, &REPORT_HEADER)?
        .iter()
        .map(|r| {
            Ok(ReportRow {
                scheme: r[0].to_string(),
                limiter: r[1].to_string(),
                case: r[2].to_string(),
                ic: r[3].to_string(),
                nx: parse_usize(&r[4], "nx")?,
                ny: parse_usize(&r[5], "ny")?,
                n_steps: parse_usize(&r[6], "n_steps")?,
                dt: parse_f64(&r[7], "dt")?,
                time: parse_f64(&r[8], "time")?,
                report: ErrorReport {
                    rel_l1: parse_f64(&r[9], "rel_l1")?,
                    rel_l2: parse_f64(&r[10], "rel_l2")?,
                    rel_linf: parse_f64(&r[11], "rel_linf")?,
                    min: parse_f64(&r[12], "min")?,
                    max: parse_f64(&r[13], "max")?,
                    max_mp_violation: parse_opt(&r[14], "max_mp_violation")?,
                    max_courant: parse_f64(&r[15], "max_courant")?,
                },
            })
        })
        .collect()
}

pub fn stages_csv(log: &[StageRecord]) -> Result<String> {
    to_csv(
        &STAGES_HEADER,
        log.iter().map(|s| {
            vec![
                s.step.to_string(),
                s.stage.to_string(),
                fmt_f64(s.t),
                fmt_f64(s.courant),
                fmt_opt(s.mp_violation),
            ]
        }),
    )
}

pub fn read_stages(text: impl Read) -> Result<Vec<StageRecord>> {
    from_csv(text, &STAGES_HEADER)?
        .iter()
        .map(|r| {
            Ok(StageRecord {
                step: parse_usize(&r[0], "step")?,
                stage: parse_usize(&r[1], "stage")?,
                t: parse_f64(&r[2], "t")?,
                courant: parse_f64(&r[3], "courant")?,
                mp_violation: parse_opt(&r[4], "mp_violation")?,
            })
        })
        .collect()
}

/// Errors of one run in a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub scheme: String,
    pub limiter: String,
    pub case: StreamCase,
    pub n: usize,
    pub report: ErrorReport,
}

pub fn errors_csv(rows: &[ErrorRow]) -> Result<String> {
    to_csv(
        &ERRORS_HEADER,
        rows.iter().map(|r| {
            vec![
                r.scheme.clone(),
                r.limiter.clone(),
                r.case.name().to_string(),
                r.n.to_string(),
                fmt_f64(r.report.rel_l1),
                fmt_f64(r.report.rel_l2),
                fmt_f64(r.report.rel_linf),
                fmt_opt(r.report.max_mp_violation),
                fmt_f64(r.report.max_courant),
            ]
        }),
    )
}

/// Observed orders of one scheme/limiter/norm between two resolutions,
/// one column per flow case in the order Diag, Quad, Sin, Sbr.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow {
    pub scheme: String,
    pub limiter: String,
    pub norm: Norm,
    pub n_coarse: usize,
    pub n_fine: usize,
    pub orders: [Option<f64>; 4],
}

impl OrderRow {
    pub fn order(&self, case: StreamCase) -> Option<f64> {
        self.orders[case_column(case)]
    }
}

pub fn case_column(case: StreamCase) -> usize {
    match case {
        StreamCase::Diag => 0,
        StreamCase::Quad { .. } => 1,
        StreamCase::Sin { .. } => 2,
        StreamCase::Sbr { .. } => 3,
    }
}

pub fn orders_csv(rows: &[OrderRow]) -> Result<String> {
    to_csv(
        &ORDERS_HEADER,
        rows.iter().map(|r| {
            let mut rec = vec![
                r.scheme.clone(),
                r.limiter.clone(),
                r.norm.name().to_string(),
                r.n_coarse.to_string(),
                r.n_fine.to_string(),
            ];
            rec.extend(r.orders.iter().map(|o| fmt_opt(*o)));
            rec
        }),
    )
}

pub fn read_orders(text: impl Read) -> Result<Vec<OrderRow>> {
    from_csv(text, &ORDERS_HEADER)?
        .iter()
        .map(|r| {
            let norm = Norm::parse(&r[2]).ok_or_else(|| Error::Csv(format!("column norm: unknown {:?}", &r[2])))?;
            let mut orders = [None; 4];
            for (c, o) in orders.iter_mut().enumerate() {
                *o = parse_opt(&r[5 + c], ORDERS_HEADER[5 + c])?;
            }
            Ok(OrderRow {
                scheme: r[0].to_string(),
                limiter: r[1].to_string(),
                norm,
                n_coarse: parse_usize(&r[3], "n_coarse")?,
                n_fine: parse_usize(&r[4], "n_fine")?,
                orders,
            })
        })
        .collect()
}

/// Write every `(name, contents)` pair into `dir`, or none of them.
///
/// Contents go to hidden temporary files first and are renamed into place
/// only after all of them were written.
pub fn write_all(dir: &Path, files: &[(&str, &str)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(files.len());
    let result = (|| {
        for (name, contents) in files {
            let tmp = dir.join(format!(".{name}.partial"));
            staged.push(tmp.clone());
            let mut f = fs::File::create(&tmp)?;
            f.write_all(contents.as_bytes())?;
            f.sync_all()?;
        }
        for (tmp, (name, _)) in staged.iter().zip(files) {
            fs::rename(tmp, dir.join(name))?;
        }
        Ok(())
    })();
    if result.is_err() {
        for tmp in &staged {
            let _ = fs::remove_file(tmp);
        }
    }
    result
}
