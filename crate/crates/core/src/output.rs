//! CSV and JSON output files.
//!
//! Floats are written in `{:.16e}` so every value survives a round trip.
//! Missing values (shock columns of deterministic runs) are empty fields.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::experiments::{Classification, RunRecord, StochasticSummary};
use crate::integrator::{Sample, Trajectory};
use crate::model::{Candidate, Incomes, ModelParams, SystemState, VECTOR_DIM, VECTOR_NAMES};

pub const RUNS_HEADER: [&str; 18] = [
    "run_id",
    "variant",
    "psi",
    "alpha",
    "T_e",
    "sigma_R",
    "d_Is",
    "d_mu",
    "T_s",
    "a",
    "seed",
    "incumbent0",
    "Is_final",
    "class",
    "persisted",
    "welfare",
    "gini",
    "failed",
];

pub const INCOME_NAMES: [&str; 13] = [
    "ys1",
    "ys2",
    "yp1",
    "yp2",
    "ypost1",
    "ypost2",
    "pi1",
    "pi2",
    "Ys_total",
    "Yp_total",
    "L_weighted",
    "e1",
    "e2",
];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn write_runs<W: Write>(w: W, records: &[RunRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RUNS_HEADER).map_err(io)?;
    for r in records {
        out.write_record([
            r.run_id.to_string(),
            r.variant.name().to_string(),
            fmt_f64(r.psi),
            fmt_f64(r.alpha),
            fmt_f64(r.election_period),
            fmt_f64(r.repulsion),
            fmt_f64(r.d_is),
            fmt_f64(r.d_mu),
            r.shock_period.map(fmt_f64).unwrap_or_default(),
            r.shock_magnitude.map(fmt_f64).unwrap_or_default(),
            r.seed.to_string(),
            r.incumbent.name().to_string(),
            fmt_f64(r.shared_final),
            r.class.name().to_string(),
            bit(r.persisted).to_string(),
            fmt_f64(r.welfare),
            fmt_f64(r.gini),
            bit(r.failed).to_string(),
        ])
        .map_err(io)?;
    }
    out.flush().map_err(io)
}

fn field<'a>(rec: &'a csv::StringRecord, i: usize) -> Result<&'a str> {
    rec.get(i)
        .ok_or_else(|| Error::Parse(format!("missing column {i}")))
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{s}` in column {what}")))
}

fn parse_opt(s: &str, what: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, what).map(Some)
    }
}

fn parse_bit(s: &str, what: &str) -> Result<bool> {
    match s {
        "1" => Ok(true),
        "0" => Ok(false),
        _ => Err(Error::Parse(format!("bad flag `{s}` in column {what}"))),
    }
}

pub fn read_runs<R: Read>(r: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(io)?.clone();
    if header.iter().ne(RUNS_HEADER.iter().copied()) {
        return Err(Error::Parse("unexpected runs.csv header".into()));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(io)?;
        let f = |i: usize| field(&rec, i);
        let n = |i: usize| parse_f64(f(i)?, RUNS_HEADER[i]);
        out.push(RunRecord {
            run_id: f(0)?
                .parse()
                .map_err(|_| Error::Parse("bad run_id".into()))?,
            variant: crate::model::PoliticalVariant::from_name(f(1)?)
                .ok_or_else(|| Error::Parse(format!("unknown variant `{}`", f(1).unwrap_or(""))))?,
            psi: n(2)?,
            alpha: n(3)?,
            election_period: n(4)?,
            repulsion: n(5)?,
            d_is: n(6)?,
            d_mu: n(7)?,
            shock_period: parse_opt(f(8)?, "T_s")?,
            shock_magnitude: parse_opt(f(9)?, "a")?,
            seed: f(10)?
                .parse()
                .map_err(|_| Error::Parse("bad seed".into()))?,
            incumbent: crate::model::InitialIncumbent::from_name(f(11)?)
                .ok_or_else(|| Error::Parse("bad incumbent0".into()))?,
            shared_final: n(12)?,
            class: Classification::from_name(f(13)?)
                .ok_or_else(|| Error::Parse("bad class".into()))?,
            persisted: parse_bit(f(14)?, "persisted")?,
            welfare: n(15)?,
            gini: n(16)?,
            failed: parse_bit(f(17)?, "failed")?,
        });
    }
    Ok(out)
}

fn income_values(i: &Incomes) -> [f64; 13] {
    [
        i.shared[0],
        i.shared[1],
        i.private[0],
        i.private[1],
        i.post_tax[0],
        i.post_tax[1],
        i.consumption[0],
        i.consumption[1],
        i.shared_total,
        i.private_total,
        i.weighted_labor,
        i.error[0],
        i.error[1],
    ]
}

pub fn series_header() -> Vec<&'static str> {
    let mut h = vec!["t"];
    h.extend(VECTOR_NAMES);
    h.push("incumbent");
    h.extend(INCOME_NAMES);
    h
}

/// One row per stored sample: time, state vector, incumbent label, incomes.
pub fn write_series<W: Write>(w: W, samples: &[Sample]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(series_header()).map_err(io)?;
    for s in samples {
        let mut row = vec![fmt_f64(s.t)];
        row.extend(s.state.to_vector().iter().map(|v| fmt_f64(*v)));
        row.push(s.state.incumbent.label().to_string());
        row.extend(income_values(&s.incomes).iter().map(|v| fmt_f64(*v)));
        out.write_record(&row).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_series<R: Read>(r: R) -> Result<Vec<Sample>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(io)?.clone();
    let want = series_header();
    if header.iter().ne(want.iter().copied()) {
        return Err(Error::Parse("unexpected series.csv header".into()));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(io)?;
        let n = |i: usize| parse_f64(field(&rec, i)?, want[i]);
        let mut v = [0.0; VECTOR_DIM];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = n(1 + k)?;
        }
        let label: usize = field(&rec, 1 + VECTOR_DIM)?
            .parse()
            .map_err(|_| Error::Parse("bad incumbent label".into()))?;
        if !(1..=2).contains(&label) {
            return Err(Error::Parse(format!("incumbent label {label} not 1 or 2")));
        }
        let o = 2 + VECTOR_DIM;
        let incomes = Incomes {
            shared: [n(o)?, n(o + 1)?],
            private: [n(o + 2)?, n(o + 3)?],
            post_tax: [n(o + 4)?, n(o + 5)?],
            consumption: [n(o + 6)?, n(o + 7)?],
            shared_total: n(o + 8)?,
            private_total: n(o + 9)?,
            weighted_labor: n(o + 10)?,
            error: [n(o + 11)?, n(o + 12)?],
        };
        out.push(Sample {
            t: n(0)?,
            state: SystemState::from_vector(&v, Candidate::from_index(label - 1)),
            incomes,
        });
    }
    Ok(out)
}

/// Wrap stored samples as a trajectory so the classifier can run on them.
pub fn trajectory_from_samples(samples: Vec<Sample>, params: &ModelParams) -> Result<Trajectory> {
    let last = *samples.last().ok_or(Error::EmptyRecords)?;
    Ok(Trajectory {
        samples,
        terminal: last.state,
        terminal_time: last.t,
        events: Vec::new(),
        params: params.clone(),
        failure: None,
        accepted_steps: 0,
        rejected_steps: 0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub kind: String,
    pub config: BTreeMap<String, String>,
    pub config_hash: String,
    pub seed: u64,
    pub workers: usize,
    pub wall_seconds: f64,
    pub rows: usize,
    pub failures: usize,
    pub class_counts: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stochastic: Option<StochasticSummary>,
}

impl Manifest {
    pub fn new(cfg: &RunConfig, records: &[RunRecord], wall_seconds: f64) -> Self {
        let mut class_counts: BTreeMap<String, usize> = Classification::ALL
            .iter()
            .map(|c| (c.name().to_string(), 0))
            .collect();
        for r in records {
            *class_counts.entry(r.class.name().to_string()).or_default() += 1;
        }
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            kind: cfg.kind.name().to_string(),
            config: cfg.entries().into_iter().collect(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            workers: cfg.workers,
            wall_seconds,
            rows: records.len(),
            failures: records.iter().filter(|r| r.failed).count(),
            class_counts,
            stochastic: None,
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self).map_err(io)?;
        writeln!(w).map_err(io)
    }
}

pub fn create_file(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
