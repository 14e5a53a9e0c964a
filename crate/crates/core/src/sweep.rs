//! Parameter sweeps, sudden-death thresholds and figure datasets.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::channels::{evolve, ChannelKind, ChannelSpec, Coupling, GlobalMode};
use crate::entanglement::negativity;
use crate::error::{Error, Result};
use crate::format::sig;
use crate::state::{unruh_state, Acceleration};

/// Negativity at or below this value counts as sudden death.
pub const ESD_NEGATIVITY_TOL: f64 = 1e-12;
/// Step of the coarse scan preceding bisection.
pub const ESD_COARSE_STEP: f64 = 0.01;
pub const DEFAULT_STEPS: usize = 101;

pub const CSV_HEADER: &str = "channel,coupling,global_mode,p1,p2,p,r,negativity,min_pt_eigenvalue";

/// Evenly spaced values from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub count: usize,
    pub start: f64,
    pub end: f64,
}

impl GridAxis {
    pub fn new(count: usize, start: f64, end: f64) -> Self {
        Self { count, start, end }
    }

    pub fn fixed(value: f64) -> Self {
        Self::new(1, value, value)
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.end
                    } else {
                        self.start + (self.end - self.start) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }

    fn check(&self, name: &str, min: f64, max: f64) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidSweep(format!("{name} grid is empty")));
        }
        let ok = |x: f64| (min..=max).contains(&x);
        if !ok(self.start) || !ok(self.end) || self.start > self.end {
            return Err(Error::InvalidSweep(format!(
                "{name} range [{}, {}] is not within [{min}, {max}]",
                self.start, self.end
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    P,
    R,
    /// Both `p` (outer) and `r` (inner).
    PAndR,
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p" => Ok(Axis::P),
            "r" => Ok(Axis::R),
            "grid" | "p-and-r" | "p_and_r" => Ok(Axis::PAndR),
            other => Err(format!("unknown axis `{other}` (expected p, r or grid)")),
        }
    }
}

/// How a swept decoherence value maps onto `(p1, p2, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PLinkage {
    /// `p1 = p2 = value`, plus `p = value` under global coupling.
    #[default]
    Linked,
    /// Only the collective `p` varies; `p1`, `p2` come from the template.
    Independent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Kind, coupling, mode and variant; its strengths are used as the
    /// fixed local values under [`PLinkage::Independent`].
    pub channel: ChannelSpec,
    pub axis: Axis,
    pub linkage: PLinkage,
    pub p_grid: GridAxis,
    pub r_grid: GridAxis,
}

impl SweepSpec {
    /// Negativity against `p` at fixed `r`.
    pub fn p_curve(channel: ChannelSpec, r: Acceleration, steps: usize) -> Self {
        Self {
            channel,
            axis: Axis::P,
            linkage: PLinkage::Linked,
            p_grid: GridAxis::new(steps, 0.0, 1.0),
            r_grid: GridAxis::fixed(r.radians()),
        }
    }

    /// Negativity against `r` at fixed `p`.
    pub fn r_curve(channel: ChannelSpec, p: f64, steps: usize) -> Self {
        Self {
            channel,
            axis: Axis::R,
            linkage: PLinkage::Linked,
            p_grid: GridAxis::fixed(p),
            r_grid: GridAxis::new(steps, 0.0, FRAC_PI_4),
        }
    }

    pub fn surface(channel: ChannelSpec, p_steps: usize, r_steps: usize) -> Self {
        Self {
            channel,
            axis: Axis::PAndR,
            linkage: PLinkage::Linked,
            p_grid: GridAxis::new(p_steps, 0.0, 1.0),
            r_grid: GridAxis::new(r_steps, 0.0, FRAC_PI_4),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.p_grid.check("p", 0.0, 1.0)?;
        self.r_grid.check("r", 0.0, FRAC_PI_4)?;
        match self.axis {
            Axis::P if self.r_grid.count != 1 => {
                return Err(Error::InvalidSweep(
                    "a p sweep needs a single fixed r".into(),
                ))
            }
            Axis::R if self.p_grid.count != 1 => {
                return Err(Error::InvalidSweep(
                    "an r sweep needs a single fixed p".into(),
                ))
            }
            _ => {}
        }
        if self.linkage == PLinkage::Independent && self.channel.coupling == Coupling::Multilocal {
            return Err(Error::InvalidSweep(
                "independent linkage sweeps the collective p, which multilocal coupling lacks"
                    .into(),
            ));
        }
        Ok(())
    }

    fn strengths(&self, value: f64) -> (f64, f64, f64) {
        match (self.linkage, self.channel.coupling) {
            (PLinkage::Linked, Coupling::Multilocal) => (value, value, 0.0),
            (PLinkage::Linked, Coupling::Global) => (value, value, value),
            (PLinkage::Independent, _) => (self.channel.p1, self.channel.p2, value),
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub kind: ChannelKind,
    pub coupling: Coupling,
    pub global_mode: Option<GlobalMode>,
    pub p1: f64,
    pub p2: f64,
    pub p: f64,
    pub r: f64,
    pub negativity: f64,
    pub min_pt_eigenvalue: f64,
}

impl SweepRecord {
    fn curve_key(&self) -> (ChannelKind, Coupling, Option<GlobalMode>) {
        (self.kind, self.coupling, self.global_mode)
    }
}

/// Evaluates one channel configuration at one acceleration.
pub fn evaluate_point(spec: &ChannelSpec, r: Acceleration) -> Result<SweepRecord> {
    let rho = evolve(&unruh_state(r), spec)?;
    let spectrum = negativity(&rho)?;
    Ok(SweepRecord {
        kind: spec.kind,
        coupling: spec.coupling,
        global_mode: (spec.coupling == Coupling::Global).then_some(spec.global_mode),
        p1: spec.p1,
        p2: spec.p2,
        p: spec.p,
        r: r.radians(),
        negativity: spectrum.negativity,
        min_pt_eigenvalue: spectrum.min_eigenvalue,
    })
}

/// One record per grid point, ordered by `p` then `r`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let rs = spec.r_grid.values();
    let points: Vec<(f64, f64)> = spec
        .p_grid
        .values()
        .into_iter()
        .flat_map(|p| rs.iter().map(move |&r| (p, r)))
        .collect();
    points
        .par_iter()
        .map(|&(value, r)| {
            let (p1, p2, p) = spec.strengths(value);
            let channel = spec.channel.with_strengths(p1, p2, p)?;
            evaluate_point(&channel, Acceleration::new(r)?)
        })
        .collect()
}

/// Smallest linked strength at which the negativity vanishes.
///
/// A coarse scan in steps of [`ESD_COARSE_STEP`] finds the first grid value
/// with negativity at or below [`ESD_NEGATIVITY_TOL`], then bisection narrows
/// the bracket to `p_tol` and returns its upper end. A first crossing only at
/// `p = 1` is the fully decohered endpoint, not sudden death, and gives `None`.
pub fn esd_threshold(channel: &ChannelSpec, r: Acceleration, p_tol: f64) -> Result<Option<f64>> {
    if p_tol.is_nan() || p_tol <= 0.0 {
        return Err(Error::InvalidSweep(format!(
            "p_tol must be positive, got {p_tol}"
        )));
    }
    let dead = |value: f64| -> Result<bool> {
        let (p1, p2, p) = match channel.coupling {
            Coupling::Multilocal => (value, value, 0.0),
            Coupling::Global => (value, value, value),
        };
        let spec = channel.with_strengths(p1, p2, p)?;
        Ok(evaluate_point(&spec, r)?.negativity <= ESD_NEGATIVITY_TOL)
    };

    let steps = (1.0 / ESD_COARSE_STEP).round() as usize;
    let coarse = GridAxis::new(steps + 1, 0.0, 1.0).values();
    let flags: Vec<bool> = coarse.par_iter().map(|&v| dead(v)).collect::<Result<_>>()?;
    let first = match flags.iter().position(|&d| d) {
        None => return Ok(None),
        Some(i) if i == coarse.len() - 1 => return Ok(None),
        Some(0) => return Ok(Some(0.0)),
        Some(i) => i,
    };

    let (mut lo, mut hi) = (coarse[first - 1], coarse[first]);
    while hi - lo > p_tol {
        let mid = 0.5 * (lo + hi);
        if dead(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn mode_str(mode: Option<GlobalMode>) -> &'static str {
    mode.map_or("none", GlobalMode::as_str)
}

/// Writes the CSV form of `records` to any sink; returns the row count.
pub fn write_csv_to<W: Write>(records: &[SweepRecord], out: &mut W) -> std::io::Result<usize> {
    writeln!(out, "{CSV_HEADER}")?;
    for rec in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            rec.kind,
            rec.coupling,
            mode_str(rec.global_mode),
            sig(rec.p1),
            sig(rec.p2),
            sig(rec.p),
            sig(rec.r),
            sig(rec.negativity),
            sig(rec.min_pt_eigenvalue),
        )?;
    }
    Ok(records.len())
}

/// Writes gnuplot-style blocks, one per curve, separated by blank lines;
/// returns the block count.
pub fn write_plot_data_to<W: Write>(
    records: &[SweepRecord],
    out: &mut W,
) -> std::io::Result<usize> {
    let mut blocks = 0;
    let mut current = None;
    for rec in records {
        let key = rec.curve_key();
        if current != Some(key) {
            if blocks > 0 {
                writeln!(out)?;
            }
            writeln!(
                out,
                "# channel={} coupling={} global_mode={}",
                rec.kind,
                rec.coupling,
                mode_str(rec.global_mode)
            )?;
            writeln!(out, "# p1 p2 p r negativity min_pt_eigenvalue")?;
            current = Some(key);
            blocks += 1;
        }
        writeln!(
            out,
            "{} {} {} {} {} {}",
            sig(rec.p1),
            sig(rec.p2),
            sig(rec.p),
            sig(rec.r),
            sig(rec.negativity),
            sig(rec.min_pt_eigenvalue)
        )?;
    }
    Ok(blocks)
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a temporary file in the destination directory, then renames.
pub(crate) fn write_atomically<T>(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<&mut tempfile::NamedTempFile>) -> std::io::Result<T>,
) -> Result<T> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_error(path))?;
    let value = {
        let mut w = BufWriter::new(&mut tmp);
        let value = body(&mut w).map_err(io_error(path))?;
        w.flush().map_err(io_error(path))?;
        value
    };
    tmp.persist(path).map_err(|e| io_error(path)(e.error))?;
    Ok(value)
}

fn require_records(records: &[SweepRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidSweep("no records to write".into()));
    }
    Ok(())
}

pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<usize> {
    require_records(records)?;
    write_atomically(path, |w| write_csv_to(records, w))
}

pub fn write_plot_data(records: &[SweepRecord], path: &Path) -> Result<usize> {
    require_records(records)?;
    write_atomically(path, |w| write_plot_data_to(records, w))
}

/// Parses CSV produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("unexpected header `{header}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty input".into(),
            })
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(err(format!("expected 9 fields, found {}", fields.len())));
        }
        let num = |i: usize| -> Result<f64> {
            let v: f64 = fields[i]
                .parse()
                .map_err(|_| err(format!("field {} is not a number: `{}`", i + 1, fields[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(format!("field {} is not finite", i + 1)))
            }
        };
        let global_mode = match fields[2] {
            "none" => None,
            other => Some(other.parse::<GlobalMode>().map_err(err)?),
        };
        records.push(SweepRecord {
            kind: fields[0].parse().map_err(err)?,
            coupling: fields[1].parse().map_err(err)?,
            global_mode,
            p1: num(3)?,
            p2: num(4)?,
            p: num(5)?,
            r: num(6)?,
            negativity: num(7)?,
            min_pt_eigenvalue: num(8)?,
        });
    }
    Ok(records)
}

/// Figure-reproduction presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    F1a,
    F1b,
    F1c,
    F1d,
    F2a,
    F2b,
    F2c,
    F2d,
    F3,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::F1a,
        Figure::F1b,
        Figure::F1c,
        Figure::F1d,
        Figure::F2a,
        Figure::F2b,
        Figure::F2c,
        Figure::F2d,
        Figure::F3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::F1a => "1a",
            Figure::F1b => "1b",
            Figure::F1c => "1c",
            Figure::F1d => "1d",
            Figure::F2a => "2a",
            Figure::F2b => "2b",
            Figure::F2c => "2c",
            Figure::F2d => "2d",
            Figure::F3 => "3",
        }
    }

    fn coupling(self) -> Coupling {
        match self {
            Figure::F1a | Figure::F1b | Figure::F1c | Figure::F1d => Coupling::Multilocal,
            _ => Coupling::Global,
        }
    }

    /// One sweep per channel kind, overlaid in the output.
    pub fn sweeps(self) -> Vec<SweepSpec> {
        let coupling = self.coupling();
        ChannelKind::ALL
            .iter()
            .map(|&kind| {
                let channel =
                    ChannelSpec::new(kind, coupling, 0.0, 0.0, 0.0).expect("zero strengths");
                let at = |r: f64| Acceleration::new(r).expect("preset angle");
                match self {
                    Figure::F1a | Figure::F2a => {
                        SweepSpec::p_curve(channel, at(FRAC_PI_6), DEFAULT_STEPS)
                    }
                    Figure::F1b | Figure::F2b => {
                        SweepSpec::p_curve(channel, at(FRAC_PI_4), DEFAULT_STEPS)
                    }
                    Figure::F1c | Figure::F2c => SweepSpec::r_curve(channel, 0.3, DEFAULT_STEPS),
                    Figure::F1d | Figure::F2d => SweepSpec::r_curve(channel, 0.7, DEFAULT_STEPS),
                    Figure::F3 => SweepSpec::surface(channel, DEFAULT_STEPS, DEFAULT_STEPS),
                }
            })
            .collect()
    }

    pub fn records(self) -> Result<Vec<SweepRecord>> {
        let mut out = Vec::new();
        for spec in self.sweeps() {
            out.extend(run_sweep(&spec)?);
        }
        Ok(out)
    }

    /// Writes `fig<name>.csv` and `fig<name>.dat` into `dir`.
    pub fn write(self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
        let records = self.records()?;
        let csv = dir.join(format!("fig{}.csv", self.name()));
        let dat = dir.join(format!("fig{}.dat", self.name()));
        write_csv(&records, &csv)?;
        write_plot_data(&records, &dat)?;
        Ok(vec![csv, dat])
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown figure `{s}` (expected 1a-1d, 2a-2d or 3)"))
    }
}
