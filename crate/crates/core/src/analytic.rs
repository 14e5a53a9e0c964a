//! Published closed forms for the negative partial-transpose eigenvalue and
//! a harness that checks them against the numeric pipeline.
//!
//! The closed forms are treated as hypotheses: the numeric Kraus evolution
//! is the reference, and a mismatch is a result rather than an error.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use rayon::prelude::*;

use crate::channels::{evolve_raw, ChannelKind, ChannelSpec, Coupling, GlobalMode, Variant};
use crate::entanglement::pt_spectrum;
use crate::error::{check_unit_interval, Error, Result};
use crate::format::sig;
use crate::state::{unruh_state, Acceleration};

/// Channels with a closed-form minimum eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    PhaseFlip,
    Dephasing,
}

impl ClosedForm {
    pub fn kind(self) -> ChannelKind {
        match self {
            ClosedForm::PhaseFlip => ChannelKind::PhaseFlip,
            ClosedForm::Dephasing => ChannelKind::Dephasing,
        }
    }

    pub fn lambda(
        self,
        coupling: Coupling,
        p1: f64,
        p2: f64,
        p: f64,
        r: Acceleration,
    ) -> Result<f64> {
        match self {
            ClosedForm::PhaseFlip => phase_flip_lambda(coupling, p1, p2, p, r),
            ClosedForm::Dephasing => dephasing_lambda(coupling, p1, p2, p, r),
        }
    }
}

impl TryFrom<ChannelKind> for ClosedForm {
    type Error = Error;

    fn try_from(kind: ChannelKind) -> Result<Self> {
        match kind {
            ChannelKind::PhaseFlip => Ok(ClosedForm::PhaseFlip),
            ChannelKind::Dephasing => Ok(ClosedForm::Dephasing),
            other => Err(Error::InvalidSweep(format!(
                "no closed-form eigenvalue is available for {other}"
            ))),
        }
    }
}

fn check_all(p1: f64, p2: f64, p: f64) -> Result<()> {
    check_unit_interval("p1", p1)?;
    check_unit_interval("p2", p2)?;
    check_unit_interval("p", p)?;
    Ok(())
}

/// Phase-flip negative eigenvalue.
///
/// Multilocal: `-1/2 (1-p1)(1-p2) cos^2 r`.
/// Global: `-1/2 (1-p) (1-p1)^2 (1-p2) cos^2 r`.
pub fn phase_flip_lambda(
    coupling: Coupling,
    p1: f64,
    p2: f64,
    p: f64,
    r: Acceleration,
) -> Result<f64> {
    check_all(p1, p2, p)?;
    let c2 = r.radians().cos().powi(2);
    Ok(match coupling {
        Coupling::Multilocal => -0.5 * (1.0 - p1) * (1.0 - p2) * c2,
        Coupling::Global => -0.5 * (1.0 - p) * (1.0 - p1).powi(2) * (1.0 - p2) * c2,
    })
}

/// Dephasing negative eigenvalue, evaluated literally.
///
/// Multilocal: `-1/2 sqrt((1-p1)(2 sqrt((1-p2) p2) + 1) cos^4 r)`.
/// Global: `-1/2 sqrt((2 sqrt((1-p) p) + 1)(p1-1)^2 (2 sqrt((1-p2) p2) + 1) cos^4 r)`.
pub fn dephasing_lambda(
    coupling: Coupling,
    p1: f64,
    p2: f64,
    p: f64,
    r: Acceleration,
) -> Result<f64> {
    check_all(p1, p2, p)?;
    let c4 = r.radians().cos().powi(4);
    let bump = |x: f64| 2.0 * ((1.0 - x) * x).sqrt() + 1.0;
    Ok(match coupling {
        Coupling::Multilocal => -0.5 * ((1.0 - p1) * bump(p2) * c4).sqrt(),
        Coupling::Global => -0.5 * (bump(p) * (p1 - 1.0).powi(2) * bump(p2) * c4).sqrt(),
    })
}

/// Points per axis; strengths span `[0, 1]` and `r` spans `[0, pi/4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyGrid {
    pub points: usize,
}

impl VerifyGrid {
    pub fn new(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidSweep(format!(
                "verification grid needs at least 2 points per axis, got {points}"
            )));
        }
        Ok(Self { points })
    }

    fn axis(&self, max: f64) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    max
                } else {
                    max * i as f64 / n as f64
                }
            })
            .collect()
    }

    fn describe(&self, coupling: Coupling) -> String {
        let n = self.points;
        match coupling {
            Coupling::Multilocal => format!("{n}^3 over p1,p2 in [0,1], r in [0,pi/4]"),
            Coupling::Global => format!("{n}^4 over p1,p2,p in [0,1], r in [0,pi/4]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "mismatch",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub p1: f64,
    pub p2: f64,
    pub p: f64,
    pub r: f64,
}

/// Outcome of comparing a closed form with the numeric pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub kind: ChannelKind,
    pub coupling: Coupling,
    /// `None` for multilocal coupling.
    pub global_mode: Option<GlobalMode>,
    pub grid: String,
    pub points: usize,
    pub tol: f64,
    /// Largest of `|lambda_analytic - min(lambda_numeric, 0)|` and
    /// `|max(0, -lambda_analytic) - N_numeric|` over the grid.
    pub max_abs_deviation: f64,
    pub worst_point: GridPoint,
    pub worst_analytic: f64,
    pub worst_numeric: f64,
    /// Largest composite completeness defect met on the grid. Non-zero only
    /// for the correlated collective stage, whose outputs are compared
    /// without renormalisation.
    pub max_completeness_defect: f64,
    pub verdict: Verdict,
}

struct PointResult {
    point: GridPoint,
    deviation: f64,
    analytic: f64,
    numeric: f64,
    defect: f64,
}

fn evaluate(form: ClosedForm, spec: &ChannelSpec, r: Acceleration) -> Result<PointResult> {
    let analytic = form.lambda(spec.coupling, spec.p1, spec.p2, spec.p, r)?;
    let evolution = evolve_raw(&unruh_state(r), spec)?;
    let spectrum = pt_spectrum(&evolution.state)?;
    let numeric = spectrum.min_eigenvalue.min(0.0);
    let deviation = (analytic - numeric)
        .abs()
        .max(((-analytic).max(0.0) - spectrum.negativity).abs());
    Ok(PointResult {
        point: GridPoint {
            p1: spec.p1,
            p2: spec.p2,
            p: spec.p,
            r: r.radians(),
        },
        deviation,
        analytic,
        numeric: spectrum.min_eigenvalue,
        defect: evolution.completeness_defect,
    })
}

/// Compares the closed form for `form` against the numeric minimum
/// partial-transpose eigenvalue over `grid`. The global mode is ignored for
/// multilocal coupling.
pub fn verify_against_numeric(
    form: ClosedForm,
    coupling: Coupling,
    global_mode: GlobalMode,
    grid: VerifyGrid,
    tol: f64,
) -> Result<VerificationReport> {
    let strengths = grid.axis(1.0);
    let rs = grid.axis(FRAC_PI_4);
    let collective: Vec<f64> = match coupling {
        Coupling::Multilocal => vec![0.0],
        Coupling::Global => strengths.clone(),
    };
    let mut points = Vec::new();
    for &p1 in &strengths {
        for &p2 in &strengths {
            for &p in &collective {
                for &r in &rs {
                    points.push((p1, p2, p, r));
                }
            }
        }
    }

    let results: Vec<PointResult> = points
        .par_iter()
        .map(|&(p1, p2, p, r)| {
            let spec = ChannelSpec::new(form.kind(), coupling, p1, p2, p)?
                .with_global_mode(global_mode)
                .with_variant(Variant::Corrected);
            evaluate(form, &spec, Acceleration::new(r)?)
        })
        .collect::<Result<_>>()?;

    let mut worst = &results[0];
    let mut max_defect = 0.0_f64;
    for res in &results {
        if res.deviation > worst.deviation {
            worst = res;
        }
        max_defect = max_defect.max(res.defect);
    }
    let verdict = if worst.deviation <= tol {
        Verdict::Match
    } else {
        Verdict::Mismatch
    };
    Ok(VerificationReport {
        kind: form.kind(),
        coupling,
        global_mode: (coupling == Coupling::Global).then_some(global_mode),
        grid: grid.describe(coupling),
        points: results.len(),
        tol,
        max_abs_deviation: worst.deviation,
        worst_point: worst.point,
        worst_analytic: worst.analytic,
        worst_numeric: worst.numeric,
        max_completeness_defect: max_defect,
        verdict,
    })
}

impl VerificationReport {
    pub const CSV_HEADER: &'static str = "channel,coupling,global_mode,grid_points,tol,max_abs_deviation,worst_p1,worst_p2,worst_p,worst_r,worst_analytic,worst_numeric,max_completeness_defect,verdict";

    fn mode_str(&self) -> &'static str {
        self.global_mode.map_or("none", GlobalMode::as_str)
    }

    pub fn csv_row(&self) -> String {
        let w = &self.worst_point;
        [
            self.kind.as_str().to_string(),
            self.coupling.as_str().to_string(),
            self.mode_str().to_string(),
            self.points.to_string(),
            sig(self.tol),
            sig(self.max_abs_deviation),
            sig(w.p1),
            sig(w.p2),
            sig(w.p),
            sig(w.r),
            sig(self.worst_analytic),
            sig(self.worst_numeric),
            sig(self.max_completeness_defect),
            self.verdict.to_string(),
        ]
        .join(",")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = &self.worst_point;
        let rows = [
            ("channel", self.kind.to_string()),
            ("coupling", self.coupling.to_string()),
            ("global mode", self.mode_str().to_string()),
            ("grid", self.grid.clone()),
            ("points", self.points.to_string()),
            ("tolerance", sig(self.tol)),
            ("max |deviation|", sig(self.max_abs_deviation)),
            (
                "worst point",
                format!(
                    "p1={} p2={} p={} r={}",
                    sig(w.p1),
                    sig(w.p2),
                    sig(w.p),
                    sig(w.r)
                ),
            ),
            ("analytic lambda", sig(self.worst_analytic)),
            ("numeric min eig", sig(self.worst_numeric)),
            ("completeness defect", sig(self.max_completeness_defect)),
            ("verdict", self.verdict.to_string()),
        ];
        for (key, value) in rows {
            writeln!(f, "{key:<20} {value}")?;
        }
        Ok(())
    }
}
