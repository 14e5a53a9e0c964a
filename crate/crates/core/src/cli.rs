//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! invariant violation, 3 I/O failure. Diagnostics go to the error stream.
//!
//! A `--config <path>` file of `key = value` lines supplies defaults for the
//! selected subcommand's flags; flags given on the command line win.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand};

use crate::analytic::{verify_against_numeric, ClosedForm, VerificationReport, VerifyGrid};
use crate::channels::{
    completeness_defect, qubit_channel, qutrit_channel, ChannelKind, ChannelSpec, Coupling,
    GlobalMode, Variant,
};
use crate::error::Error;
use crate::format::sig;
use crate::state::{unruh_state, Acceleration};
use crate::sweep::{
    self, esd_threshold, evaluate_point, run_sweep, write_csv, write_plot_data, Axis, Figure,
    SweepSpec, DEFAULT_STEPS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rindler-noise",
    version,
    about = "Qubit-qutrit decoherence and entanglement negativity for an accelerated observer"
)]
struct Cli {
    /// `key = value` file supplying flag defaults
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the accelerated state as a 6x6 CSV matrix
    State(StateArgs),
    /// Print the completeness defect of every single-system Kraus set
    CheckChannels(CheckArgs),
    /// Negativity at a single parameter point
    Negativity(NegativityArgs),
    /// Sweep p, r or both and write CSV
    Sweep(SweepArgs),
    /// Sudden-death threshold in the linked strength p
    Esd(EsdArgs),
    /// Compare a closed-form eigenvalue with the numeric pipeline
    Verify(VerifyArgs),
    /// Regenerate a figure dataset
    Repro(ReproArgs),
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct StateArgs {
    #[arg(long, value_parser = parse_angle)]
    r: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct CheckArgs {
    #[arg(long, default_value = "corrected")]
    variant: Variant,
    /// Comma list (`0,0.5,1`) or `start:end:count`
    #[arg(long, value_parser = parse_grid_choice, default_value = "0:1:11")]
    p: ValueGrid,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct ChannelArgs {
    #[arg(long)]
    channel: ChannelKind,
    #[arg(long)]
    coupling: Coupling,
    #[arg(long)]
    global_mode: Option<GlobalMode>,
    #[arg(long, default_value = "corrected")]
    variant: Variant,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct NegativityArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Collective strength; also the default for --p1 and --p2
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long, value_parser = parse_angle)]
    r: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct SweepArgs {
    /// Channel kind, or `all` for a four-channel overlay
    #[arg(long, value_parser = parse_channel_choice)]
    channel: ChannelChoice,
    #[arg(long)]
    coupling: Coupling,
    #[arg(long)]
    global_mode: Option<GlobalMode>,
    #[arg(long, default_value = "corrected")]
    variant: Variant,
    #[arg(long)]
    axis: Axis,
    /// Fixed r for a p sweep
    #[arg(long, value_parser = parse_angle)]
    r: Option<f64>,
    /// Fixed linked p for an r sweep
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also write gnuplot blocks next to the CSV with a `.dat` extension
    #[arg(long)]
    plot_data: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct EsdArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long, value_parser = parse_angle)]
    r: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct VerifyArgs {
    #[arg(long)]
    channel: ChannelKind,
    #[arg(long)]
    coupling: Coupling,
    #[arg(long)]
    global_mode: Option<GlobalMode>,
    /// Points per axis
    #[arg(long, default_value_t = 11)]
    grid: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Also write the report as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct ReproArgs {
    /// 1a-1d, 2a-2d, 3 or `all`
    #[arg(long, value_parser = parse_figure_choice)]
    figure: FigureChoice,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone)]
struct ChannelChoice(Vec<ChannelKind>);

#[derive(Debug, Clone)]
struct FigureChoice(Vec<Figure>);

#[derive(Debug, Clone)]
struct ValueGrid(Vec<f64>);

fn parse_grid_choice(s: &str) -> Result<ValueGrid, String> {
    parse_value_grid(s).map(ValueGrid)
}

fn parse_channel_choice(s: &str) -> Result<ChannelChoice, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        Ok(ChannelChoice(ChannelKind::ALL.to_vec()))
    } else {
        Ok(ChannelChoice(vec![s.parse()?]))
    }
}

fn parse_figure_choice(s: &str) -> Result<FigureChoice, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        Ok(FigureChoice(Figure::ALL.to_vec()))
    } else {
        Ok(FigureChoice(vec![s.parse()?]))
    }
}

/// Parses an angle: `pi`, `pi/<n>`, `<k>pi/<n>`, `<k>*pi/<n>` or a decimal.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || format!("invalid angle `{s}` (expected e.g. pi/4, pi/6, pi/10 or a decimal)");
    let value = if let Some(idx) = t.find("pi") {
        let coeff = t[..idx].trim().trim_end_matches('*').trim();
        let coeff: f64 = if coeff.is_empty() {
            1.0
        } else {
            coeff.parse().map_err(|_| bad())?
        };
        let rest = t[idx + 2..].trim();
        let denom: f64 = if rest.is_empty() {
            1.0
        } else {
            let d = rest.strip_prefix('/').ok_or_else(bad)?.trim();
            d.parse().map_err(|_| bad())?
        };
        if denom == 0.0 {
            return Err(bad());
        }
        coeff * PI / denom
    } else {
        t.parse().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Parses a value list: comma separated (`0,0.25,1`) or `start:end:count`.
pub fn parse_value_grid(s: &str) -> Result<Vec<f64>, String> {
    let t = s.trim();
    let num = |x: &str| -> Result<f64, String> {
        let v: f64 = x
            .trim()
            .parse()
            .map_err(|_| format!("invalid number `{x}` in grid `{s}`"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite value in grid `{s}`"))
        }
    };
    let values = if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range grid `{s}` must be start:end:count"));
        }
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("invalid count in grid `{s}`"))?;
        if count == 0 || count > 100_000 {
            return Err(format!("grid count must be in 1..=100000, got {count}"));
        }
        sweep::GridAxis::new(count, num(parts[0])?, num(parts[1])?).values()
    } else {
        t.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(format!("empty grid `{s}`"));
    }
    Ok(values)
}

/// Parses a `key = value` configuration file. `#` starts a comment; keys
/// may be written with `-` or `_`. Duplicate keys are rejected.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, Error> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(err(format!("invalid key `{key}`")));
        }
        if value.is_empty() {
            return Err(err(format!("missing value for `{key}`")));
        }
        if out.insert(key.clone(), value.to_string()).is_some() {
            return Err(err(format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::OutOfRange { .. } | Error::InvalidSweep(_) | Error::Parse { .. } => EXIT_USAGE,
            Error::Io { .. } => EXIT_IO,
            Error::CompletenessViolation { .. }
            | Error::NotHermitian { .. }
            | Error::TraceDeviation { .. }
            | Error::NegativeEigenvalue { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidMatrix(_) => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("write failed: {e}"),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match run_inner(args, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message.trim_end());
            f.code
        }
    }
}

fn run_inner(
    args: Vec<OsString>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let args = match apply_config(args)? {
        Some(args) => args,
        None => return parse_and_dispatch(vec!["rindler-noise".into(), "--help".into()], out, err),
    };
    parse_and_dispatch(args, out, err)
}

fn parse_and_dispatch(
    args: Vec<OsString>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write!(out, "{}", e.render()).map_err(io_failure)?;
                    Ok(EXIT_OK)
                }
                _ => Err(Failure::usage(e.render().to_string())),
            };
        }
    };
    dispatch(cli.command, out, err)?;
    Ok(EXIT_OK)
}

/// Splices config-file values in front of the user's flags for the chosen
/// subcommand. Returns `None` when no subcommand is present.
fn apply_config(args: Vec<OsString>) -> Result<Option<Vec<OsString>>, Failure> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut iter = args.into_iter();
    if let Some(prog) = iter.next() {
        rest.push(prog);
    }
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let path = iter
                .next()
                .ok_or_else(|| Failure::usage("--config requires a path"))?;
            config = Some(PathBuf::from(path));
        } else if let Some(path) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(Some(rest));
    };

    let text = std::fs::read_to_string(&path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("cannot read config {}: {e}", path.display()),
    })?;
    let entries =
        parse_config(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;

    let Some(sub_pos) = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 1)
    else {
        return Ok(None);
    };
    let sub_name = rest[sub_pos].to_string_lossy().into_owned();
    let command = Cli::command();
    let Some(sub) = command.find_subcommand(&sub_name) else {
        // let clap report the unknown subcommand
        return Ok(Some(rest));
    };

    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in &entries {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && a.get_id() != "config")
            .ok_or_else(|| {
                Failure::usage(format!(
                    "{}: unknown key `{key}` for `{sub_name}`",
                    path.display()
                ))
            })?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => injected.push(format!("--{key}").into()),
                "false" => {}
                other => {
                    return Err(Failure::usage(format!(
                        "{}: `{key}` expects true or false, found `{other}`",
                        path.display()
                    )))
                }
            }
        } else {
            injected.push(format!("--{key}").into());
            injected.push(value.into());
        }
    }
    let mut args = rest[..=sub_pos].to_vec();
    args.extend(injected);
    args.extend_from_slice(&rest[sub_pos + 1..]);
    Ok(Some(args))
}

fn acceleration(r: f64) -> Result<Acceleration, Failure> {
    Acceleration::new(r).map_err(|e| Failure::usage(format!("--r: {e}")))
}

fn strength(flag: &str, value: f64) -> Result<f64, Failure> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Failure::usage(format!(
            "--{flag} = {value} is outside [0, 1]"
        )))
    }
}

fn global_mode_for(coupling: Coupling, mode: Option<GlobalMode>) -> Result<GlobalMode, Failure> {
    match (coupling, mode) {
        (Coupling::Multilocal, Some(_)) => Err(Failure::usage(
            "--global-mode only applies to --coupling global",
        )),
        (_, mode) => Ok(mode.unwrap_or_default()),
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::State(a) => cmd_state(a, out),
        Command::CheckChannels(a) => cmd_check_channels(a, out),
        Command::Negativity(a) => cmd_negativity(a, out),
        Command::Sweep(a) => cmd_sweep(a, err),
        Command::Esd(a) => cmd_esd(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Repro(a) => cmd_repro(a, err),
    }
}

fn cmd_state(a: StateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let rho = unruh_state(acceleration(a.r)?);
    for i in 0..rho.rows() {
        let row: Vec<String> = (0..rho.cols())
            .map(|j| {
                let z = rho.get(i, j);
                if z.im == 0.0 {
                    sig(z.re)
                } else {
                    format!(
                        "{}{}{}i",
                        sig(z.re),
                        if z.im < 0.0 { "" } else { "+" },
                        sig(z.im)
                    )
                }
            })
            .collect();
        writeln!(out, "{}", row.join(",")).map_err(io_failure)?;
    }
    Ok(())
}

fn cmd_check_channels(a: CheckArgs, out: &mut dyn Write) -> Result<(), Failure> {
    for &p in &a.p.0 {
        strength("p", p)?;
    }
    writeln!(
        out,
        "{:<28} {:<11} {:<14} defect",
        "channel", "variant", "p"
    )
    .map_err(io_failure)?;
    for kind in ChannelKind::ALL {
        for &p in &a.p.0 {
            for set in [qubit_channel(kind, p)?, qutrit_channel(kind, p, a.variant)?] {
                let label = set
                    .label()
                    .split(" (")
                    .next()
                    .unwrap_or(set.label())
                    .to_string();
                writeln!(
                    out,
                    "{:<28} {:<11} {:<14} {}",
                    label,
                    a.variant.as_str(),
                    sig(p),
                    sig(completeness_defect(&set))
                )
                .map_err(io_failure)?;
            }
        }
    }
    Ok(())
}

fn channel_spec(c: &ChannelArgs, p1: f64, p2: f64, p: f64) -> Result<ChannelSpec, Failure> {
    let mode = global_mode_for(c.coupling, c.global_mode)?;
    Ok(ChannelSpec::new(c.channel, c.coupling, p1, p2, p)?
        .with_global_mode(mode)
        .with_variant(c.variant))
}

fn cmd_negativity(a: NegativityArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let r = acceleration(a.r)?;
    let pick = |flag: &str, own: Option<f64>| -> Result<f64, Failure> {
        let v = own
            .or(a.p)
            .ok_or_else(|| Failure::usage(format!("missing --{flag} (or --p to link it)")))?;
        strength(flag, v)
    };
    let p1 = pick("p1", a.p1)?;
    let p2 = pick("p2", a.p2)?;
    let p = match a.channel.coupling {
        Coupling::Multilocal => {
            if a.p.is_some() && a.p1.is_some() && a.p2.is_some() {
                return Err(Failure::usage(
                    "--p is unused for multilocal coupling when both --p1 and --p2 are given",
                ));
            }
            0.0
        }
        Coupling::Global => strength(
            "p",
            a.p.ok_or_else(|| Failure::usage("missing --p for global coupling"))?,
        )?,
    };
    let spec = channel_spec(&a.channel, p1, p2, p)?;
    let rec = evaluate_point(&spec, r)?;
    writeln!(out, "{}", sig(rec.negativity)).map_err(io_failure)?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs, log: &mut dyn Write) -> Result<(), Failure> {
    if a.steps == 0 {
        return Err(Failure::usage("--steps must be at least 1"));
    }
    match a.axis {
        Axis::P => {
            if a.p.is_some() {
                return Err(Failure::usage(
                    "--p conflicts with --axis p (p is the swept parameter)",
                ));
            }
            if a.r.is_none() {
                return Err(Failure::usage("--axis p requires --r"));
            }
        }
        Axis::R => {
            if a.r.is_some() {
                return Err(Failure::usage(
                    "--r conflicts with --axis r (r is the swept parameter)",
                ));
            }
            if a.p.is_none() {
                return Err(Failure::usage("--axis r requires --p"));
            }
        }
        Axis::PAndR => {
            if a.p.is_some() {
                return Err(Failure::usage("--p conflicts with --axis grid"));
            }
            if a.r.is_some() {
                return Err(Failure::usage("--r conflicts with --axis grid"));
            }
        }
    }
    let mode = global_mode_for(a.coupling, a.global_mode)?;
    let mut records = Vec::new();
    for &kind in &a.channel.0 {
        let channel = ChannelSpec::new(kind, a.coupling, 0.0, 0.0, 0.0)?
            .with_global_mode(mode)
            .with_variant(a.variant);
        let spec = match a.axis {
            Axis::P => SweepSpec::p_curve(channel, acceleration(a.r.unwrap_or_default())?, a.steps),
            Axis::R => {
                SweepSpec::r_curve(channel, strength("p", a.p.unwrap_or_default())?, a.steps)
            }
            Axis::PAndR => SweepSpec::surface(channel, a.steps, a.steps),
        };
        records.extend(run_sweep(&spec)?);
    }
    let rows = write_csv(&records, &a.out)?;
    writeln!(log, "wrote {rows} rows to {}", a.out.display()).map_err(io_failure)?;
    if a.plot_data {
        let dat = a.out.with_extension("dat");
        let blocks = write_plot_data(&records, &dat)?;
        writeln!(log, "wrote {blocks} blocks to {}", dat.display()).map_err(io_failure)?;
    }
    Ok(())
}

fn cmd_esd(a: EsdArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let r = acceleration(a.r)?;
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Failure::usage(format!(
            "--tol must be in (0, 1), got {}",
            a.tol
        )));
    }
    let spec = channel_spec(&a.channel, 0.0, 0.0, 0.0)?;
    match esd_threshold(&spec, r, a.tol)? {
        Some(p) => writeln!(out, "{}", sig(p)),
        None => writeln!(out, "none"),
    }
    .map_err(io_failure)?;
    Ok(())
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let form = ClosedForm::try_from(a.channel).map_err(|_| {
        Failure::usage(format!(
            "--channel {}: no closed form (use phase-flip or dephasing)",
            a.channel
        ))
    })?;
    let mode = global_mode_for(a.coupling, a.global_mode)?;
    let grid = VerifyGrid::new(a.grid).map_err(|e| Failure::usage(format!("--grid: {e}")))?;
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(Failure::usage("--tol must be positive"));
    }
    let report = verify_against_numeric(form, a.coupling, mode, grid, a.tol)?;
    write!(out, "{report}").map_err(io_failure)?;
    if let Some(path) = &a.csv {
        write_report_csv(&report, path)?;
    }
    Ok(())
}

fn write_report_csv(report: &VerificationReport, path: &Path) -> Result<(), Failure> {
    sweep::write_atomically(path, |w| {
        writeln!(w, "{}", VerificationReport::CSV_HEADER)?;
        writeln!(w, "{}", report.csv_row())
    })?;
    Ok(())
}

fn cmd_repro(a: ReproArgs, log: &mut dyn Write) -> Result<(), Failure> {
    for figure in a.figure.0 {
        for path in figure.write(&a.out_dir)? {
            writeln!(log, "wrote {}", path.display()).map_err(io_failure)?;
        }
    }
    Ok(())
}
