use std::fs;
use std::process::Command;

use rindler_noise::cli::{run, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rindler-noise").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn bell_state_negativity() {
    let (code, out, _) = call(&[
        "negativity",
        "--channel",
        "phase-flip",
        "--coupling",
        "multilocal",
        "--p",
        "0",
        "--r",
        "0",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "0.5");
}

#[test]
fn dephasing_has_no_sudden_death() {
    let (code, out, _) = call(&[
        "esd",
        "--channel",
        "dephasing",
        "--coupling",
        "multilocal",
        "--r",
        "pi/4",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "none");
}

#[test]
fn repro_1a_writes_four_curves() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, log) = call(&[
        "repro",
        "--figure",
        "1a",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{log}");
    let csv = fs::read_to_string(dir.path().join("fig1a.csv")).unwrap();
    let records = rindler_noise::sweep::parse_csv(&csv).unwrap();
    assert_eq!(records.len(), 4 * 101);
    for chunk in records.chunks(101) {
        assert!(chunk.iter().all(|r| r.kind == chunk[0].kind));
        assert!(chunk
            .iter()
            .all(|r| (r.r - std::f64::consts::FRAC_PI_6).abs() < 1e-11));
        assert!(chunk
            .iter()
            .all(|r| r.coupling == rindler_noise::channels::Coupling::Multilocal));
    }
    assert!(dir.path().join("fig1a.dat").exists());
}

#[test]
fn state_prints_six_rows() {
    let (code, out, _) = call(&["state", "--r", "pi/4"]);
    assert_eq!(code, EXIT_OK);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[1], "0,0.25,0,0.25,0,0");
    assert_eq!(rows[5], "0,0,0,0,0,0.25");
}

#[test]
fn check_channels_reports_printed_defects() {
    let (code, out, _) = call(&["check-channels", "--variant", "as-printed", "--p", "0.6"]);
    assert_eq!(code, EXIT_OK);
    let defect = |name: &str| -> f64 {
        let line = out.lines().find(|l| l.starts_with(name)).unwrap();
        line.split_whitespace().last().unwrap().parse().unwrap()
    };
    assert_eq!(defect("qutrit dephasing"), 2.0);
    assert!((defect("qutrit trit phase flip") - 0.2).abs() < 1e-12);
    assert_eq!(defect("qubit phase flip"), 0.0);

    let (_, out, _) = call(&["check-channels"]);
    assert_eq!(out.lines().count(), 1 + 8 * 11);
}

#[test]
fn correlated_mode_is_a_numerical_error() {
    let (code, _, err) = call(&[
        "negativity",
        "--channel",
        "dephasing",
        "--coupling",
        "global",
        "--global-mode",
        "correlated",
        "--p",
        "0.3",
        "--r",
        "pi/6",
    ]);
    assert_eq!(code, EXIT_NUMERICAL);
    assert!(err.contains("completeness"), "{err}");
}

#[test]
fn as_printed_variant_is_a_numerical_error() {
    let (code, _, _) = call(&[
        "negativity",
        "--channel",
        "dephasing",
        "--coupling",
        "multilocal",
        "--variant",
        "as-printed",
        "--p",
        "0.3",
        "--r",
        "0",
    ]);
    assert_eq!(code, EXIT_NUMERICAL);
}

#[test]
fn usage_errors_name_the_flag() {
    let cases: &[(&[&str], &str)] = &[
        (
            &[
                "sweep",
                "--channel",
                "all",
                "--coupling",
                "ml",
                "--axis",
                "p",
                "--r",
                "pi/4",
                "--p",
                "0.3",
                "--out",
                "x.csv",
            ],
            "--p",
        ),
        (
            &[
                "sweep",
                "--channel",
                "all",
                "--coupling",
                "ml",
                "--axis",
                "r",
                "--r",
                "pi/4",
                "--p",
                "0.3",
                "--out",
                "x.csv",
            ],
            "--r",
        ),
        (
            &[
                "sweep",
                "--channel",
                "all",
                "--coupling",
                "ml",
                "--axis",
                "p",
                "--out",
                "x.csv",
            ],
            "--r",
        ),
        (
            &[
                "sweep",
                "--channel",
                "all",
                "--coupling",
                "ml",
                "--axis",
                "grid",
                "--p",
                "0.1",
                "--out",
                "x.csv",
            ],
            "--p",
        ),
        (
            &[
                "esd",
                "--channel",
                "dephasing",
                "--coupling",
                "ml",
                "--global-mode",
                "product",
                "--r",
                "0",
            ],
            "--global-mode",
        ),
        (
            &[
                "negativity",
                "--channel",
                "dephasing",
                "--coupling",
                "global",
                "--p1",
                "0.1",
                "--p2",
                "0.1",
                "--r",
                "0",
            ],
            "--p",
        ),
        (
            &[
                "negativity",
                "--channel",
                "dephasing",
                "--coupling",
                "ml",
                "--p",
                "1.5",
                "--r",
                "0",
            ],
            "--p1",
        ),
        (&["state", "--r", "1"], "--r"),
        (&["state", "--r", "pi/"], "--r"),
        (
            &["verify", "--channel", "bit-trit-flip", "--coupling", "ml"],
            "--channel",
        ),
        (
            &[
                "verify",
                "--channel",
                "dephasing",
                "--coupling",
                "ml",
                "--grid",
                "1",
            ],
            "--grid",
        ),
        (&["repro", "--figure", "4", "--out-dir", "x"], "--figure"),
        (
            &["esd", "--channel", "nope", "--coupling", "ml", "--r", "0"],
            "--channel",
        ),
    ];
    for (args, flag) in cases {
        let (code, out, err) = call(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(out.is_empty());
        assert!(err.contains(flag), "{args:?} should name {flag}: {err}");
    }
}

#[test]
fn help_and_version_succeed() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("negativity"));
    let (code, _, _) = call(&["--version"]);
    assert_eq!(code, EXIT_OK);
    let (code, _, _) = call(&[]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let (code, _, err) = call(&[
        "sweep",
        "--channel",
        "dephasing",
        "--coupling",
        "ml",
        "--axis",
        "p",
        "--r",
        "0",
        "--steps",
        "3",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(code, EXIT_IO, "{err}");
}

#[test]
fn sweep_writes_csv_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let (code, stdout, _) = call(&[
        "sweep",
        "--channel",
        "all",
        "--coupling",
        "global",
        "--axis",
        "r",
        "--p",
        "0.3",
        "--steps",
        "5",
        "--out",
        out.to_str().unwrap(),
        "--plot-data",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.is_empty());
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1 + 4 * 5);
    let dat = fs::read_to_string(dir.path().join("s.dat")).unwrap();
    assert_eq!(dat.matches("# channel=").count(), 4);
}

#[test]
fn verify_prints_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let (code, out, _) = call(&[
        "verify",
        "--channel",
        "phase-flip",
        "--coupling",
        "global",
        "--global-mode",
        "correlated",
        "--grid",
        "3",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verdict"));
    assert!(out.contains("correlated"));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 2);
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# preset\nchannel = phase-flip\ncoupling = multilocal\np = 0\nr = pi/4\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let (code, out, _) = call(&["--config", cfg, "negativity"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "0.25");

    let (code, out, _) = call(&["negativity", "--config", cfg, "--r", "0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "0.5");
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = dir.path().join("a.cfg");
    fs::write(&unknown, "channel = dephasing\nsteps = 3\n").unwrap();
    let (code, _, err) = call(&[
        "--config",
        unknown.to_str().unwrap(),
        "esd",
        "--coupling",
        "ml",
        "--r",
        "0",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("steps"), "{err}");

    let malformed = dir.path().join("b.cfg");
    fs::write(&malformed, "channel dephasing\n").unwrap();
    let (code, _, err) = call(&["--config", malformed.to_str().unwrap(), "esd"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("line 1"), "{err}");

    let (code, _, _) = call(&["--config", "/nonexistent/x.cfg", "esd"]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rindler-noise");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();

    let ok = status(&[
        "negativity",
        "--channel",
        "bit-trit-flip",
        "--coupling",
        "global",
        "--p",
        "0.2",
        "--r",
        "pi/6",
    ]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(ok.stderr.is_empty());

    let usage = status(&["negativity", "--channel", "bit-trit-flip"]);
    assert_eq!(usage.status.code(), Some(EXIT_USAGE));
    assert!(usage.stdout.is_empty());

    let numerical = status(&[
        "esd",
        "--channel",
        "phase-flip",
        "--coupling",
        "global",
        "--global-mode",
        "correlated",
        "--r",
        "pi/4",
    ]);
    assert_eq!(numerical.status.code(), Some(EXIT_NUMERICAL));
}
