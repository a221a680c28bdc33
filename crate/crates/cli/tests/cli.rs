use std::process::Command;

use proptest::prelude::*;

use qnd_cli::config::{parse_config, ConfigBuilder, ConfigError, InitialState, Mode, RunConfig, Sweep};
use qnd_cli::output::{parse_csv, to_csv_string, SweepResult};
use qnd_cli::run::{run, FIG3_KAPPAS};
use qnd_core::lindblad::CouplingMode;

fn config(text: &str) -> RunConfig {
    parse_config(text).unwrap()
}

fn qnd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qnd"))
}

#[test]
fn config_examples() {
    assert_eq!(parse_config("").unwrap_err(), ConfigError::ModeRequired);
    let c = ConfigBuilder::new().text("kappa = 0.2").unwrap().mode(Mode::Analytic).finish().unwrap();
    assert_eq!(c.kappa, 0.2);
    assert_eq!(c.g, RunConfig::default().g);
    let e = ConfigBuilder::new().text("kappa = -1").unwrap().mode(Mode::Analytic).finish().unwrap_err();
    assert_eq!(e.to_string(), "line 1: kappa must be > 0");
}

fn any_config() -> impl Strategy<Value = RunConfig> {
    let physics = (
        (0.0f64..20.0, 0.0f64..2.0, 0.0f64..1.0, 0.01f64..1.0),
        (0.0f64..0.1, 0.0f64..0.1, 0.0f64..2.0, -1.0f64..1.0),
        prop::option::of(0.1f64..50.0),
    );
    let numerics = (
        2usize..30,
        (0.01f64..5.0, 0.001f64..0.1, 2usize..400),
        prop::option::of(("g|f|delta_omega", 0.0f64..1.0, 1.0f64..2.0, 2usize..50)),
        1usize..16,
        (any::<bool>(), 0usize..3, 2usize..=6, 1.0f64..100.0, 1e-9f64..0.5),
    );
    (physics, numerics).prop_map(
        |(
            ((epsilon, delta, g, kappa), (gamma1, gamma2, f, delta_omega), s_ii),
            (fock_dim, (t, t_step, grid_points), sweep, threads, (sigma_n, init, n_meas, t_meas, thr)),
        )| RunConfig {
            epsilon,
            delta,
            g,
            kappa,
            gamma1,
            gamma2,
            f,
            delta_omega,
            s_ii,
            fock_dim,
            t,
            t_max: t_step * 10.0,
            t_step,
            grid_points,
            mode: Some(if sweep.is_some() { Mode::Backaction } else { Mode::Lindblad }),
            sweep: sweep.map(|(p, start, stop, count)| Sweep {
                param: p,
                start,
                stop,
                count,
            }),
            output_path: Some("out/run 1.csv".into()),
            threads,
            coupling: if sigma_n { CouplingMode::SigmaN } else { CouplingMode::SigmaZ },
            initial_state: [InitialState::Plus, InitialState::Up, InitialState::Down][init],
            n_meas,
            t_meas,
            truncation_threshold: thr,
        },
    )
}

fn any_result() -> impl Strategy<Value = SweepResult> {
    (1usize..6, 0usize..8).prop_flat_map(|(cols, rows)| {
        let value = prop_oneof![
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
            Just(f64::INFINITY),
            Just(f64::NEG_INFINITY),
            Just(-0.0),
            -1e-300f64..1e-300,
        ];
        prop::collection::vec(prop::collection::vec(value, cols), rows).prop_map(move |rows| {
            let mut r = SweepResult::new((0..cols).map(|i| format!("c{i}")));
            for row in rows {
                r.push(row);
            }
            r
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_config_round_trips(c in any_config()) {
        let text = c.to_config_string();
        prop_assert_eq!(parse_config(&text).unwrap(), c);
    }

    #[test]
    fn csv_round_trips(r in any_result()) {
        let text = to_csv_string(&r);
        prop_assert!(!text.contains('\r'));
        prop_assert_eq!(text.lines().count(), r.rows.len() + 1);
        prop_assert!(parse_csv(&text).unwrap().bit_eq(&r));
    }
}

fn with_threads(text: &str, threads: usize) -> String {
    let c = ConfigBuilder::new()
        .text(text)
        .unwrap()
        .set(&format!("threads={threads}"))
        .unwrap()
        .finish()
        .unwrap();
    to_csv_string(&run(&c).unwrap())
}

#[test]
fn output_does_not_depend_on_thread_count() {
    for text in [
        "mode = fig2\nt_max = 0.2",
        "mode = fig3\ngrid_points = 51",
        "mode = analytic\nsweep = \"kappa 0.05 0.5 23\"",
        "mode = backaction\nepsilon = 1\nsweep = \"delta_omega -1 1 17\"",
    ] {
        let one = with_threads(text, 1);
        for threads in [2, 3, 8] {
            assert_eq!(one, with_threads(text, threads), "{text} with {threads} threads");
        }
    }
}

#[test]
fn fig2_grid_and_probabilities() {
    let r = run(&config("mode = fig2\nt_max = 0.5\ngrid_points = 21")).unwrap();
    assert_eq!(r.columns, ["delta_omega", "t", "p_zero_point", "p_backaction"]);
    assert_eq!(r.rows.len(), 21 * 50);
    for block in r.rows.chunks(50) {
        assert!(block.iter().all(|row| row[0] == block[0][0]));
        for w in block.windows(2) {
            assert!(w[1][1] > w[0][1]);
            assert!(w[1][2] >= w[0][2] && w[1][3] >= w[0][3]);
        }
        for row in block {
            assert!((0.5..=1.0).contains(&row[2]) && (0.5..=1.0).contains(&row[3]));
        }
    }
}

#[test]
fn fig3_panels_are_symmetric() {
    let r = run(&config("mode = fig3")).unwrap();
    assert_eq!(r.rows.len(), FIG3_KAPPAS.len() * 201);
    let mut peaks = Vec::new();
    for (k, panel) in FIG3_KAPPAS.iter().zip(r.rows.chunks(201)) {
        assert!(panel.iter().all(|row| row[0] == *k));
        for i in 0..201 {
            let (a, b) = (&panel[i], &panel[200 - i]);
            assert_eq!(a[1], -b[1]);
            assert!((a[2] - b[2]).abs() <= 1e-12);
            assert!((a[3] - b[3]).abs() <= 1e-12 * a[3].abs().max(1e-300));
            assert!((0.0..=1.0).contains(&a[2]) && a[3] >= 0.0);
        }
        peaks.push(panel.iter().map(|row| row[3]).fold(0.0, f64::max));
    }
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
}

#[test]
fn sweep_examples() {
    let r = run(&config("mode = analytic\nsweep = \"g 0 0 2\"")).unwrap();
    assert_eq!(r.column("gamma_m").unwrap(), [0.0, 0.0]);
    assert_eq!(r.column("p_measure_0").unwrap(), [0.5, 0.5]);

    let r = run(&config("mode = backaction\nepsilon = 1\nsweep = \"delta 0 0.5 6\"")).unwrap();
    assert_eq!(r.columns[0], "delta");
    let up = r.column("gamma_up").unwrap();
    let down = r.column("gamma_down").unwrap();
    let total: Vec<f64> = up.iter().zip(&down).map(|(a, b)| a + b).collect();
    assert_eq!(total[0], 0.0);
    assert!(total.windows(2).all(|w| w[1] > w[0]), "{total:?}");
    for row in &r.rows {
        assert!(row[1..5].iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn lindblad_and_repeatability_outputs() {
    let r = run(&config("mode = lindblad\nf = 0.05\nt_max = 0.5\nt_step = 0.1")).unwrap();
    assert_eq!(r.rows.len(), 6);
    assert_eq!(r.column("t").unwrap()[5], 0.5);
    assert!(r.column("top_fock").unwrap().iter().all(|&p| p < 1e-6));

    let r = run(&config("mode = repeatability\nf = 0.05\nt_meas = 5\nn_meas = 4")).unwrap();
    assert_eq!(r.rows.len(), 3);
    for a in r.column("agreement").unwrap() {
        assert!((a - 1.0).abs() < 1e-9);
    }
}

#[test]
fn binary_writes_csv_and_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    let out = dir.path().join("fig3.csv");
    std::fs::write(&cfg, "# panels\ngrid_points = 11\n").unwrap();

    let status = qnd()
        .args(["fig3", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 11);
    assert!(text.starts_with("kappa,delta_omega,p_measure_0,gamma_m\n"));

    let stdout = qnd().args(["backaction", "--set", "epsilon=1", "--set", "delta=0.1"]).output().unwrap();
    assert!(stdout.status.success());
    let parsed = parse_csv(std::str::from_utf8(&stdout.stdout).unwrap()).unwrap();
    assert_eq!(parsed.rows.len(), 1);

    let bad = qnd().args(["analytic", "--set", "kappa=-1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("kappa must be > 0"));

    let unknown = qnd().args(["analytic", "--set", "kapa=1"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));

    let truncated = qnd()
        .args(["lindblad", "--set", "fock_dim=3", "--set", "f=1", "--set", "t_max=5"])
        .output()
        .unwrap();
    assert_eq!(truncated.status.code(), Some(3));

    let unwritable = qnd()
        .args(["fig3", "--out"])
        .arg(dir.path().join("missing/dir/out.csv"))
        .output()
        .unwrap();
    assert_eq!(unwritable.status.code(), Some(4));

    let missing = qnd().args(["fig3", "--config"]).arg(dir.path().join("nope.conf")).output().unwrap();
    assert_eq!(missing.status.code(), Some(4));
}

fn golden(name: &str, text: &str) {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let fresh = to_csv_string(&run(&config(text)).unwrap());
    if std::env::var_os("QND_BLESS").is_some() {
        std::fs::write(&path, &fresh).unwrap();
    }
    assert_eq!(fresh, std::fs::read_to_string(&path).unwrap(), "{name} drifted");
}

#[test]
fn figure_csv_matches_golden_files() {
    golden("fig2_small.csv", "mode = fig2\ngrid_points = 11\nt_max = 0.1");
    golden("fig3_small.csv", "mode = fig3\ngrid_points = 21");
}
