use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use prodnet::analysis::{MonthlyPanel, PanelSource, SensitivityCell, SweepResult};
use prodnet::dynamics::Trajectory;

fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy")
}

fn toy_data_section() -> String {
    let d = toy_dir();
    let p = |f: &str| d.join(f).display().to_string();
    format!(
        r#"[data]
io_table = "{}"
ratings = "{}"
inventory_survey = "{}"
service_codes = ["G47", "I", "O84"]
attributes = "{}"
fixed_vectors = {{ s5 = "{}", s6 = "{}" }}
"#,
        p("io_table.csv"),
        p("ratings.csv"),
        p("inventory_survey.csv"),
        p("attributes.csv"),
        p("supply_s5.csv"),
        p("supply_s6.csv"),
    )
}

fn write_config(dir: &Path, name: &str, extra: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, format!("{}\n{extra}", toy_data_section())).unwrap();
    path
}

fn prodnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_cmd(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    prodnet(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bundled_config_validates() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/toy.toml");
    let o = prodnet(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ok: 5 industries"));
}

#[test]
fn negative_flow_is_a_validation_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let table = fs::read_to_string(toy_dir().join("io_table.csv")).unwrap();
    let mut lines: Vec<String> = table.lines().map(String::from).collect();
    let mut cells: Vec<String> = lines[1].split(',').map(String::from).collect();
    cells[2] = "-1".into();
    lines[1] = cells.join(",");
    fs::write(tmp.path().join("bad.csv"), lines.join("\n")).unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(
        &cfg,
        format!(
            "[data]\nio_table = \"bad.csv\"\ninventory_targets = \"{}\"\n",
            toy_dir().join("inventory_targets.csv").display()
        ),
    )
    .unwrap();
    let o = prodnet(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NegativeFlow"), "{}", stderr(&o));
}

#[test]
fn misordered_calendar_is_a_validation_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        "[calendar]\nlockdown_start = \"2020-06-01\"\n",
    );
    let o = prodnet(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("CalendarOrder"), "{}", stderr(&o));
}

#[test]
fn bad_inputs_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = tmp.path().join("nope.toml");
    assert_eq!(run_cmd("run", &missing, &out, &[]).status.code(), Some(2));

    let cfg = write_config(tmp.path(), "c.toml", "");
    let o = run_cmd("run", &cfg, &out, &["--kind", "cobb_douglas"]);
    assert_eq!(o.status.code(), Some(2));

    let cfg = write_config(tmp.path(), "p.toml", "[params]\ntau = 0.5\n");
    assert_eq!(run_cmd("run", &cfg, &out, &[]).status.code(), Some(2));

    // no vector for the custom scenario
    let o = run_cmd("run", &cfg, &out, &["--scenario", "custom"]);
    assert_eq!(o.status.code(), Some(2));

    let cfg = write_config(tmp.path(), "g.toml", "[single_shock]\ngrid = [0.5, 1.5]\n");
    assert_eq!(
        run_cmd("single-shock", &cfg, &out, &[]).status.code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "[run]\nhorizon = 10\n");
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run_cmd("run", &cfg, &blocker.join("sub"), &[]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn run_is_byte_identical_across_invocations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = run_cmd("run", &cfg, out, &[]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["trajectory.csv", "manifest.toml", "monthly_panel.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }

    // outputs round-trip through their readers
    let bytes = fs::read(a.join("trajectory.csv")).unwrap();
    let traj = Trajectory::read_csv(bytes.as_slice()).unwrap();
    assert_eq!(traj.records.len(), 182);
    let mut again = Vec::new();
    traj.write_csv(&mut again).unwrap();
    assert_eq!(again, bytes);

    let bytes = fs::read(a.join("monthly_panel.csv")).unwrap();
    let panel = MonthlyPanel::read_csv(bytes.as_slice(), PanelSource::Empirical).unwrap();
    assert_eq!(panel.source, PanelSource::Model);
    assert_eq!(panel.value("A01", (2020, 2)), Some(100.0));
    let mut again = Vec::new();
    panel.write_csv(&mut again).unwrap();
    assert_eq!(again, bytes);

    let manifest = fs::read_to_string(a.join("manifest.toml")).unwrap();
    assert!(manifest.contains("scenario = \"s5\""));
    assert!(manifest.contains("kind = \"ihs2\""));
    assert!(manifest.contains("config_sha256"));
}

#[test]
fn cli_flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "[run]\nhorizon = 100\n");
    let out = tmp.path().join("o");
    let o = run_cmd("run", &cfg, &out, &["--kind", "linear", "--scenario", "s1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("scenario = \"s1\""));
    assert!(manifest.contains("kind = \"linear\""));
}

#[test]
fn zero_shock_run_is_flat() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        "[scenario]\nsupply = \"none\"\ndemand = false\n\
         categories = { investment = 0.0, export = 0.0, npish = 0.0 }\n",
    );
    let out = tmp.path().join("o");
    let o = run_cmd("run", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let traj = Trajectory::read_csv(fs::File::open(out.join("trajectory.csv")).unwrap()).unwrap();
    for r in &traj.records {
        for i in 0..traj.n_industries() {
            assert!((r.x[i] - traj.x0[i]).abs() <= 1e-9 * traj.x0[i]);
        }
    }
}

#[test]
fn two_by_two_sweep_gives_four_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        "[run]\nhorizon = 120\n\n[[sweep.axes]]\nname = \"tau\"\nvalues = [5, 10]\n\n\
         [[sweep.axes]]\nname = \"scenario\"\nvalues = [\"s5\", \"s6\"]\n",
    );
    let (one, four) = (tmp.path().join("j1"), tmp.path().join("j4"));
    for (out, jobs) in [(&one, "1"), (&four, "4")] {
        let o = run_cmd("sweep", &cfg, out, &["--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let summary = fs::read_to_string(one.join("sweep_summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("cell,tau,scenario,"));
    assert!(lines[2].starts_with("1,5,s6,"));
    for f in ["sweep.csv", "sweep_summary.csv"] {
        assert_eq!(
            fs::read(one.join(f)).unwrap(),
            fs::read(four.join(f)).unwrap()
        );
    }
    let cells = SensitivityCell::read_csv(fs::File::open(one.join("sweep.csv")).unwrap()).unwrap();
    assert_eq!(cells.len(), 4);
    assert!(cells.iter().all(|c| c.output_fraction.len() == 120));
}

#[test]
fn demand_single_shock_agrees_across_kinds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        "[single_shock]\nmodes = [\"demand\"]\ngrid = [0.3, 0.9]\nkinds = [\"leontief\", \"ihs3\"]\n",
    );
    let out = tmp.path().join("o");
    let o = run_cmd("single-shock", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bytes = fs::read(out.join("single_shock_demand.csv")).unwrap();
    let res = SweepResult::read_csv(bytes.as_slice()).unwrap();
    assert_eq!(res.cells.len(), 5 * 2 * 2);
    for pair in res.cells.chunks(2) {
        assert_eq!(pair[0].fraction, pair[1].fraction);
        assert!(pair[0].fraction < 1.0);
    }
    let mut again = Vec::new();
    res.write_csv(&mut again).unwrap();
    assert_eq!(again, bytes);
    assert!(!out.join("single_shock_supply.csv").exists());
}

#[test]
fn metrics_on_identical_panels_are_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let panel = tmp.path().join("panel.csv");
    let mut text = String::from("industry_code,month,value\n");
    for code in ["A01", "C29", "G47", "I", "O84"] {
        for (m, v) in [("2020-04", 80.5), ("2020-05", 85.0), ("2020-06", 91.25)] {
            text.push_str(&format!("{code},{m},{v}\n"));
        }
    }
    fs::write(&panel, text).unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        "[metrics]\ndata_panel = \"panel.csv\"\nmodel_panel = \"panel.csv\"\n",
    );
    let out = tmp.path().join("o");
    let o = run_cmd("metrics", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics, "afe_sectoral,afe_aggregate,n_months\n0,0,3\n");

    // against the simulated model instead
    let cfg = write_config(
        tmp.path(),
        "m.toml",
        "[metrics]\ndata_panel = \"panel.csv\"\n",
    );
    let o = run_cmd("metrics", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    let row: Vec<f64> = metrics
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(row[0] > 0.0 && row[0] >= row[1].abs());
}

#[test]
fn calibrate_writes_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "");
    let out = tmp.path().join("o");
    let o = run_cmd("calibrate", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let crit = fs::read_to_string(out.join("criticality.csv")).unwrap();
    assert_eq!(crit.lines().count(), 1 + 25);
    let targets = prodnet::io::read_vector(
        fs::File::open(out.join("inventory_targets.csv")).unwrap(),
        "n",
    )
    .unwrap();
    let toy = prodnet::toy::generate(prodnet::toy::DEFAULT_SEED);
    assert_eq!(targets.1, toy.inventory_targets.as_slice());
}
