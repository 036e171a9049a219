use std::path::{Path, PathBuf};
use std::process::Command;

use iiot_energy::learning::Variant;
use iiot_energy_cli::learn::{LearningSetup, LEARNING_HEADER};
use iiot_energy_cli::place::PLACEMENT_HEADER;
use iiot_energy_cli::*;

fn scenario(text: &str) -> Scenario {
    Scenario::from_toml_str(text).unwrap()
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn single(s: &Scenario) -> Table {
    let mut tables = render(s).unwrap();
    assert_eq!(tables.len(), 1);
    tables.remove(0).1
}

#[test]
fn minimal_learning_scenario_takes_defaults() {
    let s = scenario("kind = \"learning\"");
    let cfg = &s.points()[0].config;
    assert_eq!(cfg.seed, 0);
    assert_eq!(cfg.learning.workers, 18);
    assert_eq!(cfg.learning.variant, Variant::Ggadmm);
    assert_eq!(cfg.radio, iiot_energy::radio::RadioConfig::default());
    assert_eq!(s.output(), PathBuf::from("out"));
}

#[test]
fn negative_k_names_the_field_and_line() {
    let err = Scenario::from_toml_str("kind = \"radio-dlt\"\n\n[radio]\nK = -3\n").unwrap_err();
    let e = &err.field_errors()[0];
    assert_eq!(e.field, "radio.K");
    assert_eq!(e.line, Some(4));
    assert!(err.to_string().contains("radio.K"));
}

#[test]
fn zero_k_is_a_range_error() {
    let err = Scenario::from_toml_str("kind = \"radio-dlt\"\n[radio]\nK = 0\n").unwrap_err();
    assert_eq!(err.field_errors()[0].field, "radio.K");
    assert_eq!(err.field_errors()[0].line, Some(3));
}

#[test]
fn unknown_keys_are_parse_errors() {
    match Scenario::from_toml_str("kind = \"learning\"\nbogus = 1\n").unwrap_err() {
        ScenarioError::Parse { line, message } => {
            assert_eq!(line, Some(2));
            assert!(message.contains("bogus"), "{message}");
        }
        other => panic!("{other}"),
    }
    match Scenario::from_toml_str("kind = \"learning\"\n[learning]\nwokers = 3\n").unwrap_err() {
        ScenarioError::Parse { message, .. } => {
            assert!(message.contains("[learning]") && message.contains("wokers"))
        }
        other => panic!("{other}"),
    }
}

#[test]
fn syntax_errors_carry_lines() {
    match Scenario::from_toml_str("kind = \"learning\"\n[learning\n").unwrap_err() {
        ScenarioError::Parse { line, .. } => assert_eq!(line, Some(2)),
        other => panic!("{other}"),
    }
}

#[test]
fn every_field_error_is_reported() {
    let text = "kind = \"learning\"\n[learning]\nworkers = 1\nrho = -1.0\nbits = 40\n";
    let err = Scenario::from_toml_str(text).unwrap_err();
    let fields: Vec<_> = err
        .field_errors()
        .iter()
        .map(|e| (e.field.as_str(), e.line))
        .collect();
    assert_eq!(
        fields,
        [
            ("learning.workers", Some(3)),
            ("learning.rho", Some(4)),
            ("learning.bits", Some(5))
        ]
    );
}

#[test]
fn sweep_parameter_must_exist() {
    let text = "kind = \"learning\"\n[sweep]\nparameter = \"learning.nope\"\nvalues = [1]\n";
    let err = Scenario::from_toml_str(text).unwrap_err();
    assert_eq!(err.field_errors()[0].field, "sweep.parameter");
    assert_eq!(err.field_errors()[0].line, Some(3));
    assert!(err.to_string().contains("nope"));
}

#[test]
fn sweep_must_target_a_block_the_kind_reads() {
    let text = "kind = \"learning\"\n[sweep]\nparameter = \"radio.t\"\nvalues = [0.1]\n";
    let err = Scenario::from_toml_str(text).unwrap_err();
    assert!(
        err.to_string().contains("[radio] is not read by learning"),
        "{err}"
    );
}

#[test]
fn bad_sweep_values_point_at_the_value() {
    let text =
        "kind = \"radio-dlt\"\n[sweep]\nparameter = \"radio.t\"\nvalues = [\n 0.1,\n -1.0,\n]\n";
    let err = Scenario::from_toml_str(text).unwrap_err();
    assert_eq!(err.field_errors().len(), 1);
    assert_eq!(err.field_errors()[0].field, "radio.t");
    assert_eq!(err.field_errors()[0].line, Some(6));
}

#[test]
fn sweep_overrides_an_invalid_base_value() {
    let text = "kind = \"radio-dlt\"\n[radio]\nt = -1.0\n[sweep]\nparameter = \"radio.t\"\nvalues = [0.1, 0.2]\n";
    let s = scenario(text);
    assert_eq!(
        s.points()
            .iter()
            .map(|p| p.config.radio.t)
            .collect::<Vec<_>>(),
        [0.1, 0.2]
    );
}

#[test]
fn seed_override_matches_the_file_seed() {
    let base = "kind = \"placement\"\n[placement]\ninstances = 2\ncomponents = 4\nnodes = 4\n";
    let overridden = scenario(base).with_seed(9).unwrap();
    let written = scenario(&format!("seed = 9\n{base}"));
    assert_eq!(render(&overridden).unwrap(), render(&written).unwrap());
    assert_ne!(
        render(&overridden).unwrap(),
        render(&scenario(base)).unwrap()
    );
}

#[test]
fn learning_schema_and_sweep_files() {
    let s = scenario(
        "kind = \"learning\"\n[learning]\nworkers = 4\ndim = 3\niterations = 20\n[sweep]\nparameter = \"learning.rho\"\nvalues = [0.5, 1.0]\n",
    );
    let tables = render(&s).unwrap();
    let names: Vec<_> = tables.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["learning_rho=0.5.csv", "learning_rho=1.csv"]);
    for (_, t) in &tables {
        assert_eq!(t.header, LEARNING_HEADER);
        assert_eq!(t.rows.len(), 20);
        assert_eq!(t.rows[0][0], "1");
    }
}

#[test]
fn placement_ten_seeds_ten_rows() {
    let t = single(&scenario(
        "kind = \"placement\"\nseed = 40\n[placement]\ninstances = 10\ncomponents = 5\nnodes = 6\n",
    ));
    assert_eq!(t.header, PLACEMENT_HEADER);
    assert_eq!(t.rows.len(), 10);
    for (i, row) in t.rows.iter().enumerate() {
        assert_eq!(row[0], (40 + i).to_string());
        let (opt, heur): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!(opt <= heur + 1e-9);
        assert_eq!(
            (row[4].as_str(), row[5].as_str(), row[6].as_str()),
            ("", "", "0")
        );
    }
}

#[test]
fn placement_timing_fills_columns() {
    let t = single(&scenario("kind = \"placement\"\n[placement]\ninstances = 2\ncomponents = 4\nnodes = 4\ntiming = true\n"));
    for row in &t.rows {
        assert!(row[4].parse::<f64>().unwrap() >= 0.0);
        assert!(row[5].parse::<f64>().unwrap() >= 0.0);
    }
}

#[test]
fn placement_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let core_data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/instance.toml");
    std::fs::copy(core_data, dir.path().join("inst.toml")).unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(
        &path,
        "kind = \"placement\"\nseed = 5\n[placement]\ninstance = \"inst.toml\"\n",
    )
    .unwrap();
    let t = single(&parse_scenario(&path).unwrap());
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.rows[0][0], "5");
    assert_eq!(t.rows[0][1].parse::<f64>().unwrap(), 2.55);
}

#[test]
fn placement_example_matches_golden_file() {
    let t = single(&parse_scenario(example("placement.toml")).unwrap());
    let golden = std::fs::read(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/placement_golden.csv"),
    )
    .unwrap();
    assert_eq!(
        String::from_utf8(t.to_bytes()).unwrap(),
        String::from_utf8(golden).unwrap()
    );
}

#[test]
fn radio_single_file_one_row_per_point() {
    let s = parse_scenario(example("radio.toml")).unwrap();
    let t = single(&s);
    assert_eq!(t.header[..3], ["radio.t", "L_total", "E_total"]);
    assert_eq!(t.header.len(), 3 + 2 * 10 + 2);
    assert_eq!(t.rows.len(), 7);
    assert_eq!(t.rows[0][0], "0.04");
    let no_sweep = single(&scenario("kind = \"radio-dlt\""));
    assert_eq!(no_sweep.header[0], "point");
    assert_eq!(no_sweep.rows.len(), 1);
}

#[test]
fn radio_rows_sum_their_terms() {
    let t = single(&scenario("kind = \"radio-dlt\""));
    let row: Vec<f64> = t.rows[0].iter().map(|v| v.parse().unwrap()).collect();
    let latency: f64 = (0..10).map(|i| row[3 + 2 * i]).sum();
    let energy: f64 = (0..10).map(|i| row[4 + 2 * i]).sum();
    assert!((latency - row[1]).abs() < 1e-12);
    assert!((energy - row[2]).abs() < 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    for name in [
        "learning.toml",
        "placement.toml",
        "radio.toml",
        "integrated.toml",
    ] {
        let s = parse_scenario(example(name)).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let pa = run_scenario(&s.clone().with_output(a.path().into())).unwrap();
        let pb = run_scenario(&s.with_output(b.path().into())).unwrap();
        assert_eq!(pa.len(), pb.len());
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(x.file_name(), y.file_name());
            assert_eq!(
                std::fs::read(x).unwrap(),
                std::fs::read(y).unwrap(),
                "{name}"
            );
        }
    }
}

const FOUR_WORKERS: &str = "kind = \"integrated\"\nseed = 21\n[learning]\nworkers = 4\ndim = 3\niterations = 150\n[integrated]\nnodes = 8\n";

#[test]
fn integrated_learning_matches_standalone() {
    let s = scenario(FOUR_WORKERS);
    let cfg = &s.points()[0].config;
    let report = run_integrated(cfg).unwrap();
    let alone = LearningSetup::new(&cfg.learning, iiot_energy::Seed(cfg.seed))
        .unwrap()
        .run()
        .unwrap();
    assert_eq!(report.trace.final_models, alone.final_models);
    assert_eq!(report.trace.records, alone.records);
    assert!(report.trace.last().objective_error < 1e-6);
}

#[test]
fn integrated_subtasks_follow_roles() {
    let report = run_integrated(&scenario(FOUR_WORKERS).points()[0].config).unwrap();
    assert_eq!(report.subtasks[0], Subtask::DataProcessing);
    assert_eq!(report.subtasks.len(), 5);
    for (w, s) in report.subtasks[1..].iter().enumerate() {
        assert_eq!(s.worker(), Some(w));
    }
    let tails = report
        .subtasks
        .iter()
        .filter(|s| matches!(s, Subtask::Training { .. }))
        .count();
    let from_data = report.app.edges().iter().filter(|e| e.0 == 0).count();
    assert_eq!(tails, from_data);
    assert_eq!(report.assignment.placement.len(), 5);
}

#[test]
fn integrated_totals_balance() {
    for period in [1, 3, 7] {
        let s = scenario(&format!("{FOUR_WORKERS}ledger_period = {period}\n"));
        let report = run_integrated(&s.points()[0].config).unwrap();
        let x = report.totals;
        assert!(x.balanced());
        assert_eq!(x.records, 150 / period as u64);
        let t = report.iteration_table();
        let last_total: f64 = t.rows.last().unwrap()[6].parse().unwrap();
        assert_eq!(last_total, x.total);
    }
}

#[test]
fn disabled_ledger_leaves_placement_plus_learning() {
    let s = scenario(&format!("{FOUR_WORKERS}ledger = false\n"));
    let report = run_integrated(&s.points()[0].config).unwrap();
    let x = report.totals;
    assert_eq!(x.records, 0);
    assert!(report.record.is_none());
    assert_eq!(x.total, x.placement + x.learning_joules);
}

#[test]
fn infeasible_integrated_placement_is_a_runtime_error() {
    let s = scenario(
        "kind = \"integrated\"\n[learning]\nworkers = 8\niterations = 5\n[integrated]\nnodes = 2\n",
    );
    let err = render(&s).unwrap_err();
    assert!(matches!(err, RunError::Placement { .. }));
    assert!(
        err.to_string().contains("9 learning sub-tasks on 2 nodes"),
        "{err}"
    );
}

#[test]
fn integrated_rejects_parameter_server() {
    let err = Scenario::from_toml_str("kind = \"integrated\"\n[learning]\nvariant = \"ps-admm\"\n")
        .unwrap_err();
    assert_eq!(err.field_errors()[0].field, "learning.variant");
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_iiot-energy"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let ok = cli(&[
        "radio",
        "--scenario",
        example("radio.toml").to_str().unwrap(),
        "--output",
        out,
    ]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(Path::new(out).join("radio.csv").exists());

    let invalid = dir.path().join("bad.toml");
    std::fs::write(&invalid, "kind = \"radio-dlt\"\n[radio]\nK = -1\n").unwrap();
    let bad = cli(&[
        "radio",
        "--scenario",
        invalid.to_str().unwrap(),
        "--output",
        out,
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("radio.K"));

    let wrong = cli(&[
        "learn",
        "--scenario",
        example("radio.toml").to_str().unwrap(),
        "--output",
        out,
    ]);
    assert_eq!(wrong.status.code(), Some(1));

    let missing = cli(&[
        "learn",
        "--scenario",
        dir.path().join("none.toml").to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(1));

    let infeasible = dir.path().join("inf.toml");
    std::fs::write(
        &infeasible,
        "kind = \"integrated\"\n[learning]\nworkers = 8\niterations = 5\n[integrated]\nnodes = 2\n",
    )
    .unwrap();
    let run = cli(&[
        "integrated",
        "--scenario",
        infeasible.to_str().unwrap(),
        "--output",
        out,
    ]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn cli_seed_flag_matches_file_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let base = example("placement.toml");
    let with_seed = dir.path().join("seeded.toml");
    let text = std::fs::read_to_string(&base)
        .unwrap()
        .replace("seed = 100", "seed = 7");
    std::fs::write(&with_seed, text).unwrap();
    let r1 = cli(&[
        "place",
        "--scenario",
        base.to_str().unwrap(),
        "--seed",
        "7",
        "--output",
        a.to_str().unwrap(),
    ]);
    let r2 = cli(&[
        "place",
        "--scenario",
        with_seed.to_str().unwrap(),
        "--output",
        b.to_str().unwrap(),
    ]);
    assert!(r1.status.success() && r2.status.success());
    assert_eq!(
        std::fs::read(a.join("placement.csv")).unwrap(),
        std::fs::read(b.join("placement.csv")).unwrap()
    );
}
