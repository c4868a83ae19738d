use grc_core::graph::{save_graph, Graph};
use grc_core::harness::{
    default_out_dir, fit_points, fit_rounds, preset, rows_from_csv, rows_to_csv, run_and_write,
    run_batch, Algorithm, ExperimentConfig, Family, FitModel, GraphSource, HarnessError,
    OutputPaths, Seeds, OUT_DIR_ENV, PRESETS,
};

fn triangle_file(dir: &tempfile::TempDir) -> std::path::PathBuf {
    let mut g = Graph::from_edges(3, 3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    g.set_weights(vec![1, 2, 3]).unwrap();
    let path = dir.path().join("triangle.txt");
    std::fs::write(&path, save_graph(&g)).unwrap();
    path
}

fn mst_config(graph: GraphSource, seeds: Seeds) -> ExperimentConfig {
    ExperimentConfig {
        name: "t".into(),
        algorithm: Algorithm::Mst { c: 2 },
        graph: Some(graph),
        seeds,
        max_rounds: 100_000,
        output: OutputPaths::default(),
    }
}

#[test]
fn triangle_batch_finds_weight_three_every_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mst_config(
        GraphSource::File {
            path: triangle_file(&dir),
        },
        Seeds::Range {
            start: 0,
            count: 10,
        },
    );
    let res = run_batch(&cfg).unwrap();
    assert_eq!(res.rows.len(), 10);
    for row in &res.rows {
        assert_eq!(row.output_weight, Some(3));
        assert_eq!(row.output_size, Some(2));
        assert!(row.oracle_ok && row.completed(), "{row:?}");
    }
    assert_eq!(res.summary.success_rate, 1.0);
    assert_eq!(res.summary.runs, 10);
}

#[test]
fn empty_seed_list_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mst_config(
        GraphSource::File {
            path: triangle_file(&dir),
        },
        Seeds::List(vec![]),
    );
    let err = run_batch(&cfg).unwrap_err();
    assert!(matches!(err, HarnessError::NoSeeds));
    assert_eq!(err.to_string(), "no seeds");
}

#[test]
fn seeds_are_sorted_and_deduplicated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = mst_config(
        GraphSource::File {
            path: triangle_file(&dir),
        },
        Seeds::List(vec![5, 1, 5, 3]),
    );
    let seeds: Vec<u64> = run_batch(&cfg)
        .unwrap()
        .rows
        .iter()
        .map(|r| r.seed)
        .collect();
    assert_eq!(seeds, vec![1, 3, 5]);
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = mst_config(
        GraphSource::Family {
            family: Family::GnpConnected { degree: 4.0 },
            sizes: vec![8, 16],
            weights: Some(grc_core::graph::WeightMode::Uniform { max: 8 }),
        },
        Seeds::Range { start: 0, count: 4 },
    );
    let a = run_batch(&cfg).unwrap();
    let b = run_batch(&cfg).unwrap();
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    assert_eq!(a.summary_json(), b.summary_json());
}

#[test]
fn csv_round_trips() {
    let cfg = mst_config(
        GraphSource::Family {
            family: Family::Cycle,
            sizes: vec![6],
            weights: Some(grc_core::graph::WeightMode::DistinctRandom),
        },
        Seeds::Range { start: 0, count: 3 },
    );
    let rows = run_batch(&cfg).unwrap().rows;
    let text = rows_to_csv(&rows).unwrap();
    assert!(text.starts_with(
        "version,experiment,algorithm,n,m,seed,status,rounds,output_size,output_weight,decision,expected,oracle_ok,flags,value,reference"
    ));
    assert_eq!(rows_from_csv(&text).unwrap(), rows);
}

#[test]
fn outputs_land_where_the_config_says() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = mst_config(
        GraphSource::File {
            path: triangle_file(&dir),
        },
        Seeds::Range { start: 0, count: 2 },
    );
    cfg.output = OutputPaths {
        csv: Some(dir.path().join("out/rows.csv")),
        json: Some(dir.path().join("out/summary.json")),
    };
    let res = run_and_write(&cfg).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("out/rows.csv")).unwrap();
    assert_eq!(csv, res.to_csv().unwrap());
    let json: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["version"], 1);
    assert_eq!(json["runs"], 2);
}

#[test]
fn out_dir_follows_the_environment() {
    std::env::set_var(OUT_DIR_ENV, "/tmp/somewhere-else");
    assert_eq!(
        default_out_dir(),
        std::path::PathBuf::from("/tmp/somewhere-else")
    );
    std::env::remove_var(OUT_DIR_ENV);
    assert_eq!(default_out_dir(), std::path::PathBuf::from("grc-out"));
}

#[test]
fn fit_recovers_a_pure_log_curve() {
    let pts: Vec<(usize, f64)> = [16usize, 32, 64, 128, 256]
        .iter()
        .map(|&n| (n, 5.0 * (n as f64).log2()))
        .collect();
    let fit = fit_points(&pts, FitModel::LogN).unwrap();
    assert!((fit.a - 5.0).abs() < 1e-9, "{fit:?}");
    assert!(fit.b.abs() < 1e-9, "{fit:?}");
    assert!(fit.residual < 1e-9);
}

#[test]
fn constant_rounds_fit_a_flat_line() {
    let pts = vec![(8, 40.0), (16, 40.0), (32, 40.0)];
    let fit = fit_points(&pts, FitModel::KappaLogN { kappa: 3 }).unwrap();
    assert!(fit.a.abs() < 1e-9);
    assert!((fit.b - 40.0).abs() < 1e-9);
}

#[test]
fn fit_needs_two_sizes() {
    let err = fit_points(&[(8, 3.0), (8, 4.0)], FitModel::LogN).unwrap_err();
    assert!(matches!(err, HarnessError::FitDomain(1)));
    let dir = tempfile::tempdir().unwrap();
    let cfg = mst_config(
        GraphSource::File {
            path: triangle_file(&dir),
        },
        Seeds::Range { start: 0, count: 2 },
    );
    let rows = run_batch(&cfg).unwrap().rows;
    assert!(matches!(
        fit_rounds(&rows, FitModel::LogN),
        Err(HarnessError::FitDomain(1))
    ));
}

#[test]
fn config_errors_name_the_field() {
    let text = r#"{
        "name": "x",
        "algorithm": { "spanner": { "kappa": "three", "eps": 0.5, "c": 3 } },
        "seeds": { "range": { "start": 0, "count": 2 } }
    }"#;
    match ExperimentConfig::from_json(text) {
        Err(HarnessError::Config { path, .. }) => assert_eq!(path, "algorithm.spanner.kappa"),
        other => panic!("{other:?}"),
    }
    let unknown = r#"{ "name": "x", "algorithm": { "mst": { "c": 3 } }, "seeds": { "list": [1] }, "colour": 1 }"#;
    assert!(matches!(
        ExperimentConfig::from_json(unknown),
        Err(HarnessError::Config { .. })
    ));
}

#[test]
fn configs_survive_json() {
    for name in PRESETS {
        for cfg in preset(name).unwrap() {
            assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        }
    }
    assert!(matches!(preset("c9"), Err(HarnessError::UnknownPreset(_))));
}

#[test]
fn closure_batch_agrees_with_brute_force() {
    let cfg = ExperimentConfig {
        name: "closure".into(),
        algorithm: Algorithm::Closure { max_n: 8, max_k: 3 },
        graph: None,
        seeds: Seeds::Range {
            start: 0,
            count: 200,
        },
        max_rounds: 1,
        output: OutputPaths::default(),
    };
    let res = run_batch(&cfg).unwrap();
    assert!(res.rows.iter().all(|r| r.oracle_ok));
}
