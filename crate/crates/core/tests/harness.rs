use std::collections::HashSet;
use std::fs;

use neurochaos::causality::CccConfig;
use neurochaos::chaosfex::NeurochaosConfig;
use neurochaos::harness::*;
use neurochaos::Error;

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        etas: vec![0.0, 0.3],
        trials: 20,
        causality_trials: 4,
        length: 300,
        transient: 100,
        ccc: CccConfig::new(60, 30, 20, 4),
        ccc_firing: CccConfig::new(60, 30, 20, 2),
        ..ExperimentConfig::default()
    }
}

#[test]
fn split_reproduces_table_counts() {
    let pairs = SystemSpec::skew_tent().generate(0.3, 1000, 1, 50, 10).unwrap();
    let split = split_train_test(&pairs, 9).unwrap();
    assert_eq!(split.train.len(), 1600);
    assert_eq!(split.test.len(), 400);
    assert_eq!(split.train.class_counts(), vec![801, 799]);
    assert_eq!(split.test.class_counts(), vec![199, 201]);
}

#[test]
fn split_is_a_seeded_partition() {
    let pairs = SystemSpec::skew_tent().generate(0.2, 100, 3, 20, 10).unwrap();
    let a = split_train_test(&pairs, 5).unwrap();
    let b = split_train_test(&pairs, 5).unwrap();
    assert_eq!(a, b);
    let c = split_train_test(&pairs, 6).unwrap();
    assert_ne!(a.train_masters, c.train_masters);

    // every instance lands in exactly one side
    let key = |v: &Vec<f64>, label: usize| (label, v.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    let train: HashSet<_> = a.train.iter().map(|(x, l)| key(&x.to_vec(), l)).collect();
    let test: HashSet<_> = a.test.iter().map(|(x, l)| key(&x.to_vec(), l)).collect();
    assert!(train.is_disjoint(&test));
    assert_eq!(train.len() + test.len(), 200);
}

#[test]
fn split_counts_scale_and_reject_tiny_inputs() {
    assert_eq!(train_counts(1000), (801, 799));
    assert_eq!(train_counts(50), (40, 40));
    let pairs = SystemSpec::skew_tent().generate(0.2, 1, 3, 20, 10).unwrap();
    assert!(split_train_test(&pairs, 0).is_err());
    assert!(split_train_test(&[], 0).is_err());
}

#[test]
fn generation_is_deterministic_and_seeded_per_trial() {
    let sys = SystemSpec::coupled_ar();
    let a = sys.generate(0.5, 5, 11, 40, 10).unwrap();
    let b = sys.generate(0.5, 5, 11, 40, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a[0].master, a[1].master);
}

#[test]
fn results_roundtrip_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out/sweep.csv");
    let rows = vec![
        ResultRow {
            case: "train".into(),
            eta: 0.1,
            method: Method::Chaosnet,
            macro_f1: 1.0,
            seed: 43,
        },
        ResultRow {
            case: "II".into(),
            eta: 0.2,
            method: Method::Mlp,
            macro_f1: 0.625,
            seed: 44,
        },
    ];
    let config = small_config();
    let mut manifest = Manifest::new("sweep").with_config(&config).parameter("method", "chaosnet");
    manifest.seeds = vec![43, 44];
    export_results(&rows, &path, &manifest).unwrap();

    let back: Vec<ResultRow> = read_results(&path).unwrap();
    assert_eq!(back, rows);
    let header = fs::read_to_string(&path).unwrap();
    assert!(header.starts_with("case,eta,method,macro_f1,seed\n"));
    let m = Manifest::load(&manifest_path(&path)).unwrap();
    assert_eq!(m, manifest);
    assert_eq!(m.config.unwrap().seed, config.seed);
}

#[test]
fn empty_results_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<ResultRow> = Vec::new();
    let err = export_results(&rows, &dir.path().join("x.csv"), &Manifest::new("sweep")).unwrap_err();
    assert!(matches!(err, Error::Empty(_)));
}

#[test]
fn config_file_roundtrip_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    let mut config = small_config();
    config.system = SystemSpec::logistic();
    config.neurochaos = NeurochaosConfig::new(0.78, 0.499, 0.171).unwrap();
    fs::write(&path, toml::to_string(&config).unwrap()).unwrap();
    assert_eq!(load_config(&path).unwrap(), config);

    fs::write(&path, "trials = 10\netas = [0.5]\n[system]\nkind = \"coupled_ar\"\na1 = 0.8\na2 = 0.9\ngamma = 0.03\n").unwrap();
    let partial = load_config(&path).unwrap();
    assert_eq!(partial.trials, 10);
    assert_eq!(partial.system, SystemSpec::coupled_ar());
    assert_eq!(partial.neurochaos, NeurochaosConfig::default());

    fs::write(&path, "etas = [1.5]\n").unwrap();
    assert!(load_config(&path).is_err());
}

#[test]
fn trial_directory_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let sys = SystemSpec::skew_tent();
    let p1 = sys.generate(0.1, 3, 1, 30, 5).unwrap();
    let p2 = sys.generate(0.4, 2, 2, 30, 5).unwrap();
    write_trial_dir(dir.path(), 0.4, &p2).unwrap();
    write_trial_dir(dir.path(), 0.1, &p1).unwrap();
    let groups = read_trial_dir(dir.path()).unwrap();
    assert_eq!(groups.len(), 2);
    assert_eq!(groups[0].0, 0.1);
    assert_eq!(groups[1].1.len(), 2);
    for (a, b) in groups[0].1.iter().zip(&p1) {
        assert_eq!(a.master, b.master);
        assert_eq!(a.slave, b.slave);
    }
    assert!(read_trial_dir(&dir.path().join("eta_0.10")).is_err());
}

fn write_prey_predator(rows: usize, header: &str) -> tempfile::NamedTempFile {
    let file = tempfile::NamedTempFile::new().unwrap();
    let mut text = format!("{header}\n");
    for t in 0..rows {
        let x = t as f64;
        text.push_str(&format!("{x},{},{}\n", 50.0 + 30.0 * (0.4 * x).sin(), 20.0 + 10.0 * (0.4 * x - 1.0).sin()));
    }
    fs::write(file.path(), text).unwrap();
    file
}

#[test]
fn prey_predator_loader_drops_transient() {
    let file = write_prey_predator(71, "time,prey,predator");
    let pair = load_prey_predator(file.path()).unwrap();
    assert_eq!(pair.len(), 62);
    // predator is the master; row 9 is the first retained
    assert_eq!(pair.master[0], 20.0 + 10.0 * (0.4f64 * 9.0 - 1.0).sin());
    assert_eq!(pair.slave[0], 50.0 + 30.0 * (0.4f64 * 9.0).sin());

    let short = write_prey_predator(30, "time,prey,predator");
    assert_eq!(load_prey_predator(short.path()).unwrap().len(), 21);
}

#[test]
fn prey_predator_loader_names_missing_column() {
    let file = write_prey_predator(71, "time,prey,wolves");
    match load_prey_predator(file.path()) {
        Err(Error::MissingColumn(name)) => assert_eq!(name, "predator"),
        other => panic!("unexpected {other:?}"),
    }
    let bad = tempfile::NamedTempFile::new().unwrap();
    fs::write(bad.path(), "time,prey,predator\n0,abc,1\n").unwrap();
    assert!(load_prey_predator(bad.path()).is_err());
}

#[test]
fn prey_predator_ccc_runs_on_short_series() {
    let file = write_prey_predator(71, "time,prey,predator");
    let pair = load_prey_predator(file.path()).unwrap();
    let r = prey_predator_ccc(
        &pair,
        &CccConfig::new(40, 15, 4, 8),
        &NeurochaosConfig::new(0.56, 0.499, 0.1).unwrap(),
        &CccConfig::new(40, 15, 4, 4),
    )
    .unwrap();
    assert!(r.raw_predator_to_prey.is_finite() && r.firing_prey_to_predator.is_finite());
}

#[test]
fn small_sweep_is_reproducible() {
    let config = small_config();
    let a = run_eta_sweep(&config, Method::Chaosnet).unwrap();
    let b = run_eta_sweep(&config, Method::Chaosnet).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 2);
    assert_eq!(a[1].seed, config.seed + 1);
    assert!(a.iter().all(|r| (0.0..=1.0).contains(&r.macro_f1)));
}

#[test]
fn transfer_cases_parse_and_run() {
    assert_eq!("iii".parse::<TransferCase>().unwrap(), TransferCase::III);
    assert!("V".parse::<TransferCase>().is_err());
    let config = ExperimentConfig {
        etas: vec![0.2],
        ..small_config()
    };
    let rows = run_transfer_cases(&TransferCase::ALL, &[Method::Chaosnet], &config).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[3].case, "IV");
    assert!(run_transfer_cases(&[], &[Method::Chaosnet], &config).is_err());
}

#[test]
fn tiny_mlp_sweep_runs() {
    let mut config = small_config();
    config.etas = vec![0.3];
    config.mlp.hidden = vec![16, 12];
    config.mlp.epochs = 2;
    config.mlp.feature_layer = 2;
    let rows = run_eta_sweep(&config, Method::Mlp).unwrap();
    assert_eq!(rows[0].method, Method::Mlp);

    config.system = SystemSpec::coupled_ar();
    config.gc_hidden.max_order = 2;
    let points = run_gc_experiment(GcFeature::MlpHidden, &config).unwrap();
    assert_eq!(points.len(), 1);
    // four trials, two directions: every attempt is either a row or a failure
    assert_eq!(points[0].rows.len() + points[0].failures.len(), 8);
}

#[test]
fn causality_experiments_emit_rows_per_trial() {
    let mut config = small_config();
    config.system = SystemSpec::coupled_ar();
    config.gc.max_order = 5;
    config.neurochaos = NeurochaosConfig::new(0.78, 0.499, 0.171).unwrap();
    let gc = run_gc_experiment(GcFeature::ChaosfexFiringTime, &config).unwrap();
    assert_eq!(gc.len(), 2);
    let rows = causality_rows(&gc);
    assert_eq!(rows.len() + gc.iter().map(|p| p.failures.len()).sum::<usize>(), 16);
    assert!(rows.iter().all(|r| r.direction == "master->slave" || r.direction == "slave->master"));

    config.system = SystemSpec::skew_tent();
    let ccc = run_ccc_experiment(CccSource::Raw, &config).unwrap();
    assert_eq!(ccc[0].master_to_slave.as_ref().unwrap().trials(), 4);
    let again = run_ccc_experiment(CccSource::Raw, &config).unwrap();
    assert_eq!(causality_rows(&ccc), causality_rows(&again));
}

#[test]
fn bundled_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let tent = load_config(&dir.join("tent_sweep.toml")).unwrap();
    assert_eq!(tent.system, SystemSpec::skew_tent());
    assert_eq!(tent.etas.len(), 10);
    let ar = load_config(&dir.join("ar_causality.toml")).unwrap();
    assert_eq!(ar.system, SystemSpec::coupled_ar());
    assert_eq!(ar.neurochaos.q, 0.78);
    assert_eq!(ar.gc_hidden.max_order, 20);
}
