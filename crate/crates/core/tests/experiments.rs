use specgraph::bounds::{bai_yin_limit, regularized_concentration_bound};
use specgraph::experiments::*;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

fn small_config(regularization: Regularization) -> ExperimentConfig {
    ExperimentConfig {
        model: GridModel::PlantedPartition { pairs: vec![(6.0, 1.0), (12.0, 2.0)] },
        n_grid: vec![300, 700],
        replicates: 4,
        regularization,
        seed: 77,
        tol: 1e-8,
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    for reg in [
        Regularization::None,
        Regularization::DegreeCap { multiplier: 2.0 },
        Regularization::VertexRemoval { multiplier: 2.0 },
        Regularization::TauLaplacian { rho: 0.5 },
    ] {
        let cfg = small_config(reg);
        let one = pool(1).install(|| measure_concentration(&cfg).unwrap());
        let three = pool(3).install(|| measure_concentration(&cfg).unwrap());
        assert_eq!(one, three);
        assert_eq!(one.to_csv_string(), three.to_csv_string());
    }
    let phase = PhaseConfig {
        d: 6.0,
        snr_grid: vec![0.0, 4.0, 30.0],
        n: 400,
        replicates: 3,
        methods: vec![PhaseMethod::RegularizedAdjacency, PhaseMethod::RegularizedLaplacian],
        seed: 5,
        rho: 1.0,
        cap_multiplier: 2.0,
    };
    let a = pool(1).install(|| phase_sweep(&phase).unwrap());
    let b = pool(4).install(|| phase_sweep(&phase).unwrap());
    assert_eq!(a.to_csv_string(), b.to_csv_string());
}

#[test]
fn records_replay_from_their_seed() {
    let cfg = small_config(Regularization::DegreeCap { multiplier: 2.0 });
    let result = measure_concentration(&cfg).unwrap();
    for (point, record) in cfg.points().iter().zip(result.records_for("deviation")) {
        let replayed: Vec<f64> = (0..cfg.replicates)
            .map(|r| measure_replicate(point, cfg.regularization, cfg.tol, replicate_seed(record.seed, r)).unwrap().deviation)
            .collect();
        let (mean, stderr, count) = mean_stderr(&replayed);
        assert_eq!((mean, stderr, count), (record.mean, record.stderr, record.replicates));
    }
}

#[test]
fn empty_model_gives_zero_deviation() {
    let cfg = ExperimentConfig {
        model: GridModel::ErdosRenyi { degrees: vec![0.0] },
        n_grid: vec![50],
        replicates: 2,
        regularization: Regularization::None,
        seed: 1,
        tol: 1e-8,
    };
    let result = bound_scorecard(&cfg).unwrap();
    let get = |s: &str| result.records_for(s).next().unwrap().mean;
    assert_eq!(get("deviation"), 0.0);
    assert_eq!(get("seginer"), 0.0);
    assert_eq!(get("bound_bai_yin"), bai_yin_limit(0.0));
    assert_eq!(get("bound_thm51"), regularized_concentration_bound(1.0, 0.0, 1.0).unwrap());
}

#[test]
fn scorecard_on_erdos_renyi_grid() {
    let cfg = ExperimentConfig {
        model: GridModel::ErdosRenyi { degrees: vec![5.0, 20.0, 60.0] },
        n_grid: vec![1500],
        replicates: 3,
        regularization: Regularization::None,
        seed: 8,
        tol: 1e-8,
    };
    let result = bound_scorecard(&cfg).unwrap();
    for r in result.records_for("ratio_seginer") {
        assert!(r.mean >= 1.0 && r.mean <= 4.0, "d={:?}: {}", r.d, r.mean);
    }
    let bvh: Vec<f64> = result.records_for("bound_bvh").map(|r| r.mean).collect();
    let bern: Vec<f64> = result.records_for("bound_bernstein").map(|r| r.mean).collect();
    let degrees: Vec<f64> = result.records_for("bound_bvh").map(|r| r.d.unwrap()).collect();
    for ((b, s), d) in bvh.iter().zip(&bern).zip(&degrees) {
        if *d >= (1500f64).ln() {
            assert!(b <= s);
        }
    }
}

#[test]
fn no_signal_figure_is_a_coin_flip() {
    let summary = figure2_batch(&Figure2Config { a: 5.0, b: 5.0, seed: 3, ..Figure2Config::default() }, 60).unwrap();
    assert!(summary.median_regularized >= 0.3, "{}", summary.median_regularized);
}

#[test]
fn figure_table_layout() {
    let fig = figure2(&Figure2Config { seed: 11, ..Figure2Config::default() }).unwrap();
    assert_eq!(fig.table.len(), 50);
    assert!((fig.eigenvalues_regularized[0] - 1.0).abs() < 1e-10);
    let mut buf = Vec::new();
    fig.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 51);
}
