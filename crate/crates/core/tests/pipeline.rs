mod common;

use lclrr::data::{gen_synthetic, split_train_test, write_pgm, GrayImage, SynthSpec};
use lclrr::harness::{run_experiment, run_rpca_baseline, DataSource, ExperimentConfig};
use lclrr::Error;
use proptest::prelude::*;

fn clean() -> ExperimentConfig {
    ExperimentConfig {
        source: DataSource::Synthetic(SynthSpec { corruption_fraction: 0.0, ..Default::default() }),
        ..Default::default()
    }
}

#[test]
fn clean_separable_data_is_classified_perfectly() {
    let r = run_experiment(&clean()).unwrap();
    for rep in &r.repetitions {
        assert_eq!(rep.accuracy_pct, 100.0, "repetition {}", rep.repetition);
    }
}

#[test]
fn rpca_baseline_is_close_on_clean_data() {
    let ours = run_experiment(&clean()).unwrap();
    let base = run_rpca_baseline(&clean()).unwrap();
    assert!((ours.mean_accuracy_pct - base.mean_accuracy_pct).abs() <= 2.0);
}

#[test]
fn resubstitution_is_at_least_test_accuracy_on_average() {
    let (mut train, mut test) = (0.0, 0.0);
    for s in 0..10u64 {
        let spec = SynthSpec { seed: s * 1000, ..Default::default() };
        let cfg =
            ExperimentConfig { source: DataSource::Synthetic(spec), seed: s * 1000, ..Default::default() };
        let r = run_experiment(&cfg).unwrap();
        train += r.mean_train_accuracy_pct;
        test += r.mean_accuracy_pct;
    }
    assert!(train >= test, "train {} test {}", train / 10.0, test / 10.0);
}

#[test]
fn accuracies_are_percentages_and_repetitions_are_kept() {
    let r = run_experiment(&ExperimentConfig { repetitions: 3, ..Default::default() }).unwrap();
    assert_eq!(r.repetitions.len(), 3);
    for rep in &r.repetitions {
        for v in [rep.accuracy_pct, rep.nn_accuracy_pct, rep.train_accuracy_pct] {
            assert!((0.0..=100.0).contains(&v));
        }
    }
}

#[test]
fn all_black_images_abort_with_a_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    for c in 0..2 {
        let dir = tmp.path().join(format!("c{c}"));
        std::fs::create_dir(&dir).unwrap();
        for i in 0..4 {
            let img = GrayImage { rows: 8, cols: 8, pixels: vec![0.0; 64] };
            write_pgm(&dir.join(format!("{i}.pgm")), &img).unwrap();
        }
    }
    let cfg = ExperimentConfig {
        source: DataSource::ImageDir {
            path: tmp.path().to_path_buf(),
            rate: lclrr::data::DownsampleRate::Full,
            occlusion: None,
        },
        per_class_train: 2,
        dict_items_per_class: 1,
        repetitions: 1,
        ..Default::default()
    };
    match run_experiment(&cfg) {
        Err(Error::InvalidInput(msg)) => assert!(msg.contains("all zero")),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn corrupted_columns_leave_their_subspace(seed in 0u64..10_000, mag in 0.5f64..5.0) {
        let spec = SynthSpec { seed, corruption_magnitude: mag, ..Default::default() };
        let ds = gen_synthetic(&spec).unwrap();
        let clean = gen_synthetic(&SynthSpec { corruption_fraction: 0.0, ..spec.clone() }).unwrap();
        let mask = ds.corrupted_mask.clone().unwrap();
        let per = spec.samples_per_class;
        for c in 0..spec.num_classes {
            let block = clean.x.columns(c * per, per).into_owned();
            let svd = lclrr::linalg::thin_svd(&block).unwrap();
            let u = svd.u.columns(0, spec.subspace_dim).into_owned();
            for (j, &corrupted) in mask.iter().enumerate().skip(c * per).take(per) {
                let col = ds.x.column(j).into_owned();
                let resid = (&col - &u * (u.transpose() * &col)).norm();
                if corrupted {
                    prop_assert!(resid > 0.1, "column {} residual {}", j, resid);
                } else {
                    prop_assert!((col.norm() - 1.0).abs() < 1e-12);
                    prop_assert!(resid < 1e-10);
                }
            }
        }
    }

    #[test]
    fn splits_partition_every_class(seed in 0u64..10_000, n_train in 1usize..29) {
        let ds = gen_synthetic(&SynthSpec::default()).unwrap();
        let (train, test) = split_train_test(&ds, n_train, seed).unwrap();
        prop_assert_eq!(train.class_counts(), vec![n_train; 3]);
        prop_assert_eq!(test.class_counts(), vec![30 - n_train; 3]);
        let mut cols: Vec<Vec<u64>> = train.x.column_iter().chain(test.x.column_iter())
            .map(|c| c.iter().map(|v| v.to_bits()).collect()).collect();
        let mut all: Vec<Vec<u64>> = ds.x.column_iter().map(|c| c.iter().map(|v| v.to_bits()).collect()).collect();
        cols.sort();
        all.sort();
        prop_assert_eq!(cols, all);
    }
}
