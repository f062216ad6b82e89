use std::sync::Arc;

use proptest::prelude::*;

use specgraph::detect::{misclassification_rate, sign_partition, spectral_cluster, SpectralMode};
use specgraph::models::{expected_matrix, ModelSpec};
use specgraph::{LabelVector, SymmetricOperator};

fn labels(k: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (2usize..60).prop_flat_map(move |n| (prop::collection::vec(0..k, n), prop::collection::vec(0..k, n)))
}

proptest! {
    #[test]
    fn rate_ignores_relabeling((est, truth) in labels(4), shift in 0usize..4) {
        let base = misclassification_rate(
            &LabelVector::new(est.clone(), 4).unwrap(),
            &LabelVector::new(truth.clone(), 4).unwrap(),
        ).unwrap();
        let permuted: Vec<usize> = est.iter().map(|&c| (c + shift) % 4).collect();
        let swapped: Vec<usize> = truth.iter().map(|&c| 3 - c).collect();
        let a = misclassification_rate(&LabelVector::new(permuted, 4).unwrap(), &LabelVector::new(truth, 4).unwrap()).unwrap();
        let b = misclassification_rate(&LabelVector::new(est, 4).unwrap(), &LabelVector::new(swapped, 4).unwrap()).unwrap();
        prop_assert_eq!(base, a);
        prop_assert_eq!(base, b);
    }

    #[test]
    fn two_way_rate_is_at_most_half((est, truth) in labels(2)) {
        let r = misclassification_rate(&LabelVector::new(est, 2).unwrap(), &LabelVector::new(truth, 2).unwrap()).unwrap();
        prop_assert!(r <= 0.5);
    }

    #[test]
    fn sign_partition_under_scaling(v in prop::collection::vec(-1.0f64..1.0, 1..50), c in 0.01f64..100.0) {
        prop_assume!(v.iter().all(|&x| x != 0.0));
        let base = sign_partition(&v);
        let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
        let flipped: Vec<f64> = v.iter().map(|x| -x * c).collect();
        prop_assert_eq!(&sign_partition(&scaled), &base);
        let f = sign_partition(&flipped);
        prop_assert!(f.as_slice().iter().zip(base.as_slice()).all(|(a, b)| a != b));
        prop_assert_eq!(misclassification_rate(&f, &base).unwrap(), 0.0);
    }
}

#[test]
fn expectation_is_split_exactly() {
    for (a, b, n) in [(5.0, 1.0, 50), (20.0, 19.0, 301), (3.0, 0.0, 1000)] {
        let spec = ModelSpec::PlantedPartition { a, b };
        let truth = LabelVector::balanced_halves(n);
        let op = SymmetricOperator::from_expected(Arc::new(expected_matrix(&spec, &truth).unwrap()));
        for mode in [SpectralMode::AdjacencySecondLargest, SpectralMode::TopKEmbedding] {
            let est = spectral_cluster(&op, 2, mode, 9).unwrap();
            assert_eq!(misclassification_rate(&est, &truth).unwrap(), 0.0, "{a} {b} {n} {mode:?}");
        }
    }
}

#[test]
fn three_block_expectation_embedding() {
    let spec = ModelSpec::Sbm {
        pi: vec![0.3, 0.3, 0.4],
        b: vec![vec![0.5, 0.05, 0.05], vec![0.05, 0.5, 0.05], vec![0.05, 0.05, 0.5]],
    };
    let truth = spec.draw_labels(90, 2);
    let op = SymmetricOperator::from_expected(Arc::new(expected_matrix(&spec, &truth).unwrap()));
    let est = spectral_cluster(&op, 3, SpectralMode::TopKEmbedding, 4).unwrap();
    assert_eq!(misclassification_rate(&est, &truth).unwrap(), 0.0);
}
