use exemplars::dataset::normalize_columns;
use exemplars::metrics::{clustering_accuracy, clustering_fscore, imbalance};
use exemplars::selfrep::{f_cost, min_cost};
use exemplars::{DataMatrix, Dictionary, LassoProblem, SolverOptions};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn unit_data(d: usize, values: &[f64]) -> Option<DataMatrix> {
    let n = values.len() / d;
    let m = DataMatrix::new(DMatrix::from_column_slice(d, n, &values[..d * n]), None).ok()?;
    normalize_columns(&m).ok()
}

fn columns(d: usize, n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cost_stays_in_range_and_shrinks_with_more_exemplars(
        v in columns(4, 8),
        lambda in 1.5f64..1e3,
        j in 0usize..8,
    ) {
        let Some(data) = unit_data(4, &v) else { return Ok(()) };
        let opts = SolverOptions::default();
        let mut prev = lambda / 2.0;
        for size in 1..=5usize {
            let set: Vec<usize> = (0..8).filter(|&i| i != j).take(size).collect();
            let f = f_cost(data.column(j), &set, &data, lambda, &opts).unwrap();
            prop_assert!(f >= min_cost(lambda) - 1e-9 && f <= lambda / 2.0 + 1e-9);
            prop_assert!(f <= prev + 1e-8);
            prev = f;
        }
    }

    #[test]
    fn negating_an_atom_negates_its_coefficient(
        v in columns(3, 5),
        lambda in 1.5f64..1e4,
        flip in 0usize..4,
    ) {
        let Some(data) = unit_data(3, &v) else { return Ok(()) };
        let atoms = data.points().columns(0, 4).into_owned();
        let mut flipped = atoms.clone();
        flipped.set_column(flip, &(-atoms.column(flip)));
        let x = data.column(4);
        let opts = SolverOptions::default();
        let d1 = Dictionary::new(atoms).unwrap();
        let d2 = Dictionary::new(flipped).unwrap();
        let a = LassoProblem::new(&d1, x, lambda).unwrap().solve(&opts).unwrap();
        let b = LassoProblem::new(&d2, x, lambda).unwrap().solve(&opts).unwrap();
        prop_assert!((a.objective - b.objective).abs() <= 1e-10);
        prop_assert!((a.coeffs[flip] + b.coeffs[flip]).abs() <= 1e-8);
    }

    #[test]
    fn metrics_ignore_label_names(
        truth in prop::collection::vec(0usize..4, 1..40),
        pred_seed in prop::collection::vec(0usize..5, 40),
        shift in 1usize..100,
    ) {
        let pred: Vec<usize> = pred_seed[..truth.len()].to_vec();
        let renamed: Vec<usize> = pred.iter().map(|p| 7 * p + shift).collect();
        let acc = clustering_accuracy(&truth, &pred).unwrap();
        prop_assert!((acc - clustering_accuracy(&truth, &renamed).unwrap()).abs() < 1e-12);
        let f = clustering_fscore(&truth, &pred).unwrap();
        prop_assert!((f - clustering_fscore(&truth, &renamed).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=100.0).contains(&acc));
        prop_assert!((clustering_accuracy(&truth, &truth).unwrap() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn imbalance_is_bounded_and_permutation_invariant(
        counts in prop::collection::vec(0usize..50, 1..8),
    ) {
        prop_assume!(counts.iter().any(|&c| c > 0));
        let v = imbalance(&counts).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        let mut rev = counts.clone();
        rev.reverse();
        prop_assert!((v - imbalance(&rev).unwrap()).abs() < 1e-12);
    }
}
