//! Cross-checks against dense nalgebra computations.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use samkit::ilutp::{factor, IlutpParams};
use samkit::krylov::{gmres, GmresConfig};
use samkit::pattern::{pattern_of, SparsityPattern};
use samkit::problems::{
    fem_pair_2d, helmholtz_sequence, laplace2d_dirichlet, talbot_shifts, KappaField,
    TalbotConstants,
};
use samkit::sam::{compose, compute_map, map_residual_norm, PreconditionerChain, SamPlan};
use samkit::sparse::{DenseBlock, SparseMatrix};
use samkit::Identity;

use common::*;

#[test]
fn dense_least_squares_matches_oracle_on_rank_deficient_blocks() {
    let mut rng = rng(1);
    for trial in 0..30 {
        let (m, n) = (rng.random_range(1..12), rng.random_range(1..8));
        let rank = rng.random_range(0..=m.min(n));
        // product of thin random factors has the requested rank
        let u = DMatrix::from_fn(m, rank, |_, _| rng.random_range(-1.0..1.0));
        let v = DMatrix::from_fn(rank, n, |_, _| rng.random_range(-1.0..1.0));
        let a = &u * &v;
        let b = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let block = DenseBlock::from_fn(m, n, |i, j| a[(i, j)]);
        let ls = block.least_squares(b.as_slice());
        let oracle = min_norm_ls(&a, &b);
        let x = DVector::from_vec(ls.solution.clone());
        assert!(
            (&x - &oracle).norm() <= 1e-8 * oracle.norm().max(1.0),
            "trial {trial}: {m}x{n} rank {rank}"
        );
        assert!((ls.residual_norm - (&a * &oracle - &b).norm()).abs() < 1e-10);
        assert_eq!(ls.rank, rank, "trial {trial}");
    }
}

#[test]
fn map_residual_matches_explicit_product() {
    let mut rng = rng(2);
    for _ in 0..5 {
        let a_k = random_dominant(&mut rng, 40, 4);
        let a_ref = random_sparse(&mut rng, 40, 4);
        let s = random_pattern(&mut rng, 40, 4)
            .union(&SparsityPattern::diagonal(40))
            .unwrap();
        for include in [false, true] {
            let plan = SamPlan::new(&s, &a_k, include).unwrap();
            let m = compute_map(&a_k, &a_ref, &plan).unwrap();
            let explicit =
                (dense(&a_k) * dense(&m.map) - dense(&a_ref)).norm() / dense(&a_ref).norm();
            assert!((m.rel_residual.unwrap() - explicit).abs() < 1e-12);
            let sparse_check = map_residual_norm(&a_k, &m.map, &a_ref).unwrap();
            assert!((sparse_check - explicit).abs() < 1e-12);
        }
    }
}

#[test]
fn complex_map_matches_oracle() {
    let (k, mm) = fem_pair_2d(6, 6, &|x, y| 1.0 + x * y).unwrap();
    let z = talbot_shifts(8, 1.0, TalbotConstants::default()).unwrap();
    let sys = |z: Complex64| {
        samkit::sparse::shifted_combine(z, &mm.to_complex(), &k.to_complex()).unwrap()
    };
    let (a0, a3) = (sys(z[0]), sys(z[3]));
    let s = pattern_of(&a0);
    let plan = SamPlan::new(&s, &a3, true).unwrap();
    let n = compute_map(&a3, &a0, &plan).unwrap();
    let (d3, d0, dn) = (dense_c(&a3), dense_c(&a0), dense_c(&n.map));
    for l in 0..a0.ncols() {
        let cols = s.col(l);
        let sub = DMatrix::from_fn(d3.nrows(), cols.len(), |i, j| d3[(i, cols[j])]);
        let target = d0.column(l).into_owned();
        // complex LS through the normal equations; the blocks are well conditioned
        let x = (sub.adjoint() * &sub)
            .lu()
            .solve(&(sub.adjoint() * &target))
            .unwrap();
        for (p, &i) in cols.iter().enumerate() {
            assert!((dn[(i, l)] - x[p]).norm() < 1e-10 * x.norm());
        }
    }
}

#[test]
fn ilutp_solve_matches_dense_solve_when_exact() {
    let mut rng = rng(3);
    for _ in 0..10 {
        let a = random_sparse(&mut rng, 25, 6);
        let a = samkit::sparse::shifted_combine(3.0, &SparseMatrix::identity(25), &a).unwrap();
        let f = factor(
            &a,
            IlutpParams {
                lfil: 25,
                droptol: 0.0,
                pivtol: 1.0,
            },
        )
        .unwrap();
        let b: Vec<f64> = (0..25).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = f.apply_solve(&b).unwrap();
        let oracle = dense(&a).lu().solve(&DVector::from_vec(b)).unwrap();
        assert!((DVector::from_vec(x) - &oracle).norm() <= 1e-11 * oracle.norm());
    }
}

#[test]
fn ilutp_handles_zero_diagonal_by_pivoting() {
    // [[0 1], [1 0]] needs a column swap
    let a = SparseMatrix::from_raw_parts(2, 2, vec![0, 1, 2], vec![1, 0], vec![1.0, 1.0]).unwrap();
    let f = factor(&a, IlutpParams::default()).unwrap();
    assert_eq!(f.colperm(), &[1, 0]);
    assert_eq!(f.apply_solve(&[2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
    let no_pivot = IlutpParams {
        pivtol: 0.0,
        ..IlutpParams::default()
    };
    assert!(matches!(
        factor(&a, no_pivot),
        Err(samkit::Error::ZeroPivot { row: 0, .. })
    ));
}

#[test]
fn laplacian_is_spd_with_known_spectrum() {
    for n in [3usize, 6, 10] {
        let (k, _) = laplace2d_dirichlet(n, n);
        let d = dense(&k);
        assert_eq!(d, d.transpose());
        let lo = min_eigenvalue(&d);
        let expected = 8.0 * (PI / (2.0 * (n as f64 + 1.0))).sin().powi(2);
        assert!((lo - expected).abs() < 1e-12, "n={n}: {lo} vs {expected}");
    }
}

#[test]
fn helmholtz_turns_indefinite_at_twentieth_shift() {
    let (k0, _) = laplace2d_dirichlet(10, 10);
    let seq = helmholtz_sequence(&k0, 0.01, 20).unwrap();
    let lo = |m: &SparseMatrix<f64>| min_eigenvalue(&dense(m));
    assert!((lo(&k0) - 8.0 * (PI / 22.0).sin().powi(2)).abs() < 1e-12);
    assert!(lo(&seq[15]) > 0.0, "K16 should still be definite");
    assert!(lo(&seq[19]) < 0.0, "K20 should be indefinite");
}

#[test]
fn fem_pair_shifted_systems_are_nonsingular() {
    let kappa = KappaField::RandomLog {
        seed: 9,
        contrast: 1.0,
    }
    .sampler();
    let (k, m) = fem_pair_2d(8, 8, &*kappa).unwrap();
    let (dk, dm) = (dense(&k), dense(&m));
    assert_eq!(dk, dk.transpose());
    assert!(dm.diagonal().iter().all(|&v| v > 0.0));
    assert_eq!(
        dm.clone() - DMatrix::from_diagonal(&dm.diagonal()),
        DMatrix::zeros(64, 64)
    );
    for z in talbot_shifts(16, 1.0, TalbotConstants::default()).unwrap() {
        assert!(z.im != 0.0);
        let a = dk.map(|v| Complex64::new(v, 0.0)) + dm.map(|v| z * v);
        let b = DVector::from_element(64, Complex64::new(1.0, 0.0));
        let x = a
            .clone()
            .lu()
            .solve(&b)
            .expect("K + zM must be nonsingular");
        assert!((&a * &x - &b).norm() < 1e-10 * b.norm());
    }
}

#[test]
fn gmres_matches_dense_solve_with_ilutp_and_map() {
    let mut rng = rng(4);
    let a0 = random_dominant(&mut rng, 40, 5);
    let a1 = samkit::sparse::shifted_combine(0.3, &SparseMatrix::identity(40), &a0).unwrap();
    let b: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
    let f = Arc::new(
        factor(
            &a0,
            IlutpParams {
                lfil: 3,
                droptol: 1e-2,
                pivtol: 1.0,
            },
        )
        .unwrap(),
    );
    let plan = SamPlan::new(&pattern_of(&a0), &a1, false).unwrap();
    let n = compute_map(&a1, &a0, &plan).unwrap();
    let prec = compose(Arc::new(n.map), PreconditionerChain::from_factors(f)).unwrap();
    let (x, rep) = gmres(&a1, &b, &prec, None, &GmresConfig::full(80, 1e-12)).unwrap();
    assert!(rep.converged);
    let oracle = dense(&a1).lu().solve(&DVector::from_vec(b)).unwrap();
    assert!((DVector::from_vec(x) - &oracle).norm() <= 1e-9 * oracle.norm());
}

#[test]
fn complex_gmres_matches_dense_solve() {
    let (k, m) = fem_pair_2d(7, 7, &|_, _| 1.0).unwrap();
    let z = Complex64::new(-3.0, 5.0);
    let a = samkit::sparse::shifted_combine(z, &m.to_complex(), &k.to_complex()).unwrap();
    let b: Vec<Complex64> = (0..49)
        .map(|i| Complex64::new(1.0, i as f64 / 49.0))
        .collect();
    let (x, rep) = gmres(&a, &b, &Identity(49), None, &GmresConfig::full(49, 1e-12)).unwrap();
    assert!(rep.converged);
    let oracle = dense_c(&a).lu().solve(&DVector::from_vec(b)).unwrap();
    assert!((DVector::from_vec(x) - &oracle).norm() <= 1e-9 * oracle.norm());
}
