//! Property tests for the module invariants.

mod common;

use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use samkit::harness::{
    parse_report_csv, render_report, run_sequence, Action, PrecEvent, ReportFormat, RunOptions,
    Strategy,
};
use samkit::ilutp::{factor, IlutpParams};
use samkit::krylov::{gmres, GmresConfig};
use samkit::pattern::{
    offset_pattern, pattern_of, sparsified_power, symbolic_power, SparsityPattern, Threshold,
};
use samkit::problems::{laplace2d_dirichlet, parse_matrix_market, to_matrix_market, SequenceSpec};
use samkit::sam::{compose, compute_map, compute_map_with, PreconditionerChain, SamPlan, Workers};
use samkit::sparse::{SparseMatrix, TripletBuffer};

use common::*;

fn vec_in(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triplet_round_trip(seed: u64, n in 1usize..30, per_col in 0usize..6) {
        let a = random_sparse(&mut rng(seed), n, per_col);
        prop_assert_eq!(SparseMatrix::from_triplets(&a.to_triplets()).unwrap(), a);
    }

    #[test]
    fn duplicates_are_summed(seed: u64, n in 1usize..12, count in 0usize..60) {
        let mut r = rng(seed);
        let mut t = TripletBuffer::new(n, n);
        let mut oracle = DMatrix::<f64>::zeros(n, n);
        for _ in 0..count {
            let (i, j, v) = (r.random_range(0..n), r.random_range(0..n), r.random_range(-1.0..1.0));
            t.push(i, j, v);
            oracle[(i, j)] += v;
        }
        let a = SparseMatrix::from_triplets(&t).unwrap();
        prop_assert!((dense(&a) - oracle).norm() < 1e-14);
        for j in 0..n {
            prop_assert!(a.col_rows(j).windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn matvec_distributes(seed: u64, n in 1usize..40) {
        let mut r = rng(seed);
        let a = random_sparse(&mut r, n, 5);
        let (x, y) = (vec_in(&mut r, n), vec_in(&mut r, n));
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let lhs = a.matvec(&xy).unwrap();
        let rhs: Vec<f64> = a.matvec(&x).unwrap().iter().zip(a.matvec(&y).unwrap()).map(|(p, q)| p + q).collect();
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-13);
    }

    #[test]
    fn spmm_associates_with_matvec(seed: u64, per_col in 1usize..8) {
        let mut r = rng(seed);
        let (a, b) = (random_sparse(&mut r, 20, per_col), random_sparse(&mut r, 20, per_col));
        let x = vec_in(&mut r, 20);
        let lhs = a.spmm(&b).unwrap().matvec(&x).unwrap();
        let rhs = a.matvec(&b.matvec(&x).unwrap()).unwrap();
        let scale = samkit::scalar::norm2(&rhs).max(1.0);
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-12 * scale);
    }

    #[test]
    fn full_extraction_is_dense_conversion(seed: u64, n in 1usize..25) {
        let a = random_sparse(&mut rng(seed), n, 4);
        let all: Vec<usize> = (0..n).collect();
        let block = a.extract_dense_submatrix(&all, &all).unwrap();
        prop_assert_eq!(block, a.to_dense());
        let d = dense(&a);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(a.to_dense().get(i, j), d[(i, j)]);
            }
        }
    }

    #[test]
    fn symbolic_power_matches_dense_power(seed: u64, n in 1usize..30, per_col in 1usize..4, p in 1usize..5) {
        let s = random_pattern(&mut rng(seed), n, per_col);
        let ones = DMatrix::from_fn(n, n, |i, j| if s.contains(i, j) { 1.0 } else { 0.0 });
        let mut power = ones.clone();
        for _ in 1..p {
            power = &ones * &power;
        }
        let got = symbolic_power(&s, p).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(got.contains(i, j), power[(i, j)] > 0.0, "({}, {})", i, j);
            }
        }
        if p == 2 {
            prop_assert_eq!(got, s.product(&s).unwrap());
        }
    }

    #[test]
    fn sparsified_power_is_nested(seed: u64, n in 2usize..30, p in 1usize..4, t1 in 0.0f64..0.5, dt in 0.0f64..0.5, absolute: bool) {
        let a = random_sparse(&mut rng(seed), n, 3);
        let mode = if absolute { Threshold::Absolute } else { Threshold::Relative };
        let full = symbolic_power(&pattern_of(&a), p).unwrap();
        let loose = sparsified_power(&a, p, t1, mode).unwrap();
        let tight = sparsified_power(&a, p, t1 + dt, mode).unwrap();
        prop_assert!(loose.is_subset(&full).unwrap());
        prop_assert!(tight.is_subset(&loose).unwrap());
    }

    #[test]
    fn offset_pattern_interior_counts(n in 1usize..60, offsets in proptest::collection::vec(-5isize..=5, 0..6)) {
        let p = offset_pattern(n, &offsets);
        let mut distinct = offsets.clone();
        distinct.sort_unstable();
        distinct.dedup();
        for j in 5..n.saturating_sub(5) {
            prop_assert_eq!(p.col(j).len(), distinct.len());
        }
        for j in 0..n {
            prop_assert!(p.col(j).len() <= distinct.len());
        }
    }

    #[test]
    fn pattern_text_round_trip(seed: u64, n in 1usize..20) {
        let s = random_pattern(&mut rng(seed), n, 3);
        prop_assert_eq!(SparsityPattern::parse(&s.to_text(), Path::new("mem")).unwrap(), s);
    }

    #[test]
    fn map_stays_in_pattern_and_is_optimal(seed: u64, n in 2usize..30, include: bool) {
        let mut r = rng(seed);
        let a_k = random_sparse(&mut r, n, 4);
        let a_ref = random_sparse(&mut r, n, 4);
        let s = random_pattern(&mut r, n, 3);
        let plan = SamPlan::new(&s, &a_k, include).unwrap();
        let m = compute_map(&a_k, &a_ref, &plan).unwrap();
        prop_assert!(pattern_of(&m.map).is_subset(&s).unwrap());
        let (dk, dref) = (dense(&a_k), dense(&a_ref));
        for l in 0..n {
            let (cols, rows) = (plan.s(l), plan.r(l));
            if cols.is_empty() || rows.is_empty() {
                continue;
            }
            let local = DMatrix::from_fn(rows.len(), cols.len(), |i, j| dk[(rows[i], cols[j])]);
            let rhs = nalgebra::DVector::from_iterator(rows.len(), rows.iter().map(|&i| dref[(i, l)]));
            let x = nalgebra::DVector::from_iterator(cols.len(), cols.iter().map(|&i| m.map.get(i, l)));
            let defect = (local.transpose() * (&local * &x - &rhs)).norm();
            prop_assert!(defect <= 1e-10 * local.norm() * rhs.norm() + 1e-300);
        }
    }

    #[test]
    fn columns_decouple(seed: u64, n in 2usize..25, pick in 0usize..25) {
        let mut r = rng(seed);
        let a_k = random_sparse(&mut r, n, 4);
        let a_ref = random_sparse(&mut r, n, 4);
        let s = random_pattern(&mut r, n, 4);
        let l = pick % n;
        let single = SparsityPattern::from_entries(n, n, s.col(l).iter().map(|&i| (i, l))).unwrap();
        let all = compute_map(&a_k, &a_ref, &SamPlan::new(&s, &a_k, true).unwrap()).unwrap();
        let one = compute_map(&a_k, &a_ref, &SamPlan::new(&single, &a_k, true).unwrap()).unwrap();
        let bits = |m: &SparseMatrix<f64>| m.col_values(l).iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(all.map.col_rows(l), one.map.col_rows(l));
        prop_assert_eq!(bits(&all.map), bits(&one.map));
        prop_assert_eq!(all.column_residuals[l].to_bits(), one.column_residuals[l].to_bits());
    }

    #[test]
    fn larger_patterns_never_raise_the_residual(seed: u64, n in 2usize..30) {
        let mut r = rng(seed);
        let a_k = random_sparse(&mut r, n, 4);
        let a_ref = random_dominant(&mut r, n, 3);
        let s1 = random_pattern(&mut r, n, 2);
        let s2 = s1.union(&random_pattern(&mut r, n, 3)).unwrap();
        let res = |s: &SparsityPattern| {
            compute_map(&a_k, &a_ref, &SamPlan::new(s, &a_k, true).unwrap()).unwrap().rel_residual.unwrap()
        };
        prop_assert!(res(&s2) <= res(&s1) + 1e-12);
    }

    #[test]
    fn worker_count_does_not_change_the_map(seed: u64, n in 2usize..40, workers in 2usize..6) {
        let mut r = rng(seed);
        let a_k = random_sparse(&mut r, n, 4);
        let a_ref = random_sparse(&mut r, n, 4);
        let plan = SamPlan::new(&random_pattern(&mut r, n, 4), &a_k, true).unwrap();
        let one = compute_map_with(&a_k, &a_ref, &plan, Workers::Sequential).unwrap();
        let many = compute_map_with(&a_k, &a_ref, &plan, Workers::Fixed(workers)).unwrap();
        let bits = |m: &SparseMatrix<f64>| m.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(&one.map.colptr(), &many.map.colptr());
        prop_assert_eq!(bits(&one.map), bits(&many.map));
    }

    #[test]
    fn ilutp_fill_bound(seed: u64, n in 1usize..40, lfil in 0usize..8, droptol in 0.0f64..0.1) {
        let a = random_dominant(&mut rng(seed), n, 6);
        let f = factor(&a, IlutpParams { lfil, droptol, pivtol: 1.0 }).unwrap();
        let (lr, ur) = (f.l().transpose(), f.u().transpose());
        for i in 0..n {
            prop_assert!(lr.col_rows(i).iter().filter(|&&j| j != i).count() <= lfil);
            prop_assert!(ur.col_rows(i).len() <= lfil + 1);
        }
        prop_assert_eq!(f.fill(), f.l().nnz() - n + f.u().nnz());
    }

    #[test]
    fn ilutp_solve_is_linear(seed: u64, n in 1usize..40, alpha in -2.0f64..2.0) {
        let mut r = rng(seed);
        let a = random_dominant(&mut r, n, 5);
        let f = factor(&a, IlutpParams { lfil: 4, droptol: 1e-2, pivtol: 1.0 }).unwrap();
        let (v, w) = (vec_in(&mut r, n), vec_in(&mut r, n));
        let combo: Vec<f64> = v.iter().zip(&w).map(|(x, y)| alpha * x + y).collect();
        let lhs = f.apply_solve(&combo).unwrap();
        let (sv, sw) = (f.apply_solve(&v).unwrap(), f.apply_solve(&w).unwrap());
        let rhs: Vec<f64> = sv.iter().zip(&sw).map(|(x, y)| alpha * x + y).collect();
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-12 * samkit::scalar::norm2(&rhs).max(1.0));
    }

    #[test]
    fn gmres_residual_decreases_within_cycles(seed: u64, n in 2usize..50, restart in 1usize..12) {
        let mut r = rng(seed);
        let a = random_dominant(&mut r, n, 4);
        let b = vec_in(&mut r, n);
        let cfg = GmresConfig { restart, rel_tol: 1e-10, max_total_iters: 200, reorthogonalize: false };
        let (_, rep) = gmres(&a, &b, &samkit::Identity(n), None, &cfg).unwrap();
        for cycle in rep.residual_history.chunks(restart) {
            for w in cycle.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-14), "{} after {}", w[1], w[0]);
            }
        }
        let bn = samkit::scalar::norm2(&b);
        for c in &rep.cycle_checks {
            prop_assert!((c.recurrence - c.explicit).abs() <= 1e-8 * bn);
        }
    }

    #[test]
    fn identity_map_does_not_change_gmres(seed: u64, n in 2usize..40) {
        let mut r = rng(seed);
        let a = random_dominant(&mut r, n, 4);
        let b = vec_in(&mut r, n);
        let f = Arc::new(factor(&a, IlutpParams { lfil: 1, droptol: 0.05, pivtol: 1.0 }).unwrap());
        let p = PreconditionerChain::from_factors(f);
        let ip = compose(Arc::new(SparseMatrix::identity(n)), p.clone()).unwrap();
        let cfg = GmresConfig::full(100, 1e-10);
        let (_, r1) = gmres(&a, &b, &p, None, &cfg).unwrap();
        let (_, r2) = gmres(&a, &b, &ip, None, &cfg).unwrap();
        prop_assert_eq!(r1.iterations, r2.iterations);
    }

    #[test]
    fn matrix_market_round_trip(seed: u64, n in 1usize..20, complex: bool) {
        let a = random_sparse(&mut rng(seed), n, 4);
        if complex {
            let c = a.map_values(|v| Complex64::new(v, -v / 3.0));
            let back: SparseMatrix<Complex64> = parse_matrix_market(&to_matrix_market(&c), Path::new("mem")).unwrap();
            prop_assert_eq!(back, c);
        } else {
            let back: SparseMatrix<f64> = parse_matrix_market(&to_matrix_market(&a), Path::new("mem")).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}

fn small_sequence(seed: u64, len: usize) -> SequenceSpec {
    let mut r = rng(seed);
    let (k, b) = laplace2d_dirichlet(6, 6);
    let jitter = random_sparse(&mut r, 36, 1);
    let mats: Vec<SparseMatrix<f64>> = (0..len)
        .map(|i| {
            samkit::sparse::shifted_combine(-0.02 * i as f64, &SparseMatrix::identity(36), &k)
                .unwrap()
        })
        .map(|m| samkit::sparse::shifted_combine(0.01, &jitter, &m).unwrap())
        .collect();
    SequenceSpec::from_matrices(&mats, &b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_deterministic(seed: u64, len in 1usize..8) {
        let spec = small_sequence(seed, len);
        let opts = RunOptions { gmres: GmresConfig::full(100, 1e-10), ..RunOptions::default() };
        let a = run_sequence(&spec, &Strategy::SamEvery, &opts).unwrap();
        let b = run_sequence(&spec, &Strategy::SamEvery, &opts).unwrap();
        prop_assert_eq!(a.iterations(), b.iterations());
        let res = |r: &samkit::harness::SequenceReport| r.rows.iter().map(|x| x.sam_rel_residual.map(f64::to_bits)).collect::<Vec<_>>();
        prop_assert_eq!(res(&a), res(&b));
    }

    #[test]
    fn events_schedule_invariants(seed: u64, len in 1usize..10, picks in proptest::collection::vec((1usize..10, 0u8..3), 0..5)) {
        let spec = small_sequence(seed, len);
        let mut list = vec![(0, Action::RecomputePrec)];
        let mut picks = picks;
        picks.sort_by_key(|p| p.0);
        picks.dedup_by_key(|p| p.0);
        for (i, a) in picks {
            list.push((i, [Action::RecomputePrec, Action::ComputeSam, Action::Reuse][a as usize]));
        }
        let opts = RunOptions { gmres: GmresConfig::full(100, 1e-10), ..RunOptions::default() };
        let rep = run_sequence(&spec, &Strategy::events(list).unwrap(), &opts).unwrap();
        prop_assert_eq!(rep.rows[0].prec_event, PrecEvent::Recompute);
        for row in &rep.rows {
            if row.prec_event == PrecEvent::Sam {
                let v = row.sam_rel_residual.unwrap();
                prop_assert!(v.is_finite() && v >= 0.0);
            }
        }
        let reparsed = parse_report_csv(&render_report(&rep, ReportFormat::Csv)).unwrap();
        prop_assert_eq!(reparsed.iterations(), rep.iterations());

        let only_first = Strategy::events(vec![(0, Action::RecomputePrec)]).unwrap();
        let ev = run_sequence(&spec, &only_first, &opts).unwrap();
        let rf = run_sequence(&spec, &Strategy::ReuseFirst, &opts).unwrap();
        prop_assert_eq!(ev.iterations(), rf.iterations());
    }
}
