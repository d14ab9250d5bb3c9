mod common;

use common::*;
use gtp_core::many_body::*;
use gtp_core::oracle::many_body_reference;
use gtp_core::so3::{eval_sh_vector, wigner_d_blocks};
use gtp_core::tp::{gaunt_full_tp, gaunt_weighted_tp};
use gtp_core::{DegreeWeights, Error, IrrepsVector};
use proptest::prelude::*;

fn left_fold(ops: &[IrrepsVector], l_out: usize) -> MultiTpOutput {
    multi_tp_with(ops, l_out, MultiTpOptions { schedule: Schedule::LeftFold, fused: false }).unwrap()
}

fn balanced(ops: &[IrrepsVector], l_out: usize) -> MultiTpOutput {
    multi_tp_with(ops, l_out, MultiTpOptions::default()).unwrap()
}

#[test]
fn matches_sequential_reference() {
    let mut g = rng(61);
    for n in 2..=4usize {
        for _ in 0..5 {
            let ops: Vec<_> = (0..n).map(|_| random_vector(&mut g, 2)).collect();
            let fast = multi_tp(&ops, 2 * n).unwrap();
            let slow = many_body_reference(&ops, 2 * n);
            assert!(fast.rel_err(&slow) < 1e-9, "n={n}: {}", fast.rel_err(&slow));
        }
    }
}

#[test]
fn mixed_degree_operands() {
    let mut g = rng(62);
    let ops = vec![random_vector(&mut g, 1), random_vector(&mut g, 3), random_vector(&mut g, 2)];
    for l_out in [0usize, 3, 6] {
        let fast = multi_tp(&ops, l_out).unwrap();
        assert!(fast.rel_err(&many_body_reference(&ops, l_out)) < 1e-9);
    }
}

#[test]
fn base_cases() {
    let mut g = rng(63);
    let (a, b) = (random_vector(&mut g, 3), random_vector(&mut g, 2));
    assert_eq!(multi_tp(std::slice::from_ref(&a), 2).unwrap(), a.resized(2));
    assert_eq!(multi_tp(&[a.clone(), b.clone()], 5).unwrap(), gaunt_full_tp(&a, &b, 5).unwrap());
    assert!(matches!(multi_tp(&[], 0), Err(Error::Domain(_))));
    assert!(multi_tp(&[a.clone(), b], 6).is_err());
    assert!(BodyOrder::new(0).is_err());
    assert!(BodyOrder::new(MAX_BODY_ORDER + 1).is_err());
    let one = self_product(&a, BodyOrder::new(1).unwrap(), &DegreeWeights::ones(3), 3).unwrap();
    assert_eq!(one, a);
}

#[test]
fn schedules_agree() {
    let mut g = rng(64);
    for n in 2..=8usize {
        for l in 1..=4usize {
            let ops: Vec<_> = (0..n).map(|_| random_vector(&mut g, l)).collect();
            let l_out = n * l;
            let a = balanced(&ops, l_out).value;
            let b = left_fold(&ops, l_out).value;
            let fused = multi_tp_with(&ops, l_out, MultiTpOptions { fused: true, ..Default::default() }).unwrap().value;
            assert!(a.rel_err(&b) < 1e-9, "n={n} L={l}: {}", a.rel_err(&b));
            assert!(fused.rel_err(&b) < 1e-9);
        }
    }
}

#[test]
fn tree_is_cheaper_than_fold() {
    let mut g = rng(65);
    let ops: Vec<_> = (0..8).map(|_| random_vector(&mut g, 4)).collect();
    let tree = balanced(&ops, 32).fft_work as f64;
    let fold = left_fold(&ops, 32).fft_work as f64;
    assert!(tree <= 0.75 * fold, "tree {tree} fold {fold}");
}

#[test]
fn equivariance() {
    let mut g = rng(66);
    for nu in 1..=4usize {
        for l in [1usize, 2, 4] {
            let rot = random_rotation(&mut g);
            let x = random_vector(&mut g, l);
            let w = random_weights(&mut g, l);
            let d = wigner_d_blocks(nu * l, &rot);
            let order = BodyOrder::new(nu).unwrap();
            let lhs = self_product(&wigner_d_blocks(l, &rot).apply(&x).unwrap(), order, &w, nu * l).unwrap();
            let rhs = d.apply(&self_product(&x, order, &w, nu * l).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-8 * (1.0 + rhs.max_abs()));
        }
    }
}

#[test]
fn pointwise_cube() {
    let mut g = rng(67);
    let x = eval_sh_vector(2, random_direction(&mut g)).unwrap();
    let cube = self_product(&x, BodyOrder::new(3).unwrap(), &DegreeWeights::ones(2), 6).unwrap();
    for _ in 0..100 {
        let s = random_direction(&mut g);
        let f = dot(&x, &eval_sh_vector(2, s).unwrap());
        let v = dot(&cube, &eval_sh_vector(6, s).unwrap());
        assert!((v - f * f * f).abs() < 1e-8, "{v} vs {}", f * f * f);
    }
}

#[test]
fn square_matches_weighted_product() {
    let mut g = rng(68);
    let x = random_vector(&mut g, 3);
    let w = random_weights(&mut g, 3);
    let sq = self_product(&x, BodyOrder::new(2).unwrap(), &w, 5).unwrap();
    let wp = gaunt_weighted_tp(&x, &x, &w, &w, &DegreeWeights::ones(5), 5).unwrap();
    assert!(sq.max_abs_diff(&wp) < 1e-11);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn homogeneous(seed in any::<u64>(), c in -2.0f64..2.0, nu in 1usize..5, l in 0usize..4) {
        let mut g = rng(seed);
        let x = random_vector(&mut g, l);
        let order = BodyOrder::new(nu).unwrap();
        let ones = DegreeWeights::ones(l);
        let base = self_product(&x, order, &ones, nu * l).unwrap();
        let scaled = self_product(&x.scaled(c), order, &ones, nu * l).unwrap();
        let expect = base.scaled(c.powi(nu as i32));
        prop_assert!(scaled.max_abs_diff(&expect) <= 1e-9 * expect.max_abs().max(1e-300));
    }
}
