mod common;

use common::*;
use gtp_core::basis::{conversion_table, sh_to_fourier, FourierCoeffs2D};
use gtp_core::fft::conv2d_fft;
use gtp_core::oracle::{conv2d_direct, gaunt_tp_reference};
use gtp_core::so3::{gaunt_coefficient, wigner_d_blocks};
use gtp_core::tp::*;
use gtp_core::{DegreeWeights, Error, FeatureBatch, IrrepsVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn random_grid(g: &mut rand_chacha::ChaCha8Rng, l: usize) -> FourierCoeffs2D {
    let side = 2 * l + 1;
    let data = (0..side * side).map(|_| Complex64::new(g.sample(StandardNormal), g.sample(StandardNormal))).collect();
    FourierCoeffs2D::from_vec(l, data).unwrap()
}

#[test]
fn conv_matches_direct_sum() {
    let mut g = rng(31);
    for l in [0usize, 1, 3, 5] {
        let (a, b) = (random_grid(&mut g, l), random_grid(&mut g, l));
        let fast = conv2d_fft(&a, &b).unwrap();
        let slow = conv2d_direct(&a, &b);
        assert_eq!(fast.lmax(), 2 * l);
        assert!(fast.max_abs_diff(&slow) < 1e-11, "L={l}: {}", fast.max_abs_diff(&slow));
    }
}

#[test]
fn conv_impulse_and_symmetry() {
    let mut g = rng(32);
    let b = random_grid(&mut g, 3);
    let c = conv2d_fft(&FourierCoeffs2D::impulse(3, 0, 0), &b).unwrap();
    assert!(c.max_abs_diff(&b.resized(6)) < 1e-14);

    let t = conversion_table(4).unwrap();
    let fa = sh_to_fourier(&random_vector(&mut g, 4), &t).unwrap();
    let fb = sh_to_fourier(&random_vector(&mut g, 4), &t).unwrap();
    assert!(conv2d_fft(&fa, &fb).unwrap().hermitian_residual() < 1e-13);
}

#[test]
fn oracle_equivalence() {
    let mut g = rng(33);
    for l in 1..=8usize {
        for _ in 0..20 {
            let (x, y) = (random_vector(&mut g, l), random_vector(&mut g, l));
            let fast = gaunt_full_tp(&x, &y, 2 * l).unwrap();
            let slow = gaunt_tp_reference(&x, &y, 2 * l, None);
            assert!(fast.rel_err(&slow) < 1e-9, "L={l}: {}", fast.rel_err(&slow));
        }
    }
}

#[test]
fn mixed_degrees_and_truncation() {
    let mut g = rng(34);
    for (l1, l2, lo) in [(0usize, 3usize, 3usize), (2, 5, 4), (4, 1, 5), (6, 6, 2)] {
        let (x, y) = (random_vector(&mut g, l1), random_vector(&mut g, l2));
        let fast = gaunt_full_tp(&x, &y, lo).unwrap();
        let slow = gaunt_tp_reference(&x, &y, lo, None);
        assert!(fast.rel_err(&slow) < 1e-9);
    }
}

#[test]
fn degree_zero_example() {
    let x = IrrepsVector::from_vec(0, vec![0.7]).unwrap();
    let y = IrrepsVector::from_vec(0, vec![-1.3]).unwrap();
    let out = gaunt_full_tp(&x, &y, 0).unwrap();
    assert!((out.get(0, 0) - gaunt_coefficient(0, 0, 0, 0, 0, 0) * 0.7 * -1.3).abs() < 1e-15);
    assert_eq!(
        gaunt_full_tp(&IrrepsVector::zeros(3), &random_vector(&mut rng(1), 3), 6).unwrap(),
        IrrepsVector::zeros(6)
    );
}

#[test]
fn rotation_equivariance() {
    let mut g = rng(35);
    for l in [1usize, 3, 6] {
        for _ in 0..10 {
            let rot = random_rotation(&mut g);
            let d = wigner_d_blocks(2 * l, &rot);
            let (x, y) = (random_vector(&mut g, l), random_vector(&mut g, l));
            let lhs = gaunt_full_tp(&d.apply(&x).unwrap(), &d.apply(&y).unwrap(), 2 * l).unwrap();
            let rhs = d.apply(&gaunt_full_tp(&x, &y, 2 * l).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-8);
        }
    }
}

#[test]
fn reflection_parity() {
    let mut g = rng(36);
    for _ in 0..10 {
        let (x, y) = (random_vector(&mut g, 5), random_vector(&mut g, 5));
        let lhs = gaunt_full_tp(&x.parity_flipped(), &y.parity_flipped(), 10).unwrap();
        let rhs = gaunt_full_tp(&x, &y, 10).unwrap().parity_flipped();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }
}

#[test]
fn selection_rule_blocks_are_exact_zeros() {
    let mut g = rng(37);
    for l1 in 0..=6usize {
        for l2 in 0..=6usize {
            let mut b1 = vec![0.0; 2 * l1 + 1];
            let mut b2 = vec![0.0; 2 * l2 + 1];
            b1.iter_mut().for_each(|v| *v = g.sample(StandardNormal));
            b2.iter_mut().for_each(|v| *v = g.sample(StandardNormal));
            let x = IrrepsVector::from_block(l1, &b1).unwrap();
            let y = IrrepsVector::from_block(l2, &b2).unwrap();
            let out = gaunt_full_tp(&x, &y, l1 + l2).unwrap();
            for l in 0..=l1 + l2 {
                let forbidden = (l1 + l2 + l) % 2 == 1 || l < l1.abs_diff(l2);
                if forbidden {
                    assert!(out.block_is_zero(l), "({l1}, {l2}) -> {l}");
                }
            }
        }
    }
}

#[test]
fn weighted_product() {
    let mut g = rng(38);
    let (x, y) = (random_vector(&mut g, 4), random_vector(&mut g, 3));
    let (wx, wy, wo) = (random_weights(&mut g, 4), random_weights(&mut g, 3), random_weights(&mut g, 6));
    let fast = gaunt_weighted_tp(&x, &y, &wx, &wy, &wo, 6).unwrap();
    let slow = gaunt_tp_reference(&x, &y, 6, Some((&wx, &wy, &wo)));
    assert!(fast.rel_err(&slow) < 1e-9);

    let ones = gaunt_weighted_tp(&x, &y, &DegreeWeights::ones(4), &DegreeWeights::ones(3), &DegreeWeights::ones(6), 6);
    assert_eq!(ones.unwrap(), gaunt_full_tp(&x, &y, 6).unwrap());

    let mut w = vec![1.0; 7];
    w[2] = 0.0;
    let out = gaunt_weighted_tp(&x, &y, &wx, &wy, &DegreeWeights::new(w).unwrap(), 6).unwrap();
    assert!(out.block_is_zero(2));

    let bad = gaunt_weighted_tp(&x, &y, &wy, &wy, &wo, 6);
    assert!(matches!(bad, Err(Error::Domain(_))));
}

#[test]
fn single_pair_products() {
    let mut g = rng(39);
    let mut block = |l: usize| (0..2 * l + 1).map(|_| g.sample(StandardNormal)).collect::<Vec<f64>>();
    let (x0, y2) = (block(0), block(2));
    let out = gaunt_single_tp(&x0, &y2, 2).unwrap();
    for (k, m) in (-2i64..=2).enumerate() {
        let expect = x0[0] * y2[k] * gaunt_coefficient(0, 0, 2, m, 2, m);
        assert!((out[k] - expect).abs() < 1e-12);
    }
    assert_eq!(gaunt_single_tp(&block(2), &block(3), 2).unwrap(), vec![0.0; 5]);

    let (a, b) = (block(2), block(3));
    let out = gaunt_single_tp(&a, &b, 3).unwrap();
    for (k, m) in (-3i64..=3).enumerate() {
        let mut s = 0.0;
        for (i, m1) in (-2i64..=2).enumerate() {
            for (j, m2) in (-3i64..=3).enumerate() {
                s += gaunt_coefficient(2, m1, 3, m2, 3, m) * a[i] * b[j];
            }
        }
        assert!((out[k] - s).abs() < 1e-10);
    }
}

#[test]
fn batched_products() {
    let mut g = rng(40);
    let (bn, cn, l) = (2usize, 3usize, 3usize);
    let n = bn * cn * (l + 1) * (l + 1);
    let mut data = || (0..n).map(|_| g.sample(StandardNormal)).collect::<Vec<f64>>();
    let xs = FeatureBatch::from_vec(bn, cn, l, data()).unwrap();
    let ys = FeatureBatch::from_vec(bn, cn, l, data()).unwrap();
    let mut g2 = rng(41);
    let (wx, wy, wo) = (random_weights(&mut g2, l), random_weights(&mut g2, l), random_weights(&mut g2, 2 * l));

    let cw = gaunt_tp_batch(&xs, &ys, &ChannelMode::ChannelWise, &wx, &wy, &wo, 2 * l).unwrap();
    for b in 0..bn {
        for c in 0..cn {
            let expect = gaunt_weighted_tp(&xs.feature(b, c), &ys.feature(b, c), &wx, &wy, &wo, 2 * l).unwrap();
            assert!(cw.feature(b, c).max_abs_diff(&expect) < 1e-10);
        }
    }

    let diag = ChannelMode::ChannelMixing(MixingWeights::diagonal(cn));
    assert_eq!(gaunt_tp_batch(&xs, &ys, &diag, &wx, &wy, &wo, 2 * l).unwrap(), cw);

    let mw: Vec<f64> = (0..cn * cn * cn).map(|_| g2.sample(StandardNormal)).collect();
    let mix = MixingWeights::new(cn, mw).unwrap();
    let out = gaunt_tp_batch(&xs, &ys, &ChannelMode::ChannelMixing(mix.clone()), &wx, &wy, &wo, 2 * l).unwrap();
    for b in 0..bn {
        for c in 0..cn {
            let mut expect = IrrepsVector::zeros(2 * l);
            for c1 in 0..cn {
                for c2 in 0..cn {
                    let p = gaunt_weighted_tp(&xs.feature(b, c1), &ys.feature(b, c2), &wx, &wy, &wo, 2 * l).unwrap();
                    expect = expect.axpy(mix.get(c, c1, c2), &p).unwrap();
                }
            }
            assert!(out.feature(b, c).max_abs_diff(&expect) < 1e-10);
        }
    }

    let par = gaunt_tp_batch_parallel(&xs, &ys, &ChannelMode::ChannelMixing(mix), &wx, &wy, &wo, 2 * l).unwrap();
    assert_eq!(par, out);

    let single = FeatureBatch::from_vec(1, 1, l, xs.feature(0, 0).into_vec()).unwrap();
    let single_y = FeatureBatch::from_vec(1, 1, l, ys.feature(0, 0).into_vec()).unwrap();
    let a = gaunt_tp_batch(&single, &single_y, &ChannelMode::ChannelWise, &wx, &wy, &wo, 2 * l).unwrap();
    let m = ChannelMode::ChannelMixing(MixingWeights::new(1, vec![1.0]).unwrap());
    let b = gaunt_tp_batch(&single, &single_y, &m, &wx, &wy, &wo, 2 * l).unwrap();
    assert_eq!(a, b);

    let short = FeatureBatch::zeros(1, cn, l);
    assert!(gaunt_tp_batch(&xs, &short, &ChannelMode::ChannelWise, &wx, &wy, &wo, 2 * l).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bilinear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0, l in 0usize..6) {
        let mut g = rng(seed);
        let (x1, x2, y) = (random_vector(&mut g, l), random_vector(&mut g, l), random_vector(&mut g, l));
        let lhs = gaunt_full_tp(&x1.scaled(a).axpy(b, &x2).unwrap(), &y, 2 * l).unwrap();
        let rhs = gaunt_full_tp(&x1, &y, 2 * l).unwrap().scaled(a)
            .axpy(b, &gaunt_full_tp(&x2, &y, 2 * l).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * (1.0 + rhs.max_abs()));
        let lhs = gaunt_full_tp(&y, &x1.scaled(a).axpy(b, &x2).unwrap(), 2 * l).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn symmetric(seed in any::<u64>(), l1 in 0usize..6, l2 in 0usize..6) {
        let mut g = rng(seed);
        let (x, y) = (random_vector(&mut g, l1), random_vector(&mut g, l2));
        let a = gaunt_full_tp(&x, &y, l1 + l2).unwrap();
        let b = gaunt_full_tp(&y, &x, l1 + l2).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12 * (1.0 + a.max_abs()));
    }

    #[test]
    fn output_weights_scale_blocks(seed in any::<u64>(), s in -4.0f64..4.0) {
        let mut g = rng(seed);
        let (x, y) = (random_vector(&mut g, 3), random_vector(&mut g, 3));
        let ones = DegreeWeights::ones(3);
        let mut w = vec![1.0; 7];
        w[4] = s;
        let base = gaunt_weighted_tp(&x, &y, &ones, &ones, &DegreeWeights::ones(6), 6).unwrap();
        let out = gaunt_weighted_tp(&x, &y, &ones, &ones, &DegreeWeights::new(w).unwrap(), 6).unwrap();
        for (a, b) in out.block(4).iter().zip(base.block(4)) {
            prop_assert!((a - s * b).abs() < 1e-14 * (1.0 + b.abs()));
        }
        prop_assert_eq!(out.block(3), base.block(3));
    }
}
