#![allow(dead_code)]

use std::f64::consts::PI;

use gtp_core::so3::{EulerAnglesZYZ, UnitVector3};
use gtp_core::{DegreeWeights, IrrepsVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, lmax: usize) -> IrrepsVector {
    let n = (lmax + 1) * (lmax + 1);
    IrrepsVector::from_vec(lmax, (0..n).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

pub fn random_weights(rng: &mut ChaCha8Rng, lmax: usize) -> DegreeWeights {
    DegreeWeights::new((0..=lmax).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

/// Haar-distributed rotation.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> EulerAnglesZYZ {
    let alpha = rng.random::<f64>() * 2.0 * PI;
    let beta = (2.0 * rng.random::<f64>() - 1.0).acos();
    let gamma = rng.random::<f64>() * 2.0 * PI;
    EulerAnglesZYZ::new(alpha, beta, gamma).unwrap()
}

pub fn random_direction(rng: &mut ChaCha8Rng) -> UnitVector3 {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        if let Ok(u) = UnitVector3::normalize(v) {
            return u;
        }
    }
}

pub fn random_point(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)]
}

pub fn dot(a: &IrrepsVector, b: &IrrepsVector) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

pub fn fact(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Clebsch-Gordan coefficient from Racah's closed formula in plain floating
/// point (accurate for small degrees).
pub fn cg_racah(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m || j < (j1 - j2).abs() || j > j1 + j2 || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    let pre =
        ((2 * j + 1) as f64 * fact(j + j1 - j2) * fact(j - j1 + j2) * fact(j1 + j2 - j) / fact(j1 + j2 + j + 1)).sqrt();
    let pre2 = (fact(j + m) * fact(j - m) * fact(j1 - m1) * fact(j1 + m1) * fact(j2 - m2) * fact(j2 + m2)).sqrt();
    let mut s = 0.0;
    for k in 0..=(j1 + j2 + j) {
        let d = [k, j1 + j2 - j - k, j1 - m1 - k, j2 + m2 - k, j - j2 + m1 + k, j - j1 - m2 + k];
        if d.iter().any(|&x| x < 0) {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sign / d.iter().map(|&x| fact(x)).product::<f64>();
    }
    pre * pre2 * s
}

/// Wigner 3-j symbol from [`cg_racah`].
pub fn wigner_3j_racah(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    let sign = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign / ((2 * j3 + 1) as f64).sqrt() * cg_racah(j1, m1, j2, m2, j3, -m3)
}
