//! Slow reference implementations written as direct sums over coefficients.
//! Nothing here shares code with the fast paths beyond the coupling
//! coefficients themselves.

mod products;
mod quadrature;

pub use products::{
    cg_tp_reference, cg_tp_reference_counted, conv2d_direct, gaunt_tp_reference, gaunt_tp_reference_counted,
    many_body_reference,
};
pub use quadrature::{gaunt_coeff_quadrature, gauss_legendre, QuadratureGrid};

use crate::so3::coupling::{clebsch_gordan, gaunt_complex, real_clebsch_gordan};
use crate::so3::gaunt_coefficient;

/// Spread of a set of ratios: `(first ratio, max |ratio - first|)`, or `None`
/// when no denominator is usable.
fn ratio_spread(pairs: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    let mut first = None;
    let mut dev: f64 = 0.0;
    for (num, den) in pairs {
        if den.abs() < 1e-12 {
            continue;
        }
        let r = num / den;
        match first {
            None => first = Some(r),
            Some(f) => dev = dev.max((r - f).abs()),
        }
    }
    first.map(|f| (f, dev))
}

/// Ratio of the complex-harmonic Gaunt coefficient
/// `∫ Y_l1^m1 Y_l2^m2 conj(Y_l^m) dΩ` to `⟨l1 m1 l2 m2 | l m⟩` over all `m1, m2`
/// with a nonzero Clebsch-Gordan coefficient.
pub fn complex_gaunt_cg_ratio(l1: usize, l2: usize, l: usize) -> Option<(f64, f64)> {
    let mut pairs = Vec::new();
    for m1 in -(l1 as i64)..=(l1 as i64) {
        for m2 in -(l2 as i64)..=(l2 as i64) {
            let m = m1 + m2;
            if m.unsigned_abs() as usize > l {
                continue;
            }
            // conj(Y_l^m) = (-1)^m Y_l^{-m}
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            pairs.push((sign * gaunt_complex(l1, m1, l2, m2, l, -m), clebsch_gordan(l1, m1, l2, m2, l, m)));
        }
    }
    ratio_spread(pairs.into_iter())
}

/// The same ratio with real harmonics on both sides: real Gaunt coefficient
/// over real-basis Clebsch-Gordan coefficient, across all `(m1, m2, m)`.
pub fn real_gaunt_cg_ratio(l1: usize, l2: usize, l: usize) -> Option<(f64, f64)> {
    let mut pairs = Vec::new();
    for m1 in -(l1 as i64)..=(l1 as i64) {
        for m2 in -(l2 as i64)..=(l2 as i64) {
            for m in -(l as i64)..=(l as i64) {
                pairs.push((gaunt_coefficient(l1, m1, l2, m2, l, m), real_clebsch_gordan(l1, m1, l2, m2, l, m)));
            }
        }
    }
    ratio_spread(pairs.into_iter())
}
