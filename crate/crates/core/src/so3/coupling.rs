//! Clebsch-Gordan and Gaunt coefficients.
//!
//! Clebsch-Gordan coefficients are the standard ones for the complex
//! (angular momentum eigenstate) basis. Gaunt coefficients are the triple
//! integrals of the *real* harmonics used everywhere else in the crate; they
//! are assembled from complex-basis Gaunt values through the fixed
//! real↔complex change of basis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::wigner3j::{triangle, wigner_3j};

/// Clebsch-Gordan coefficient `⟨l1 m1; l2 m2 | l m⟩`.
pub fn clebsch_gordan(l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> f64 {
    if m1 + m2 != m || !triangle(l1, l2, l) {
        return 0.0;
    }
    let phase = if (l1 as i64 - l2 as i64 + m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * ((2 * l + 1) as f64).sqrt() * wigner_3j(l1, l2, l, m1, m2, -m)
}

/// Coefficients expressing the real harmonic `Y^(l)_m` in complex harmonics
/// `Y_l^μ` (Condon–Shortley phase): `Y^(l)_m = Σ_μ u_μ Y_l^μ`.
pub fn real_to_complex(m: i64) -> ([(i64, Complex64); 2], usize) {
    let zero = (0, Complex64::new(0.0, 0.0));
    if m == 0 {
        return ([(0, Complex64::new(1.0, 0.0)), zero], 1);
    }
    let k = m.abs();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    if m > 0 {
        ([(k, Complex64::new(sign * FRAC_1_SQRT_2, 0.0)), (-k, Complex64::new(FRAC_1_SQRT_2, 0.0))], 2)
    } else {
        ([(k, Complex64::new(0.0, -sign * FRAC_1_SQRT_2)), (-k, Complex64::new(0.0, FRAC_1_SQRT_2))], 2)
    }
}

/// `∫ Y_l1^μ1 Y_l2^μ2 Y_l^μ dΩ` for complex harmonics (no conjugation).
pub fn gaunt_complex(l1: usize, mu1: i64, l2: usize, mu2: i64, l: usize, mu: i64) -> f64 {
    if (l1 + l2 + l) % 2 == 1 || !triangle(l1, l2, l) || mu1 + mu2 + mu != 0 {
        return 0.0;
    }
    let norm = (((2 * l1 + 1) * (2 * l2 + 1) * (2 * l + 1)) as f64 / (4.0 * PI)).sqrt();
    norm * wigner_3j(l1, l2, l, 0, 0, 0) * wigner_3j(l1, l2, l, mu1, mu2, mu)
}

/// True when parity or the triangle rule forces every Gaunt coefficient of
/// the degree triple to vanish.
#[inline]
pub fn gaunt_forbidden(l1: usize, l2: usize, l: usize) -> bool {
    (l1 + l2 + l) % 2 == 1 || !triangle(l1, l2, l)
}

/// Real-harmonic Gaunt coefficient `∫ Y^(l1)_m1 Y^(l2)_m2 Y^(l)_m dΩ`.
///
/// Symmetric under any permutation of its three `(l, m)` pairs. Exactly zero
/// when `l1 + l2 + l` is odd, the triangle rule fails, or some `|m| > l`.
pub fn gaunt_coefficient(l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> f64 {
    if gaunt_forbidden(l1, l2, l)
        || m1.unsigned_abs() as usize > l1
        || m2.unsigned_abs() as usize > l2
        || m.unsigned_abs() as usize > l
    {
        return 0.0;
    }
    // μ1 + μ2 + μ3 = 0 with μ_i = ±|m_i| needs one |m| to be the sum or
    // difference of the other two
    let (a, b, c) = (m1.abs(), m2.abs(), m.abs());
    if a + b != c && a.abs_diff(b) as i64 != c {
        return 0.0;
    }
    let (u1, n1) = real_to_complex(m1);
    let (u2, n2) = real_to_complex(m2);
    let (u3, n3) = real_to_complex(m);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(mu1, c1) in &u1[..n1] {
        for &(mu2, c2) in &u2[..n2] {
            for &(mu3, c3) in &u3[..n3] {
                if mu1 + mu2 + mu3 != 0 {
                    continue;
                }
                let g = gaunt_complex(l1, mu1, l2, mu2, l, mu3);
                acc += c1 * c2 * c3 * g;
            }
        }
    }
    debug_assert!(acc.im.abs() < 1e-12, "real Gaunt coefficient with imaginary part {}", acc.im);
    acc.re
}

/// Clebsch-Gordan coefficient transported to the real-harmonic basis.
///
/// The transported tensor is real or purely imaginary depending on the parity
/// of `l1 + l2 + l`; the imaginary case is rotated back onto the real axis.
/// Either way the coefficients couple real irreps equivariantly.
pub fn real_clebsch_gordan(l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> f64 {
    if !triangle(l1, l2, l)
        || m1.unsigned_abs() as usize > l1
        || m2.unsigned_abs() as usize > l2
        || m.unsigned_abs() as usize > l
    {
        return 0.0;
    }
    let (u1, n1) = real_to_complex(m1);
    let (u2, n2) = real_to_complex(m2);
    let (u3, n3) = real_to_complex(m);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(mu1, c1) in &u1[..n1] {
        for &(mu2, c2) in &u2[..n2] {
            for &(mu, c) in &u3[..n3] {
                if mu1 + mu2 != mu {
                    continue;
                }
                acc += c * c1.conj() * c2.conj() * clebsch_gordan(l1, mu1, l2, mu2, l, mu);
            }
        }
    }
    if (l1 + l2 + l).is_multiple_of(2) {
        acc.re
    } else {
        acc.im
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cg_examples() {
        for l in 0..4usize {
            for m in -(l as i64)..=(l as i64) {
                assert!((clebsch_gordan(0, 0, l, m, l, m) - 1.0).abs() < 1e-15);
            }
        }
        assert!((clebsch_gordan(1, 1, 1, -1, 0, 0) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gaunt_examples() {
        let c = 0.5 / PI.sqrt();
        assert!((gaunt_coefficient(0, 0, 0, 0, 0, 0) - c).abs() < 1e-15);
        assert_eq!(gaunt_coefficient(1, 0, 1, 0, 1, 0), 0.0);
        let expect = (45.0 / (4.0 * PI)).sqrt() * 2.0 / 15.0;
        assert!((gaunt_coefficient(1, 0, 1, 0, 2, 0) - expect).abs() < 1e-15);
    }

    #[test]
    fn real_cg_parts_are_pure() {
        // the discarded component of the transported tensor must vanish
        for (l1, l2, l) in [(1usize, 1usize, 1usize), (1, 2, 2), (2, 2, 3), (1, 1, 2)] {
            for m1 in -(l1 as i64)..=(l1 as i64) {
                for m2 in -(l2 as i64)..=(l2 as i64) {
                    for m in -(l as i64)..=(l as i64) {
                        let (u1, n1) = real_to_complex(m1);
                        let (u2, n2) = real_to_complex(m2);
                        let (u3, n3) = real_to_complex(m);
                        let mut acc = Complex64::new(0.0, 0.0);
                        for &(a, ca) in &u1[..n1] {
                            for &(b, cb) in &u2[..n2] {
                                for &(c, cc) in &u3[..n3] {
                                    acc += cc * ca.conj() * cb.conj() * clebsch_gordan(l1, a, l2, b, l, c);
                                }
                            }
                        }
                        let stray = if (l1 + l2 + l) % 2 == 0 { acc.im } else { acc.re };
                        assert!(stray.abs() < 1e-14, "{l1} {l2} {l}: {stray}");
                    }
                }
            }
        }
    }
}
