//! Real spherical harmonics.
//!
//! Orthonormal on S², with the Condon–Shortley phase cancelled so that every
//! coefficient of the degree-1 block is a positive multiple of a Cartesian
//! component. The polar axis is `+y`: a point with polar angle `theta` and
//! azimuth `psi` sits at
//!
//! ```text
//! (x, y, z) = (sin θ sin ψ, cos θ, sin θ cos ψ)
//! ```
//!
//! so the degree-1 block is `sqrt(3/4π) · (x, y, z)` for `m = -1, 0, 1`, and
//! `Y^(l)_m` vanishes on the `y` axis unless `m = 0`.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::irreps::{index, IrrepsVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    theta: f64,
    psi: f64,
}

impl SphericalPoint {
    /// `theta` must lie in `[0, π]`; `psi` is wrapped into `[0, 2π)`.
    pub fn new(theta: f64, psi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !psi.is_finite() {
            return Err(domain(format!("invalid spherical point ({theta}, {psi})")));
        }
        Ok(Self { theta, psi: psi.rem_euclid(2.0 * PI) })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn antipode(&self) -> Self {
        Self { theta: PI - self.theta, psi: (self.psi + PI).rem_euclid(2.0 * PI) }
    }

    pub fn to_unit(&self) -> UnitVector3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.psi.sin_cos();
        UnitVector3 { x: st * sp, y: ct, z: st * cp }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Inputs further than this from unit norm are rejected.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

impl UnitVector3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(domain(format!("vector ({x}, {y}, {z}) has norm {n}, expected 1")));
        }
        Ok(Self { x, y, z })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(v: [f64; 3]) -> Result<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !n.is_finite() || n <= 0.0 {
            return Err(domain("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self { x: v[0] / n, y: v[1] / n, z: v[2] / n })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn neg(&self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn to_spherical(&self) -> SphericalPoint {
        let theta = (self.x * self.x + self.z * self.z).sqrt().atan2(self.y);
        let psi = self.x.atan2(self.z).rem_euclid(2.0 * PI);
        SphericalPoint { theta, psi }
    }
}

#[inline]
fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Normalized associated Legendre values with the `sin^m θ` factor removed:
/// `q[l][m] = N_lm P_lm(c) / s^m` for `0 ≤ m ≤ l ≤ lmax`, stored triangularly.
///
/// `N_lm P_lm(c)` is the orthonormal (no Condon–Shortley) Legendre function, so
/// `q · s^m` reproduces it for any signed `s` with `s² + c² = 1`.
pub(crate) fn legendre_q(lmax: usize, c: f64) -> Vec<f64> {
    let mut q = vec![0.0; tri(lmax, lmax) + 1];
    q[0] = 0.5 / PI.sqrt();
    for m in 1..=lmax {
        let mf = m as f64;
        q[tri(m, m)] = q[tri(m - 1, m - 1)] * ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
    }
    for m in 0..lmax {
        q[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * c * q[tri(m, m)];
    }
    for m in 0..=lmax {
        let mf = m as f64;
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            q[tri(l, m)] = a * (c * q[tri(l - 1, m)] - b * q[tri(l - 2, m)]);
        }
    }
    q
}

/// The `theta` factor of `Y^(l)_m`, including the `√2` for `m ≠ 0`, evaluated
/// with a signed `sin θ` so that it extends analytically past `θ = π`.
pub(crate) fn theta_factor_all(lmax: usize, c: f64, s: f64) -> Vec<f64> {
    let mut q = legendre_q(lmax, c);
    let mut sm = 1.0;
    for m in 0..=lmax {
        let scale = if m == 0 { 1.0 } else { std::f64::consts::SQRT_2 } * sm;
        for l in m..=lmax {
            q[tri(l, m)] *= scale;
        }
        sm *= s;
    }
    q
}

pub(crate) fn theta_factor_index(l: usize, m: usize) -> usize {
    tri(l, m)
}

/// Value of the real spherical harmonic `Y^(l)_m` at `p`.
pub fn eval_real_sh(l: usize, m: i64, p: SphericalPoint) -> Result<f64> {
    if m.unsigned_abs() as usize > l {
        return Err(domain(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let (s, c) = p.theta.sin_cos();
    let am = m.unsigned_abs() as usize;
    let theta_part = theta_factor_all(l, c, s)[tri(l, am)];
    let azimuth = match m {
        0 => 1.0,
        m if m > 0 => (m as f64 * p.psi).cos(),
        m => ((-m) as f64 * p.psi).sin(),
    };
    Ok(theta_part * azimuth)
}

/// All real spherical harmonics up to degree `lmax` at the unit vector `r`.
pub fn eval_sh_vector(lmax: usize, r: UnitVector3) -> Result<IrrepsVector> {
    let n = (r.x * r.x + r.y * r.y + r.z * r.z).sqrt();
    if (n - 1.0).abs() > UNIT_NORM_TOLERANCE {
        return Err(domain(format!("input direction has norm {n}, expected 1")));
    }
    Ok(sh_vector_unchecked(lmax, r.x, r.y, r.z))
}

/// Same as [`eval_sh_vector`] for a direction already known to be unit norm.
pub(crate) fn sh_vector_unchecked(lmax: usize, x: f64, y: f64, z: f64) -> IrrepsVector {
    let q = legendre_q(lmax, y);
    let mut out = IrrepsVector::zeros(lmax);
    // (z + i x)^m = sin^m θ · e^{i m ψ}
    let (mut cm, mut sm) = (1.0, 0.0);
    for m in 0..=lmax {
        if m == 0 {
            for l in 0..=lmax {
                out.set(l, 0, q[tri(l, 0)]);
            }
        } else {
            let (c, s) = (cm * z - sm * x, cm * x + sm * z);
            cm = c;
            sm = s;
            let sq2 = std::f64::consts::SQRT_2;
            for l in m..=lmax {
                let base = sq2 * q[tri(l, m)];
                out.as_mut_slice()[index(l, m as i64)] = base * cm;
                out.as_mut_slice()[index(l, -(m as i64))] = base * sm;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_harmonic() {
        let p = SphericalPoint::new(1.1, 4.0).unwrap();
        let v = eval_real_sh(0, 0, p).unwrap();
        assert!((v - 0.282_094_791_773_878_1).abs() < 1e-15);
    }

    #[test]
    fn degree_one_at_pole() {
        let p = SphericalPoint::new(0.0, 0.0).unwrap();
        let v = eval_real_sh(1, 0, p).unwrap();
        assert!((v - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert!((v - 0.488_602_511_9).abs() < 1e-10);
    }

    #[test]
    fn vanishes_on_equator() {
        for psi in [0.0, 0.7, 2.5, 5.9] {
            let p = SphericalPoint::new(PI / 2.0, psi).unwrap();
            assert!(eval_real_sh(2, 1, p).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn domain_errors() {
        let p = SphericalPoint::new(0.3, 0.3).unwrap();
        assert!(eval_real_sh(2, 3, p).is_err());
        assert!(SphericalPoint::new(-0.1, 0.0).is_err());
        assert!(UnitVector3::new(1.0, 1.0, 0.0).is_err());
        assert!(eval_sh_vector(2, UnitVector3 { x: 2.0, y: 0.0, z: 0.0 }).is_err());
    }

    #[test]
    fn degree_one_is_cartesian() {
        let r = UnitVector3::normalize([0.3, -0.5, 0.8]).unwrap();
        let v = eval_sh_vector(1, r).unwrap();
        let c = (3.0 / (4.0 * PI)).sqrt();
        assert!((v.get(1, -1) - c * r.x).abs() < 1e-15);
        assert!((v.get(1, 0) - c * r.y).abs() < 1e-15);
        assert!((v.get(1, 1) - c * r.z).abs() < 1e-15);
    }

    #[test]
    fn y_axis_is_m_zero_only() {
        let v = eval_sh_vector(6, UnitVector3::new(0.0, 1.0, 0.0).unwrap()).unwrap();
        for l in 0..=6usize {
            for m in -(l as i64)..=(l as i64) {
                if m != 0 {
                    assert_eq!(v.get(l, m), 0.0);
                } else {
                    let expect = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
                    assert!((v.get(l, 0) - expect).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn vector_and_pointwise_agree() {
        let p = SphericalPoint::new(1.234, 5.1).unwrap();
        let v = eval_sh_vector(8, p.to_unit()).unwrap();
        for l in 0..=8usize {
            for m in -(l as i64)..=(l as i64) {
                let a = eval_real_sh(l, m, p).unwrap();
                assert!((a - v.get(l, m)).abs() < 1e-13, "l={l} m={m}");
            }
        }
    }
}
