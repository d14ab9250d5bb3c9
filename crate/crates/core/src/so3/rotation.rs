//! Rotations: Z-Y-Z Euler angles, real Wigner-D matrices, and the edge frame
//! that aligns a direction with the `+y` axis.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3};

use super::sh::UnitVector3;
use crate::error::{domain, Result};
use crate::irreps::IrrepsVector;

/// Rotation `R = Rz(alpha) · Ry(beta) · Rz(gamma)` about the fixed Cartesian axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAnglesZYZ {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_y(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

impl EulerAnglesZYZ {
    pub const IDENTITY: Self = Self { alpha: 0.0, beta: 0.0, gamma: 0.0 };

    /// `beta` must lie in `[0, π]`; `alpha` and `gamma` are wrapped into `[0, 2π)`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&beta) || !alpha.is_finite() || !gamma.is_finite() {
            return Err(domain(format!("invalid Euler angles ({alpha}, {beta}, {gamma})")));
        }
        Ok(Self { alpha: alpha.rem_euclid(2.0 * PI), beta, gamma: gamma.rem_euclid(2.0 * PI) })
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        rot_z(self.alpha) * rot_y(self.beta) * rot_z(self.gamma)
    }

    /// Euler angles of a proper rotation matrix. In the gimbal-locked cases
    /// (`beta` = 0 or π) the whole in-plane angle is assigned to `alpha`.
    pub fn from_matrix(r: &Matrix3<f64>) -> Self {
        let beta = r[(2, 2)].clamp(-1.0, 1.0).acos();
        let sb = (r[(0, 2)].powi(2) + r[(1, 2)].powi(2)).sqrt();
        let (alpha, gamma) = if sb > 1e-12 {
            (r[(1, 2)].atan2(r[(0, 2)]), r[(2, 1)].atan2(-r[(2, 0)]))
        } else if r[(2, 2)] > 0.0 {
            (r[(1, 0)].atan2(r[(0, 0)]), 0.0)
        } else {
            ((-r[(1, 0)]).atan2(-r[(0, 0)]), 0.0)
        };
        Self { alpha: alpha.rem_euclid(2.0 * PI), beta, gamma: gamma.rem_euclid(2.0 * PI) }
    }

    /// The rotation `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_matrix(&(self.to_matrix() * other.to_matrix()))
    }

    pub fn inverse(&self) -> Self {
        Self::from_matrix(&self.to_matrix().transpose())
    }

    pub fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        let r = self.to_matrix() * nalgebra::Vector3::new(v[0], v[1], v[2]);
        [r[0], r[1], r[2]]
    }
}

/// Real Wigner-D block of degree `l`, satisfying `Y^(l)(R r) = D^(l)(g) Y^(l)(r)`.
pub fn wigner_d_matrix(l: usize, g: &EulerAnglesZYZ) -> DMatrix<f64> {
    wigner_d_from_matrix(l, &g.to_matrix()).pop().expect("at least one block")
}

/// Real Wigner-D blocks `D^(0) ..= D^(lmax)` for `g`.
pub fn wigner_d_blocks(lmax: usize, g: &EulerAnglesZYZ) -> WignerDBlocks {
    WignerDBlocks { blocks: wigner_d_from_matrix(lmax, &g.to_matrix()) }
}

/// Blocks up to `lmax` built by the Ivanic–Ruedenberg recursion, which
/// assembles `D^(l)` from `D^(l-1)` and the Cartesian matrix.
///
/// With the `+y` polar axis the degree-1 block in `(x, y, z)` order is the
/// Cartesian rotation matrix itself.
pub fn wigner_d_from_matrix(lmax: usize, r: &Matrix3<f64>) -> Vec<DMatrix<f64>> {
    let mut blocks = Vec::with_capacity(lmax + 1);
    blocks.push(DMatrix::from_element(1, 1, 1.0));
    if lmax == 0 {
        return blocks;
    }
    blocks.push(DMatrix::from_fn(3, 3, |i, j| r[(i, j)]));
    let r1 = |i: i64, j: i64| r[((i + 1) as usize, (j + 1) as usize)];

    for l in 2..=lmax {
        let li = l as i64;
        let prev = &blocks[l - 1];
        let lp = li - 1;
        let pv = |a: i64, b: i64| prev[((a + lp) as usize, (b + lp) as usize)];
        let p = |i: i64, a: i64, b: i64| -> f64 {
            if b == li {
                r1(i, 1) * pv(a, lp) - r1(i, -1) * pv(a, -lp)
            } else if b == -li {
                r1(i, 1) * pv(a, -lp) + r1(i, -1) * pv(a, lp)
            } else {
                r1(i, 0) * pv(a, b)
            }
        };
        let n = 2 * l + 1;
        let mut d = DMatrix::zeros(n, n);
        for m in -li..=li {
            let am = m.abs();
            let d0 = if m == 0 { 1.0 } else { 0.0 };
            for mp in -li..=li {
                let denom = if mp.abs() < li { ((li + mp) * (li - mp)) as f64 } else { (2 * li * (2 * li - 1)) as f64 };
                let u = (((li + m) * (li - m)) as f64 / denom).sqrt();
                let v = 0.5 * ((1.0 + d0) * ((li + am - 1) * (li + am)) as f64 / denom).sqrt() * (1.0 - 2.0 * d0);
                let w = -0.5 * (((li - am - 1) * (li - am)) as f64 / denom).sqrt() * (1.0 - d0);

                let mut val = 0.0;
                if u != 0.0 {
                    val += u * p(0, m, mp);
                }
                if v != 0.0 {
                    let vv = if m == 0 {
                        p(1, 1, mp) + p(-1, -1, mp)
                    } else if m > 0 {
                        let d1: f64 = if m == 1 { 1.0 } else { 0.0 };
                        p(1, m - 1, mp) * (1.0 + d1).sqrt() - p(-1, -m + 1, mp) * (1.0 - d1)
                    } else {
                        let d1: f64 = if m == -1 { 1.0 } else { 0.0 };
                        p(1, m + 1, mp) * (1.0 - d1) + p(-1, -m - 1, mp) * (1.0 + d1).sqrt()
                    };
                    val += v * vv;
                }
                if w != 0.0 {
                    let ww =
                        if m > 0 { p(1, m + 1, mp) + p(-1, -m - 1, mp) } else { p(1, m - 1, mp) - p(-1, -m + 1, mp) };
                    val += w * ww;
                }
                d[((m + li) as usize, (mp + li) as usize)] = val;
            }
        }
        blocks.push(d);
    }
    blocks
}

/// Block-diagonal real Wigner-D representation acting on an [`IrrepsVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct WignerDBlocks {
    blocks: Vec<DMatrix<f64>>,
}

impl WignerDBlocks {
    pub fn lmax(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, l: usize) -> &DMatrix<f64> {
        &self.blocks[l]
    }

    pub fn blocks(&self) -> &[DMatrix<f64>] {
        &self.blocks
    }

    /// `D · x`.
    pub fn apply(&self, x: &IrrepsVector) -> Result<IrrepsVector> {
        self.apply_impl(x, false)
    }

    /// `Dᵀ · x`, the action of the inverse rotation.
    pub fn apply_transpose(&self, x: &IrrepsVector) -> Result<IrrepsVector> {
        self.apply_impl(x, true)
    }

    fn apply_impl(&self, x: &IrrepsVector, transpose: bool) -> Result<IrrepsVector> {
        if x.lmax() > self.lmax() {
            return Err(domain(format!(
                "vector of degree {} exceeds Wigner-D blocks of degree {}",
                x.lmax(),
                self.lmax()
            )));
        }
        let mut out = IrrepsVector::zeros(x.lmax());
        for l in 0..=x.lmax() {
            let d = &self.blocks[l];
            let src = x.block(l);
            let dst = out.block_mut(l);
            let n = 2 * l + 1;
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    let dij = if transpose { d[(j, i)] } else { d[(i, j)] };
                    acc += dij * src[j];
                }
                dst[i] = acc;
            }
        }
        Ok(out)
    }
}

/// Directions within this distance of `±y` take the fixed degenerate branch.
const POLE_TOLERANCE: f64 = 1e-12;

/// A deterministic rotation `g` with `D^(1)(g) · r = (0, 1, 0)`.
///
/// The rotation has `gamma = 0` and is read off the spherical angles of `r`.
/// Near `+y` it is the identity and near `-y` it is the half-turn about `z`.
pub fn rotation_to_y_axis(r: UnitVector3) -> EulerAnglesZYZ {
    if (r.x * r.x + (r.y - 1.0).powi(2) + r.z * r.z).sqrt() < POLE_TOLERANCE {
        return EulerAnglesZYZ::IDENTITY;
    }
    if (r.x * r.x + (r.y + 1.0).powi(2) + r.z * r.z).sqrt() < POLE_TOLERANCE {
        return EulerAnglesZYZ { alpha: PI, beta: 0.0, gamma: 0.0 };
    }
    // R⁻¹ e_y = (sin α cos β, cos α, sin α sin β) with β ∈ [0, π]
    let polar = (r.x * r.x + r.z * r.z).sqrt().atan2(r.y);
    let (alpha, beta) = if r.z >= 0.0 { (polar, r.z.atan2(r.x)) } else { (2.0 * PI - polar, (-r.z).atan2(-r.x)) };
    EulerAnglesZYZ { alpha, beta: beta.clamp(0.0, PI), gamma: 0.0 }
}
