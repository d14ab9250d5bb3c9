use num_complex::Complex64;

use crate::error::{domain, Result};

/// Coefficients `f_{u,v}` of `Σ f_{u,v} e^{i(uθ + vψ)}` with `u, v ∈ [-L, L]`.
///
/// Row-major in `u`: the entry for `(u, v)` sits at `(u + L)(2L + 1) + (v + L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs2D {
    lmax: usize,
    data: Vec<Complex64>,
}

impl FourierCoeffs2D {
    pub fn zeros(lmax: usize) -> Self {
        let side = 2 * lmax + 1;
        Self { lmax, data: vec![Complex64::new(0.0, 0.0); side * side] }
    }

    pub fn from_vec(lmax: usize, data: Vec<Complex64>) -> Result<Self> {
        let side = 2 * lmax + 1;
        if data.len() != side * side {
            return Err(domain(format!(
                "Fourier grid of degree {lmax} needs {} entries, got {}",
                side * side,
                data.len()
            )));
        }
        Ok(Self { lmax, data })
    }

    /// A grid holding a single unit coefficient at `(u, v)`.
    pub fn impulse(lmax: usize, u: i64, v: i64) -> Self {
        let mut g = Self::zeros(lmax);
        g.set(u, v, Complex64::new(1.0, 0.0));
        g
    }

    #[inline]
    pub fn lmax(&self) -> usize {
        self.lmax
    }

    #[inline]
    pub fn side(&self) -> usize {
        2 * self.lmax + 1
    }

    #[inline]
    pub fn offset(&self, u: i64, v: i64) -> usize {
        let l = self.lmax as i64;
        debug_assert!(u.abs() <= l && v.abs() <= l);
        ((u + l) as usize) * self.side() + (v + l) as usize
    }

    #[inline]
    pub fn get(&self, u: i64, v: i64) -> Complex64 {
        self.data[self.offset(u, v)]
    }

    #[inline]
    pub fn set(&mut self, u: i64, v: i64, value: Complex64) {
        let o = self.offset(u, v);
        self.data[o] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// The same coefficients on a grid of degree `lmax`, zero-padded or cropped.
    pub fn resized(&self, lmax: usize) -> Self {
        let mut out = Self::zeros(lmax);
        let keep = lmax.min(self.lmax) as i64;
        for u in -keep..=keep {
            for v in -keep..=keep {
                out.set(u, v, self.get(u, v));
            }
        }
        out
    }

    /// Value of the series at `(theta, psi)`; `theta` may range over the full
    /// torus `[0, 2π)`.
    pub fn eval(&self, theta: f64, psi: f64) -> Complex64 {
        let l = self.lmax as i64;
        let eu: Vec<Complex64> = (-l..=l).map(|u| Complex64::from_polar(1.0, u as f64 * theta)).collect();
        let ev: Vec<Complex64> = (-l..=l).map(|v| Complex64::from_polar(1.0, v as f64 * psi)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in eu.iter().enumerate() {
            let row = &self.data[i * self.side()..(i + 1) * self.side()];
            let mut r = Complex64::new(0.0, 0.0);
            for (c, b) in row.iter().zip(&ev) {
                r += c * b;
            }
            acc += a * r;
        }
        acc
    }

    /// `max |f_{-u,-v} - conj(f_{u,v})|`, zero for the coefficients of a real function.
    pub fn hermitian_residual(&self) -> f64 {
        let l = self.lmax as i64;
        let mut worst: f64 = 0.0;
        for u in -l..=l {
            for v in -l..=l {
                worst = worst.max((self.get(-u, -v) - self.get(u, v).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest entrywise difference, comparing on the larger of the two grids.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let l = self.lmax.max(other.lmax);
        let (a, b) = (self.resized(l), other.resized(l));
        a.data.iter().zip(&b.data).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }
}
