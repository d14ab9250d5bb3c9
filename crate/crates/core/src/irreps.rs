//! Flattened irrep containers.
//!
//! An [`IrrepsVector`] of maximum degree `L` stores the blocks
//! `x^(0), x^(1), ..., x^(L)` back to back; the coefficient `x^(l)_m` lives at
//! offset `l² + (m + l)`, so the total length is `(L + 1)²`.

use std::ops::Range;

use crate::error::{domain, Result};

/// Offset of coefficient `(l, m)` inside a flattened irreps vector.
#[inline]
pub fn index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    l * l + (m + l as i64) as usize
}

/// Number of coefficients in a vector of maximum degree `lmax`.
#[inline]
pub fn dim(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrrepsVector {
    lmax: usize,
    data: Vec<f64>,
}

impl IrrepsVector {
    pub fn zeros(lmax: usize) -> Self {
        Self { lmax, data: vec![0.0; dim(lmax)] }
    }

    pub fn from_vec(lmax: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim(lmax) {
            return Err(domain(format!(
                "irreps vector of degree {lmax} needs {} entries, got {}",
                dim(lmax),
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!("non-finite coefficient at offset {pos}")));
        }
        Ok(Self { lmax, data })
    }

    /// Vector holding a single degree-`l` block, zero elsewhere.
    pub fn from_block(l: usize, block: &[f64]) -> Result<Self> {
        if block.len() != 2 * l + 1 {
            return Err(domain(format!("degree-{l} block needs {} entries, got {}", 2 * l + 1, block.len())));
        }
        let mut v = Self::zeros(l);
        v.block_mut(l).copy_from_slice(block);
        Ok(v)
    }

    #[inline]
    pub fn lmax(&self) -> usize {
        self.lmax
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, l: usize, m: i64) -> f64 {
        self.data[index(l, m)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, m: i64, value: f64) {
        self.data[index(l, m)] = value;
    }

    pub fn block_range(l: usize) -> Range<usize> {
        l * l..(l + 1) * (l + 1)
    }

    pub fn block(&self, l: usize) -> &[f64] {
        &self.data[Self::block_range(l)]
    }

    pub fn block_mut(&mut self, l: usize) -> &mut [f64] {
        &mut self.data[Self::block_range(l)]
    }

    /// True when every entry of block `l` is exactly zero.
    pub fn block_is_zero(&self, l: usize) -> bool {
        self.block(l).iter().all(|&v| v == 0.0)
    }

    /// Degrees whose blocks carry at least one nonzero entry.
    pub fn support(&self) -> Vec<usize> {
        (0..=self.lmax).filter(|&l| !self.block_is_zero(l)).collect()
    }

    /// Copy truncated (or zero-padded) to maximum degree `lmax`.
    pub fn resized(&self, lmax: usize) -> Self {
        let mut out = Self::zeros(lmax);
        let n = dim(lmax.min(self.lmax));
        out.data[..n].copy_from_slice(&self.data[..n]);
        out
    }

    /// Multiply block `l` by `w[l]`.
    pub fn scale_degrees(&self, w: &DegreeWeights) -> Result<Self> {
        if w.lmax() != self.lmax {
            return Err(domain(format!(
                "degree weights cover degree {} but the vector has degree {}",
                w.lmax(),
                self.lmax
            )));
        }
        let mut out = self.clone();
        for l in 0..=self.lmax {
            let s = w.get(l);
            out.block_mut(l).iter_mut().for_each(|v| *v *= s);
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { lmax: self.lmax, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// Flip the sign of odd-degree blocks (the action of spatial inversion).
    pub fn parity_flipped(&self) -> Self {
        let mut out = self.clone();
        for l in (1..=self.lmax).step_by(2) {
            out.block_mut(l).iter_mut().for_each(|v| *v = -*v);
        }
        out
    }

    /// `self + s * other`, both at the same degree.
    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        if other.lmax != self.lmax {
            return Err(domain("axpy on vectors of different degree"));
        }
        Ok(Self { lmax: self.lmax, data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect() })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute entrywise difference; vectors of different degree are
    /// compared after zero-padding the shorter one.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.data.len().max(other.data.len());
        (0..n)
            .map(|i| {
                let a = self.data.get(i).copied().unwrap_or(0.0);
                let b = other.data.get(i).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max|self - reference| / max|reference|`, falling back to the absolute
    /// difference when the reference vanishes.
    pub fn rel_err(&self, reference: &Self) -> f64 {
        let scale = reference.max_abs();
        let diff = self.max_abs_diff(reference);
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }
}

/// One real weight per degree, `w_0 ..= w_L`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeWeights {
    w: Vec<f64>,
}

impl DegreeWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(domain("degree weights need at least one entry"));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(domain("degree weights must be finite"));
        }
        Ok(Self { w })
    }

    pub fn ones(lmax: usize) -> Self {
        Self { w: vec![1.0; lmax + 1] }
    }

    #[inline]
    pub fn lmax(&self) -> usize {
        self.w.len() - 1
    }

    #[inline]
    pub fn get(&self, l: usize) -> f64 {
        self.w[l]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }
}

/// A `batch × channels` array of irreps vectors sharing one maximum degree.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBatch {
    batch: usize,
    channels: usize,
    lmax: usize,
    data: Vec<f64>,
}

impl FeatureBatch {
    pub fn zeros(batch: usize, channels: usize, lmax: usize) -> Self {
        Self { batch, channels, lmax, data: vec![0.0; batch * channels * dim(lmax)] }
    }

    pub fn from_vec(batch: usize, channels: usize, lmax: usize, data: Vec<f64>) -> Result<Self> {
        let expected = batch * channels * dim(lmax);
        if data.len() != expected {
            return Err(domain(format!(
                "feature batch {batch}x{channels} of degree {lmax} needs {expected} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(domain("feature batch entries must be finite"));
        }
        Ok(Self { batch, channels, lmax, data })
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, b: usize, c: usize) -> usize {
        assert!(b < self.batch && c < self.channels, "feature index out of range");
        (b * self.channels + c) * dim(self.lmax)
    }

    pub fn feature(&self, b: usize, c: usize) -> IrrepsVector {
        let o = self.offset(b, c);
        IrrepsVector { lmax: self.lmax, data: self.data[o..o + dim(self.lmax)].to_vec() }
    }

    pub fn set_feature(&mut self, b: usize, c: usize, x: &IrrepsVector) -> Result<()> {
        if x.lmax() != self.lmax {
            return Err(domain("feature degree does not match the batch"));
        }
        let o = self.offset(b, c);
        self.data[o..o + dim(self.lmax)].copy_from_slice(x.as_slice());
        Ok(())
    }
}
