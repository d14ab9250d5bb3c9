//! Gaunt tensor products: multiply the spherical functions of two irreps
//! vectors by converting to Fourier grids, convolving, and converting back.

use rayon::prelude::*;

use crate::basis::{conversion_table, fourier_to_sh_masked, sh_to_fourier_counted, ConversionTable, MAX_INPUT_DEGREE};
use crate::error::{domain, Error, Result};
use crate::fft::conv2d_fft_counted;
use crate::irreps::{DegreeWeights, FeatureBatch, IrrepsVector};
use crate::so3::gaunt_forbidden;

/// Multiply-add counts of one product, split by stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkCount {
    pub conversion: u64,
    pub fft: u64,
}

impl WorkCount {
    pub fn total(&self) -> u64 {
        self.conversion + self.fft
    }
}

impl std::ops::AddAssign for WorkCount {
    fn add_assign(&mut self, o: Self) {
        self.conversion += o.conversion;
        self.fft += o.fft;
    }
}

pub(crate) fn check_input_degree(l: usize) -> Result<()> {
    if l > MAX_INPUT_DEGREE {
        return Err(Error::Capacity { degree: l, max: MAX_INPUT_DEGREE });
    }
    Ok(())
}

/// Degrees `l` that some pair from the two supports can reach under the
/// triangle and parity rules.
pub(crate) fn reachable_degrees(s1: &[usize], s2: &[usize], l_out: usize) -> Vec<bool> {
    (0..=l_out).map(|l| s1.iter().any(|&a| s2.iter().any(|&b| !gaunt_forbidden(a, b, l)))).collect()
}

/// [`gaunt_full_tp`] against an explicit table of degree `≥ x.lmax() + y.lmax()`.
pub fn gaunt_full_tp_with_table(
    x: &IrrepsVector,
    y: &IrrepsVector,
    l_out: usize,
    t: &ConversionTable,
) -> Result<(IrrepsVector, WorkCount)> {
    check_input_degree(x.lmax())?;
    check_input_degree(y.lmax())?;
    let l_sum = x.lmax() + y.lmax();
    if l_out > l_sum {
        return Err(domain(format!("output degree {l_out} exceeds the product bandwidth {l_sum}")));
    }
    if t.lmax() < l_sum {
        return Err(domain(format!("table degree {} is below the product bandwidth {l_sum}", t.lmax())));
    }
    let mut work = WorkCount::default();
    let (fx, ox) = sh_to_fourier_counted(x, t)?;
    let (fy, oy) = sh_to_fourier_counted(y, t)?;
    work.conversion += ox + oy;

    let lm = x.lmax().max(y.lmax());
    let (prod, of) = conv2d_fft_counted(&fx.resized(lm), &fy.resized(lm))?;
    work.fft += of;
    let prod = if prod.lmax() > l_sum { prod.resized(l_sum) } else { prod };

    let keep = reachable_degrees(&x.support(), &y.support(), l_out);
    let (out, ob) = fourier_to_sh_masked(&prod, t, l_out, |l| keep[l])?;
    work.conversion += ob;
    Ok((out, work))
}

/// Coefficients up to `l_out` of the pointwise product of the spherical
/// functions of `x` and `y`, i.e. `Σ_{l1,l2} (x^(l1) ⊗_Gaunt y^(l2))^(l)`.
///
/// Degrees that no pair of nonzero input blocks can reach are exact zeros.
pub fn gaunt_full_tp(x: &IrrepsVector, y: &IrrepsVector, l_out: usize) -> Result<IrrepsVector> {
    gaunt_full_tp_counted(x, y, l_out).map(|(v, _)| v)
}

pub fn gaunt_full_tp_counted(x: &IrrepsVector, y: &IrrepsVector, l_out: usize) -> Result<(IrrepsVector, WorkCount)> {
    check_input_degree(x.lmax())?;
    check_input_degree(y.lmax())?;
    let t = conversion_table(x.lmax() + y.lmax())?;
    gaunt_full_tp_with_table(x, y, l_out, &t)
}

/// Gaunt product with per-degree weights: coefficient `w_{l1} w_{l2} w_l G`.
pub fn gaunt_weighted_tp(
    x: &IrrepsVector,
    y: &IrrepsVector,
    wx: &DegreeWeights,
    wy: &DegreeWeights,
    wout: &DegreeWeights,
    l_out: usize,
) -> Result<IrrepsVector> {
    if wout.lmax() != l_out {
        return Err(domain(format!("output weights cover degree {} but l_out is {l_out}", wout.lmax())));
    }
    let out = gaunt_full_tp(&x.scale_degrees(wx)?, &y.scale_degrees(wy)?, l_out)?;
    out.scale_degrees(wout)
}

/// Degree-`l_out` block of the Gaunt product of a single degree-`l1` block
/// and a single degree-`l2` block.
pub fn gaunt_single_tp(x_l1: &[f64], y_l2: &[f64], l_out: usize) -> Result<Vec<f64>> {
    let degree_of = |b: &[f64]| {
        if b.len() % 2 == 1 {
            Ok(b.len() / 2)
        } else {
            Err(domain(format!("blocks need odd length, got {}", b.len())))
        }
    };
    let (l1, l2) = (degree_of(x_l1)?, degree_of(y_l2)?);
    if gaunt_forbidden(l1, l2, l_out) {
        return Ok(vec![0.0; 2 * l_out + 1]);
    }
    let x = IrrepsVector::from_block(l1, x_l1)?;
    let y = IrrepsVector::from_block(l2, y_l2)?;
    let out = gaunt_full_tp(&x, &y, l_out)?;
    Ok(out.block(l_out).to_vec())
}

/// Real mixing weights `w[c][c1][c2]` of shape `C × C × C`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingWeights {
    channels: usize,
    w: Vec<f64>,
}

impl MixingWeights {
    pub fn new(channels: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != channels * channels * channels {
            return Err(domain(format!("mixing weights for {channels} channels need {} entries", channels.pow(3))));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(domain("mixing weights must be finite"));
        }
        Ok(Self { channels, w })
    }

    /// `w[c][c1][c2] = δ(c, c1) δ(c, c2)`.
    pub fn diagonal(channels: usize) -> Self {
        let mut w = vec![0.0; channels.pow(3)];
        for c in 0..channels {
            w[(c * channels + c) * channels + c] = 1.0;
        }
        Self { channels, w }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn get(&self, c: usize, c1: usize, c2: usize) -> f64 {
        self.w[(c * self.channels + c1) * self.channels + c2]
    }
}

/// How the channels of a batched product combine.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelMode {
    /// Output channel `c` depends on input channel `c` of both operands only.
    ChannelWise,
    /// Output channel `c` is `Σ_{c1,c2} w[c][c1][c2] (X_{c1} ⊗ Y_{c2})`.
    ChannelMixing(MixingWeights),
}

fn batch_entry(
    xs: &FeatureBatch,
    ys: &FeatureBatch,
    b: usize,
    mode: &ChannelMode,
    w: (&DegreeWeights, &DegreeWeights, &DegreeWeights),
    l_out: usize,
) -> Result<Vec<IrrepsVector>> {
    let c_n = xs.channels();
    match mode {
        ChannelMode::ChannelWise => {
            (0..c_n).map(|c| gaunt_weighted_tp(&xs.feature(b, c), &ys.feature(b, c), w.0, w.1, w.2, l_out)).collect()
        }
        ChannelMode::ChannelMixing(mw) => {
            let mut pairs = Vec::with_capacity(c_n * c_n);
            for c1 in 0..c_n {
                for c2 in 0..c_n {
                    pairs.push(gaunt_weighted_tp(&xs.feature(b, c1), &ys.feature(b, c2), w.0, w.1, w.2, l_out)?);
                }
            }
            Ok((0..c_n)
                .map(|c| {
                    let mut acc = IrrepsVector::zeros(l_out);
                    for c1 in 0..c_n {
                        for c2 in 0..c_n {
                            let k = mw.get(c, c1, c2);
                            if k != 0.0 {
                                acc = acc.axpy(k, &pairs[c1 * c_n + c2]).expect("equal degrees");
                            }
                        }
                    }
                    acc
                })
                .collect())
        }
    }
}

fn check_batch_shapes(xs: &FeatureBatch, ys: &FeatureBatch, mode: &ChannelMode) -> Result<()> {
    if xs.batch() != ys.batch() || xs.channels() != ys.channels() {
        return Err(domain(format!(
            "batch shapes {}x{} and {}x{} differ",
            xs.batch(),
            xs.channels(),
            ys.batch(),
            ys.channels()
        )));
    }
    if let ChannelMode::ChannelMixing(mw) = mode {
        if mw.channels() != xs.channels() {
            return Err(domain("mixing weights do not match the channel count"));
        }
    }
    Ok(())
}

fn assemble(batch: usize, channels: usize, l_out: usize, rows: Vec<Vec<IrrepsVector>>) -> FeatureBatch {
    let mut out = FeatureBatch::zeros(batch, channels, l_out);
    for (b, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            out.set_feature(b, c, v).expect("degree matches");
        }
    }
    out
}

/// Weighted Gaunt products over a batch of multi-channel features.
pub fn gaunt_tp_batch(
    xs: &FeatureBatch,
    ys: &FeatureBatch,
    mode: &ChannelMode,
    wx: &DegreeWeights,
    wy: &DegreeWeights,
    wout: &DegreeWeights,
    l_out: usize,
) -> Result<FeatureBatch> {
    check_batch_shapes(xs, ys, mode)?;
    let rows =
        (0..xs.batch()).map(|b| batch_entry(xs, ys, b, mode, (wx, wy, wout), l_out)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(xs.batch(), xs.channels(), l_out, rows))
}

/// [`gaunt_tp_batch`] with batch entries spread over the current rayon pool.
/// Each entry is computed exactly as in the sequential version, so results
/// are bit-identical.
pub fn gaunt_tp_batch_parallel(
    xs: &FeatureBatch,
    ys: &FeatureBatch,
    mode: &ChannelMode,
    wx: &DegreeWeights,
    wy: &DegreeWeights,
    wout: &DegreeWeights,
    l_out: usize,
) -> Result<FeatureBatch> {
    check_batch_shapes(xs, ys, mode)?;
    let rows = (0..xs.batch())
        .into_par_iter()
        .map(|b| batch_entry(xs, ys, b, mode, (wx, wy, wout), l_out))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(xs.batch(), xs.channels(), l_out, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::gaunt_coefficient;

    #[test]
    fn scalar_product() {
        let x = IrrepsVector::from_vec(0, vec![1.5]).unwrap();
        let y = IrrepsVector::from_vec(0, vec![-2.0]).unwrap();
        let out = gaunt_full_tp(&x, &y, 0).unwrap();
        let expect = gaunt_coefficient(0, 0, 0, 0, 0, 0) * 1.5 * -2.0;
        assert!((out.get(0, 0) - expect).abs() < 1e-15);
    }

    #[test]
    fn unreachable_blocks_are_exact_zeros() {
        let x = IrrepsVector::from_block(1, &[0.3, -0.2, 0.9]).unwrap();
        let y = IrrepsVector::from_block(1, &[1.0, 0.5, -0.7]).unwrap();
        let out = gaunt_full_tp(&x, &y, 2).unwrap();
        assert!(out.block_is_zero(1));
        assert!(!out.block_is_zero(0) && !out.block_is_zero(2));
    }

    #[test]
    fn domain_checks() {
        let x = IrrepsVector::zeros(2);
        assert!(gaunt_full_tp(&x, &x, 5).is_err());
        assert!(matches!(gaunt_full_tp(&IrrepsVector::zeros(33), &x, 0), Err(Error::Capacity { .. })));
        assert!(gaunt_single_tp(&[1.0, 2.0], &[1.0], 0).is_err());
        assert_eq!(gaunt_single_tp(&[1.0; 3], &[1.0; 5], 2).unwrap(), vec![0.0; 5]);
    }
}
