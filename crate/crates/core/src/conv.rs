//! Equivariant convolution with spherical-harmonic edge filters, evaluated in
//! the frame where the edge points along `+y` so the filter has only `m = 0`
//! components.

use std::f64::consts::PI;

use crate::basis::{
    conversion_table, fourier_to_sh_masked, sh_to_fourier_counted, sh_to_fourier_sparse_filter_counted,
};
use crate::error::{domain, Error, Result};
use crate::fft::conv2d_fft_counted;
use crate::irreps::{DegreeWeights, IrrepsVector};
use crate::so3::{eval_sh_vector, rotation_to_y_axis, wigner_d_blocks, EulerAnglesZYZ, UnitVector3};
use crate::tp::{check_input_degree, gaunt_weighted_tp, reachable_degrees, WorkCount};

/// Edges shorter than this (in position units) have no usable direction.
pub const EDGE_DEGENERACY_THRESHOLD: f64 = 1e-9;

/// An edge between two positions with its direction `ê = (r_j - r_i) / |r_j - r_i|`
/// and the rotation taking `ê` to `+y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGeometry {
    ri: [f64; 3],
    rj: [f64; 3],
    direction: UnitVector3,
    distance: f64,
    rotation: EulerAnglesZYZ,
}

pub fn edge_frame(ri: [f64; 3], rj: [f64; 3]) -> Result<EdgeGeometry> {
    let d = [rj[0] - ri[0], rj[1] - ri[1], rj[2] - ri[2]];
    let distance = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if !distance.is_finite() {
        return Err(domain("edge endpoints must be finite"));
    }
    if distance <= EDGE_DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateEdge(distance));
    }
    let direction = UnitVector3::normalize(d)?;
    Ok(EdgeGeometry { ri, rj, direction, distance, rotation: rotation_to_y_axis(direction) })
}

impl EdgeGeometry {
    pub fn ri(&self) -> [f64; 3] {
        self.ri
    }

    pub fn rj(&self) -> [f64; 3] {
        self.rj
    }

    pub fn direction(&self) -> UnitVector3 {
        self.direction
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn rotation(&self) -> EulerAnglesZYZ {
        self.rotation
    }
}

/// Per-degree filter weights `h_0 ..= h_Lf`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterWeights {
    h: Vec<f64>,
}

impl FilterWeights {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.is_empty() || h.iter().any(|v| !v.is_finite()) {
            return Err(domain("filter weights must be a non-empty list of finite values"));
        }
        Ok(Self { h })
    }

    pub fn lmax(&self) -> usize {
        self.h.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.h
    }
}

/// Work of one convolution: the filter conversion alone, and the whole path.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConvolutionWork {
    pub filter_conversion: u64,
    pub total: WorkCount,
}

/// `Σ h_l (x_j ⊗_Gaunt Y^(l)(ê))` up to degree `l_out`, computed in the edge frame.
pub fn equiv_convolution(
    x_j: &IrrepsVector,
    e: &EdgeGeometry,
    h: &FilterWeights,
    l_out: usize,
) -> Result<IrrepsVector> {
    equiv_convolution_counted(x_j, e, h, l_out).map(|(v, _)| v)
}

pub fn equiv_convolution_counted(
    x_j: &IrrepsVector,
    e: &EdgeGeometry,
    h: &FilterWeights,
    l_out: usize,
) -> Result<(IrrepsVector, ConvolutionWork)> {
    check_input_degree(x_j.lmax())?;
    check_input_degree(h.lmax())?;
    let l_sum = x_j.lmax() + h.lmax();
    if l_out > l_sum {
        return Err(domain(format!("output degree {l_out} exceeds the product bandwidth {l_sum}")));
    }
    let t = conversion_table(l_sum)?;
    let d = wigner_d_blocks(x_j.lmax().max(l_out), &e.rotation);
    let x_rot = d.apply(x_j)?;

    // Y^(l)_m(+y) = δ_m0 sqrt((2l+1)/4π)
    let filter: Vec<f64> =
        h.as_slice().iter().enumerate().map(|(l, &hl)| hl * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()).collect();

    let mut work = ConvolutionWork::default();
    let (fx, ox) = sh_to_fourier_counted(&x_rot, &t)?;
    let (ff, of) = sh_to_fourier_sparse_filter_counted(&filter, h.lmax(), &t)?;
    work.filter_conversion = of;
    work.total.conversion += ox + of;

    let lm = x_j.lmax().max(h.lmax());
    let (prod, oc) = conv2d_fft_counted(&fx.resized(lm), &ff.resized(lm))?;
    work.total.fft += oc;
    let prod = if prod.lmax() > l_sum { prod.resized(l_sum) } else { prod };

    let filter_support: Vec<usize> = (0..=h.lmax()).filter(|&l| h.as_slice()[l] != 0.0).collect();
    let keep = reachable_degrees(&x_j.support(), &filter_support, l_out);
    let (y_rot, ob) = fourier_to_sh_masked(&prod, &t, l_out, |l| keep[l])?;
    work.total.conversion += ob;
    Ok((d.apply_transpose(&y_rot)?, work))
}

/// The same product through the dense path: the filter is the full
/// spherical-harmonic vector of `ê`, weighted per degree by `h`.
pub fn equiv_convolution_dense(
    x_j: &IrrepsVector,
    e: &EdgeGeometry,
    h: &FilterWeights,
    l_out: usize,
) -> Result<IrrepsVector> {
    let filter = eval_sh_vector(h.lmax(), e.direction)?;
    gaunt_weighted_tp(
        x_j,
        &filter,
        &DegreeWeights::ones(x_j.lmax()),
        &DegreeWeights::new(h.as_slice().to_vec())?,
        &DegreeWeights::ones(l_out),
        l_out,
    )
}

/// Elementwise sum of messages. Each coefficient is summed in ascending
/// order of its terms, so the result does not depend on the message order;
/// `lmax` fixes the degree of an empty sum.
pub fn aggregate_messages(messages: &[IrrepsVector], lmax: usize) -> Result<IrrepsVector> {
    for (i, m) in messages.iter().enumerate() {
        if m.lmax() != lmax {
            return Err(domain(format!("message {i} has degree {} instead of {lmax}", m.lmax())));
        }
    }
    let mut acc = IrrepsVector::zeros(lmax);
    let mut terms = Vec::with_capacity(messages.len());
    for (k, a) in acc.as_mut_slice().iter_mut().enumerate() {
        terms.clear();
        terms.extend(messages.iter().map(|m| m.as_slice()[k]));
        terms.sort_by(f64::total_cmp);
        *a = terms.iter().sum();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::gaunt_coefficient;

    #[test]
    fn frame_examples() {
        let up = edge_frame([1.0, 2.0, 3.0], [1.0, 4.5, 3.0]).unwrap();
        assert_eq!(up.rotation(), EulerAnglesZYZ::IDENTITY);
        assert!((up.distance() - 2.5).abs() < 1e-15);
        let down = edge_frame([0.0, 0.0, 0.0], [0.0, -1.0, 0.0]).unwrap();
        assert_eq!(down.rotation(), EulerAnglesZYZ { alpha: PI, beta: 0.0, gamma: 0.0 });
        assert!(matches!(edge_frame([1.0; 3], [1.0; 3]), Err(Error::DegenerateEdge(_))));
    }

    #[test]
    fn scalar_filter_scales_features() {
        let x = IrrepsVector::from_vec(1, vec![0.4, -1.0, 0.3, 2.0]).unwrap();
        let e = edge_frame([0.0; 3], [0.3, -0.2, 0.9]).unwrap();
        let h = FilterWeights::new(vec![1.7]).unwrap();
        let out = equiv_convolution(&x, &e, &h, 1).unwrap();
        for l in 0..=1usize {
            for m in -(l as i64)..=(l as i64) {
                // the filter is h_0 Y^(0), a constant 1 / (2√π)
                let expect = 1.7 * gaunt_coefficient(l, m, 0, 0, l, m) * 0.5 / PI.sqrt() * x.get(l, m);
                assert!((out.get(l, m) - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn aggregation() {
        let a = IrrepsVector::from_vec(1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(aggregate_messages(std::slice::from_ref(&a), 1).unwrap(), a);
        assert_eq!(aggregate_messages(&[a.clone(), a.scaled(-1.0)], 1).unwrap(), IrrepsVector::zeros(1));
        assert_eq!(aggregate_messages(&[], 2).unwrap(), IrrepsVector::zeros(2));
        assert!(aggregate_messages(&[a], 2).is_err());
    }
}
