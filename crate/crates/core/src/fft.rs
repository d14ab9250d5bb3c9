//! Linear 2D convolution of Fourier coefficient grids through zero-padded FFTs.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::basis::FourierCoeffs2D;
use crate::error::{domain, Result};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static P: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    P.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = planner().lock().expect("FFT planner poisoned");
    if inverse {
        p.plan_fft_inverse(n)
    } else {
        p.plan_fft_forward(n)
    }
}

/// Transform length per axis for a linear convolution of two degree-`l` grids.
pub fn fft_pad_size(l: usize) -> usize {
    (4 * l + 1).next_power_of_two()
}

/// Counted work of one `p × p` transform: `N log2 N` with `N = p²`.
pub fn fft2_work(p: usize) -> u64 {
    let n = (p * p) as u64;
    n * u64::from(n.max(1).ilog2())
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], p: usize) {
    for i in 0..p {
        for j in 0..p {
            dst[j * p + i] = src[i * p + j];
        }
    }
}

/// Frequency-domain image of a grid on a `p × p` periodic lattice, stored
/// transposed. `p` must be at least `2 L + 1`.
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    p: usize,
    data: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn forward(grid: &FourierCoeffs2D, p: usize) -> Self {
        debug_assert!(p > 2 * grid.lmax());
        let mut buf = vec![Complex64::new(0.0, 0.0); p * p];
        let l = grid.lmax() as i64;
        let pi = p as i64;
        for u in -l..=l {
            let row = u.rem_euclid(pi) as usize * p;
            for v in -l..=l {
                buf[row + v.rem_euclid(pi) as usize] = grid.get(u, v);
            }
        }
        let fft = plan(p, false);
        fft.process(&mut buf);
        let mut t = vec![Complex64::new(0.0, 0.0); p * p];
        transpose(&buf, &mut t, p);
        fft.process(&mut t);
        Self { p, data: t }
    }

    pub(crate) fn multiply(&mut self, other: &Self) {
        debug_assert_eq!(self.p, other.p);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a *= b;
        }
    }

    /// Coefficients with `|u|, |v| ≤ l_out` of the inverse transform.
    pub(crate) fn inverse(mut self, l_out: usize) -> FourierCoeffs2D {
        let p = self.p;
        let ifft = plan(p, true);
        ifft.process(&mut self.data);
        let mut buf = vec![Complex64::new(0.0, 0.0); p * p];
        transpose(&self.data, &mut buf, p);
        ifft.process(&mut buf);
        let scale = 1.0 / (p * p) as f64;
        let mut out = FourierCoeffs2D::zeros(l_out);
        let l = l_out as i64;
        let pi = p as i64;
        for u in -l..=l {
            let row = u.rem_euclid(pi) as usize * p;
            for v in -l..=l {
                out.set(u, v, buf[row + v.rem_euclid(pi) as usize] * scale);
            }
        }
        out
    }
}

/// Full linear convolution `c_{u,v} = Σ a_{u1,v1} b_{u-u1,v-v1}` of two
/// degree-`L` grids; the result has degree `2L`.
pub fn conv2d_fft(a: &FourierCoeffs2D, b: &FourierCoeffs2D) -> Result<FourierCoeffs2D> {
    conv2d_fft_counted(a, b).map(|(c, _)| c)
}

/// [`conv2d_fft`] with counted work: three transforms plus the pointwise product.
pub fn conv2d_fft_counted(a: &FourierCoeffs2D, b: &FourierCoeffs2D) -> Result<(FourierCoeffs2D, u64)> {
    if a.lmax() != b.lmax() {
        return Err(domain(format!("convolution of grids with degrees {} and {}", a.lmax(), b.lmax())));
    }
    let l = a.lmax();
    let p = fft_pad_size(l);
    let mut sa = Spectrum::forward(a, p);
    let sb = Spectrum::forward(b, p);
    sa.multiply(&sb);
    Ok((sa.inverse(2 * l), 3 * fft2_work(p) + (p * p) as u64))
}
