use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::fourier::FourierCoeffs2D;
use crate::error::{domain, Error, Result};
use crate::irreps::{dim, index, IrrepsVector};
use crate::so3::sh::{theta_factor_all, theta_factor_index};

/// Largest degree accepted for operands of the public products.
pub const MAX_INPUT_DEGREE: usize = 32;

/// Largest table degree. Products of two degree-32 operands carry degree-64
/// content, so tables go twice as far as inputs.
pub const MAX_TABLE_DEGREE: usize = 2 * MAX_INPUT_DEGREE;

/// Stored coefficients with smaller magnitude are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Back-conversion fails when the discarded imaginary part exceeds this
/// (relative to `max(1, max |x|)`).
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-8;

/// One sparse coefficient linking `(l, m)` to the Fourier mode `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub l: u16,
    pub m: i16,
    pub u: i16,
    pub v: i16,
    pub value: Complex64,
}

/// Sparse change of basis between real spherical harmonics up to degree `L`
/// and the 2D Fourier modes `e^{i(uθ + vψ)}` on the torus extension
/// `F(2π - θ, ψ + π) = F(θ, ψ)`.
///
/// `y` entries expand each `Y^(l)_m` exactly (`|u| ≤ l`, `v = ±m`). `z` entries
/// project a Fourier series back onto `Y^(l)_m` by integrating over the sphere
/// and cover `|u| ≤ L`, so products of expansions are recovered exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ConversionTable {
    lmax: usize,
    y: Vec<TableEntry>,
    z: Vec<TableEntry>,
    /// `y[y_deg[l]..y_deg[l + 1]]` holds the entries of degree `l`.
    y_deg: Vec<usize>,
    /// `z[z_lm[i]..z_lm[i + 1]]` holds the entries of flattened index `i`.
    z_lm: Vec<usize>,
    /// Dense `(l, u)` values of the `m = 0, v = 0` entries.
    m0: Vec<Complex64>,
}

/// Fourier coefficients `a_u`, `u ∈ [-l, l]`, of the theta factor of
/// `Y^(l)_{±m}` for every `l ≥ m`, read off a uniform torus sampling.
fn theta_series(lmax: usize) -> Vec<Vec<Vec<f64>>> {
    let n = 4 * lmax + 4;
    let samples: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            theta_factor_all(lmax, t.cos(), t.sin())
        })
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);

    // series[m][l - m][u + l], real for even m and imaginary for odd m; only
    // the real or imaginary magnitude is kept
    let mut series = Vec::with_capacity(lmax + 1);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..=lmax {
        let mut per_l = Vec::with_capacity(lmax + 1 - m);
        for l in m..=lmax {
            let idx = theta_factor_index(l, m);
            for (b, s) in buf.iter_mut().zip(&samples) {
                *b = Complex64::new(s[idx], 0.0);
            }
            fft.process(&mut buf);
            let li = l as i64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let coeffs = (-li..=li)
                .map(|u| {
                    if (u - li).rem_euclid(2) != 0 {
                        return 0.0;
                    }
                    let at = |k: i64| buf[k.rem_euclid(n as i64) as usize] / n as f64;
                    // a_{-u} = (-1)^m a_u; average the two estimates
                    let a = 0.5 * (at(u) + at(-u) * sign);
                    if m % 2 == 0 {
                        a.re
                    } else {
                        a.im
                    }
                })
                .collect();
            per_l.push(coeffs);
        }
        series.push(per_l);
    }
    series
}

/// Coefficient of `e^{ivψ}` in the azimuthal factor of `Y^(l)_m`.
fn psi_expansion(m: i64) -> Vec<(i64, Complex64)> {
    let k = m.abs();
    match m {
        0 => vec![(0, Complex64::new(1.0, 0.0))],
        m if m > 0 => vec![(-k, Complex64::new(0.5, 0.0)), (k, Complex64::new(0.5, 0.0))],
        _ => vec![(-k, Complex64::new(0.0, 0.5)), (k, Complex64::new(0.0, -0.5))],
    }
}

/// `∫_0^{2π} e^{ivψ} Φ_m(ψ) dψ` for the azimuthal factor `Φ_m`.
fn psi_projection(m: i64) -> Vec<(i64, Complex64)> {
    let k = m.abs();
    match m {
        0 => vec![(0, Complex64::new(2.0 * PI, 0.0))],
        m if m > 0 => vec![(-k, Complex64::new(PI, 0.0)), (k, Complex64::new(PI, 0.0))],
        _ => vec![(-k, Complex64::new(0.0, -PI)), (k, Complex64::new(0.0, PI))],
    }
}

/// `∫_0^π e^{inθ} dθ`.
fn exp_integral(n: i64) -> Complex64 {
    if n == 0 {
        Complex64::new(PI, 0.0)
    } else if n % 2 != 0 {
        Complex64::new(0.0, 2.0 / n as f64)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// `∫_0^π e^{inθ} sin θ dθ`.
fn exp_sin_integral(n: i64) -> Complex64 {
    (exp_integral(n + 1) - exp_integral(n - 1)) / Complex64::new(0.0, 2.0)
}

fn entry(l: usize, m: i64, u: i64, v: i64, value: Complex64) -> TableEntry {
    TableEntry { l: l as u16, m: m as i16, u: u as i16, v: v as i16, value }
}

/// Builds the conversion table of degree `lmax`.
pub fn build_conversion_table(lmax: usize) -> Result<ConversionTable> {
    if lmax > MAX_TABLE_DEGREE {
        return Err(Error::Capacity { degree: lmax, max: MAX_TABLE_DEGREE });
    }
    let series = theta_series(lmax);
    let li = lmax as i64;
    let mut y = Vec::new();
    let mut z = Vec::new();
    let mut theta_proj = vec![Complex64::new(0.0, 0.0); 2 * lmax + 1];
    for l in 0..=lmax {
        let l_i = l as i64;
        for m in -l_i..=l_i {
            let a = &series[m.unsigned_abs() as usize][l - m.unsigned_abs() as usize];

            let psi_y = psi_expansion(m);
            for u in -l_i..=l_i {
                let au = a[(u + l_i) as usize];
                for &(v, c) in &psi_y {
                    let val = if m.abs() % 2 == 0 { c * au } else { c * Complex64::new(0.0, au) };
                    if val.norm() >= PRUNE_THRESHOLD {
                        y.push(entry(l, m, u, v, val));
                    }
                }
            }

            for (slot, u) in theta_proj.iter_mut().zip(-li..=li) {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &ak) in (-l_i..=l_i).zip(a) {
                    if ak != 0.0 {
                        acc += exp_sin_integral(u + k) * ak;
                    }
                }
                *slot = if m.abs() % 2 == 0 { acc } else { acc * Complex64::new(0.0, 1.0) };
            }
            let psi_z = psi_projection(m);
            for (&t, u) in theta_proj.iter().zip(-li..=li) {
                for &(v, c) in &psi_z {
                    let val = t * c;
                    if val.norm() >= PRUNE_THRESHOLD {
                        z.push(entry(l, m, u, v, val));
                    }
                }
            }
        }
    }
    // y is generated per (l, m) with v inner; restore (u, v) order within (l, m)
    y.sort_by_key(|e| (e.l, e.m, e.u, e.v));
    ConversionTable::from_entries(lmax, y, z)
}

impl ConversionTable {
    /// Assembles a table from raw entries, checking ranges, ordering and the
    /// `v = ±m` sparsity pattern.
    pub fn from_entries(lmax: usize, y: Vec<TableEntry>, z: Vec<TableEntry>) -> Result<Self> {
        if lmax > MAX_TABLE_DEGREE {
            return Err(Error::Capacity { degree: lmax, max: MAX_TABLE_DEGREE });
        }
        for (name, list, u_bound_is_l) in [("y", &y, true), ("z", &z, false)] {
            let mut prev = None;
            for e in list.iter() {
                let (l, m, u, v) = (e.l as i64, e.m as i64, e.u as i64, e.v as i64);
                let ub = if u_bound_is_l { l } else { lmax as i64 };
                if l > lmax as i64 || m.abs() > l || u.abs() > ub || v.abs() != m.abs() {
                    return Err(Error::Format(format!("{name} entry ({l}, {m}, {u}, {v}) out of range")));
                }
                if !e.value.re.is_finite() || !e.value.im.is_finite() {
                    return Err(Error::Format(format!("{name} entry ({l}, {m}, {u}, {v}) is not finite")));
                }
                let key = (l, m, u, v);
                if prev.is_some_and(|p| p >= key) {
                    return Err(Error::Format(format!("{name} entries are not strictly ordered")));
                }
                prev = Some(key);
            }
        }

        let mut y_deg = vec![0usize; lmax + 2];
        for e in &y {
            y_deg[e.l as usize + 1] += 1;
        }
        for l in 0..=lmax {
            y_deg[l + 1] += y_deg[l];
        }
        let mut z_lm = vec![0usize; dim(lmax) + 1];
        for e in &z {
            z_lm[index(e.l as usize, e.m as i64) + 1] += 1;
        }
        for i in 0..dim(lmax) {
            z_lm[i + 1] += z_lm[i];
        }
        let side = 2 * lmax + 1;
        let mut m0 = vec![Complex64::new(0.0, 0.0); (lmax + 1) * side];
        for e in y.iter().filter(|e| e.m == 0) {
            m0[e.l as usize * side + (e.u as i64 + lmax as i64) as usize] = e.value;
        }
        Ok(Self { lmax, y, z, y_deg, z_lm, m0 })
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// SH→Fourier entries ordered by `(l, m, u, v)`.
    pub fn y_entries(&self) -> &[TableEntry] {
        &self.y
    }

    /// Fourier→SH entries ordered by `(l, m, u, v)`.
    pub fn z_entries(&self) -> &[TableEntry] {
        &self.z
    }

    /// Copy with the sign of one `y` entry flipped, for mutation testing of
    /// verification suites.
    pub fn with_negated_y_entry(&self, i: usize) -> Self {
        let mut y = self.y.clone();
        let k = i % y.len();
        y[k].value = -y[k].value;
        Self::from_entries(self.lmax, y, self.z.clone()).expect("sign flip keeps the table well formed")
    }
}

/// `x* = Σ x^(l)_m y^{l,m}` on a grid of degree `x.lmax()`, with the number of
/// multiply-adds performed.
pub fn sh_to_fourier_counted(x: &IrrepsVector, t: &ConversionTable) -> Result<(FourierCoeffs2D, u64)> {
    if x.lmax() > t.lmax {
        return Err(domain(format!("vector degree {} exceeds table degree {}", x.lmax(), t.lmax)));
    }
    let mut out = FourierCoeffs2D::zeros(x.lmax());
    let entries = &t.y[..t.y_deg[x.lmax() + 1]];
    let xs = x.as_slice();
    let grid = out.as_mut_slice();
    let side = 2 * x.lmax() as i64 + 1;
    let off = x.lmax() as i64;
    for e in entries {
        let c = xs[index(e.l as usize, e.m as i64)];
        let o = ((e.u as i64 + off) * side + e.v as i64 + off) as usize;
        grid[o] += e.value * c;
    }
    Ok((out, entries.len() as u64))
}

/// Fourier coefficients of the spherical function with SH coefficients `x`.
///
/// The grid has degree `x.lmax()`: a degree-`l` harmonic only reaches modes
/// with `|u|, |v| ≤ l`.
pub fn sh_to_fourier(x: &IrrepsVector, t: &ConversionTable) -> Result<FourierCoeffs2D> {
    sh_to_fourier_counted(x, t).map(|(f, _)| f)
}

/// SH coefficients up to `l_out` of the function with Fourier coefficients `f`.
pub fn fourier_to_sh(f: &FourierCoeffs2D, t: &ConversionTable, l_out: usize) -> Result<IrrepsVector> {
    fourier_to_sh_masked(f, t, l_out, |_| true).map(|(x, _)| x)
}

/// [`fourier_to_sh`] with the multiply-add count.
pub fn fourier_to_sh_counted(f: &FourierCoeffs2D, t: &ConversionTable, l_out: usize) -> Result<(IrrepsVector, u64)> {
    fourier_to_sh_masked(f, t, l_out, |_| true)
}

/// Back-conversion that leaves every degree rejected by `keep` exactly zero.
pub(crate) fn fourier_to_sh_masked(
    f: &FourierCoeffs2D,
    t: &ConversionTable,
    l_out: usize,
    keep: impl Fn(usize) -> bool,
) -> Result<(IrrepsVector, u64)> {
    if f.lmax() > t.lmax {
        return Err(domain(format!("grid degree {} exceeds table degree {}", f.lmax(), t.lmax)));
    }
    if l_out > f.lmax() {
        return Err(domain(format!("output degree {l_out} exceeds grid degree {}", f.lmax())));
    }
    let mut out = IrrepsVector::zeros(l_out);
    let fl = f.lmax() as i64;
    let mut residue: f64 = 0.0;
    let mut ops = 0u64;
    for l in 0..=l_out {
        if !keep(l) {
            continue;
        }
        for m in -(l as i64)..=(l as i64) {
            let i = index(l, m);
            let mut acc = Complex64::new(0.0, 0.0);
            for e in &t.z[t.z_lm[i]..t.z_lm[i + 1]] {
                let (u, v) = (e.u as i64, e.v as i64);
                if u.abs() > fl || v.abs() > fl {
                    continue;
                }
                acc += f.get(u, v) * e.value;
                ops += 1;
            }
            residue = residue.max(acc.im.abs());
            out.as_mut_slice()[i] = acc.re;
        }
    }
    let scale = out.max_abs().max(1.0);
    if residue > IMAG_RESIDUE_LIMIT * scale {
        return Err(Error::Numerical(format!(
            "back-conversion left an imaginary part of {residue:e}; the grid does not describe a real function"
        )));
    }
    Ok((out, ops))
}

/// Fourier coefficients of a filter aligned with the `y` axis, given only its
/// `m = 0` coefficients `filter[l]`, `l ∈ [0, lmax]`. The result lives on the
/// `v = 0` column.
pub fn sh_to_fourier_sparse_filter(filter: &[f64], lmax: usize, t: &ConversionTable) -> Result<FourierCoeffs2D> {
    sh_to_fourier_sparse_filter_counted(filter, lmax, t).map(|(f, _)| f)
}

/// [`sh_to_fourier_sparse_filter`] with the multiply-add count.
pub fn sh_to_fourier_sparse_filter_counted(
    filter: &[f64],
    lmax: usize,
    t: &ConversionTable,
) -> Result<(FourierCoeffs2D, u64)> {
    if filter.len() != lmax + 1 {
        return Err(domain(format!("filter of degree {lmax} needs {} entries, got {}", lmax + 1, filter.len())));
    }
    if lmax > t.lmax {
        return Err(domain(format!("filter degree {lmax} exceeds table degree {}", t.lmax)));
    }
    let mut out = FourierCoeffs2D::zeros(lmax);
    let side = 2 * t.lmax + 1;
    let li = lmax as i64;
    let mut ops = 0u64;
    for u in -li..=li {
        let col = (u + t.lmax as i64) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, &h) in filter.iter().enumerate() {
            acc += t.m0[l * side + col] * h;
            ops += 1;
        }
        out.set(u, 0, acc);
    }
    Ok((out, ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::sh::{eval_sh_vector, UnitVector3};

    #[test]
    fn degree_zero_table() {
        let t = build_conversion_table(0).unwrap();
        assert_eq!(t.y_entries().len(), 1);
        let e = t.y_entries()[0];
        assert_eq!((e.l, e.m, e.u, e.v), (0, 0, 0, 0));
        assert!((e.value.re - 0.5 / PI.sqrt()).abs() < 1e-15 && e.value.im == 0.0);
    }

    #[test]
    fn sparsity_degree_one() {
        let t = build_conversion_table(1).unwrap();
        for e in t.y_entries() {
            assert_eq!(e.v.abs(), e.m.abs());
            assert!(e.v.abs() <= 1);
        }
    }

    #[test]
    fn capacity() {
        assert!(matches!(build_conversion_table(MAX_TABLE_DEGREE + 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn y_axis_column_only() {
        let t = build_conversion_table(3).unwrap();
        let x = IrrepsVector::from_block(1, &[0.0, 1.0, 0.0]).unwrap();
        let f = sh_to_fourier(&x, &t).unwrap();
        for u in -1..=1i64 {
            for v in -1..=1i64 {
                if v != 0 {
                    assert_eq!(f.get(u, v), Complex64::new(0.0, 0.0));
                }
            }
        }
        assert!(f.get(1, 0).norm() > 0.1);
    }

    #[test]
    fn round_trip_small() {
        let t = build_conversion_table(4).unwrap();
        let data: Vec<f64> = (0..dim(4)).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let x = IrrepsVector::from_vec(4, data).unwrap();
        let back = fourier_to_sh(&sh_to_fourier(&x, &t).unwrap(), &t, 4).unwrap();
        assert!(back.max_abs_diff(&x) < 1e-13, "{}", back.max_abs_diff(&x));
    }

    #[test]
    fn sparse_filter_matches_dense() {
        let t = build_conversion_table(6).unwrap();
        let full = eval_sh_vector(6, UnitVector3::new(0.0, 1.0, 0.0).unwrap()).unwrap();
        let h: Vec<f64> = (0..=6).map(|l| full.get(l, 0)).collect();
        let sparse = sh_to_fourier_sparse_filter(&h, 6, &t).unwrap();
        let dense = sh_to_fourier(&full, &t).unwrap();
        assert_eq!(sparse, dense);
    }

    #[test]
    fn complex_grid_is_rejected() {
        let t = build_conversion_table(2).unwrap();
        let mut f = FourierCoeffs2D::zeros(2);
        f.set(1, 0, Complex64::new(0.0, 1.0));
        f.set(-1, 0, Complex64::new(0.0, 1.0));
        assert!(matches!(fourier_to_sh(&f, &t, 2), Err(Error::Numerical(_))));
    }
}
