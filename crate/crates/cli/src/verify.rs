use std::f64::consts::PI;
use std::fmt;

use gtp_core::basis::{
    build_conversion_table, conversion_table, fourier_to_sh, install_table, sh_to_fourier, FourierCoeffs2D,
};
use gtp_core::conv::{edge_frame, equiv_convolution, equiv_convolution_dense, FilterWeights};
use gtp_core::fft::conv2d_fft;
use gtp_core::many_body::{multi_tp, multi_tp_with, self_product, BodyOrder, MultiTpOptions, Schedule};
use gtp_core::oracle::{conv2d_direct, gaunt_tp_reference, many_body_reference, QuadratureGrid};
use gtp_core::so3::{clebsch_gordan, gaunt_coefficient, gaunt_forbidden, wigner_d_blocks, EulerAnglesZYZ};
use gtp_core::tp::gaunt_full_tp;
use gtp_core::{DegreeWeights, IrrepsVector, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn lmax(self) -> usize {
        match self {
            Level::Quick => 4,
            Level::Full => 8,
        }
    }

    fn scan_degree(self) -> usize {
        match self {
            Level::Quick => 4,
            Level::Full => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    /// Strict upper bound; `0.0` demands an exact zero residual.
    pub tolerance: f64,
    /// Error that stopped the suite early, if any.
    pub error: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        if self.tolerance == 0.0 {
            self.residual == 0.0
        } else {
            self.residual < self.tolerance
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status}  {:<36} residual {:>10.3e}  tolerance {:.1e}", self.name, self.residual, self.tolerance)?;
        match &self.error {
            Some(e) => write!(f, "  ({e})"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

struct Sampler(ChaCha8Rng);

impl Sampler {
    fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    fn vector(&mut self, l: usize) -> IrrepsVector {
        let n = (l + 1) * (l + 1);
        IrrepsVector::from_vec(l, (0..n).map(|_| self.normal()).collect()).expect("length matches degree")
    }

    fn block(&mut self, l: usize) -> IrrepsVector {
        let b: Vec<f64> = (0..2 * l + 1).map(|_| self.normal()).collect();
        IrrepsVector::from_block(l, &b).expect("block length matches degree")
    }

    fn point(&mut self) -> [f64; 3] {
        [self.normal(), self.normal(), self.normal()]
    }

    fn rotation(&mut self) -> EulerAnglesZYZ {
        let a = self.0.random::<f64>() * 2.0 * PI;
        let b = (2.0 * self.0.random::<f64>() - 1.0).clamp(-1.0, 1.0).acos();
        let c = self.0.random::<f64>() * 2.0 * PI;
        EulerAnglesZYZ::new(a, b, c).expect("angles are finite")
    }

    fn grid(&mut self, l: usize) -> FourierCoeffs2D {
        let side = 2 * l + 1;
        let data = (0..side * side).map(|_| Complex64::new(self.normal(), self.normal())).collect();
        FourierCoeffs2D::from_vec(l, data).expect("side matches degree")
    }
}

fn round_trip(s: &mut Sampler, lmax: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for l in 1..=lmax {
        let t = conversion_table(l)?;
        for _ in 0..10 {
            let x = s.vector(l);
            worst = worst.max(fourier_to_sh(&sh_to_fourier(&x, &t)?, &t, l)?.max_abs_diff(&x));
        }
    }
    Ok(worst)
}

fn sparsity(lmax: usize) -> Result<f64> {
    let mut violations = 0usize;
    for l in 0..=2 * lmax {
        let t = conversion_table(l)?;
        violations += t.y_entries().iter().chain(t.z_entries()).filter(|e| e.v.abs() != e.m.abs()).count();
    }
    Ok(violations as f64)
}

fn fft_vs_direct(s: &mut Sampler, lmax: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for l in 0..=lmax {
        let (a, b) = (s.grid(l), s.grid(l));
        worst = worst.max(conv2d_fft(&a, &b)?.max_abs_diff(&conv2d_direct(&a, &b)));
    }
    Ok(worst)
}

fn tp_vs_oracle(s: &mut Sampler, lmax: usize, pairs: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for l in 1..=lmax {
        for _ in 0..pairs {
            let (x, y) = (s.vector(l), s.vector(l));
            worst = worst.max(gaunt_full_tp(&x, &y, 2 * l)?.rel_err(&gaunt_tp_reference(&x, &y, 2 * l, None)));
        }
    }
    Ok(worst)
}

fn tp_equivariance(s: &mut Sampler, l: usize, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let d = wigner_d_blocks(2 * l, &s.rotation());
        let (x, y) = (s.vector(l), s.vector(l));
        let lhs = gaunt_full_tp(&d.apply(&x)?, &d.apply(&y)?, 2 * l)?;
        worst = worst.max(lhs.max_abs_diff(&d.apply(&gaunt_full_tp(&x, &y, 2 * l)?)?));
    }
    Ok(worst)
}

fn selection_rules(s: &mut Sampler, lmax: usize) -> Result<f64> {
    let mut violations = 0usize;
    for l1 in 0..=lmax {
        for l2 in 0..=lmax {
            let out = gaunt_full_tp(&s.block(l1), &s.block(l2), l1 + l2)?;
            violations += (0..=l1 + l2).filter(|&l| gaunt_forbidden(l1, l2, l) && !out.block_is_zero(l)).count();
        }
    }
    Ok(violations as f64)
}

fn coefficients_vs_quadrature(lmax: usize) -> f64 {
    let grid = QuadratureGrid::new(lmax, 3 * lmax);
    let mut worst: f64 = 0.0;
    for l1 in 0..=lmax {
        for l2 in 0..=lmax {
            for l in 0..=lmax {
                for m1 in -(l1 as i64)..=(l1 as i64) {
                    for m2 in -(l2 as i64)..=(l2 as i64) {
                        for m in -(l as i64)..=(l as i64) {
                            let q = grid.triple_integral(l1, m1, l2, m2, l, m);
                            worst = worst.max((gaunt_coefficient(l1, m1, l2, m2, l, m) - q).abs());
                        }
                    }
                }
            }
        }
    }
    worst
}

/// Both orthogonality sums of the Clebsch-Gordan coefficients for
/// `l1, l2 <= lmax`.
pub fn cg_orthogonality(lmax: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let ms = |l: usize| -(l as i64)..=(l as i64);
    for l1 in 0..=lmax {
        for l2 in 0..=lmax {
            let ls = l1.abs_diff(l2)..=l1 + l2;
            for l in ls.clone() {
                for lp in ls.clone() {
                    for m in ms(l) {
                        for mp in ms(lp) {
                            let s: f64 = ms(l1)
                                .flat_map(|m1| ms(l2).map(move |m2| (m1, m2)))
                                .map(|(m1, m2)| {
                                    clebsch_gordan(l1, m1, l2, m2, l, m) * clebsch_gordan(l1, m1, l2, m2, lp, mp)
                                })
                                .sum();
                            let expect = if l == lp && m == mp { 1.0 } else { 0.0 };
                            worst = worst.max((s - expect).abs());
                        }
                    }
                }
            }
            for m1 in ms(l1) {
                for m2 in ms(l2) {
                    for m1p in ms(l1) {
                        for m2p in ms(l2) {
                            let s: f64 = ls
                                .clone()
                                .flat_map(|l| ms(l).map(move |m| (l, m)))
                                .map(|(l, m)| {
                                    clebsch_gordan(l1, m1, l2, m2, l, m) * clebsch_gordan(l1, m1p, l2, m2p, l, m)
                                })
                                .sum();
                            let expect = if m1 == m1p && m2 == m2p { 1.0 } else { 0.0 };
                            worst = worst.max((s - expect).abs());
                        }
                    }
                }
            }
        }
    }
    worst
}

fn wigner_homomorphism(s: &mut Sampler, lmax: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (g1, g2) = (s.rotation(), s.rotation());
        let x = s.vector(lmax);
        let lhs = wigner_d_blocks(lmax, &g1).apply(&wigner_d_blocks(lmax, &g2).apply(&x)?)?;
        let rhs = wigner_d_blocks(lmax, &g1.compose(&g2)).apply(&x)?;
        worst = worst.max(lhs.max_abs_diff(&rhs));
        let d = wigner_d_blocks(lmax, &g1);
        worst = worst.max(d.apply_transpose(&d.apply(&x)?)?.max_abs_diff(&x));
    }
    Ok(worst)
}

fn filter(s: &mut Sampler, l: usize) -> Result<FilterWeights> {
    FilterWeights::new((0..=l).map(|_| s.normal()).collect())
}

fn conv_sparse_vs_dense(s: &mut Sampler, lmax: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for l in 1..=lmax {
        for _ in 0..5 {
            let e = edge_frame(s.point(), s.point())?;
            let (x, h) = (s.vector(l), filter(s, l)?);
            let fast = equiv_convolution(&x, &e, &h, 2 * l)?;
            worst = worst.max(fast.rel_err(&equiv_convolution_dense(&x, &e, &h, 2 * l)?));
        }
    }
    Ok(worst)
}

fn conv_frame_independence(s: &mut Sampler, l: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let g = s.rotation();
        let d = wigner_d_blocks(2 * l, &g);
        let (ri, rj) = (s.point(), s.point());
        let (x, h) = (s.vector(l), filter(s, l)?);
        let out = equiv_convolution(&x, &edge_frame(ri, rj)?, &h, 2 * l)?;
        let moved = equiv_convolution(&d.apply(&x)?, &edge_frame(g.rotate(ri), g.rotate(rj))?, &h, 2 * l)?;
        worst = worst.max(moved.max_abs_diff(&d.apply(&out)?));
    }
    Ok(worst)
}

fn many_body_vs_reference(s: &mut Sampler, max_n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 2..=max_n {
        let ops: Vec<_> = (0..n).map(|_| s.vector(2)).collect();
        worst = worst.max(multi_tp(&ops, 2 * n)?.rel_err(&many_body_reference(&ops, 2 * n)));
    }
    Ok(worst)
}

fn tree_vs_fold(s: &mut Sampler, lmax: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let fold = MultiTpOptions { schedule: Schedule::LeftFold, fused: false };
    for n in 2..=8usize {
        for l in 1..=lmax {
            let ops: Vec<_> = (0..n).map(|_| s.vector(l)).collect();
            let a = multi_tp(&ops, n * l)?;
            worst = worst.max(a.rel_err(&multi_tp_with(&ops, n * l, fold)?.value));
        }
    }
    Ok(worst)
}

fn self_product_equivariance(s: &mut Sampler, l: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let nu = BodyOrder::new(3)?;
    for _ in 0..5 {
        let g = s.rotation();
        let x = s.vector(l);
        let w = DegreeWeights::ones(l);
        let lhs = self_product(&wigner_d_blocks(l, &g).apply(&x)?, nu, &w, 3 * l)?;
        let rhs = wigner_d_blocks(3 * l, &g).apply(&self_product(&x, nu, &w, 3 * l)?)?;
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    Ok(worst)
}

/// Replaces the table of degree `lmax` in the process-wide registry with one
/// whose largest degree-one entry has its sign flipped.
pub fn inject_table_fault(lmax: usize) -> Result<()> {
    let t = build_conversion_table(lmax)?;
    let i = t
        .y_entries()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.l == 1)
        .max_by(|a, b| a.1.value.norm().total_cmp(&b.1.value.norm()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    install_table(t.with_negated_y_entry(i));
    Ok(())
}

/// Runs every property suite at `level`. With `inject_fault` the conversion
/// table of the level's top degree is corrupted first and restored afterwards.
pub fn cmd_verify(level: Level, inject_fault: bool) -> Result<Report> {
    let l = level.lmax();
    if inject_fault {
        inject_table_fault(l)?;
    }
    let report = run_suites(level);
    if inject_fault {
        install_table(build_conversion_table(l)?);
    }
    Ok(report)
}

fn run_suites(level: Level) -> Report {
    let mut s = Sampler(ChaCha8Rng::seed_from_u64(0x0067_6175_6e74));
    let l = level.lmax();
    let full = level == Level::Full;
    let mut checks = Vec::new();
    let mut push = |name, residual: Result<f64>, tolerance| {
        let (residual, error) = match residual {
            Ok(r) => (r, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        checks.push(Check { name, residual, tolerance, error });
    };

    push("conversion round trip", round_trip(&mut s, l), 1e-10);
    push("table sparsity v = ±m", sparsity(l), 0.0);
    push("fft convolution vs direct sum", fft_vs_direct(&mut s, l), 1e-11);
    push("gaunt product vs oracle", tp_vs_oracle(&mut s, l, if full { 10 } else { 5 }), 1e-9);
    push("gaunt product equivariance", tp_equivariance(&mut s, l, 10), 1e-8);
    push("selection-rule zero blocks", selection_rules(&mut s, level.scan_degree()), 0.0);
    push("gaunt coefficients vs quadrature", Ok(coefficients_vs_quadrature(if full { 6 } else { 3 })), 1e-10);
    push("clebsch-gordan orthogonality", Ok(cg_orthogonality(3)), 1e-11);
    push("wigner-d homomorphism", wigner_homomorphism(&mut s, l), 1e-10);
    push("convolution sparse vs dense", conv_sparse_vs_dense(&mut s, l), 1e-9);
    push("convolution frame independence", conv_frame_independence(&mut s, l), 1e-8);
    push("many-body vs sequential oracle", many_body_vs_reference(&mut s, if full { 4 } else { 3 }), 1e-9);
    push("many-body tree vs left fold", tree_vs_fold(&mut s, if full { 4 } else { 2 }), 1e-9);
    push("self-product equivariance", self_product_equivariance(&mut s, l.min(4)), 1e-8);
    Report { checks }
}
