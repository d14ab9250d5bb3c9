use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::so3::{eval_real_sh, SphericalPoint};

/// Gauss–Legendre nodes and weights on `[-1, 1]` from the eigen-decomposition
/// of the Jacobi matrix.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Product grid on the sphere: Gauss–Legendre in `cos θ` times the trapezoid
/// rule in `ψ`, with every real harmonic up to `lmax` tabulated at each node.
/// Integrates products whose degrees sum to at most `band` exactly.
pub struct QuadratureGrid {
    lmax: usize,
    weights: Vec<f64>,
    /// `values[node][l² + m + l]`
    values: Vec<Vec<f64>>,
}

impl QuadratureGrid {
    pub fn new(lmax: usize, band: usize) -> Self {
        let (cos_nodes, gl_w) = gauss_legendre(2 * band + 1);
        let n_psi = 4 * band + 1;
        let mut weights = Vec::new();
        let mut values = Vec::new();
        for (&c, &w) in cos_nodes.iter().zip(&gl_w) {
            let theta = c.clamp(-1.0, 1.0).acos();
            for k in 0..n_psi {
                let psi = 2.0 * PI * k as f64 / n_psi as f64;
                let p = SphericalPoint::new(theta, psi).expect("node lies on the sphere");
                let mut row = Vec::with_capacity((lmax + 1) * (lmax + 1));
                for l in 0..=lmax {
                    for m in -(l as i64)..=(l as i64) {
                        row.push(eval_real_sh(l, m, p).expect("|m| <= l"));
                    }
                }
                values.push(row);
                weights.push(w * 2.0 * PI / n_psi as f64);
            }
        }
        Self { lmax, weights, values }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    /// `∫ Y^(l1)_m1 Y^(l2)_m2 Y^(l)_m dΩ` on this grid.
    pub fn triple_integral(&self, l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> f64 {
        let at = |l: usize, m: i64| (l * l) as i64 as usize + (m + l as i64) as usize;
        let (a, b, c) = (at(l1, m1), at(l2, m2), at(l, m));
        self.weights.iter().zip(&self.values).map(|(w, row)| w * row[a] * row[b] * row[c]).sum()
    }
}

/// The real Gaunt coefficient by direct numerical integration.
pub fn gaunt_coeff_quadrature(l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> f64 {
    let lmax = l1.max(l2).max(l);
    QuadratureGrid::new(lmax, l1 + l2 + l).triple_integral(l1, m1, l2, m2, l, m)
}
