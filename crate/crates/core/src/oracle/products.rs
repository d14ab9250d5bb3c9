use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::basis::FourierCoeffs2D;
use crate::irreps::{DegreeWeights, IrrepsVector};
use crate::so3::wigner3j::triangle;
use crate::so3::{gaunt_coefficient, gaunt_forbidden, real_clebsch_gordan};

type Block = Arc<Vec<f64>>;
type BlockCache = RwLock<HashMap<(usize, usize, usize), Block>>;

fn gaunt_blocks() -> &'static BlockCache {
    static C: OnceLock<BlockCache> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Dense `G[m1][m2][m]` for one degree triple, memoized.
fn gaunt_block(l1: usize, l2: usize, l: usize) -> Block {
    let key = (l1, l2, l);
    if let Some(b) = gaunt_blocks().read().expect("gaunt memo poisoned").get(&key) {
        return Arc::clone(b);
    }
    let mut v = Vec::with_capacity((2 * l1 + 1) * (2 * l2 + 1) * (2 * l + 1));
    for m1 in -(l1 as i64)..=(l1 as i64) {
        for m2 in -(l2 as i64)..=(l2 as i64) {
            for m in -(l as i64)..=(l as i64) {
                v.push(gaunt_coefficient(l1, m1, l2, m2, l, m));
            }
        }
    }
    let b = Arc::new(v);
    gaunt_blocks().write().expect("gaunt memo poisoned").insert(key, Arc::clone(&b));
    b
}

/// `out^(l)_m = Σ_{l1,l2,m1,m2} w_{l1} w_{l2} w_l G^{(l,m)}_{(l1,m1)(l2,m2)} x^(l1)_m1 y^(l2)_m2`,
/// with the number of multiply-adds.
///
/// Degree triples excluded by parity or the triangle rule are skipped, which
/// leaves their output blocks exactly zero.
pub fn gaunt_tp_reference_counted(
    x: &IrrepsVector,
    y: &IrrepsVector,
    l_out: usize,
    weights: Option<(&DegreeWeights, &DegreeWeights, &DegreeWeights)>,
) -> (IrrepsVector, u64) {
    let w = |which: usize, l: usize| weights.map_or(1.0, |ws| [ws.0, ws.1, ws.2][which].get(l));
    let mut out = IrrepsVector::zeros(l_out);
    let mut ops = 0u64;
    for l1 in 0..=x.lmax() {
        for l2 in 0..=y.lmax() {
            for l in 0..=l_out {
                if gaunt_forbidden(l1, l2, l) {
                    continue;
                }
                let g = gaunt_block(l1, l2, l);
                let scale = w(0, l1) * w(1, l2) * w(2, l);
                let (n2, n) = (2 * l2 + 1, 2 * l + 1);
                for (i1, &a) in x.block(l1).iter().enumerate() {
                    for (i2, &b) in y.block(l2).iter().enumerate() {
                        let row = &g[(i1 * n2 + i2) * n..(i1 * n2 + i2 + 1) * n];
                        for (k, &c) in row.iter().enumerate() {
                            out.block_mut(l)[k] += scale * c * a * b;
                        }
                        ops += n as u64;
                    }
                }
            }
        }
    }
    (out, ops)
}

pub fn gaunt_tp_reference(
    x: &IrrepsVector,
    y: &IrrepsVector,
    l_out: usize,
    weights: Option<(&DegreeWeights, &DegreeWeights, &DegreeWeights)>,
) -> IrrepsVector {
    gaunt_tp_reference_counted(x, y, l_out, weights).0
}

/// `out^(l)_m = Σ C^{(l,m)}_{(l1,m1)(l2,m2)} x^(l1)_m1 y^(l2)_m2` over every
/// coupling allowed by the triangle rule, in the real basis, with the number
/// of multiply-adds.
pub fn cg_tp_reference_counted(x: &IrrepsVector, y: &IrrepsVector, l_out: usize) -> (IrrepsVector, u64) {
    let mut out = IrrepsVector::zeros(l_out);
    let mut ops = 0u64;
    for l1 in 0..=x.lmax() {
        for l2 in 0..=y.lmax() {
            for l in 0..=l_out {
                if !triangle(l1, l2, l) {
                    continue;
                }
                for m1 in -(l1 as i64)..=(l1 as i64) {
                    for m2 in -(l2 as i64)..=(l2 as i64) {
                        let ab = x.get(l1, m1) * y.get(l2, m2);
                        for m in -(l as i64)..=(l as i64) {
                            let c = real_clebsch_gordan(l1, m1, l2, m2, l, m);
                            let v = out.get(l, m) + c * ab;
                            out.set(l, m, v);
                            ops += 1;
                        }
                    }
                }
            }
        }
    }
    (out, ops)
}

pub fn cg_tp_reference(x: &IrrepsVector, y: &IrrepsVector, l_out: usize) -> IrrepsVector {
    cg_tp_reference_counted(x, y, l_out).0
}

/// `c_{u,v} = Σ_{u1+u2=u} Σ_{v1+v2=v} a_{u1,v1} b_{u2,v2}`; the result has
/// degree `a.lmax() + b.lmax()`.
pub fn conv2d_direct(a: &FourierCoeffs2D, b: &FourierCoeffs2D) -> FourierCoeffs2D {
    let (la, lb) = (a.lmax() as i64, b.lmax() as i64);
    let mut out = FourierCoeffs2D::zeros((la + lb) as usize);
    for u1 in -la..=la {
        for v1 in -la..=la {
            let x = a.get(u1, v1);
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for u2 in -lb..=lb {
                for v2 in -lb..=lb {
                    let cur = out.get(u1 + u2, v1 + v2);
                    out.set(u1 + u2, v1 + v2, cur + x * b.get(u2, v2));
                }
            }
        }
    }
    out
}

/// Left fold of [`gaunt_tp_reference`] at full intermediate bandwidth,
/// truncated to `l_out` at the end.
pub fn many_body_reference(operands: &[IrrepsVector], l_out: usize) -> IrrepsVector {
    let mut acc = operands[0].clone();
    for x in &operands[1..] {
        let l = acc.lmax() + x.lmax();
        acc = gaunt_tp_reference(&acc, x, l, None);
    }
    acc.resized(l_out)
}
