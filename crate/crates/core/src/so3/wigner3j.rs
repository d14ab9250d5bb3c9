//! Wigner 3-j symbols in exact rational arithmetic.
//!
//! The Racah sum is accumulated as a big rational and combined with the
//! factorial prefactor before a single square root is taken in floating point,
//! so precision does not degrade with degree.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn factorials() -> &'static RwLock<Vec<BigInt>> {
    static F: OnceLock<RwLock<Vec<BigInt>>> = OnceLock::new();
    F.get_or_init(|| RwLock::new(vec![BigInt::one()]))
}

fn factorial(n: usize) -> BigInt {
    {
        let table = factorials().read().expect("factorial table poisoned");
        if let Some(v) = table.get(n) {
            return v.clone();
        }
    }
    let mut table = factorials().write().expect("factorial table poisoned");
    while table.len() <= n {
        let k = table.len();
        let next = &table[k - 1] * BigInt::from(k);
        table.push(next);
    }
    table[n].clone()
}

type Key = (u32, u32, u32, i32, i32);

fn cache() -> &'static RwLock<HashMap<Key, f64>> {
    static C: OnceLock<RwLock<HashMap<Key, f64>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

pub(crate) fn triangle(l1: usize, l2: usize, l3: usize) -> bool {
    l3 >= l1.abs_diff(l2) && l3 <= l1 + l2
}

/// Wigner 3-j symbol `(l1 l2 l3; m1 m2 m3)`.
///
/// Returns zero when `m1 + m2 + m3 ≠ 0`, when the triangle rule fails, or
/// when some `|m_i| > l_i`.
pub fn wigner_3j(l1: usize, l2: usize, l3: usize, m1: i64, m2: i64, m3: i64) -> f64 {
    if m1 + m2 + m3 != 0
        || m1.unsigned_abs() as usize > l1
        || m2.unsigned_abs() as usize > l2
        || m3.unsigned_abs() as usize > l3
        || !triangle(l1, l2, l3)
    {
        return 0.0;
    }
    // (l1 l2 l3; 0 0 0) vanishes for odd l1 + l2 + l3
    if m1 == 0 && m2 == 0 && (l1 + l2 + l3) % 2 == 1 {
        return 0.0;
    }
    let key = (l1 as u32, l2 as u32, l3 as u32, m1 as i32, m2 as i32);
    if let Some(&v) = cache().read().expect("3j cache poisoned").get(&key) {
        return v;
    }
    let v = wigner_3j_exact(l1 as i64, l2 as i64, l3 as i64, m1, m2, m3);
    cache().write().expect("3j cache poisoned").insert(key, v);
    v
}

fn fact(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    factorial(n as usize)
}

fn wigner_3j_exact(l1: i64, l2: i64, l3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    let k_min = 0.max(l2 - l3 - m1).max(l1 - l3 + m2);
    let k_max = (l1 + l2 - l3).min(l1 - m1).min(l2 + m2);
    if k_min > k_max {
        return 0.0;
    }

    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = fact(k)
            * fact(l1 + l2 - l3 - k)
            * fact(l1 - m1 - k)
            * fact(l2 + m2 - k)
            * fact(l3 - l2 + m1 + k)
            * fact(l3 - l1 - m2 + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }

    // value² = Δ · Π(l ± m)! · sum²
    let pre_num = fact(l1 + l2 - l3)
        * fact(l1 - l2 + l3)
        * fact(-l1 + l2 + l3)
        * fact(l1 - m1)
        * fact(l1 + m1)
        * fact(l2 - m2)
        * fact(l2 + m2)
        * fact(l3 - m3)
        * fact(l3 + m3);
    let pre_den = fact(l1 + l2 + l3 + 1);
    let num = pre_num * sum.numer() * sum.numer();
    let den = pre_den * sum.denom() * sum.denom();
    let magnitude = sqrt_ratio(&num, &den);

    let phase_odd = (l1 - l2 - m3).rem_euclid(2) == 1;
    let negative = sum.is_negative() ^ phase_odd;
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// `(mantissa, exponent)` with `value ≈ mantissa · 2^exponent`, mantissa
/// holding the leading 64 bits.
fn to_scaled(v: &BigInt) -> (f64, i64) {
    let bits = v.bits() as i64;
    let shift = (bits - 64).max(0);
    let top: BigInt = v >> shift as usize;
    (top.to_f64().expect("64-bit value fits in f64"), shift)
}

/// `sqrt(num / den)` for positive big integers, evaluated without overflow.
fn sqrt_ratio(num: &BigInt, den: &BigInt) -> f64 {
    let (mn, en) = to_scaled(num);
    let (md, ed) = to_scaled(den);
    let mut ratio = mn / md;
    let mut e = en - ed;
    if e % 2 != 0 {
        ratio *= 2.0;
        e -= 1;
    }
    ratio.sqrt() * 2f64.powi((e / 2) as i32)
}
