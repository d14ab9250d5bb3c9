//! Products of several spherical functions, evaluated as a tree of 2D
//! convolutions.

use crate::basis::{conversion_table, fourier_to_sh_masked, sh_to_fourier, FourierCoeffs2D, MAX_TABLE_DEGREE};
use crate::error::{domain, Error, Result};
use crate::fft::{conv2d_fft_counted, fft2_work, Spectrum};
use crate::irreps::{DegreeWeights, IrrepsVector};
use crate::so3::gaunt_forbidden;
use crate::tp::check_input_degree;

pub const MAX_BODY_ORDER: usize = 16;

/// Number of operands in an iterated product, `1 ..= 16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BodyOrder(usize);

impl BodyOrder {
    pub fn new(nu: usize) -> Result<Self> {
        if nu == 0 || nu > MAX_BODY_ORDER {
            return Err(domain(format!("body order {nu} outside 1..={MAX_BODY_ORDER}")));
        }
        Ok(Self(nu))
    }

    pub fn get(&self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Halve the operand list recursively; products at each level combine
    /// operands of similar bandwidth.
    #[default]
    Balanced,
    /// `((a ⊛ b) ⊛ c) ⊛ ...`
    LeftFold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MultiTpOptions {
    pub schedule: Schedule,
    /// Transform every operand once at the final size and multiply in the
    /// frequency domain instead of convolving level by level.
    pub fused: bool,
}

/// Result of a multi-operand product with its counted FFT work.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiTpOutput {
    pub value: IrrepsVector,
    pub fft_work: u64,
}

fn combine(a: &FourierCoeffs2D, b: &FourierCoeffs2D, work: &mut u64) -> Result<FourierCoeffs2D> {
    let lm = a.lmax().max(b.lmax());
    let (c, w) = conv2d_fft_counted(&a.resized(lm), &b.resized(lm))?;
    *work += w;
    let l = a.lmax() + b.lmax();
    Ok(if c.lmax() > l { c.resized(l) } else { c })
}

fn tree(grids: &[FourierCoeffs2D], work: &mut u64) -> Result<FourierCoeffs2D> {
    match grids {
        [one] => Ok(one.clone()),
        _ => {
            let (left, right) = grids.split_at(grids.len() / 2);
            let a = tree(left, work)?;
            let b = tree(right, work)?;
            combine(&a, &b, work)
        }
    }
}

/// Degrees reachable by the running product of operands with these supports.
fn reachable_chain(supports: &[Vec<usize>], degrees: &[usize]) -> Vec<bool> {
    let mut acc = supports[0].clone();
    let mut bound = degrees[0];
    for (s, &d) in supports.iter().zip(degrees).skip(1) {
        bound += d;
        acc = (0..=bound).filter(|&l| acc.iter().any(|&a| s.iter().any(|&b| !gaunt_forbidden(a, b, l)))).collect();
    }
    let mut mask = vec![false; bound + 1];
    for l in acc {
        mask[l] = true;
    }
    mask
}

/// Coefficients up to `l_out` of the product of the spherical functions of
/// all operands, with no intermediate truncation.
pub fn multi_tp(operands: &[IrrepsVector], l_out: usize) -> Result<IrrepsVector> {
    multi_tp_with(operands, l_out, MultiTpOptions::default()).map(|o| o.value)
}

pub fn multi_tp_with(operands: &[IrrepsVector], l_out: usize, opts: MultiTpOptions) -> Result<MultiTpOutput> {
    if operands.is_empty() {
        return Err(domain("multi_tp needs at least one operand"));
    }
    let degrees: Vec<usize> = operands.iter().map(|x| x.lmax()).collect();
    for &d in &degrees {
        check_input_degree(d)?;
    }
    let l_sum: usize = degrees.iter().sum();
    if l_sum > MAX_TABLE_DEGREE {
        return Err(Error::Capacity { degree: l_sum, max: MAX_TABLE_DEGREE });
    }
    if l_out > l_sum {
        return Err(domain(format!("output degree {l_out} exceeds the product bandwidth {l_sum}")));
    }
    if operands.len() == 1 {
        return Ok(MultiTpOutput { value: operands[0].resized(l_out), fft_work: 0 });
    }

    let t = conversion_table(l_sum)?;
    let grids = operands.iter().map(|x| sh_to_fourier(x, &t)).collect::<Result<Vec<_>>>()?;
    let mut work = 0u64;
    let product = if opts.fused {
        // a lattice of 2 L_sum + 1 points per axis holds the full product without wrap-around
        let p = (2 * l_sum + 1).next_power_of_two();
        let mut acc = Spectrum::forward(&grids[0], p);
        for g in &grids[1..] {
            acc.multiply(&Spectrum::forward(g, p));
        }
        work += (grids.len() as u64 + 1) * fft2_work(p) + (grids.len() as u64 - 1) * (p * p) as u64;
        acc.inverse(l_sum)
    } else {
        match opts.schedule {
            Schedule::Balanced => tree(&grids, &mut work)?,
            Schedule::LeftFold => {
                let mut acc = grids[0].clone();
                for g in &grids[1..] {
                    acc = combine(&acc, g, &mut work)?;
                }
                acc
            }
        }
    };

    let supports: Vec<Vec<usize>> = operands.iter().map(|x| x.support()).collect();
    let keep = reachable_chain(&supports, &degrees);
    let (value, _) = fourier_to_sh_masked(&product, &t, l_out, |l| keep[l])?;
    Ok(MultiTpOutput { value, fft_work: work })
}

/// `ν`-fold product of the weighted feature `w ⊙ x` with itself.
pub fn self_product(x: &IrrepsVector, nu: BodyOrder, wx: &DegreeWeights, l_out: usize) -> Result<IrrepsVector> {
    self_product_with(x, nu, wx, l_out, MultiTpOptions::default()).map(|o| o.value)
}

pub fn self_product_with(
    x: &IrrepsVector,
    nu: BodyOrder,
    wx: &DegreeWeights,
    l_out: usize,
    opts: MultiTpOptions,
) -> Result<MultiTpOutput> {
    let xw = x.scale_degrees(wx)?;
    let operands = vec![xw; nu.get()];
    multi_tp_with(&operands, l_out, opts)
}
