//! Fourier series of finitely supported functions on ℤ^d and their
//! `L^q(𝕋^d)` norms by uniform-grid quadrature.
//!
//! The torus carries the probability measure, so `||δ̂||_q = 1` for every `q`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{lp_norm, Scalar, SparseFunction};
use crate::group::{GroupDescriptor, GroupElement};
use crate::young::{conjugate, convolve};

/// Largest lattice dimension evaluated on a dense grid.
pub const MAX_GRID_DIM: usize = 3;

/// Grid points summed per parallel chunk; fixed so reductions are reproducible.
const CHUNK: usize = 1 << 12;

/// Knobs for [`hy_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Initial points per axis, as a multiple of the support bounding-box width + 1.
    pub oversampling: usize,
    /// Stop doubling once successive estimates differ by less than this, relatively.
    pub tolerance: f64,
    pub max_points_per_axis: usize,
    pub max_total_points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            oversampling: 8,
            tolerance: 1e-7,
            max_points_per_axis: 1 << 20,
            max_total_points: 1 << 24,
        }
    }
}

/// Result of a torus quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusQuadrature {
    pub dimension: usize,
    pub points_per_axis: usize,
    pub oversampling: usize,
    pub achieved_relative_change: f64,
    /// `(∫ |f̂|^q)^(1/q)`.
    pub value: f64,
}

fn lattice_dim(g: GroupDescriptor) -> Result<usize> {
    match g {
        GroupDescriptor::Lattice { dim } => Ok(dim),
        other => Err(Error::invalid(format!(
            "Fourier transform needs a lattice group, got {other}"
        ))),
    }
}

fn coords(e: &GroupElement) -> &[i64] {
    match e {
        GroupElement::Lattice(v) => v,
        _ => unreachable!("lattice functions have lattice keys"),
    }
}

/// `f̂(ξ) = sum_x e^(-2πi ξ·x) f(x)`.
pub fn dft_eval<S: Scalar>(f: &SparseFunction<S>, xi: &[f64]) -> Result<Complex64> {
    let dim = lattice_dim(f.group())?;
    if xi.len() != dim {
        return Err(Error::invalid(format!(
            "frequency has {} components, lattice has {dim}",
            xi.len()
        )));
    }
    Ok(f.iter()
        .map(|(x, v)| {
            let phase: f64 = coords(x).iter().zip(xi).map(|(&c, &t)| c as f64 * t).sum();
            v.to_complex() * Complex64::from_polar(1.0, -2.0 * PI * phase)
        })
        .sum())
}

/// Support of `f` shifted into `[0, width]^d`, with values as complex numbers.
fn shifted_support<S: Scalar>(f: &SparseFunction<S>, dim: usize) -> (Vec<(Vec<u64>, Complex64)>, u64) {
    let mut lo = vec![i64::MAX; dim];
    for (x, _) in f.iter() {
        for (l, &c) in lo.iter_mut().zip(coords(x)) {
            *l = (*l).min(c);
        }
    }
    let mut width = 0;
    let pts = f
        .iter()
        .map(|(x, v)| {
            let off: Vec<u64> = coords(x).iter().zip(&lo).map(|(&c, &l)| (c - l) as u64).collect();
            width = off.iter().copied().fold(width, u64::max);
            (off, v.to_complex())
        })
        .collect();
    (pts, width)
}

/// Mean of `|f̂|^q` over the grid `(k_1/K, ..., k_d/K)`.
fn grid_mean(pts: &[(Vec<u64>, Complex64)], dim: usize, k: usize, q: f64) -> f64 {
    let twiddle: Vec<Complex64> = (0..k)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / k as f64))
        .collect();
    let total = k.pow(dim as u32);
    let kk = k as u64;
    let eval = |flat: usize| -> f64 {
        let mut idx = [0u64; MAX_GRID_DIM];
        let mut rest = flat;
        for slot in idx.iter_mut().take(dim) {
            *slot = (rest % k) as u64;
            rest /= k;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (off, v) in pts {
            let mut phase = 0u64;
            for (j, &o) in off.iter().enumerate() {
                phase = (phase + (idx[j] * (o % kk)) % kk) % kk;
            }
            acc += v * twiddle[phase as usize];
        }
        acc.norm().powf(q)
    };
    let chunk_sums: Vec<f64> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(total)).map(eval).sum::<f64>())
        .collect();
    chunk_sums.iter().sum::<f64>() / total as f64
}

/// `||f̂||_{L^q(𝕋^d)}` by doubling a uniform grid until it settles.
pub fn hy_norm<S: Scalar>(f: &SparseFunction<S>, q: f64, cfg: &QuadratureConfig) -> Result<TorusQuadrature> {
    let dim = lattice_dim(f.group())?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::exponent(q, "torus norm exponent must lie in [1, inf)"));
    }
    if dim > MAX_GRID_DIM {
        return Err(Error::invalid(format!(
            "dense quadrature supports d <= {MAX_GRID_DIM}, got {dim}"
        )));
    }
    if f.is_zero() {
        return Ok(TorusQuadrature {
            dimension: dim,
            points_per_axis: 0,
            oversampling: cfg.oversampling,
            achieved_relative_change: 0.0,
            value: 0.0,
        });
    }
    let (pts, width) = shifted_support(f, dim);
    let fits =
        |k: usize| k <= cfg.max_points_per_axis && k.checked_pow(dim as u32).is_some_and(|t| t <= cfg.max_total_points);
    let mut k = cfg.oversampling.max(1) * (width as usize + 1);
    if k > cfg.max_points_per_axis {
        return Err(Error::ResourceLimit {
            what: "quadrature points per axis",
            needed: k as u128,
            limit: cfg.max_points_per_axis as u128,
        });
    }
    if !fits(k) {
        return Err(Error::ResourceLimit {
            what: "quadrature grid points",
            needed: (k as u128).pow(dim as u32),
            limit: cfg.max_total_points as u128,
        });
    }
    let mut prev = grid_mean(&pts, dim, k, q).powf(1.0 / q);
    loop {
        let next_k = 2 * k;
        if !fits(next_k) {
            return Err(Error::QuadratureNotConverged {
                previous: prev,
                last: prev,
                points: k,
            });
        }
        let next = grid_mean(&pts, dim, next_k, q).powf(1.0 / q);
        let change = (next - prev).abs() / next.abs().max(f64::MIN_POSITIVE);
        if change < cfg.tolerance {
            return Ok(TorusQuadrature {
                dimension: dim,
                points_per_axis: next_k,
                oversampling: cfg.oversampling,
                achieved_relative_change: change,
                value: next,
            });
        }
        if !fits(2 * next_k) {
            return Err(Error::QuadratureNotConverged {
                previous: prev,
                last: next,
                points: next_k,
            });
        }
        prev = next;
        k = next_k;
    }
}

/// `||f̂||_{p'} / ||f||_p` and the flatness `t = ||f||_∞ / ||f||_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyRatio {
    pub ratio: f64,
    pub t: f64,
    pub quadrature: TorusQuadrature,
}

pub fn hy_ratio<S: Scalar>(f: &SparseFunction<S>, p: f64, cfg: &QuadratureConfig) -> Result<HyRatio> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::exponent(p, "Hausdorff-Young needs p in (1, 2]"));
    }
    if f.is_zero() {
        return Err(Error::invalid("Hausdorff-Young ratio of the zero function"));
    }
    let quad = hy_norm(f, conjugate(p), cfg)?;
    let norm = lp_norm(f, p)?;
    Ok(HyRatio {
        ratio: quad.value / norm,
        t: lp_norm(f, f64::INFINITY)? / norm,
        quadrature: quad,
    })
}

/// Slack in the two steps `||f̂||_{p'}^2 <= ||f*f||_s <= ||f||_p^2`,
/// `1/s = 2/p - 1`, valid for `p <= 4/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainGaps {
    pub s: f64,
    /// `||f*f||_s - ||f̂||_{p'}^2` (Hausdorff-Young for `f*f`).
    pub gap1: f64,
    /// `||f||_p^2 - ||f*f||_s` (Young).
    pub gap2: f64,
}

/// Exponent `s` with `1/s = 2/p - 1`.
pub fn chain_exponent(p: f64) -> f64 {
    1.0 / (2.0 / p - 1.0)
}

pub fn hy_chain_gaps<S: Scalar>(f: &SparseFunction<S>, p: f64, cfg: &QuadratureConfig) -> Result<ChainGaps> {
    if !(p > 1.0 && p <= 4.0 / 3.0 + 1e-12) {
        return Err(Error::exponent(p, "the convolution chain needs p in (1, 4/3]"));
    }
    if f.is_zero() {
        return Err(Error::invalid("chain gaps of the zero function"));
    }
    let s = chain_exponent(p);
    let ff = lp_norm(&convolve(f, f)?, s)?;
    let hat = hy_norm(f, conjugate(p), cfg)?.value;
    Ok(ChainGaps {
        s,
        gap1: ff - hat * hat,
        gap2: lp_norm(f, p)?.powi(2) - ff,
    })
}

/// `θ` with `1/p = θ/2 + 3(1-θ)/4`, i.e. `θ = 3 - 4/p`, for `p` in `(4/3, 2)`.
pub fn theta_exponent(p: f64) -> Result<f64> {
    if !(p > 4.0 / 3.0 && p < 2.0) {
        return Err(Error::exponent(p, "interpolation exponent needs p in (4/3, 2)"));
    }
    Ok(3.0 - 4.0 / p)
}

/// Transfers a profile `Λ` valid at `p = 4/3` to `p` in `(4/3, 2)`:
/// `t -> Λ(t^(3p-4))^θ`.
pub fn interpolated_profile<F>(p: f64, profile: F) -> Result<impl Fn(f64) -> f64>
where
    F: Fn(f64) -> f64,
{
    let theta = theta_exponent(p)?;
    Ok(move |t: f64| profile(t.powf(3.0 * p - 4.0)).powf(theta))
}
