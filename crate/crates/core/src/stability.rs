//! Uniform convexity of ℓ^p (Clarkson gaps and the triangle-inequality
//! partition) and the concentration machinery used for doubling arguments.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{lp_norm, lp_norm_pow, pointwise_power, translate, SparseFunction};
use crate::group::{FiniteSubset, GroupElement};
use crate::young::conjugate;

fn check_open_exponent(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::exponent(p, "exponent must lie in (1, inf)"));
    }
    Ok(())
}

/// Slack in Clarkson's inequality for the pair `(f, g)`; never negative.
///
/// For `p >= 2` this is `2^(p-1)(||f||^p + ||g||^p) - ||f+g||^p - ||f-g||^p`;
/// for `p < 2` it is `2(||f||^p + ||g||^p)^(q-1) - ||f+g||^q - ||f-g||^q`
/// with `q = p'`.
pub fn clarkson_gap(f: &SparseFunction, g: &SparseFunction, p: f64) -> Result<f64> {
    check_open_exponent(p)?;
    let sum = f.plus(g)?;
    let diff = f.minus(g)?;
    if p >= 2.0 {
        let rhs = 2f64.powf(p - 1.0) * (lp_norm_pow(f, p) + lp_norm_pow(g, p));
        Ok(rhs - lp_norm_pow(&sum, p) - lp_norm_pow(&diff, p))
    } else {
        let q = conjugate(p);
        let rhs = 2.0 * (lp_norm_pow(f, p) + lp_norm_pow(g, p)).powf(q - 1.0);
        Ok(rhs - lp_norm(&sum, p)?.powf(q) - lp_norm(&diff, p)?.powf(q))
    }
}

/// Hypothesis defect and conclusion size for the Clarkson-type stability
/// statement: `||f+g||^p >= (1-ε) 2^(p-1)(||f||^p + ||g||^p)` should force
/// `||f-g||^p` to be small relative to `||f||^p + ||g||^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhewDiscrepancy {
    pub hypothesis_eps: f64,
    pub distance_measure: f64,
}

pub fn phew_discrepancy(f: &SparseFunction, g: &SparseFunction, p: f64) -> Result<PhewDiscrepancy> {
    check_open_exponent(p)?;
    let (nf, ng) = (lp_norm_pow(f, p), lp_norm_pow(g, p));
    if nf + ng == 0.0 {
        return Err(Error::invalid("both functions are zero"));
    }
    let sum = lp_norm_pow(&f.plus(g)?, p);
    let diff = lp_norm_pow(&f.minus(g)?, p);
    Ok(PhewDiscrepancy {
        hypothesis_eps: 1.0 - sum / (2f64.powf(p - 1.0) * (nf + ng)),
        distance_measure: diff / (nf + ng),
    })
}

/// Coefficient `s = ℓ(f/||f||)` of a family member along the norming
/// direction, and the size of what is left over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormingValue {
    pub s: f64,
    /// `||f/||f|| - s F/||F|| ||_p`.
    pub residual: f64,
}

/// The norming functional of `F` in ℓ^p: `ℓ(g) = sum g sgn(F)|F|^(p-1) / ||F||^(p-1)`.
struct NormingFunctional {
    unit: SparseFunction,
    dual: SparseFunction,
}

impl NormingFunctional {
    fn new(big_f: &SparseFunction, p: f64) -> Result<Self> {
        let norm = lp_norm(big_f, p)?;
        if norm == 0.0 {
            return Err(Error::invalid("norming functional of the zero function"));
        }
        let unit = big_f.scaled(1.0 / norm);
        let dual = unit.map_values(|v| v.signum() * v.abs().powf(p - 1.0));
        Ok(NormingFunctional { unit, dual })
    }

    fn apply(&self, g: &SparseFunction) -> f64 {
        // Iterate over the smaller support.
        if g.len() <= self.dual.len() {
            g.iter().map(|(x, v)| v * self.dual.get(x)).sum()
        } else {
            self.dual.iter().map(|(x, v)| v * g.get(x)).sum()
        }
    }
}

pub fn norming_values(big_f: &SparseFunction, family: &[SparseFunction], p: f64) -> Result<Vec<NormingValue>> {
    check_open_exponent(p)?;
    let ell = NormingFunctional::new(big_f, p)?;
    family
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.check_group(&big_f.group())?;
            let n = lp_norm(f, p)?;
            if n == 0.0 {
                return Err(Error::invalid(format!("family member {i} is zero")));
            }
            let unit_i = f.scaled(1.0 / n);
            let s = ell.apply(&unit_i);
            let residual = lp_norm(&unit_i.minus(&ell.unit.scaled(s))?, p)?;
            Ok(NormingValue { s, residual })
        })
        .collect()
}

/// Exponent `m` and constant `L` with `1 - s >= ||F_i - s F||^m / L` for unit
/// vectors, derived from the two Clarkson inequalities.
pub fn convexity_modulus(p: f64) -> (f64, f64) {
    if p >= 2.0 {
        (p, p * 2f64.powf(p - 1.0))
    } else {
        let q = conjugate(p);
        (q, q * 2f64.powf(q))
    }
}

/// Default exponent γ in `η = δ^(γ/(1+γ))`: the reciprocal of the modulus
/// exponent, `1 / max(p, p')`.
pub fn default_gamma(p: f64) -> f64 {
    1.0 / convexity_modulus(p).0
}

/// Relative residual below which a member counts as exactly aligned.
pub const ALIGNED_TOL: f64 = 1e-12;

/// Allowance added to the measured defect before choosing η.
pub const DEFECT_ROUNDING: f64 = 1e-13;

/// Split of a nearly collinear family into aligned members and a light remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    pub s_prime: Vec<usize>,
    pub s_double_prime: Vec<usize>,
    /// `F = sum f_i`, normalized to unit ℓ^p norm.
    pub sum: SparseFunction,
    /// `ℓ(f_i / ||f_i||)`.
    pub s_values: Vec<f64>,
    /// `||f_i - ℓ(f_i) F||_p`.
    pub residual_norms: Vec<f64>,
    pub norms: Vec<f64>,
    pub delta: f64,
    pub gamma: f64,
    /// `(δ + DEFECT_ROUNDING)^(γ/(1+γ))`.
    pub eta_used: f64,
    pub modulus_constant: f64,
    pub epsilon_delta: f64,
}

/// Partitions `family` by the residual criterion `||f_i - ℓ(f_i)F|| < η ||f_i||`.
///
/// `delta_hint`, when given, must bound the triangle-inequality defect
/// `1 - ||sum f_i|| / sum ||f_i||` from above.
pub fn convexity_partition(
    family: &[SparseFunction],
    p: f64,
    delta_hint: Option<f64>,
    gamma: Option<f64>,
) -> Result<PartitionResult> {
    check_open_exponent(p)?;
    let first = family.first().ok_or_else(|| Error::invalid("empty family"))?;
    let group = first.group();
    let mut total = SparseFunction::zero(group);
    for f in family {
        total = total.plus(f)?;
    }
    let norms = family.iter().map(|f| lp_norm(f, p)).collect::<Result<Vec<_>>>()?;
    let norm_sum: f64 = norms.iter().sum();
    if norm_sum == 0.0 {
        return Err(Error::invalid("all family members are zero"));
    }
    let total_norm = lp_norm(&total, p)?;
    if total_norm == 0.0 {
        return Err(Error::invalid("family sums to zero"));
    }
    let defect = (1.0 - total_norm / norm_sum).clamp(0.0, 1.0);
    let delta = match delta_hint {
        Some(h) if !(0.0..=1.0).contains(&h) => return Err(Error::invalid(format!("delta hint {h} outside [0, 1]"))),
        Some(h) if h < defect - 1e-12 => {
            return Err(Error::invalid(format!(
                "delta hint {h} is below the actual defect {defect}"
            )))
        }
        Some(h) => h,
        None => defect,
    };
    let gamma = gamma.unwrap_or_else(|| default_gamma(p));
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    // The measured defect carries rounding error; near δ = 0 that error would
    // otherwise leave residuals of order rounding^(1/m) unaccounted for.
    let delta_eff = delta + DEFECT_ROUNDING;
    let eta = delta_eff.powf(gamma / (1.0 + gamma));

    let ell = NormingFunctional::new(&total, p)?;
    let mut s_values = Vec::with_capacity(family.len());
    let mut residual_norms = Vec::with_capacity(family.len());
    let (mut s_prime, mut s_double_prime) = (Vec::new(), Vec::new());
    for (i, (f, &n)) in family.iter().zip(&norms).enumerate() {
        let ell_f = ell.apply(f);
        let residual = lp_norm(&f.minus(&ell.unit.scaled(ell_f))?, p)?;
        s_values.push(if n > 0.0 { ell_f / n } else { 0.0 });
        residual_norms.push(residual);
        // Members aligned to rounding error stay in S' even when η = 0.
        if residual < eta * n || (n > 0.0 && residual <= ALIGNED_TOL * n) {
            s_prime.push(i);
        } else {
            s_double_prime.push(i);
        }
    }

    let (m, l) = convexity_modulus(p);
    let mass_term = l * delta_eff * eta.powf(-m);
    Ok(PartitionResult {
        s_prime,
        s_double_prime,
        sum: ell.unit,
        s_values,
        residual_norms,
        norms,
        delta,
        gamma,
        eta_used: eta,
        modulus_constant: l,
        epsilon_delta: (2.0 * eta).max(mass_term),
    })
}

/// How spread out a function is: the least number of points carrying all but
/// an η-fraction of `||f||_p^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub n: usize,
    pub witness_set: FiniteSubset,
    pub eta: f64,
    pub p: f64,
    /// Share of `||f||_p^p` outside the witness set; strictly below `eta`.
    pub removed_mass_fraction: f64,
}

/// Smallest `|B|` with `||f||_{ℓ^p(G \ B)}^p < η ||f||_p^p` (strict), found by
/// taking the largest values first.
pub fn concentration(f: &SparseFunction, eta: f64, p: f64) -> Result<ConcentrationReport> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta must lie in (0, 1), got {eta}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::exponent(p, "concentration needs p in [1, inf)"));
    }
    if f.is_zero() {
        return Err(Error::invalid("concentration of the zero function"));
    }
    let top = f.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let mut masses: Vec<(&GroupElement, f64)> = f.iter().map(|(x, v)| (x, (v.abs() / top).powf(p))).collect();
    masses.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
    });
    // tail[k] = mass of everything after the k largest values.
    let mut tail = vec![0.0; masses.len() + 1];
    for k in (0..masses.len()).rev() {
        tail[k] = tail[k + 1] + masses[k].1;
    }
    let total = tail[0];
    let n = (1..=masses.len())
        .find(|&k| tail[k] < eta * total)
        .unwrap_or(masses.len());
    let witness = FiniteSubset::new(f.group(), masses[..n].iter().map(|(x, _)| (*x).clone()))?;
    Ok(ConcentrationReport {
        n,
        witness_set: witness,
        eta,
        p,
        removed_mass_fraction: tail[n] / total,
    })
}

/// Candidate translates `u` along which `f^r` is nearly invariant:
/// `||τ_u f^r - f^r||_s <= 2η ||f^r||_s`. Always contains the identity.
pub fn stability_translate_set(
    f: &SparseFunction,
    candidates: &FiniteSubset,
    r: f64,
    s: f64,
    eta: f64,
) -> Result<FiniteSubset> {
    if f.is_zero() {
        return Err(Error::invalid("translate set of the zero function"));
    }
    if s.is_nan() || s < 1.0 {
        return Err(Error::exponent(s, "norm exponent must be at least 1"));
    }
    let g = pointwise_power(f, r)?;
    let threshold = 2.0 * eta * lp_norm(&g, s)?;
    let mut keep = Vec::new();
    for u in candidates.iter() {
        let moved = translate(&g, u)?;
        if lp_norm(&moved.minus(&g)?, s)? <= threshold {
            keep.push(u.clone());
        }
    }
    FiniteSubset::new(f.group(), keep)
}
