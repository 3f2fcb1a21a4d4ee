//! Convolution, the trilinear Young form, and the exponent bookkeeping of the
//! Hölder reduction to a triple with one exponent equal to 1.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{lp_norm, pointwise_power, Scalar, SparseFunction};
use crate::group::DEFAULT_SUMSET_LIMIT;

/// Relative tolerance on `sum 1/p_j = 2`.
pub const EXPONENT_SUM_TOL: f64 = 1e-12;

/// Conjugate exponent `p / (p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Exponents `(p1, p2, p3)` with each `p_j` in `(1, inf)` and `sum 1/p_j = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct ExponentTriple {
    p1: f64,
    p2: f64,
    p3: f64,
}

impl ExponentTriple {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        for p in [p1, p2, p3] {
            if !(p > 1.0 && p.is_finite()) {
                return Err(Error::exponent(p, "each exponent must lie in (1, inf)"));
            }
        }
        let sum = 1.0 / p1 + 1.0 / p2 + 1.0 / p3;
        if ((sum - 2.0) / 2.0).abs() > EXPONENT_SUM_TOL {
            return Err(Error::exponent(sum, "reciprocals must sum to 2"));
        }
        Ok(ExponentTriple { p1, p2, p3 })
    }

    /// Completes `(p1, p2)` with the unique `p3` making the reciprocals sum to 2.
    pub fn from_pair(p1: f64, p2: f64) -> Result<Self> {
        let inv3 = 2.0 - 1.0 / p1 - 1.0 / p2;
        if !(inv3 > 0.0 && inv3 < 1.0) {
            return Err(Error::exponent(inv3, "no admissible third exponent"));
        }
        Self::new(p1, p2, 1.0 / inv3)
    }

    /// `(p, p, p)` with `p = 3/2`.
    pub fn symmetric() -> Self {
        ExponentTriple {
            p1: 1.5,
            p2: 1.5,
            p3: 1.5,
        }
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
    pub fn p3(&self) -> f64 {
        self.p3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }

    /// Parses `"p1,p2,p3"` or `"p1,p2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let v = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::invalid(format!("exponents {s:?}: {e}")))?;
        match v.as_slice() {
            [a, b] => Self::from_pair(*a, *b),
            [a, b, c] => Self::new(*a, *b, *c),
            _ => Err(Error::invalid(format!("exponents {s:?}: expected two or three values"))),
        }
    }
}

impl TryFrom<[f64; 3]> for ExponentTriple {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<ExponentTriple> for [f64; 3] {
    fn from(p: ExponentTriple) -> [f64; 3] {
        p.as_array()
    }
}

fn check_pairs(n1: usize, n2: usize, limit: usize) -> Result<()> {
    let pairs = n1 as u128 * n2 as u128;
    if pairs > limit as u128 {
        return Err(Error::ResourceLimit {
            what: "support pairs",
            needed: pairs,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// `(f1 * f2)(z) = sum_{x + y = z} f1(x) f2(y)` by support-pair enumeration.
pub fn convolve<S: Scalar>(f1: &SparseFunction<S>, f2: &SparseFunction<S>) -> Result<SparseFunction<S>> {
    convolve_limited(f1, f2, DEFAULT_SUMSET_LIMIT)
}

pub fn convolve_limited<S: Scalar>(
    f1: &SparseFunction<S>,
    f2: &SparseFunction<S>,
    limit: usize,
) -> Result<SparseFunction<S>> {
    let g = f1.group();
    f2.check_group(&g)?;
    check_pairs(f1.len(), f2.len(), limit)?;
    let mut out: BTreeMap<_, S> = BTreeMap::new();
    for (x, a) in f1.iter() {
        for (y, b) in f2.iter() {
            let slot = out.entry(g.add_unchecked(x, y)).or_insert_with(S::zero);
            *slot = *slot + *a * *b;
        }
    }
    Ok(SparseFunction::from_map_unchecked(g, out))
}

/// `<f1 * f2, f3> = sum_{x,y} f1(x) f2(y) f3(x + y)`.
pub fn trilinear_form(f1: &SparseFunction, f2: &SparseFunction, f3: &SparseFunction) -> Result<f64> {
    trilinear_form_limited(f1, f2, f3, DEFAULT_SUMSET_LIMIT)
}

pub fn trilinear_form_limited(
    f1: &SparseFunction,
    f2: &SparseFunction,
    f3: &SparseFunction,
    limit: usize,
) -> Result<f64> {
    let g = f1.group();
    f2.check_group(&g)?;
    f3.check_group(&g)?;
    check_pairs(f1.len(), f2.len(), limit)?;
    let inner = f3.values();
    let mut total = 0.0;
    for (x, a) in f1.iter() {
        let mut row = 0.0;
        for (y, b) in f2.iter() {
            if let Some(c) = inner.get(&g.add_unchecked(x, y)) {
                row += b * c;
            }
        }
        total += a * row;
    }
    Ok(total)
}

/// `<f1 * f2, f3> / prod_j ||f_j||_{e_j}` for arbitrary exponents in `[1, inf]`.
pub fn form_ratio(f1: &SparseFunction, f2: &SparseFunction, f3: &SparseFunction, exps: [f64; 3]) -> Result<f64> {
    let mut denom = 1.0;
    for (j, (f, e)) in [f1, f2, f3].into_iter().zip(exps).enumerate() {
        if f.is_zero() {
            return Err(Error::invalid(format!("function {} is zero", j + 1)));
        }
        denom *= lp_norm(f, e)?;
    }
    Ok(trilinear_form(f1, f2, f3)? / denom)
}

/// Young ratio `<f1 * f2, f3> / prod ||f_j||_{p_j}`; at most 1 for every
/// triple, and a triple is a `(1 - δ)`-near extremizer iff this is `>= 1 - δ`.
pub fn young_ratio(f1: &SparseFunction, f2: &SparseFunction, f3: &SparseFunction, p: &ExponentTriple) -> Result<f64> {
    for (j, f) in [f1, f2, f3].into_iter().enumerate() {
        if !f.is_zero() && !f.is_nonnegative() {
            return Err(Error::invalid(format!("function {} must be nonnegative", j + 1)));
        }
    }
    form_ratio(f1, f2, f3, p.as_array())
}

/// Exponents of the Hölder reduction to `(s1, s2, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionPlan {
    /// `p3'`.
    pub q: f64,
    /// `p1 / q`.
    pub theta: f64,
    /// `p2 / q`.
    pub phi: f64,
    pub r1: f64,
    pub r2: f64,
    pub s1: f64,
    pub s2: f64,
}

impl ReductionPlan {
    /// The reduced exponent triple `(s1, s2, 1)`.
    pub fn reduced_exponents(&self) -> [f64; 3] {
        [self.s1, self.s2, 1.0]
    }
}

pub fn reduction_exponents(p: &ExponentTriple) -> ReductionPlan {
    let q = conjugate(p.p3);
    let r1 = (q - p.p1) * p.p3 / q;
    let r2 = (q - p.p2) * p.p3 / q;
    ReductionPlan {
        q,
        theta: p.p1 / q,
        phi: p.p2 / q,
        r1,
        r2,
        s1: p.p1 / r1,
        s2: p.p2 / r2,
    }
}

/// `(f1^r1, f2^r2, f3^p3)` together with the exponents it is measured in.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTriple {
    pub g1: SparseFunction,
    pub g2: SparseFunction,
    pub g3: SparseFunction,
    pub plan: ReductionPlan,
}

impl ReducedTriple {
    pub fn exponents(&self) -> [f64; 3] {
        self.plan.reduced_exponents()
    }

    pub fn ratio(&self) -> Result<f64> {
        form_ratio(&self.g1, &self.g2, &self.g3, self.exponents())
    }
}

pub fn reduce_triple(
    f1: &SparseFunction,
    f2: &SparseFunction,
    f3: &SparseFunction,
    p: &ExponentTriple,
) -> Result<ReducedTriple> {
    for (j, f) in [f1, f2, f3].into_iter().enumerate() {
        if f.is_zero() {
            return Err(Error::invalid(format!("function {} is zero", j + 1)));
        }
    }
    let plan = reduction_exponents(p);
    Ok(ReducedTriple {
        g1: pointwise_power(f1, plan.r1)?,
        g2: pointwise_power(f2, plan.r2)?,
        g3: pointwise_power(f3, p.p3)?,
        plan,
    })
}
