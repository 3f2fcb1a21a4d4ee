//! Finitely supported functions on a group.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{FiniteSubset, GroupDescriptor, GroupElement};

/// Value type of a [`SparseFunction`]: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + PartialEq
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
    fn scale(self, c: f64) -> Self;
    fn to_complex(self) -> Complex64;
    fn to_json_value(self) -> Value;
    fn from_json_value(v: &Value) -> Result<Self>;
    /// True when the value is real and strictly positive.
    fn is_positive_real(self) -> bool;
    fn is_real(self) -> bool;

    fn is_zero(self) -> bool {
        self == Self::zero()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn to_json_value(self) -> Value {
        Value::from(self)
    }
    fn from_json_value(v: &Value) -> Result<Self> {
        v.as_f64()
            .ok_or_else(|| Error::invalid(format!("expected a real value, found {v}")))
    }
    fn is_positive_real(self) -> bool {
        self > 0.0
    }
    fn is_real(self) -> bool {
        true
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn to_json_value(self) -> Value {
        json!([self.re, self.im])
    }
    fn from_json_value(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
            Value::Array(pair) if pair.len() == 2 => match (pair[0].as_f64(), pair[1].as_f64()) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(Error::invalid(format!("bad complex value {v}"))),
            },
            _ => Err(Error::invalid(format!("bad complex value {v}"))),
        }
    }
    fn is_positive_real(self) -> bool {
        self.im == 0.0 && self.re > 0.0
    }
    fn is_real(self) -> bool {
        self.im == 0.0
    }
}

/// Value class of a function, as reported in serialized form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    NonnegativeReal,
    Real,
    Complex,
}

/// A finitely supported map from group elements to scalars.
///
/// Zero values are never stored, so the key set is exactly the support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFunction<S: Scalar = f64> {
    group: GroupDescriptor,
    values: BTreeMap<GroupElement, S>,
}

impl<S: Scalar> SparseFunction<S> {
    pub fn zero(group: GroupDescriptor) -> Self {
        SparseFunction {
            group,
            values: BTreeMap::new(),
        }
    }

    /// Builds a function from `(element, value)` pairs. Repeated elements are
    /// summed; zero values are dropped.
    pub fn from_entries(group: GroupDescriptor, entries: impl IntoIterator<Item = (GroupElement, S)>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (e, v) in entries {
            group.validate(&e)?;
            if !(v.modulus().is_finite()) {
                return Err(Error::invalid(format!("non-finite value {v:?}")));
            }
            let slot = values.entry(e).or_insert_with(S::zero);
            *slot = *slot + v;
        }
        values.retain(|_, v: &mut S| !v.is_zero());
        Ok(SparseFunction { group, values })
    }

    /// Internal constructor for maps whose keys are already valid.
    pub(crate) fn from_map_unchecked(group: GroupDescriptor, mut values: BTreeMap<GroupElement, S>) -> Self {
        values.retain(|_, v| !v.is_zero());
        SparseFunction { group, values }
    }

    /// `c` times the point mass at `z`.
    pub fn delta(group: GroupDescriptor, z: GroupElement, c: S) -> Result<Self> {
        Self::from_entries(group, [(z, c)])
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn get(&self, x: &GroupElement) -> S {
        self.values.get(x).copied().unwrap_or_else(S::zero)
    }

    /// Support size.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &S)> + '_ {
        self.values.iter()
    }

    pub fn values(&self) -> &BTreeMap<GroupElement, S> {
        &self.values
    }

    pub fn support(&self) -> FiniteSubset {
        FiniteSubset::from_sorted_unchecked(self.group, self.values.keys().cloned().collect())
    }

    pub fn mode(&self) -> Mode {
        if self.values.values().all(|v| v.is_positive_real()) {
            Mode::NonnegativeReal
        } else if self.values.values().all(|v| v.is_real()) {
            Mode::Real
        } else {
            Mode::Complex
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.mode() == Mode::NonnegativeReal
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_map_unchecked(
            self.group,
            self.values.iter().map(|(k, v)| (k.clone(), v.scale(c))).collect(),
        )
    }

    pub fn map_values(&self, f: impl Fn(S) -> S) -> Self {
        Self::from_map_unchecked(
            self.group,
            self.values.iter().map(|(k, v)| (k.clone(), f(*v))).collect(),
        )
    }

    pub fn check_group(&self, other: &GroupDescriptor) -> Result<()> {
        if self.group != *other {
            return Err(Error::GroupMismatch {
                expected: other.to_string(),
                found: self.group.to_string(),
            });
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        other.check_group(&self.group)?;
        let mut out = self.values.clone();
        for (k, v) in &other.values {
            let slot = out.entry(k.clone()).or_insert_with(S::zero);
            *slot = *slot + v.scale(sign);
        }
        Ok(Self::from_map_unchecked(self.group, out))
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    pub fn to_complex(&self) -> SparseFunction<Complex64> {
        SparseFunction::from_map_unchecked(
            self.group,
            self.values.iter().map(|(k, v)| (k.clone(), v.to_complex())).collect(),
        )
    }

    /// `{"group": .., "mode": .., "entries": [[element, value], ..]}` with
    /// entries in canonical element order.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .values
            .iter()
            .map(|(k, v)| json!([self.group.element_to_json(k), v.to_json_value()]))
            .collect();
        json!({
            "group": self.group.to_string(),
            "mode": self.mode(),
            "entries": entries,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let group: GroupDescriptor = v
            .get("group")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::invalid("function JSON lacks a \"group\" string"))?
            .parse()?;
        let mode: Option<Mode> = match v.get("mode") {
            Some(m) => Some(serde_json::from_value(m.clone()).map_err(|e| Error::invalid(format!("bad mode: {e}")))?),
            None => None,
        };
        let entries = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::invalid("function JSON lacks an \"entries\" array"))?;
        let mut pairs = Vec::with_capacity(entries.len());
        for e in entries {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::invalid(format!("entry {e} is not an [element, value] pair")))?;
            pairs.push((group.element_from_json(&pair[0])?, S::from_json_value(&pair[1])?));
        }
        let f = Self::from_entries(group, pairs)?;
        if mode == Some(Mode::NonnegativeReal) && !f.is_nonnegative() {
            return Err(Error::invalid("mode nonnegative_real but a value is not positive"));
        }
        if mode == Some(Mode::Real) && f.mode() == Mode::Complex {
            return Err(Error::invalid("mode real but a value has an imaginary part"));
        }
        Ok(f)
    }

    /// Parses the inline syntax `elem=value;elem=value`, e.g. `-1=1;0=2` on
    /// `Z:1`, `1,2=0.5` on `Z:2`, `+1-2=3` on `F:2`.
    pub fn parse_inline(group: GroupDescriptor, s: &str) -> Result<Self>
    where
        S: From<f64>,
    {
        let mut pairs = Vec::new();
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let (e, v) = part
                .rsplit_once('=')
                .ok_or_else(|| Error::invalid(format!("entry {part:?}: expected ELEMENT=VALUE")))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|err| Error::invalid(format!("entry {part:?}: {err}")))?;
            pairs.push((group.parse_element(e)?, S::from(value)));
        }
        Self::from_entries(group, pairs)
    }
}

impl SparseFunction<f64> {
    /// Indicator function of a finite set.
    pub fn indicator(set: &FiniteSubset) -> Self {
        SparseFunction {
            group: set.group(),
            values: set.iter().map(|e| (e.clone(), 1.0)).collect(),
        }
    }

    /// Absolute value, pointwise.
    pub fn abs(&self) -> Self {
        self.map_values(f64::abs)
    }

    pub(crate) fn require_nonnegative(&self, what: &str) -> Result<()> {
        if !self.is_nonnegative() {
            return Err(Error::invalid(format!("{what} requires a nonnegative real function")));
        }
        Ok(())
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::exponent(p, "norm exponent must lie in [1, inf]"));
    }
    Ok(())
}

/// `sum |f|^p` (no root), computed without rescaling.
pub fn lp_norm_pow<S: Scalar>(f: &SparseFunction<S>, p: f64) -> f64 {
    f.values.values().map(|v| v.modulus().powf(p)).sum()
}

/// Counting-measure ℓ^p norm; `p = f64::INFINITY` gives the sup norm.
pub fn lp_norm<S: Scalar>(f: &SparseFunction<S>, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let max = f.values.values().map(|v| v.modulus()).fold(0.0, f64::max);
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    if p == 1.0 {
        return Ok(f.values.values().map(|v| v.modulus()).sum());
    }
    let s: f64 = f.values.values().map(|v| (v.modulus() / max).powf(p)).sum();
    Ok(max * s.powf(1.0 / p))
}

/// One dyadic layer: the level set `E_k = {2^k <= f < 2^(k+1)}` and the
/// normalized profile `F_k = f / 2^k` on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub level: i32,
    pub set: FiniteSubset,
    pub profile: SparseFunction,
}

/// The occupied dyadic layers of a nonnegative function, ordered by level.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerDecomposition {
    pub layers: Vec<Layer>,
}

impl LayerDecomposition {
    /// ℓ^p norm of the decomposed function, computed from its layers.
    pub fn source_norm(&self, p: f64) -> f64 {
        let max_level = self.layers.last().map_or(0, |l| l.level);
        let top = pow2(max_level);
        let s: f64 = self
            .layers
            .iter()
            .flat_map(|l| {
                let scale = pow2(l.level) / top;
                l.profile.values.values().map(move |v| (v * scale).powf(p))
            })
            .sum();
        top * s.powf(1.0 / p)
    }

    /// `sum_k 2^k F_k`.
    pub fn reconstruct(&self) -> Option<SparseFunction> {
        let group = self.layers.first()?.set.group();
        let mut values = BTreeMap::new();
        for l in &self.layers {
            let c = pow2(l.level);
            for (k, v) in &l.profile.values {
                *values.entry(k.clone()).or_insert(0.0) += c * v;
            }
        }
        Some(SparseFunction::from_map_unchecked(group, values))
    }
}

fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

/// The integer `k` with `2^k <= v < 2^(k+1)`.
pub(crate) fn dyadic_level(v: f64) -> i32 {
    debug_assert!(v > 0.0 && v.is_finite());
    let mut k = v.log2().floor() as i32;
    while pow2(k) > v {
        k -= 1;
    }
    while pow2(k + 1) <= v {
        k += 1;
    }
    k
}

/// Splits a nonzero nonnegative function into its occupied dyadic layers.
pub fn layer_decompose(f: &SparseFunction) -> Result<LayerDecomposition> {
    if f.is_zero() {
        return Err(Error::invalid("layer decomposition of the zero function"));
    }
    f.require_nonnegative("layer decomposition")?;
    let mut buckets: BTreeMap<i32, Vec<(GroupElement, f64)>> = BTreeMap::new();
    for (x, &v) in &f.values {
        let k = dyadic_level(v);
        buckets.entry(k).or_default().push((x.clone(), v / pow2(k)));
    }
    let layers = buckets
        .into_iter()
        .map(|(level, entries)| {
            let set = FiniteSubset::from_sorted_unchecked(f.group, entries.iter().map(|(x, _)| x.clone()).collect());
            let profile = SparseFunction {
                group: f.group,
                values: entries.into_iter().collect(),
            };
            Layer { level, set, profile }
        })
        .collect();
    Ok(LayerDecomposition { layers })
}

/// The dominant layer: maximizer of `2^k |E_k|^(1/p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaSelection {
    pub kappa: i32,
    pub score: f64,
    /// `score / ||f||_p`, in `(0, 1]`.
    pub rho_hat: f64,
}

/// Picks the layer maximizing `2^k |E_k|^(1/p)`; ties go to the smallest `k`.
pub fn kappa_select(dec: &LayerDecomposition, p: f64) -> Result<KappaSelection> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::exponent(p, "layer selection needs p in (1, inf)"));
    }
    let mut best: Option<(i32, f64)> = None;
    for l in &dec.layers {
        let score = pow2(l.level) * (l.set.len() as f64).powf(1.0 / p);
        match best {
            Some((_, s)) if score <= s * (1.0 + 1e-12) => {}
            _ => best = Some((l.level, score)),
        }
    }
    let (kappa, score) = best.ok_or_else(|| Error::invalid("empty layer decomposition"))?;
    Ok(KappaSelection {
        kappa,
        score,
        rho_hat: score / dec.source_norm(p),
    })
}

/// How [`lorentz_norm`] evaluates the `L^{p,r}` quasinorm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LorentzMethod {
    /// `(sum_n n^(r/p - 1) a_n^r)^(1/r)` over the decreasing rearrangement.
    Rearrangement,
    /// `(sum_k (2^k |E_k|^(1/p))^r)^(1/r)` over dyadic layers.
    LayerProxy,
}

pub fn lorentz_norm(f: &SparseFunction, p: f64, r: f64, method: LorentzMethod) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::exponent(p, "Lorentz p must lie in (1, inf)"));
    }
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::exponent(r, "Lorentz r must lie in [1, inf)"));
    }
    if f.is_zero() {
        return Err(Error::invalid("Lorentz norm of the zero function"));
    }
    f.require_nonnegative("Lorentz norm")?;
    match method {
        LorentzMethod::Rearrangement => {
            let mut a: Vec<f64> = f.values.values().copied().collect();
            a.sort_by(|x, y| y.total_cmp(x));
            let top = a[0];
            let s: f64 = a
                .iter()
                .enumerate()
                .map(|(i, v)| ((i + 1) as f64).powf(r / p - 1.0) * (v / top).powf(r))
                .sum();
            Ok(top * s.powf(1.0 / r))
        }
        LorentzMethod::LayerProxy => {
            let dec = layer_decompose(f)?;
            let top = dec.layers.last().map_or(0, |l| l.level);
            let s: f64 = dec
                .layers
                .iter()
                .map(|l| (pow2(l.level - top) * (l.set.len() as f64).powf(1.0 / p)).powf(r))
                .sum();
            Ok(pow2(top) * s.powf(1.0 / r))
        }
    }
}

/// Right translate: `(τ_u f)(x) = f(x - u)`, so the support moves to `supp f + u`.
pub fn translate<S: Scalar>(f: &SparseFunction<S>, u: &GroupElement) -> Result<SparseFunction<S>> {
    f.group.validate(u)?;
    let values = f
        .values
        .iter()
        .map(|(x, v)| (f.group.add_unchecked(x, u), *v))
        .collect();
    Ok(SparseFunction { group: f.group, values })
}

/// `x -> f(x)^a` for nonnegative `f`.
pub fn pointwise_power(f: &SparseFunction, a: f64) -> Result<SparseFunction> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::exponent(a, "power must be positive"));
    }
    f.require_nonnegative("pointwise power")?;
    Ok(f.map_values(|v| v.powf(a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> GroupDescriptor {
        GroupDescriptor::Lattice { dim: 1 }
    }

    fn pt(x: i64) -> GroupElement {
        GroupElement::lattice(vec![x])
    }

    fn func(entries: &[(i64, f64)]) -> SparseFunction {
        SparseFunction::from_entries(z1(), entries.iter().map(|&(x, v)| (pt(x), v))).unwrap()
    }

    #[test]
    fn zeros_are_not_stored() {
        let f = func(&[(0, 1.0), (1, 0.0), (0, -1.0), (2, 3.0)]);
        assert_eq!(f.len(), 1);
        assert_eq!(f.get(&pt(2)), 3.0);
    }

    #[test]
    fn lp_norm_examples() {
        let d = func(&[(7, 1.0)]);
        for p in [1.0, 1.5, 2.0, 10.0, f64::INFINITY] {
            assert_eq!(lp_norm(&d, p).unwrap(), 1.0);
        }
        let ind = func(&[(-1, 1.0), (0, 1.0), (1, 1.0)]);
        assert!((lp_norm(&ind, 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let ab = func(&[(0, 3.0), (1, 4.0)]);
        assert_eq!(lp_norm(&ab, f64::INFINITY).unwrap(), 4.0);
        assert_eq!(lp_norm(&SparseFunction::<f64>::zero(z1()), 2.0).unwrap(), 0.0);
        assert!(matches!(lp_norm(&ab, 0.5), Err(Error::InvalidExponent { .. })));
    }

    #[test]
    fn layer_examples() {
        let dec = layer_decompose(&func(&[(0, 5.0)])).unwrap();
        assert_eq!(dec.layers.len(), 1);
        assert_eq!(dec.layers[0].level, 2);
        assert_eq!(dec.layers[0].profile.get(&pt(0)), 1.25);

        let ind = func(&[(0, 1.0), (3, 1.0), (4, 1.0)]);
        let dec = layer_decompose(&ind).unwrap();
        assert_eq!(dec.layers.len(), 1);
        assert_eq!(dec.layers[0].level, 0);
        assert_eq!(dec.layers[0].profile, ind);

        let dec = layer_decompose(&func(&[(0, 1.0), (1, 2.5)])).unwrap();
        assert_eq!(dec.layers.iter().map(|l| l.level).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(dec.layers[1].profile.get(&pt(1)), 1.25);
        assert_eq!(dec.layers[0].set.elements(), &[pt(0)]);
    }

    #[test]
    fn layer_rejects_bad_input() {
        assert!(layer_decompose(&SparseFunction::zero(z1())).is_err());
        assert!(layer_decompose(&func(&[(0, -1.0)])).is_err());
    }

    #[test]
    fn dyadic_boundaries_are_lower_closed() {
        assert_eq!(dyadic_level(1.0), 0);
        assert_eq!(dyadic_level(2.0), 1);
        assert_eq!(dyadic_level(1.9999999999999998), 0);
        assert_eq!(dyadic_level(0.5), -1);
        assert_eq!(dyadic_level(0.75), -1);
        assert_eq!(dyadic_level(1e-300), -997);
    }

    #[test]
    fn kappa_examples() {
        let mut entries = vec![(0, 8.0)];
        entries.extend((1..=100).map(|x| (x, 1.0)));
        let dec = layer_decompose(&func(&entries)).unwrap();
        let sel = kappa_select(&dec, 2.0).unwrap();
        assert_eq!(sel.kappa, 0);
        assert!((sel.score - 10.0).abs() < 1e-12);

        let dec = layer_decompose(&func(&[(0, 1.0), (5, 1.0)])).unwrap();
        let sel = kappa_select(&dec, 3.0).unwrap();
        assert_eq!(sel.kappa, 0);
        assert!((sel.rho_hat - 1.0).abs() < 1e-15);

        // Four points at level 0 score 4^(1/2) = 2, one point at level 1 scores 2.
        let dec = layer_decompose(&func(&[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0), (4, 2.0)])).unwrap();
        assert_eq!(kappa_select(&dec, 2.0).unwrap().kappa, 0);

        assert!(kappa_select(&LayerDecomposition { layers: vec![] }, 2.0).is_err());
    }

    #[test]
    fn lorentz_examples() {
        let d = func(&[(3, 1.0)]);
        for (p, r) in [(1.5, 2.0), (2.0, 4.0), (3.0, 1.0)] {
            for m in [LorentzMethod::Rearrangement, LorentzMethod::LayerProxy] {
                assert!((lorentz_norm(&d, p, r, m).unwrap() - 1.0).abs() < 1e-15);
            }
        }
        let f = func(&[(0, 0.3), (1, 2.2), (2, 7.0), (5, 1.1)]);
        let a = lorentz_norm(&f, 2.5, 2.5, LorentzMethod::Rearrangement).unwrap();
        assert!((a - lp_norm(&f, 2.5).unwrap()).abs() < 1e-13 * a);

        let ind = func(&[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)]);
        let v = lorentz_norm(&ind, 2.0, 4.0, LorentzMethod::Rearrangement).unwrap();
        assert!((v - 10f64.powf(0.25)).abs() < 1e-14);
        assert!(lorentz_norm(&ind, 1.0, 2.0, LorentzMethod::Rearrangement).is_err());
    }

    #[test]
    fn translate_examples() {
        let f = func(&[(0, 1.0), (2, 3.0)]);
        assert_eq!(translate(&f, &pt(0)).unwrap(), f);
        assert_eq!(translate(&func(&[(0, 1.0)]), &pt(3)).unwrap(), func(&[(3, 1.0)]));

        let f2 = GroupDescriptor::Free { rank: 2 };
        let d = SparseFunction::delta(f2, GroupElement::word([2]), 1.0).unwrap();
        let t = translate(&d, &GroupElement::word([1])).unwrap();
        assert_eq!(t.support().elements(), &[GroupElement::word([2, 1])]);
        assert!(translate(&f, &GroupElement::cyclic(0)).is_err());
    }

    #[test]
    fn power_examples() {
        let f = func(&[(0, 4.0)]);
        assert_eq!(pointwise_power(&f, 1.0).unwrap(), f);
        assert_eq!(pointwise_power(&f, 0.5).unwrap(), func(&[(0, 2.0)]));
        assert!(pointwise_power(&func(&[(0, -1.0)]), 0.5).is_err());
        assert!(pointwise_power(&f, 0.0).is_err());
    }

    #[test]
    fn json_round_trip_complex() {
        let g = GroupDescriptor::Lattice { dim: 2 };
        let f = SparseFunction::from_entries(
            g,
            [
                (GroupElement::lattice(vec![0, 1]), Complex64::new(1.0, -2.0)),
                (GroupElement::lattice(vec![-3, 0]), Complex64::new(0.5, 0.0)),
            ],
        )
        .unwrap();
        let v = f.to_json();
        assert_eq!(v["mode"], "complex");
        assert_eq!(SparseFunction::<Complex64>::from_json(&v).unwrap(), f);
        assert!(SparseFunction::<f64>::from_json(&v).is_err());
    }

    #[test]
    fn inline_syntax() {
        let f = SparseFunction::<f64>::parse_inline(z1(), "-1=1; 0=2;1=1").unwrap();
        assert_eq!(f, func(&[(-1, 1.0), (0, 2.0), (1, 1.0)]));
        let free = GroupDescriptor::Free { rank: 2 };
        let w = SparseFunction::<f64>::parse_inline(free, "+1-2=0.5").unwrap();
        assert_eq!(w.get(&GroupElement::word([1, -2])), 0.5);
        assert!(SparseFunction::<f64>::parse_inline(z1(), "3").is_err());
    }
}
