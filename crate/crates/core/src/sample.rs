//! Seeded random functions for property checks and search restarts.

use num_complex::Complex64;
use rand::Rng;

use crate::function::SparseFunction;
use crate::group::{GroupDescriptor, GroupElement, Word};

/// A random element: lattice coordinates in `[-spread, spread]`, free words of
/// length at most `spread`, or a uniform residue.
pub fn random_element<R: Rng + ?Sized>(rng: &mut R, g: &GroupDescriptor, spread: i64) -> GroupElement {
    match *g {
        GroupDescriptor::Lattice { dim } => {
            GroupElement::Lattice((0..dim).map(|_| rng.random_range(-spread..=spread)).collect())
        }
        GroupDescriptor::Free { rank } => {
            let len = rng.random_range(0..=spread.max(0) as usize);
            let mut letters: Vec<i32> = Vec::with_capacity(len);
            while letters.len() < len {
                let gen = rng.random_range(1..=rank as i32);
                let l = if rng.random_bool(0.5) { gen } else { -gen };
                if letters.last() != Some(&-l) {
                    letters.push(l);
                }
            }
            GroupElement::Free(Word::reduce(letters))
        }
        GroupDescriptor::Cyclic { order } => GroupElement::Cyclic(rng.random_range(0..order)),
    }
}

/// Positive value spread over a few dyadic scales.
fn random_magnitude<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random_range(0.02..1.0);
    if rng.random_bool(0.3) {
        u.powi(3)
    } else {
        u
    }
}

/// Nonnegative function with up to `max_support` points (at least one).
pub fn random_nonnegative<R: Rng + ?Sized>(
    rng: &mut R,
    g: &GroupDescriptor,
    max_support: usize,
    spread: i64,
) -> SparseFunction {
    let n = rng.random_range(1..=max_support.max(1));
    let entries: Vec<_> = (0..n)
        .map(|_| (random_element(rng, g, spread), random_magnitude(rng)))
        .collect();
    SparseFunction::from_entries(*g, entries).expect("sampled elements are valid")
}

/// Real function with random signs.
pub fn random_signed<R: Rng + ?Sized>(
    rng: &mut R,
    g: &GroupDescriptor,
    max_support: usize,
    spread: i64,
) -> SparseFunction {
    let f = random_nonnegative(rng, g, max_support, spread);
    let entries: Vec<_> = f
        .iter()
        .map(|(x, v)| (x.clone(), if rng.random_bool(0.5) { *v } else { -*v }))
        .collect();
    SparseFunction::from_entries(*g, entries).expect("sampled elements are valid")
}

/// Complex function on `ℤ^dim` with Gaussian-like coefficients.
pub fn random_complex_lattice<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    max_support: usize,
    spread: i64,
) -> SparseFunction<Complex64> {
    let g = GroupDescriptor::Lattice { dim };
    let n = rng.random_range(1..=max_support.max(1));
    let entries: Vec<_> = (0..n)
        .map(|_| {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (random_element(rng, &g, spread), z)
        })
        .collect();
    let f = SparseFunction::from_entries(g, entries).expect("sampled elements are valid");
    if f.is_zero() {
        SparseFunction::delta(g, g.identity(), Complex64::new(1.0, 0.0)).expect("identity is valid")
    } else {
        f
    }
}
