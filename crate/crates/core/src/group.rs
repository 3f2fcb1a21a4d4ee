//! Canonical element arithmetic for the three supported group families and
//! finite-set sumset combinatorics.
//!
//! Groups are written additively even when they are not Abelian: for the free
//! group `a + b` is the reduced concatenation of the words `a` then `b`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Default cap on the number of pairs enumerated by a sumset.
pub const DEFAULT_SUMSET_LIMIT: usize = 1_000_000;

/// Which discrete group an element or function lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupDescriptor {
    /// The integer lattice of the given dimension.
    Lattice { dim: usize },
    /// The free group on `rank` generators.
    Free { rank: u32 },
    /// The cyclic group of the given order.
    Cyclic { order: u64 },
}

/// A reduced word in a free group.
///
/// Letters are stored in reading order; `+i` is generator `i` (1-based) and
/// `-i` its inverse. No two adjacent letters cancel.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<i32>);

impl Word {
    /// Builds the reduced form of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if l == 0 {
                continue;
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reduced product `self · other`. Both inputs are reduced, so cancellation
    /// only happens at the seam.
    pub fn concat(&self, other: &Word) -> Word {
        let mut left = self.0.len();
        let mut right = 0;
        while left > 0 && right < other.0.len() && self.0[left - 1] == -other.0[right] {
            left -= 1;
            right += 1;
        }
        let mut out = Vec::with_capacity(left + other.0.len() - right);
        out.extend_from_slice(&self.0[..left]);
        out.extend_from_slice(&other.0[right..]);
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    fn is_reduced(&self) -> bool {
        !self.0.contains(&0) && self.0.windows(2).all(|w| w[0] != -w[1])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "{l:+}")?;
        }
        Ok(())
    }
}

/// An element of one of the supported groups, always in canonical form.
///
/// The derived order is lexicographic on the canonical encoding, which makes
/// set and map iteration deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Lattice(Vec<i64>),
    Free(Word),
    Cyclic(u64),
}

impl GroupElement {
    /// Lattice element from its coordinates.
    pub fn lattice(coords: impl Into<Vec<i64>>) -> Self {
        GroupElement::Lattice(coords.into())
    }

    /// Free-group element from an arbitrary (possibly unreduced) letter list.
    pub fn word(letters: impl IntoIterator<Item = i32>) -> Self {
        GroupElement::Free(Word::reduce(letters))
    }

    pub fn cyclic(residue: u64) -> Self {
        GroupElement::Cyclic(residue)
    }
}

impl GroupDescriptor {
    pub fn lattice(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("lattice dimension must be at least 1"));
        }
        Ok(GroupDescriptor::Lattice { dim })
    }

    pub fn free(rank: u32) -> Result<Self> {
        if rank == 0 || rank > i32::MAX as u32 {
            return Err(Error::invalid("free group needs at least one generator"));
        }
        Ok(GroupDescriptor::Free { rank })
    }

    pub fn cyclic(order: u64) -> Result<Self> {
        if order < 2 {
            return Err(Error::invalid("cyclic group order must be at least 2"));
        }
        Ok(GroupDescriptor::Cyclic { order })
    }

    /// Lattices and free groups have no nontrivial finite subgroups; cyclic
    /// groups are finite.
    pub fn is_torsion_free(&self) -> bool {
        !matches!(self, GroupDescriptor::Cyclic { .. })
    }

    pub fn identity(&self) -> GroupElement {
        match *self {
            GroupDescriptor::Lattice { dim } => GroupElement::Lattice(vec![0; dim]),
            GroupDescriptor::Free { .. } => GroupElement::Free(Word::identity()),
            GroupDescriptor::Cyclic { .. } => GroupElement::Cyclic(0),
        }
    }

    /// Checks that `a` is a canonical element of this group.
    pub fn validate(&self, a: &GroupElement) -> Result<()> {
        let ok = match (self, a) {
            (GroupDescriptor::Lattice { dim }, GroupElement::Lattice(v)) => v.len() == *dim,
            (GroupDescriptor::Free { rank }, GroupElement::Free(w)) => {
                w.is_reduced() && w.0.iter().all(|l| l.unsigned_abs() <= *rank)
            }
            (GroupDescriptor::Cyclic { order }, GroupElement::Cyclic(r)) => r < order,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                expected: self.to_string(),
                found: format!("{a:?}"),
            })
        }
    }

    /// Group product `a + b` in canonical form.
    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.add_unchecked(a, b))
    }

    /// Inverse of `a`.
    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        Ok(self.neg_unchecked(a))
    }

    /// Product of two elements already known to belong to this group.
    pub(crate) fn add_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (self, a, b) {
            (GroupDescriptor::Lattice { .. }, GroupElement::Lattice(x), GroupElement::Lattice(y)) => {
                GroupElement::Lattice(x.iter().zip(y).map(|(u, v)| u + v).collect())
            }
            (GroupDescriptor::Free { .. }, GroupElement::Free(x), GroupElement::Free(y)) => {
                GroupElement::Free(x.concat(y))
            }
            (GroupDescriptor::Cyclic { order }, GroupElement::Cyclic(x), GroupElement::Cyclic(y)) => {
                GroupElement::Cyclic(((*x as u128 + *y as u128) % *order as u128) as u64)
            }
            _ => unreachable!("elements validated against {self}"),
        }
    }

    pub(crate) fn neg_unchecked(&self, a: &GroupElement) -> GroupElement {
        match (self, a) {
            (GroupDescriptor::Lattice { .. }, GroupElement::Lattice(x)) => {
                GroupElement::Lattice(x.iter().map(|u| -u).collect())
            }
            (GroupDescriptor::Free { .. }, GroupElement::Free(w)) => GroupElement::Free(w.inverse()),
            (GroupDescriptor::Cyclic { order }, GroupElement::Cyclic(x)) => GroupElement::Cyclic((order - x) % order),
            _ => unreachable!("element validated against {self}"),
        }
    }

    /// Parses the inline element syntax: lattice `"x,y,z"`, free-group words
    /// `"+1+2-1"` (or `"e"` for the identity), cyclic `"k"` (reduced mod n).
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let elem = match *self {
            GroupDescriptor::Lattice { dim } => {
                let s = s.trim_start_matches('(').trim_end_matches(')');
                let coords = s
                    .split(',')
                    .map(|t| t.trim().parse::<i64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::invalid(format!("bad lattice element {s:?}: {e}")))?;
                if coords.len() != dim {
                    return Err(Error::invalid(format!(
                        "lattice element {s:?} has {} coordinates, expected {dim}",
                        coords.len()
                    )));
                }
                GroupElement::Lattice(coords)
            }
            GroupDescriptor::Free { .. } => {
                if s.is_empty() || s == "e" {
                    GroupElement::Free(Word::identity())
                } else {
                    GroupElement::Free(Word::reduce(parse_letters(s)?))
                }
            }
            GroupDescriptor::Cyclic { order } => {
                let k: i128 = s
                    .parse()
                    .map_err(|e| Error::invalid(format!("bad residue {s:?}: {e}")))?;
                GroupElement::Cyclic(k.rem_euclid(order as i128) as u64)
            }
        };
        self.validate(&elem)?;
        Ok(elem)
    }

    /// Inverse of [`parse_element`](Self::parse_element).
    pub fn format_element(&self, a: &GroupElement) -> String {
        match a {
            GroupElement::Lattice(v) => v.iter().map(i64::to_string).collect::<Vec<_>>().join(","),
            GroupElement::Free(w) => w.to_string(),
            GroupElement::Cyclic(r) => r.to_string(),
        }
    }

    /// JSON encoding of an element: a number for `Z:1` and cyclic groups, an
    /// array for higher lattices, a word string for free groups.
    pub fn element_to_json(&self, a: &GroupElement) -> Value {
        match a {
            GroupElement::Lattice(v) if v.len() == 1 => Value::from(v[0]),
            GroupElement::Lattice(v) => Value::from(v.clone()),
            GroupElement::Free(w) => Value::from(w.to_string()),
            GroupElement::Cyclic(r) => Value::from(*r),
        }
    }

    pub fn element_from_json(&self, v: &Value) -> Result<GroupElement> {
        let bad = || Error::invalid(format!("element {v} does not encode a member of {self}"));
        let elem = match (*self, v) {
            (GroupDescriptor::Lattice { .. }, Value::Number(n)) => {
                GroupElement::Lattice(vec![n.as_i64().ok_or_else(bad)?])
            }
            (GroupDescriptor::Lattice { .. }, Value::Array(items)) => GroupElement::Lattice(
                items
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(bad))
                    .collect::<Result<_>>()?,
            ),
            (GroupDescriptor::Free { .. }, Value::String(s)) => return self.parse_element(s),
            (GroupDescriptor::Cyclic { .. }, Value::Number(n)) => GroupElement::Cyclic(n.as_u64().ok_or_else(bad)?),
            _ => return Err(bad()),
        };
        self.validate(&elem)?;
        Ok(elem)
    }
}

fn parse_letters(s: &str) -> Result<Vec<i32>> {
    let mut letters = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let sign = match bytes[i] {
            b'+' => 1,
            b'-' => -1,
            _ => return Err(Error::invalid(format!("word {s:?}: expected '+' or '-' at {i}"))),
        };
        let start = i + 1;
        let mut end = start;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        let idx: i32 = s[start..end]
            .parse()
            .map_err(|_| Error::invalid(format!("word {s:?}: missing generator index at {start}")))?;
        if idx == 0 {
            return Err(Error::invalid(format!("word {s:?}: generators are numbered from 1")));
        }
        letters.push(sign * idx);
        i = end;
    }
    Ok(letters)
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Lattice { dim } => write!(f, "Z:{dim}"),
            GroupDescriptor::Free { rank } => write!(f, "F:{rank}"),
            GroupDescriptor::Cyclic { order } => write!(f, "C:{order}"),
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    /// `Z:d`, `F:k` or `C:n`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("group {s:?}: expected KIND:PARAM")))?;
        let param: u64 = param
            .trim()
            .parse()
            .map_err(|e| Error::invalid(format!("group {s:?}: {e}")))?;
        match kind.trim() {
            "Z" | "z" => GroupDescriptor::lattice(param as usize),
            "F" | "f" => GroupDescriptor::free(u32::try_from(param).map_err(|e| Error::invalid(e.to_string()))?),
            "C" | "c" => GroupDescriptor::cyclic(param),
            other => Err(Error::invalid(format!("unknown group family {other:?}"))),
        }
    }
}

impl TryFrom<String> for GroupDescriptor {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupDescriptor> for String {
    fn from(g: GroupDescriptor) -> String {
        g.to_string()
    }
}

/// A duplicate-free, canonically ordered finite subset of one group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSubset {
    group: GroupDescriptor,
    elements: Vec<GroupElement>,
}

impl FiniteSubset {
    pub fn new(group: GroupDescriptor, elements: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let set: BTreeSet<GroupElement> = elements.into_iter().collect();
        for e in &set {
            group.validate(e)?;
        }
        Ok(FiniteSubset {
            group,
            elements: set.into_iter().collect(),
        })
    }

    pub(crate) fn from_sorted_unchecked(group: GroupDescriptor, elements: Vec<GroupElement>) -> Self {
        FiniteSubset { group, elements }
    }

    /// Parses a comma-separated list of lattice points or residues, or a
    /// `;`-separated list for any group (needed for `Z:d`, d > 1).
    pub fn parse(group: GroupDescriptor, s: &str) -> Result<Self> {
        let parts: Vec<&str> = match group {
            GroupDescriptor::Lattice { dim } if dim > 1 => s.split(';').collect(),
            _ if s.contains(';') => s.split(';').collect(),
            _ => s.split(',').collect(),
        };
        let elems = parts
            .into_iter()
            .filter(|p| !p.trim().is_empty())
            .map(|p| group.parse_element(p))
            .collect::<Result<Vec<_>>>()?;
        FiniteSubset::new(group, elems)
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        self.elements.binary_search(e).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.elements.iter()
    }

    /// Lattice box `[lo, hi]^dim`.
    pub fn lattice_box(dim: usize, lo: i64, hi: i64) -> Result<Self> {
        let group = GroupDescriptor::lattice(dim)?;
        if lo > hi {
            return Err(Error::invalid("empty box"));
        }
        let mut points = vec![Vec::with_capacity(dim)];
        for _ in 0..dim {
            points = points
                .into_iter()
                .flat_map(|p| {
                    (lo..=hi).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        FiniteSubset::new(group, points.into_iter().map(GroupElement::Lattice))
    }

    /// All reduced words of length at most `max_len` in the free group of the
    /// given rank.
    pub fn free_ball(rank: u32, max_len: usize) -> Result<Self> {
        let group = GroupDescriptor::free(rank)?;
        let gens: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
        let mut frontier = vec![Word::identity()];
        let mut all = frontier.clone();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for &g in &gens {
                    if w.0.last() != Some(&-g) {
                        let mut v = w.0.clone();
                        v.push(g);
                        next.push(Word(v));
                    }
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        FiniteSubset::new(group, all.into_iter().map(GroupElement::Free))
    }
}

fn check_same_group(g: &GroupDescriptor, s: &FiniteSubset) -> Result<()> {
    if s.group != *g {
        return Err(Error::GroupMismatch {
            expected: g.to_string(),
            found: s.group.to_string(),
        });
    }
    Ok(())
}

/// `A + B = {a + b}`, deduplicated, in canonical order.
pub fn sumset(g: &GroupDescriptor, a: &FiniteSubset, b: &FiniteSubset, limit: usize) -> Result<FiniteSubset> {
    check_same_group(g, a)?;
    check_same_group(g, b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("sumset operands must be nonempty"));
    }
    let pairs = a.len() as u128 * b.len() as u128;
    if pairs > limit as u128 {
        return Err(Error::ResourceLimit {
            what: "sumset pairs",
            needed: pairs,
            limit: limit as u128,
        });
    }
    let out: BTreeSet<GroupElement> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| g.add_unchecked(x, y)))
        .collect();
    Ok(FiniteSubset::from_sorted_unchecked(*g, out.into_iter().collect()))
}

/// `nT`, the set of all n-fold sums of elements of `T`.
pub fn nfold_sumset(g: &GroupDescriptor, t: &FiniteSubset, n: usize, limit: usize) -> Result<FiniteSubset> {
    if n == 0 {
        return Err(Error::invalid("n-fold sumset needs n >= 1"));
    }
    check_same_group(g, t)?;
    if t.is_empty() {
        return Err(Error::invalid("n-fold sumset of the empty set"));
    }
    let mut acc = t.clone();
    for _ in 1..n {
        acc = sumset(g, &acc, t, limit)?;
    }
    Ok(acc)
}

/// `|A + B| - (|A| + |B| - 1)`; nonnegative in every torsion-free group.
pub fn kemperman_margin(g: &GroupDescriptor, a: &FiniteSubset, b: &FiniteSubset, limit: usize) -> Result<i64> {
    let s = sumset(g, a, b, limit)?;
    Ok(s.len() as i64 - (a.len() as i64 + b.len() as i64 - 1))
}
