//! Exponent vectors over the nonnegative rationals, the componentwise
//! partial order and minimal-element combinatorics on finite supports.
//!
//! Variables are indexed from 0: positions `0..m` are the generalized
//! variables `X`, positions `m..m+n` the standard variables `Y`.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Variable layout of a polydisk: `m` generalized variables on `[0, r_i)`
/// followed by `n` standard variables on `(-r_j, r_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableSignature {
    m: usize,
    n: usize,
    radius: Vec<Rational>,
}

impl VariableSignature {
    pub fn new(m: usize, n: usize, radius: Vec<Rational>) -> Result<Self> {
        if radius.len() != m + n {
            return Err(Error::InvalidSignature(format!(
                "polyradius has {} entries, expected {}",
                radius.len(),
                m + n
            )));
        }
        if let Some(r) = radius.iter().find(|r| !r.is_positive()) {
            return Err(Error::InvalidSignature(format!(
                "radius {} is not positive",
                rational::format(r)
            )));
        }
        Ok(Self { m, n, radius })
    }

    /// Signature with every radius equal to one.
    pub fn unit(m: usize, n: usize) -> Self {
        Self::uniform(m, n, rational::int(1))
    }

    pub fn uniform(m: usize, n: usize, r: Rational) -> Self {
        Self::new(m, n, vec![r; m + n]).expect("uniform radius must be positive")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.m + self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn radius(&self) -> &[Rational] {
        &self.radius
    }

    pub fn is_standard(&self, index: usize) -> bool {
        index >= self.m && index < self.len()
    }

    pub fn is_generalized(&self, index: usize) -> bool {
        index < self.m
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            })
        }
    }

    /// Same variable layout, new radii.
    pub fn with_radius(&self, radius: Vec<Rational>) -> Result<Self> {
        Self::new(self.m, self.n, radius)
    }

    /// Layout equality ignoring radii.
    pub fn same_layout(&self, other: &Self) -> bool {
        self.m == other.m && self.n == other.n
    }

    /// Human label for variable `index`: `x1..xm`, `y1..yn`.
    pub fn var_name(&self, index: usize) -> String {
        if index < self.m {
            format!("x{}", index + 1)
        } else {
            format!("y{}", index - self.m + 1)
        }
    }
}

impl fmt::Display for VariableSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, n={}, r=[", self.m, self.n)?;
        for (k, r) in self.radius.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", rational::format(r))?;
        }
        write!(f, "])")
    }
}

/// A point of `[0, ∞)^{m+n}` with rational entries. Ordered
/// lexicographically, which is the canonical order used for determinism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<Rational>);

impl ExponentVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| e.is_negative()) {
            return Err(Error::InvalidExponent(format!(
                "negative entry {}",
                rational::format(e)
            )));
        }
        Ok(Self(entries))
    }

    pub fn zero(len: usize) -> Self {
        Self(vec![Rational::zero(); len])
    }

    /// Unit vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zero(len);
        v.0[index] = rational::int(1);
        v
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_fracs(entries: &[(i64, i64)]) -> Self {
        Self::new(entries.iter().map(|&(p, q)| rational::frac(p, q)).collect())
            .expect("nonnegative entries")
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        Self::new(entries.iter().map(|&p| rational::int(p)).collect()).expect("nonnegative entries")
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn get(&self, index: usize) -> &Rational {
        &self.0[index]
    }

    /// Builds a vector without the nonnegativity check; callers guarantee it.
    pub(crate) fn from_raw(entries: Vec<Rational>) -> Self {
        debug_assert!(entries.iter().all(|e| !e.is_negative()));
        Self(entries)
    }

    /// Checks length and the mixed-series constraint (standard entries are
    /// natural numbers) against `sig`.
    pub fn check_signature(&self, sig: &VariableSignature) -> Result<()> {
        if self.len() != sig.len() {
            return Err(Error::Signature(format!(
                "exponent has {} entries, signature has {} variables",
                self.len(),
                sig.len()
            )));
        }
        for k in sig.m()..sig.len() {
            if !self.0[k].is_integer() {
                return Err(Error::InvalidExponent(format!(
                    "standard variable {} has non-integral exponent {}",
                    sig.var_name(k),
                    rational::format(&self.0[k])
                )));
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, defined only when `other` is dominated by `self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.len() != other.len() {
            return None;
        }
        let diff: Vec<Rational> = self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect();
        diff.iter().all(|d| !d.is_negative()).then_some(Self(diff))
    }

    /// Sum of the entries (total degree).
    pub fn degree(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, e| acc + e)
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", rational::format(e))?;
        }
        write!(f, ")")
    }
}

/// `a ≤ b` componentwise.
pub fn dominates(a: &ExponentVector, b: &ExponentVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Signature(format!(
            "cannot compare exponents of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.0.iter().zip(&b.0).all(|(x, y)| x <= y))
}

fn leq(a: &ExponentVector, b: &ExponentVector) -> bool {
    a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
}

pub fn comparable(a: &ExponentVector, b: &ExponentVector) -> bool {
    leq(a, b) || leq(b, a)
}

/// Minimal elements of a finite set, in canonical order, without duplicates.
pub fn min_elements<'a, I>(set: I) -> Vec<ExponentVector>
where
    I: IntoIterator<Item = &'a ExponentVector>,
{
    let mut items: Vec<&ExponentVector> = set.into_iter().collect();
    items.sort();
    items.dedup();
    // After a lexicographic sort, anything dominating `a` comes after `a`,
    // so a single forward pass against the kept prefix suffices.
    let mut kept: Vec<ExponentVector> = Vec::new();
    for a in items {
        if !kept.iter().any(|b| leq(b, a)) {
            kept.push(a.clone());
        }
    }
    kept
}

/// All unordered incomparable pairs `(a, b)` with `a < b` lexicographically,
/// listed in lexicographic order of the pairs.
pub fn incomparable_pairs<'a, I>(set: I) -> Vec<(ExponentVector, ExponentVector)>
where
    I: IntoIterator<Item = &'a ExponentVector>,
{
    let mut items: Vec<&ExponentVector> = set.into_iter().collect();
    items.sort();
    items.dedup();
    let mut out = Vec::new();
    for (k, a) in items.iter().enumerate() {
        for b in &items[k + 1..] {
            if !comparable(a, b) {
                out.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(e: &[(i64, i64)]) -> ExponentVector {
        ExponentVector::from_fracs(e)
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&ev(&[(1, 2), (0, 1)]), &ev(&[(1, 1), (1, 1)])).unwrap());
        assert!(!dominates(&ExponentVector::from_ints(&[1, 0]), &ExponentVector::from_ints(&[0, 1])).unwrap());
        assert!(dominates(&ExponentVector::zero(2), &ExponentVector::zero(2)).unwrap());
        assert!(matches!(
            dominates(&ExponentVector::zero(2), &ExponentVector::zero(3)),
            Err(Error::Signature(_))
        ));
    }

    #[test]
    fn min_elements_examples() {
        let s = [
            ExponentVector::from_ints(&[1, 2]),
            ExponentVector::from_ints(&[2, 1]),
            ExponentVector::from_ints(&[2, 2]),
        ];
        assert_eq!(min_elements(&s), vec![s[0].clone(), s[1].clone()]);
        assert!(min_elements(&[]).is_empty());
        let t = [ev(&[(1, 2), (0, 1)]), ev(&[(1, 1), (1, 1)]), ev(&[(0, 1), (3, 1)])];
        assert_eq!(min_elements(&t), vec![t[2].clone(), t[0].clone()]);
    }

    #[test]
    fn incomparable_pair_examples() {
        let s = [
            ExponentVector::from_ints(&[1, 0]),
            ExponentVector::from_ints(&[0, 1]),
            ExponentVector::from_ints(&[1, 1]),
        ];
        assert_eq!(incomparable_pairs(&s), vec![(s[1].clone(), s[0].clone())]);
        assert!(incomparable_pairs(&s[..1]).is_empty());
        let chain = [
            ExponentVector::from_ints(&[0, 0]),
            ExponentVector::from_ints(&[1, 1]),
            ExponentVector::from_ints(&[2, 2]),
        ];
        assert!(incomparable_pairs(&chain).is_empty());
    }

    #[test]
    fn signature_validation() {
        assert!(VariableSignature::new(1, 1, vec![rational::int(1)]).is_err());
        assert!(VariableSignature::new(1, 0, vec![rational::int(0)]).is_err());
        let sig = VariableSignature::unit(1, 1);
        assert!(ev(&[(1, 2), (1, 1)]).check_signature(&sig).is_ok());
        assert!(ev(&[(1, 1), (1, 2)]).check_signature(&sig).is_err());
        assert!(ExponentVector::new(vec![rational::int(-1)]).is_err());
    }
}
