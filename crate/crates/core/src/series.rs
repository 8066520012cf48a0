//! Finite-support generalized/mixed power series with exact rational
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exponents::{self, ExponentVector, VariableSignature};
use crate::rational::{self, Rational};

/// `Σ c_γ X^γ` with finitely many nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenSeries {
    sig: VariableSignature,
    terms: BTreeMap<ExponentVector, Rational>,
}

/// `F = X^γ · U` with `U(0) ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalDecomposition {
    pub monomial_exponent: ExponentVector,
    pub unit: GenSeries,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normality {
    Normal(NormalDecomposition),
    /// Two distinct minimal support elements, in canonical order.
    NotNormal(ExponentVector, ExponentVector),
    Zero,
}

impl Normality {
    pub fn is_normal_or_zero(&self) -> bool {
        !matches!(self, Normality::NotNormal(..))
    }
}

impl GenSeries {
    pub fn zero(sig: &VariableSignature) -> Self {
        Self {
            sig: sig.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(sig: &VariableSignature, c: Rational) -> Self {
        Self::monomial(sig, ExponentVector::zero(sig.len()), c).expect("zero exponent is valid")
    }

    pub fn one(sig: &VariableSignature) -> Self {
        Self::constant(sig, Rational::one())
    }

    pub fn monomial(sig: &VariableSignature, exp: ExponentVector, c: Rational) -> Result<Self> {
        exp.check_signature(sig)?;
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Ok(Self {
            sig: sig.clone(),
            terms,
        })
    }

    /// The coordinate function of variable `index`.
    pub fn variable(sig: &VariableSignature, index: usize) -> Result<Self> {
        sig.check_index(index)?;
        Self::monomial(sig, ExponentVector::unit(sig.len(), index), Rational::one())
    }

    /// Builds a series from `(coefficient, exponent)` terms, summing repeats.
    pub fn from_terms<I>(sig: &VariableSignature, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, ExponentVector)>,
    {
        let mut out = Self::zero(sig);
        for (c, e) in terms {
            e.check_signature(sig)?;
            out.add_term(e, c);
        }
        Ok(out)
    }

    /// Test and example helper: integer-over-integer coefficients and
    /// exponents, e.g. `[((1,1), &[(1,2),(0,1)])]` for `X1^{1/2}`.
    pub fn from_frac_terms(sig: &VariableSignature, terms: &[((i64, i64), &[(i64, i64)])]) -> Result<Self> {
        Self::from_terms(
            sig,
            terms
                .iter()
                .map(|&((p, q), e)| (rational::frac(p, q), ExponentVector::from_fracs(e))),
        )
    }

    pub fn signature(&self) -> &VariableSignature {
        &self.sig
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &ExponentVector) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&ExponentVector::zero(self.sig.len()))
    }

    pub fn support(&self) -> impl Iterator<Item = &ExponentVector> {
        self.terms.keys()
    }

    /// Replaces the polyradius while keeping the terms.
    pub fn with_signature(&self, sig: &VariableSignature) -> Result<Self> {
        if !self.sig.same_layout(sig) {
            return Err(Error::Signature(format!("cannot move series from {} to {}", self.sig, sig)));
        }
        Ok(Self {
            sig: sig.clone(),
            terms: self.terms.clone(),
        })
    }

    pub(crate) fn add_term(&mut self, exp: ExponentVector, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.sig.same_layout(&other.sig) {
            Ok(())
        } else {
            Err(Error::Signature(format!("{} vs {}", self.sig, other.sig)))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.sig);
        }
        Self {
            sig: self.sig.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.sig);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.sig);
        for _ in 0..k {
            acc = acc.mul(self).expect("same signature");
        }
        acc
    }

    /// Multiplies by the monomial `X^exp`.
    pub fn mul_monomial(&self, exp: &ExponentVector) -> Self {
        Self {
            sig: self.sig.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.add(exp), c.clone())).collect(),
        }
    }

    /// Product of a list of series sharing one signature (empty → 1).
    pub fn product<'a, I>(sig: &VariableSignature, factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a GenSeries>,
    {
        factors
            .into_iter()
            .try_fold(Self::one(sig), |acc, f| acc.mul(f))
    }

    /// Exact division by `X^exp`, when every support element dominates it.
    pub fn div_monomial(&self, exp: &ExponentVector) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(e.checked_sub(exp)?, c.clone());
        }
        Some(Self {
            sig: self.sig.clone(),
            terms,
        })
    }

    pub fn min_support(&self) -> Vec<ExponentVector> {
        exponents::min_elements(self.terms.keys())
    }

    pub fn normal_decompose(&self) -> Normality {
        if self.is_zero() {
            return Normality::Zero;
        }
        let mins = self.min_support();
        if mins.len() > 1 {
            return Normality::NotNormal(mins[0].clone(), mins[1].clone());
        }
        let gamma = mins.into_iter().next().expect("nonzero series has a minimal exponent");
        let unit = self
            .div_monomial(&gamma)
            .expect("unique minimal exponent divides every support element");
        Normality::Normal(NormalDecomposition {
            monomial_exponent: gamma,
            unit,
        })
    }

    pub fn is_normal(&self) -> bool {
        matches!(self.normal_decompose(), Normality::Normal(_))
    }

    /// Order in `Y_j` of `F(0, …, 0, Y_j, 0, …)`; `None` when that
    /// restriction vanishes. `j` counts standard variables from 0.
    pub fn y_regularity_order(&self, j: usize) -> Result<Option<u32>> {
        if j >= self.sig.n() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.sig.n(),
            });
        }
        let pos = self.sig.m() + j;
        let order = self
            .terms
            .keys()
            .filter(|e| e.entries().iter().enumerate().all(|(k, v)| k == pos || v.is_zero()))
            .map(|e| e.get(pos).to_integer())
            .min();
        Ok(order.map(|o| u32::try_from(o).expect("standard exponent fits in u32")))
    }

    /// `x_i ∂F/∂x_i`: termwise `c X^γ ↦ c γ_i X^γ`.
    pub fn log_derivative(&self, i: usize) -> Result<Self> {
        self.sig.check_index(i)?;
        let mut out = Self::zero(&self.sig);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * e.get(i));
        }
        Ok(out)
    }

    /// `∂F/∂x_i`, defined when every support element has `γ_i = 0` or
    /// `γ_i ≥ 1` (always the case for standard variables).
    pub fn derivative(&self, i: usize) -> Result<Self> {
        self.sig.check_index(i)?;
        let one = Rational::one();
        let mut out = Self::zero(&self.sig);
        for (e, c) in &self.terms {
            let ei = e.get(i);
            if ei.is_zero() {
                continue;
            }
            if *ei < one {
                return Err(Error::InvalidExponent(format!(
                    "∂/∂{} of X^{} leaves the series class",
                    self.sig.var_name(i),
                    e
                )));
            }
            let mut v = e.entries().to_vec();
            v[i] -= &one;
            out.add_term(ExponentVector::from_raw(v), c * ei);
        }
        Ok(out)
    }

    /// Moves the series into a larger signature by placing its variables at
    /// the positions `slots` (one per current variable).
    pub fn embed(&self, target: &VariableSignature, slots: &[usize]) -> Result<Self> {
        if slots.len() != self.sig.len() {
            return Err(Error::Signature("embedding slot count mismatch".into()));
        }
        for &s in slots {
            target.check_index(s)?;
        }
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut v = vec![Rational::zero(); target.len()];
            for (k, &s) in slots.iter().enumerate() {
                v[s] = e.get(k).clone();
            }
            let ev = ExponentVector::from_raw(v);
            ev.check_signature(target)?;
            out.add_term(ev, c.clone());
        }
        Ok(out)
    }

    /// Checks that `point` lies in the closed polydisk and that generalized
    /// coordinates are nonnegative.
    pub fn check_point(sig: &VariableSignature, point: &[f64]) -> Result<()> {
        if point.len() != sig.len() {
            return Err(Error::Signature(format!(
                "point has {} coordinates, signature has {}",
                point.len(),
                sig.len()
            )));
        }
        for (k, (&x, r)) in point.iter().zip(sig.radius()).enumerate() {
            let r = rational::to_f64(r) * (1.0 + 1e-12);
            if !x.is_finite() {
                return Err(Error::Domain(format!("{} is not finite", sig.var_name(k))));
            }
            if k < sig.m() && x < 0.0 {
                return Err(Error::Domain(format!("{} = {x} is negative", sig.var_name(k))));
            }
            if x.abs() > r {
                return Err(Error::Domain(format!(
                    "{} = {x} outside radius {r}",
                    sig.var_name(k)
                )));
            }
        }
        Ok(())
    }

    /// Numeric value at `point`, summing in canonical exponent order.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        Self::check_point(&self.sig, point)?;
        Ok(self.eval_unchecked(point))
    }

    /// Evaluation without the domain check; negative bases with fractional
    /// exponents yield NaN.
    pub fn eval_unchecked(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = rational::to_f64(c);
            for (k, ek) in e.entries().iter().enumerate() {
                if ek.is_zero() {
                    continue;
                }
                t *= if ek.is_integer() {
                    point[k].powi(ek.to_integer().try_into().expect("exponent fits in i32"))
                } else {
                    point[k].powf(rational::to_f64(ek))
                };
            }
            acc += t;
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for GenSeries {
    /// Human-readable form, e.g. `x1^1/2 - 3*x1*y1^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let a = c.abs();
            let mut factors: Vec<String> = Vec::new();
            for (idx, ei) in e.entries().iter().enumerate() {
                if ei.is_zero() {
                    continue;
                }
                let name = self.sig.var_name(idx);
                if ei.is_one() {
                    factors.push(name);
                } else {
                    factors.push(format!("{}^{}", name, rational::format(ei)));
                }
            }
            if factors.is_empty() {
                write!(f, "{}", rational::format(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", rational::format(&a))?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn sig2() -> VariableSignature {
        VariableSignature::unit(2, 0)
    }

    fn s(sig: &VariableSignature, t: &[((i64, i64), &[(i64, i64)])]) -> GenSeries {
        GenSeries::from_frac_terms(sig, t).unwrap()
    }

    #[test]
    fn addition_examples() {
        let g = sig2();
        let f = s(&g, &[((1, 1), &[(1, 1), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])]);
        let h = s(&g, &[((-1, 1), &[(0, 1), (1, 1)])]);
        assert_eq!(f.add(&h).unwrap(), GenSeries::variable(&g, 0).unwrap());
        let a = s(&g, &[((2, 1), &[(1, 2), (0, 1)])]);
        let b = s(&g, &[((3, 1), &[(1, 2), (0, 1)])]);
        assert_eq!(a.add(&b).unwrap(), s(&g, &[((5, 1), &[(1, 2), (0, 1)])]));
        assert_eq!(f.add(&GenSeries::zero(&g)).unwrap(), f);
        let other = GenSeries::zero(&VariableSignature::unit(1, 1));
        assert!(matches!(f.add(&other), Err(Error::Signature(_))));
    }

    #[test]
    fn multiplication_examples() {
        let g = sig2();
        let r = s(&g, &[((1, 1), &[(1, 2), (0, 1)])]);
        assert_eq!(r.mul(&r).unwrap(), GenSeries::variable(&g, 0).unwrap());
        let x1 = GenSeries::variable(&g, 0).unwrap();
        let x2 = GenSeries::variable(&g, 1).unwrap();
        let lhs = x1.sub(&x2).unwrap().mul(&x1.add(&x2).unwrap()).unwrap();
        // Expanded by hand: X1² + X1X2 − X2X1 − X2².
        let rhs = s(&g, &[((1, 1), &[(2, 1), (0, 1)]), ((-1, 1), &[(0, 1), (2, 1)])]);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.mul(&GenSeries::one(&g)).unwrap(), lhs);
    }

    #[test]
    fn normal_decomposition_examples() {
        let g = sig2();
        let f = s(&g, &[((1, 1), &[(1, 2), (0, 1)]), ((1, 1), &[(1, 1), (1, 1)])]);
        match f.normal_decompose() {
            Normality::Normal(nd) => {
                assert_eq!(nd.monomial_exponent, ExponentVector::from_fracs(&[(1, 2), (0, 1)]));
                assert_eq!(
                    nd.unit,
                    s(&g, &[((1, 1), &[(0, 1), (0, 1)]), ((1, 1), &[(1, 2), (1, 1)])])
                );
                assert_eq!(nd.unit.mul_monomial(&nd.monomial_exponent), f);
            }
            other => panic!("expected normal, got {other:?}"),
        }
        let x1_plus_x2 = s(&g, &[((1, 1), &[(1, 1), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])]);
        assert_eq!(
            x1_plus_x2.normal_decompose(),
            Normality::NotNormal(ExponentVector::from_ints(&[0, 1]), ExponentVector::from_ints(&[1, 0]))
        );
        let c = GenSeries::constant(&g, int(3));
        match c.normal_decompose() {
            Normality::Normal(nd) => {
                assert!(nd.monomial_exponent.is_zero());
                assert_eq!(nd.unit, c);
            }
            other => panic!("expected normal, got {other:?}"),
        }
        assert_eq!(GenSeries::zero(&g).normal_decompose(), Normality::Zero);
    }

    #[test]
    fn regularity_order_examples() {
        let g = VariableSignature::unit(1, 1);
        let f = s(&g, &[((1, 1), &[(1, 1), (0, 1)]), ((1, 1), &[(0, 1), (2, 1)])]);
        assert_eq!(f.y_regularity_order(0).unwrap(), Some(2));
        let h = s(&g, &[((1, 1), &[(1, 1), (1, 1)])]);
        assert_eq!(h.y_regularity_order(0).unwrap(), None);
        let u = s(&g, &[((1, 1), &[(0, 1), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])]);
        assert_eq!(u.y_regularity_order(0).unwrap(), Some(0));
        assert!(u.y_regularity_order(1).is_err());
    }

    #[test]
    fn log_derivative_examples() {
        let g = sig2();
        let f = s(&g, &[((1, 1), &[(1, 2), (1, 1)])]);
        assert_eq!(f.log_derivative(0).unwrap(), f.scale(&frac(1, 2)));
        assert!(GenSeries::constant(&g, int(4)).log_derivative(0).unwrap().is_zero());
        let h = s(&g, &[((1, 1), &[(1, 1), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])]);
        assert_eq!(h.log_derivative(0).unwrap(), GenSeries::variable(&g, 0).unwrap());
        assert!(h.log_derivative(2).is_err());
    }

    #[test]
    fn plain_derivative() {
        let g = VariableSignature::unit(1, 1);
        let f = s(&g, &[((3, 1), &[(1, 2), (2, 1)])]);
        assert_eq!(f.derivative(1).unwrap(), s(&g, &[((6, 1), &[(1, 2), (1, 1)])]));
        assert!(f.derivative(0).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let g = VariableSignature::uniform(2, 0, int(8));
        let f = s(&g, &[((1, 1), &[(3, 2), (0, 1)])]);
        assert!((f.eval(&[4.0, 0.0]).unwrap() - 8.0).abs() < 1e-12);
        let d = s(&g, &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 1), &[(0, 1), (1, 1)])]);
        assert_eq!(d.eval(&[1.0, 1.0]).unwrap(), 0.0);
        let gy = VariableSignature::unit(0, 1);
        let u = s(&gy, &[((1, 1), &[(0, 1)]), ((1, 1), &[(1, 1)])]);
        assert!((u.eval(&[-0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(f.eval(&[-1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(f.eval(&[9.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn display_form() {
        let g = VariableSignature::unit(1, 1);
        let f = s(&g, &[((1, 1), &[(1, 2), (0, 1)]), ((-3, 1), &[(1, 1), (2, 1)])]);
        assert_eq!(f.to_string(), "x1^1/2 - 3*x1*y1^2");
    }
}
