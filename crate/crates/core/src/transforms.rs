//! The elementary-transformation catalog and its two actions: pulling a
//! series back along a map (`F ↦ F ∘ ν`) and pushing points forward.
//!
//! A transform `ν` maps its *source* polydisk to its *target* polydisk; a
//! series living on the target is pulled back to the source. Chains list
//! steps from the root outwards, so `[ν1, ν2]` is the map `ν1 ∘ ν2`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exponents::{ExponentVector, VariableSignature};
use crate::rational::{self, Rational};
use crate::series::GenSeries;

/// Variable indices are 0-based positions in the target signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TransformKind {
    /// `x_i = x_i'^λ`.
    Ramification { i: usize, lambda: Rational },
    /// `y_j = y_j' + c` on a standard variable.
    Translation { j: usize, c: Rational },
    /// `x_j = x_i'^λ x_j'`; critical variable `x_i`.
    BlowupChartA { i: usize, j: usize, lambda: Rational },
    /// `x_i = x_i' x_j'^{1/λ}`; critical variable `x_j`.
    BlowupChartB { i: usize, j: usize, lambda: Rational },
    /// `y_i = +x'_{m+1}`.
    ReflectionPlus { i: usize },
    /// `y_i = -x'_{m+1}`.
    ReflectionMinus { i: usize },
    /// `y_j = -y_j'`; only used to express recenterings.
    SignFlip { j: usize },
    /// Restriction to `x_i = 0`; the source drops variable `i`.
    FaceZero { i: usize },
}

impl TransformKind {
    pub fn name(&self) -> &'static str {
        match self {
            TransformKind::Ramification { .. } => "ramification",
            TransformKind::Translation { .. } => "translation",
            TransformKind::BlowupChartA { .. } => "blowup_a",
            TransformKind::BlowupChartB { .. } => "blowup_b",
            TransformKind::ReflectionPlus { .. } => "reflection_plus",
            TransformKind::ReflectionMinus { .. } => "reflection_minus",
            TransformKind::SignFlip { .. } => "sign_flip",
            TransformKind::FaceZero { .. } => "face_zero",
        }
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, TransformKind::BlowupChartA { .. } | TransformKind::BlowupChartB { .. })
    }

    pub fn is_reflection(&self) -> bool {
        matches!(self, TransformKind::ReflectionPlus { .. } | TransformKind::ReflectionMinus { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElementaryTransform {
    kind: TransformKind,
    source: VariableSignature,
    target: VariableSignature,
}

fn require_generalized(sig: &VariableSignature, i: usize, what: &str) -> Result<()> {
    sig.check_index(i)?;
    if sig.is_generalized(i) {
        Ok(())
    } else {
        Err(Error::Transform(format!("{what} needs a generalized variable, got {}", sig.var_name(i))))
    }
}

fn require_standard(sig: &VariableSignature, i: usize, what: &str) -> Result<()> {
    sig.check_index(i)?;
    if sig.is_standard(i) {
        Ok(())
    } else {
        Err(Error::Transform(format!("{what} needs a standard variable, got {}", sig.var_name(i))))
    }
}

fn require_positive(lambda: &Rational) -> Result<()> {
    if lambda.is_positive() {
        Ok(())
    } else {
        Err(Error::Transform(format!("weight {} must be positive", rational::format(lambda))))
    }
}

fn min_q(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

fn f64_pow(x: f64, e: &Rational) -> f64 {
    if e.is_integer() {
        x.powi(e.to_integer().to_i32().expect("exponent fits in i32"))
    } else {
        x.powf(rational::to_f64(e))
    }
}

impl ElementaryTransform {
    /// Builds `kind` acting into `target`; the source polydisk is derived so
    /// that the image stays inside the target polydisk. Blow-up charts give
    /// the non-critical variable radius 1, which makes the two charts of a
    /// pair meet along `x_j = x_i^λ`.
    pub fn new(kind: TransformKind, target: &VariableSignature) -> Result<Self> {
        let r = target.radius();
        let (m, n) = (target.m(), target.n());
        let source = match &kind {
            TransformKind::Ramification { i, lambda } => {
                require_generalized(target, *i, "ramification")?;
                require_positive(lambda)?;
                let mut rad = r.to_vec();
                rad[*i] = rational::pow_lower(&r[*i], &lambda.recip());
                target.with_radius(rad)?
            }
            TransformKind::Translation { j, c } => {
                require_standard(target, *j, "translation")?;
                let t = &r[*j] - c.abs();
                if !t.is_positive() {
                    return Err(Error::Transform(format!(
                        "translation by {} leaves no room inside radius {}",
                        rational::format(c),
                        rational::format(&r[*j])
                    )));
                }
                let mut rad = r.to_vec();
                rad[*j] = t;
                target.with_radius(rad)?
            }
            TransformKind::BlowupChartA { i, j, lambda } | TransformKind::BlowupChartB { i, j, lambda } => {
                require_generalized(target, *i, "blow-up")?;
                require_generalized(target, *j, "blow-up")?;
                require_positive(lambda)?;
                if i == j {
                    return Err(Error::Transform("blow-up needs two distinct variables".into()));
                }
                let mut rad = r.to_vec();
                if matches!(kind, TransformKind::BlowupChartA { .. }) {
                    rad[*i] = min_q(r[*i].clone(), rational::pow_lower(&r[*j], &lambda.recip()));
                    rad[*j] = Rational::one();
                } else {
                    rad[*j] = min_q(r[*j].clone(), rational::pow_lower(&r[*i], lambda));
                    rad[*i] = Rational::one();
                }
                target.with_radius(rad)?
            }
            TransformKind::ReflectionPlus { i } | TransformKind::ReflectionMinus { i } => {
                require_standard(target, *i, "reflection")?;
                let mut rad: Vec<Rational> = r[..m].to_vec();
                rad.push(r[*i].clone());
                rad.extend(r[m..].iter().enumerate().filter(|(k, _)| m + k != *i).map(|(_, v)| v.clone()));
                VariableSignature::new(m + 1, n - 1, rad)?
            }
            TransformKind::SignFlip { j } => {
                require_standard(target, *j, "sign flip")?;
                target.clone()
            }
            TransformKind::FaceZero { i } => {
                target.check_index(*i)?;
                let rad: Vec<Rational> = r
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| k != i)
                    .map(|(_, v)| v.clone())
                    .collect();
                if target.is_generalized(*i) {
                    VariableSignature::new(m - 1, n, rad)?
                } else {
                    VariableSignature::new(m, n - 1, rad)?
                }
            }
        };
        Ok(Self {
            kind,
            source,
            target: target.clone(),
        })
    }

    pub fn kind(&self) -> &TransformKind {
        &self.kind
    }

    pub fn source(&self) -> &VariableSignature {
        &self.source
    }

    pub fn target(&self) -> &VariableSignature {
        &self.target
    }

    /// The variable one divides by to invert the map (source index).
    pub fn critical_variable(&self) -> Option<usize> {
        critical_variable(&self.kind)
    }

    /// Image of a single target exponent as `(coefficient, source exponent)`
    /// terms. Translation is the only kind producing more than one term.
    fn pull_back_term(&self, e: &ExponentVector) -> Vec<(Rational, ExponentVector)> {
        let m = self.target.m();
        let mut v = e.entries().to_vec();
        match &self.kind {
            TransformKind::Ramification { i, lambda } => {
                v[*i] = &v[*i] * lambda;
                vec![(Rational::one(), ExponentVector::from_raw(v))]
            }
            TransformKind::BlowupChartA { i, j, lambda } => {
                v[*i] = &v[*i] + &v[*j] * lambda;
                vec![(Rational::one(), ExponentVector::from_raw(v))]
            }
            TransformKind::BlowupChartB { i, j, lambda } => {
                v[*j] = &v[*j] + &v[*i] / lambda;
                vec![(Rational::one(), ExponentVector::from_raw(v))]
            }
            TransformKind::ReflectionPlus { i } | TransformKind::ReflectionMinus { i } => {
                let ei = v[*i].clone();
                let mut out: Vec<Rational> = v[..m].to_vec();
                out.push(ei.clone());
                out.extend(v[m..].iter().enumerate().filter(|(k, _)| m + k != *i).map(|(_, x)| x.clone()));
                let odd = ei.to_integer().is_odd_big();
                let sign = if matches!(self.kind, TransformKind::ReflectionMinus { .. }) && odd {
                    -Rational::one()
                } else {
                    Rational::one()
                };
                vec![(sign, ExponentVector::from_raw(out))]
            }
            TransformKind::SignFlip { j } => {
                let sign = if v[*j].to_integer().is_odd_big() {
                    -Rational::one()
                } else {
                    Rational::one()
                };
                vec![(sign, ExponentVector::from_raw(v))]
            }
            TransformKind::FaceZero { i } => {
                if !v[*i].is_zero() {
                    return Vec::new();
                }
                v.remove(*i);
                vec![(Rational::one(), ExponentVector::from_raw(v))]
            }
            TransformKind::Translation { j, c } => {
                let k_max = v[*j].to_integer();
                let k_max = k_max.to_u64().expect("standard exponent fits in u64");
                (0..=k_max)
                    .map(|k| {
                        let b = binomial(BigInt::from(k_max), BigInt::from(k));
                        let cpow: Rational = num_traits::pow::Pow::pow(c, (k_max - k) as u32);
                        let mut w = v.clone();
                        w[*j] = rational::int(k as i64);
                        (Rational::from_integer(b) * cpow, ExponentVector::from_raw(w))
                    })
                    .collect()
            }
        }
    }

    /// `F ↦ F ∘ ν`.
    pub fn apply(&self, f: &GenSeries) -> Result<GenSeries> {
        if !f.signature().same_layout(&self.target) {
            return Err(Error::Signature(format!(
                "series lives on {}, transform targets {}",
                f.signature(),
                self.target
            )));
        }
        let mut out = GenSeries::zero(&self.source);
        for (e, c) in f.terms() {
            for (k, e2) in self.pull_back_term(e) {
                out.add_term(e2, c * k);
            }
        }
        Ok(out)
    }

    /// `ν(p)` for a source point `p`.
    pub fn map_point(&self, p: &[f64]) -> Result<Vec<f64>> {
        GenSeries::check_point(&self.source, p)?;
        Ok(self.map_point_unchecked(p))
    }

    pub(crate) fn map_point_unchecked(&self, p: &[f64]) -> Vec<f64> {
        let m = self.target.m();
        let mut q = p.to_vec();
        match &self.kind {
            TransformKind::Ramification { i, lambda } => q[*i] = f64_pow(p[*i], lambda),
            TransformKind::Translation { j, c } => q[*j] = p[*j] + rational::to_f64(c),
            TransformKind::BlowupChartA { i, j, lambda } => q[*j] = f64_pow(p[*i], lambda) * p[*j],
            TransformKind::BlowupChartB { i, j, lambda } => q[*i] = p[*i] * f64_pow(p[*j], &lambda.recip()),
            TransformKind::ReflectionPlus { i } | TransformKind::ReflectionMinus { i } => {
                let sign = if matches!(self.kind, TransformKind::ReflectionPlus { .. }) { 1.0 } else { -1.0 };
                // Source layout: x_1..x_m, x_{m+1}, then the remaining y's.
                let mut out: Vec<f64> = p[..m].to_vec();
                let mut rest = p[m + 1..].iter();
                for k in m..self.target.len() {
                    if k == *i {
                        out.push(sign * p[m]);
                    } else {
                        out.push(*rest.next().expect("source has one fewer standard variable"));
                    }
                }
                q = out;
            }
            TransformKind::SignFlip { j } => q[*j] = -p[*j],
            TransformKind::FaceZero { i } => q.insert(*i, 0.0),
        }
        q
    }

    /// Preimage of a target point, when the point lies where the map is
    /// invertible (away from the critical locus) and inside the source
    /// polydisk.
    pub fn invert_point(&self, q: &[f64]) -> Option<Vec<f64>> {
        let m = self.target.m();
        let mut p = q.to_vec();
        match &self.kind {
            TransformKind::Ramification { i, lambda } => p[*i] = f64_pow(q[*i], &lambda.recip()),
            TransformKind::Translation { j, c } => p[*j] = q[*j] - rational::to_f64(c),
            TransformKind::BlowupChartA { i, j, lambda } => {
                if q[*i] <= 0.0 {
                    return None;
                }
                p[*j] = q[*j] / f64_pow(q[*i], lambda);
            }
            TransformKind::BlowupChartB { i, j, lambda } => {
                if q[*j] <= 0.0 {
                    return None;
                }
                p[*i] = q[*i] / f64_pow(q[*j], &lambda.recip());
            }
            TransformKind::ReflectionPlus { i } | TransformKind::ReflectionMinus { i } => {
                let y = q[*i];
                let x = if matches!(self.kind, TransformKind::ReflectionPlus { .. }) { y } else { -y };
                if x < 0.0 {
                    return None;
                }
                let mut out: Vec<f64> = q[..m].to_vec();
                out.push(x);
                out.extend(q[m..].iter().enumerate().filter(|(k, _)| m + k != *i).map(|(_, v)| *v));
                p = out;
            }
            TransformKind::SignFlip { j } => p[*j] = -q[*j],
            TransformKind::FaceZero { i } => {
                if q[*i] != 0.0 {
                    return None;
                }
                p.remove(*i);
            }
        }
        GenSeries::check_point(&self.source, &p).ok()?;
        Some(p)
    }
}

impl fmt::Display for ElementaryTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", KindDisplay(&self.kind))
    }
}

/// Compact 1-based rendering, e.g. `A(1,2;3/2)` or `R+(3)`.
pub struct KindDisplay<'a>(pub &'a TransformKind);

impl fmt::Display for KindDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = rational::format;
        match self.0 {
            TransformKind::Ramification { i, lambda } => write!(f, "Ram({};{})", i + 1, q(lambda)),
            TransformKind::Translation { j, c } => write!(f, "T({};{})", j + 1, q(c)),
            TransformKind::BlowupChartA { i, j, lambda } => write!(f, "A({},{};{})", i + 1, j + 1, q(lambda)),
            TransformKind::BlowupChartB { i, j, lambda } => write!(f, "B({},{};{})", i + 1, j + 1, q(lambda)),
            TransformKind::ReflectionPlus { i } => write!(f, "R+({})", i + 1),
            TransformKind::ReflectionMinus { i } => write!(f, "R-({})", i + 1),
            TransformKind::SignFlip { j } => write!(f, "S({})", j + 1),
            TransformKind::FaceZero { i } => write!(f, "F0({})", i + 1),
        }
    }
}

/// Chart A of the pair `(i, j)` inverts by dividing by `x_i^λ`; chart B by
/// `x_j^{1/λ}`. Every other kind inverts without division.
pub fn critical_variable(kind: &TransformKind) -> Option<usize> {
    match kind {
        TransformKind::BlowupChartA { i, .. } => Some(*i),
        TransformKind::BlowupChartB { j, .. } => Some(*j),
        _ => None,
    }
}

/// Weight `λ = (α_i − β_i)/(β_j − α_j)` that equalizes coordinate `i`
/// (chart A) resp. `j` (chart B) of the pair; requires `α_i > β_i`,
/// `α_j < β_j`.
pub fn pair_weight(alpha: &ExponentVector, beta: &ExponentVector, i: usize, j: usize) -> Result<Rational> {
    let num = alpha.get(i) - beta.get(i);
    let den = beta.get(j) - alpha.get(j);
    if !num.is_positive() || !den.is_positive() {
        return Err(Error::Precondition(format!(
            "pair {alpha}, {beta} is not separated by variables {} and {}",
            i + 1,
            j + 1
        )));
    }
    Ok(num / den)
}

/// Image of a single exponent under the pull-back of a monomial transform.
pub fn map_exponent(t: &ElementaryTransform, e: &ExponentVector) -> Result<Option<ExponentVector>> {
    if t.kind.name() == "translation" {
        return Err(Error::Transform("translation is not a monomial map".into()));
    }
    Ok(t.pull_back_term(e).into_iter().next().map(|(_, e)| e))
}

trait OddBig {
    fn is_odd_big(&self) -> bool;
}

impl OddBig for BigInt {
    fn is_odd_big(&self) -> bool {
        num_integer::Integer::is_odd(self)
    }
}

/// Composite `ν1 ∘ ν2 ∘ …` with matching signatures between neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransformChain {
    root: VariableSignature,
    steps: Vec<ElementaryTransform>,
}

impl TransformChain {
    pub fn identity(root: &VariableSignature) -> Self {
        Self {
            root: root.clone(),
            steps: Vec::new(),
        }
    }

    pub fn new(root: &VariableSignature, steps: Vec<ElementaryTransform>) -> Result<Self> {
        let mut chain = Self::identity(root);
        for s in steps {
            chain.push(s)?;
        }
        Ok(chain)
    }

    pub fn push(&mut self, step: ElementaryTransform) -> Result<()> {
        if step.target != *self.source() {
            return Err(Error::Signature(format!(
                "step {} targets {}, chain source is {}",
                step,
                step.target,
                self.source()
            )));
        }
        self.steps.push(step);
        Ok(())
    }

    /// Appends the transform of `kind` acting on the current source.
    pub fn push_kind(&mut self, kind: TransformKind) -> Result<()> {
        let step = ElementaryTransform::new(kind, self.source())?;
        self.push(step)
    }

    pub fn then(&self, kind: TransformKind) -> Result<Self> {
        let mut c = self.clone();
        c.push_kind(kind)?;
        Ok(c)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TransformChain) -> Result<Self> {
        if other.root != *self.source() {
            return Err(Error::Signature("chains do not compose".into()));
        }
        let mut c = self.clone();
        c.steps.extend(other.steps.iter().cloned());
        Ok(c)
    }

    pub fn root(&self) -> &VariableSignature {
        &self.root
    }

    pub fn source(&self) -> &VariableSignature {
        self.steps.last().map(|s| &s.source).unwrap_or(&self.root)
    }

    pub fn steps(&self) -> &[ElementaryTransform] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Sub-chain of steps `from..` as a chain rooted at the target of step
    /// `from`.
    pub fn suffix(&self, from: usize) -> Self {
        let root = if from < self.steps.len() {
            self.steps[from].target.clone()
        } else {
            self.source().clone()
        };
        Self {
            root,
            steps: self.steps[from.min(self.steps.len())..].to_vec(),
        }
    }

    pub fn apply(&self, f: &GenSeries) -> Result<GenSeries> {
        if !f.signature().same_layout(&self.root) {
            return Err(Error::Signature(format!(
                "series lives on {}, chain is rooted at {}",
                f.signature(),
                self.root
            )));
        }
        let mut g = f.with_signature(&self.root)?;
        for s in &self.steps {
            g = s.apply(&g)?;
        }
        Ok(g)
    }

    pub fn map_point(&self, p: &[f64]) -> Result<Vec<f64>> {
        GenSeries::check_point(self.source(), p)?;
        Ok(self.map_point_unchecked(p))
    }

    pub(crate) fn map_point_unchecked(&self, p: &[f64]) -> Vec<f64> {
        let mut q = p.to_vec();
        for s in self.steps.iter().rev() {
            q = s.map_point_unchecked(&q);
        }
        q
    }

    pub fn invert_point(&self, q: &[f64]) -> Option<Vec<f64>> {
        GenSeries::check_point(&self.root, q).ok()?;
        let mut p = q.to_vec();
        for s in &self.steps {
            p = s.invert_point(&p)?;
        }
        Some(p)
    }
}

impl fmt::Display for TransformChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "id");
        }
        for (k, s) in self.steps.iter().enumerate() {
            if k > 0 {
                write!(f, " . ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// `h_{a,σ}(x) = (σ_1(x_1 − a_1), …)` with its inverse, and the chain
/// realizing `h⁻¹` for series pull-back on standard variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Recentering {
    center: Vec<Rational>,
    signs: Vec<i8>,
}

pub fn recenter(center: Vec<Rational>, signs: Vec<i8>) -> Result<Recentering> {
    if center.len() != signs.len() {
        return Err(Error::Signature("center and sign vectors differ in length".into()));
    }
    if signs.iter().any(|s| *s != 1 && *s != -1) {
        return Err(Error::Precondition("signs must be ±1".into()));
    }
    Ok(Recentering { center, signs })
}

impl Recentering {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .zip(&self.signs)
            .map(|((v, a), s)| f64::from(*s) * (v - rational::to_f64(a)))
            .collect()
    }

    pub fn invert(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.center)
            .zip(&self.signs)
            .map(|((v, a), s)| rational::to_f64(a) + f64::from(*s) * v)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.center.iter().all(Zero::is_zero) && self.signs.iter().all(|s| *s == 1)
    }

    /// Chain `F ↦ F ∘ h⁻¹` rooted at `root`, i.e. `y ↦ a + σ y'` on each
    /// standard variable. Generalized variables admit only the trivial
    /// recentering here.
    pub fn chain(&self, root: &VariableSignature) -> Result<TransformChain> {
        if self.center.len() != root.len() {
            return Err(Error::Signature("recentering length differs from signature".into()));
        }
        let mut chain = TransformChain::identity(root);
        for k in 0..root.len() {
            let (a, s) = (&self.center[k], self.signs[k]);
            if root.is_generalized(k) {
                if !a.is_zero() || s != 1 {
                    return Err(Error::Transform(format!(
                        "{} is generalized; recenter it pointwise only",
                        root.var_name(k)
                    )));
                }
                continue;
            }
            if !a.is_zero() {
                chain.push_kind(TransformKind::Translation { j: k, c: a.clone() })?;
            }
            if s == -1 {
                chain.push_kind(TransformKind::SignFlip { j: k })?;
            }
        }
        Ok(chain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn s(sig: &VariableSignature, t: &[((i64, i64), &[(i64, i64)])]) -> GenSeries {
        GenSeries::from_frac_terms(sig, t).unwrap()
    }

    #[test]
    fn reflection_turns_standard_into_generalized() {
        let sig = VariableSignature::unit(1, 1);
        let f = s(&sig, &[((1, 1), &[(1, 1), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])]);
        let t = ElementaryTransform::new(TransformKind::ReflectionPlus { i: 1 }, &sig).unwrap();
        assert_eq!((t.source().m(), t.source().n()), (2, 0));
        let g = t.apply(&f).unwrap();
        let expected = s(t.source(), &[((1, 1), &[(1, 1), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])]);
        assert_eq!(g, expected);
        let tm = ElementaryTransform::new(TransformKind::ReflectionMinus { i: 1 }, &sig).unwrap();
        let expected_minus = s(tm.source(), &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 1), &[(0, 1), (1, 1)])]);
        assert_eq!(tm.apply(&f).unwrap(), expected_minus);
    }

    #[test]
    fn chart_a_on_difference() {
        let sig = VariableSignature::unit(2, 0);
        let f = s(&sig, &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 1), &[(0, 1), (1, 1)])]);
        let t = ElementaryTransform::new(
            TransformKind::BlowupChartA {
                i: 0,
                j: 1,
                lambda: int(1),
            },
            &sig,
        )
        .unwrap();
        let g = t.apply(&f).unwrap();
        assert_eq!(g, s(t.source(), &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 1), &[(1, 1), (1, 1)])]));
        let nd = match g.normal_decompose() {
            crate::series::Normality::Normal(nd) => nd,
            other => panic!("{other:?}"),
        };
        assert_eq!(nd.monomial_exponent, ExponentVector::from_ints(&[1, 0]));
    }

    #[test]
    fn ramification_clears_denominator() {
        let sig = VariableSignature::unit(1, 0);
        let f = s(&sig, &[((1, 1), &[(1, 2)])]);
        let t = ElementaryTransform::new(TransformKind::Ramification { i: 0, lambda: int(2) }, &sig).unwrap();
        assert_eq!(t.apply(&f).unwrap(), GenSeries::variable(t.source(), 0).unwrap());
    }

    #[test]
    fn translation_expands_binomially() {
        let sig = VariableSignature::uniform(0, 1, int(4));
        let f = s(&sig, &[((1, 1), &[(2, 1)])]);
        let t = ElementaryTransform::new(TransformKind::Translation { j: 0, c: int(1) }, &sig).unwrap();
        let g = t.apply(&f).unwrap();
        assert_eq!(g, s(t.source(), &[((1, 1), &[(0, 1)]), ((2, 1), &[(1, 1)]), ((1, 1), &[(2, 1)])]));
        let gen = VariableSignature::unit(1, 0);
        assert!(ElementaryTransform::new(TransformKind::Translation { j: 0, c: int(1) }, &gen).is_err());
    }

    #[test]
    fn critical_variables() {
        let a = TransformKind::BlowupChartA {
            i: 0,
            j: 1,
            lambda: frac(3, 2),
        };
        let b = TransformKind::BlowupChartB {
            i: 0,
            j: 1,
            lambda: frac(3, 2),
        };
        assert_eq!(critical_variable(&a), Some(0));
        assert_eq!(critical_variable(&b), Some(1));
        assert_eq!(critical_variable(&TransformKind::Ramification { i: 0, lambda: int(2) }), None);
    }

    #[test]
    fn point_maps() {
        let sig = VariableSignature::unit(2, 0);
        let t = ElementaryTransform::new(
            TransformKind::BlowupChartA {
                i: 0,
                j: 1,
                lambda: int(1),
            },
            &sig,
        )
        .unwrap();
        let q = t.map_point(&[0.5, 0.2]).unwrap();
        assert!((q[0] - 0.5).abs() < 1e-15 && (q[1] - 0.1).abs() < 1e-15);

        let sy = VariableSignature::unit(0, 1);
        let r = ElementaryTransform::new(TransformKind::ReflectionMinus { i: 0 }, &sy).unwrap();
        assert_eq!(r.map_point(&[0.3]).unwrap(), vec![-0.3]);

        let st = VariableSignature::uniform(0, 1, int(2));
        let tr = ElementaryTransform::new(TransformKind::Translation { j: 0, c: int(1) }, &st).unwrap();
        assert!((tr.map_point(&[0.2]).unwrap()[0] - 1.2).abs() < 1e-15);
        assert!(t.map_point(&[0.5, 1.5]).is_err());
    }

    #[test]
    fn recentering() {
        let sig = VariableSignature::unit(0, 2);
        let id = recenter(vec![int(0), int(0)], vec![1, 1]).unwrap();
        assert!(id.chain(&sig).unwrap().is_empty());
        let h = recenter(vec![int(1)], vec![-1]).unwrap();
        assert_eq!(h.apply(&[1.0]), vec![0.0]);
        let h2 = recenter(vec![frac(1, 4), frac(-1, 2)], vec![-1, 1]).unwrap();
        for x in [[0.1, 0.2], [-0.3, 0.7]] {
            let back = h2.apply(&h2.invert(&x));
            assert!((back[0] - x[0]).abs() < 1e-15 && (back[1] - x[1]).abs() < 1e-15);
        }
        // The chain pulls F back along h⁻¹: (F ∘ h⁻¹)(x') = F(a + σ x').
        let wide = VariableSignature::uniform(0, 2, int(2));
        let chain = h2.chain(&wide).unwrap();
        let f = s(&wide, &[((1, 1), &[(2, 1), (1, 1)]), ((3, 1), &[(0, 1), (1, 1)])]);
        let g = chain.apply(&f).unwrap();
        let xp = [0.3, -0.4];
        let lhs = g.eval(&xp).unwrap();
        let rhs = f.eval_unchecked(&h2.invert(&xp));
        assert!((lhs - rhs).abs() < 1e-12);
        let gen = VariableSignature::unit(1, 0);
        assert!(recenter(vec![int(1)], vec![1]).unwrap().chain(&gen).is_err());
    }

    #[test]
    fn pair_weight_equalizes() {
        let a = ExponentVector::from_fracs(&[(3, 2), (0, 1)]);
        let b = ExponentVector::from_fracs(&[(0, 1), (1, 1)]);
        assert_eq!(pair_weight(&a, &b, 0, 1).unwrap(), frac(3, 2));
        assert!(pair_weight(&b, &a, 0, 1).is_err());
    }
}
