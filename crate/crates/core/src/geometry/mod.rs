//! Quadrants, sign analysis of normal series, local parametrizations,
//! cleared Jacobians and fiber cutting.

mod fibercut;
mod jacobian;
mod param;

pub use fibercut::{
    exact_critical_points_1d, fiber_cut_equations, verify_fiber_cut, FiberCutReport, FiberCutSample, FiberCutSystem,
};
pub use jacobian::{cleared_jacobian, refine_by_rank, refine_maps_by_rank, ClearedJacobian, RankedPiece, SeriesMap};
pub use param::{
    build_local_parametrization, check_sign_constancy, covering_fraction, sample_box, sample_target, ParamChart, ParamOptions,
    ParamTarget, Parametrization, SignViolation,
};

pub(crate) use jacobian::numeric_rank;

use std::fmt;

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::exponents::VariableSignature;
use crate::rational::{self, Rational};
use crate::series::{GenSeries, NormalDecomposition, Normality};
use crate::transforms::{TransformChain, TransformKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Selector {
    Zero,
    Positive,
    /// Standard variables only.
    Negative,
}

impl Selector {
    fn symbol(self) -> char {
        match self {
            Selector::Zero => '0',
            Selector::Positive => '+',
            Selector::Negative => '-',
        }
    }
}

/// Product of per-variable pieces `{0}`, `(0, r)`, `(-r, 0)` of a polydisk.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quadrant {
    sig: VariableSignature,
    selectors: Vec<Selector>,
}

impl Quadrant {
    pub fn new(sig: &VariableSignature, selectors: Vec<Selector>) -> Result<Self> {
        if selectors.len() != sig.len() {
            return Err(Error::Signature(format!(
                "{} selectors for {} variables",
                selectors.len(),
                sig.len()
            )));
        }
        if let Some(k) = (0..sig.m()).find(|&k| selectors[k] == Selector::Negative) {
            return Err(Error::Precondition(format!("generalized {} cannot be negative", sig.var_name(k))));
        }
        Ok(Self {
            sig: sig.clone(),
            selectors,
        })
    }

    /// Every variable on its positive side.
    pub fn open(sig: &VariableSignature) -> Self {
        Self {
            sig: sig.clone(),
            selectors: vec![Selector::Positive; sig.len()],
        }
    }

    /// All sub-quadrants in canonical order.
    pub fn all(sig: &VariableSignature) -> Vec<Quadrant> {
        let mut out: Vec<Vec<Selector>> = vec![Vec::new()];
        for k in 0..sig.len() {
            let opts: &[Selector] = if sig.is_generalized(k) {
                &[Selector::Zero, Selector::Positive]
            } else {
                &[Selector::Zero, Selector::Positive, Selector::Negative]
            };
            out = out
                .into_iter()
                .flat_map(|p| {
                    opts.iter().map(move |s| {
                        let mut q = p.clone();
                        q.push(*s);
                        q
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|selectors| Quadrant {
                sig: sig.clone(),
                selectors,
            })
            .collect()
    }

    pub fn signature(&self) -> &VariableSignature {
        &self.sig
    }

    pub fn selectors(&self) -> &[Selector] {
        &self.selectors
    }

    pub fn radius(&self) -> &[Rational] {
        self.sig.radius()
    }

    pub fn dimension(&self) -> usize {
        self.selectors.iter().filter(|s| **s != Selector::Zero).count()
    }

    pub fn free_variables(&self) -> Vec<usize> {
        (0..self.selectors.len()).filter(|&k| self.selectors[k] != Selector::Zero).collect()
    }

    pub fn with_radius(&self, radius: Vec<Rational>) -> Result<Self> {
        Ok(Self {
            sig: self.sig.with_radius(radius)?,
            selectors: self.selectors.clone(),
        })
    }

    /// Membership in the open quadrant; Zero selectors need an exact zero.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.selectors.len()
            && p.iter().zip(&self.selectors).zip(self.sig.radius()).all(|((&x, s), r)| {
                let r = rational::to_f64(r);
                match s {
                    Selector::Zero => x == 0.0,
                    Selector::Positive => x > 0.0 && x < r,
                    Selector::Negative => x < 0.0 && x > -r,
                }
            })
    }

    /// Uniform interior sample.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.sample_above(0.0, rng)
    }

    /// Interior sample with every free coordinate at least `floor` times
    /// its radius in absolute value.
    pub fn sample_above<R: Rng>(&self, floor: f64, rng: &mut R) -> Vec<f64> {
        self.selectors
            .iter()
            .zip(self.sig.radius())
            .map(|(s, r)| {
                let r = rational::to_f64(r);
                let u = loop {
                    let u: f64 = floor + (1.0 - floor) * rng.gen::<f64>();
                    if u > 0.0 {
                        break u;
                    }
                };
                match s {
                    Selector::Zero => 0.0,
                    Selector::Positive => u * r,
                    Selector::Negative => -u * r,
                }
            })
            .collect()
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.selectors {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

/// Upper bound of `r^γ`, exact for integer exponents.
fn monomial_upper(radius: &[Rational], e: &[Rational]) -> Rational {
    let mut acc = rational::int(1);
    for (r, g) in radius.iter().zip(e) {
        if !g.is_zero() {
            acc *= rational::pow_upper(r, g);
        }
    }
    acc
}

/// `Σ_{γ≠0} |c_γ| r^γ` over the terms of `unit` that survive on the face
/// where `zero` variables vanish; an upper bound when exponents are
/// fractional.
pub(crate) fn tail_bound(unit: &GenSeries, radius: &[Rational], zero: &[bool]) -> Rational {
    unit.terms()
        .filter(|(e, _)| !e.is_zero())
        .filter(|(e, _)| e.entries().iter().zip(zero).all(|(g, z)| !*z || g.is_zero()))
        .map(|(e, c)| c.abs() * monomial_upper(radius, e.entries()))
        .fold(Rational::zero(), |a, b| a + b)
}

/// On the open box of radius `r`, `Σ_{γ≠0} |c_γ| r^γ ≤ |c|` keeps the unit
/// strictly away from zero.
pub(crate) fn unit_certified(unit: &GenSeries, radius: &[Rational], zero: &[bool]) -> bool {
    tail_bound(unit, radius, zero) <= unit.constant_term().abs()
}

/// Constant sign of `X^α Y^β U` on `q`.
pub fn sign_on_quadrant(nd: &NormalDecomposition, q: &Quadrant) -> Result<i8> {
    if !nd.unit.signature().same_layout(&q.sig) {
        return Err(Error::Signature(format!("series on {}, quadrant on {}", nd.unit.signature(), q.sig)));
    }
    let zero: Vec<bool> = q.selectors.iter().map(|s| *s == Selector::Zero).collect();
    let e = nd.monomial_exponent.entries();
    if e.iter().zip(&zero).any(|(g, z)| *z && g.is_positive()) {
        return Ok(0);
    }
    if !unit_certified(&nd.unit, q.radius(), &zero) {
        return Err(Error::RadiusNotCertified(format!(
            "unit {} may vanish on quadrant {q} of radius {}",
            nd.unit, q.sig
        )));
    }
    let c = nd.unit.constant_term();
    let mut sign: i8 = if c.is_positive() { 1 } else { -1 };
    for k in q.sig.m()..q.sig.len() {
        if q.selectors[k] == Selector::Negative && e[k].to_integer().bit(0) {
            sign = -sign;
        }
    }
    Ok(sign)
}

/// Sign of an arbitrary series on `q`: zero series give 0, normal ones go
/// through [`sign_on_quadrant`].
pub fn series_sign(f: &GenSeries, q: &Quadrant) -> Result<i8> {
    match f.normal_decompose() {
        Normality::Zero => Ok(0),
        Normality::Normal(nd) => sign_on_quadrant(&nd, q),
        Normality::NotNormal(a, b) => Err(Error::Precondition(format!("{f} is not normal: {a} and {b} are minimal"))),
    }
}

/// Largest `r = start / 2^k` with `Σ_{γ≠0} |c_γ| r^γ < |c|`, which keeps
/// the unit away from zero on the closed polydisk of radius `r`.
pub fn validity_radius(nd: &NormalDecomposition, start: &[Rational]) -> Vec<Rational> {
    let c = nd.unit.constant_term().abs();
    assert!(!c.is_zero(), "a unit has a nonzero constant term");
    let zero = vec![false; start.len()];
    let mut r = start.to_vec();
    let half = rational::frac(1, 2);
    while tail_bound(&nd.unit, &r, &zero) >= c {
        for x in &mut r {
            *x *= &half;
        }
    }
    r
}

/// `{f = 0, g_1 > 0, …, g_p > 0}` on a polydisk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicSetDescriptor {
    pub f: GenSeries,
    pub g: Vec<GenSeries>,
}

impl BasicSetDescriptor {
    pub fn new(f: GenSeries, g: Vec<GenSeries>) -> Result<Self> {
        if let Some(h) = g.iter().find(|h| h.signature() != f.signature()) {
            return Err(Error::Signature(format!("{} vs {}", f.signature(), h.signature())));
        }
        Ok(Self { f, g })
    }

    pub fn signature(&self) -> &VariableSignature {
        self.f.signature()
    }

    /// Numeric membership with tolerance `tol` on the equation.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.f.eval_unchecked(p).abs() <= tol && self.g.iter().all(|h| h.eval_unchecked(p) > 0.0)
    }
}

/// An admissible transformation restricted to a sub-quadrant of its source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub chain: TransformChain,
    pub domain: Quadrant,
}

impl Chart {
    pub fn new(chain: TransformChain, domain: Quadrant) -> Result<Self> {
        if !chain.source().same_layout(domain.signature()) {
            return Err(Error::Signature(format!("chain source {} vs domain {}", chain.source(), domain.signature())));
        }
        Ok(Self { chain, domain })
    }

    pub fn radius(&self) -> &[Rational] {
        self.domain.radius()
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn map_point(&self, p: &[f64]) -> Vec<f64> {
        self.chain.map_point_unchecked(p)
    }

    /// Whether the target point `q` is the image of a domain point, by
    /// explicit inversion of every step.
    pub fn covers(&self, q: &[f64]) -> bool {
        self.chain.invert_point(q).is_some_and(|p| self.domain.contains(&p))
    }

    /// For every blow-up in the chain, the critical variable pulled back
    /// to the domain does not vanish there.
    pub fn injectivity_certified(&self) -> bool {
        self.chain.steps().iter().enumerate().all(|(k, step)| {
            let Some(w) = step.critical_variable() else { return true };
            let Ok(x) = GenSeries::variable(step.source(), w) else { return false };
            let image = match self.chain.suffix(k + 1).apply(&x) {
                Ok(g) => g,
                Err(_) => return false,
            };
            let domain = match image.with_signature(self.domain.signature()) {
                Ok(g) => g,
                Err(_) => return false,
            };
            matches!(series_sign(&domain, &self.domain), Ok(s) if s != 0)
        })
    }

    /// Steps restricting the chain to the domain: faces for Zero selectors,
    /// then reflections turning the remaining standard variables into
    /// generalized ones on their selected side.
    pub fn restriction(&self) -> Result<TransformChain> {
        let mut chain = self.chain.clone();
        let sel = self.domain.selectors();
        for k in (0..sel.len()).rev() {
            if sel[k] == Selector::Zero {
                chain.push_kind(TransformKind::FaceZero { i: k })?;
            }
        }
        let survivors: Vec<Selector> = sel.iter().copied().filter(|s| *s != Selector::Zero).collect();
        let m0 = chain.source().m();
        for (t, s) in survivors[m0..].iter().enumerate() {
            let i = m0 + t;
            let kind = if *s == Selector::Negative {
                TransformKind::ReflectionMinus { i }
            } else {
                TransformKind::ReflectionPlus { i }
            };
            chain.push_kind(kind)?;
        }
        Ok(chain)
    }

    /// The chart as a map `η` from a purely generalized `d`-dimensional
    /// polydisk (radius from the domain) into the chain's root coordinates.
    pub fn restricted_map(&self) -> Result<SeriesMap> {
        let chain = self.restriction()?;
        let radius: Vec<Rational> = self
            .domain
            .free_variables()
            .into_iter()
            .map(|k| self.domain.radius()[k].clone())
            .collect();
        let d = radius.len();
        let sig = VariableSignature::new(d, 0, radius)?;
        let root = chain.root().clone();
        let components = (0..root.len())
            .map(|k| {
                let x = GenSeries::variable(&root, k)?;
                chain.apply(&x)?.with_signature(&sig)
            })
            .collect::<Result<Vec<_>>>()?;
        SeriesMap::new(sig, components)
    }
}
