//! Local parametrizations of polydisks and basic sets built from
//! *-monomializing trees, with sampled covering and sign checks.

use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{series_sign, tail_bound, BasicSetDescriptor, Chart, Quadrant, Selector};
use crate::error::{Error, Result};
use crate::exponents::VariableSignature;
use crate::rational::{self, Rational};
use crate::series::{GenSeries, Normality};
use crate::transforms::{ElementaryTransform, TransformChain, TransformKind};
use crate::trees::{star_monomialize, AdmissibleTree, TreeNode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamTarget {
    Polydisk(VariableSignature),
    BasicSet(BasicSetDescriptor),
}

impl ParamTarget {
    pub fn signature(&self) -> &VariableSignature {
        match self {
            ParamTarget::Polydisk(s) => s,
            ParamTarget::BasicSet(b) => b.signature(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamOptions {
    pub max_depth: usize,
    /// Extra halvings of every chart's base radii after certification.
    pub shrink: u32,
}

impl Default for ParamOptions {
    fn default() -> Self {
        Self { max_depth: 32, shrink: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamChart {
    pub chart: Chart,
    /// One entry per function in [`Parametrization::functions`].
    pub signs: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parametrization {
    pub target: VariableSignature,
    /// Compatibility functions, then (for basic sets) `f` and the `g_i`.
    pub functions: Vec<GenSeries>,
    pub charts: Vec<ParamChart>,
    /// Charts before basic-set filtering.
    pub total_charts: usize,
    /// Box `|x_k| < s_k` claimed to be covered by the chart images.
    pub certified_radius: Vec<Rational>,
    /// Set when a direction radius had to shrink, which opens a wedge
    /// between sibling charts; the sampled covering check then decides.
    pub gaps: bool,
}

/// A series pulled back to the current node together with what must not
/// vanish on a chart domain.
#[derive(Clone)]
struct Guard {
    series: GenSeries,
}

struct NodeOut {
    charts: Vec<ParamChart>,
    /// `None` entries put no constraint on the covered box.
    cover: Vec<Option<Rational>>,
    gaps: bool,
}

struct Builder {
    opts: ParamOptions,
}

fn min_opt(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x <= y { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

fn guard_vanishes(g: &GenSeries, q: &Quadrant) -> bool {
    match g.normal_decompose() {
        Normality::Zero => true,
        Normality::Normal(nd) => nd
            .monomial_exponent
            .entries()
            .iter()
            .zip(q.selectors())
            .any(|(e, s)| *s == Selector::Zero && !e.is_zero()),
        Normality::NotNormal(..) => true,
    }
}

fn tree_for(sig: &VariableSignature, fns: &[GenSeries], max_depth: usize) -> Result<AdmissibleTree> {
    if fns.is_empty() {
        Ok(AdmissibleTree::leaf(sig, Vec::new()))
    } else {
        star_monomialize(fns, max_depth)
    }
}

impl Builder {
    /// `fns` are the functions pulled back to `tree`'s root, `chain` maps
    /// that root into the target, `dirs` marks direction variables.
    fn node(
        &self,
        tree: &AdmissibleTree,
        chain: &TransformChain,
        fns: &[GenSeries],
        guards: &[Guard],
        dirs: &[bool],
    ) -> Result<NodeOut> {
        match tree.node() {
            TreeNode::Leaf { .. } => self.leaf(tree.signature(), chain, fns, guards, dirs),
            TreeNode::Fork { children } => {
                let mut outs = Vec::new();
                for (step, sub) in children {
                    let mut c = chain.clone();
                    c.push(step.clone())?;
                    let f2 = fns.iter().map(|f| step.apply(f)).collect::<Result<Vec<_>>>()?;
                    let mut g2 = guards
                        .iter()
                        .map(|g| step.apply(&g.series).map(|series| Guard { series }))
                        .collect::<Result<Vec<_>>>()?;
                    let d2 = map_dirs(step, dirs);
                    match step.kind() {
                        TransformKind::ReflectionMinus { .. } => {
                            // The face x' = 0 is already produced by the σ⁺ sibling.
                            let m = step.source().m() - 1;
                            g2.push(Guard {
                                series: GenSeries::variable(step.source(), m)?,
                            });
                        }
                        TransformKind::BlowupChartA { .. } | TransformKind::BlowupChartB { .. } => {
                            let w = step.critical_variable().expect("blow-up has a critical variable");
                            g2.push(Guard {
                                series: GenSeries::variable(step.source(), w)?,
                            });
                        }
                        TransformKind::ReflectionPlus { .. } => {}
                        _ => {
                            return Err(Error::Precondition(format!(
                                "parametrization handles reflection and blow-up forks only, found {step}"
                            )))
                        }
                    }
                    outs.push((step.clone(), self.node(sub, &c, &f2, &g2, &d2)?));
                }
                self.merge(tree.signature(), chain, fns, guards, dirs, outs)
            }
        }
    }

    fn merge(
        &self,
        sig: &VariableSignature,
        chain: &TransformChain,
        fns: &[GenSeries],
        guards: &[Guard],
        dirs: &[bool],
        outs: Vec<(ElementaryTransform, NodeOut)>,
    ) -> Result<NodeOut> {
        let mut cover: Vec<Option<Rational>> = vec![None; sig.len()];
        let mut charts = Vec::new();
        let mut gaps = false;
        let one = Rational::one();
        let mut blowup: Option<(usize, usize)> = None;
        for (step, out) in outs {
            gaps |= out.gaps;
            let src = step.source();
            match step.kind().clone() {
                TransformKind::ReflectionPlus { i } | TransformKind::ReflectionMinus { i } => {
                    let m = sig.m();
                    for k in 0..sig.len() {
                        let s = if k < m {
                            k
                        } else if k == i {
                            m
                        } else if k < i {
                            k + 1
                        } else {
                            k
                        };
                        cover[k] = min_opt(cover[k].take(), out.cover[s].clone());
                    }
                }
                TransformKind::BlowupChartA { i, j, .. } => {
                    blowup = Some((i, j));
                    gaps |= out.cover[j].as_ref().is_some_and(|r| *r < one);
                    for k in 0..src.len() {
                        if k != j {
                            cover[k] = min_opt(cover[k].take(), out.cover[k].clone());
                        }
                    }
                }
                TransformKind::BlowupChartB { i, j, .. } => {
                    blowup = Some((i, j));
                    gaps |= out.cover[i].as_ref().is_some_and(|r| *r < one);
                    for k in 0..src.len() {
                        if k != i {
                            cover[k] = min_opt(cover[k].take(), out.cover[k].clone());
                        }
                    }
                }
                _ => unreachable!("checked while descending"),
            }
            charts.extend(out.charts);
        }
        if let Some((i, j)) = blowup {
            // The stratum x_i = x_j = 0 is missed by both charts.
            let face = self.face(sig, chain, fns, guards, dirs, i, j)?;
            if let Some(out) = face {
                gaps |= out.gaps;
                let mut s = 0;
                for k in 0..sig.len() {
                    if k == i || k == j {
                        continue;
                    }
                    cover[k] = min_opt(cover[k].take(), out.cover[s].clone());
                    s += 1;
                }
                charts.extend(out.charts);
            }
        }
        Ok(NodeOut { charts, cover, gaps })
    }

    #[allow(clippy::too_many_arguments)]
    fn face(
        &self,
        sig: &VariableSignature,
        chain: &TransformChain,
        fns: &[GenSeries],
        guards: &[Guard],
        dirs: &[bool],
        i: usize,
        j: usize,
    ) -> Result<Option<NodeOut>> {
        let (hi, lo) = (i.max(j), i.min(j));
        let mut c = chain.clone();
        let s1 = ElementaryTransform::new(TransformKind::FaceZero { i: hi }, sig)?;
        let s2 = ElementaryTransform::new(TransformKind::FaceZero { i: lo }, s1.source())?;
        c.push(s1.clone())?;
        c.push(s2.clone())?;
        let restrict = |f: &GenSeries| s1.apply(f).and_then(|g| s2.apply(&g));
        let mut g2 = Vec::new();
        for g in guards {
            let series = restrict(&g.series)?;
            if series.is_zero() {
                // Points of this face lie on an ancestor's critical locus and
                // are produced by that ancestor's own face stratum.
                return Ok(None);
            }
            g2.push(Guard { series });
        }
        let f2 = fns.iter().map(restrict).collect::<Result<Vec<_>>>()?;
        let d2: Vec<bool> = dirs.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, d)| *d).collect();
        let fsig = s2.source().clone();
        let tree = tree_for(&fsig, &f2, self.opts.max_depth)?;
        self.node(&tree, &c, &f2, &g2, &d2).map(Some)
    }

    fn leaf(
        &self,
        sig: &VariableSignature,
        chain: &TransformChain,
        fns: &[GenSeries],
        guards: &[Guard],
        dirs: &[bool],
    ) -> Result<NodeOut> {
        let units: Vec<GenSeries> = fns
            .iter()
            .map(|f| match f.normal_decompose() {
                Normality::Normal(nd) => Ok(Some(nd.unit)),
                Normality::Zero => Ok(None),
                Normality::NotNormal(a, b) => Err(Error::Verification {
                    branch: chain.to_string(),
                    reason: format!("{f} is not normal at a leaf ({a}, {b})"),
                }),
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();

        let mut radius = sig.radius().to_vec();
        let none = vec![false; sig.len()];
        let half = rational::frac(1, 2);
        let mut gaps = false;
        for _ in 0..4096 {
            let failing: Vec<&GenSeries> = units
                .iter()
                .filter(|u| tail_bound(u, &radius, &none) > u.constant_term().abs())
                .collect();
            if failing.is_empty() {
                break;
            }
            // Shrinking base variables cannot help against terms living on
            // direction variables alone; those need the direction radii.
            let base_zero: Vec<bool> = dirs.iter().map(|d| !d).collect();
            let directions_ok = failing
                .iter()
                .all(|u| tail_bound(u, &radius, &base_zero) < u.constant_term().abs());
            for (k, r) in radius.iter_mut().enumerate() {
                if dirs[k] != directions_ok {
                    *r *= &half;
                }
            }
            gaps |= !directions_ok;
        }
        if units.iter().any(|u| tail_bound(u, &radius, &none) > u.constant_term().abs()) {
            return Err(Error::RadiusNotCertified(format!("leaf {chain}")));
        }
        for _ in 0..self.opts.shrink {
            for (k, r) in radius.iter_mut().enumerate() {
                if !dirs[k] {
                    *r *= &half;
                }
            }
        }
        let dsig = sig.with_radius(radius.clone())?;
        let mut charts = Vec::new();
        for q in Quadrant::all(&dsig) {
            if guards.iter().any(|g| guard_vanishes(&g.series, &q)) {
                continue;
            }
            let signs = fns
                .iter()
                .map(|f| series_sign(&f.with_signature(&dsig)?, &q))
                .collect::<Result<Vec<_>>>()?;
            charts.push(ParamChart {
                chart: Chart::new(chain.clone(), q)?,
                signs,
            });
        }
        Ok(NodeOut {
            charts,
            cover: radius.into_iter().map(Some).collect(),
            gaps,
        })
    }
}

fn map_dirs(step: &ElementaryTransform, dirs: &[bool]) -> Vec<bool> {
    let mut d = dirs.to_vec();
    match step.kind() {
        TransformKind::BlowupChartA { j, .. } => d[*j] = true,
        TransformKind::BlowupChartB { i, .. } => d[*i] = true,
        TransformKind::ReflectionPlus { i } | TransformKind::ReflectionMinus { i } => {
            let m = step.target().m();
            let flag = d.remove(*i);
            d.insert(m, flag);
        }
        TransformKind::FaceZero { i } => {
            d.remove(*i);
        }
        _ => {}
    }
    d
}

/// Charts on sub-quadrants covering a neighbourhood of 0 in the target,
/// each with the constant sign of every function. For a basic set only the
/// charts with `sign(f) = 0` and every `sign(g_i) = +1` are kept.
pub fn build_local_parametrization(target: &ParamTarget, compat: &[GenSeries], opts: &ParamOptions) -> Result<Parametrization> {
    let sig = target.signature().clone();
    let mut functions = compat.to_vec();
    if let ParamTarget::BasicSet(b) = target {
        functions.push(b.f.clone());
        functions.extend(b.g.iter().cloned());
    }
    if let Some(f) = functions.iter().find(|f| f.signature() != &sig) {
        return Err(Error::Signature(format!("function on {}, target {}", f.signature(), sig)));
    }
    let tree = tree_for(&sig, &functions, opts.max_depth)?;
    let builder = Builder { opts: opts.clone() };
    let out = builder.node(&tree, &TransformChain::identity(&sig), &functions, &[], &vec![false; sig.len()])?;
    let total_charts = out.charts.len();
    let charts = match target {
        ParamTarget::Polydisk(_) => out.charts,
        ParamTarget::BasicSet(_) => {
            let fi = compat.len();
            out.charts
                .into_iter()
                .filter(|c| c.signs[fi] == 0 && c.signs[fi + 1..].iter().all(|s| *s == 1))
                .collect()
        }
    };
    let certified_radius = out
        .cover
        .into_iter()
        .zip(sig.radius())
        .map(|(c, r)| c.unwrap_or_else(|| r.clone()))
        .collect();
    Ok(Parametrization {
        target: sig,
        functions,
        charts,
        total_charts,
        certified_radius,
        gaps: out.gaps,
    })
}

/// Uniform sample of the box `|x_k| < s_k` (generalized coordinates
/// nonnegative).
pub fn sample_box<R: Rng>(sig: &VariableSignature, radius: &[Rational], rng: &mut R) -> Vec<f64> {
    (0..sig.len())
        .map(|k| {
            let r = rational::to_f64(&radius[k]);
            let u: f64 = rng.gen();
            if sig.is_generalized(k) {
                u * r
            } else {
                (2.0 * u - 1.0) * r
            }
        })
        .collect()
}

/// A point of the target within `radius`: uniform in the box for a
/// polydisk; for a basic set, uniform in a random sub-quadrant stratum and
/// kept only if it satisfies the descriptor. `None` after `attempts`
/// rejections.
pub fn sample_target<R: Rng>(target: &ParamTarget, radius: &[Rational], attempts: usize, rng: &mut R) -> Option<Vec<f64>> {
    let sig = target.signature();
    match target {
        ParamTarget::Polydisk(_) => Some(sample_box(sig, radius, rng)),
        ParamTarget::BasicSet(b) => {
            let strata = Quadrant::all(&sig.with_radius(radius.to_vec()).ok()?);
            (0..attempts).find_map(|_| {
                let q = &strata[rng.gen_range(0..strata.len())];
                let p = q.sample(rng);
                b.contains(&p, 1e-12).then_some(p)
            })
        }
    }
}

/// Number of `points` lying in at least one chart image.
pub fn covering_fraction(charts: &[ParamChart], points: &[Vec<f64>]) -> f64 {
    if points.is_empty() {
        return 1.0;
    }
    let hit = points.iter().filter(|p| charts.iter().any(|c| c.chart.covers(p))).count();
    hit as f64 / points.len() as f64
}

pub const SIGN_SAMPLE_FLOOR: f64 = 0.125;

#[derive(Debug, Clone, PartialEq)]
pub struct SignViolation {
    pub chart: usize,
    pub function: usize,
    pub point: Vec<f64>,
    pub value: f64,
    pub expected: i8,
}

/// Samples each chart domain, pushes the points forward and compares the
/// numeric sign of every function with the symbolic one: `|v| ≤ 1e-9` for
/// sign 0, otherwise the right sign with `|v| > 1e-12`. Free coordinates
/// stay above an eighth of their radius, since a monomial of high degree
/// is legitimately below the margin near the corner of its domain.
pub fn check_sign_constancy<R: Rng>(param: &Parametrization, samples: usize, rng: &mut R) -> Vec<SignViolation> {
    let mut out = Vec::new();
    for (ci, pc) in param.charts.iter().enumerate() {
        let n = if pc.chart.dimension() == 0 { 1 } else { samples };
        for _ in 0..n {
            let p = pc.chart.domain.sample_above(SIGN_SAMPLE_FLOOR, rng);
            let q = pc.chart.map_point(&p);
            for (fi, f) in param.functions.iter().enumerate() {
                let v = f.eval_unchecked(&q);
                let expected = pc.signs[fi];
                let ok = match expected {
                    0 => v.abs() <= 1e-9,
                    1 => v > 1e-12,
                    _ => v < -1e-12,
                };
                if !ok {
                    out.push(SignViolation {
                        chart: ci,
                        function: fi,
                        point: q.clone(),
                        value: v,
                        expected,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(sig: &VariableSignature, t: &[((i64, i64), &[(i64, i64)])]) -> GenSeries {
        GenSeries::from_frac_terms(sig, t).unwrap()
    }

    #[test]
    fn interval_without_functions() {
        let sig = VariableSignature::uniform(1, 0, rational::frac(1, 2));
        let p = build_local_parametrization(&ParamTarget::Polydisk(sig.clone()), &[], &ParamOptions::default()).unwrap();
        assert_eq!(p.charts.len(), 2);
        assert!(p.charts.iter().all(|c| c.chart.chain.is_empty()));
        assert_eq!(p.charts[0].chart.domain.selectors(), &[Selector::Zero]);
        assert_eq!(p.charts[1].chart.domain.selectors(), &[Selector::Positive]);
        assert_eq!(p.certified_radius, vec![rational::frac(1, 2)]);
    }

    #[test]
    fn square_with_difference() {
        let sig = VariableSignature::unit(2, 0);
        let f = s(&sig, &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 1), &[(0, 1), (1, 1)])]);
        let p = build_local_parametrization(&ParamTarget::Polydisk(sig.clone()), &[f], &ParamOptions::default()).unwrap();
        assert!(!p.gaps);
        let open_a = p
            .charts
            .iter()
            .find(|c| {
                matches!(c.chart.chain.steps().first().map(|s| s.kind()), Some(TransformKind::BlowupChartA { .. }))
                    && c.chart.dimension() == 2
            })
            .unwrap();
        assert_eq!(open_a.signs, vec![1]);
        assert!(p.charts.iter().all(|c| c.chart.injectivity_certified()));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(check_sign_constancy(&p, 200, &mut rng).is_empty());
        let pts: Vec<Vec<f64>> = (0..2000).map(|_| sample_box(&sig, &p.certified_radius, &mut rng)).collect();
        assert!(covering_fraction(&p.charts, &pts) >= 0.99);
        assert!(covering_fraction(&p.charts, &[vec![0.0, 0.0], vec![0.0, 0.3], vec![0.3, 0.0]]) == 1.0);
    }

    #[test]
    fn basic_set_keeps_zero_charts() {
        let sig = VariableSignature::unit(2, 0);
        let f = s(&sig, &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 1), &[(0, 1), (1, 1)])]);
        let b = BasicSetDescriptor::new(f.clone(), vec![]).unwrap();
        let p = build_local_parametrization(&ParamTarget::BasicSet(b), &[], &ParamOptions::default()).unwrap();
        assert!(!p.charts.is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for c in &p.charts {
            for _ in 0..50 {
                let q = c.chart.map_point(&c.chart.domain.sample(&mut rng));
                assert!((q[0] - q[1]).abs() < 1e-12);
            }
        }
    }
}
