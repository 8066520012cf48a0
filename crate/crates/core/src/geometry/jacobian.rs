//! Cleared Jacobians `A = a·dη` of series maps and rank profiling of charts.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::param::{build_local_parametrization, ParamOptions, ParamTarget};
use super::{Chart, Quadrant};
use crate::error::{Error, Result};
use crate::exponents::{ExponentVector, VariableSignature};
use crate::series::GenSeries;

/// A map `η = (η_1, …, η_N)` given by series on one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMap {
    sig: VariableSignature,
    components: Vec<GenSeries>,
}

impl SeriesMap {
    pub fn new(sig: VariableSignature, components: Vec<GenSeries>) -> Result<Self> {
        if let Some(c) = components.iter().find(|c| c.signature() != &sig) {
            return Err(Error::Signature(format!("component on {}, map on {}", c.signature(), sig)));
        }
        Ok(Self { sig, components })
    }

    pub fn signature(&self) -> &VariableSignature {
        &self.sig
    }

    pub fn components(&self) -> &[GenSeries] {
        &self.components
    }

    /// Number of source variables.
    pub fn dim(&self) -> usize {
        self.sig.len()
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval_unchecked(x)).collect()
    }

    /// `∂η_i/∂x_j` at a point with nonzero coordinates, via `x_j ∂_j η_i / x_j`.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(self.len(), d, |i, j| {
            let g = self.components[i].log_derivative(j).expect("index in range");
            g.eval_unchecked(x) / x[j]
        })
    }

    /// Central differences with steps relative to each coordinate.
    pub fn jacobian_fd(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim();
        let mut j = DMatrix::zeros(self.len(), d);
        for k in 0..d {
            let h = if x[k] != 0.0 { 1e-4 * x[k].abs() } else { 1e-7 };
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[k] += h;
            q[k] -= h;
            let (fp, fq) = (self.eval(&p), self.eval(&q));
            for i in 0..self.len() {
                j[(i, k)] = (fp[i] - fq[i]) / (2.0 * h);
            }
        }
        j
    }

    /// `η` restricted to a chart of its own domain, as a map on the chart's
    /// free variables.
    pub fn pull_back(&self, chart: &Chart) -> Result<SeriesMap> {
        if chart.chain.root() != &self.sig {
            return Err(Error::Signature(format!("chart rooted at {}, map on {}", chart.chain.root(), self.sig)));
        }
        let inner = chart.restricted_map()?;
        let chain = chart.restriction()?;
        let components = self
            .components
            .iter()
            .map(|c| chain.apply(c)?.with_signature(inner.signature()))
            .collect::<Result<Vec<_>>>()?;
        SeriesMap::new(inner.sig, components)
    }
}

/// Cleared Jacobian data for a map on `d` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClearedJacobian {
    pub m_split: usize,
    pub iota: Vec<usize>,
    pub l: usize,
    /// `x_1 ⋯ x_d`.
    pub a: GenSeries,
    /// `N × d`, `A_ij = a ∂η_i/∂x_j`.
    pub matrix: Vec<Vec<GenSeries>>,
    /// Rows `ι` of `A`.
    pub square: Vec<Vec<GenSeries>>,
    pub det: GenSeries,
    /// Cofactor transpose of `square`.
    pub adjugate: Vec<Vec<GenSeries>>,
    /// Columns `l..d` of the adjugate.
    pub kernel: Vec<Vec<GenSeries>>,
}

fn ones_exponent(d: usize) -> ExponentVector {
    ExponentVector::from_ints(&vec![1; d])
}

/// `A_ij = (x_j ∂_j η_i)·(a / x_j)`, exact.
pub(crate) fn cleared_matrix(map: &SeriesMap) -> Result<Vec<Vec<GenSeries>>> {
    let d = map.dim();
    map.components
        .iter()
        .map(|eta| {
            (0..d)
                .map(|j| {
                    let mut e = vec![1; d];
                    e[j] = 0;
                    Ok(eta.log_derivative(j)?.mul_monomial(&ExponentVector::from_ints(&e)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Laplace expansion along the first row.
pub(crate) fn determinant(sig: &VariableSignature, m: &[Vec<GenSeries>]) -> Result<GenSeries> {
    let n = m.len();
    if n == 0 {
        return Ok(GenSeries::one(sig));
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = GenSeries::zero(sig);
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<GenSeries>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = m[0][c].mul(&determinant(sig, &minor)?)?;
        acc = if c % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc)
}

pub(crate) fn submatrix(m: &[Vec<GenSeries>], rows: &[usize], cols: &[usize]) -> Vec<Vec<GenSeries>> {
    rows.iter().map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect()).collect()
}

fn adjugate(sig: &VariableSignature, m: &[Vec<GenSeries>]) -> Result<Vec<Vec<GenSeries>>> {
    let d = m.len();
    if d == 1 {
        return Ok(vec![vec![GenSeries::one(sig)]]);
    }
    let mut b = vec![vec![GenSeries::zero(sig); d]; d];
    for (i, row) in b.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let rows: Vec<usize> = (0..d).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..d).filter(|&c| c != i).collect();
            let minor = determinant(sig, &submatrix(m, &rows, &cols))?;
            *entry = if (i + j) % 2 == 0 { minor } else { minor.neg() };
        }
    }
    Ok(b)
}

fn mat_mul(sig: &VariableSignature, x: &[Vec<GenSeries>], y: &[Vec<GenSeries>]) -> Result<Vec<Vec<GenSeries>>> {
    let (r, k, c) = (x.len(), y.len(), y.first().map_or(0, Vec::len));
    let mut out = vec![vec![GenSeries::zero(sig); c]; r];
    for i in 0..r {
        for j in 0..c {
            for t in 0..k {
                out[i][j] = out[i][j].add(&x[i][t].mul(&y[t][j])?)?;
            }
        }
    }
    Ok(out)
}

/// Builds `a`, `A`, `A′ = Π_ι A`, `B = adj A′` and the kernel columns
/// `b_{l+1}, …, b_d`, checking `B·A′ = A′·B = det(A′)·I` exactly.
pub fn cleared_jacobian(map: &SeriesMap, m_split: usize, iota: &[usize], l: usize) -> Result<ClearedJacobian> {
    let d = map.dim();
    let n = map.len();
    if m_split > n {
        return Err(Error::Precondition(format!("m_split = {m_split} exceeds {n} components")));
    }
    if iota.len() != d || l > d {
        return Err(Error::Precondition(format!("ι = {iota:?} with l = {l} for d = {d}")));
    }
    if iota.windows(2).any(|w| w[0] >= w[1]) || iota.iter().any(|&r| r >= n) {
        return Err(Error::Precondition(format!("ι = {iota:?} must increase within 0..{n}")));
    }
    if iota[..l].iter().any(|&r| r >= m_split) {
        return Err(Error::Precondition(format!("first {l} entries of ι = {iota:?} must be below {m_split}")));
    }
    let sig = map.signature();
    let a = GenSeries::monomial(sig, ones_exponent(d), num_traits::One::one())?;
    let matrix = cleared_matrix(map)?;
    let square = submatrix(&matrix, iota, &(0..d).collect::<Vec<_>>());
    let det = determinant(sig, &square)?;
    let adj = if d == 0 { Vec::new() } else { adjugate(sig, &square)? };
    for prod in [mat_mul(sig, &adj, &square)?, mat_mul(sig, &square, &adj)?] {
        for (i, row) in prod.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { det.clone() } else { GenSeries::zero(sig) };
                if *x != want {
                    return Err(Error::Verification {
                        branch: format!("ι = {iota:?}"),
                        reason: format!("adjugate identity fails at ({i}, {j})"),
                    });
                }
            }
        }
    }
    let kernel = (l..d).map(|c| (0..d).map(|r| adj[r][c].clone()).collect()).collect();
    Ok(ClearedJacobian {
        m_split,
        iota: iota.to_vec(),
        l,
        a,
        matrix,
        square,
        det,
        adjugate: adj,
        kernel,
    })
}

impl ClearedJacobian {
    /// `max |A(x) − a(x)·J_fd(x)| / max |A(x)|` at `x`.
    pub fn relative_error(&self, map: &SeriesMap, x: &[f64]) -> f64 {
        let j = map.jacobian_fd(x);
        let a = self.a.eval_unchecked(x);
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            for (k, entry) in row.iter().enumerate() {
                let v = entry.eval_unchecked(x);
                diff = diff.max((v - a * j[(i, k)]).abs());
                scale = scale.max(v.abs());
            }
        }
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }
}

/// A rank-homogeneous piece of a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedPiece {
    /// Index of the input chart.
    pub parent: usize,
    /// Subchart of the parent's domain polydisk.
    pub chart: Chart,
    /// The parent chart composed with `chart`, on `chart`'s free variables.
    pub map: SeriesMap,
    pub rank: usize,
    pub iota: Vec<usize>,
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Numeric rank with threshold `σ > 1e-8 σ_max`.
pub(crate) fn numeric_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > 1e-8 * top).count()
}

struct Minor {
    rows: Vec<usize>,
    cols: Vec<usize>,
    slot: Option<usize>,
}

fn refine_one<R: Rng>(
    parent: usize,
    map: SeriesMap,
    m_split: usize,
    opts: &ParamOptions,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<RankedPiece>> {
    let d = map.dim();
    let n = map.len();
    if m_split > n {
        return Err(Error::Precondition(format!("m_split = {m_split} exceeds {n} coordinates")));
    }
    let sig = map.signature().clone();
    if d == 0 {
        let point = Chart::new(crate::transforms::TransformChain::identity(&sig), Quadrant::open(&sig))?;
        return Ok(vec![RankedPiece {
            parent,
            chart: point,
            map,
            rank: 0,
            iota: Vec::new(),
        }]);
    }
    let a = cleared_matrix(&map)?;
    let all_cols: Vec<usize> = (0..d).collect();
    let mut minors = Vec::new();
    for k in 1..=m_split.min(d) {
        for rows in combinations(m_split, k) {
            for cols in combinations(d, k) {
                minors.push(Minor { rows: rows.clone(), cols, slot: None });
            }
        }
    }
    for rows in combinations(n, d) {
        minors.push(Minor { rows, cols: all_cols.clone(), slot: None });
    }
    let mut family: Vec<GenSeries> = Vec::new();
    for mi in &mut minors {
        let det = determinant(&sig, &submatrix(&a, &mi.rows, &mi.cols))?;
        if det.is_zero() {
            continue;
        }
        mi.slot = Some(match family.iter().position(|f| *f == det) {
            Some(p) => p,
            None => {
                family.push(det);
                family.len() - 1
            }
        });
    }
    let param = build_local_parametrization(&ParamTarget::Polydisk(sig.clone()), &family, opts)?;
    let nonzero = |signs: &[i8], mi: &Minor| mi.slot.is_some_and(|s| signs[s] != 0);
    let mut out = Vec::new();
    // Lower-dimensional subcharts lie on the boundary of the open domain.
    for pc in param.charts.iter().filter(|pc| pc.chart.dimension() == d) {
        let signs = &pc.signs;
        let rank = (1..=m_split.min(d))
            .rev()
            .find(|&k| {
                minors
                    .iter()
                    .any(|mi| mi.cols.len() == k && mi.rows.iter().all(|&r| r < m_split) && nonzero(signs, mi))
            })
            .unwrap_or(0);
        let iota = witness(&minors, signs, m_split, n, d, rank).ok_or_else(|| {
            Error::Rank(format!("chart {parent}: no rows ι with a nonvanishing {d}-minor over quadrant {}", pc.chart.domain))
        })?;
        let piece_map = map.pull_back(&pc.chart)?;
        let q = Quadrant::open(piece_map.signature());
        for _ in 0..samples {
            let x = q.sample(rng);
            let j = piece_map.jacobian(&x);
            let proj = j.rows(0, m_split).into_owned();
            let got = numeric_rank(&proj);
            let sel = DMatrix::from_fn(d, d, |r, c| j[(iota[r], c)]);
            let full = numeric_rank(&sel);
            if got != rank || full != d {
                return Err(Error::Rank(format!(
                    "chart {parent}: numeric rank {got} (immersion rank {full}) at {x:?}, expected {rank} ({d})"
                )));
            }
        }
        out.push(RankedPiece {
            parent,
            chart: pc.chart.clone(),
            map: piece_map,
            rank,
            iota,
        });
    }
    Ok(out)
}

/// Lex-first `R ⊂ [0, m_split)` of size `l` with a nonvanishing `l`-minor,
/// extended by rows above `max R` to a `d`-set with a nonvanishing
/// `d`-minor.
fn witness(minors: &[Minor], signs: &[i8], m_split: usize, n: usize, d: usize, l: usize) -> Option<Vec<usize>> {
    let live = |rows: &[usize], k: usize| {
        minors
            .iter()
            .any(|mi| mi.rows == rows && mi.cols.len() == k && mi.slot.is_some_and(|s| signs[s] != 0))
    };
    for r in combinations(m_split, l) {
        if l > 0 && !live(&r, l) {
            continue;
        }
        let start = r.last().map_or(0, |x| x + 1);
        for ext in combinations(n - start, d - l) {
            let mut rows = r.clone();
            rows.extend(ext.iter().map(|x| x + start));
            if live(&rows, d) {
                return Some(rows);
            }
        }
    }
    None
}

/// Splits every chart into pieces on which `Π_{m_split} ∘ η` has constant
/// rank `l`, using the minors of the cleared Jacobian as compatibility
/// functions, and checks the rank numerically on `samples` points per
/// piece. Charts are processed in parallel; output follows input order.
pub fn refine_by_rank(charts: &[Chart], m_split: usize, opts: &ParamOptions, samples: usize, seed: u64) -> Result<Vec<RankedPiece>> {
    let maps = charts.iter().map(Chart::restricted_map).collect::<Result<Vec<_>>>()?;
    refine_maps_by_rank(&maps, m_split, opts, samples, seed)
}

/// [`refine_by_rank`] for maps given directly on an open positive
/// quadrant, such as graphs that no chart chain produces.
pub fn refine_maps_by_rank(maps: &[SeriesMap], m_split: usize, opts: &ParamOptions, samples: usize, seed: u64) -> Result<Vec<RankedPiece>> {
    let parts: Vec<Result<Vec<RankedPiece>>> = maps
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            refine_one(k, m.clone(), m_split, opts, samples, &mut rng)
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::transforms::TransformChain;

    fn map(d: usize, comps: &[&[((i64, i64), &[(i64, i64)])]]) -> SeriesMap {
        let sig = VariableSignature::uniform(d, 0, frac(1, 2));
        let c = comps.iter().map(|t| GenSeries::from_frac_terms(&sig, t).unwrap()).collect();
        SeriesMap::new(sig, c).unwrap()
    }

    #[test]
    fn identity_in_one_variable() {
        let m = map(1, &[&[((1, 1), &[(1, 1)])]]);
        let cj = cleared_jacobian(&m, 1, &[0], 1).unwrap();
        assert_eq!(cj.a, m.components()[0]);
        assert_eq!(cj.matrix[0][0], m.components()[0]);
        assert!(cj.kernel.is_empty());
    }

    #[test]
    fn product_map() {
        let m = map(2, &[&[((1, 1), &[(1, 1), (1, 1)])], &[((1, 1), &[(0, 1), (1, 1)])]]);
        let cj = cleared_jacobian(&m, 1, &[0, 1], 1).unwrap();
        let sig = m.signature();
        let mono = |a: i64, b: i64, c: i64| GenSeries::monomial(sig, ExponentVector::from_ints(&[a, b]), int(c)).unwrap();
        assert_eq!(cj.matrix[0], vec![mono(1, 2, 1), mono(2, 1, 1)]);
        assert_eq!(cj.kernel, vec![vec![mono(2, 1, -1), mono(1, 2, 1)]]);
        assert!(cj.relative_error(&m, &[0.3, 0.2]) < 1e-6);
    }

    #[test]
    fn rank_of_diagonals() {
        let t: &[((i64, i64), &[(i64, i64)])] = &[((1, 1), &[(1, 1)])];
        for comps in [vec![t, t], vec![t, t, t]] {
            let pieces = refine_maps_by_rank(&[map(1, &comps)], 1, &ParamOptions::default(), 20, 1).unwrap();
            assert_eq!(pieces.len(), 1);
            assert_eq!((pieces[0].rank, pieces[0].iota.clone()), (1, vec![0]));
        }
    }

    #[test]
    fn rank_of_axis_chart() {
        use crate::geometry::Selector;
        let sig = VariableSignature::uniform(2, 0, frac(1, 2));
        let q = Quadrant::new(&sig, vec![Selector::Zero, Selector::Positive]).unwrap();
        let chart = Chart::new(TransformChain::identity(&sig), q).unwrap();
        let pieces = refine_by_rank(std::slice::from_ref(&chart), 1, &ParamOptions::default(), 20, 1).unwrap();
        assert_eq!((pieces[0].rank, pieces[0].iota.clone()), (0, vec![1]));
        let point = Chart::new(TransformChain::identity(&sig), Quadrant::new(&sig, vec![Selector::Zero; 2]).unwrap()).unwrap();
        let pieces = refine_by_rank(&[point], 1, &ParamOptions::default(), 20, 1).unwrap();
        assert_eq!((pieces[0].rank, pieces[0].iota.len()), (0, 0));
    }

    #[test]
    fn combinations_are_lex() {
        assert_eq!(combinations(4, 2), vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
