//! Piecewise-polynomial laboratory for the space of functions on (−1, 1)
//! that are `C^p` at the `p`-th marked point: jets, seminorms, the
//! perturbation space `W`, the submersion `Φ(x, ε) = (x, j(f + h_ε)(x))`
//! and its gradients.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::series::GenSeries;

/// Dyadic rationals of (−1, 1) by denominator, then numerator:
/// `0, −1/2, 1/2, −3/4, −1/4, 1/4, 3/4, −7/8, …`.
pub fn dyadic_sequence(count: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    let mut e = 1u32;
    while out.len() < count {
        let den = 1i64 << e;
        let mut num = -den + 1;
        while num < den && out.len() < count {
            out.push(rational::frac(num, den));
            num += 2;
        }
        e += 1;
    }
    out.truncate(count);
    out
}

/// Marked points `a_0, …, a_k` and their sorted view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakpointSystem {
    points: Vec<Rational>,
    sorted: Vec<Rational>,
}

impl BreakpointSystem {
    pub fn new(points: Vec<Rational>) -> Result<Self> {
        let one = Rational::one();
        if let Some(a) = points.iter().find(|a| a.abs() >= one) {
            return Err(Error::Precondition(format!("marked point {a} outside (-1, 1)")));
        }
        let mut sorted = points.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) || points.is_empty() {
            return Err(Error::Precondition("marked points must be distinct and nonempty".into()));
        }
        Ok(Self { points, sorted })
    }

    /// The first `k + 1` terms of [`dyadic_sequence`].
    pub fn dyadic(k: usize) -> Self {
        Self::new(dyadic_sequence(k + 1)).expect("dyadic points are distinct")
    }

    pub fn k(&self) -> usize {
        self.points.len() - 1
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn sorted(&self) -> &[Rational] {
        &self.sorted
    }

    pub fn pieces(&self) -> usize {
        self.points.len() + 1
    }

    /// Piece `i` is `[b_{i−1}, b_i)` with `b_{−1} = −1`, `b_{k+1} = 1`.
    pub fn piece_bounds(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { -1.0 } else { rational::to_f64(&self.sorted[i - 1]) };
        let hi = if i == self.sorted.len() { 1.0 } else { rational::to_f64(&self.sorted[i]) };
        (lo, hi)
    }

    /// Exact centre and half-width of piece `i`; pieces are stored in
    /// `t = (x − c) / r`.
    pub fn piece_frame(&self, i: usize) -> (Rational, Rational) {
        let lo = if i == 0 { -Rational::one() } else { self.sorted[i - 1].clone() };
        let hi = if i == self.sorted.len() { Rational::one() } else { self.sorted[i].clone() };
        let half = rational::frac(1, 2);
        ((&lo + &hi) * &half, (hi - lo) * half)
    }

    fn frame_f64(&self, i: usize) -> (f64, f64) {
        let (c, r) = self.piece_frame(i);
        (rational::to_f64(&c), rational::to_f64(&r))
    }

    pub fn piece_of(&self, x: f64) -> usize {
        self.sorted.iter().take_while(|b| rational::to_f64(b) <= x).count()
    }

    fn sorted_index(&self, a: &Rational) -> Option<usize> {
        self.sorted.iter().position(|b| b == a)
    }

    pub fn is_marked(&self, x: f64) -> bool {
        self.sorted.iter().any(|b| rational::to_f64(b) == x)
    }
}

/// `d^q/dx^q` of `Σ c_j x^j`, as coefficients.
fn derive(c: &[f64], q: usize) -> Vec<f64> {
    if q >= c.len() {
        return Vec::new();
    }
    (q..c.len())
        .map(|j| {
            let fall: f64 = ((j - q + 1)..=j).map(|t| t as f64).product();
            c[j] * fall
        })
        .collect()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

/// Real roots of a polynomial in `[lo, hi]` by splitting at the roots of
/// its derivative and bisecting the monotone pieces.
fn real_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    match c.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -c[0] / c[1];
            return if (lo..=hi).contains(&r) { vec![r] } else { Vec::new() };
        }
        _ => {}
    }
    let mut cuts = vec![lo];
    cuts.extend(real_roots(&derive(&c, 1), lo, hi));
    cuts.push(hi);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (horner(&c, a), horner(&c, b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if horner(&c, m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out.dedup();
    out
}

/// `Σ a_j x^j` rewritten in `t` with `x = c + r t`.
fn to_local(a: &[f64], c: f64, r: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    // (c + r t)^j expanded term by term.
    let mut pow = vec![1.0];
    for &aj in a {
        for (m, v) in pow.iter().enumerate() {
            out[m] += aj * v;
        }
        let mut next = vec![0.0; pow.len() + 1];
        for (m, v) in pow.iter().enumerate() {
            next[m] += c * v;
            next[m + 1] += r * v;
        }
        pow = next;
    }
    out
}

fn max_abs(c: &[f64], lo: f64, hi: f64) -> f64 {
    let mut best = horner(c, lo).abs().max(horner(c, hi).abs());
    for r in real_roots(&derive(c, 1), lo, hi) {
        best = best.max(horner(c, r).abs());
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A piecewise polynomial on the pieces of a breakpoint system. Piece `i`
/// is stored in the monomial basis of the local variable
/// `t = (x − c_i) / r_i` (see [`BreakpointSystem::piece_frame`]).
#[derive(Debug, Clone, PartialEq)]
pub struct VElement {
    bp: BreakpointSystem,
    pieces: Vec<Vec<f64>>,
}

/// A failed matching condition: derivative `order` at `a_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchViolation {
    pub a_index: usize,
    pub order: usize,
    pub jump: f64,
}

impl VElement {
    /// Checks the matching conditions with tolerance `1e-9` relative to
    /// the size of the one-sided values.
    pub fn new(bp: BreakpointSystem, pieces: Vec<Vec<f64>>) -> Result<Self> {
        let f = Self::unchecked(bp, pieces)?;
        let bad = f.violations(1e-9);
        if let Some(v) = bad.first() {
            return Err(Error::Precondition(format!(
                "derivative {} jumps by {:e} at a_{}",
                v.order, v.jump, v.a_index
            )));
        }
        Ok(f)
    }

    /// Pieces given in powers of `x`. No matching check; use
    /// [`VElement::violations`] to inspect.
    pub fn unchecked(bp: BreakpointSystem, pieces: Vec<Vec<f64>>) -> Result<Self> {
        if pieces.len() != bp.pieces() {
            return Err(Error::Precondition(format!("{} pieces for {} marked points", pieces.len(), bp.points.len())));
        }
        let pieces = pieces
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let (ctr, r) = bp.frame_f64(i);
                to_local(c, ctr, r)
            })
            .collect();
        Ok(Self { bp, pieces })
    }

    /// Pieces given in the local variables, unchecked.
    pub fn from_local(bp: BreakpointSystem, pieces: Vec<Vec<f64>>) -> Result<Self> {
        if pieces.len() != bp.pieces() {
            return Err(Error::Precondition(format!("{} pieces for {} marked points", pieces.len(), bp.points.len())));
        }
        Ok(Self { bp, pieces })
    }

    pub fn zero(bp: &BreakpointSystem) -> Self {
        Self {
            pieces: vec![Vec::new(); bp.pieces()],
            bp: bp.clone(),
        }
    }

    /// One polynomial in `x` on every piece.
    pub fn polynomial(bp: &BreakpointSystem, coeffs: Vec<f64>) -> Self {
        Self::unchecked(bp.clone(), vec![coeffs; bp.pieces()]).expect("piece count fixed")
    }

    /// `h_ε` for a flat vector of `pieces × (degree + 1)` local
    /// coefficients.
    pub fn from_flat(bp: &BreakpointSystem, degree: usize, eps: &[f64]) -> Result<Self> {
        if eps.len() != bp.pieces() * (degree + 1) {
            return Err(Error::Precondition(format!("{} coefficients for degree {degree}", eps.len())));
        }
        Self::from_local(bp.clone(), eps.chunks(degree + 1).map(<[f64]>::to_vec).collect())
    }

    pub fn breakpoints(&self) -> &BreakpointSystem {
        &self.bp
    }

    /// Local coefficients of each piece.
    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn add(&self, other: &VElement) -> Result<VElement> {
        if self.bp != other.bp {
            return Err(Error::Precondition("different breakpoint systems".into()));
        }
        let pieces = self
            .pieces
            .iter()
            .zip(&other.pieces)
            .map(|(a, b)| {
                let n = a.len().max(b.len());
                (0..n).map(|j| a.get(j).unwrap_or(&0.0) + b.get(j).unwrap_or(&0.0)).collect()
            })
            .collect();
        Ok(VElement { bp: self.bp.clone(), pieces })
    }

    pub fn scale(&self, c: f64) -> VElement {
        VElement {
            bp: self.bp.clone(),
            pieces: self.pieces.iter().map(|p| p.iter().map(|v| v * c).collect()).collect(),
        }
    }

    /// `f^{(q)}(x)` on the piece containing `x` (right-continuous).
    pub fn derivative(&self, q: usize, x: f64) -> f64 {
        self.piece_derivative(self.bp.piece_of(x), q, x)
    }

    fn piece_derivative(&self, i: usize, q: usize, x: f64) -> f64 {
        let (c, r) = self.bp.frame_f64(i);
        horner(&derive(&self.pieces[i], q), (x - c) / r) / r.powi(q as i32)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    fn adjacent(&self, a: &Rational, side: Side) -> usize {
        match (self.bp.sorted_index(a), side) {
            (Some(s), Side::Left) => s,
            (Some(s), Side::Right) => s + 1,
            (None, _) => self.bp.piece_of(rational::to_f64(a)),
        }
    }

    /// Derivatives `0..=p` of the piece on `side` of `a`, evaluated at `a`.
    pub fn one_sided_jet(&self, a: &Rational, p: usize, side: Side) -> Vec<f64> {
        let i = self.adjacent(a, side);
        let x = rational::to_f64(a);
        (0..=p).map(|q| self.piece_derivative(i, q, x)).collect()
    }

    /// Jumps of derivatives `0..=i` at each `a_i`, beyond `tol` relative.
    pub fn violations(&self, tol: f64) -> Vec<MatchViolation> {
        let mut out = Vec::new();
        for (i, a) in self.bp.points.iter().enumerate() {
            let l = self.one_sided_jet(a, i, Side::Left);
            let r = self.one_sided_jet(a, i, Side::Right);
            for q in 0..=i {
                let jump = (l[q] - r[q]).abs();
                if jump > tol * (1.0 + l[q].abs().max(r[q].abs())) {
                    out.push(MatchViolation {
                        a_index: i,
                        order: q,
                        jump,
                    });
                }
            }
        }
        out
    }
}

/// `‖f‖_{K,p} = sup{|f^{(q)}(x)| : x ∈ K \ S, q ≤ p}` for `K = [lo, hi]`,
/// with `S` the marked points; `0` when `K ⊂ S`. Per-piece maxima come
/// from the critical points of each derivative.
pub fn seminorm(f: &VElement, lo: &Rational, hi: &Rational, p: usize) -> Result<f64> {
    let one = Rational::one();
    if lo > hi || lo.abs() >= one || hi.abs() >= one {
        return Err(Error::Precondition(format!("K = [{lo}, {hi}] must lie in (-1, 1)")));
    }
    if lo == hi {
        if f.bp.sorted_index(lo).is_some() {
            return Ok(0.0);
        }
        let x = rational::to_f64(lo);
        return Ok((0..=p).map(|q| f.derivative(q, x).abs()).fold(0.0, f64::max));
    }
    let (lo, hi) = (rational::to_f64(lo), rational::to_f64(hi));
    let mut best: f64 = 0.0;
    for (i, piece) in f.pieces.iter().enumerate() {
        let (a, b) = f.bp.piece_bounds(i);
        let (s, t) = (a.max(lo), b.min(hi));
        if s >= t {
            continue;
        }
        let (c, r) = f.bp.frame_f64(i);
        for q in 0..=p {
            best = best.max(max_abs(&derive(piece, q), (s - c) / r, (t - c) / r) / r.powi(q as i32));
        }
    }
    Ok(best)
}

/// One coordinate of the jet tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetCoord {
    /// `f^{(q)}(x_i)`, `i` 0-based.
    Point { i: usize, q: usize },
    /// `f^{(q)}(a_i)` for `q ≤ i`.
    Marked { i: usize, q: usize },
    /// `f^{(q)}(a_i^-)` for `i < q ≤ p`.
    Left { i: usize, q: usize },
    /// `f^{(q)}(a_i^+)` for `i < q ≤ p`.
    Right { i: usize, q: usize },
}

impl std::fmt::Display for JetCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            JetCoord::Point { i, q } => write!(f, "f^({q})(x{})", i + 1),
            JetCoord::Marked { i, q } => write!(f, "f^({q})(a{i})"),
            JetCoord::Left { i, q } => write!(f, "f^({q})(a{i}-)"),
            JetCoord::Right { i, q } => write!(f, "f^({q})(a{i}+)"),
        }
    }
}

/// Canonical order: the points `x_1..x_n` (each with `q = 0..=p`), then
/// `f^{(q)}(a_i)` for `q ≤ i`, then the pairs `a_i^-, a_i^+` for
/// `i < q ≤ p`, with `i` ascending in each group.
pub fn jet_layout(n: usize, p: usize, k: usize) -> Vec<JetCoord> {
    let mut out = Vec::new();
    for i in 0..n {
        for q in 0..=p {
            out.push(JetCoord::Point { i, q });
        }
    }
    for i in 0..=k {
        for q in 0..=i {
            out.push(JetCoord::Marked { i, q });
        }
    }
    for i in 0..=k {
        for q in (i + 1)..=p {
            out.push(JetCoord::Left { i, q });
            out.push(JetCoord::Right { i, q });
        }
    }
    out
}

/// `n(p+1) + (k+1)(k+2)/2 + 2 Σ_{i≤k} (p − i)`.
pub fn jet_length(n: usize, p: usize, k: usize) -> usize {
    n * (p + 1) + (k + 1) * (k + 2) / 2 + 2 * (0..=k).map(|i| p.saturating_sub(i)).sum::<usize>()
}

/// `l = n(p+2) + 2(k+1)(p+1) − (k+1)(k+2)/2`.
pub fn submersion_dimension(n: usize, p: usize, k: usize) -> usize {
    n * (p + 2) + 2 * (k + 1) * (p + 1) - (k + 1) * (k + 2) / 2
}

/// `n(p+2) + (k+1)(2p+3) − (k+1)(k+2)/2`, the length of
/// `(x, a_0, …, a_k, jet)`.
pub fn transcendence_tuple_length(n: usize, p: usize, k: usize) -> usize {
    n * (p + 2) + (k + 1) * (2 * p + 3) - (k + 1) * (k + 2) / 2
}

/// The proof's piece degree `(n+2)(p+1) − 1`.
pub fn default_piece_degree(n: usize, p: usize) -> usize {
    (n + 2) * (p + 1) - 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct JetTuple {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub layout: Vec<JetCoord>,
    pub values: Vec<f64>,
}

fn check_jet_args(f: &VElement, x: &[f64], p: usize, k: usize) -> Result<()> {
    if p < k || k > f.bp.k() {
        return Err(Error::Precondition(format!("need k ≤ p and k ≤ {} (got k = {k}, p = {p})", f.bp.k())));
    }
    for (a, xa) in x.iter().enumerate() {
        if !(-1.0 < *xa && *xa < 1.0) || f.bp.is_marked(*xa) {
            return Err(Error::Precondition(format!("x{} = {xa} is outside (-1, 1) or marked", a + 1)));
        }
        if x[..a].contains(xa) {
            return Err(Error::Precondition(format!("x{} = {xa} repeats an earlier point", a + 1)));
        }
    }
    Ok(())
}

fn jet_value(f: &VElement, x: &[f64], c: JetCoord) -> f64 {
    let a = |i: usize| &f.bp.points[i];
    match c {
        JetCoord::Point { i, q } => f.derivative(q, x[i]),
        JetCoord::Marked { i, q } => f.one_sided_jet(a(i), q, Side::Right)[q],
        JetCoord::Left { i, q } => f.one_sided_jet(a(i), q, Side::Left)[q],
        JetCoord::Right { i, q } => f.one_sided_jet(a(i), q, Side::Right)[q],
    }
}

/// `j_n^{p,k} f(x)` in the order of [`jet_layout`].
pub fn jet_tuple(f: &VElement, x: &[f64], p: usize, k: usize) -> Result<JetTuple> {
    check_jet_args(f, x, p, k)?;
    let n = x.len();
    let layout = jet_layout(n, p, k);
    let values = layout.iter().map(|c| jet_value(f, x, *c)).collect();
    Ok(JetTuple { n, p, k, layout, values })
}

/// Exact constraint rows `(f_left − f_right)^{(q)}(a_i) = 0` for `q ≤ i`
/// on the flat local coefficient vector.
pub fn constraint_matrix(bp: &BreakpointSystem, degree: usize) -> Vec<Vec<Rational>> {
    let cols = bp.pieces() * (degree + 1);
    let mut rows = Vec::new();
    for (i, a) in bp.points.iter().enumerate() {
        let s = bp.sorted_index(a).expect("marked point");
        for q in 0..=i {
            let mut row = vec![Rational::zero(); cols];
            for (piece, sign) in [(s, Rational::one()), (s + 1, -Rational::one())] {
                let (c, r) = bp.piece_frame(piece);
                let t = (a - &c) / &r;
                let scale = &sign / pow_int(&r, q);
                for j in q..=degree {
                    let fall: i64 = ((j - q + 1)..=j).map(|t| t as i64).product();
                    row[piece * (degree + 1) + j] = Rational::from_integer(fall.into()) * pow_int(&t, j - q) * &scale;
                }
            }
            rows.push(row);
        }
    }
    rows
}

fn pow_int(a: &Rational, e: usize) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * a)
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

/// The perturbation space `W = {ε : h_ε is a member}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WBasis {
    pub bp: BreakpointSystem,
    pub degree: usize,
    /// Exact rank of the constraint matrix.
    pub codimension: usize,
    /// Rank by SVD with threshold `1e-8 σ_max` after equilibration.
    pub numeric_rank: usize,
    /// Exact null-space vectors, converted.
    pub basis: Vec<Vec<f64>>,
    /// Orthonormal columns spanning `W`.
    pub orthonormal: DMatrix<f64>,
}

impl WBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.bp.pieces() * (self.degree + 1)
    }

    /// `h_ε` for `ε = Q θ` with `Q` the orthonormal basis.
    pub fn element(&self, theta: &[f64]) -> Result<VElement> {
        let eps = &self.orthonormal * DMatrix::from_column_slice(theta.len(), 1, theta);
        VElement::from_flat(&self.bp, self.degree, eps.as_slice())
    }

    /// `h` of the `t`-th orthonormal direction.
    pub fn direction(&self, t: usize) -> VElement {
        VElement::from_flat(&self.bp, self.degree, self.orthonormal.column(t).as_slice()).expect("shape fixed")
    }
}

/// Null space of the matching constraints. Fails with
/// `InsufficientDegree` when the constraints are rank-deficient.
pub fn w_basis(bp: &BreakpointSystem, degree: usize) -> Result<WBasis> {
    let k = bp.k();
    let want = (k + 1) * (k + 2) / 2;
    let rows = constraint_matrix(bp, degree);
    let cols = bp.pieces() * (degree + 1);
    let numeric = DMatrix::from_fn(rows.len(), cols, |i, j| rational::to_f64(&rows[i][j]));
    let numeric_rank = crate::geometry::numeric_rank(&equilibrate(&numeric));
    let mut m = rows;
    let pivots = rref(&mut m);
    if pivots.len() < want {
        return Err(Error::InsufficientDegree(format!(
            "degree {degree} gives rank {} < {want} for k = {k}",
            pivots.len()
        )));
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<Vec<f64>> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0.0; cols];
            v[fc] = 1.0;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rational::to_f64(&m[r][fc]);
            }
            v
        })
        .collect();
    let mat = DMatrix::from_fn(cols, basis.len(), |i, j| basis[j][i]);
    let orthonormal = mat.qr().q();
    Ok(WBasis {
        bp: bp.clone(),
        degree,
        codimension: pivots.len(),
        numeric_rank,
        basis,
        orthonormal,
    })
}

/// `Φ(x, θ) = (x, j(f + h_{Qθ})(x))`.
pub fn phi(f: &VElement, w: &WBasis, x: &[f64], theta: &[f64], p: usize, k: usize) -> Result<Vec<f64>> {
    let g = f.add(&w.element(theta)?)?;
    let jet = jet_tuple(&g, x, p, k)?;
    Ok(x.iter().copied().chain(jet.values).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub jacobian: DMatrix<f64>,
    /// `max |J − J_fd| / max(1, max |J|)`.
    pub error: f64,
    /// SVD rank (threshold `1e-8 σ_max`) of the row- and column-equilibrated Jacobian.
    pub rank: usize,
    pub l: usize,
}

/// Jacobian of `Φ` in `(x, θ)` from the closed-form gradients:
/// `∇(x_i)`, `∇⁰_{i,q} = (y_i (f + h_ε)^{(q+1)}(x_i), h_δ^{(q)}(x_i))` and
/// `∇^{1,s}_{i,q} = h_δ^{(q)}(a_i^s)`, compared with central differences of
/// step `1e-5`.
pub fn phi_jacobian(f: &VElement, w: &WBasis, x: &[f64], theta: &[f64], p: usize, k: usize) -> Result<GradCheck> {
    let n = x.len();
    let g = f.add(&w.element(theta)?)?;
    check_jet_args(&g, x, p, k)?;
    let layout = jet_layout(n, p, k);
    let l = n + layout.len();
    let dim = w.dim();
    let dirs: Vec<VElement> = (0..dim).map(|t| w.direction(t)).collect();
    let mut jac = DMatrix::zeros(l, n + dim);
    for i in 0..n {
        jac[(i, i)] = 1.0;
    }
    for (r, c) in layout.iter().enumerate() {
        let row = n + r;
        if let JetCoord::Point { i, q } = *c {
            jac[(row, i)] = g.derivative(q + 1, x[i]);
        }
        for (t, h) in dirs.iter().enumerate() {
            jac[(row, n + t)] = jet_value(h, x, *c);
        }
    }
    let step = 1e-5;
    let mut fd = DMatrix::zeros(l, n + dim);
    for c in 0..(n + dim) {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        let (mut tp, mut tm) = (theta.to_vec(), theta.to_vec());
        if c < n {
            xp[c] += step;
            xm[c] -= step;
        } else {
            tp[c - n] += step;
            tm[c - n] -= step;
        }
        let (up, down) = (phi(f, w, &xp, &tp, p, k)?, phi(f, w, &xm, &tm, p, k)?);
        for r in 0..l {
            fd[(r, c)] = (up[r] - down[r]) / (2.0 * step);
        }
    }
    let scale = jac.amax().max(1.0);
    let error = (&jac - &fd).amax() / scale;
    let rank = crate::geometry::numeric_rank(&equilibrate(&jac));
    Ok(GradCheck { jacobian: jac, error, rank, l })
}

/// Rows, then columns, scaled to unit norm. Leaves the rank unchanged and
/// removes the `r^{-q}` growth of derivative rows.
fn equilibrate(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = m.clone();
    for mut row in m.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= n;
        }
    }
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        }
    }
    m
}

/// Minimum spacing of random jet points from each other and from the
/// marked points: closer points make the Hermite data confluent and the
/// Jacobian of `Φ` numerically singular.
pub const POINT_SEPARATION: f64 = 0.15;

/// `n` random points of `(−0.95, 0.95)` at least `sep` apart from each
/// other and from the marked points.
pub fn separated_points<R: Rng>(bp: &BreakpointSystem, n: usize, sep: f64, rng: &mut R) -> Result<Vec<f64>> {
    let marked: Vec<f64> = bp.points.iter().map(rational::to_f64).collect();
    let mut x: Vec<f64> = Vec::new();
    for _ in 0..100_000 {
        if x.len() == n {
            return Ok(x);
        }
        let v = rng.gen_range(-0.95..0.95);
        if x.iter().chain(&marked).all(|y| (y - v).abs() >= sep) {
            x.push(v);
        }
    }
    if x.len() == n {
        return Ok(x);
    }
    Err(Error::Precondition(format!("cannot place {n} points {sep} apart off {} marked points", marked.len())))
}

/// Tuples of distinct grid points of (−1, 1), off the marked points.
pub fn grid_tuples(bp: &BreakpointSystem, n: usize, grid: usize) -> Vec<Vec<f64>> {
    let pts: Vec<f64> = (0..grid)
        .map(|j| -1.0 + 2.0 * (j as f64 + 0.5) / grid as f64)
        .filter(|x| !bp.is_marked(*x))
        .collect();
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &out {
            for x in pts.iter().filter(|x| !t.contains(x)) {
                let mut u = t.clone();
                u.push(*x);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Grid tuples where every polynomial of `X` (in the coordinates
/// `(x, jet)`, as series on `l` standard variables) vanishes within
/// `1e-9`.
pub fn avoidance_check(f: &VElement, x_set: &[GenSeries], n: usize, p: usize, k: usize, grid: usize) -> Result<Vec<Vec<f64>>> {
    let l = submersion_dimension(n, p, k);
    if let Some(g) = x_set.iter().find(|g| g.signature().len() != l) {
        return Err(Error::Signature(format!("{} variables, expected {l}", g.signature().len())));
    }
    let mut out = Vec::new();
    for x in grid_tuples(&f.bp, n, grid) {
        let jet = jet_tuple(f, &x, p, k)?;
        let point: Vec<f64> = x.iter().copied().chain(jet.values).collect();
        if x_set.iter().all(|g| g.eval_unchecked(&point).abs() <= 1e-9) {
            out.push(x);
        }
    }
    Ok(out)
}

/// `φ(x) = x / √(1 + x²)`, a diffeomorphism ℝ → (−1, 1).
pub fn phi_rescale(x: f64) -> f64 {
    x / (1.0 + x * x).sqrt()
}

/// `f ∘ φ` on all of ℝ.
pub fn rescaled(f: &VElement) -> impl Fn(f64) -> f64 + '_ {
    move |x| f.eval(phi_rescale(x))
}

/// A germ at `a` equal to `f` on the kept side and to the order-`q`
/// Taylor polynomial of that side's jet on the other.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedGerm {
    pub f: VElement,
    pub a: Rational,
    pub kept: Side,
    /// Coefficients in powers of `(x − a)`.
    pub taylor: Vec<f64>,
}

pub fn glue(f: &VElement, a: &Rational, q: usize, kept: Side) -> GluedGerm {
    let jet = f.one_sided_jet(a, q, kept);
    let mut fact = 1.0;
    let taylor = jet
        .iter()
        .enumerate()
        .map(|(j, v)| {
            if j > 0 {
                fact *= j as f64;
            }
            v / fact
        })
        .collect();
    GluedGerm {
        f: f.clone(),
        a: a.clone(),
        kept,
        taylor,
    }
}

impl GluedGerm {
    fn on_kept_side(&self, x: f64) -> bool {
        let a = rational::to_f64(&self.a);
        match self.kept {
            Side::Right => x.partial_cmp(&a) != Some(Ordering::Less),
            Side::Left => x.partial_cmp(&a) != Some(Ordering::Greater),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.on_kept_side(x) {
            self.f.eval(x)
        } else {
            horner(&self.taylor, x - rational::to_f64(&self.a))
        }
    }

    /// Derivatives `0..=p` at `a` from `side`.
    pub fn one_sided_jet(&self, p: usize, side: Side) -> Vec<f64> {
        if side == self.kept {
            self.f.one_sided_jet(&self.a, p, side)
        } else {
            (0..=p).map(|r| derive(&self.taylor, r).first().copied().unwrap_or(0.0)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn dyadic_order() {
        let s: Vec<String> = dyadic_sequence(8).iter().map(|r| r.to_string()).collect();
        assert_eq!(s, ["0", "-1/2", "1/2", "-3/4", "-1/4", "1/4", "3/4", "-7/8"]);
    }

    #[test]
    fn one_sided_jets_at_kink() {
        let bp = BreakpointSystem::dyadic(0);
        let f = VElement::new(bp, vec![vec![], vec![0.0, 0.0, 1.0]]).unwrap();
        let z = Rational::zero();
        assert_eq!(f.one_sided_jet(&z, 1, Side::Left), vec![0.0, 0.0]);
        assert_eq!(f.one_sided_jet(&z, 1, Side::Right), vec![0.0, 0.0]);
        assert_eq!(f.one_sided_jet(&z, 2, Side::Left)[2], 0.0);
        assert_eq!(f.one_sided_jet(&z, 2, Side::Right)[2], 2.0);
        let g = VElement::polynomial(&BreakpointSystem::dyadic(2), vec![1.0, -2.0, 0.5, 3.0]);
        for a in g.breakpoints().points().to_vec() {
            assert_eq!(g.one_sided_jet(&a, 5, Side::Left), g.one_sided_jet(&a, 5, Side::Right));
        }
    }

    #[test]
    fn seminorm_examples() {
        let bp = BreakpointSystem::dyadic(1);
        let x = VElement::polynomial(&bp, vec![0.0, 1.0]);
        assert_eq!(seminorm(&x, &frac(-1, 2), &frac(1, 2), 1).unwrap(), 1.0);
        let c = VElement::polynomial(&bp, vec![-3.0]);
        for p in 0..4 {
            assert_eq!(seminorm(&c, &frac(-1, 3), &frac(1, 5), p).unwrap(), 3.0);
        }
        assert_eq!(seminorm(&c, &Rational::zero(), &Rational::zero(), 2).unwrap(), 0.0);
        let cubic = VElement::polynomial(&bp, vec![0.0, -1.0, 0.0, 1.0]);
        // x^3 − x peaks at 1/√3 inside [0, 0.9].
        let want = 2.0 / (3.0 * 3f64.sqrt());
        assert!((seminorm(&cubic, &Rational::zero(), &frac(9, 10), 0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn jet_lengths() {
        assert_eq!(jet_length(1, 2, 0), 8);
        assert_eq!(submersion_dimension(1, 2, 0), 9);
        assert_eq!(jet_length(0, 0, 0), 1);
        assert_eq!(jet_length(2, 3, 1), 21);
        assert_eq!(submersion_dimension(2, 3, 1), 23);
        assert_eq!(jet_layout(2, 3, 1).len(), 21);
    }

    #[test]
    fn codimensions() {
        assert_eq!(w_basis(&BreakpointSystem::dyadic(1), 5).unwrap().codimension, 3);
        assert_eq!(w_basis(&BreakpointSystem::dyadic(0), 2).unwrap().codimension, 1);
        assert!(matches!(w_basis(&BreakpointSystem::dyadic(3), 1), Err(Error::InsufficientDegree(_))));
    }

    #[test]
    fn glue_matches_to_order() {
        let bp = BreakpointSystem::dyadic(0);
        let f = VElement::polynomial(&bp, vec![1.0, 1.0, 1.0, 1.0, 1.0]);
        let a = frac(1, 4);
        let g = glue(&f, &a, 2, Side::Right);
        let l = g.one_sided_jet(4, Side::Left);
        let r = g.one_sided_jet(4, Side::Right);
        for q in 0..=2 {
            assert!((l[q] - r[q]).abs() < 1e-12);
        }
        assert!((l[3] - r[3]).abs() > 1.0);
        assert_eq!(phi_rescale(0.0), 0.0);
        assert!((phi_rescale(1.0) - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
