//! Fiber cutting: critical points of `Φ(x, r′) = ∏ x_i(r′_i − x_i)` along
//! the kernel of the projected differential.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rand::Rng;

use super::jacobian::{cleared_jacobian, ClearedJacobian, SeriesMap};
use crate::error::{Error, Result};
use crate::exponents::{ExponentVector, VariableSignature};
use crate::rational::Rational;
use crate::series::GenSeries;

/// The symbolic system for one map: `Φ` and `a_i = ∇_xΦ · b_i` on the
/// doubled variables `(x_1, …, x_d, r′_1, …, r′_d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberCutSystem {
    pub map: SeriesMap,
    pub jacobian: ClearedJacobian,
    pub doubled: VariableSignature,
    pub phi: GenSeries,
    pub equations: Vec<GenSeries>,
    /// Row `ι(l+1)` of the map, whose gradient must not be orthogonal to
    /// the kernel.
    pub witness: usize,
}

impl FiberCutSystem {
    pub fn d(&self) -> usize {
        self.map.dim()
    }

    pub fn l(&self) -> usize {
        self.jacobian.l
    }

    pub fn m_split(&self) -> usize {
        self.jacobian.m_split
    }

    fn doubled_point(&self, x: &[f64], r: &[f64]) -> Vec<f64> {
        x.iter().chain(r).copied().collect()
    }

    /// Kernel columns at `x`, one per row.
    fn kernel_at(&self, x: &[f64]) -> Vec<DVector<f64>> {
        self.jacobian
            .kernel
            .iter()
            .map(|b| DVector::from_iterator(b.len(), b.iter().map(|e| e.eval_unchecked(x))))
            .collect()
    }
}

/// Builds `Φ` and the `d − l` equations from the cleared kernel of `η`.
pub fn fiber_cut_equations(map: &SeriesMap, m_split: usize, l: usize, iota: &[usize]) -> Result<FiberCutSystem> {
    let d = map.dim();
    if l >= d {
        return Err(Error::Precondition(format!("rank l = {l} with d = {d}: nothing to cut")));
    }
    let jac = cleared_jacobian(map, m_split, iota, l)?;
    let sig = map.signature();
    let mut radius = sig.radius().to_vec();
    radius.extend_from_slice(sig.radius());
    let doubled = VariableSignature::new(2 * d, 0, radius)?;
    let var = |k: usize| GenSeries::variable(&doubled, k);
    // x_k (r′_k − x_k)
    let factors = (0..d)
        .map(|k| var(k)?.mul(&var(d + k)?.sub(&var(k)?)?))
        .collect::<Result<Vec<_>>>()?;
    let phi = GenSeries::product(&doubled, factors.iter())?;
    let two = Rational::from_integer(2.into());
    let grad = (0..d)
        .map(|k| {
            let lead = var(d + k)?.sub(&var(k)?.scale(&two))?;
            let rest = GenSeries::product(&doubled, factors.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, f)| f))?;
            lead.mul(&rest)
        })
        .collect::<Result<Vec<_>>>()?;
    let slots: Vec<usize> = (0..d).collect();
    let equations = jac
        .kernel
        .iter()
        .map(|b| {
            let mut acc = GenSeries::zero(&doubled);
            for (g, bk) in grad.iter().zip(b) {
                acc = acc.add(&g.mul(&bk.embed(&doubled, &slots)?)?)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FiberCutSystem {
        map: map.clone(),
        witness: iota[l],
        jacobian: jac,
        doubled,
        phi,
        equations,
    })
}

/// For `d = 1` the single equation is affine in `x` with a monomial
/// leading coefficient; returns the root as a series in `r′`.
pub fn exact_critical_points_1d(system: &FiberCutSystem) -> Result<GenSeries> {
    if system.d() != 1 || system.equations.len() != 1 {
        return Err(Error::Precondition("exact solving needs d = 1".into()));
    }
    let rsig = VariableSignature::new(1, 0, vec![system.doubled.radius()[1].clone()])?;
    let mut c0 = GenSeries::zero(&rsig);
    let mut c1 = GenSeries::zero(&rsig);
    let one = Rational::one();
    for (e, c) in system.equations[0].terms() {
        let mono = GenSeries::monomial(&rsig, ExponentVector::new(vec![e.get(1).clone()])?, c.clone())?;
        if e.get(0).is_zero() {
            c0 = c0.add(&mono)?;
        } else if *e.get(0) == one {
            c1 = c1.add(&mono)?;
        } else {
            return Err(Error::Precondition(format!("equation {} is not affine in x", system.equations[0])));
        }
    }
    let mut lead = c1.terms();
    let (e, c) = match (lead.next(), lead.next()) {
        (Some(t), None) => t,
        _ => return Err(Error::Precondition(format!("leading coefficient {c1} is not a monomial"))),
    };
    let inv = -(Rational::one() / c);
    c0.div_monomial(e)
        .map(|q| q.scale(&inv))
        .ok_or_else(|| Error::Precondition(format!("{c0} is not divisible by r′^{e}")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberCutSample {
    /// Projected image value `Π_m η(x0)`.
    pub value: Vec<f64>,
    pub start: Vec<f64>,
    pub critical: Option<Vec<f64>>,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberCutReport {
    pub samples: Vec<FiberCutSample>,
    pub converged: usize,
    /// Samples whose critical point left the box `(0, r′)`.
    pub escaped: usize,
    pub max_discrepancy: f64,
    pub max_residual: f64,
    /// Critical points where `∇f · b_i ≠ 0` for the witness `f`.
    pub witness_certified: usize,
}

impl FiberCutReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.converged == self.samples.len() && self.escaped == 0 && self.max_discrepancy <= tol
    }
}

fn grad_log_phi(x: &[f64], r: &[f64]) -> DVector<f64> {
    DVector::from_iterator(x.len(), x.iter().zip(r).map(|(x, r)| 1.0 / x - 1.0 / (r - x)))
}

fn log_phi(x: &[f64], r: &[f64]) -> f64 {
    x.iter().zip(r).map(|(x, r)| x.ln() + (r - x).ln()).sum()
}

fn in_box(x: &[f64], b: &[f64]) -> bool {
    x.iter().zip(b).all(|(x, b)| *x > 0.0 && x < b)
}

/// Rows `rows` of `η` minus `target` and their Jacobian.
fn fiber_residual(map: &SeriesMap, rows: &[usize], target: &[f64], x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let v = map.eval(x);
    let j = map.jacobian(x);
    let res = DVector::from_iterator(rows.len(), rows.iter().zip(target).map(|(&r, t)| v[r] - t));
    let jac = DMatrix::from_fn(rows.len(), x.len(), |i, k| j[(rows[i], k)]);
    (res, jac)
}

/// Minimum-norm Gauss-Newton back onto `{η_rows = target}`.
fn project(map: &SeriesMap, rows: &[usize], target: &[f64], x: &mut Vec<f64>, b: &[f64]) -> bool {
    if rows.is_empty() {
        return true;
    }
    for _ in 0..50 {
        let (res, jac) = fiber_residual(map, rows, target, x);
        if res.amax() <= 1e-15 * (1.0 + DVector::from_column_slice(target).amax()) {
            return true;
        }
        let jjt = &jac * jac.transpose();
        let Some(sol) = jjt.lu().solve(&res) else { return false };
        let step = jac.transpose() * sol;
        let mut t = 1.0;
        loop {
            let y: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            if in_box(&y, b) {
                *x = y;
                break;
            }
            t /= 2.0;
            if t < 1e-12 {
                return false;
            }
        }
    }
    false
}

/// For each sample: pick `x0` in `Q ∩ I_{r′}`, follow `log Φ` uphill
/// inside the fiber of `c = Π_m η(x0)`, polish with Newton on
/// `η_{ι(1..l)} = c, a_1 = … = a_{d−l} = 0`, then compare `Π_m η(x*)`
/// with `c`.
pub fn verify_fiber_cut<R: Rng>(system: &FiberCutSystem, r_prime: &[f64], samples: usize, rng: &mut R) -> Result<FiberCutReport> {
    let d = system.d();
    if r_prime.len() != d || r_prime.iter().any(|r| *r <= 0.0) {
        return Err(Error::Precondition(format!("r′ = {r_prime:?} for d = {d}")));
    }
    let m = system.m_split();
    let l = system.l();
    let rows: Vec<usize> = system.jacobian.iota[..l].to_vec();
    let bx: Vec<f64> = r_prime
        .iter()
        .zip(system.map.signature().radius())
        .map(|(r, rho)| r.min(crate::rational::to_f64(rho)))
        .collect();
    let mut report = FiberCutReport {
        samples: Vec::new(),
        converged: 0,
        escaped: 0,
        max_discrepancy: 0.0,
        max_residual: 0.0,
        witness_certified: 0,
    };
    let eq_derivs: Vec<Vec<GenSeries>> = system
        .equations
        .iter()
        .map(|a| (0..d).map(|k| a.log_derivative(k)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let witness_grad: Vec<GenSeries> = (0..d)
        .map(|k| system.map.components()[system.witness].log_derivative(k))
        .collect::<Result<_>>()?;
    for _ in 0..samples {
        let x0: Vec<f64> = bx
            .iter()
            .map(|b| loop {
                let u: f64 = rng.gen();
                if u > 0.0 {
                    break u * b;
                }
            })
            .collect();
        let full = system.map.eval(&x0);
        let c: Vec<f64> = full[..m].to_vec();
        let target: Vec<f64> = rows.iter().map(|&r| full[r]).collect();
        let mut x = x0.clone();

        // Ascent along the kernel, staying on the fiber.
        let mut step = bx.iter().cloned().fold(f64::INFINITY, f64::min) / 8.0;
        for _ in 0..2000 {
            let g = grad_log_phi(&x, r_prime);
            let mut v = DVector::zeros(d);
            for b in system.kernel_at(&x) {
                let n = b.norm();
                if n > 0.0 {
                    let u = &b / n;
                    v += u.dot(&g) * &u;
                }
            }
            let vn = v.norm();
            if vn * step < 1e-12 {
                break;
            }
            let dir = v / vn;
            let here = log_phi(&x, r_prime);
            let mut moved = false;
            while step > 1e-14 {
                let mut y: Vec<f64> = x.iter().zip(dir.iter()).map(|(a, s)| a + step * s).collect();
                if in_box(&y, &bx) && project(&system.map, &rows, &target, &mut y, &bx) && log_phi(&y, r_prime) > here {
                    x = y;
                    moved = true;
                    step *= 1.5;
                    break;
                }
                step /= 2.0;
            }
            if !moved {
                break;
            }
        }

        // Newton on the square system.
        let mut ok = false;
        for _ in 0..60 {
            let p = system.doubled_point(&x, r_prime);
            let (fres, fjac) = fiber_residual(&system.map, &rows, &target, &x);
            let mut res = DVector::zeros(d);
            let mut jac = DMatrix::zeros(d, d);
            for i in 0..l {
                res[i] = fres[i];
                for k in 0..d {
                    jac[(i, k)] = fjac[(i, k)];
                }
            }
            for (e, (a, da)) in system.equations.iter().zip(&eq_derivs).enumerate() {
                res[l + e] = a.eval_unchecked(&p);
                for k in 0..d {
                    jac[(l + e, k)] = da[k].eval_unchecked(&p) / x[k];
                }
            }
            let Some(delta) = jac.lu().solve(&res) else { break };
            let mut t = 1.0;
            let mut y = x.clone();
            while t > 1e-6 {
                y = x.iter().zip(delta.iter()).map(|(a, s)| a - t * s).collect();
                if in_box(&y, &bx) {
                    break;
                }
                t /= 2.0;
            }
            let moved = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            x = y;
            if moved <= 1e-15 * bx.iter().cloned().fold(0.0, f64::max) {
                ok = true;
                break;
            }
        }
        let img = system.map.eval(&x);
        let disc = img[..m].iter().zip(&c).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let p = system.doubled_point(&x, r_prime);
        let scale: f64 = system.equations.iter().map(|a| a.max_abs_coeff()).map(|c| crate::rational::to_f64(&c)).fold(1e-300, f64::max);
        let residual = system.equations.iter().map(|a| a.eval_unchecked(&p).abs() / scale).fold(0.0, f64::max);
        let inside = in_box(&x, &bx);
        if ok {
            report.converged += 1;
        }
        if !inside {
            report.escaped += 1;
        }
        let grad_f = DVector::from_iterator(d, witness_grad.iter().enumerate().map(|(k, g)| g.eval_unchecked(&x) / x[k]));
        let certified = system.kernel_at(&x).iter().all(|b| {
            let dot = grad_f.dot(b).abs();
            dot > 1e-12 * grad_f.norm() * b.norm() && dot > 0.0
        });
        if certified {
            report.witness_certified += 1;
        }
        report.max_discrepancy = report.max_discrepancy.max(disc);
        report.max_residual = report.max_residual.max(residual);
        report.samples.push(FiberCutSample {
            value: c,
            start: x0,
            critical: ok.then(|| x.clone()),
            discrepancy: disc,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_map_cuts_at_half_radius() {
        let sig = VariableSignature::uniform(1, 0, int(1));
        let map = SeriesMap::new(sig.clone(), vec![GenSeries::constant(&sig, frac(1, 3))]).unwrap();
        let sys = fiber_cut_equations(&map, 1, 0, &[0]).unwrap();
        assert_eq!(sys.equations.len(), 1);
        let root = exact_critical_points_1d(&sys).unwrap();
        let rsig = VariableSignature::new(1, 0, vec![int(1)]).unwrap();
        assert_eq!(root, GenSeries::variable(&rsig, 0).unwrap().scale(&frac(1, 2)));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rep = verify_fiber_cut(&sys, &[0.8], 10, &mut rng).unwrap();
        assert!(rep.passed(1e-12), "{rep:?}");
        for s in &rep.samples {
            assert!((s.critical.as_ref().unwrap()[0] - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn full_rank_is_rejected() {
        let sig = VariableSignature::unit(1, 0);
        let map = SeriesMap::new(sig.clone(), vec![GenSeries::variable(&sig, 0).unwrap()]).unwrap();
        assert!(matches!(fiber_cut_equations(&map, 1, 1, &[0]), Err(Error::Precondition(_))));
    }
}
