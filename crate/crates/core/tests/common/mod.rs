#![allow(dead_code)]

use qmono::{GenSeries, VariableSignature};

pub fn series(m: usize, n: usize, terms: &[((i64, i64), &[(i64, i64)])]) -> GenSeries {
    GenSeries::from_frac_terms(&VariableSignature::unit(m, n), terms).unwrap()
}

/// The twelve-series monomialization corpus, with display names.
pub fn corpus() -> Vec<(&'static str, GenSeries)> {
    let x12 = |a: (i64, i64), b: (i64, i64)| [a, b];
    let d = series(2, 0, &[((1, 1), &x12((1, 1), (0, 1))), ((-1, 1), &x12((0, 1), (1, 1)))]);
    vec![
        ("X1-X2", d.clone()),
        ("X1^(3/2)+X2", series(2, 0, &[((1, 1), &[(3, 2), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])])),
        ("(X1-X2)^2", d.pow(2)),
        ("X1^2X2+X1X2^3", series(2, 0, &[((1, 1), &[(2, 1), (1, 1)]), ((1, 1), &[(1, 1), (3, 1)])])),
        ("X1^(1/2)-X2^(1/3)", series(2, 0, &[((1, 1), &[(1, 2), (0, 1)]), ((-1, 1), &[(0, 1), (1, 3)])])),
        ("Y1^2+Y2^2", series(0, 2, &[((1, 1), &[(2, 1), (0, 1)]), ((1, 1), &[(0, 1), (2, 1)])])),
        ("X1+Y1^2", series(1, 1, &[((1, 1), &[(1, 1), (0, 1)]), ((1, 1), &[(0, 1), (2, 1)])])),
        ("X1Y1-X2", series(2, 1, &[((1, 1), &[(1, 1), (0, 1), (1, 1)]), ((-1, 1), &[(0, 1), (1, 1), (0, 1)])])),
        ("X1^2-X2^3", series(2, 0, &[((1, 1), &[(2, 1), (0, 1)]), ((-1, 1), &[(0, 1), (3, 1)])])),
        (
            "X1-X2+X3",
            series(3, 0, &[((1, 1), &[(1, 1), (0, 1), (0, 1)]), ((-1, 1), &[(0, 1), (1, 1), (0, 1)]), ((1, 1), &[(0, 1), (0, 1), (1, 1)])]),
        ),
        ("1+X1", series(1, 0, &[((1, 1), &[(0, 1)]), ((1, 1), &[(1, 1)])])),
        ("X1X2-X3^2", series(3, 0, &[((1, 1), &[(1, 1), (1, 1), (0, 1)]), ((-1, 1), &[(0, 1), (0, 1), (2, 1)])])),
    ]
}

/// Parametrization targets: the square with three compatibility functions
/// and three basic sets whose zero sets are unions of coordinate strata.
pub fn param_scenarios() -> Vec<(&'static str, qmono::geometry::ParamTarget, Vec<GenSeries>)> {
    use qmono::geometry::{BasicSetDescriptor, ParamTarget};
    let c = corpus();
    let square = VariableSignature::unit(2, 0);
    let x1_minus_x2 = c[0].1.clone();
    let b1 = BasicSetDescriptor::new(
        series(1, 1, &[((1, 1), &[(1, 1), (1, 1)])]),
        vec![series(1, 1, &[((1, 1), &[(0, 1), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])])],
    )
    .unwrap();
    let b2 = BasicSetDescriptor::new(GenSeries::zero(&square), vec![x1_minus_x2.clone()]).unwrap();
    let b3 = BasicSetDescriptor::new(
        series(2, 1, &[((1, 1), &[(0, 1), (0, 1), (1, 1)])]),
        vec![series(2, 1, &[((1, 1), &[(1, 1), (0, 1), (0, 1)]), ((-1, 1), &[(0, 1), (1, 1), (0, 1)])])],
    )
    .unwrap();
    vec![
        ("square", ParamTarget::Polydisk(square), vec![x1_minus_x2, c[1].1.clone(), c[3].1.clone()]),
        ("x1*y1=0,1+y1>0", ParamTarget::BasicSet(b1), vec![]),
        ("x1-x2>0", ParamTarget::BasicSet(b2), vec![c[1].1.clone()]),
        ("y1=0,x1-x2>0", ParamTarget::BasicSet(b3), vec![]),
    ]
}

pub mod random {
    use qmono::rational::{frac, to_f64};
    use qmono::transforms::{ElementaryTransform, TransformChain, TransformKind};
    use qmono::{ExponentVector, GenSeries, Rational, VariableSignature};
    use rand::seq::SliceRandom;
    use rand::Rng;

    pub fn signature<R: Rng>(rng: &mut R) -> VariableSignature {
        VariableSignature::unit(rng.gen_range(1..=3), rng.gen_range(0..=2))
    }

    fn coefficient<R: Rng>(rng: &mut R) -> Rational {
        let p = *[-5i64, -3, -2, -1, 1, 2, 3, 4, 7].choose(rng).unwrap();
        frac(p, rng.gen_range(1..=4))
    }

    pub fn exponent<R: Rng>(sig: &VariableSignature, rng: &mut R) -> ExponentVector {
        let e: Vec<(i64, i64)> = (0..sig.len())
            .map(|k| {
                if sig.is_generalized(k) {
                    let d = rng.gen_range(1..=3);
                    (rng.gen_range(0..=2 * d), d)
                } else {
                    (rng.gen_range(0..=2), 1)
                }
            })
            .collect();
        ExponentVector::from_fracs(&e)
    }

    /// Up to `max_terms` terms; may be zero.
    pub fn series<R: Rng>(sig: &VariableSignature, max_terms: usize, rng: &mut R) -> GenSeries {
        let k = rng.gen_range(0..=max_terms);
        let terms: Vec<(Rational, ExponentVector)> = (0..k).map(|_| (coefficient(rng), exponent(sig, rng))).collect();
        GenSeries::from_terms(sig, terms).unwrap()
    }

    pub fn nonzero_series<R: Rng>(sig: &VariableSignature, max_terms: usize, rng: &mut R) -> GenSeries {
        loop {
            let f = series(sig, max_terms.max(1), rng);
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// A catalog transform other than `FaceZero` acting into `sig`.
    pub fn kind<R: Rng>(sig: &VariableSignature, rng: &mut R) -> TransformKind {
        let lam = |rng: &mut R| [frac(1, 2), frac(1, 1), frac(2, 1), frac(3, 2), frac(2, 3)].choose(rng).unwrap().clone();
        let (m, n) = (sig.m(), sig.n());
        loop {
            let pick = rng.gen_range(0..7);
            let kind = match pick {
                0 => TransformKind::Ramification { i: rng.gen_range(0..m), lambda: lam(rng) },
                1 | 2 if m >= 2 => {
                    let i = rng.gen_range(0..m);
                    let j = (i + rng.gen_range(1..m)) % m;
                    let lambda = lam(rng);
                    if pick == 1 {
                        TransformKind::BlowupChartA { i, j, lambda }
                    } else {
                        TransformKind::BlowupChartB { i, j, lambda }
                    }
                }
                3 if n > 0 => {
                    let j = m + rng.gen_range(0..n);
                    let c = [frac(1, 2), frac(-1, 2), frac(1, 3), frac(-1, 4)].choose(rng).unwrap() * &sig.radius()[j];
                    TransformKind::Translation { j, c }
                }
                4 if n > 0 => TransformKind::ReflectionPlus { i: m + rng.gen_range(0..n) },
                5 if n > 0 => TransformKind::ReflectionMinus { i: m + rng.gen_range(0..n) },
                6 if n > 0 => TransformKind::SignFlip { j: m + rng.gen_range(0..n) },
                _ => continue,
            };
            return kind;
        }
    }

    pub fn transform<R: Rng>(sig: &VariableSignature, rng: &mut R) -> ElementaryTransform {
        ElementaryTransform::new(kind(sig, rng), sig).unwrap()
    }

    pub fn chain<R: Rng>(root: &VariableSignature, len: usize, rng: &mut R) -> TransformChain {
        let mut c = TransformChain::identity(root);
        for _ in 0..len {
            let t = transform(c.source(), rng);
            c.push(t).unwrap();
        }
        c
    }

    /// Interior point of the polydisk: generalized coordinates in
    /// `(0.05 r, 0.95 r)`, standard ones in `(−0.95 r, 0.95 r)`.
    pub fn interior_point<R: Rng>(sig: &VariableSignature, rng: &mut R) -> Vec<f64> {
        (0..sig.len())
            .map(|k| {
                let r = to_f64(&sig.radius()[k]);
                if sig.is_generalized(k) {
                    rng.gen_range(0.05 * r..0.95 * r)
                } else {
                    rng.gen_range(-0.95 * r..0.95 * r)
                }
            })
            .collect()
    }
}
