use proptest::prelude::*;
use qmono::rational::frac;
use qmono::vlab::{
    avoidance_check, default_piece_degree, jet_length, jet_tuple, phi_jacobian, seminorm, submersion_dimension,
    transcendence_tuple_length, w_basis, BreakpointSystem, VElement,
};
use qmono::{GenSeries, VariableSignature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Points at least 0.15 apart from each other and from the marked points:
/// the Hermite functionals at two nearby points are numerically dependent.
fn random_x<R: Rng>(n: usize, bp: &BreakpointSystem, rng: &mut R) -> Vec<f64> {
    let marked: Vec<f64> = bp.points().iter().map(qmono::rational::to_f64).collect();
    let mut x: Vec<f64> = Vec::new();
    while x.len() < n {
        let v = rng.gen_range(-0.95..0.95);
        if x.iter().chain(&marked).all(|y: &f64| (y - v).abs() >= 0.15) {
            x.push(v);
        }
    }
    x
}

#[test]
fn codimension_matches_count() {
    for k in 0..=5 {
        let bp = BreakpointSystem::dyadic(k);
        let w = w_basis(&bp, default_piece_degree(1, k)).unwrap();
        let want = (k + 1) * (k + 2) / 2;
        assert_eq!((w.codimension, w.numeric_rank), (want, want), "k = {k}");
        assert_eq!(w.dim() + want, w.ambient());
    }
}

#[test]
fn bookkeeping_identities() {
    for n in 0..=4 {
        for k in 0..=4 {
            for p in k..=8 {
                assert_eq!(n + jet_length(n, p, k), submersion_dimension(n, p, k));
                // (x, a_0..a_k, jet) adds k + 1 marked points.
                assert_eq!(n + (k + 1) + jet_length(n, p, k), transcendence_tuple_length(n, p, k));
            }
        }
    }
}

#[test]
fn gradients_match_and_have_full_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (n, p, k) in [(1, 2, 0), (1, 3, 1), (2, 3, 1)] {
        let bp = BreakpointSystem::dyadic(k);
        let w = w_basis(&bp, default_piece_degree(n, p)).unwrap();
        let f = VElement::zero(&bp);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let x = random_x(n, &bp, &mut rng);
            let theta: Vec<f64> = (0..w.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g = phi_jacobian(&f, &w, &x, &theta, p, k).unwrap();
            assert_eq!(g.l, submersion_dimension(n, p, k));
            assert_eq!(g.rank, g.l, "({n},{p},{k}) at {x:?}");
            worst = worst.max(g.error);
        }
        assert!(worst <= 1e-6, "({n},{p},{k}): {worst:e}");
    }
}

#[test]
fn membership_of_w() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bp = BreakpointSystem::dyadic(3);
    let w = w_basis(&bp, 9).unwrap();
    for _ in 0..20 {
        let theta: Vec<f64> = (0..w.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h = w.element(&theta).unwrap();
        assert!(h.violations(1e-9).is_empty());
        let eps: Vec<f64> = (0..w.ambient()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let off = VElement::from_flat(&bp, 9, &eps).unwrap();
        assert!(!off.violations(1e-9).is_empty());
    }
}

#[test]
fn avoidance_examples() {
    let bp = BreakpointSystem::dyadic(0);
    let (n, p, k) = (1, 2, 0);
    let l = submersion_dimension(n, p, k);
    let sig = VariableSignature::unit(0, l);
    let first_jet = GenSeries::variable(&sig, n).unwrap();
    let one = VElement::polynomial(&bp, vec![1.0]);
    assert!(avoidance_check(&one, std::slice::from_ref(&first_jet), n, p, k, 16).unwrap().is_empty());
    let zero = VElement::zero(&bp);
    let all = avoidance_check(&zero, std::slice::from_ref(&first_jet), n, p, k, 16).unwrap();
    assert_eq!(all.len(), 16);
    // f^(1)(x1) − 2 f(x1): generic perturbations avoid it on the grid.
    let x2 = GenSeries::variable(&sig, n + 1).unwrap().sub(&first_jet.scale(&frac(2, 1))).unwrap();
    let w = w_basis(&bp, default_piece_degree(n, p)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let theta: Vec<f64> = (0..w.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let h = w.element(&theta).unwrap();
    assert!(avoidance_check(&h, &[first_jet, x2], n, p, k, 64).unwrap().is_empty());
}

#[test]
fn jet_rejects_marked_and_repeated_points() {
    let bp = BreakpointSystem::dyadic(1);
    let f = VElement::zero(&bp);
    assert!(jet_tuple(&f, &[0.0], 1, 1).is_err());
    assert!(jet_tuple(&f, &[0.3, 0.3], 1, 1).is_err());
    assert!(jet_tuple(&f, &[0.3], 0, 1).is_err());
    assert_eq!(jet_tuple(&f, &[0.3], 2, 1).unwrap().values.len(), jet_length(1, 2, 1));
}

fn element() -> impl Strategy<Value = VElement> {
    prop::collection::vec(-2.0f64..2.0, 28).prop_map(|theta| {
        let w = w_basis(&BreakpointSystem::dyadic(2), 6).unwrap();
        w.element(&theta[..w.dim()]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn seminorm_axioms(f in element(), g in element(), c in -3.0f64..3.0, lo in -90i64..0, hi in 0i64..90, p in 0usize..4) {
        let (lo, hi) = (frac(lo, 100), frac(hi, 100));
        let nf = seminorm(&f, &lo, &hi, p).unwrap();
        let ng = seminorm(&g, &lo, &hi, p).unwrap();
        let nfg = seminorm(&f.add(&g).unwrap(), &lo, &hi, p).unwrap();
        let ncf = seminorm(&f.scale(c), &lo, &hi, p).unwrap();
        prop_assert!(nfg <= nf + ng + 1e-9 * (1.0 + nf + ng));
        prop_assert!((ncf - c.abs() * nf).abs() <= 1e-9 * (1.0 + ncf));
        let inner = seminorm(&f, &(lo.clone() / frac(2, 1)), &(hi.clone() / frac(2, 1)), p).unwrap();
        prop_assert!(inner <= nf + 1e-9 * (1.0 + nf));
        let more = seminorm(&f, &lo, &hi, p + 1).unwrap();
        prop_assert!(nf <= more + 1e-9 * (1.0 + more));
    }
}
