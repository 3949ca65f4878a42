use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tracepoly::cnum::CRat;
use tracepoly::exactpoly::RatPoly2;
use tracepoly::numeric::*;
use tracepoly::quatalg::qmul;
use tracepoly::wordpoly::*;
use tracepoly::words::*;

fn polar(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..TAU))
}

fn exact(p: &RatPoly2, b: C64, g: C64) -> C64 {
    p.eval_exact(&CRat::from_c64(b).unwrap(), &CRat::from_c64(g).unwrap()).to_c64()
}

struct Case {
    w: GoodWord,
    p: GroupParams,
}

fn case() -> impl Strategy<Value = Case> {
    (any::<u64>(), 1usize..=4).prop_map(|(seed, m)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = random_word(&mut rng, m, 3, None);
        while w.is_identity() {
            w = random_word(&mut rng, m, 3, None);
        }
        let p = GroupParams::new(polar(&mut rng, 0.5, 1.5), polar(&mut rng, 0.0, 1.0), polar(&mut rng, 0.1, 1.0));
        Case { w, p }
    })
}

impl std::fmt::Debug for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at {:?}", self.w, self.p)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn commutator_trace_matches_p(c in case()) {
        let wp = word_polys(&c.w).unwrap();
        let cp = canonical_pair(&c.p, Subchoice::Auto).unwrap();
        let m = eval_word_matrix(&cp.a, &cp.b, &c.w);
        let err = (commutator_defect(&cp.a, &m) - exact(&wp.p, c.p.beta, c.p.gamma)).norm();
        prop_assert!(err < 1e-9, "error {err:e}");
    }

    #[test]
    fn trace_matches_r_for_balanced_words(c in case()) {
        prop_assume!(c.w.classify().balanced);
        let wp = word_polys(&c.w).unwrap();
        let cp = canonical_pair(&c.p, Subchoice::Auto).unwrap();
        let m = eval_word_matrix(&cp.a, &cp.b, &c.w);
        let tr = if c.w.classify().even { m.trace() } else { (m * cp.a).trace() };
        let err = (tr - 2.0 * exact(&wp.r, c.p.beta, c.p.gamma)).norm();
        prop_assert!(err < 1e-9, "error {err:e}");
    }

    #[test]
    fn beta2_does_not_matter(c in case(), b2 in (0.0..1.0f64, 0.0..TAU)) {
        let other = GroupParams::new(c.p.beta, C64::from_polar(b2.0, b2.1), c.p.gamma);
        let defect = |p: &GroupParams| {
            let cp = canonical_pair(p, Subchoice::Auto).unwrap();
            commutator_defect(&cp.a, &eval_word_matrix(&cp.a, &cp.b, &c.w))
        };
        prop_assert!((defect(&c.p) - defect(&other)).norm() < 1e-10);
    }

    #[test]
    fn matrix_form_of_word_quaternion(c in case()) {
        let core = c.w.core();
        let q = word_to_quat(&core).unwrap();
        let cp = canonical_pair(&c.p, Subchoice::Auto).unwrap();
        let m = eval_word_matrix(&cp.a, &cp.b, &core);
        let phi = phi_eval(&q, &c.p, None).unwrap();
        prop_assert!(m.dist(&phi) < 1e-9 * (1.0 + m.max_abs()), "{m:?} vs {phi:?}");
    }

    #[test]
    fn evaluation_is_multiplicative(x in case(), y in case()) {
        let (qx, qy) = (word_to_quat(&x.w.core()).unwrap(), word_to_quat(&y.w.core()).unwrap());
        let lhs = phi_eval(&qmul(&qx, &qy).unwrap(), &x.p, None).unwrap();
        let rhs = phi_eval(&qx, &x.p, None).unwrap() * phi_eval(&qy, &x.p, None).unwrap();
        prop_assert!(lhs.dist(&rhs) < 1e-9 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn parameters_roundtrip(c in case()) {
        let cp = canonical_pair(&c.p, Subchoice::Auto).unwrap();
        prop_assert!((beta_of(&cp.a) - c.p.beta).norm() < 1e-10);
        prop_assert!((beta_of(&cp.b) - c.p.beta2).norm() < 1e-10);
        prop_assert!((gamma_of(&cp.a, &cp.b) - c.p.gamma).norm() < 1e-10);
    }
}

#[test]
fn limits_converge_slowly_toward_the_parabolic_form() {
    let q = tracepoly::quatalg::generator(3);
    let betas: Vec<C64> = [1e-2, 1e-4, 1e-6].iter().map(|&b| C64::new(b, 0.0)).collect();
    let devs = verify_limits(&q, C64::new(0.3, 0.1), C64::new(0.7, 0.2), &betas).unwrap();
    // square-root rate: two decades of beta buy one decade of accuracy
    for d in devs.windows(2) {
        let r = d[1] / d[0];
        assert!((0.05..0.2).contains(&r), "{devs:?}");
    }
}

#[test]
fn parabolic_forms_match_word_matrices() {
    let w = parse_word("b a^3 b^-1 a^-1 b a^-2 b^-1 a^2", false).unwrap();
    let q = word_to_quat(&w).unwrap();
    for g in [C64::new(0.7, 0.2), C64::new(0.0, 0.0)] {
        let p = GroupParams::new(C64::new(0.0, 0.0), C64::new(0.3, 0.1), g);
        let cp = canonical_pair(&p, Subchoice::Auto).unwrap();
        let m = eval_word_matrix(&cp.a, &cp.b, &w);
        assert!(m.dist(&phi_eval(&q, &p, None).unwrap()) < 1e-9);
    }
}
