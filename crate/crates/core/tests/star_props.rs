use bdquant::star::{
    moyal, poisson, star_bracket, star_commutator_derivation, CoefFn, Monomial, NuSeries,
    PoissonStructure,
};
use bdquant::Scalar;
use proptest::prelude::*;

const NV: usize = 2;
const K: usize = 6;

fn pstr() -> PoissonStructure {
    PoissonStructure::darboux(NV, &Scalar::frac(1, 2), &Scalar::one()).unwrap()
}

fn monomial() -> impl Strategy<Value = (Monomial, Scalar)> {
    (0u32..=1, -2i32..=2, 0u32..=2, 0u32..=2, 0u32..=2, -3i64..=3).prop_map(
        |(p, k, a0, a1, q, c)| {
            (
                Monomial {
                    p,
                    k,
                    alpha: vec![a0, a1],
                    q,
                },
                Scalar::from_int(if c == 0 { 1 } else { c }),
            )
        },
    )
}

fn coef_fn() -> impl Strategy<Value = CoefFn> {
    prop::collection::vec(monomial(), 1..=3).prop_map(|ts| CoefFn::from_terms(NV, ts).unwrap())
}

/// Exact series with up to two ν-orders.
fn series() -> impl Strategy<Value = NuSeries> {
    (coef_fn(), prop::option::of(coef_fn())).prop_map(|(a, b)| {
        let mut c = vec![a];
        c.extend(b);
        NuSeries::from_coeffs(NV, c, K)
    })
}

fn same_through(a: &NuSeries, b: &NuSeries, k: usize) -> bool {
    (0..=k).all(|i| a.coeff(i) == b.coeff(i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn moyal_is_associative(f in series(), g in series(), h in series()) {
        let p = pstr();
        let l = moyal(&moyal(&f, &g, &p, K), &h, &p, K);
        let r = moyal(&f, &moyal(&g, &h, &p, K), &p, K);
        prop_assert!(same_through(&l, &r, K));
    }

    #[test]
    fn first_order_commutator_is_poisson(f in coef_fn(), g in coef_fn()) {
        let p = pstr();
        let fs = NuSeries::from_fn(f.clone(), 2);
        let gs = NuSeries::from_fn(g.clone(), 2);
        let c = moyal(&fs, &gs, &p, 2).sub(&moyal(&gs, &fs, &p, 2));
        prop_assert!(c.coeff(0).is_zero());
        prop_assert_eq!(c.coeff(1).scale(&Scalar::frac(1, 2)), poisson(&f, &g, &p));
        prop_assert_eq!(star_bracket(&fs, &gs, &p, 0).coeff(0), poisson(&f, &g, &p));
    }

    #[test]
    fn unit_is_neutral(f in series()) {
        let p = pstr();
        let one = NuSeries::constant(NV, Scalar::one(), K);
        prop_assert!(same_through(&moyal(&f, &one, &p, K), &f, K));
        prop_assert!(same_through(&moyal(&one, &f, &p, K), &f, K));
    }

    #[test]
    fn derivation_leibniz(f in series(), g in series(), h in series()) {
        let p = pstr();
        let d = star_commutator_derivation(&f, &p, K);
        let lhs = d.apply(&moyal(&g, &h, &p, K));
        let rhs = moyal(&d.apply(&g), &h, &p, K).add(&moyal(&g, &d.apply(&h), &p, K));
        prop_assert!(same_through(&lhs, &rhs, K));
    }

    #[test]
    fn derivation_composition(f1 in series(), f2 in series(), g in series()) {
        let p = pstr();
        let d1 = star_commutator_derivation(&f1, &p, K);
        let d2 = star_commutator_derivation(&f2, &p, K);
        let d12 = star_commutator_derivation(&d1.apply(&f2), &p, K);
        let lhs = d1.apply(&d2.apply(&g)).sub(&d2.apply(&d1.apply(&g)));
        prop_assert!(same_through(&lhs, &d12.apply(&g), K));
    }

    #[test]
    fn star_bracket_jacobi(f in series(), g in series(), h in series()) {
        let p = pstr();
        let b = |x: &NuSeries, y: &NuSeries| star_bracket(x, y, &p, K);
        let s = b(&f, &b(&g, &h)).add(&b(&g, &b(&h, &f))).add(&b(&h, &b(&f, &g)));
        prop_assert!(s.with_order(K).is_zero());
    }

    #[test]
    fn constants_give_zero_derivation(c in -5i64..=5, g in series()) {
        let p = pstr();
        let d = star_commutator_derivation(&NuSeries::constant(NV, Scalar::from_int(c), K), &p, K);
        prop_assert!(d.apply(&g).is_zero());
    }

    #[test]
    fn termination_bound(f in coef_fn(), g in coef_fn()) {
        let p = pstr();
        let dz = f.z_degree().max(g.z_degree()) as usize;
        let dv = f.v_degree().max(g.v_degree()) as usize;
        let k = 2 * dz + dv;
        let r = moyal(&NuSeries::from_fn(f, k), &NuSeries::from_fn(g, k), &p, k);
        prop_assert!(r.exact);
    }

    #[test]
    fn exp_weight_grading(
        f in coef_fn(), g in coef_fn(), kf in -2i32..=2, kg in -2i32..=2
    ) {
        // make each factor homogeneous of a single exp-weight
        let homog = |x: &CoefFn, k: i32| {
            CoefFn::from_terms(NV, x.terms().iter().map(|(m, c)| {
                let mut m = m.clone();
                m.k = k;
                (m, c.clone())
            })).unwrap()
        };
        let p = pstr();
        let r = moyal(&NuSeries::from_fn(homog(&f, kf), K), &NuSeries::from_fn(homog(&g, kg), K), &p, K);
        for c in r.coeffs() {
            prop_assert!(c.terms().keys().all(|m| m.k == kf + kg));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn poisson_jacobi(f in coef_fn(), g in coef_fn(), h in coef_fn()) {
        let p = pstr();
        let pb = |x: &CoefFn, y: &CoefFn| poisson(x, y, &p);
        let s = pb(&pb(&f, &g), &h).add(&pb(&pb(&g, &h), &f)).add(&pb(&pb(&h, &f), &g));
        prop_assert!(s.is_zero());
    }

    #[test]
    fn poisson_self_vanishes(f in coef_fn()) {
        prop_assert!(poisson(&f, &f, &pstr()).is_zero());
    }

    #[test]
    fn series_json_roundtrip(f in series()) {
        let j = serde_json::to_string(&f.to_json()).unwrap();
        let back = NuSeries::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }
}

#[test]
fn poisson_of_chart_coordinates() {
    let p = pstr();
    let a = CoefFn::coord(NV, 0);
    let z = CoefFn::z(NV);
    assert_eq!(
        poisson(&a, &z, &p),
        CoefFn::constant(NV, Scalar::frac(1, 2))
    );
    assert_eq!(
        poisson(&CoefFn::v(NV, 0), &CoefFn::v(NV, 1), &p),
        CoefFn::constant(NV, Scalar::one())
    );
}

#[test]
fn moyal_linear_square_is_exact() {
    let p = pstr();
    let v = NuSeries::from_fn(CoefFn::v(NV, 0), K);
    let r = moyal(&v, &v, &p, K);
    assert!(r.exact);
    assert_eq!(r, NuSeries::from_fn(CoefFn::v(NV, 0).pow(2), K));
}

#[test]
fn degenerate_tensor_rejected() {
    let zero = vec![vec![Scalar::zero(); 4]; 4];
    assert!(PoissonStructure::new(NV, zero).is_err());
    let mut asym = vec![vec![Scalar::zero(); 4]; 4];
    asym[0][3] = Scalar::one();
    asym[3][0] = Scalar::one();
    assert!(PoissonStructure::new(NV, asym).is_err());
}
