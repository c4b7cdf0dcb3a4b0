//! Acceptance criteria, one test each. Every test prints a single verdict
//! line straight to stderr so it shows up even with captured output.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use bdquant::ball::{build_qmm_standard, verify_qmm, verify_qmm_on, Mutation, QmmJson, QmmTable};
use bdquant::cohomology::{
    check_block_conditions, coboundary_primitive_psd, coboundary_primitive_roots, cocycle_basis,
    delta1, h2_dimension, invariant_cocycle_space, is_cocycle, CochainJson, TwoCochain,
};
use bdquant::lie::{AlgebraJson, LieAlgebra};
use bdquant::linalg::{self, Matrix, Vector};
use bdquant::psd::{build_psd, PsdSpec};
use bdquant::report::{to_sorted_json, RunReport};
use bdquant::retract::{
    check_w_closure, commutator_defect, fourier_residual, radial_reduce, residual, residuals_on_k,
    CandidateJson, KernelCandidate, XiFn, XiFnJson,
};
use bdquant::star::{CoefFn, NuSeries, NuSeriesJson};
use bdquant::su1n::{build_su1n, Su1nExport};
use bdquant::{GScalar, Scalar};
use common::{all_specs, cocycles_off_cartan, cross_spec, nu0_oracle, oracle_h2, random_cochain};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRng, TestRunner};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn criterion(n: u32, title: &str, body: impl FnOnce()) {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(body));
    let verdict = if res.is_ok() { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "criterion {n:>2} {verdict} {title} ({:.1} s)",
        start.elapsed().as_secs_f64()
    );
    if let Err(e) = res {
        resume_unwind(e);
    }
}

fn within(limit: Duration, what: &str, f: impl FnOnce()) {
    let t = Instant::now();
    f();
    let el = t.elapsed();
    assert!(el < limit, "{what} took {el:?}, limit {limit:?}");
}

#[test]
fn c01_h2_of_psd_algebras() {
    criterion(1, "dim H2 of s(r;n) is r(r-1)/2", || {
        for spec in all_specs() {
            within(Duration::from_secs(10), &format!("{:?}", spec.n), || {
                let p = build_psd(&spec).unwrap();
                let h2 = h2_dimension(&p.algebra);
                assert_eq!(h2, spec.r * (spec.r - 1) / 2, "{:?}", spec.n);
            });
            let p = build_psd(&spec).unwrap();
            assert_eq!(
                oracle_h2(&p.algebra),
                spec.r * (spec.r - 1) / 2,
                "oracle {:?}",
                spec.n
            );
        }
    });
}

#[test]
fn c02_whitehead() {
    criterion(2, "dim H2 of su(1,N) is 0 for N = 1, 2", || {
        within(Duration::from_secs(60), "su(1,N)", || {
            for n in 1..=2 {
                let m = build_su1n(n).unwrap();
                assert!(m.dim() <= 8);
                assert_eq!(h2_dimension(&m.algebra), 0, "N={n}");
            }
        });
    });
}

#[test]
fn c03_block_conditions_vs_brute_force() {
    criterion(3, "block cocycle conditions agree with brute force", || {
        let mut specs: Vec<PsdSpec> = [vec![2], vec![3], vec![1, 1], vec![2, 1], vec![1, 2, 1]]
            .into_iter()
            .map(PsdSpec::new)
            .collect();
        specs.push(cross_spec());
        let mut rng = StdRng::seed_from_u64(2024);
        for spec in specs {
            let p = build_psd(&spec).unwrap();
            let basis = cocycle_basis(&p.algebra);
            let mut disagree = 0;
            let mut closed = 0;
            for _ in 0..100 {
                let c = random_cochain(&mut rng, &p, &basis);
                let brute = is_cocycle(&p.algebra, &c);
                closed += brute as usize;
                if check_block_conditions(&p, &c).unwrap().is_cocycle != brute {
                    disagree += 1;
                }
            }
            assert_eq!(disagree, 0, "{spec:?}");
            assert!(closed > 0 && closed < 100, "{spec:?}: sample not mixed");
        }
    });
}

#[test]
fn c04_primitives() {
    criterion(4, "coboundary primitives reproduce cocycle bases", || {
        for spec in all_specs() {
            let p = build_psd(&spec).unwrap();
            for c in cocycles_off_cartan(&p) {
                let a = coboundary_primitive_psd(&p, &c).unwrap();
                assert_eq!(delta1(&p.algebra, &a), c, "{:?}", spec.n);
            }
        }
        for n in 1..=3 {
            let m = build_su1n(n).unwrap();
            let s = m.s_algebra();
            let sd = s.dim();
            let a: Vec<Vector> = m.a_space.basis().iter().map(|x| x[..sd].to_vec()).collect();
            for c in cocycle_basis(&s) {
                assert!(a.iter().all(|x| a.iter().all(|y| c.eval(x, y).is_zero())));
                let prim = coboundary_primitive_roots(&m, &c).unwrap();
                assert_eq!(delta1(&s, &prim), c, "N={n}");
            }
        }
    });
}

fn minors_positive(g: &Matrix) -> bool {
    (1..=g.len()).all(|k| {
        let sub: Matrix = g[..k].iter().map(|r| r[..k].to_vec()).collect();
        linalg::det(&sub).is_positive()
    })
}

#[test]
fn c05_su1n_structure() {
    criterion(
        5,
        "su(1,N) root spaces, [X,sX] relation, m orthocomplement, beta_sigma",
        || {
            for n in 1..=3 {
                let m = build_su1n(n).unwrap();
                let k = n - 1;
                let dims = m.root_dims();
                assert_eq!(dims, [1, 2 * k, 1 + k * k, 2 * k, 1]);
                assert_eq!(dims.iter().sum::<usize>(), (n + 1) * (n + 1) - 1);
                let r1 = m.verify_root_relation();
                assert!(r1.ok, "{:?}", r1.failures);
                let lm = m.verify_m_orthocomplement();
                assert!(lm.ok, "{:?}", lm.failures);
                assert!(minors_positive(&m.beta_sigma_gram()));
            }
        },
    );
}

#[test]
fn c06_invariant_form_rigidity() {
    criterion(
        6,
        "invariant cocycles on s form a line with primitives",
        || {
            for n in 1..=2 {
                let m = build_su1n(n).unwrap();
                let inv = invariant_cocycle_space(&m);
                assert_eq!(inv.dim(), 1, "N={n}");
                let s = m.s_algebra();
                let sd = s.dim();
                let a: Vec<Vector> = m.a_space.basis().iter().map(|x| x[..sd].to_vec()).collect();
                for v in inv.basis() {
                    let c = TwoCochain::from_pair_vector(sd, v);
                    assert!(is_cocycle(&s, &c));
                    assert!(a.iter().all(|x| a.iter().all(|y| c.eval(x, y).is_zero())));
                    let prim = coboundary_primitive_roots(&m, &c).unwrap();
                    assert_eq!(delta1(&s, &prim), c);
                }
            }
        },
    );
}

#[test]
fn c07_quantum_moment_map() {
    criterion(
        7,
        "quantum moment map exact; dropping the nu^2 term fails",
        || {
            within(Duration::from_secs(120), "N=2", || {
                for n in 1..=2 {
                    for alpha in [1, 2] {
                        let t = build_qmm_standard(n, &Scalar::from_int(alpha)).unwrap();
                        let r = verify_qmm(&t, t.natural_order()).unwrap();
                        assert!(r.exact, "N={n} alpha={alpha}: truncated");
                        assert!(r.ok, "N={n} alpha={alpha}: {:?}", r.failures().next());
                        assert!(r.pairs.iter().all(|p| p.residual.is_zero()));
                    }
                }
                let t = build_qmm_standard(2, &Scalar::one())
                    .unwrap()
                    .mutate(&Mutation::DropNu2)
                    .unwrap();
                let r = verify_qmm(&t, t.natural_order()).unwrap();
                assert!(r.failures().any(|p| !p.residual.coeff(2).is_zero()));
            });
        },
    );
}

#[test]
fn c08_uniqueness_laws() {
    criterion(
        8,
        "nu-shift on n breaks the moment map law, on a it does not",
        || {
            let t = build_qmm_standard(2, &Scalar::one()).unwrap();
            let m = build_su1n(2).unwrap();
            let l = m.layout;
            let k = t.natural_order();
            let shift = |i: usize| {
                t.mutate(&Mutation::NuShift {
                    index: i,
                    constant: Scalar::one(),
                })
                .unwrap()
            };
            for i in [l.x(0), l.y(0), l.e()] {
                assert!(
                    !verify_qmm_on(&shift(i), k, &t.s_indices).unwrap().ok,
                    "index {i}"
                );
            }
            assert!(verify_qmm_on(&shift(l.h()), k, &t.s_indices).unwrap().ok);
        },
    );
}

#[test]
fn c09_retract_reductions() {
    criterion(
        9,
        "W closure, radial kernels, retract operator consistency",
        || {
            const K: usize = 6;
            for n in 2..=3 {
                let m = build_su1n(n).unwrap();
                assert!(check_w_closure(&m).unwrap().ok, "N={n}");
                let t = build_qmm_standard(n, &Scalar::one()).unwrap();
                let nv = 2 * (n - 1);
                let vsq = (0..nv).fold(CoefFn::zero(nv), |a, i| a.add(&CoefFn::v(nv, i).pow(2)));
                for f in [
                    vsq.mul(&CoefFn::z(nv)),
                    vsq.pow(2)
                        .mul(&CoefFn::exp_a(nv, 1))
                        .add(&CoefFn::z(nv).pow(2)),
                ] {
                    let c = KernelCandidate::new(NuSeries::from_fn(f, K), true).unwrap();
                    assert!(radial_reduce(&c, &m).unwrap().is_m_invariant);
                    let l = m.layout;
                    for i in 0..l.m_dim {
                        assert!(residual(&m, &m.unit(l.m(i)), &c, &t, K).unwrap().is_zero());
                    }
                }
                let one =
                    KernelCandidate::new(NuSeries::constant(nv, Scalar::from_int(5), K), true)
                        .unwrap();
                assert!(residuals_on_k(&m, &one, &t, K)
                    .unwrap()
                    .iter()
                    .all(|(_, r)| r.is_zero()));
            }
            let m = build_su1n(2).unwrap();
            let t = build_qmm_standard(2, &Scalar::one()).unwrap();
            let probe = NuSeries::from_fn(
                CoefFn::v(2, 0).mul(&CoefFn::z(2)).mul(&CoefFn::exp_a(2, 1)),
                K,
            );
            let kb = m.k_basis();
            for a in 0..kb.len() {
                for b in a + 1..kb.len() {
                    let d = commutator_defect(&m, &kb[a].1, &kb[b].1, &probe, &t, K).unwrap();
                    assert!(d.is_zero(), "[{}, {}]", kb[a].0, kb[b].0);
                }
            }
        },
    );
}

#[test]
fn c10_fourier_side_equation() {
    criterion(
        10,
        "Fourier-side residual: linear, 0 to 0, nu^0 oracle on 20 inputs",
        || {
            assert!(fourier_residual(&XiFn::zero(4), 2, 4).is_zero());
            let mut runner = TestRunner::new_with_rng(
                Config::default(),
                TestRng::deterministic_rng(Default::default()),
            );
            let strat = (common::xi_fn(4), common::xi_fn(4), common::gauss());
            for _ in 0..20 {
                let (a, b, c) = strat.new_tree(&mut runner).unwrap().current();
                let ra = fourier_residual(&a, 2, 4);
                let (inner, omega) = nu0_oracle(&a.nu0());
                assert_eq!(ra.inner.nu0(), inner);
                assert_eq!(ra.omega.nu0(), omega);
                let rb = fourier_residual(&b, 2, 4);
                let lin = fourier_residual(&a.scale(&c).add(&b), 2, 4);
                assert!(lin.inner.equivalent(&ra.inner.scale(&c).add(&rb.inner)));
                assert!(lin.omega.equivalent(&ra.omega.scale(&c).add(&rb.omega)));
            }
        },
    );
}

fn roundtrip<T>(value: &T) -> T
where
    T: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug,
{
    let s = serde_json::to_string(value).unwrap();
    let back: T = serde_json::from_str(&s).unwrap();
    assert_eq!(&back, value);
    assert_eq!(serde_json::to_string(&back).unwrap(), s);
    back
}

#[test]
fn c11_determinism_and_formats() {
    criterion(11, "byte-identical reports and JSON roundtrips", || {
        let bin = env!("CARGO_BIN_EXE_bdquant");
        for args in [
            &["verify", "qmm", "--N", "2", "--alpha", "1"][..],
            &["verify", "qmm", "--N", "2", "--mutate", "drop-nu2"],
            &["verify", "su1n", "--N", "3"],
            &["verify", "cocycle", "--N", "2"],
            &["su1n-export", "--N", "2"],
            &["qmm-export", "--N", "2"],
        ] {
            let run = || {
                Command::new(bin)
                    .args(args)
                    .env_remove("BDQUANT_TRUNCATION")
                    .output()
                    .unwrap()
            };
            let (a, b) = (run(), run());
            assert_eq!(a.stdout, b.stdout, "{args:?}");
            assert_eq!(a.status.code(), b.status.code());
        }

        let p = build_psd(&cross_spec()).unwrap();
        roundtrip(&p.spec);
        let aj = roundtrip(&p.algebra.to_json());
        assert_eq!(LieAlgebra::from_json(&aj).unwrap(), p.algebra);
        let m = build_su1n(2).unwrap();
        let ex: Su1nExport = roundtrip(&m.export());
        let _: AlgebraJson = roundtrip(&ex.algebra);
        let c = cocycle_basis(&p.algebra).remove(0);
        let cj: CochainJson = roundtrip(&c.to_json());
        assert_eq!(TwoCochain::from_json(&cj).unwrap(), c);
        let t = build_qmm_standard(2, &Scalar::frac(3, 2)).unwrap();
        let qj: QmmJson = roundtrip(&t.to_json());
        assert_eq!(QmmTable::from_json(&qj).unwrap(), t);
        let series = t.mu[t.dim() - 1].clone();
        let sj: NuSeriesJson = roundtrip(&series.to_json());
        assert_eq!(NuSeries::from_json(&sj).unwrap(), series);
        let cand = KernelCandidate::new(NuSeries::constant(2, Scalar::one(), 6), true).unwrap();
        let kj: CandidateJson = roundtrip(&cand.to_json());
        assert_eq!(KernelCandidate::from_json(&kj).unwrap(), cand);
        let xi = XiFn::term(3, (1, 2, -1, 1), GScalar::from_ints(2, -3));
        let xj: XiFnJson = roundtrip(&xi.to_json());
        assert_eq!(XiFn::from_json(&xj).unwrap(), xi);
        let mut rep = RunReport::new("verify", "00".into());
        rep.check("x", false, "nonzero");
        let text = rep.to_json_string();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(to_sorted_json(&back), text);
    });
}
