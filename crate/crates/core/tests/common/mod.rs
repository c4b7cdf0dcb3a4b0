//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bdquant::cohomology::{cocycle_basis, TwoCochain};
use bdquant::lie::LieAlgebra;
use bdquant::linalg::{self, Vector};
use bdquant::psd::{CrossAction, CrossEntry, PsdAlgebra, PsdSpec};
use bdquant::retract::{XiFn, XiFnJson, XiTermJson};
use bdquant::{GScalar, Scalar};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

/// Rank by plain row reduction, kept separate from the library kernels.
pub fn oracle_rank(mut rows: Vec<Vec<Scalar>>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let piv = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] / &piv;
            for c in col..ncols {
                let t = &f * &rows[rank][c];
                rows[r][c] -= &t;
            }
        }
        rank += 1;
    }
    rank
}

pub fn oracle_h2(alg: &LieAlgebra) -> usize {
    let n = alg.dim();
    let mut idx = vec![vec![None; n]; n];
    let mut np = 0;
    for i in 0..n {
        for j in i + 1..n {
            idx[i][j] = Some((np, Scalar::one()));
            idx[j][i] = Some((np, Scalar::from_int(-1)));
            np += 1;
        }
    }
    let sc = |i: usize, j: usize| alg.bracket_basis(i, j);
    let mut d2 = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut row = vec![Scalar::zero(); np];
                for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                    for (l, coef) in sc(a, b).iter().enumerate() {
                        if let Some((p, s)) = &idx[l][c] {
                            row[*p] += &(coef * s);
                        }
                    }
                }
                d2.push(row);
            }
        }
    }
    let mut d1 = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            d1.push(sc(i, j));
        }
    }
    np - oracle_rank(d2, np) - oracle_rank(d1, n)
}

pub fn all_specs() -> Vec<PsdSpec> {
    let mut out = Vec::new();
    for r in 1..=3u32 {
        for code in 0..3usize.pow(r) {
            let n = (0..r).map(|t| code / 3usize.pow(t) % 3 + 1).collect();
            out.push(PsdSpec::new(n));
        }
    }
    out
}

pub fn cross_spec() -> PsdSpec {
    let s = Scalar::from_int;
    let mut spec = PsdSpec::new(vec![2, 1]);
    spec.cross_actions.push(CrossAction {
        j: 1,
        k: 2,
        action: vec![CrossEntry {
            source: 0,
            matrix: vec![vec![s(1), s(0)], vec![s(0), s(-1)]],
        }],
    });
    spec
}

pub fn random_cochain(rng: &mut StdRng, p: &PsdAlgebra, basis: &[TwoCochain]) -> TwoCochain {
    let d = p.dim();
    let small = |rng: &mut StdRng| Scalar::frac(rng.gen_range(-5..=5), rng.gen_range(1..=3));
    let mut c = TwoCochain::zero(d);
    match rng.gen_range(0..4) {
        0 | 1 => {
            for b in basis {
                let t = small(rng);
                for i in 0..d {
                    for j in i + 1..d {
                        let v = c.get(i, j) + &(&t * b.get(i, j));
                        c.set(i, j, v);
                    }
                }
            }
            if rng.gen_bool(0.5) {
                let i = rng.gen_range(0..d - 1);
                let j = rng.gen_range(i + 1..d);
                let v = c.get(i, j) + &Scalar::one();
                c.set(i, j, v);
            }
        }
        _ => {
            for i in 0..d {
                for j in i + 1..d {
                    if rng.gen_bool(0.3) {
                        c.set(i, j, small(rng));
                    }
                }
            }
        }
    }
    c
}

/// Cocycles with `c(H_j, H_k) = 0` for all blocks.
pub fn cocycles_off_cartan(p: &PsdAlgebra) -> Vec<TwoCochain> {
    let d = p.dim();
    let basis: Vec<Vector> = cocycle_basis(&p.algebra)
        .iter()
        .map(|c| c.to_pair_vector())
        .collect();
    let hs: Vec<usize> = p.blocks.iter().map(|b| b.h).collect();
    // constraint rows in the coordinates of the cocycle basis
    let mut rows = Vec::new();
    for &a in &hs {
        for &b in &hs {
            if a < b {
                rows.push(
                    basis
                        .iter()
                        .map(|v| TwoCochain::from_pair_vector(d, v).get(a, b).clone())
                        .collect::<Vector>(),
                );
            }
        }
    }
    let coords = if rows.is_empty() {
        linalg::identity(basis.len())
    } else {
        linalg::nullspace(&rows, basis.len())
    };
    coords
        .iter()
        .map(|w| {
            let mut v = vec![Scalar::zero(); basis[0].len()];
            for (t, b) in w.iter().zip(&basis) {
                linalg::axpy(&mut v, t, b);
            }
            TwoCochain::from_pair_vector(d, &v)
        })
        .collect()
}

pub type Laurent = BTreeMap<(i32, i32, i32), GScalar>;

/// The ν⁰ limit of the Fourier-side equation, applied to the ν⁰ part of
/// `ϑ` written as a Laurent polynomial in `(e^a, r, ξ)`.
pub fn nu0_oracle(theta: &Laurent) -> (Laurent, Laurent) {
    let add = |out: &mut Laurent, key: (i32, i32, i32), c: GScalar| {
        let e = out.entry(key).or_insert_with(GScalar::zero);
        *e = &*e + &c;
    };
    let g = GScalar::from_ints;
    let mut inner = Laurent::new();
    let mut omega = Laurent::new();
    for (&(k, m, n), c) in theta {
        let mr = Scalar::from_int(m as i64);
        let nx = Scalar::from_int(n as i64);
        let ka = Scalar::from_int(k as i64);
        // i ξ e^a (2 r² + 2 + 2 i ξ e^{-a}) ϑ
        add(&mut inner, (k + 1, m + 2, n + 1), c * &g(0, 2));
        add(&mut inner, (k + 1, m, n + 1), c * &g(0, 2));
        add(&mut inner, (k, m, n + 2), c * &g(-2, 0));
        // -4 i e^a r^{-1} ∂_ξ ∂_r ϑ
        let cxr = c.scale(&(&mr * &nx));
        add(&mut inner, (k + 1, m - 2, n - 1), &cxr * &g(0, -4));
        // -2 e^a ϑ - 2 e^a ∂_a ϑ
        add(&mut omega, (k + 1, m, n), c * &g(-2, 0));
        add(&mut omega, (k + 1, m, n), &c.scale(&ka) * &g(-2, 0));
        // -e^{-a} ∂_r ϑ + e^a (r + 1/r) ∂_r ϑ
        let cr = c.scale(&mr);
        add(&mut omega, (k - 1, m - 1, n), &cr * &g(-1, 0));
        add(&mut omega, (k + 1, m, n), cr.clone());
        add(&mut omega, (k + 1, m - 2, n), cr);
        // -2 e^a ξ ∂_ξ ϑ
        add(&mut omega, (k + 1, m, n), &c.scale(&nx) * &g(-2, 0));
    }
    inner.retain(|_, v| !v.is_zero());
    omega.retain(|_, v| !v.is_zero());
    (inner, omega)
}

pub fn gauss() -> impl Strategy<Value = GScalar> {
    (-4i64..=4, -4i64..=4).prop_map(|(a, b)| GScalar::from_ints(a, b))
}

pub fn xi_fn(order: usize) -> impl Strategy<Value = XiFn> {
    let key = (-2i32..=2, -2i32..=3, -2i32..=3, -2i32..=2);
    prop::collection::vec((key, prop::collection::vec(gauss(), order + 1)), 1..=4).prop_map(
        move |ts| {
            let json = XiFnJson {
                order,
                terms: ts
                    .into_iter()
                    .map(|((k, m, n, s2), coeffs)| XiTermJson {
                        k,
                        m,
                        n,
                        s2,
                        coeffs,
                    })
                    .collect(),
            };
            XiFn::from_json(&json).unwrap()
        },
    )
}
