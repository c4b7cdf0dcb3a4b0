//! Chevalley-Eilenberg cochains with trivial coefficients, degrees 0 to 3.
//!
//! Sign convention: `(δα)(X, Y) = α([X, Y])` and
//! `δc(X, Y, Z) = c([X,Y], Z) + c([Y,Z], X) + c([Z,X], Y)`, so coboundaries are
//! exactly the forms `α([·,·])`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::lie::{LieAlgebra, Subspace};
use crate::linalg::{self, zero_vec, Matrix, Vector};
use crate::psd::PsdAlgebra;
use crate::scalar::Scalar;
use crate::su1n::Su1nModel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneCochain {
    pub values: Vector,
}

/// Antisymmetric bilinear form given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCochain {
    matrix: Matrix,
}

/// Alternating trilinear form stored on sorted triples (zeros omitted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeCochain {
    pub dim: usize,
    pub values: BTreeMap<(usize, usize, usize), Scalar>,
}

/// Cochain of any supported degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cochain {
    Zero(Scalar),
    One(OneCochain),
    Two(TwoCochain),
    Three(ThreeCochain),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CochainJson {
    pub matrix: Matrix,
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            v.push((i, j));
        }
    }
    v
}

fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    let mut v = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                v.push((i, j, k));
            }
        }
    }
    v
}

impl OneCochain {
    pub fn zero(dim: usize) -> Self {
        OneCochain {
            values: zero_vec(dim),
        }
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        linalg::dot(&self.values, x)
    }
}

impl TwoCochain {
    pub fn zero(dim: usize) -> Self {
        TwoCochain {
            matrix: vec![zero_vec(dim); dim],
        }
    }

    /// Validates antisymmetry.
    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            check_len(n, row.len())?;
            for j in 0..n {
                if row[j] != -&matrix[j][i] {
                    return Err(Error::Input(format!(
                        "cochain not antisymmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(TwoCochain { matrix })
    }

    /// From the upper-triangle entries in `(i<j)` lexicographic order.
    pub fn from_pair_vector(dim: usize, v: &[Scalar]) -> Self {
        let mut c = TwoCochain::zero(dim);
        for (&(i, j), x) in pairs(dim).iter().zip(v) {
            c.set(i, j, x.clone());
        }
        c
    }

    pub fn to_pair_vector(&self) -> Vector {
        pairs(self.dim())
            .into_iter()
            .map(|(i, j)| self.matrix[i][j].clone())
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.matrix[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.matrix[j][i] = -&v;
        self.matrix[i][j] = v;
    }

    pub fn eval(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        linalg::dot(x, &linalg::mat_vec(&self.matrix, y))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Scalar::is_zero)
    }

    pub fn to_json(&self) -> CochainJson {
        CochainJson {
            matrix: self.matrix.clone(),
        }
    }

    pub fn from_json(j: &CochainJson) -> Result<Self> {
        Self::from_matrix(j.matrix.clone())
    }
}

impl ThreeCochain {
    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

/// `δα`
pub fn delta1(alg: &LieAlgebra, a: &OneCochain) -> TwoCochain {
    let n = alg.dim();
    let mut c = TwoCochain::zero(n);
    for (i, j) in pairs(n) {
        c.set(i, j, a.eval(&alg.bracket_basis(i, j)));
    }
    c
}

/// `δc` on a basis triple.
pub fn delta2_at(alg: &LieAlgebra, c: &TwoCochain, i: usize, j: usize, k: usize) -> Scalar {
    let n = alg.dim();
    let e = |t: usize| linalg::unit_vec(n, t);
    c.eval(&alg.bracket_basis(i, j), &e(k))
        + c.eval(&alg.bracket_basis(j, k), &e(i))
        + c.eval(&alg.bracket_basis(k, i), &e(j))
}

pub fn delta2(alg: &LieAlgebra, c: &TwoCochain) -> ThreeCochain {
    let n = alg.dim();
    let values = triples(n)
        .into_iter()
        .filter_map(|(i, j, k)| {
            let v = delta2_at(alg, c, i, j, k);
            (!v.is_zero()).then_some(((i, j, k), v))
        })
        .collect();
    ThreeCochain { dim: n, values }
}

/// CE differential on a cochain of degree 0, 1 or 2.
pub fn delta(alg: &LieAlgebra, c: &Cochain) -> Result<Cochain> {
    match c {
        Cochain::Zero(_) => Ok(Cochain::One(OneCochain::zero(alg.dim()))),
        Cochain::One(a) => {
            check_len(alg.dim(), a.values.len())?;
            Ok(Cochain::Two(delta1(alg, a)))
        }
        Cochain::Two(t) => {
            check_len(alg.dim(), t.dim())?;
            Ok(Cochain::Three(delta2(alg, t)))
        }
        Cochain::Three(_) => Err(Error::Unsupported("differential of a 3-cochain".into())),
    }
}

/// `δc = 0` by brute force over all basis triples.
pub fn is_cocycle(alg: &LieAlgebra, c: &TwoCochain) -> bool {
    triples(alg.dim())
        .into_par_iter()
        .all(|(i, j, k)| delta2_at(alg, c, i, j, k).is_zero())
}

/// Matrix of `δ₁` (rows: pairs, columns: basis).
pub fn delta1_matrix(alg: &LieAlgebra) -> Matrix {
    pairs(alg.dim())
        .into_iter()
        .map(|(i, j)| alg.bracket_basis(i, j))
        .collect()
}

/// Matrix of `δ₂` (rows: triples, columns: pairs).
pub fn delta2_matrix(alg: &LieAlgebra) -> Matrix {
    let n = alg.dim();
    let pl = pairs(n);
    let mut index = vec![vec![usize::MAX; n]; n];
    for (p, &(i, j)) in pl.iter().enumerate() {
        index[i][j] = p;
        index[j][i] = p;
    }
    let np = pl.len();
    let table: Vec<Vec<Vector>> = (0..n)
        .map(|i| (0..n).map(|j| alg.bracket_basis(i, j)).collect())
        .collect();
    triples(n)
        .into_par_iter()
        .map(|(i, j, k)| {
            let mut row = zero_vec(np);
            // c([a,b], c) = Σ_l [a,b]_l c(e_l, e_c)
            for (a, b, cc) in [(i, j, k), (j, k, i), (k, i, j)] {
                for (l, x) in table[a][b].iter().enumerate() {
                    if x.is_zero() || l == cc {
                        continue;
                    }
                    let p = index[l][cc];
                    if l < cc {
                        row[p] += x;
                    } else {
                        row[p] -= x;
                    }
                }
            }
            row
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H2Report {
    pub h2: usize,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
}

pub fn h2_report(alg: &LieAlgebra) -> H2Report {
    let n = alg.dim();
    let np = n * n.saturating_sub(1) / 2;
    let rank2 = linalg::rank(&delta2_matrix(alg), np);
    let rank1 = linalg::rank(&delta1_matrix(alg), n);
    let cocycle_dim = np - rank2;
    H2Report {
        h2: cocycle_dim - rank1,
        cocycle_dim,
        coboundary_dim: rank1,
    }
}

/// `dim H²_CE(alg)` with trivial coefficients.
pub fn h2_dimension(alg: &LieAlgebra) -> usize {
    h2_report(alg).h2
}

/// Basis of the 2-cocycle space.
pub fn cocycle_basis(alg: &LieAlgebra) -> Vec<TwoCochain> {
    let n = alg.dim();
    let np = n * n.saturating_sub(1) / 2;
    linalg::nullspace(&delta2_matrix(alg), np)
        .iter()
        .map(|v| TwoCochain::from_pair_vector(n, v))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChcReport {
    pub is_cocycle: bool,
    pub violated: Vec<String>,
}

/// Evaluates the block conditions (i), (ii), (ii'), (iii) characterizing
/// 2-cocycles on a Pyatetskii-Shapiro algebra.
pub fn check_block_conditions(psd: &PsdAlgebra, c: &TwoCochain) -> Result<ChcReport> {
    check_len(psd.dim(), c.dim())?;
    let alg = &psd.algebra;
    let n = psd.dim();
    let e = |t: usize| linalg::unit_vec(n, t);
    let mut bad = [false; 4];
    let two = Scalar::from_int(2);
    for b in &psd.blocks {
        let m = b.v_dim();
        let che = c.get(b.h, b.e);
        for p in b.v.clone() {
            if !c.get(p, b.e).is_zero() {
                bad[0] = true;
            }
        }
        for p in 0..m {
            for q in 0..m {
                let lhs = &two * c.get(b.v.start + p, b.v.start + q);
                if lhs != &b.omega[p][q] * che {
                    bad[0] = true;
                }
            }
        }
        for x in psd.higher(b.j) {
            if !c.get(x, b.e).is_zero() {
                bad[1] = true;
            }
            for p in b.v.clone() {
                let xv = alg.bracket_basis(x, p);
                if *c.get(x, p) != c.eval(&e(b.h), &xv) {
                    bad[2] = true;
                }
            }
        }
        for k in b.j + 1..=psd.spec.r {
            let bk = psd.block(k);
            for p in bk.v.clone().chain(std::iter::once(bk.e)) {
                if !c.get(p, b.h).is_zero() {
                    bad[3] = true;
                }
            }
        }
    }
    let violated: Vec<String> = ["(i)", "(ii)", "(ii')", "(iii)"]
        .iter()
        .zip(bad)
        .filter(|(_, b)| *b)
        .map(|(t, _)| t.to_string())
        .collect();
    Ok(ChcReport {
        is_cocycle: violated.is_empty(),
        violated,
    })
}

/// Primitive `α` with `α(H_j) = 0`, `α(v_j) = c(H_j, v_j)`, `α(E_j) = c(H_j, E_j)/2`.
pub fn coboundary_primitive_psd(psd: &PsdAlgebra, c: &TwoCochain) -> Result<OneCochain> {
    check_len(psd.dim(), c.dim())?;
    if !is_cocycle(&psd.algebra, c) {
        return Err(Error::Precondition("cochain is not a cocycle".into()));
    }
    let labels = psd.algebra.labels();
    for bj in &psd.blocks {
        for bk in &psd.blocks {
            if !c.get(bj.h, bk.h).is_zero() {
                return Err(Error::Precondition(format!(
                    "c({}, {}) = {} is nonzero",
                    labels[bj.h],
                    labels[bk.h],
                    c.get(bj.h, bk.h)
                )));
            }
        }
    }
    let mut a = OneCochain::zero(psd.dim());
    for b in &psd.blocks {
        for p in b.v.clone() {
            a.values[p] = c.get(b.h, p).clone();
        }
        a.values[b.e] = c.get(b.h, b.e) / Scalar::from_int(2);
    }
    Ok(a)
}

/// Primitive `α'` on `s` with `α'(a) = 0` and `α'(X) = c(H_λ, X)/λ(H_λ)` on
/// each positive root space. `c` lives on [`Su1nModel::s_algebra`].
pub fn coboundary_primitive_roots(model: &Su1nModel, c: &TwoCochain) -> Result<OneCochain> {
    let s = model.s_algebra();
    let sd = s.dim();
    check_len(sd, c.dim())?;
    if !is_cocycle(&s, c) {
        return Err(Error::Precondition("cochain is not a cocycle".into()));
    }
    let restrict = |v: &[Scalar]| -> Result<Vector> {
        if v[sd..].iter().any(|x| !x.is_zero()) {
            return Err(Error::Precondition("vector outside s".into()));
        }
        Ok(v[..sd].to_vec())
    };
    let a_basis: Vec<Vector> = model
        .a_space
        .basis()
        .iter()
        .map(|v| restrict(v))
        .collect::<Result<_>>()?;
    for h1 in &a_basis {
        for h2 in &a_basis {
            if !c.eval(h1, h2).is_zero() {
                return Err(Error::Precondition(
                    "cocycle does not vanish on a × a".into(),
                ));
            }
        }
    }
    // Coordinates of α' in the basis (a-basis ++ root-space bases).
    let mut cols: Vec<Vector> = a_basis.clone();
    let mut vals: Vec<Scalar> = vec![Scalar::zero(); a_basis.len()];
    for root in model
        .roots
        .iter()
        .filter(|r| r.lambda_of_h[0].is_positive())
    {
        let hl = restrict(&root.h_lambda)?;
        // λ(H_λ) = λ(H)·t for H_λ = t·H
        let h = &a_basis[0];
        let k = h.iter().position(|x| !x.is_zero()).expect("H nonzero");
        let t = &hl[k] / &h[k];
        let lam_hl = &root.lambda_of_h[0] * &t;
        for x in root.space.basis() {
            let xs = restrict(x)?;
            vals.push(c.eval(&hl, &xs) / lam_hl.clone());
            cols.push(xs);
        }
    }
    // α'(e_i): solve Σ_b coef_b · b = e_i, then α'(e_i) = Σ coef_b vals_b
    let inv = linalg::inverse(&linalg::transpose(&cols, sd))
        .ok_or_else(|| Error::Precondition("a ⊕ positive root spaces do not span s".into()))?;
    let values = (0..sd)
        .map(|i| {
            let coefs: Vector = inv.iter().map(|row| row[i].clone()).collect();
            linalg::dot(&coefs, &vals)
        })
        .collect();
    Ok(OneCochain { values })
}

/// Solution space of `δc = 0` together with
/// `c([[Z,X]]_s, Y) + c(X, [[Z,Y]]_s) = 0` for every `Z` in a basis of `k`,
/// for cochains on `s`. Returned as a subspace of pair-vectors.
pub fn invariant_cocycle_space(model: &Su1nModel) -> Subspace {
    let s = model.s_algebra();
    let sd = s.dim();
    let d = model.dim();
    let pl = pairs(sd);
    let np = pl.len();
    let mut rows = delta2_matrix(&s);
    let mut index = vec![vec![usize::MAX; sd]; sd];
    for (p, &(i, j)) in pl.iter().enumerate() {
        index[i][j] = p;
        index[j][i] = p;
    }
    // coefficient row of  c(u, e_b)  in pair coordinates
    let add = |row: &mut Vector, u: &[Scalar], b: usize| {
        for (l, x) in u.iter().enumerate() {
            if x.is_zero() || l == b {
                continue;
            }
            let p = index[l][b];
            if l < b {
                row[p] += x;
            } else {
                row[p] -= x;
            }
        }
    };
    for z in model.k_space.basis() {
        let proj: Vec<Vector> = (0..sd)
            .map(|i| {
                let zx = model.algebra.br(z, &linalg::unit_vec(d, i));
                model.s_part(&zx)[..sd].to_vec()
            })
            .collect();
        for &(a, b) in &pl {
            let mut row = zero_vec(np);
            // c([Z,e_a]_s, e_b) - c([Z,e_b]_s, e_a)
            add(&mut row, &proj[a], b);
            let mut other = zero_vec(np);
            add(&mut other, &proj[b], a);
            for (r, o) in row.iter_mut().zip(&other) {
                *r -= o;
            }
            rows.push(row);
        }
    }
    Subspace::span(np, &linalg::nullspace(&rows, np))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psd::{build_psd, PsdSpec};

    #[test]
    fn delta_of_e_dual() {
        let p = build_psd(&PsdSpec::new(vec![1])).unwrap();
        let b = p.block(1);
        let mut a = OneCochain::zero(2);
        a.values[b.e] = Scalar::one();
        let c = delta1(&p.algebra, &a);
        assert_eq!(*c.get(b.h, b.e), Scalar::from_int(2));
    }

    #[test]
    fn zero_maps_to_zero() {
        let p = build_psd(&PsdSpec::new(vec![2, 1])).unwrap();
        let z = TwoCochain::zero(p.dim());
        assert!(delta2(&p.algebra, &z).is_zero());
        assert!(delta1(&p.algebra, &OneCochain::zero(p.dim())).is_zero());
    }

    #[test]
    fn delta2_matrix_agrees_with_pointwise() {
        let p = build_psd(&PsdSpec::new(vec![2, 2])).unwrap();
        let n = p.dim();
        let m = delta2_matrix(&p.algebra);
        let v: Vector = (0..n * (n - 1) / 2)
            .map(|i| Scalar::from_int((i as i64 * 7) % 5 - 2))
            .collect();
        let c = TwoCochain::from_pair_vector(n, &v);
        let by_matrix = linalg::mat_vec(&m, &v);
        let direct: Vector = triples(n)
            .into_iter()
            .map(|(i, j, k)| delta2_at(&p.algebra, &c, i, j, k))
            .collect();
        assert_eq!(by_matrix, direct);
    }

    #[test]
    fn h2_small_cases() {
        for (n, want) in [
            (vec![1], 0),
            (vec![2], 0),
            (vec![1, 1, 1], 3),
            (vec![1, 2], 1),
        ] {
            let p = build_psd(&PsdSpec::new(n.clone())).unwrap();
            assert_eq!(h2_dimension(&p.algebra), want, "n = {n:?}");
        }
    }

    #[test]
    fn single_hh_entry_is_a_cocycle() {
        let p = build_psd(&PsdSpec::new(vec![1, 1])).unwrap();
        let mut c = TwoCochain::zero(4);
        c.set(p.block(1).h, p.block(2).h, Scalar::one());
        let r = check_block_conditions(&p, &c).unwrap();
        assert!(r.is_cocycle && r.violated.is_empty());
        assert!(is_cocycle(&p.algebra, &c));
    }

    #[test]
    fn v_e_entry_violates_i() {
        let p = build_psd(&PsdSpec::new(vec![2])).unwrap();
        let b = p.block(1);
        let mut c = TwoCochain::zero(4);
        c.set(b.v.start, b.e, Scalar::one());
        let r = check_block_conditions(&p, &c).unwrap();
        assert_eq!(r.violated, vec!["(i)".to_string()]);
    }

    #[test]
    fn psd_primitive_examples() {
        let p = build_psd(&PsdSpec::new(vec![1])).unwrap();
        let b = p.block(1);
        let mut c = TwoCochain::zero(2);
        c.set(b.h, b.e, Scalar::from_int(2));
        let a = coboundary_primitive_psd(&p, &c).unwrap();
        assert_eq!(a.values[b.e], Scalar::one());
        assert_eq!(delta1(&p.algebra, &a), c);
        let z = coboundary_primitive_psd(&p, &TwoCochain::zero(2)).unwrap();
        assert_eq!(z, OneCochain::zero(2));
    }

    #[test]
    fn psd_primitive_rejects_hh() {
        let p = build_psd(&PsdSpec::new(vec![1, 1])).unwrap();
        let mut c = TwoCochain::zero(4);
        c.set(p.block(2).h, p.block(1).h, Scalar::one());
        let err = coboundary_primitive_psd(&p, &c).unwrap_err();
        assert!(err.to_string().contains("H2"), "{err}");
    }

    #[test]
    fn cochain_json_roundtrip() {
        let mut c = TwoCochain::zero(3);
        c.set(0, 2, Scalar::frac(-3, 4));
        let t = serde_json::to_string(&c.to_json()).unwrap();
        let back: CochainJson = serde_json::from_str(&t).unwrap();
        assert_eq!(TwoCochain::from_json(&back).unwrap(), c);
        let bad = CochainJson {
            matrix: vec![
                vec![Scalar::zero(), Scalar::one()],
                vec![Scalar::one(), Scalar::zero()],
            ],
        };
        assert!(TwoCochain::from_json(&bad).is_err());
    }
}
