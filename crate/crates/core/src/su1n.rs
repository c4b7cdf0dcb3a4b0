//! Matrix model of su(1,N): Cartan involution, restricted roots, adapted basis,
//! Iwasawa projection and the structural identities between them.
//!
//! The realified algebra is expressed in an adapted basis laid out as
//! `H, x_1..x_n, y_1..y_n, E, m_1..m_k, Z, sx_1..sx_n, sy_1..sy_n, sE`
//! with `n = N-1`. The first `2N` vectors span `s = a ⊕ n`, `m_*`/`Z` span
//! `m = [m,m] ⊕ Z(m)` and the `s*` vectors are the images under `σ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{AlgebraJson, LieAlgebra, Subspace};
use crate::linalg::{self, is_zero_vec, unit_vec, zero_vec, Matrix, Vector};
use crate::scalar::{GScalar, Scalar};

/// Square matrix over the Gaussian rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct GMatrix {
    pub n: usize,
    pub a: Vec<Vec<GScalar>>,
}

impl GMatrix {
    pub fn zero(n: usize) -> Self {
        GMatrix {
            n,
            a: vec![vec![GScalar::zero(); n]; n],
        }
    }

    pub fn unit(n: usize, i: usize, j: usize, v: GScalar) -> Self {
        let mut m = Self::zero(n);
        m.a[i][j] = v;
        m
    }

    pub fn mul(&self, o: &GMatrix) -> GMatrix {
        let mut r = GMatrix::zero(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                if self.a[i][k].is_zero() {
                    continue;
                }
                for j in 0..self.n {
                    if !o.a[k][j].is_zero() {
                        let t = &self.a[i][k] * &o.a[k][j];
                        r.a[i][j] += &t;
                    }
                }
            }
        }
        r
    }

    pub fn add(&self, o: &GMatrix) -> GMatrix {
        let mut r = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                r.a[i][j] += &o.a[i][j];
            }
        }
        r
    }

    pub fn scale(&self, s: &Scalar) -> GMatrix {
        GMatrix {
            n: self.n,
            a: self
                .a
                .iter()
                .map(|row| row.iter().map(|x| x.scale(s)).collect())
                .collect(),
        }
    }

    pub fn sub(&self, o: &GMatrix) -> GMatrix {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn commutator(&self, o: &GMatrix) -> GMatrix {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn adjoint(&self) -> GMatrix {
        let mut r = GMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                r.a[j][i] = self.a[i][j].conj();
            }
        }
        r
    }

    pub fn trace(&self) -> GScalar {
        let mut t = GScalar::zero();
        for i in 0..self.n {
            t += &self.a[i][i];
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().flatten().all(GScalar::is_zero)
    }

    fn flatten(&self) -> Vector {
        let mut v = Vec::with_capacity(2 * self.n * self.n);
        for row in &self.a {
            for x in row {
                v.push(x.re.clone());
                v.push(x.im.clone());
            }
        }
        v
    }
}

/// `J = diag(-1, 1, ..., 1)`
pub fn j_matrix(n: usize) -> GMatrix {
    let mut j = GMatrix::zero(n);
    for i in 0..n {
        j.a[i][i] = GScalar::from_ints(if i == 0 { -1 } else { 1 }, 0);
    }
    j
}

/// `X†J + JX = 0` and `tr X = 0`.
pub fn in_su1n(x: &GMatrix) -> bool {
    let j = j_matrix(x.n);
    x.adjoint().mul(&j).add(&j.mul(x)).is_zero() && x.trace().is_zero()
}

/// Real coordinates with respect to a basis of matrices.
#[derive(Clone, Debug)]
struct MatrixBasis {
    mats: Vec<GMatrix>,
    rows: Vec<usize>,
    inv: Matrix,
}

impl MatrixBasis {
    fn new(mats: Vec<GMatrix>) -> Self {
        let d = mats.len();
        let cols: Vec<Vector> = mats.iter().map(GMatrix::flatten).collect();
        let len = cols[0].len();
        // pick d independent coordinate rows of the (len × d) matrix
        let full = linalg::transpose(&cols, len);
        let mut rows = Vec::new();
        let mut chosen: Vec<Vector> = Vec::new();
        for (r, row) in full.iter().enumerate() {
            let mut trial = chosen.clone();
            trial.push(row.clone());
            if linalg::rank(&trial, d) == trial.len() {
                chosen = trial;
                rows.push(r);
                if rows.len() == d {
                    break;
                }
            }
        }
        assert_eq!(rows.len(), d, "matrix basis is linearly dependent");
        let inv = linalg::inverse(&chosen).expect("independent rows");
        MatrixBasis { mats, rows, inv }
    }

    fn coords(&self, x: &GMatrix) -> Option<Vector> {
        let f = x.flatten();
        let sel: Vector = self.rows.iter().map(|&r| f[r].clone()).collect();
        let c = linalg::mat_vec(&self.inv, &sel);
        (self.combine(&c) == *x).then_some(c)
    }

    fn combine(&self, c: &[Scalar]) -> GMatrix {
        let n = self.mats[0].n;
        let mut r = GMatrix::zero(n);
        for (m, x) in self.mats.iter().zip(c) {
            if !x.is_zero() {
                r = r.add(&m.scale(x));
            }
        }
        r
    }
}

/// Restricted root with its root space and Killing dual.
#[derive(Clone, Debug, PartialEq)]
pub struct RootDatum {
    pub name: String,
    /// value of the root on the a-generator
    pub lambda_of_h: Vec<Scalar>,
    pub space: Subspace,
    pub h_lambda: Vector,
}

/// Index layout of the adapted basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    /// `N - 1`
    pub n: usize,
    /// `dim m = n²`
    pub m_dim: usize,
}

impl Layout {
    pub fn h(&self) -> usize {
        0
    }
    pub fn x(&self, i: usize) -> usize {
        1 + i
    }
    pub fn y(&self, i: usize) -> usize {
        1 + self.n + i
    }
    pub fn e(&self) -> usize {
        1 + 2 * self.n
    }
    pub fn s_dim(&self) -> usize {
        2 + 2 * self.n
    }
    pub fn m(&self, i: usize) -> usize {
        self.s_dim() + i
    }
    /// Index of the center generator of m (the last m vector); none when m = 0.
    pub fn z(&self) -> Option<usize> {
        (self.m_dim > 0).then(|| self.s_dim() + self.m_dim - 1)
    }
    pub fn sx(&self, i: usize) -> usize {
        self.s_dim() + self.m_dim + i
    }
    pub fn sy(&self, i: usize) -> usize {
        self.s_dim() + self.m_dim + self.n + i
    }
    pub fn se(&self) -> usize {
        self.s_dim() + self.m_dim + 2 * self.n
    }
    pub fn dim(&self) -> usize {
        self.se() + 1
    }
    /// Position of a v-coordinate (`x_i` then `y_i`) in the adapted basis.
    pub fn v(&self, k: usize) -> usize {
        1 + k
    }
    pub fn sv(&self, k: usize) -> usize {
        self.s_dim() + self.m_dim + k
    }
}

/// Realified su(1,N) with its distinguished subspaces.
#[derive(Clone, Debug)]
pub struct Su1nModel {
    pub n_param: usize,
    pub layout: Layout,
    pub algebra: LieAlgebra,
    /// σ in adapted coordinates (acting on column vectors)
    pub sigma: Matrix,
    pub k_space: Subspace,
    pub p_space: Subspace,
    pub a_space: Subspace,
    pub n_space: Subspace,
    pub m_space: Subspace,
    pub s_space: Subspace,
    pub g0_space: Subspace,
    pub roots: Vec<RootDatum>,
    matrices: Vec<GMatrix>,
    killing: Matrix,
}

fn std_basis(n1: usize) -> Vec<GMatrix> {
    let j = j_matrix(n1);
    let mut out = Vec::new();
    for p in 0..n1 - 1 {
        let mut d = GMatrix::zero(n1);
        d.a[p][p] = GScalar::from_ints(0, 1);
        d.a[p + 1][p + 1] = GScalar::from_ints(0, -1);
        out.push(d);
    }
    for p in 0..n1 {
        for q in p + 1..n1 {
            let jj = &j.a[p][p] * &j.a[q][q];
            for a in [GScalar::one(), GScalar::i()] {
                let mut m = GMatrix::zero(n1);
                m.a[p][q] = a.clone();
                m.a[q][p] = -&(&a.conj() * &jj);
                out.push(m);
            }
        }
    }
    out
}

fn v_matrix(n1: usize, col: usize, w: GScalar) -> GMatrix {
    let mut m = GMatrix::zero(n1);
    m.a[0][col] = w.clone();
    m.a[1][col] = w.clone();
    m.a[col][0] = w.conj();
    m.a[col][1] = -&w.conj();
    m
}

fn half(re: i64, im: i64) -> GScalar {
    GScalar::new(Scalar::frac(re, 2), Scalar::frac(im, 2))
}

fn sigma_matrix(x: &GMatrix) -> GMatrix {
    let j = j_matrix(x.n);
    j.mul(x).mul(&j)
}

fn eigenspace(m: &Matrix, mu: &Scalar) -> Subspace {
    let n = m.len();
    let rows: Matrix = (0..n)
        .map(|i| {
            let mut r = m[i].clone();
            r[i] = &r[i] - mu;
            r
        })
        .collect();
    Subspace::span(n, &linalg::nullspace(&rows, n))
}

fn structure_from(basis: &MatrixBasis) -> BTreeMap<(usize, usize), Vector> {
    let d = basis.mats.len();
    let mut t = BTreeMap::new();
    for i in 0..d {
        for j in i + 1..d {
            let c = basis.mats[i].commutator(&basis.mats[j]);
            let v = basis
                .coords(&c)
                .expect("su(1,N) is closed under commutators");
            if !is_zero_vec(&v) {
                t.insert((i, j), v);
            }
        }
    }
    t
}

/// Builds the model for `N ≥ 1`.
pub fn build_su1n(n_param: usize) -> Result<Su1nModel> {
    if n_param == 0 {
        return Err(Error::Input("N must be at least 1".into()));
    }
    let n1 = n_param + 1;
    let n = n_param - 1;

    // Standard basis: compute m = centralizer of a in k there.
    let std_mats = std_basis(n1);
    debug_assert!(std_mats.iter().all(in_su1n));
    let std = MatrixBasis::new(std_mats.clone());
    let d = std_mats.len();
    let g_std = LieAlgebra::new(
        (0..d).map(|i| format!("b{i}")).collect(),
        structure_from(&std),
    )?;
    let mut h0 = GMatrix::zero(n1);
    h0.a[0][1] = GScalar::one();
    h0.a[1][0] = GScalar::one();
    let h_std = std.coords(&h0).expect("H0 lies in su(1,N)");
    let sigma_std: Matrix = {
        let cols: Vec<Vector> = std_mats
            .iter()
            .map(|m| std.coords(&sigma_matrix(m)).expect("σ preserves su(1,N)"))
            .collect();
        linalg::transpose(&cols, d)
    };
    let k_std = eigenspace(&sigma_std, &Scalar::one());
    let ad_h_std = g_std.ad(&h_std);
    let g0_std = eigenspace(&ad_h_std, &Scalar::zero());
    let m_std = k_std.intersection(&g0_std);
    let mm_std = g_std.bracket_span(&m_std, &m_std);
    let zm_std = m_std.intersection(&g_std.centralizer(&m_std));

    // Adapted basis.
    let mut mats: Vec<GMatrix> = vec![h0.clone()];
    let xs: Vec<GMatrix> = (0..n).map(|i| v_matrix(n1, i + 2, half(1, 1))).collect();
    let ys: Vec<GMatrix> = (0..n).map(|i| v_matrix(n1, i + 2, half(-1, 1))).collect();
    let mut e = GMatrix::zero(n1);
    e.a[0][0] = GScalar::from_ints(0, -1);
    e.a[0][1] = GScalar::from_ints(0, 1);
    e.a[1][0] = GScalar::from_ints(0, -1);
    e.a[1][1] = GScalar::from_ints(0, 1);
    mats.extend(xs.iter().cloned());
    mats.extend(ys.iter().cloned());
    mats.push(e.clone());
    let m_mats: Vec<GMatrix> = if n == 0 {
        Vec::new()
    } else {
        let mut out: Vec<GMatrix> = mm_std.basis().iter().map(|c| std.combine(c)).collect();
        // Normalize the center generator by  Z := -(Z(m)-part of [x_1, σ(y_1)]).
        let zb = std.combine(&zm_std.basis()[0]);
        let br = xs[0].commutator(&sigma_matrix(&ys[0]));
        let br_std = std.coords(&br).expect("bracket in su(1,N)");
        let mut cols: Vec<Vector> = mm_std.basis().to_vec();
        cols.push(zm_std.basis()[0].clone());
        cols.push(h_std.clone());
        let sol = linalg::solve(&linalg::transpose(&cols, d), &br_std, cols.len())
            .expect("[x, σy] lies in g_0");
        let zc = &sol[mm_std.dim()];
        assert!(!zc.is_zero(), "center component of [x_1, σ(y_1)] vanishes");
        out.push(zb.scale(&-zc));
        out
    };
    let m_dim = m_mats.len();
    mats.extend(m_mats);
    mats.extend(xs.iter().map(sigma_matrix));
    mats.extend(ys.iter().map(sigma_matrix));
    mats.push(sigma_matrix(&e));
    assert_eq!(mats.len(), d, "adapted basis has the wrong size");
    let layout = Layout { n, m_dim };

    let mut labels = vec!["H".to_string()];
    labels.extend((1..=n).map(|i| format!("x{i}")));
    labels.extend((1..=n).map(|i| format!("y{i}")));
    labels.push("E".into());
    if m_dim > 0 {
        labels.extend((1..m_dim).map(|i| format!("m{i}")));
        labels.push("Z".into());
    }
    labels.extend((1..=n).map(|i| format!("sx{i}")));
    labels.extend((1..=n).map(|i| format!("sy{i}")));
    labels.push("sE".into());

    let basis = MatrixBasis::new(mats.clone());
    let algebra = LieAlgebra::new(labels, structure_from(&basis))?;
    let sigma: Matrix = {
        let cols: Vec<Vector> = mats
            .iter()
            .map(|m| basis.coords(&sigma_matrix(m)).expect("σ-image in basis"))
            .collect();
        linalg::transpose(&cols, d)
    };

    let k_space = eigenspace(&sigma, &Scalar::one());
    let p_space = {
        let mut neg = sigma.clone();
        for row in neg.iter_mut() {
            for x in row.iter_mut() {
                *x = -&*x;
            }
        }
        eigenspace(&neg, &Scalar::one())
    };
    let h = unit_vec(d, layout.h());
    let a_space = Subspace::span(d, &[h.clone()]);
    let ad_h = algebra.ad(&h);
    let killing = algebra.killing_matrix();
    let bhh = linalg::dot(&linalg::mat_vec(&killing, &h), &h);
    let mut roots = Vec::new();
    for (name, val) in [("2λ", 2), ("λ", 1), ("-λ", -1), ("-2λ", -2)] {
        let v = Scalar::from_int(val);
        let space = eigenspace(&ad_h, &v);
        let h_lambda = linalg::scale_vec(&(&v / &bhh), &h);
        roots.push(RootDatum {
            name: name.to_string(),
            lambda_of_h: vec![v],
            space,
            h_lambda,
        });
    }
    let g0_space = eigenspace(&ad_h, &Scalar::zero());
    let n_space = roots[0].space.sum(&roots[1].space);
    let s_space = a_space.sum(&n_space);
    let m_space = k_space.intersection(&g0_space);
    let total: usize = roots.iter().map(|r| r.space.dim()).sum::<usize>() + g0_space.dim();
    assert_eq!(total, d, "ad_H is not diagonalizable over the rationals");

    let model = Su1nModel {
        n_param,
        layout,
        algebra,
        sigma,
        k_space,
        p_space,
        a_space,
        n_space,
        m_space,
        s_space,
        g0_space,
        roots,
        matrices: mats,
        killing,
    };
    model.assert_adapted();
    Ok(model)
}

/// Outcome of a batch of exact checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ok: bool,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn record(&mut self, pass: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !pass {
            self.failures.push(what());
        }
    }

    fn finish(mut self) -> Self {
        self.ok = self.failures.is_empty();
        self
    }
}

impl Su1nModel {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Matrix realizing a coefficient vector.
    pub fn matrix_of(&self, x: &[Scalar]) -> GMatrix {
        let mut r = GMatrix::zero(self.n_param + 1);
        for (m, c) in self.matrices.iter().zip(x) {
            if !c.is_zero() {
                r = r.add(&m.scale(c));
            }
        }
        r
    }

    pub fn basis_matrices(&self) -> &[GMatrix] {
        &self.matrices
    }

    pub fn unit(&self, i: usize) -> Vector {
        unit_vec(self.dim(), i)
    }

    pub fn sigma_of(&self, x: &[Scalar]) -> Vector {
        linalg::mat_vec(&self.sigma, x)
    }

    pub fn killing(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        linalg::dot(&linalg::mat_vec(&self.killing, x), y)
    }

    pub fn killing_matrix(&self) -> &Matrix {
        &self.killing
    }

    /// `β_σ(X,Y) = -β(X, σY)`
    pub fn beta_sigma(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        -self.killing(x, &self.sigma_of(y))
    }

    pub fn beta_sigma_gram(&self) -> Matrix {
        let d = self.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| self.beta_sigma(&self.unit(i), &self.unit(j)))
                    .collect()
            })
            .collect()
    }

    pub fn root(&self, name: &str) -> Option<&RootDatum> {
        self.roots.iter().find(|r| r.name == name)
    }

    /// Dimensions of `(g_{2λ}, g_λ, g_0, g_{-λ}, g_{-2λ})`.
    pub fn root_dims(&self) -> [usize; 5] {
        [
            self.roots[0].space.dim(),
            self.roots[1].space.dim(),
            self.g0_space.dim(),
            self.roots[2].space.dim(),
            self.roots[3].space.dim(),
        ]
    }

    /// Subspace spanned by a range of adapted basis vectors.
    pub fn span_of(&self, idx: impl IntoIterator<Item = usize>) -> Subspace {
        let v: Vec<Vector> = idx.into_iter().map(|i| self.unit(i)).collect();
        Subspace::span(self.dim(), &v)
    }

    /// `s` as a Lie algebra on its adapted basis `H, x, y, E`.
    pub fn s_algebra(&self) -> LieAlgebra {
        let l = self.layout;
        let vecs: Vec<Vector> = (0..l.s_dim()).map(|i| self.unit(i)).collect();
        let labels = self.algebra.labels()[..l.s_dim()].to_vec();
        self.algebra
            .restrict(&vecs, labels)
            .expect("s is a subalgebra")
    }

    /// Labeled basis of `k`: `m_*`, `Z`, then `v + σv` and `E + σE`.
    pub fn k_basis(&self) -> Vec<(String, Vector)> {
        let l = self.layout;
        let mut out = Vec::new();
        for i in 0..l.m_dim {
            out.push((self.algebra.labels()[l.m(i)].clone(), self.unit(l.m(i))));
        }
        for k in 0..2 * l.n {
            let v = self.unit(l.v(k));
            let kv = linalg::add_vec(&v, &self.sigma_of(&v));
            out.push((format!("k{}", self.algebra.labels()[l.v(k)]), kv));
        }
        let e = self.unit(l.e());
        out.push(("kE".into(), linalg::add_vec(&e, &self.sigma_of(&e))));
        out
    }

    fn assert_adapted(&self) {
        let l = self.layout;
        let lam = &self.roots[1].space;
        for k in 0..2 * l.n {
            assert!(lam.contains(&self.unit(l.v(k))), "v basis outside g_λ");
            assert!(
                self.roots[2].space.contains(&self.unit(l.sv(k))),
                "σv basis outside g_-λ"
            );
        }
        assert!(self.roots[0].space.contains(&self.unit(l.e())));
        assert!(self.roots[3].space.contains(&self.unit(l.se())));
        assert_eq!(self.m_space, self.span_of((0..l.m_dim).map(|i| l.m(i))));
        for i in 0..l.n {
            let b = self.algebra.br(&self.unit(l.x(i)), &self.unit(l.y(i)));
            assert_eq!(b, self.unit(l.e()), "[x_i, y_i] != E");
        }
    }

    /// `[X, σX] = β(X, σX) H_λ` and `β(X, σX) < 0` on every root basis vector.
    pub fn verify_root_relation(&self) -> CheckReport {
        let mut rep = CheckReport::default();
        for root in &self.roots {
            for (i, x) in root.space.basis().iter().enumerate() {
                let sx = self.sigma_of(x);
                let lhs = self.algebra.br(x, &sx);
                let b = self.killing(x, &sx);
                let rhs = linalg::scale_vec(&b, &root.h_lambda);
                rep.record(lhs == rhs, || {
                    format!("{} basis {i}: [X,σX] mismatch", root.name)
                });
                rep.record(b.is_negative(), || {
                    format!("{} basis {i}: β(X,σX) = {b} is not negative", root.name)
                });
            }
        }
        rep.finish()
    }

    /// `span [m, X]` is the β_σ-orthocomplement of `X` in `g_λ`, and
    /// `g_λ = ℝX ⊕ [m, X]`.
    pub fn verify_m_orthocomplement(&self) -> CheckReport {
        let mut rep = CheckReport::default();
        for root in &self.roots {
            for (i, x) in root.space.basis().iter().enumerate() {
                let xs = Subspace::span(self.dim(), &[x.clone()]);
                let mx = self.algebra.bracket_span(&self.m_space, &xs);
                let rows: Matrix = vec![linalg::mat_vec(
                    &linalg::transpose(&self.beta_sigma_gram(), self.dim()),
                    x,
                )];
                let orth_all = Subspace::span(self.dim(), &linalg::nullspace(&rows, self.dim()));
                let orth = orth_all.intersection(&root.space);
                rep.record(mx == orth, || {
                    format!("{} basis {i}: [m,X] is not the orthocomplement", root.name)
                });
                let total = xs.sum(&mx);
                rep.record(total == root.space && total.dim() == 1 + mx.dim(), || {
                    format!("{} basis {i}: g_λ ≠ ℝX ⊕ [m,X]", root.name)
                });
            }
        }
        rep.finish()
    }

    /// `X = Xs + Xk` with `Xs ∈ s`, `Xk ∈ k`.
    pub fn iwasawa_project(&self, x: &[Scalar]) -> Result<(Vector, Vector)> {
        crate::error::check_len(self.dim(), x.len())?;
        let sb = self.s_space.basis();
        let kb = self.k_space.basis();
        let mut cols: Vec<Vector> = sb.to_vec();
        cols.extend(kb.iter().cloned());
        let sol =
            linalg::solve(&linalg::transpose(&cols, self.dim()), x, cols.len()).expect("g = s ⊕ k");
        let mut xs = zero_vec(self.dim());
        for (c, b) in sol.iter().zip(sb) {
            linalg::axpy(&mut xs, c, b);
        }
        let xk = linalg::sub_vec(x, &xs);
        Ok((xs, xk))
    }

    /// `[X]_s`
    pub fn s_part(&self, x: &[Scalar]) -> Vector {
        self.iwasawa_project(x).expect("length checked").0
    }

    /// Structural invariants of the root decomposition.
    pub fn check_invariants(&self) -> Vec<(String, bool)> {
        let mut out = Vec::new();
        out.push((
            "beta_sigma_positive_definite".into(),
            linalg::is_positive_definite(&self.beta_sigma_gram()),
        ));
        let sigma_sq = linalg::mat_mul(&self.sigma, &self.sigma);
        out.push((
            "sigma_involution".into(),
            sigma_sq == linalg::identity(self.dim()),
        ));
        out.push(("a_in_p".into(), self.a_space.is_subspace_of(&self.p_space)));
        // all spaces with their functional value, g_0 included
        let mut spaces: Vec<(i64, &Subspace)> = vec![(0, &self.g0_space)];
        for (r, v) in self.roots.iter().zip([2i64, 1, -1, -2]) {
            spaces.push((v, &r.space));
        }
        let mut orth = true;
        let mut graded = true;
        for &(l1, s1) in &spaces {
            for &(l2, s2) in &spaces {
                if l1 + l2 != 0 {
                    for x in s1.basis() {
                        for y in s2.basis() {
                            if !self.killing(x, y).is_zero() {
                                orth = false;
                            }
                        }
                    }
                }
                let target = spaces
                    .iter()
                    .find(|(l, _)| *l == l1 + l2)
                    .map(|(_, s)| (*s).clone())
                    .unwrap_or_else(|| Subspace::zero(self.dim()));
                if !self.algebra.bracket_span(s1, s2).is_subspace_of(&target) {
                    graded = false;
                }
            }
        }
        out.push(("root_spaces_killing_orthogonal".into(), orth));
        out.push(("bracket_grading".into(), graded));
        let mut sig = true;
        for (i, j) in [(0, 3), (1, 2)] {
            let img = self.roots[i].space.image(&self.sigma);
            if img != self.roots[j].space {
                sig = false;
            }
        }
        out.push(("sigma_swaps_roots".into(), sig));
        let mut vecs = Vec::new();
        for x in self.s_space.basis() {
            for y in self.k_space.basis() {
                vecs.push(self.s_part(&self.algebra.br(x, y)));
            }
        }
        out.push((
            "s_generated_by_projected_brackets".into(),
            Subspace::span(self.dim(), &vecs) == self.s_space,
        ));
        out
    }

    pub fn export(&self) -> Su1nExport {
        let mut subspaces = BTreeMap::new();
        for (name, s) in [
            ("a", &self.a_space),
            ("k", &self.k_space),
            ("m", &self.m_space),
            ("n", &self.n_space),
            ("p", &self.p_space),
            ("s", &self.s_space),
        ] {
            subspaces.insert(name.to_string(), s.basis().to_vec());
        }
        Su1nExport {
            n: self.n_param,
            algebra: self.algebra.to_json(),
            sigma: self.sigma.clone(),
            subspaces,
            roots: self
                .roots
                .iter()
                .map(|r| RootJson {
                    name: r.name.clone(),
                    lambda: r.lambda_of_h[0].clone(),
                    dim: r.space.dim(),
                    h_lambda: r.h_lambda.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootJson {
    pub name: String,
    pub lambda: Scalar,
    pub dim: usize,
    pub h_lambda: Vector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Su1nExport {
    #[serde(rename = "N")]
    pub n: usize,
    pub algebra: AlgebraJson,
    pub sigma: Matrix,
    pub subspaces: BTreeMap<String, Vec<Vector>>,
    pub roots: Vec<RootJson>,
}
