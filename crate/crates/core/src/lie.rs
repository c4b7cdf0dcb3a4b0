//! Finite-dimensional real Lie algebras given by sparse structure constants,
//! plus canonical subspaces.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, axpy, is_zero_vec, zero_vec, Matrix, Vector};
use crate::scalar::Scalar;

/// Sparse vector: `(basis index, coefficient)` with no zero coefficients.
pub type Sparse = Vec<(usize, Scalar)>;

/// Lie algebra as a labeled basis and the table `[e_i, e_j]` for `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    labels: Vec<String>,
    structure: BTreeMap<(usize, usize), Sparse>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiReport {
    pub ok: bool,
    pub worst_triple: Option<(usize, usize, usize)>,
}

fn sparse_from_dense(v: &[Scalar]) -> Sparse {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

impl LieAlgebra {
    /// Builds an algebra and validates it, including the Jacobi identity.
    pub fn new(labels: Vec<String>, structure: BTreeMap<(usize, usize), Vector>) -> Result<Self> {
        let alg = Self::new_unchecked(labels, structure)?;
        let rep = alg.check_jacobi();
        match rep.worst_triple {
            Some(t) if !rep.ok => Err(Error::Jacobi(t)),
            _ => Ok(alg),
        }
    }

    /// Builds an algebra checking only shape (labels, index ranges), not Jacobi.
    pub fn new_unchecked(
        labels: Vec<String>,
        structure: BTreeMap<(usize, usize), Vector>,
    ) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(Error::Input("algebra must have positive dimension".into()));
        }
        let uniq: BTreeSet<&String> = labels.iter().collect();
        if uniq.len() != dim {
            return Err(Error::Input("basis labels must be unique".into()));
        }
        let mut table = BTreeMap::new();
        for ((i, j), v) in structure {
            if i >= j || j >= dim {
                return Err(Error::Input(format!("invalid bracket key ({i},{j})")));
            }
            check_len(dim, v.len())?;
            let sp = sparse_from_dense(&v);
            if !sp.is_empty() {
                table.insert((i, j), sp);
            }
        }
        Ok(LieAlgebra {
            dim,
            labels,
            structure: table,
        })
    }

    /// Abelian algebra with the given labels.
    pub fn abelian(labels: Vec<String>) -> Result<Self> {
        Self::new(labels, BTreeMap::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Stored table entries `[e_i, e_j]`, `i < j`, dense.
    pub fn structure_dense(&self) -> BTreeMap<(usize, usize), Vector> {
        self.structure
            .iter()
            .map(|(&k, sp)| {
                let mut v = zero_vec(self.dim);
                for (i, x) in sp {
                    v[*i] = x.clone();
                }
                (k, v)
            })
            .collect()
    }

    /// Returns a copy with `[e_i, e_j]` replaced (no validation); used for mutation tests.
    pub fn with_entry_unchecked(&self, i: usize, j: usize, value: Vector) -> Self {
        let mut out = self.clone();
        let (i, j, value) = if i < j {
            (i, j, value)
        } else {
            (j, i, value.iter().map(|x| -x).collect())
        };
        let sp = sparse_from_dense(&value);
        if sp.is_empty() {
            out.structure.remove(&(i, j));
        } else {
            out.structure.insert((i, j), sp);
        }
        out
    }

    /// `[e_i, e_j]` as a dense vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        let mut out = zero_vec(self.dim);
        self.add_bracket_basis(&mut out, &Scalar::one(), i, j);
        out
    }

    fn add_bracket_basis(&self, acc: &mut [Scalar], coef: &Scalar, i: usize, j: usize) {
        if i == j {
            return;
        }
        let (key, sign) = if i < j { ((i, j), 1) } else { ((j, i), -1) };
        if let Some(sp) = self.structure.get(&key) {
            let c = if sign > 0 { coef.clone() } else { -coef };
            for (k, x) in sp {
                acc[*k] += &(&c * x);
            }
        }
    }

    /// Bracket of coefficient vectors.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vector> {
        check_len(self.dim, x.len())?;
        check_len(self.dim, y.len())?;
        Ok(self.br(x, y))
    }

    /// Bracket without dimension checks; panics on mismatch.
    pub fn br(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut out = zero_vec(self.dim);
        for (&(i, j), sp) in &self.structure {
            let c = &x[i] * &y[j] - &x[j] * &y[i];
            if c.is_zero() {
                continue;
            }
            for (k, v) in sp {
                out[*k] += &(&c * v);
            }
        }
        out
    }

    /// Matrix of `ad_X` (column `j` is `[X, e_j]`).
    pub fn ad(&self, x: &[Scalar]) -> Matrix {
        let mut m = vec![zero_vec(self.dim); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..self.dim {
                let col = self.bracket_basis(i, j);
                for (r, c) in col.iter().enumerate() {
                    if !c.is_zero() {
                        m[r][j] += &(xi * c);
                    }
                }
            }
        }
        m
    }

    fn jacobiator(&self, i: usize, j: usize, k: usize) -> Vector {
        let e = |n: usize| linalg::unit_vec(self.dim, n);
        let mut out = zero_vec(self.dim);
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            let ab = self.bracket_basis(a, b);
            let t = self.br(&ab, &e(c));
            axpy(&mut out, &Scalar::one(), &t);
        }
        out
    }

    /// Exact Jacobi check over all basis triples `i < j < k`.
    pub fn check_jacobi(&self) -> JacobiReport {
        let mut worst: Option<((usize, usize, usize), Scalar)> = None;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in j + 1..self.dim {
                    let jac = self.jacobiator(i, j, k);
                    if is_zero_vec(&jac) {
                        continue;
                    }
                    let size: Scalar = jac.iter().map(Scalar::abs).sum();
                    if worst.as_ref().is_none_or(|(_, w)| size > *w) {
                        worst = Some(((i, j, k), size));
                    }
                }
            }
        }
        JacobiReport {
            ok: worst.is_none(),
            worst_triple: worst.map(|(t, _)| t),
        }
    }

    /// `trace(ad_X ∘ ad_Y)`
    pub fn killing_form(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let ax = self.ad(x);
        let ay = self.ad(y);
        let mut t = Scalar::zero();
        for i in 0..self.dim {
            for k in 0..self.dim {
                if !ax[i][k].is_zero() && !ay[k][i].is_zero() {
                    t += &(&ax[i][k] * &ay[k][i]);
                }
            }
        }
        t
    }

    /// Gram matrix of the Killing form on the basis.
    pub fn killing_matrix(&self) -> Matrix {
        let ads: Vec<Matrix> = (0..self.dim)
            .map(|i| self.ad(&linalg::unit_vec(self.dim, i)))
            .collect();
        let n = self.dim;
        let mut g = vec![zero_vec(n); n];
        for a in 0..n {
            for b in a..n {
                let mut t = Scalar::zero();
                for i in 0..n {
                    for k in 0..n {
                        if !ads[a][i][k].is_zero() && !ads[b][k][i].is_zero() {
                            t += &(&ads[a][i][k] * &ads[b][k][i]);
                        }
                    }
                }
                g[a][b] = t.clone();
                g[b][a] = t;
            }
        }
        g
    }

    pub fn derived_subalgebra(&self) -> Subspace {
        let vecs: Vec<Vector> = self.structure_dense().into_values().collect();
        Subspace::span(self.dim, &vecs)
    }

    pub fn center(&self) -> Subspace {
        self.centralizer(&Subspace::full(self.dim))
    }

    /// `{X : [X, s] = 0 for all s ∈ S}`
    pub fn centralizer(&self, s: &Subspace) -> Subspace {
        let n = self.dim;
        let mut rows = Vec::new();
        for b in s.basis() {
            // coefficient of e_k in [X, b] as a linear functional of X
            let cols: Vec<Vector> = (0..n)
                .map(|i| self.br(&linalg::unit_vec(n, i), b))
                .collect();
            for k in 0..n {
                rows.push((0..n).map(|i| cols[i][k].clone()).collect());
            }
        }
        Subspace::span(n, &linalg::nullspace(&rows, n))
    }

    /// `{X : [X, S] ⊆ S}`
    pub fn normalizer(&self, s: &Subspace) -> Subspace {
        let n = self.dim;
        let ann = s.annihilator();
        let mut rows = Vec::new();
        for b in s.basis() {
            let cols: Vec<Vector> = (0..n)
                .map(|i| self.br(&linalg::unit_vec(n, i), b))
                .collect();
            for f in &ann {
                rows.push((0..n).map(|i| linalg::dot(f, &cols[i])).collect());
            }
        }
        Subspace::span(n, &linalg::nullspace(&rows, n))
    }

    /// `span{[X, Y] : X ∈ A, Y ∈ B}`
    pub fn bracket_span(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut vecs = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                vecs.push(self.br(x, y));
            }
        }
        Subspace::span(self.dim, &vecs)
    }

    /// Algebra in a new basis given by the rows of `basis`, which must span a
    /// subalgebra. Brackets are re-expressed in the new basis.
    pub fn restrict(&self, basis: &[Vector], labels: Vec<String>) -> Result<Self> {
        check_len(basis.len(), labels.len())?;
        let m = basis.len();
        let cols = linalg::transpose(&basis.to_vec(), self.dim);
        let mut structure = BTreeMap::new();
        for i in 0..m {
            for j in i + 1..m {
                let b = self.br(&basis[i], &basis[j]);
                if is_zero_vec(&b) {
                    continue;
                }
                let c = linalg::solve(&cols, &b, m).ok_or_else(|| {
                    Error::Input(format!("span not closed under bracket at ({i},{j})"))
                })?;
                structure.insert((i, j), c);
            }
        }
        Self::new(labels, structure)
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            dim: self.dim,
            labels: self.labels.clone(),
            brackets: self
                .structure
                .iter()
                .map(|(&(i, j), sp)| BracketEntry {
                    i,
                    j,
                    coeffs: sp.iter().map(|(k, x)| (k.to_string(), x.clone())).collect(),
                })
                .collect(),
        }
    }

    /// Parses and validates (Jacobi included).
    pub fn from_json(j: &AlgebraJson) -> Result<Self> {
        let alg = Self::from_json_unchecked(j)?;
        Self::new(alg.labels.clone(), alg.structure_dense())
    }

    /// Parses checking shape only; Jacobi is left to the caller.
    pub fn from_json_unchecked(j: &AlgebraJson) -> Result<Self> {
        if j.labels.len() != j.dim {
            return Err(Error::Input(format!(
                "dim {} but {} labels",
                j.dim,
                j.labels.len()
            )));
        }
        let mut structure: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
        for e in &j.brackets {
            if e.i >= e.j || e.j >= j.dim {
                return Err(Error::Input(format!(
                    "invalid bracket key ({},{})",
                    e.i, e.j
                )));
            }
            if structure.contains_key(&(e.i, e.j)) {
                return Err(Error::Input(format!("duplicate bracket ({},{})", e.i, e.j)));
            }
            let mut v = zero_vec(j.dim);
            for (k, x) in &e.coeffs {
                let k: usize = k
                    .parse()
                    .map_err(|_| Error::Input(format!("bad coefficient index {k:?}")))?;
                if k >= j.dim {
                    return Err(Error::Input(format!("coefficient index {k} out of range")));
                }
                v[k] = x.clone();
            }
            structure.insert((e.i, e.j), v);
        }
        Self::new_unchecked(j.labels.clone(), structure)
    }
}

/// Serialized algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    pub labels: Vec<String>,
    pub brackets: Vec<BracketEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<String, Scalar>,
}

/// Linear subspace of an `ambient`-dimensional coordinate space, stored in
/// reduced echelon form so equal subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn span(ambient: usize, vecs: &[Vector]) -> Self {
        let (basis, _) = linalg::rref(vecs, ambient);
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: linalg::identity(ambient),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        linalg::rank(&rows, self.ambient) == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &v)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        // x ∈ both  ⇔  annihilators of both vanish on x
        let mut rows = self.annihilator();
        rows.extend(other.annihilator());
        Subspace::span(self.ambient, &linalg::nullspace(&rows, self.ambient))
    }

    /// Basis of linear functionals vanishing on the subspace.
    pub fn annihilator(&self) -> Matrix {
        linalg::nullspace(&self.basis, self.ambient)
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        let cols = linalg::transpose(&self.basis, self.ambient);
        linalg::solve(&cols, v, self.dim())
    }

    /// Subspace image under a linear map given as a matrix acting on columns.
    pub fn image(&self, m: &Matrix) -> Subspace {
        let v: Vec<Vector> = self.basis.iter().map(|b| linalg::mat_vec(m, b)).collect();
        Subspace::span(m.len(), &v)
    }
}
