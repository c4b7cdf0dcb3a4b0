//! Pyatetskii-Shapiro solvable algebras `s(r; n_1..n_r)`.
//!
//! Blocks are laid out outermost first: `H_r, V_r, E_r, ..., H_1, V_1, E_1`,
//! each `V_j` in a symplectic basis `x_1..x_m, y_1..y_m` with
//! `Ω(x_i, y_i) = 1`.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::{self, unit_vec, zero_vec, Matrix, Vector};
use crate::scalar::Scalar;
use crate::su1n::Su1nModel;

/// Action of one basis element of block `k` on `V_j` (`j < k`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossEntry {
    /// index inside block `k`: 0 is `H_k`, then `V_k`, last is `E_k`
    pub source: usize,
    /// matrix on `V_j` coordinates, `[X, v] = M v`
    pub matrix: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossAction {
    pub j: usize,
    pub k: usize,
    pub action: Vec<CrossEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdSpec {
    pub r: usize,
    pub n: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cross_actions: Vec<CrossAction>,
}

impl PsdSpec {
    pub fn new(n: Vec<usize>) -> Self {
        PsdSpec {
            r: n.len(),
            n,
            cross_actions: Vec::new(),
        }
    }
}

/// Index data of block `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub j: usize,
    pub h: usize,
    pub e: usize,
    pub v: Range<usize>,
    pub omega: Matrix,
}

impl Block {
    pub fn range(&self) -> Range<usize> {
        self.h..self.e + 1
    }

    pub fn v_dim(&self) -> usize {
        self.v.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsdAlgebra {
    pub spec: PsdSpec,
    pub algebra: LieAlgebra,
    /// `blocks[j-1]` describes block `j`
    pub blocks: Vec<Block>,
}

/// Standard symplectic matrix `[[0, I], [-I, 0]]` of size `2m`.
pub fn standard_omega(m: usize) -> Matrix {
    let mut o = vec![zero_vec(2 * m); 2 * m];
    for i in 0..m {
        o[i][m + i] = Scalar::one();
        o[m + i][i] = Scalar::from_int(-1);
    }
    o
}

fn layout(n: &[usize]) -> Vec<Block> {
    let r = n.len();
    let mut blocks = vec![None; r];
    let mut at = 0;
    for j in (1..=r).rev() {
        let m = n[j - 1] - 1;
        let h = at;
        let v = h + 1..h + 1 + 2 * m;
        let e = v.end;
        blocks[j - 1] = Some(Block {
            j,
            h,
            e,
            v,
            omega: standard_omega(m),
        });
        at = e + 1;
    }
    blocks.into_iter().map(|b| b.expect("filled")).collect()
}

fn labels(n: &[usize]) -> Vec<String> {
    let mut out = Vec::new();
    for j in (1..=n.len()).rev() {
        let m = n[j - 1] - 1;
        out.push(format!("H{j}"));
        out.extend((1..=m).map(|i| format!("x{j}_{i}")));
        out.extend((1..=m).map(|i| format!("y{j}_{i}")));
        out.push(format!("E{j}"));
    }
    out
}

fn validate(spec: &PsdSpec) -> Result<()> {
    if spec.r == 0 || spec.n.len() != spec.r {
        return Err(Error::Input(format!(
            "r = {} but n has {} entries",
            spec.r,
            spec.n.len()
        )));
    }
    if spec.n.iter().any(|&x| x == 0) {
        return Err(Error::Input("every n_j must be positive".into()));
    }
    Ok(())
}

/// Builds the algebra without checking Jacobi.
pub fn build_psd_unchecked(spec: &PsdSpec) -> Result<PsdAlgebra> {
    validate(spec)?;
    let blocks = layout(&spec.n);
    let dim: usize = spec.n.iter().map(|x| 2 * x).sum();
    let mut t: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
    let two = Scalar::from_int(2);
    for b in &blocks {
        let m = b.v_dim() / 2;
        for p in b.v.clone() {
            t.insert((b.h, p), unit_vec(dim, p));
        }
        t.insert((b.h, b.e), linalg::scale_vec(&two, &unit_vec(dim, b.e)));
        for i in 0..m {
            t.insert((b.v.start + i, b.v.start + m + i), unit_vec(dim, b.e));
        }
    }
    for ca in &spec.cross_actions {
        if !(1 <= ca.j && ca.j < ca.k && ca.k <= spec.r) {
            return Err(Error::Input(format!(
                "cross action ({}, {}) needs 1 <= j < k <= r",
                ca.j, ca.k
            )));
        }
        let bj = &blocks[ca.j - 1];
        let bk = &blocks[ca.k - 1];
        let vd = bj.v_dim();
        for ent in &ca.action {
            let src = bk.h + ent.source;
            if src > bk.e {
                return Err(Error::Input(format!(
                    "cross action source {} outside block {}",
                    ent.source, ca.k
                )));
            }
            if ent.matrix.len() != vd || ent.matrix.iter().any(|r| r.len() != vd) {
                return Err(Error::Input(format!(
                    "cross action matrix must be {vd}x{vd} for block {}",
                    ca.j
                )));
            }
            for q in 0..vd {
                let mut col = zero_vec(dim);
                for p in 0..vd {
                    col[bj.v.start + p] = ent.matrix[p][q].clone();
                }
                let key = (src, bj.v.start + q);
                if t.insert(key, col).is_some() {
                    return Err(Error::Input(format!(
                        "duplicate cross action for source {} of block {}",
                        ent.source, ca.k
                    )));
                }
            }
        }
    }
    let algebra = LieAlgebra::new_unchecked(labels(&spec.n), t)?;
    Ok(PsdAlgebra {
        spec: spec.clone(),
        algebra,
        blocks,
    })
}

/// Builds and validates `s(r; n)`.
pub fn build_psd(spec: &PsdSpec) -> Result<PsdAlgebra> {
    let p = build_psd_unchecked(spec)?;
    let rep = p.algebra.check_jacobi();
    if let Some(t) = rep.worst_triple {
        return Err(Error::Jacobi(t));
    }
    Ok(p)
}

impl PsdAlgebra {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn block(&self, j: usize) -> &Block {
        &self.blocks[j - 1]
    }

    /// Basis indices of all blocks `k > j`.
    pub fn higher(&self, j: usize) -> Vec<usize> {
        (j + 1..=self.spec.r)
            .flat_map(|k| self.block(k).range())
            .collect()
    }

    pub fn block_table(&self) -> Vec<Block> {
        self.blocks.clone()
    }
}

/// Basis correspondence between `s(1; [N])` and the Iwasawa algebra of su(1,N).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoReport {
    pub ok: bool,
    /// psd label → image vector in model coordinates
    pub correspondence: Vec<(String, Vector)>,
    pub mismatches: Vec<String>,
}

/// Symplectic Gram-Schmidt: basis `u_1..u_m, w_1..w_m` of the span with
/// `form(u_i, w_i) = 1` and all other pairings zero.
fn symplectic_basis(
    vecs: &[Vector],
    form: impl Fn(&[Scalar], &[Scalar]) -> Scalar,
) -> Option<(Vec<Vector>, Vec<Vector>)> {
    let mut pool: Vec<Vector> = vecs.to_vec();
    let mut us = Vec::new();
    let mut ws = Vec::new();
    while let Some(u) = pool.first().cloned() {
        let pos = pool.iter().position(|w| !form(&u, w).is_zero())?;
        let w0 = pool[pos].clone();
        let w = linalg::scale_vec(&form(&u, &w0).recip(), &w0);
        let mut rest = Vec::new();
        for (i, x) in pool.iter().enumerate() {
            if i == 0 || i == pos {
                continue;
            }
            // x - Ω(x,w) u + Ω(x,u) w
            let mut y = x.clone();
            linalg::axpy(&mut y, &-form(x, &w), &u);
            linalg::axpy(&mut y, &form(x, &u), &w);
            rest.push(y);
        }
        us.push(u);
        ws.push(w);
        pool = rest;
    }
    Some((us, ws))
}

/// Matches `s(1; [N])` with `a ⊕ n` of the model: `H ↦ a`-generator scaled so
/// that it acts by 2 on `g_{2λ}`, `E ↦` a generator of `g_{2λ}`, `V ↦` a
/// symplectic basis of `g_λ` relative to `[u, w] = Ω(u, w) E`.
pub fn match_iwasawa(psd: &PsdAlgebra, model: &Su1nModel) -> Result<IsoReport> {
    if psd.spec.r != 1 {
        return Err(Error::Precondition("match_iwasawa needs rank 1".into()));
    }
    let n = psd.spec.n[0];
    if n != model.n_param {
        return Err(Error::Dimension {
            expected: 2 * model.n_param,
            got: psd.dim(),
        });
    }
    let d = model.dim();
    let alg = &model.algebra;
    let h0 = model.a_space.basis()[0].clone();
    let e = model.roots[0].space.basis()[0].clone();
    // scale H so that [H, E] = 2E
    let he = alg.br(&h0, &e);
    let k = e.iter().position(|x| !x.is_zero()).expect("E nonzero");
    let h = linalg::scale_vec(&(Scalar::from_int(2) * e[k].clone() / he[k].clone()), &h0);
    let form = |u: &[Scalar], w: &[Scalar]| {
        let b = alg.br(u, w);
        b[k].clone() / e[k].clone()
    };
    let (us, ws) = symplectic_basis(model.roots[1].space.basis(), form)
        .ok_or_else(|| Error::Precondition("g_λ bracket is degenerate".into()))?;
    let block = psd.block(1);
    let mut images: Vec<Vector> = vec![zero_vec(d); psd.dim()];
    images[block.h] = h;
    images[block.e] = e;
    let m = block.v_dim() / 2;
    for i in 0..m {
        images[block.v.start + i] = us[i].clone();
        images[block.v.start + m + i] = ws[i].clone();
    }
    let mut mismatches = Vec::new();
    for i in 0..psd.dim() {
        for j in i + 1..psd.dim() {
            let lhs = alg.br(&images[i], &images[j]);
            let c = psd.algebra.bracket_basis(i, j);
            let mut rhs = zero_vec(d);
            for (kk, x) in c.iter().enumerate() {
                linalg::axpy(&mut rhs, x, &images[kk]);
            }
            if lhs != rhs {
                mismatches.push(format!(
                    "[{}, {}]",
                    psd.algebra.labels()[i],
                    psd.algebra.labels()[j]
                ));
            }
        }
    }
    Ok(IsoReport {
        ok: mismatches.is_empty(),
        correspondence: psd.algebra.labels().iter().cloned().zip(images).collect(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su1n::build_su1n;

    fn e(p: &PsdAlgebra, i: usize) -> Vector {
        unit_vec(p.dim(), i)
    }

    #[test]
    fn rank_one_smallest() {
        let p = build_psd(&PsdSpec::new(vec![1])).unwrap();
        assert_eq!(p.dim(), 2);
        let b = p.block(1);
        let he = p.algebra.br(&e(&p, b.h), &e(&p, b.e));
        assert_eq!(he, linalg::scale_vec(&Scalar::from_int(2), &e(&p, b.e)));
    }

    #[test]
    fn rank_two_blocks_commute() {
        let p = build_psd(&PsdSpec::new(vec![1, 1])).unwrap();
        assert_eq!(p.dim(), 4);
        let (b1, b2) = (p.block(1), p.block(2));
        assert!(linalg::is_zero_vec(
            &p.algebra.br(&e(&p, b2.h), &e(&p, b1.h))
        ));
        assert!(linalg::is_zero_vec(
            &p.algebra.br(&e(&p, b2.h), &e(&p, b1.e))
        ));
        assert_eq!(p.algebra.labels()[0], "H2");
    }

    #[test]
    fn heisenberg_part() {
        let p = build_psd(&PsdSpec::new(vec![2])).unwrap();
        let b = p.block(1);
        let (x, y) = (b.v.start, b.v.start + 1);
        assert_eq!(p.algebra.br(&e(&p, x), &e(&p, y)), e(&p, b.e));
        assert_eq!(p.algebra.br(&e(&p, b.h), &e(&p, x)), e(&p, x));
    }

    #[test]
    fn bad_cross_action_is_rejected() {
        let mut spec = PsdSpec::new(vec![2, 1]);
        spec.cross_actions.push(CrossAction {
            j: 1,
            k: 2,
            action: vec![CrossEntry {
                source: 0,
                matrix: linalg::identity(2),
            }],
        });
        assert!(matches!(build_psd(&spec), Err(Error::Jacobi(_))));
    }

    #[test]
    fn symplectic_cross_action_is_accepted() {
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
        assert!(build_psd(&spec).is_ok());
    }

    #[test]
    fn malformed_specs() {
        assert!(build_psd(&PsdSpec {
            r: 2,
            n: vec![1],
            cross_actions: vec![]
        })
        .is_err());
        assert!(build_psd(&PsdSpec::new(vec![0])).is_err());
    }

    #[test]
    fn iwasawa_matches() {
        for n in 1..=3 {
            let p = build_psd(&PsdSpec::new(vec![n])).unwrap();
            let m = build_su1n(n).unwrap();
            let rep = match_iwasawa(&p, &m).unwrap();
            assert!(rep.ok, "{:?}", rep.mismatches);
        }
        let p = build_psd(&PsdSpec::new(vec![2])).unwrap();
        let m = build_su1n(3).unwrap();
        assert!(matches!(
            match_iwasawa(&p, &m),
            Err(Error::Dimension { .. })
        ));
    }
}
