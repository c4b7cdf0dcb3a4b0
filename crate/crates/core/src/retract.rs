//! Retract equations: the operators `D_X = (1/2ν)[μ_X, −]★` for `X ∈ k`,
//! the closure and radial reductions, and an evaluator for the Fourier-side
//! PDE in the variables `(a, r, ξ)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::{fundamental_field, QmmTable};
use crate::error::{Error, Result};
use crate::lie::Subspace;
use crate::linalg::Vector;
use crate::scalar::{GScalar, Scalar};
use crate::star::{star_bracket, CoefFn, Monomial, NuSeries, NuSeriesJson, PoissonStructure};
use crate::su1n::Su1nModel;

/// Candidate kernel on the polynomial-exponential subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelCandidate {
    pub value: NuSeries,
    pub radial: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateJson {
    pub value: NuSeriesJson,
    #[serde(default)]
    pub radial: bool,
}

impl KernelCandidate {
    /// Fails if `radial` is declared but the v-dependence is not through `|v|²`.
    pub fn new(value: NuSeries, radial: bool) -> Result<Self> {
        if radial && !value.coeffs().iter().all(is_radial) {
            return Err(Error::Input(
                "candidate declared radial depends on v other than through (v|v)".into(),
            ));
        }
        Ok(KernelCandidate { value, radial })
    }

    pub fn to_json(&self) -> CandidateJson {
        CandidateJson {
            value: self.value.to_json(),
            radial: self.radial,
        }
    }

    pub fn from_json(j: &CandidateJson) -> Result<Self> {
        Self::new(NuSeries::from_json(&j.value)?, j.radial)
    }
}

/// Syntactic check: every `(p, k, q)`-slice is a multiple of a power of `|v|²`.
pub fn is_radial(f: &CoefFn) -> bool {
    let nv = f.nv();
    let mut slices: BTreeMap<(u32, i32, u32, u32), CoefFn> = BTreeMap::new();
    for (m, c) in f.terms() {
        let key = (m.p, m.k, m.q, m.v_degree());
        let mut vm = Monomial::one(nv);
        vm.alpha = m.alpha.clone();
        let e = slices.entry(key).or_insert_with(|| CoefFn::zero(nv));
        *e = e.add(&CoefFn::monomial(c.clone(), vm));
    }
    let mut vsq = CoefFn::zero(nv);
    for k in 0..nv {
        vsq = vsq.add(&CoefFn::v(nv, k).pow(2));
    }
    slices.into_iter().all(|((_, _, _, d), g)| {
        if d % 2 == 1 {
            return false;
        }
        let base = vsq.pow(d / 2);
        let (m0, c0) = base.terms().iter().next().expect("nonzero power");
        let ratio = match g.terms().get(m0) {
            Some(c) => c / c0,
            None => return false,
        };
        base.scale(&ratio) == g
    })
}

/// `v ↦ (1/2ν)[μ_X, v]★` truncated at `ν^k`.
#[derive(Clone, Debug)]
pub struct RetractOperator {
    pub mu: NuSeries,
    pub pstr: PoissonStructure,
    pub k: usize,
}

impl RetractOperator {
    pub fn apply(&self, v: &NuSeries) -> NuSeries {
        star_bracket(&self.mu, &v.with_order(self.k), &self.pstr, self.k)
    }
}

fn check_in_k(model: &Su1nModel, x: &[Scalar]) -> Result<()> {
    crate::error::check_len(model.dim(), x.len())?;
    if !model.k_space.contains(x) {
        return Err(Error::Input(
            "retract operators are defined for X ∈ k".into(),
        ));
    }
    Ok(())
}

pub fn retract_operator(
    model: &Su1nModel,
    x: &[Scalar],
    table: &QmmTable,
    k: usize,
) -> Result<RetractOperator> {
    check_in_k(model, x)?;
    Ok(RetractOperator {
        mu: table.mu_of(x, k)?,
        pstr: table.poisson()?,
        k,
    })
}

/// `D_X(v)`; zero iff the candidate solves the equation for `X`.
pub fn residual(
    model: &Su1nModel,
    x: &[Scalar],
    v: &KernelCandidate,
    table: &QmmTable,
    k: usize,
) -> Result<NuSeries> {
    Ok(retract_operator(model, x, table, k)?.apply(&v.value))
}

/// Residuals on the labeled basis of `k`.
pub fn residuals_on_k(
    model: &Su1nModel,
    v: &KernelCandidate,
    table: &QmmTable,
    k: usize,
) -> Result<Vec<(String, NuSeries)>> {
    model
        .k_basis()
        .par_iter()
        .map(|(l, x)| Ok((l.clone(), residual(model, x, v, table, k)?)))
        .collect()
}

/// Element of `k` by its label in [`Su1nModel::k_basis`].
pub fn k_element(model: &Su1nModel, label: &str) -> Result<Vector> {
    model
        .k_basis()
        .into_iter()
        .find(|(l, _)| l == label)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::Input(format!("unknown k label {label}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WClosureReport {
    pub ad_stable: bool,
    pub generates: bool,
    pub dim_w: usize,
    pub dim_generated: usize,
    pub ambient: usize,
    pub ok: bool,
}

/// `W = s ⊕ m ⊕ g_{-λ}`
pub fn w_space(model: &Su1nModel) -> Subspace {
    let l = model.layout;
    let idx = (0..l.s_dim())
        .chain((0..l.m_dim).map(|i| l.m(i)))
        .chain((0..2 * l.n).map(|k| l.sv(k)));
    model.span_of(idx)
}

pub fn check_w_closure(model: &Su1nModel) -> Result<WClosureReport> {
    if model.n_param < 2 {
        return Err(Error::Precondition("W-closure needs N ≥ 2".into()));
    }
    Ok(check_w_closure_for(model, &w_space(model)))
}

/// `ad_s(W) ⊆ W` and `[W, W] + W = g`.
pub fn check_w_closure_for(model: &Su1nModel, w: &Subspace) -> WClosureReport {
    let s = &model.s_space;
    let ad_stable = model.algebra.bracket_span(s, w).is_subspace_of(w);
    let gen = model.algebra.bracket_span(w, w).sum(w);
    let generates = gen.dim() == model.dim();
    WClosureReport {
        ad_stable,
        generates,
        dim_w: w.dim(),
        dim_generated: gen.dim(),
        ambient: model.dim(),
        ok: ad_stable && generates,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialReport {
    pub is_m_invariant: bool,
    pub syntactically_radial: bool,
    pub failing: Vec<String>,
}

/// `Y⋆(v) = 0` for every basis vector `Y ∈ m`.
pub fn radial_reduce(v: &KernelCandidate, model: &Su1nModel) -> Result<RadialReport> {
    if model.n_param < 2 {
        return Err(Error::Precondition("radial reduction needs N ≥ 2".into()));
    }
    let l = model.layout;
    let mut failing = Vec::new();
    for i in 0..l.m_dim {
        let f = fundamental_field(model, &model.unit(l.m(i)))?;
        if !v.value.coeffs().iter().all(|c| f.apply(c).is_zero()) {
            failing.push(model.algebra.labels()[l.m(i)].clone());
        }
    }
    Ok(RadialReport {
        is_m_invariant: failing.is_empty(),
        syntactically_radial: v.value.coeffs().iter().all(is_radial),
        failing,
    })
}

/// Key `(k, m, n, s2)` of `e^{ka} r^m ξ^n (1-ν²ξ²)^{s2/2}`.
pub type XiKey = (i32, i32, i32, i32);

/// Finite sum of `e^{ka} r^m ξ^n (1-ν²ξ²)^{s2/2}` with Gaussian-rational
/// ν-series coefficients, truncated at `ν^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiFn {
    order: usize,
    terms: BTreeMap<XiKey, Vec<GScalar>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiTermJson {
    pub k: i32,
    pub m: i32,
    pub n: i32,
    pub s2: i32,
    pub coeffs: Vec<GScalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiFnJson {
    pub order: usize,
    pub terms: Vec<XiTermJson>,
}

fn series_is_zero(c: &[GScalar]) -> bool {
    c.iter().all(GScalar::is_zero)
}

impl XiFn {
    pub fn zero(order: usize) -> Self {
        XiFn {
            order,
            terms: BTreeMap::new(),
        }
    }

    /// `c · e^{ka} r^m ξ^n (1-ν²ξ²)^{s2/2}` with a ν-constant coefficient.
    pub fn term(order: usize, key: XiKey, c: GScalar) -> Self {
        let mut coeffs = vec![GScalar::zero(); order + 1];
        coeffs[0] = c;
        let mut f = XiFn::zero(order);
        f.add_term(key, coeffs);
        f
    }

    pub fn constant(order: usize, c: GScalar) -> Self {
        Self::term(order, (0, 0, 0, 0), c)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<XiKey, Vec<GScalar>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: XiKey, mut c: Vec<GScalar>) {
        c.resize(self.order + 1, GScalar::zero());
        let e = self
            .terms
            .entry(key)
            .or_insert_with(|| vec![GScalar::zero(); self.order + 1]);
        for (a, b) in e.iter_mut().zip(&c) {
            *a = &*a + b;
        }
        if series_is_zero(e) {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &XiFn) -> XiFn {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(*k, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &XiFn) -> XiFn {
        self.add(&o.scale(&GScalar::from_ints(-1, 0)))
    }

    pub fn scale(&self, s: &GScalar) -> XiFn {
        let mut r = XiFn::zero(self.order);
        for (k, c) in &self.terms {
            r.add_term(*k, c.iter().map(|x| x * s).collect());
        }
        r
    }

    pub fn mul(&self, o: &XiFn) -> XiFn {
        let order = self.order.min(o.order);
        let mut r = XiFn::zero(order);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                let key = (k1.0 + k2.0, k1.1 + k2.1, k1.2 + k2.2, k1.3 + k2.3);
                let mut c = vec![GScalar::zero(); order + 1];
                for (i, x) in c1.iter().enumerate().take(order + 1) {
                    for (j, y) in c2.iter().enumerate().take(order + 1 - i) {
                        c[i + j] = &c[i + j] + &(x * y);
                    }
                }
                r.add_term(key, c);
            }
        }
        r
    }

    /// Multiplication by `ν^s`.
    fn shift(c: &[GScalar], s: usize) -> Vec<GScalar> {
        let mut out = vec![GScalar::zero(); c.len()];
        for i in 0..c.len() {
            if i + s < c.len() {
                out[i + s] = c[i].clone();
            }
        }
        out
    }

    pub fn d_a(&self) -> XiFn {
        let mut r = XiFn::zero(self.order);
        for (k, c) in &self.terms {
            let f = Scalar::from_int(k.0 as i64);
            r.add_term(*k, c.iter().map(|x| x.scale(&f)).collect());
        }
        r
    }

    pub fn d_r(&self) -> XiFn {
        let mut r = XiFn::zero(self.order);
        for (k, c) in &self.terms {
            let f = Scalar::from_int(k.1 as i64);
            r.add_term(
                (k.0, k.1 - 1, k.2, k.3),
                c.iter().map(|x| x.scale(&f)).collect(),
            );
        }
        r
    }

    /// `∂_ξ(ξ^n W^{s2/2}) = nξ^{n-1}W^{s2/2} - s2·ν²ξ^{n+1}W^{(s2-2)/2}`
    pub fn d_xi(&self) -> XiFn {
        let mut r = XiFn::zero(self.order);
        for (k, c) in &self.terms {
            let n = Scalar::from_int(k.2 as i64);
            r.add_term(
                (k.0, k.1, k.2 - 1, k.3),
                c.iter().map(|x| x.scale(&n)).collect(),
            );
            if k.3 != 0 {
                let s = Scalar::from_int(-(k.3 as i64));
                let sh = Self::shift(c, 2);
                r.add_term(
                    (k.0, k.1, k.2 + 1, k.3 - 2),
                    sh.iter().map(|x| x.scale(&s)).collect(),
                );
            }
        }
        r
    }

    /// Normal form with `(1-ν²ξ²)^{s2/2}` expanded as a binomial ν-series.
    pub fn expand(&self) -> XiFn {
        let mut r = XiFn::zero(self.order);
        for (k, c) in &self.terms {
            let h = Scalar::frac(k.3 as i64, 2);
            // binom(h, j) (-1)^j ν^{2j} ξ^{2j}
            let mut b = Scalar::one();
            let mut j = 0usize;
            while 2 * j <= self.order {
                let coef = if j % 2 == 0 { b.clone() } else { -&b };
                let sh = Self::shift(c, 2 * j);
                if !coef.is_zero() {
                    r.add_term(
                        (k.0, k.1, k.2 + 2 * j as i32, 0),
                        sh.iter().map(|x| x.scale(&coef)).collect(),
                    );
                }
                b = b * (&h - Scalar::from_int(j as i64)) / Scalar::from_int(j as i64 + 1);
                j += 1;
            }
        }
        r
    }

    /// Equality after expansion.
    pub fn equivalent(&self, o: &XiFn) -> bool {
        self.sub(o).expand().is_zero()
    }

    /// The ν⁰ coefficient with `W = 1`, as `(k, m, n) → value`.
    pub fn nu0(&self) -> BTreeMap<(i32, i32, i32), GScalar> {
        let mut out: BTreeMap<(i32, i32, i32), GScalar> = BTreeMap::new();
        for (k, c) in &self.expand().terms {
            if !c[0].is_zero() {
                let e = out.entry((k.0, k.1, k.2)).or_insert_with(GScalar::zero);
                *e = &*e + &c[0];
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn to_json(&self) -> XiFnJson {
        XiFnJson {
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| XiTermJson {
                    k: k.0,
                    m: k.1,
                    n: k.2,
                    s2: k.3,
                    coeffs: c.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &XiFnJson) -> Result<Self> {
        let mut f = XiFn::zero(j.order);
        for t in &j.terms {
            if t.coeffs.len() > j.order + 1 {
                return Err(Error::Input(
                    "coefficient series longer than the order".into(),
                ));
            }
            f.add_term((t.k, t.m, t.n, t.s2), t.coeffs.clone());
        }
        Ok(f)
    }
}

/// Residual of the Fourier-side equation split along its two markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierResidual {
    /// coefficient of `(w|v)`
    pub inner: XiFn,
    /// coefficient of `Ω(w, v)`
    pub omega: XiFn,
}

impl FourierResidual {
    pub fn is_zero(&self) -> bool {
        self.inner.expand().is_zero() && self.omega.expand().is_zero()
    }
}

/// Applies the displayed operator to `ϑ(a, r, ξ)`; `n` is the dimension
/// parameter entering through `2n − 3`.
pub fn fourier_residual(theta: &XiFn, n: i64, order: usize) -> FourierResidual {
    let t = theta.expand();
    let t = if t.order() > order {
        let mut c = XiFn::zero(order);
        for (k, v) in t.terms() {
            c.add_term(*k, v[..=order].to_vec());
        }
        c
    } else {
        t
    };
    let o = t.order();
    let g = |re: i64, im: i64| GScalar::from_ints(re, im);
    let q = |re: Scalar, im: Scalar| GScalar::new(re, im);
    let mono = |k: i32, m: i32, xn: i32, s2: i32, c: GScalar| XiFn::term(o, (k, m, xn, s2), c);
    let one = mono(0, 0, 0, 0, g(1, 0));
    let s = mono(0, 0, 0, 1, g(1, 0));
    let one_p_s = one.add(&s);
    let m1_p_s = s.sub(&one);
    let two_n3 = Scalar::from_int(2 * n - 3);

    let tr = t.d_r();
    let trr = tr.d_r();
    let trrr = trr.d_r();
    let ta = t.d_a();
    let tx = t.d_xi();
    let tar = tr.d_a();
    let txr = tr.d_xi();

    // (w|v) part
    let l1 = mono(1, 0, 1, 0, g(0, 1))
        .mul(
            &one_p_s
                .mul(&mono(0, 2, 0, 0, g(1, 0)))
                .add(&mono(0, 0, 0, 0, g(2, 0)))
                .add(&mono(-1, 0, 1, 0, g(0, 2))),
        )
        .mul(&t);
    let l7 = mono(1, 0, -1, 0, g(0, -1))
        .mul(&m1_p_s)
        .mul(&trr.add(&mono(0, -1, 0, 0, q(two_n3.clone(), Scalar::zero())).mul(&tr)));
    let l8 = mono(1, 0, -1, 0, g(0, 2)).mul(&m1_p_s).mul(&trr);
    let l9 = mono(1, -1, -1, 0, g(0, -2)).mul(&m1_p_s).mul(&tr);
    let l10 = mono(1, -1, -1, 0, g(0, -2)).mul(&m1_p_s).mul(&tar);
    let l11 = mono(1, -1, 0, 1, g(0, -4)).mul(&txr);
    let inner = l1.add(&l7).add(&l8).add(&l9).add(&l10).add(&l11);

    // Ω(w, v) part
    let l2 = mono(1, 0, 0, 0, g(-1, 0)).mul(&one_p_s).mul(&t);
    let l3 = mono(1, 0, 0, 0, g(-1, 0)).mul(&one_p_s).mul(&ta);
    let l4 = mono(1, 0, 0, 0, g(1, 0))
        .mul(&m1_p_s)
        .sub(&mono(-1, -1, 0, 0, g(1, 0)))
        .mul(&mono(0, 1, 0, 0, g(1, 0)))
        .mul(&tr);
    let l5 = mono(1, -1, 0, 0, q(Scalar::frac(1, 2), Scalar::zero()))
        .mul(
            &one_p_s
                .mul(&mono(0, 2, 0, 0, g(1, 0)))
                .add(&mono(0, 0, 0, 0, g(2, 0))),
        )
        .mul(&tr);
    let l6 = mono(1, 0, 1, 1, g(-2, 0)).mul(&tx);
    let pref = mono(1, -1, -2, 0, q(Scalar::frac(-1, 2), Scalar::zero())).mul(&m1_p_s);
    let l12 = pref.mul(
        &mono(0, -1, 0, 0, q(two_n3.clone(), Scalar::zero()))
            .mul(&trr)
            .sub(&mono(0, -2, 0, 0, q(two_n3, Scalar::zero())).mul(&tr)),
    );
    let l13 = pref.mul(&trrr);
    let omega = l2.add(&l3).add(&l4).add(&l5).add(&l6).add(&l12).add(&l13);

    FourierResidual {
        inner: inner.expand(),
        omega: omega.expand(),
    }
}

/// Number of displayed term groups transcribed in [`fourier_residual`].
pub const FOURIER_TERM_GROUPS: usize = 13;

/// `[D_X, D_Y] v − D_{[X,Y]} v` through `ν^k`.
pub fn commutator_defect(
    model: &Su1nModel,
    x: &[Scalar],
    y: &[Scalar],
    v: &NuSeries,
    table: &QmmTable,
    k: usize,
) -> Result<NuSeries> {
    let dx = retract_operator(model, x, table, k)?;
    let dy = retract_operator(model, y, table, k)?;
    let xy = model.algebra.br(x, y);
    let dxy = retract_operator(model, &xy, table, k)?;
    let lhs = dx.apply(&dy.apply(v)).sub(&dy.apply(&dx.apply(v)));
    Ok(lhs.sub(&dxy.apply(v)))
}
