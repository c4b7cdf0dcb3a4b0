//! The unit-ball model in the global chart `exp(aH) exp(v) exp(zE)`: group law,
//! fundamental fields of `s ⊕ m`, classical moment maps, calibration of the
//! chart conventions and the quantum moment map table on all of su(1,N).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::{self, Vector};
use crate::scalar::Scalar;
use crate::star::{star_bracket, CoefFn, NuSeries, NuSeriesJson, PoissonStructure};
use crate::su1n::{build_su1n, Su1nModel};

/// Chart point; the a-coordinate is stored as `e^a > 0` so that all group
/// operations stay rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartPoint {
    pub exp_a: Scalar,
    pub v: Vector,
    pub z: Scalar,
}

/// `Ω(u, w) = Σ u_{x_i} w_{y_i} - u_{y_i} w_{x_i}` with `v = (x_1..x_n, y_1..y_n)`.
pub fn omega(u: &[Scalar], w: &[Scalar]) -> Scalar {
    let n = u.len() / 2;
    let mut s = Scalar::zero();
    for i in 0..n {
        s += &(&u[i] * &w[n + i]);
        s -= &(&u[n + i] * &w[i]);
    }
    s
}

impl ChartPoint {
    pub fn new(exp_a: Scalar, v: Vector, z: Scalar) -> Result<Self> {
        if !exp_a.is_positive() {
            return Err(Error::Input("e^a must be positive".into()));
        }
        if v.len() % 2 != 0 {
            return Err(Error::Input("v must have even length".into()));
        }
        Ok(ChartPoint { exp_a, v, z })
    }

    pub fn identity(nv: usize) -> Self {
        ChartPoint {
            exp_a: Scalar::one(),
            v: linalg::zero_vec(nv),
            z: Scalar::zero(),
        }
    }

    pub fn inverse(&self) -> ChartPoint {
        ChartPoint {
            exp_a: self.exp_a.recip(),
            v: linalg::scale_vec(&-&self.exp_a, &self.v),
            z: -(&self.exp_a * &self.exp_a * &self.z),
        }
    }
}

/// Product `s1 · s2` in chart coordinates.
pub fn group_law(s1: &ChartPoint, s2: &ChartPoint) -> Result<ChartPoint> {
    check_len(s1.v.len(), s2.v.len())?;
    let inv2 = s2.exp_a.recip();
    let v = linalg::add_vec(&linalg::scale_vec(&inv2, &s1.v), &s2.v);
    let z = &s1.z * &inv2 * &inv2 + &s2.z + Scalar::frac(1, 2) * &inv2 * omega(&s1.v, &s2.v);
    Ok(ChartPoint {
        exp_a: &s1.exp_a * &s2.exp_a,
        v,
        z,
    })
}

/// Vector field with `CoefFn` components along `(∂_a, ∂_v, ∂_z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub components: Vec<CoefFn>,
}

impl VectorField {
    pub fn zero(nv: usize) -> Self {
        VectorField {
            components: vec![CoefFn::zero(nv); nv + 2],
        }
    }

    pub fn apply(&self, f: &CoefFn) -> CoefFn {
        let mut r = CoefFn::zero(f.nv());
        for (u, c) in self.components.iter().enumerate() {
            if !c.is_zero() {
                r = r.add(&c.mul(&f.deriv(u)));
            }
        }
        r
    }

    /// `[V, W] = V∘W - W∘V`
    pub fn bracket(&self, o: &VectorField) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&o.components)
                .map(|(v, w)| self.apply(w).sub(&o.apply(v)))
                .collect(),
        }
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField {
            components: self
                .components
                .iter()
                .zip(&o.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> VectorField {
        VectorField {
            components: self.components.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(CoefFn::is_zero)
    }
}

fn nv_of(model: &Su1nModel) -> usize {
    2 * model.layout.n
}

/// Dimension of `s ⊕ m` (its basis is the first block of the adapted basis).
pub fn sm_dim(model: &Su1nModel) -> usize {
    model.layout.s_dim() + model.layout.m_dim
}

/// `Ω(u, v)` with `v` the chart coordinates.
fn omega_fn(u: &[Scalar], nv: usize) -> CoefFn {
    let n = nv / 2;
    let mut f = CoefFn::zero(nv);
    for i in 0..n {
        f = f.add(&CoefFn::v(nv, n + i).scale(&u[i]));
        f = f.sub(&CoefFn::v(nv, i).scale(&u[n + i]));
    }
    f
}

/// `X⋆ = d/dt|₀ exp(-tX)·s` for `X ∈ s ⊕ m`.
pub fn fundamental_field(model: &Su1nModel, x: &[Scalar]) -> Result<VectorField> {
    check_len(model.dim(), x.len())?;
    let l = model.layout;
    let d0 = sm_dim(model);
    if x[d0..].iter().any(|c| !c.is_zero()) {
        return Err(Error::Unsupported(
            "fundamental fields are available on s ⊕ m only".into(),
        ));
    }
    let nv = nv_of(model);
    let h = &x[l.h()];
    let u: Vec<Scalar> = (0..nv).map(|k| x[l.v(k)].clone()).collect();
    let e = &x[l.e()];
    let mut ym = linalg::zero_vec(model.dim());
    for i in 0..l.m_dim {
        ym[l.m(i)] = x[l.m(i)].clone();
    }
    let mut f = VectorField::zero(nv);
    f.components[0] = CoefFn::constant(nv, -h);
    let em1 = CoefFn::exp_a(nv, -1);
    for j in 0..nv {
        f.components[1 + j] = em1.scale(&-&u[j]);
    }
    if !linalg::is_zero_vec(&ym) {
        for k in 0..nv {
            let b = model.algebra.br(&ym, &model.unit(l.v(k)));
            for j in 0..nv {
                let c = &b[l.v(j)];
                if !c.is_zero() {
                    f.components[1 + j] = f.components[1 + j].sub(&CoefFn::v(nv, k).scale(c));
                }
            }
        }
    }
    f.components[nv + 1] = CoefFn::exp_a(nv, -2)
        .scale(&-e)
        .sub(&em1.mul(&omega_fn(&u, nv)).scale(&Scalar::frac(1, 2)));
    Ok(f)
}

pub fn fundamental_field_basis(model: &Su1nModel, i: usize) -> Result<VectorField> {
    if i >= model.dim() {
        return Err(Error::Input(format!("basis index {i} out of range")));
    }
    fundamental_field(model, &model.unit(i))
}

/// Chart conventions fixed by calibration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    /// `Λ^{az}`; the v-block carries `Λ^{x_i y_i} = 2 c_omega`
    pub c_omega: Scalar,
    /// scale of `(v|v)` against the Euclidean norm; none when `v` is empty
    pub inner_scale: Option<Scalar>,
}

impl Conventions {
    /// The calibrated pair (see [`calibrate`]).
    pub fn standard(n_param: usize) -> Self {
        Conventions {
            c_omega: Scalar::frac(1, 2),
            inner_scale: (n_param > 1).then(|| Scalar::frac(1, 2)),
        }
    }

    pub fn poisson(&self, nv: usize) -> Result<PoissonStructure> {
        PoissonStructure::darboux(nv, &self.c_omega, &(Scalar::from_int(2) * &self.c_omega))
    }
}

/// Solves `ι_{X⋆}ω = -dλ`, i.e. `X⋆ = Λ^{uw} ∂_u λ ∂_w`, without constant
/// of integration.
pub fn classical_moment(model: &Su1nModel, x: &[Scalar], c_omega: &Scalar) -> Result<CoefFn> {
    let nv = nv_of(model);
    let field = fundamental_field(model, x)?;
    let conv = Conventions {
        c_omega: c_omega.clone(),
        inner_scale: None,
    };
    let p = conv.poisson(nv)?;
    let n = nv + 2;
    let lt = linalg::transpose(p.matrix(), n);
    let inv = linalg::inverse(&lt).expect("Poisson tensor is invertible");
    let grad: Vec<CoefFn> = (0..n)
        .map(|u| {
            let mut g = CoefFn::zero(nv);
            for w in 0..n {
                if !inv[u][w].is_zero() {
                    g = g.add(&field.components[w].scale(&inv[u][w]));
                }
            }
            g
        })
        .collect();
    integrate_gradient(&grad)
}

fn integrate_gradient(grad: &[CoefFn]) -> Result<CoefFn> {
    let nv = grad[0].nv();
    let mut f = CoefFn::zero(nv);
    for (u, g) in grad.iter().enumerate() {
        let rest = g.sub(&f.deriv(u));
        f = f.add(&rest.integrate(u));
    }
    for (u, g) in grad.iter().enumerate() {
        let res = f.deriv(u).sub(g);
        if !res.is_zero() {
            return Err(Error::NotIntegrable(format!(
                "residual 1-form component {u}: {res:?}"
            )));
        }
    }
    Ok(f)
}

/// λ on the basis of `s ⊕ m`, with constants fixed by `X⋆(λ_Y) = λ_{[X,Y]}`.
pub fn classical_moments(model: &Su1nModel, c_omega: &Scalar) -> Result<Vec<CoefFn>> {
    let d0 = sm_dim(model);
    let raw: Vec<CoefFn> = (0..d0)
        .map(|i| classical_moment(model, &model.unit(i), c_omega))
        .collect::<Result<_>>()?;
    let fields: Vec<VectorField> = (0..d0)
        .map(|i| fundamental_field_basis(model, i))
        .collect::<Result<_>>()?;
    let nv = nv_of(model);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..d0 {
        for j in 0..d0 {
            let b = model.algebra.bracket_basis(i, j);
            let mut lhs = fields[i].apply(&raw[j]);
            for (l, c) in b.iter().enumerate() {
                if !c.is_zero() {
                    lhs = lhs.sub(&raw[l].scale(c));
                }
            }
            let Some(k) = lhs.as_constant() else {
                return Err(Error::NotIntegrable(format!(
                    "equivariance defect on pair ({i}, {j}) is not constant: {lhs:?}"
                )));
            };
            rows.push(b[..d0].to_vec());
            rhs.push(k);
        }
    }
    let consts = linalg::solve(&rows, &rhs, d0).ok_or_else(|| {
        Error::NotIntegrable("no constants make the moment map equivariant".into())
    })?;
    Ok(raw
        .into_iter()
        .zip(consts)
        .map(|(f, c)| f.add(&CoefFn::constant(nv, c)))
        .collect())
}

/// Calibration candidate with its verdict at ν-orders 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationCandidate {
    pub conventions: Conventions,
    pub passed: bool,
    pub failing_pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub candidates: Vec<CalibrationCandidate>,
    pub passing: Vec<Conventions>,
}

/// `±1, ±2, ±1/2, ±1/4`
pub fn default_grid() -> Vec<Scalar> {
    let mut g = Vec::new();
    for (p, q) in [(1, 1), (2, 1), (1, 2), (1, 4)] {
        g.push(Scalar::frac(p, q));
        g.push(Scalar::frac(-p, q));
    }
    g
}

pub fn calibrate(n_param: usize) -> Result<CalibrationReport> {
    calibrate_with_grid(n_param, &default_grid(), &default_grid())
}

/// Exhaustive search over `c_omega × inner_scale`; fails if nothing passes.
pub fn calibrate_with_grid(
    n_param: usize,
    c_grid: &[Scalar],
    scale_grid: &[Scalar],
) -> Result<CalibrationReport> {
    let model = build_su1n(n_param)?;
    let scales: Vec<Option<Scalar>> = if n_param > 1 {
        scale_grid.iter().cloned().map(Some).collect()
    } else {
        vec![None]
    };
    let mut convs = Vec::new();
    for c in c_grid {
        for s in &scales {
            convs.push(Conventions {
                c_omega: c.clone(),
                inner_scale: s.clone(),
            });
        }
    }
    let nv = nv_of(&model);
    let candidates: Vec<CalibrationCandidate> = convs
        .into_par_iter()
        .map(|conv| {
            let alpha = NuSeries::constant(nv, Scalar::one(), 2);
            let failing_pairs = match build_qmm(&model, &alpha, &conv) {
                Ok(t) => verify_qmm(&t, 1)
                    .map(|r| r.failures().count())
                    .unwrap_or(usize::MAX),
                Err(_) => usize::MAX,
            };
            CalibrationCandidate {
                conventions: conv,
                passed: failing_pairs == 0,
                failing_pairs,
            }
        })
        .collect();
    let passing: Vec<Conventions> = candidates
        .iter()
        .filter(|c| c.passed)
        .map(|c| c.conventions.clone())
        .collect();
    if passing.is_empty() {
        return Err(Error::Calibration(candidates.len()));
    }
    Ok(CalibrationReport {
        candidates,
        passing,
    })
}

/// Quantum moment map on the adapted basis of su(1,N).
#[derive(Clone, Debug, PartialEq)]
pub struct QmmTable {
    pub n_param: usize,
    pub alpha: NuSeries,
    pub conventions: Conventions,
    pub labels: Vec<String>,
    pub mu: Vec<NuSeries>,
    pub algebra: LieAlgebra,
    /// basis indices of `s`
    pub s_indices: Vec<usize>,
}

/// Table mutations used by falsification tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// remove the `(N-1)ν²` term of `μ_{σ(E)}`
    DropNu2,
    /// `μ_i ↦ μ_i + ν·c`
    NuShift { index: usize, constant: Scalar },
    /// `μ_i ↦ factor·μ_i`
    Scale { index: usize, factor: Scalar },
}

/// `e^{ka}` times a function.
fn ek(nv: usize, k: i32, f: &CoefFn) -> CoefFn {
    CoefFn::exp_a(nv, k).mul(f)
}

fn nu2_term(model: &Su1nModel, order: usize) -> NuSeries {
    let nv = nv_of(model);
    let mut coeffs = vec![CoefFn::zero(nv); 3];
    coeffs[2] = CoefFn::exp_a(nv, 2).scale(&Scalar::from_int(model.layout.n as i64));
    NuSeries::from_coeffs(nv, coeffs, order)
}

/// Builds `μ` from the classical moments on `s ⊕ m` and the closed forms on
/// `σ(V) ⊕ ℝσ(E)`; `alpha` must be a ν-constant series.
pub fn build_qmm(model: &Su1nModel, alpha: &NuSeries, conv: &Conventions) -> Result<QmmTable> {
    let nv = nv_of(model);
    if alpha.nv() != nv && !alpha.is_zero() {
        return Err(Error::Dimension {
            expected: nv,
            got: alpha.nv(),
        });
    }
    if alpha.coeffs().iter().any(|c| c.as_constant().is_none()) {
        return Err(Error::Input("alpha must be a formal constant".into()));
    }
    let order = alpha.order().max(2);
    let alpha = NuSeries::from_coeffs(
        nv,
        alpha
            .coeffs()
            .iter()
            .map(|c| CoefFn::constant(nv, c.as_constant().expect("checked")))
            .collect(),
        order,
    );
    let l = model.layout;
    let lam = classical_moments(model, &conv.c_omega)?;
    let mut mu: Vec<NuSeries> = lam
        .iter()
        .map(|f| NuSeries::from_fn(f.clone(), order))
        .collect();
    if let Some(zi) = l.z() {
        mu[zi] = mu[zi].add(&alpha);
    }
    let scale = match (&conv.inner_scale, nv) {
        (_, 0) => Scalar::zero(),
        (Some(s), _) => s.clone(),
        (None, _) => return Err(Error::Input("inner scale required for N > 1".into())),
    };
    let mut vsq = CoefFn::zero(nv);
    for k in 0..nv {
        vsq = vsq.add(&CoefFn::v(nv, k).pow(2));
    }
    // (v|v) + α
    let shifted = NuSeries::from_fn(vsq.scale(&scale), order).add(&alpha);
    let z = CoefFn::z(nv);
    let four = Scalar::from_int(4);
    for k in 0..nv {
        let e0 = linalg::unit_vec(nv, k);
        let lin = CoefFn::v(nv, k).mul(&z).scale(&(&four * &scale));
        let om = omega_fn(&e0, nv);
        let m = NuSeries::from_fn(ek(nv, 1, &lin), order).sub(&shifted.mul_fn(&ek(nv, 1, &om)));
        debug_assert_eq!(mu.len(), l.sv(k));
        mu.push(m);
    }
    let se = NuSeries::from_fn(ek(nv, 2, &z.pow(2).scale(&four)), order)
        .add(&shifted.mul(&shifted).mul_fn(&CoefFn::exp_a(nv, 2)))
        .add(&nu2_term(model, order));
    mu.push(se);
    check_len(model.dim(), mu.len())?;
    Ok(QmmTable {
        n_param: model.n_param,
        alpha,
        conventions: conv.clone(),
        labels: model.algebra.labels().to_vec(),
        mu,
        algebra: model.algebra.clone(),
        s_indices: (0..l.s_dim()).collect(),
    })
}

/// Table with the standard conventions.
pub fn build_qmm_standard(n_param: usize, alpha: &Scalar) -> Result<QmmTable> {
    let model = build_su1n(n_param)?;
    let nv = nv_of(&model);
    build_qmm(
        &model,
        &NuSeries::constant(nv, alpha.clone(), 2),
        &Conventions::standard(n_param),
    )
}

impl QmmTable {
    pub fn nv(&self) -> usize {
        2 * (self.n_param - 1)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn poisson(&self) -> Result<PoissonStructure> {
        self.conventions.poisson(self.nv())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `μ` of an arbitrary element (linear extension).
    pub fn mu_of(&self, x: &[Scalar], order: usize) -> Result<NuSeries> {
        check_len(self.dim(), x.len())?;
        let mut r = NuSeries::zero(self.nv(), order);
        for (c, m) in x.iter().zip(&self.mu) {
            if !c.is_zero() {
                r = r.add(&m.scale(c));
            }
        }
        Ok(r)
    }

    pub fn mutate(&self, m: &Mutation) -> Result<QmmTable> {
        let mut t = self.clone();
        match m {
            Mutation::DropNu2 => {
                let model = build_su1n(self.n_param)?;
                let se = model.layout.se();
                let o = t.mu[se].order();
                t.mu[se] = t.mu[se].sub(&nu2_term(&model, o));
            }
            Mutation::NuShift { index, constant } => {
                let mu =
                    t.mu.get_mut(*index)
                        .ok_or_else(|| Error::Input(format!("basis index {index} out of range")))?;
                let o = mu.order();
                let shift = NuSeries::constant(self.nv(), constant.clone(), o).shift(1);
                *mu = mu.add(&shift);
            }
            Mutation::Scale { index, factor } => {
                let mu =
                    t.mu.get_mut(*index)
                        .ok_or_else(|| Error::Input(format!("basis index {index} out of range")))?;
                *mu = mu.scale(factor);
            }
        }
        Ok(t)
    }

    /// Order through which every star-commutator of the table terminates.
    pub fn natural_order(&self) -> usize {
        let dz = self.mu.iter().map(NuSeries::z_degree).max().unwrap_or(0) as usize;
        let dv = self.mu.iter().map(NuSeries::v_degree).max().unwrap_or(0) as usize;
        let dn = self.mu.iter().map(NuSeries::nu_degree).max().unwrap_or(0);
        2 * dz + dv + dn + 1
    }

    pub fn to_json(&self) -> QmmJson {
        QmmJson {
            n: self.n_param,
            alpha: self.alpha.to_json(),
            conventions: self.conventions.clone(),
            mu: self
                .labels
                .iter()
                .zip(&self.mu)
                .map(|(l, m)| (l.clone(), m.to_json()))
                .collect(),
        }
    }

    pub fn from_json(j: &QmmJson) -> Result<Self> {
        let model = build_su1n(j.n)?;
        let labels = model.algebra.labels().to_vec();
        check_len(labels.len(), j.mu.len())?;
        let mu = labels
            .iter()
            .map(|l| {
                let s =
                    j.mu.get(l)
                        .ok_or_else(|| Error::Input(format!("missing moment map for {l}")))?;
                NuSeries::from_json(s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QmmTable {
            n_param: j.n,
            alpha: NuSeries::from_json(&j.alpha)?,
            conventions: j.conventions.clone(),
            labels,
            mu,
            algebra: model.algebra.clone(),
            s_indices: (0..model.layout.s_dim()).collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QmmJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: NuSeriesJson,
    pub conventions: Conventions,
    pub mu: BTreeMap<String, NuSeriesJson>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck {
    pub pair: (String, String),
    pub ok: bool,
    /// the bracket series terminated within the truncation
    pub exact: bool,
    pub residual: NuSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QmmReport {
    pub ok: bool,
    pub exact: bool,
    pub order: usize,
    pub pairs: Vec<PairCheck>,
}

impl QmmReport {
    pub fn failures(&self) -> impl Iterator<Item = &PairCheck> {
        self.pairs.iter().filter(|p| !p.ok)
    }

    /// Lowest ν-order with a nonzero residual over all pairs.
    pub fn leading_residual_order(&self) -> Option<usize> {
        self.pairs
            .iter()
            .filter_map(|p| p.residual.leading_order())
            .min()
    }
}

/// `μ_{[X,Y]} = (1/2ν)[μ_X, μ_Y]★` on every basis pair, through `ν^k`.
pub fn verify_qmm(table: &QmmTable, k: usize) -> Result<QmmReport> {
    let all: Vec<usize> = (0..table.dim()).collect();
    verify_qmm_on(table, k, &all)
}

/// Same as [`verify_qmm`] restricted to pairs from `indices`.
pub fn verify_qmm_on(table: &QmmTable, k: usize, indices: &[usize]) -> Result<QmmReport> {
    let p = table.poisson()?;
    let mu: Vec<NuSeries> = table.mu.iter().map(|m| m.with_order(k)).collect();
    let pairs: Vec<(usize, usize)> = indices
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| indices[a + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let checks: Vec<PairCheck> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let lhs = star_bracket(&mu[i], &mu[j], &p, k);
            let br = table.algebra.bracket_basis(i, j);
            let mut rhs = NuSeries::zero(table.nv(), k);
            for (l, c) in br.iter().enumerate() {
                if !c.is_zero() {
                    rhs = rhs.add(&mu[l].scale(c));
                }
            }
            let residual = rhs.sub(&lhs).with_order(k);
            PairCheck {
                pair: (table.labels[i].clone(), table.labels[j].clone()),
                ok: residual.is_zero(),
                exact: lhs.exact,
                residual,
            }
        })
        .collect();
    Ok(QmmReport {
        ok: checks.iter().all(|c| c.ok),
        exact: checks.iter().all(|c| c.exact),
        order: k,
        pairs: checks,
    })
}

/// For `X ∈ a ⊕ Z(m)` the ν⁰-part of `μ_X` differs from λ_X by a constant.
pub fn check_constant_defect(model: &Su1nModel, table: &QmmTable) -> Result<bool> {
    let lam = classical_moments(model, &table.conventions.c_omega)?;
    let mut idx = vec![model.layout.h()];
    idx.extend(model.layout.z());
    Ok(idx
        .into_iter()
        .all(|i| table.mu[i].coeff(0).sub(&lam[i]).as_constant().is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn pt(ea: Scalar, v: &[i64], z: Scalar) -> ChartPoint {
        ChartPoint::new(ea, v.iter().map(|&x| s(x)).collect(), z).unwrap()
    }

    #[test]
    fn group_law_examples() {
        let id = ChartPoint::identity(2);
        let p = pt(Scalar::frac(3, 2), &[1, -2], Scalar::frac(1, 3));
        assert_eq!(group_law(&id, &p).unwrap(), p);
        let a = pt(s(2), &[0, 0], s(0));
        let zz = pt(s(1), &[0, 0], s(5));
        assert_eq!(group_law(&a, &zz).unwrap(), pt(s(2), &[0, 0], s(5)));
        // (0,0,z)·(a,0,0) = (a, 0, e^{-2a} z)
        assert_eq!(
            group_law(&zz, &a).unwrap(),
            pt(s(2), &[0, 0], Scalar::frac(5, 4))
        );
        let inv = p.inverse();
        assert_eq!(group_law(&p, &inv).unwrap(), id);
        assert_eq!(group_law(&inv, &p).unwrap(), id);
    }

    #[test]
    fn fields_on_s_generators() {
        let m = build_su1n(2).unwrap();
        let l = m.layout;
        let h = fundamental_field_basis(&m, l.h()).unwrap();
        let mut want = VectorField::zero(2);
        want.components[0] = CoefFn::constant(2, s(-1));
        assert_eq!(h, want);
        let e = fundamental_field_basis(&m, l.e()).unwrap();
        let mut want = VectorField::zero(2);
        want.components[3] = CoefFn::exp_a(2, -2).scale(&s(-1));
        assert_eq!(e, want);
        assert!(fundamental_field_basis(&m, l.se()).is_err());
    }

    #[test]
    fn classical_moments_are_equivariant_and_poisson() {
        for n in [1, 2] {
            let m = build_su1n(n).unwrap();
            let conv = Conventions::standard(n);
            let lam = classical_moments(&m, &conv.c_omega).unwrap();
            let p = conv.poisson(2 * (n - 1)).unwrap();
            let d0 = sm_dim(&m);
            for i in 0..d0 {
                for j in 0..d0 {
                    let b = m.algebra.bracket_basis(i, j);
                    let mut want = CoefFn::zero(2 * (n - 1));
                    for (k, c) in b.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                        want = want.add(&lam[k].scale(c));
                    }
                    assert_eq!(
                        crate::star::poisson(&lam[i], &lam[j], &p),
                        want,
                        "N={n} ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn qmm_n1_closed_form() {
        let t = build_qmm_standard(1, &s(1)).unwrap();
        // e^{2a}[4z² + α²]
        let z = CoefFn::z(0);
        let want = CoefFn::exp_a(0, 2).mul(&z.pow(2).scale(&s(4)).add(&CoefFn::constant(0, s(1))));
        assert_eq!(t.mu[2], NuSeries::from_fn(want, 2));
        let r = verify_qmm(&t, t.natural_order()).unwrap();
        assert!(r.ok && r.exact, "{r:?}");
    }

    #[test]
    fn qmm_json_roundtrip() {
        let t = build_qmm_standard(2, &s(2)).unwrap();
        let j = serde_json::to_string(&t.to_json()).unwrap();
        let back: QmmJson = serde_json::from_str(&j).unwrap();
        assert_eq!(QmmTable::from_json(&back).unwrap(), t);
    }

    #[test]
    fn qmm_n2_exact_and_mutation() {
        for alpha in [1, 2] {
            let t = build_qmm_standard(2, &s(alpha)).unwrap();
            let r = verify_qmm(&t, t.natural_order()).unwrap();
            assert_eq!(r.pairs.len(), 28);
            assert!(r.ok && r.exact, "alpha {alpha}: {:?}", r.failures().next());
        }
        let t = build_qmm_standard(2, &s(1))
            .unwrap()
            .mutate(&Mutation::DropNu2)
            .unwrap();
        let r = verify_qmm(&t, t.natural_order()).unwrap();
        assert!(!r.ok);
        assert_eq!(r.leading_residual_order(), Some(2));
    }

    #[test]
    fn calibration_is_unique_and_stable() {
        let r1 = calibrate(1).unwrap();
        assert_eq!(r1.passing, vec![Conventions::standard(1)]);
        let r2 = calibrate(2).unwrap();
        assert_eq!(r2.passing, vec![Conventions::standard(2)]);
        assert_eq!(r1.passing[0].c_omega, r2.passing[0].c_omega);
        let grid: Vec<Scalar> = default_grid()
            .into_iter()
            .filter(|c| *c != Scalar::frac(1, 2))
            .collect();
        assert!(matches!(
            calibrate_with_grid(1, &grid, &grid),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn nu_shift_uniqueness() {
        let t = build_qmm_standard(2, &s(1)).unwrap();
        let m = build_su1n(2).unwrap();
        let l = m.layout;
        let s_idx = t.s_indices.clone();
        let k = t.natural_order();
        for i in [l.x(0), l.y(0), l.e()] {
            let bad = t
                .mutate(&Mutation::NuShift {
                    index: i,
                    constant: s(1),
                })
                .unwrap();
            assert!(!verify_qmm_on(&bad, k, &s_idx).unwrap().ok, "index {i}");
        }
        let h = t
            .mutate(&Mutation::NuShift {
                index: l.h(),
                constant: s(1),
            })
            .unwrap();
        assert!(verify_qmm_on(&h, k, &s_idx).unwrap().ok);
        // on all of g the a-component is pinned by [E, σE]
        assert!(!verify_qmm(&h, k).unwrap().ok);
        assert!(check_constant_defect(&m, &t).unwrap());
    }
}
