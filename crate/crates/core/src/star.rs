//! Coefficient functions on the Darboux chart `(a, v_1..v_m, z)`, truncated
//! formal series in `ν`, and the Moyal-Weyl product for a constant Poisson
//! tensor.
//!
//! Normalization: `f★g = Σ_m (ν^m/m!) Λ^{u1w1}…Λ^{umwm} ∂_{u1..um}f ∂_{w1..wm}g`,
//! so `[f, g]★ = 2ν{f, g} + O(ν³)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// `a^p e^{k a} v^alpha z^q`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub p: u32,
    pub k: i32,
    pub alpha: Vec<u32>,
    pub q: u32,
}

impl Monomial {
    pub fn one(nv: usize) -> Self {
        Monomial {
            p: 0,
            k: 0,
            alpha: vec![0; nv],
            q: 0,
        }
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        Monomial {
            p: self.p + o.p,
            k: self.k + o.k,
            alpha: self
                .alpha
                .iter()
                .zip(&o.alpha)
                .map(|(a, b)| a + b)
                .collect(),
            q: self.q + o.q,
        }
    }

    pub fn v_degree(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

/// Finite sum of monomials with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoefFn {
    nv: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl fmt::Debug for CoefFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            if m.p > 0 {
                write!(f, "·a^{}", m.p)?;
            }
            if m.k != 0 {
                write!(f, "·e^({}a)", m.k)?;
            }
            for (i, e) in m.alpha.iter().enumerate() {
                if *e > 0 {
                    write!(f, "·v{i}^{e}")?;
                }
            }
            if m.q > 0 {
                write!(f, "·z^{}", m.q)?;
            }
        }
        Ok(())
    }
}

/// Coordinate index on the chart: `0` is `a`, `1..=nv` are `v`, `nv+1` is `z`.
pub fn coord_count(nv: usize) -> usize {
    nv + 2
}

impl CoefFn {
    pub fn zero(nv: usize) -> Self {
        CoefFn {
            nv,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nv: usize, c: Scalar) -> Self {
        Self::monomial(c, Monomial::one(nv))
    }

    pub fn monomial(c: Scalar, m: Monomial) -> Self {
        let nv = m.alpha.len();
        let mut f = CoefFn::zero(nv);
        if !c.is_zero() {
            f.terms.insert(m, c);
        }
        f
    }

    /// Coordinate function `a`, `v_i` or `z` by chart index.
    pub fn coord(nv: usize, u: usize) -> Self {
        let mut m = Monomial::one(nv);
        if u == 0 {
            m.p = 1;
        } else if u <= nv {
            m.alpha[u - 1] = 1;
        } else {
            m.q = 1;
        }
        Self::monomial(Scalar::one(), m)
    }

    pub fn v(nv: usize, i: usize) -> Self {
        Self::coord(nv, i + 1)
    }

    pub fn z(nv: usize) -> Self {
        Self::coord(nv, nv + 1)
    }

    /// `e^{k a}`
    pub fn exp_a(nv: usize, k: i32) -> Self {
        let mut m = Monomial::one(nv);
        m.k = k;
        Self::monomial(Scalar::one(), m)
    }

    pub fn from_terms(
        nv: usize,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Result<Self> {
        let mut f = CoefFn::zero(nv);
        for (m, c) in terms {
            check_len(nv, m.alpha.len())?;
            f.add_term(m, c);
        }
        Ok(f)
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value if the function is constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().expect("one term");
                (*m == Monomial::one(self.nv)).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn nv_with(&self, o: &CoefFn) -> usize {
        if self.terms.is_empty() {
            o.nv
        } else {
            if !o.terms.is_empty() {
                assert_eq!(self.nv, o.nv, "coefficient functions on different charts");
            }
            self.nv
        }
    }

    pub fn add(&self, o: &CoefFn) -> CoefFn {
        let mut r = self.clone();
        r.nv = self.nv_with(o);
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &CoefFn) -> CoefFn {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> CoefFn {
        if s.is_zero() {
            return CoefFn::zero(self.nv);
        }
        CoefFn {
            nv: self.nv,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, o: &CoefFn) -> CoefFn {
        let mut r = CoefFn::zero(self.nv_with(o));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> CoefFn {
        let mut r = CoefFn::constant(self.nv, Scalar::one());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Partial derivative along chart coordinate `u`.
    pub fn deriv(&self, u: usize) -> CoefFn {
        let mut r = CoefFn::zero(self.nv);
        for (m, c) in &self.terms {
            if u == 0 {
                if m.p > 0 {
                    let mut m2 = m.clone();
                    m2.p -= 1;
                    r.add_term(m2, c * Scalar::from_int(m.p as i64));
                }
                if m.k != 0 {
                    r.add_term(m.clone(), c * Scalar::from_int(m.k as i64));
                }
            } else if u <= self.nv {
                let e = m.alpha[u - 1];
                if e > 0 {
                    let mut m2 = m.clone();
                    m2.alpha[u - 1] -= 1;
                    r.add_term(m2, c * Scalar::from_int(e as i64));
                }
            } else if m.q > 0 {
                let mut m2 = m.clone();
                m2.q -= 1;
                r.add_term(m2, c * Scalar::from_int(m.q as i64));
            }
        }
        r
    }

    /// Antiderivative along `u` (the homogeneous part is chosen without
    /// constant of integration).
    pub fn integrate(&self, u: usize) -> CoefFn {
        let mut r = CoefFn::zero(self.nv);
        for (m, c) in &self.terms {
            if u == 0 {
                if m.k == 0 {
                    let mut m2 = m.clone();
                    m2.p += 1;
                    r.add_term(m2, c / Scalar::from_int(m.p as i64 + 1));
                } else {
                    // ∫ a^p e^{ka} = e^{ka} Σ_j (-1)^j p!/(p-j)! a^{p-j} / k^{j+1}
                    let k = Scalar::from_int(m.k as i64);
                    let mut fall = Scalar::one();
                    for j in 0..=m.p {
                        let mut m2 = m.clone();
                        m2.p = m.p - j;
                        let sign = if j % 2 == 0 {
                            Scalar::one()
                        } else {
                            Scalar::from_int(-1)
                        };
                        r.add_term(m2, c * &sign * &fall / k.pow(j as i32 + 1));
                        fall = fall * Scalar::from_int((m.p - j) as i64);
                    }
                }
            } else if u <= self.nv {
                let mut m2 = m.clone();
                m2.alpha[u - 1] += 1;
                r.add_term(m2, c / Scalar::from_int(m.alpha[u - 1] as i64 + 1));
            } else {
                let mut m2 = m.clone();
                m2.q += 1;
                r.add_term(m2, c / Scalar::from_int(m.q as i64 + 1));
            }
        }
        r
    }

    pub fn z_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.q).max().unwrap_or(0)
    }

    pub fn v_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::v_degree).max().unwrap_or(0)
    }

    /// Evaluates a function without `a^p` factors at `(e^a, v, z)`.
    pub fn eval_exp(&self, exp_a: &Scalar, v: &[Scalar], z: &Scalar) -> Option<Scalar> {
        let mut s = Scalar::zero();
        for (m, c) in &self.terms {
            if m.p > 0 {
                return None;
            }
            let mut t = c * exp_a.pow(m.k);
            for (x, e) in v.iter().zip(&m.alpha) {
                t = t * x.pow(*e as i32);
            }
            t = t * z.pow(m.q as i32);
            s += &t;
        }
        Some(s)
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                p: m.p,
                k: m.k,
                alpha: m.alpha.clone(),
                q: m.q,
                coeff: c.clone(),
            })
            .collect()
    }

    pub fn from_json(nv: usize, terms: &[TermJson]) -> Result<Self> {
        Self::from_terms(
            nv,
            terms.iter().map(|t| {
                (
                    Monomial {
                        p: t.p,
                        k: t.k,
                        alpha: t.alpha.clone(),
                        q: t.q,
                    },
                    t.coeff.clone(),
                )
            }),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub p: u32,
    pub k: i32,
    pub alpha: Vec<u32>,
    pub q: u32,
    pub coeff: Scalar,
}

/// Truncated formal series `Σ_{i≤order} ν^i f_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuSeries {
    coeffs: Vec<CoefFn>,
    /// all orders above `order` are known to vanish
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuSeriesJson {
    pub nv: usize,
    pub order: usize,
    pub exact: bool,
    pub coeffs: Vec<Vec<TermJson>>,
}

impl NuSeries {
    pub fn zero(nv: usize, order: usize) -> Self {
        NuSeries {
            coeffs: vec![CoefFn::zero(nv); order + 1],
            exact: true,
        }
    }

    /// Exact series equal to a single function at `ν⁰`.
    pub fn from_fn(f: CoefFn, order: usize) -> Self {
        let nv = f.nv();
        let mut s = Self::zero(nv, order);
        s.coeffs[0] = f;
        s
    }

    pub fn constant(nv: usize, c: Scalar, order: usize) -> Self {
        Self::from_fn(CoefFn::constant(nv, c), order)
    }

    /// Exact series from its coefficients; the order is padded to `order`.
    pub fn from_coeffs(nv: usize, mut coeffs: Vec<CoefFn>, order: usize) -> Self {
        let exact = coeffs.iter().skip(order + 1).all(CoefFn::is_zero);
        coeffs.resize(order + 1, CoefFn::zero(nv));
        NuSeries { coeffs, exact }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn nv(&self) -> usize {
        self.coeffs[0].nv()
    }

    pub fn coeffs(&self) -> &[CoefFn] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> CoefFn {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| CoefFn::zero(self.nv()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(CoefFn::is_zero)
    }

    /// Lowest order with a nonzero coefficient.
    pub fn leading_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Known order of the combination with another series.
    fn joint_order(&self, o: &NuSeries) -> (usize, bool) {
        match (self.exact, o.exact) {
            (true, true) => (self.order().max(o.order()), true),
            (true, false) => (o.order(), false),
            (false, true) => (self.order(), false),
            (false, false) => (self.order().min(o.order()), false),
        }
    }

    pub fn add(&self, o: &NuSeries) -> NuSeries {
        let (k, exact) = self.joint_order(o);
        let coeffs = (0..=k).map(|i| self.coeff(i).add(&o.coeff(i))).collect();
        NuSeries { coeffs, exact }
    }

    pub fn sub(&self, o: &NuSeries) -> NuSeries {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> NuSeries {
        NuSeries {
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
            exact: self.exact,
        }
    }

    /// Pointwise (commutative) product truncated at the known order.
    pub fn mul_fn(&self, f: &CoefFn) -> NuSeries {
        NuSeries {
            coeffs: self.coeffs.iter().map(|c| c.mul(f)).collect(),
            exact: self.exact,
        }
    }

    /// Pointwise (commutative) Cauchy product of two series.
    pub fn mul(&self, o: &NuSeries) -> NuSeries {
        let (k, exact) = self.joint_order(o);
        let kk = if exact {
            k
        } else {
            k.min(self.order()).min(o.order())
        };
        let nv = self.nv();
        let mut coeffs = vec![CoefFn::zero(nv); kk + 1];
        let mut overflow = false;
        for (i, f) in self.coeffs.iter().enumerate() {
            for (j, g) in o.coeffs.iter().enumerate() {
                if f.is_zero() || g.is_zero() {
                    continue;
                }
                if i + j > kk {
                    overflow = true;
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&f.mul(g));
            }
        }
        NuSeries {
            coeffs,
            exact: exact && !overflow,
        }
    }

    /// Multiplication by `ν^s`, keeping the order.
    pub fn shift(&self, s: usize) -> NuSeries {
        let nv = self.nv();
        let k = self.order();
        let mut coeffs = vec![CoefFn::zero(nv); k + 1];
        for i in 0..=k {
            if i + s <= k {
                coeffs[i + s] = self.coeffs[i].clone();
            }
        }
        let lost = (k + 1).saturating_sub(s)..=k;
        let exact = self.exact && lost.into_iter().all(|i| self.coeffs[i].is_zero());
        NuSeries { coeffs, exact }
    }

    /// Same series with a different truncation.
    pub fn with_order(&self, order: usize) -> NuSeries {
        let nv = self.nv();
        let mut coeffs = self.coeffs.clone();
        let dropped_nonzero = coeffs.iter().skip(order + 1).any(|c| !c.is_zero());
        coeffs.resize(order + 1, CoefFn::zero(nv));
        let exact = if order <= self.order() {
            self.exact && !dropped_nonzero
        } else {
            self.exact
        };
        NuSeries { coeffs, exact }
    }

    /// Equality of the coefficients through the smaller known order.
    pub fn agrees_with(&self, o: &NuSeries) -> bool {
        let k = self.joint_order(o).0;
        let k = if self.exact && o.exact {
            k
        } else {
            k.min(self.order()).min(o.order())
        };
        (0..=k).all(|i| self.coeff(i) == o.coeff(i))
    }

    pub fn z_degree(&self) -> u32 {
        self.coeffs.iter().map(CoefFn::z_degree).max().unwrap_or(0)
    }

    pub fn v_degree(&self) -> u32 {
        self.coeffs.iter().map(CoefFn::v_degree).max().unwrap_or(0)
    }

    /// Highest order with a nonzero coefficient.
    pub fn nu_degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn to_json(&self) -> NuSeriesJson {
        NuSeriesJson {
            nv: self.nv(),
            order: self.order(),
            exact: self.exact,
            coeffs: self.coeffs.iter().map(CoefFn::to_json).collect(),
        }
    }

    pub fn from_json(j: &NuSeriesJson) -> Result<Self> {
        if j.coeffs.len() != j.order + 1 {
            return Err(Error::Input(format!(
                "series of order {} needs {} coefficients, found {}",
                j.order,
                j.order + 1,
                j.coeffs.len()
            )));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|t| CoefFn::from_json(j.nv, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(NuSeries {
            coeffs,
            exact: j.exact,
        })
    }
}

/// Constant antisymmetric, invertible Poisson tensor on the chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    nv: usize,
    matrix: Matrix,
    entries: Vec<(usize, usize, Scalar)>,
}

impl PoissonStructure {
    pub fn new(nv: usize, matrix: Matrix) -> Result<Self> {
        let n = coord_count(nv);
        check_len(n, matrix.len())?;
        for (i, row) in matrix.iter().enumerate() {
            check_len(n, row.len())?;
            for j in 0..n {
                if row[j] != -&matrix[j][i] {
                    return Err(Error::Input("Poisson tensor must be antisymmetric".into()));
                }
            }
        }
        if linalg::det(&matrix).is_zero() {
            return Err(Error::Input("Poisson tensor must be invertible".into()));
        }
        let mut entries = Vec::new();
        for (i, row) in matrix.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    entries.push((i, j, x.clone()));
                }
            }
        }
        Ok(PoissonStructure {
            nv,
            matrix,
            entries,
        })
    }

    /// Darboux form: `Λ^{az} = c_az` and `Λ^{x_i y_i} = c_v` where the v
    /// coordinates are ordered `x_1..x_m, y_1..y_m`.
    pub fn darboux(nv: usize, c_az: &Scalar, c_v: &Scalar) -> Result<Self> {
        if nv % 2 != 0 {
            return Err(Error::Input("v dimension must be even".into()));
        }
        let n = coord_count(nv);
        let mut m = vec![linalg::zero_vec(n); n];
        m[0][n - 1] = c_az.clone();
        m[n - 1][0] = -c_az;
        let h = nv / 2;
        for i in 0..h {
            m[1 + i][1 + h + i] = c_v.clone();
            m[1 + h + i][1 + i] = -c_v;
        }
        Self::new(nv, m)
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// `{f, g} = Λ^{uw} ∂_u f ∂_w g`
pub fn poisson(f: &CoefFn, g: &CoefFn, pstr: &PoissonStructure) -> CoefFn {
    let mut r = CoefFn::zero(f.nv_with(g));
    for (u, w, lam) in &pstr.entries {
        let df = f.deriv(*u);
        if df.is_zero() {
            continue;
        }
        let dg = g.deriv(*w);
        if dg.is_zero() {
            continue;
        }
        r = r.add(&df.mul(&dg).scale(lam));
    }
    r
}

/// Derivative cache keyed by multi-index.
struct Derivs<'a> {
    base: &'a CoefFn,
    cache: HashMap<Vec<u8>, CoefFn>,
}

impl<'a> Derivs<'a> {
    fn new(base: &'a CoefFn) -> Self {
        Derivs {
            base,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, idx: &[u8]) -> CoefFn {
        if let Some(f) = self.cache.get(idx) {
            return f.clone();
        }
        let out = match idx.iter().rposition(|&c| c > 0) {
            None => self.base.clone(),
            Some(u) => {
                let mut prev = idx.to_vec();
                prev[u] -= 1;
                self.get(&prev).deriv(u)
            }
        };
        self.cache.insert(idx.to_vec(), out.clone());
        out
    }
}

/// `B_m(f, g)` for `m = 0..=max_m` and whether all higher terms vanish.
pub fn bidifferential_terms(
    f: &CoefFn,
    g: &CoefFn,
    pstr: &PoissonStructure,
    max_m: usize,
) -> (Vec<CoefFn>, bool) {
    let n = coord_count(pstr.nv);
    let nv = f.nv_with(g);
    let mut df = Derivs::new(f);
    let mut dg = Derivs::new(g);
    let mut states: BTreeMap<(Vec<u8>, Vec<u8>), Scalar> = BTreeMap::new();
    if !f.is_zero() && !g.is_zero() {
        states.insert((vec![0; n], vec![0; n]), Scalar::one());
    }
    let mut out = Vec::with_capacity(max_m + 1);
    let mut m = 0;
    loop {
        // states are pruned: both derivative factors nonzero
        let mut term = CoefFn::zero(nv);
        for ((a, b), c) in &states {
            term = term.add(&df.get(a).mul(&dg.get(b)).scale(c));
        }
        out.push(term);
        let mut next: BTreeMap<(Vec<u8>, Vec<u8>), Scalar> = BTreeMap::new();
        for ((a, b), c) in &states {
            for (u, w, lam) in &pstr.entries {
                let mut a2 = a.clone();
                a2[*u] += 1;
                let mut b2 = b.clone();
                b2[*w] += 1;
                let e = next.entry((a2, b2)).or_insert_with(Scalar::zero);
                *e += &(c * lam);
            }
        }
        next.retain(|(a, b), c| !c.is_zero() && !df.get(a).is_zero() && !dg.get(b).is_zero());
        if next.is_empty() {
            out.resize(max_m + 1, CoefFn::zero(nv));
            return (out, true);
        }
        if m == max_m {
            return (out, false);
        }
        states = next;
        m += 1;
    }
}

fn factorial(m: usize) -> Scalar {
    (1..=m as i64).fold(Scalar::one(), |acc, i| acc * Scalar::from_int(i))
}

fn known_order(f: &NuSeries, g: &NuSeries, k: usize) -> usize {
    let mut o = k;
    if !f.exact {
        o = o.min(f.order());
    }
    if !g.exact {
        o = o.min(g.order());
    }
    o
}

/// Moyal product truncated at `ν^k`.
pub fn moyal(f: &NuSeries, g: &NuSeries, pstr: &PoissonStructure, k: usize) -> NuSeries {
    let kk = known_order(f, g, k);
    let nv = f.nv();
    let jobs: Vec<(usize, usize)> = (0..=f.order().min(kk))
        .flat_map(|i| (0..=g.order().min(kk - i)).map(move |j| (i, j)))
        .collect();
    let parts: Vec<(usize, Vec<CoefFn>, bool)> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let (t, done) = bidifferential_terms(&f.coeffs[i], &g.coeffs[j], pstr, kk - i - j);
            (i + j, t, done)
        })
        .collect();
    let mut coeffs = vec![CoefFn::zero(nv); kk + 1];
    let mut exact = f.exact && g.exact && kk == k;
    for (base, terms, done) in parts {
        exact &= done;
        for (m, t) in terms.into_iter().enumerate() {
            if !t.is_zero() {
                coeffs[base + m] = coeffs[base + m].add(&t.scale(&factorial(m).recip()));
            }
        }
    }
    // coefficients of f, g beyond the window also contribute when exact
    if exact {
        let f_tail = f.coeffs.iter().skip(kk + 1).any(|c| !c.is_zero());
        let g_tail = g.coeffs.iter().skip(kk + 1).any(|c| !c.is_zero());
        let cross = (0..=f.order()).any(|i| {
            (0..=g.order()).any(|j| i + j > kk && !f.coeffs[i].is_zero() && !g.coeffs[j].is_zero())
        });
        exact = !(f_tail || g_tail || cross);
    }
    NuSeries { coeffs, exact }
}

/// `(1/2ν)[f, g]★` truncated at `ν^k`, using `B_m(g,f) = (-1)^m B_m(f,g)`.
pub fn star_bracket(f: &NuSeries, g: &NuSeries, pstr: &PoissonStructure, k: usize) -> NuSeries {
    let kk = known_order(f, g, k);
    let nv = f.nv();
    let jobs: Vec<(usize, usize)> = (0..=f.order().min(kk))
        .flat_map(|i| (0..=g.order().min(kk - i)).map(move |j| (i, j)))
        .collect();
    let parts: Vec<(usize, Vec<CoefFn>, bool)> = jobs
        .par_iter()
        .map(|&(i, j)| {
            // ν^{i+j+m-1} with m odd, m ≤ kk + 1 - i - j
            let (t, done) = bidifferential_terms(&f.coeffs[i], &g.coeffs[j], pstr, kk + 1 - i - j);
            (i + j, t, done)
        })
        .collect();
    let mut coeffs = vec![CoefFn::zero(nv); kk + 1];
    let mut exact = f.exact && g.exact && kk == k;
    for (base, terms, done) in parts {
        exact &= done;
        for (m, t) in terms.into_iter().enumerate() {
            if m % 2 == 1 && !t.is_zero() {
                coeffs[base + m - 1] = coeffs[base + m - 1].add(&t.scale(&factorial(m).recip()));
            }
        }
    }
    if exact {
        let cross = (0..=f.order()).any(|i| {
            (0..=g.order()).any(|j| i + j > kk && !f.coeffs[i].is_zero() && !g.coeffs[j].is_zero())
        });
        exact = !cross;
    }
    NuSeries { coeffs, exact }
}

/// The derivation `g ↦ (1/2ν)[f, g]★`.
#[derive(Clone, Debug)]
pub struct StarDerivation {
    pub f: NuSeries,
    pub pstr: PoissonStructure,
    pub k: usize,
}

impl StarDerivation {
    pub fn apply(&self, g: &NuSeries) -> NuSeries {
        star_bracket(&self.f, g, &self.pstr, self.k)
    }
}

pub fn star_commutator_derivation(
    f: &NuSeries,
    pstr: &PoissonStructure,
    k: usize,
) -> StarDerivation {
    StarDerivation {
        f: f.clone(),
        pstr: pstr.clone(),
        k,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairResidual {
    pub pair: (String, String),
    pub residual: NuSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceReport {
    pub ok: bool,
    pub checked: usize,
    pub failures: Vec<PairResidual>,
}

/// Checks `(1/2ν)[λ_X, λ_Y]★ = λ_{[X,Y]}` on all basis pairs.
pub fn check_covariance(
    lambda_map: &[NuSeries],
    alg: &LieAlgebra,
    pstr: &PoissonStructure,
    k: usize,
) -> Result<CovarianceReport> {
    check_len(alg.dim(), lambda_map.len())?;
    let n = alg.dim();
    let nv = pstr.nv();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let failures: Vec<PairResidual> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let lhs = star_bracket(&lambda_map[i], &lambda_map[j], pstr, k);
            let br = alg.bracket_basis(i, j);
            let mut rhs = NuSeries::zero(nv, k);
            for (l, c) in br.iter().enumerate() {
                if !c.is_zero() {
                    rhs = rhs.add(&lambda_map[l].scale(c));
                }
            }
            let res = rhs.with_order(k).sub(&lhs);
            (!res.is_zero()).then(|| PairResidual {
                pair: (alg.labels()[i].clone(), alg.labels()[j].clone()),
                residual: res,
            })
        })
        .collect();
    Ok(CovarianceReport {
        ok: failures.is_empty(),
        checked: pairs.len(),
        failures,
    })
}
