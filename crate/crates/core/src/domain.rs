//! Functions on the fundamental domain `D` as truncated series in
//! `w_1, ..., w_{h-1}` with the Gauss valuation, sections `f phi_0^s`, and
//! the actions of `Gamma`, of the matrix group `P`, and of `gl_h`.
//!
//! Valuations on `D` are integers in units of `v(p)/h`: the weight of `w_i`
//! is `h - i`, so `vD(sum c_a w^a) = min(h v(c_a) + sum a_i (h - i))`.

use serde_json::json;

use crate::division::{j_embed, DivElem};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::padic::{ContextExt, Ctx, PadicScalar, Valuation};
use crate::series::{mono_degree, Mono, PowerTable, TruncSeries, MAX_VARS};

/// Element of the truncated function algebra of `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainFunc {
    h: usize,
    series: TruncSeries<PadicScalar>,
}

/// A section `f phi_0^s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub f: DomainFunc,
    pub s: i64,
}

/// Exponent vector of `w^alpha` padded to the series width.
pub fn mono_of(alpha: &[u16]) -> Mono {
    let mut m = [0u16; MAX_VARS];
    m[..alpha.len()].copy_from_slice(alpha);
    m
}

/// Weight of `w^alpha` in units of `v(p)/h`.
pub fn weight(h: usize, m: &Mono) -> i64 {
    (0..h - 1).map(|k| m[k] as i64 * (h - 1 - k) as i64).sum()
}

impl DomainFunc {
    pub fn from_series(h: usize, series: TruncSeries<PadicScalar>) -> Result<DomainFunc> {
        if h < 2 {
            return Err(Error::ConfigInvalid("the domain needs h >= 2".into()));
        }
        if series.nvars() != h - 1 {
            return Err(Error::Shape(format!("expected {} variables, got {}", h - 1, series.nvars())));
        }
        if series.ctx().degree() != h {
            return Err(Error::ConfigInvalid("coefficients must live in the degree-h extension".into()));
        }
        Ok(DomainFunc { h, series })
    }

    pub fn zero(ctx: &Ctx, dmax: u32) -> DomainFunc {
        let h = ctx.degree();
        DomainFunc { h, series: TruncSeries::zero(h - 1, dmax, &ctx.zero()) }
    }

    pub fn constant(c: &PadicScalar, dmax: u32) -> DomainFunc {
        let h = c.ctx().degree();
        DomainFunc { h, series: TruncSeries::constant(h - 1, dmax, c) }
    }

    pub fn one(ctx: &Ctx, dmax: u32) -> DomainFunc {
        DomainFunc::constant(&ctx.one(), dmax)
    }

    /// `w_i`, with `w_0 = 1`.
    pub fn w(ctx: &Ctx, i: usize, dmax: u32) -> DomainFunc {
        if i == 0 {
            return DomainFunc::one(ctx, dmax);
        }
        let h = ctx.degree();
        DomainFunc { h, series: TruncSeries::var(h - 1, dmax, i - 1, &ctx.zero()) }
    }

    pub fn monomial(c: &PadicScalar, alpha: &[u16], dmax: u32) -> DomainFunc {
        let h = c.ctx().degree();
        assert_eq!(alpha.len(), h - 1, "exponent vector has length h - 1");
        DomainFunc { h, series: TruncSeries::monomial(h - 1, dmax, mono_of(alpha), c) }
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn ctx(&self) -> &Ctx {
        self.series.ctx()
    }

    pub fn dmax(&self) -> u32 {
        self.series.dmax()
    }

    pub fn series(&self) -> &TruncSeries<PadicScalar> {
        &self.series
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &PadicScalar)> + '_ {
        self.series.terms()
    }

    pub fn coeff(&self, alpha: &[u16]) -> PadicScalar {
        self.series.coeff(&mono_of(alpha))
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }

    pub fn degree(&self) -> Option<u32> {
        self.series.degree()
    }

    pub fn order(&self) -> Option<u32> {
        self.series.order()
    }

    fn wrap(&self, series: TruncSeries<PadicScalar>) -> DomainFunc {
        DomainFunc { h: self.h, series }
    }

    pub fn add(&self, o: &DomainFunc) -> DomainFunc {
        self.wrap(self.series.add(&o.series))
    }

    pub fn sub(&self, o: &DomainFunc) -> DomainFunc {
        self.wrap(self.series.sub(&o.series))
    }

    pub fn mul(&self, o: &DomainFunc) -> DomainFunc {
        self.wrap(self.series.mul(&o.series))
    }

    pub fn scale(&self, c: &PadicScalar) -> DomainFunc {
        self.wrap(self.series.scale(c))
    }

    pub fn with_dmax(&self, dmax: u32) -> DomainFunc {
        self.wrap(self.series.with_dmax(dmax))
    }

    pub fn homogeneous_part(&self, d: u32) -> DomainFunc {
        self.wrap(self.series.homogeneous_part(d))
    }

    pub fn derivative(&self, j: usize) -> DomainFunc {
        assert!(j >= 1 && j < self.h);
        self.wrap(self.series.derivative(j - 1))
    }

    pub fn map(&self, f: impl Fn(&PadicScalar) -> PadicScalar) -> DomainFunc {
        self.wrap(self.series.map(f))
    }

    pub fn try_map(&self, f: impl Fn(&PadicScalar) -> Result<PadicScalar>) -> Result<DomainFunc> {
        Ok(self.wrap(self.series.try_map(f)?))
    }

    /// Gauss valuation, or `ZeroAtPrecision`.
    pub fn gauss_valuation(&self) -> Result<i64> {
        gauss_valuation(self)
    }

    /// Gauss valuation with a lower bound for functions that vanish at
    /// precision.
    pub fn gauss_bound(&self) -> Valuation {
        match gauss_valuation(self) {
            Ok(v) => Valuation::Finite(v as u32),
            Err(_) => {
                let prec = self.series.coeffs().iter().map(|c| c.precision()).min().unwrap_or(0);
                Valuation::AtLeast(self.h as u32 * prec)
            }
        }
    }

    pub fn to_json(&self, s: i64) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms()
            .map(|(m, c)| json!([&m[..self.h - 1], c.coords()]))
            .collect();
        json!({"h": self.h, "s": s, "Dmax": self.dmax(), "terms": terms})
    }
}

pub fn gauss_valuation(f: &DomainFunc) -> Result<i64> {
    let h = f.h as i64;
    f.terms()
        .map(|(m, c)| h * c.valuation().bound() as i64 + weight(f.h, m))
        .min()
        .ok_or(Error::ZeroAtPrecision)
}

impl Section {
    pub fn new(f: DomainFunc, s: i64) -> Section {
        Section { f, s }
    }

    pub fn h(&self) -> usize {
        self.f.h
    }

    pub fn ctx(&self) -> &Ctx {
        self.f.ctx()
    }

    pub fn check_twist(&self, other: &Section) -> Result<()> {
        if self.s != other.s {
            return Err(Error::Shape(format!("twists {} and {} differ", self.s, other.s)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Section) -> Section {
        self.check_twist(o).expect("sections of different twists");
        Section { f: self.f.add(&o.f), s: self.s }
    }

    pub fn sub(&self, o: &Section) -> Section {
        self.check_twist(o).expect("sections of different twists");
        Section { f: self.f.sub(&o.f), s: self.s }
    }

    pub fn scale(&self, c: &PadicScalar) -> Section {
        Section { f: self.f.scale(c), s: self.s }
    }

    pub fn with_dmax(&self, dmax: u32) -> Section {
        Section { f: self.f.with_dmax(dmax), s: self.s }
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    /// `||f phi_0^s|| = ||f||_D`.
    pub fn gauss_valuation(&self) -> Result<i64> {
        gauss_valuation(&self.f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.f.to_json(self.s)
    }
}

/// Images `gamma(w_i)` and the twist factor `gamma(phi_0)/phi_0`, truncated at
/// `dmax`, computed from the explicit fractional-linear formula.
pub struct GammaAction {
    h: usize,
    dmax: u32,
    images: Vec<TruncSeries<PadicScalar>>,
    den: TruncSeries<PadicScalar>,
    inv_den: TruncSeries<PadicScalar>,
    table: Option<PowerTable<PadicScalar>>,
    table_degree: u32,
}

impl GammaAction {
    pub fn new(gamma: &DivElem, dmax: u32) -> Result<GammaAction> {
        if !gamma.is_gamma() {
            return Err(Error::NonUnit);
        }
        let h = gamma.h();
        if h < 2 {
            return Err(Error::ConfigInvalid("the domain needs h >= 2".into()));
        }
        let ctx = gamma.ctx().clone();
        let z = ctx.zero();
        let n = h - 1;
        let lam = |k: usize, j: usize| gamma.coeff(k).frobenius(j);
        let w = |j: usize| TruncSeries::var(n, dmax, j - 1, &z);
        // denominator lambda_0 + sum_{j=1}^{h-1} sigma^j(lambda_{h-j}) w_j
        let mut den = TruncSeries::constant(n, dmax, gamma.coeff(0));
        for j in 1..h {
            den = den.add(&w(j).scale(&lam(h - j, j)));
        }
        let inv_den = den.inverse_with(&gamma.coeff(0).inv()?);
        let mut images = Vec::with_capacity(n);
        for i in 1..h {
            let mut num = TruncSeries::zero(n, dmax, &z);
            for j in 1..=i {
                num = num.add(&w(j).scale(&lam(i - j, j)));
            }
            for j in i + 1..h {
                num = num.add(&w(j).scale(&lam(h + i - j, j).mul_p_pow(1)));
            }
            // j = h: w_h = 1 and sigma^h = id
            num = num.add(&TruncSeries::constant(n, dmax, &gamma.coeff(i).mul_p_pow(1)));
            images.push(num.mul(&inv_den));
        }
        Ok(GammaAction { h, dmax, images, den, inv_den, table: None, table_degree: 0 })
    }

    /// Images from an arbitrary matrix `a` in `P` via
    /// `a(w_i) = (a_0i + sum a_ji w_j) / (a_00 + sum a_j0 w_j)`.
    pub fn from_matrix(a: &Mat, dmax: u32) -> Result<GammaAction> {
        check_in_p(a)?;
        let h = a.rows();
        let ctx = a.get(0, 0).ctx().clone();
        let z = ctx.zero();
        let n = h - 1;
        let w = |j: usize| TruncSeries::var(n, dmax, j - 1, &z);
        let mut den = TruncSeries::constant(n, dmax, a.get(0, 0));
        for j in 1..h {
            den = den.add(&w(j).scale(a.get(j, 0)));
        }
        let inv_den = den.inverse_with(&a.get(0, 0).inv()?);
        let mut images = Vec::with_capacity(n);
        for i in 1..h {
            let mut num = TruncSeries::constant(n, dmax, a.get(0, i));
            for j in 1..h {
                num = num.add(&w(j).scale(a.get(j, i)));
            }
            images.push(num.mul(&inv_den));
        }
        Ok(GammaAction { h, dmax, images, den, inv_den, table: None, table_degree: 0 })
    }

    pub fn dmax(&self) -> u32 {
        self.dmax
    }

    /// `gamma(w_i)` for `1 <= i <= h-1`.
    pub fn image(&self, i: usize) -> DomainFunc {
        DomainFunc { h: self.h, series: self.images[i - 1].clone() }
    }

    /// The twist factor `lambda_0 + sum sigma^j(lambda_{h-j}) w_j`.
    pub fn denominator(&self) -> DomainFunc {
        DomainFunc { h: self.h, series: self.den.clone() }
    }

    fn ensure_table(&mut self, degree: u32) {
        if self.table.is_none() || self.table_degree < degree {
            self.table = Some(PowerTable::new(&self.images, degree));
            self.table_degree = degree;
        }
    }

    /// Substitution `f(gamma(w))` truncated at `dmax`.
    pub fn apply_func(&mut self, f: &DomainFunc) -> DomainFunc {
        let d = f.degree().unwrap_or(0);
        self.ensure_table(d);
        let series = self.table.as_ref().unwrap().apply(&f.series);
        DomainFunc { h: self.h, series }
    }

    /// `gamma(f phi_0^s) = f(gamma(w)) den^s phi_0^s`.
    pub fn apply(&mut self, x: &Section) -> Section {
        let mut g = self.apply_func(&x.f);
        if x.s > 0 {
            g.series = g.series.mul(&self.den.pow(x.s as u64));
        } else if x.s < 0 {
            g.series = g.series.mul(&self.inv_den.pow((-x.s) as u64));
        }
        Section { f: g, s: x.s }
    }
}

/// `gamma(x)` truncated at `dmax`.
pub fn gamma_act(gamma: &DivElem, x: &Section, dmax: u32) -> Result<Section> {
    if !gamma.ctx().same_field(x.ctx()) || gamma.h() != x.h() {
        return Err(Error::ContextMismatch);
    }
    let mut act = GammaAction::new(gamma, dmax)?;
    Ok(act.apply(&x.with_dmax(dmax.max(x.f.dmax()))).with_dmax(dmax))
}

/// Membership in `P`: integral entries, unit determinant, `a_0k` and the
/// entries strictly below the diagonal outside column 0 divisible by `p`.
pub fn check_in_p(a: &Mat) -> Result<()> {
    let h = a.rows();
    if h != a.cols() || h < 2 {
        return Err(Error::NotInP("matrix must be square of size >= 2".into()));
    }
    for c in 1..h {
        if a.get(0, c).valuation().bound() < 1 {
            return Err(Error::NotInP(format!("entry (0,{c}) is not divisible by p")));
        }
    }
    for r in 2..h {
        for c in 1..r {
            if a.get(r, c).valuation().bound() < 1 {
                return Err(Error::NotInP(format!("entry ({r},{c}) is not divisible by p")));
            }
        }
    }
    if !a.det()?.is_unit() {
        return Err(Error::NotInP("determinant is not a unit".into()));
    }
    Ok(())
}

pub fn p_act(a: &Mat, f: &DomainFunc, dmax: u32) -> Result<DomainFunc> {
    let mut act = GammaAction::from_matrix(a, dmax)?;
    Ok(act.apply_func(&f.with_dmax(dmax.max(f.dmax()))).with_dmax(dmax))
}

/// `vD(gamma(x) - x) - vD(x)`; `None` when `gamma(x) = x` at precision.
pub fn contraction_profile(gamma: &DivElem, x: &Section, dmax: u32) -> Result<Option<i64>> {
    let gx = gamma_act(gamma, x, dmax)?;
    let diff = gx.f.sub(&x.f.with_dmax(dmax));
    if diff.is_zero() {
        return Ok(None);
    }
    Ok(Some(diff.gauss_valuation()? - x.gauss_valuation()?))
}

/// The operator `x_ij` of `gl_h` on sections (`w_0 = 1`).
pub fn lie_act(i: usize, j: usize, x: &Section) -> Section {
    let h = x.h();
    assert!(i < h && j < h, "operator indices lie in 0..h");
    let f = &x.f;
    let dmax = f.dmax();
    let n = h - 1;
    let mut out = TruncSeries::zero(n, dmax, &f.ctx().zero());
    let push = |out: &mut TruncSeries<PadicScalar>, m: Mono, c: PadicScalar| {
        if mono_degree(&m) <= dmax && !c.is_zero() {
            let prev = out.coeff(&m);
            out.set(&m, &prev + &c);
        }
    };
    for (m, c) in f.terms() {
        if j != 0 {
            let a = m[j - 1];
            if a == 0 {
                continue;
            }
            let mut m2 = *m;
            m2[j - 1] -= 1;
            if i != 0 {
                m2[i - 1] += 1;
            }
            push(&mut out, m2, c.mul_int(a as i64));
        } else {
            let k = x.s - mono_degree(m) as i64;
            let mut m2 = *m;
            if i != 0 {
                m2[i - 1] += 1;
            }
            push(&mut out, m2, c.mul_int(k));
        }
    }
    Section { f: DomainFunc { h, series: out }, s: x.s }
}

/// `D_delta = sum_ij j(delta)_ij x_ij`.
pub fn lie_derived(delta: &DivElem, x: &Section) -> Section {
    let h = x.h();
    let m = j_embed(delta);
    let mut acc = Section { f: DomainFunc::zero(x.ctx(), x.f.dmax()), s: x.s };
    for i in 0..h {
        for j in 0..h {
            let c = m.get(i, j);
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&lie_act(i, j, x).scale(c));
        }
    }
    acc
}

/// Difference quotient `p^{-k}(gamma(x) - x)` for `gamma = 1 + p^k delta`,
/// paired with `D_delta(x)`.
pub fn lie_finite_difference(delta: &DivElem, x: &Section, k: u32, dmax: u32) -> Result<(Section, Section)> {
    if k == 0 {
        return Err(Error::ConfigInvalid("the step exponent must be >= 1".into()));
    }
    let ctx = delta.ctx();
    let step = DivElem::new(delta.coeffs().iter().map(|c| c.mul_p_pow(k)).collect())?;
    let gamma = DivElem::one(ctx).add(&step);
    let x = x.with_dmax(dmax);
    let gx = gamma_act(&gamma, &x, dmax)?;
    let diff = gx.f.sub(&x.f);
    let q = diff.try_map(|c| c.div_p_pow(k))?;
    Ok((Section { f: q, s: x.s }, lie_derived(delta, &x)))
}

/// Both evaluations of the sequence `f_n`.
#[derive(Clone, Debug)]
pub struct FnSequence {
    pub recursive: Vec<DomainFunc>,
    pub closed: Vec<DomainFunc>,
}

/// `f_n = ((d + n - s) f_{n-1} + x_00(f_{n-1} phi_0^s)) / n` together with
/// the closed form `sum_{|a| = d} c_a w^a + sum_{i >= 1} (-1)^n C(i-1, n)
/// sum_{|a| = d+i} c_a w^a`.
pub fn fn_sequence(f0: &DomainFunc, d: u32, s: i64, nmax: u32) -> Result<FnSequence> {
    if f0.order().map(|o| o < d).unwrap_or(true) {
        return Err(Error::ConfigInvalid(format!("f0 must be nonzero with no terms below degree {d}")));
    }
    if f0.homogeneous_part(d).is_zero() {
        return Err(Error::ConfigInvalid(format!("the degree-{d} part of f0 vanishes")));
    }
    let mut recursive = vec![f0.clone()];
    for n in 1..=nmax {
        let prev = recursive.last().unwrap();
        let x00 = lie_act(0, 0, &Section::new(prev.clone(), s)).f;
        let mixed = prev.scale(&f0.ctx().from_int(d as i64 + n as i64 - s)).add(&x00);
        let next = mixed.try_map(|c| c.div_int(n as i64)).map_err(|_| {
            Error::PrecisionLoss(format!("division by {n} exhausts the available precision"))
        })?;
        recursive.push(next);
    }
    let closed = (0..=nmax)
        .map(|n| {
            f0.map_terms(|m, c| {
                let i = mono_degree(m) - d;
                if i == 0 {
                    c.clone()
                } else {
                    let b = crate::series::binomial(i as u64 - 1, n as u64) as i64;
                    let sign = if n % 2 == 0 { 1 } else { -1 };
                    c.mul_int(sign * b)
                }
            })
        })
        .collect();
    Ok(FnSequence { recursive, closed })
}

impl DomainFunc {
    /// Rebuild with each coefficient replaced by `f(monomial, coefficient)`.
    pub fn map_terms(&self, f: impl Fn(&Mono, &PadicScalar) -> PadicScalar) -> DomainFunc {
        let mut out = TruncSeries::zero(self.h - 1, self.dmax(), self.series.zero_coeff());
        for (m, c) in self.terms() {
            out.set(m, f(m, c));
        }
        self.wrap(out)
    }
}

impl DomainFunc {
    /// Random coefficients on every monomial of degree `lo..=dmax`.
    pub fn random<R: rand::Rng + ?Sized>(ctx: &Ctx, lo: u32, dmax: u32, rng: &mut R) -> DomainFunc {
        let h = ctx.degree();
        let space = crate::series::mono_space(h - 1, dmax);
        let mut series = TruncSeries::zero(h - 1, dmax, &ctx.zero());
        for m in space.monos.iter().filter(|m| mono_degree(m) >= lo) {
            series.set(m, ctx.random(rng));
        }
        DomainFunc { h, series }
    }
}

/// `V_s`, spanned by `w^alpha phi_0^s` with `|alpha| <= s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VsSpace {
    pub h: usize,
    pub s: i64,
}

impl VsSpace {
    pub fn new(h: usize, s: i64) -> VsSpace {
        VsSpace { h, s }
    }

    pub fn dimension(&self) -> usize {
        if self.s < 0 {
            0
        } else {
            crate::series::binomial(self.s as u64 + self.h as u64 - 1, self.h as u64 - 1) as usize
        }
    }

    pub fn basis(&self, ctx: &Ctx, dmax: u32) -> Vec<Section> {
        if self.s < 0 {
            return Vec::new();
        }
        let space = crate::series::mono_space(self.h - 1, self.s as u32);
        space
            .monos
            .iter()
            .map(|m| Section::new(DomainFunc::monomial(&ctx.one(), &m[..self.h - 1], dmax), self.s))
            .collect()
    }

    pub fn contains(&self, x: &Section) -> bool {
        x.s == self.s && x.f.terms().all(|(m, _)| self.s >= 0 && (mono_degree(m) as i64) <= self.s)
    }
}
