//! One-dimensional formal modules over `Z_p`: Lubin-Tate laws built by the
//! classical degree-by-degree induction, the additive and multiplicative
//! laws, endomorphism series `[a]`, logarithms, heights, endomorphism checks
//! and level structures over quotient rings.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{int_valuation, make_context, ContextExt, Ctx, PadicScalar};
use crate::quotient::{QuotElem, QuotRing, QuotRingExt};
use crate::series::{Coeff, Mono, PowerTable, TruncSeries, MAX_VARS};

fn m1(a: u16) -> Mono {
    let mut m = [0u16; MAX_VARS];
    m[0] = a;
    m
}

fn m2(a: u16, b: u16) -> Mono {
    let mut m = [0u16; MAX_VARS];
    m[0] = a;
    m[1] = b;
    m
}

#[derive(Clone, Debug)]
enum Kind {
    Additive,
    Multiplicative,
    /// The Frobenius polynomial `f = [p]`, at working precision.
    LubinTate(TruncSeries<PadicScalar>),
}

/// A formal `Z_p`-module `F` with its endomorphisms `[a]`, truncated at
/// `dmax`. When `reduced` is set every series is reported mod `p`.
#[derive(Clone, Debug)]
pub struct FormalModule {
    kind: Kind,
    law: TruncSeries<PadicScalar>,
    ctx: Ctx,
    work: Ctx,
    dmax: u32,
    reduced: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Height {
    Finite(u32),
    Infinite,
}

/// Largest number of `p`-adic digits lost by the induction at degree `dmax`.
fn guard_digits(p: u64, dmax: u32) -> u32 {
    let mut g = 0;
    let mut pk = 1u64;
    while pk < dmax as u64 {
        pk *= p;
        g += 1;
    }
    g + 2
}

/// `f(g)` for a univariate `f`, using one power per stored term of `f`.
fn compose_univariate(f: &TruncSeries<PadicScalar>, g: &TruncSeries<PadicScalar>) -> TruncSeries<PadicScalar> {
    let mut out = TruncSeries::zero(g.nvars(), g.dmax(), g.zero_coeff());
    for (m, c) in f.terms() {
        out = out.add(&g.pow(m[0] as u64).scale(c));
    }
    out
}

fn lift_series(s: &TruncSeries<PadicScalar>, work: &Ctx) -> Result<TruncSeries<PadicScalar>> {
    let zero = work.zero();
    let mut out = TruncSeries::zero(s.nvars(), s.dmax(), &zero);
    for (m, c) in s.terms() {
        out.set(m, c.rehome(work)?.lift_precision(work.precision()));
    }
    Ok(out)
}

/// `c / (p - p^n)` for `c` divisible by `p`, keeping the working precision.
fn correction(c: &PadicScalar, n: u32) -> Result<PadicScalar> {
    let work = c.ctx();
    let full = work.precision();
    let q = c.div_p_pow(1).map_err(|_| {
        Error::NotFrobeniusPoly(format!("the degree-{n} obstruction is not divisible by p"))
    })?;
    let unit = (&work.one() - &work.from_u64(work.p()).pow(n as u64 - 1)).inv()?;
    Ok(&q.lift_precision(full) * &unit)
}

impl FormalModule {
    pub fn law(&self) -> TruncSeries<PadicScalar> {
        self.finish(self.law.clone())
    }

    pub fn dmax(&self) -> u32 {
        self.dmax
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Whether the law is an exact polynomial identity rather than a
    /// truncation of an infinite series.
    pub fn is_exact(&self) -> bool {
        matches!(self.kind, Kind::Additive | Kind::Multiplicative)
    }

    /// The same module with coefficients in the residue field.
    pub fn reduce_mod_p(&self) -> FormalModule {
        FormalModule { reduced: true, ..self.clone() }
    }

    fn finish(&self, s: TruncSeries<PadicScalar>) -> TruncSeries<PadicScalar> {
        let s = s.reduce_precision(self.ctx.precision());
        let zero = self.ctx.zero();
        let mut out = TruncSeries::zero(s.nvars(), s.dmax(), &zero);
        for (m, c) in s.terms() {
            out.set(m, c.rehome(&self.ctx).expect("same prime"));
        }
        if self.reduced {
            out.reduce_mod_p()
        } else {
            out
        }
    }

    /// `[a]` for an integer `a`.
    pub fn mult_int(&self, a: i64) -> Result<TruncSeries<PadicScalar>> {
        self.mult(&self.work.from_int(a))
    }

    /// `[a]` for `a` in `Z_p`: the unique series `aX + ...` commuting with
    /// the module structure.
    pub fn mult(&self, a: &PadicScalar) -> Result<TruncSeries<PadicScalar>> {
        if !a.is_rational() {
            return Err(Error::ConfigInvalid("[a] is defined for a in Z_p".into()));
        }
        let a = a.rehome(&self.work)?.lift_precision(self.work.precision());
        let zero = self.work.zero();
        let d = self.dmax;
        let s = match &self.kind {
            Kind::Additive => TruncSeries::monomial(1, d, m1(1), &a),
            Kind::Multiplicative => {
                // sum C(a, n) X^n, C(a, n) = C(a, n-1) (a - n + 1) / n
                let mut out = TruncSeries::zero(1, d, &zero);
                let mut c = self.work.one();
                for n in 1..=d {
                    c = (&c * &(&a - &self.work.from_int(n as i64 - 1))).div_int(n as i64)?;
                    out.set(&m1(n as u16), c.clone());
                }
                out
            }
            Kind::LubinTate(f) => {
                let mut g = TruncSeries::monomial(1, d, m1(1), &a);
                for n in 2..=d {
                    let fn_ = f.with_dmax(n);
                    let gn = g.with_dmax(n);
                    let lhs = compose_univariate(&fn_, &gn);
                    let rhs = compose_univariate(&gn, &fn_);
                    let e = lhs.sub(&rhs).coeff(&m1(n as u16));
                    if e.is_zero() {
                        continue;
                    }
                    let delta = -&correction(&e, n)?;
                    g.set(&m1(n as u16), &g.coeff(&m1(n as u16)) + &delta);
                }
                g
            }
        };
        Ok(self.finish(s))
    }

    /// `F(x, y)` evaluated in a quotient ring.
    pub fn eval_law(&self, x: &QuotElem, y: &QuotElem) -> Result<QuotElem> {
        let ring = x.ring().clone();
        let law = self.law();
        let mut xp = vec![x.one_like()];
        let mut yp = vec![y.one_like()];
        for k in 1..=self.dmax as usize {
            xp.push(Coeff::mul(&xp[k - 1], x));
            yp.push(Coeff::mul(&yp[k - 1], y));
        }
        let mut acc = ring.zero();
        for (m, c) in law.terms() {
            let c = ring.scalar(&c.rehome(ring.ctx())?);
            let t = Coeff::mul(&Coeff::mul(&c, &xp[m[0] as usize]), &yp[m[1] as usize]);
            acc = Coeff::add(&acc, &t);
        }
        Ok(acc)
    }
}

/// The additive law `X + Y` with `[a] = aX`.
pub fn ga_module(ctx: &Ctx, dmax: u32) -> FormalModule {
    let z = ctx.zero();
    let law = TruncSeries::var(2, dmax, 0, &z).add(&TruncSeries::var(2, dmax, 1, &z));
    FormalModule { kind: Kind::Additive, law, ctx: ctx.clone(), work: ctx.clone(), dmax, reduced: false }
}

/// The multiplicative law `(1+X)(1+Y) - 1` with binomial `[a]`.
pub fn gm_module(p: u64, n: u32, dmax: u32) -> Result<FormalModule> {
    let ctx = make_context(p, 1, n)?;
    // dividing by n! costs v_p(dmax!) digits
    let loss: u32 = (1..=dmax as u128).map(|k| int_valuation(p, k)).sum();
    let work = make_context(p, 1, n + loss)?;
    let z = work.zero();
    let x = TruncSeries::var(2, dmax, 0, &z);
    let y = TruncSeries::var(2, dmax, 1, &z);
    let law = x.add(&y).add(&x.mul(&y));
    Ok(FormalModule { kind: Kind::Multiplicative, law, ctx, work, dmax, reduced: false })
}

/// The Lubin-Tate law attached to a Frobenius polynomial `f` with
/// `f = pX mod deg 2` and `f = X^{p^k} mod p`.
pub fn lt_construct(f: &TruncSeries<PadicScalar>, dmax: u32) -> Result<FormalModule> {
    if f.nvars() != 1 {
        return Err(Error::NotFrobeniusPoly("f must be univariate".into()));
    }
    let ctx = f.ctx().clone();
    if ctx.degree() != 1 {
        return Err(Error::NotFrobeniusPoly("f must have coefficients in Z_p".into()));
    }
    if f.terms().any(|(_, c)| !c.is_rational()) {
        return Err(Error::NotFrobeniusPoly("f must have coefficients in Z_p".into()));
    }
    let p = ctx.p();
    if !f.coeff(&m1(0)).is_zero() || f.coeff(&m1(1)) != ctx.from_u64(p) {
        return Err(Error::NotFrobeniusPoly("f must be pX mod degree 2".into()));
    }
    let residue: Vec<(Mono, PadicScalar)> = f
        .reduce_mod_p()
        .terms()
        .map(|(m, c)| (*m, c.clone()))
        .collect();
    let frobenius_shape = match residue.as_slice() {
        [] => true,
        [(m, c)] => {
            let mut e = m[0] as u64;
            let mut is_power = e > 1;
            while is_power && e > 1 {
                is_power = e % p == 0;
                e /= p;
            }
            is_power && *c == ctx.one().reduce_precision(1)
        }
        _ => false,
    };
    if !frobenius_shape {
        return Err(Error::NotFrobeniusPoly("f must reduce to a power X^{p^k} mod p".into()));
    }
    let work = make_context(p, 1, ctx.precision() + guard_digits(p, dmax))?;
    let fw = lift_series(&f.with_dmax(dmax), &work)?;
    let z = work.zero();
    let mut law = TruncSeries::var(2, dmax, 0, &z).add(&TruncSeries::var(2, dmax, 1, &z));
    for n in 2..=dmax {
        let fn_ = fw.with_dmax(n);
        let ln = law.with_dmax(n);
        let lhs = compose_univariate(&fn_, &ln);
        let fx = fn_.map_into(&z, |c| c.clone());
        let args = [
            TruncSeries::from_terms(2, n, &z, &fx.terms().map(|(m, c)| (m2(m[0], 0), c.clone())).collect::<Vec<_>>()),
            TruncSeries::from_terms(2, n, &z, &fx.terms().map(|(m, c)| (m2(0, m[0]), c.clone())).collect::<Vec<_>>()),
        ];
        let rhs = PowerTable::new(&args, n).apply(&ln);
        let e = lhs.sub(&rhs).homogeneous_part(n);
        for (m, c) in e.terms() {
            let delta = -&correction(c, n)?;
            law.set(m, &law.coeff(m) + &delta);
        }
    }
    Ok(FormalModule { kind: Kind::LubinTate(fw), law, ctx, work, dmax, reduced: false })
}

/// `pX + X^{p^k}` over `Z_p / p^n`.
pub fn frobenius_poly(p: u64, k: u32, n: u32, dmax: u32) -> Result<TruncSeries<PadicScalar>> {
    let ctx = make_context(p, 1, n)?;
    let z = ctx.zero();
    let e = p.pow(k) as u16;
    Ok(TruncSeries::from_terms(1, dmax, &z, &[(m1(1), ctx.from_u64(p)), (m1(e), ctx.one())]))
}

/// A logarithm `p^{-den} L(X)` with integral `L`.
#[derive(Clone, Debug)]
pub struct Logarithm {
    pub den: u32,
    pub num: TruncSeries<PadicScalar>,
}

impl Logarithm {
    /// Coefficient of `X^k` as `(numerator, p-power denominator)` in lowest
    /// terms.
    pub fn coeff(&self, k: u16) -> (PadicScalar, u32) {
        let c = self.num.coeff(&m1(k));
        let v = c.valuation().bound().min(self.den);
        (c.div_p_pow(v).expect("valuation checked"), self.den - v)
    }

    /// `L(F(X,Y)) - L(X) - L(Y)`.
    pub fn additivity_defect(&self, law: &TruncSeries<PadicScalar>) -> TruncSeries<PadicScalar> {
        let n = law.dmax().min(self.num.dmax());
        let z = self.num.zero_coeff().clone();
        let l2 = |v: usize| {
            let terms: Vec<(Mono, PadicScalar)> = self
                .num
                .terms()
                .map(|(m, c)| (if v == 0 { m2(m[0], 0) } else { m2(0, m[0]) }, c.clone()))
                .collect();
            TruncSeries::from_terms(2, n, &z, &terms)
        };
        compose_univariate(&self.num.with_dmax(n), &law.with_dmax(n)).sub(&l2(0)).sub(&l2(1))
    }
}

/// The logarithm: the integral of `F_X(0, X)^{-1} dX`, normalized to `X` in
/// degree 1.
pub fn logarithm(m: &FormalModule) -> Result<Logarithm> {
    if m.reduced {
        return Err(Error::ConfigInvalid("logarithms need p-torsion-free coefficients".into()));
    }
    let law = m.law();
    let ctx = law.ctx().clone();
    let z = ctx.zero();
    let d = m.dmax;
    let p = ctx.p();
    // F_X(0, X): coefficients of X^1 Y^k
    let mut g = TruncSeries::zero(1, d, &z);
    for k in 0..d {
        g.set(&m1(k as u16), law.coeff(&m2(1, k as u16)));
    }
    let inv = g.inverse_with(&g.coeff(&m1(0)).inv()?);
    let den = (1..=d as u128).map(|k| int_valuation(p, k)).max().unwrap_or(0);
    let mut num = TruncSeries::zero(1, d, &z);
    for k in 0..d {
        let n = k as i64 + 1;
        let v = int_valuation(p, n as u128);
        let unit = n / (p as i64).pow(v);
        let b = inv.coeff(&m1(k as u16));
        let c = (&b.mul_p_pow(den - v) * &ctx.from_int(unit).inv()?).reduce_precision(ctx.precision());
        num.set(&m1(n as u16), c);
    }
    Ok(Logarithm { den, num })
}

/// Height of a module over the residue field: `[p](X) = g(X^{p^h})` with
/// `g'(0) != 0`.
pub fn height(m: &FormalModule) -> Result<Height> {
    let p = m.ctx.p();
    let pp = m.mult_int(p as i64)?.reduce_mod_p();
    let lowest = pp.terms().map(|(mono, _)| mono[0] as u64).next();
    match lowest {
        None if matches!(m.kind, Kind::Additive) => Ok(Height::Infinite),
        None => Err(Error::Inconclusive(m.dmax)),
        Some(e) => {
            let mut h = 0;
            let mut q = e;
            while q % p == 0 {
                q /= p;
                h += 1;
            }
            if q != 1 || h == 0 {
                return Err(Error::Malformed(format!("[p] mod p starts in degree {e}, not a power of p")));
            }
            if pp.terms().any(|(mono, _)| mono[0] as u64 % e != 0) {
                return Err(Error::Malformed("[p] mod p is not a series in X^{p^h}".into()));
            }
            Ok(Height::Finite(h))
        }
    }
}

/// Whether `phi` commutes with the law and with `[a]` for each sampled `a`,
/// compared to the module's truncation and precision.
pub fn check_endomorphism(phi: &TruncSeries<PadicScalar>, m: &FormalModule, samples: &[i64]) -> Result<bool> {
    if !phi.coeff(&m1(0)).is_zero() {
        return Err(Error::ConfigInvalid("an endomorphism must vanish at 0".into()));
    }
    let d = m.dmax;
    let law = m.law();
    let z = law.zero_coeff().clone();
    let phi = phi.with_dmax(d).map(|c| c.rehome(law.ctx()).expect("same prime"));
    let phi = if m.reduced { phi.reduce_mod_p() } else { phi };
    let lifted = |v: usize| {
        let terms: Vec<(Mono, PadicScalar)> = phi
            .terms()
            .map(|(mo, c)| (if v == 0 { m2(mo[0], 0) } else { m2(0, mo[0]) }, c.clone()))
            .collect();
        TruncSeries::from_terms(2, d, &z, &terms)
    };
    let lhs = compose_univariate(&phi, &law);
    let rhs = PowerTable::new(&[lifted(0), lifted(1)], law.degree().unwrap_or(1)).apply(&law);
    if lhs != rhs {
        return Ok(false);
    }
    for &a in samples {
        let ma = m.mult_int(a)?;
        if compose_univariate(&phi, &ma) != compose_univariate(&ma, &phi) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `X - phi(alpha)` over all `alpha` in `(p^{-m} Z_p / Z_p)`
/// multiply to a divisor of `[p^m](X)` in `R[X]`, and that `phi` is additive
/// for the law. `points[a]` is the image of `a / p^m`.
pub fn level_structure_check(points: &[QuotElem], m: u32, module: &FormalModule, ring: &Arc<QuotRing>) -> Result<bool> {
    let p = module.ctx.p();
    let order = p.pow(m) as usize;
    if points.len() != order {
        return Err(Error::WrongCardinality { expected: order, got: points.len() });
    }
    let d = module.dmax;
    let rz = ring.zero();
    let one = ring.scalar(&ring.ctx().one());
    // prod (X - t)
    let mut prod = TruncSeries::constant(1, order as u32, &one);
    for t in points {
        let lin = TruncSeries::from_terms(1, order as u32, &rz, &[(m1(0), t.neg()), (m1(1), one.clone())]);
        prod = prod.mul(&lin);
    }
    let target = module.mult_int(p.pow(m) as i64)?;
    let target: TruncSeries<QuotElem> = target.map_into(&rz, |c| ring.scalar(&c.rehome(ring.ctx()).expect("same prime")));
    let top = target.degree().unwrap_or(0).max(order as u32);
    if top > d {
        return Err(Error::DegreeOverflow { needed: top as u64, dmax: d });
    }
    // long division by the monic product
    let mut rem: Vec<QuotElem> = (0..=top).map(|k| target.coeff(&m1(k as u16))).collect();
    for k in (order..=top as usize).rev() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        for i in 0..=order {
            let pc = prod.coeff(&m1(i as u16));
            rem[k - order + i] = rem[k - order + i].sub(&c.mul(&pc));
        }
    }
    if rem[..order].iter().any(|c| !c.is_zero()) {
        return Ok(false);
    }
    for a in 0..order {
        for b in 0..order {
            let sum = module.eval_law(&points[a], &points[b])?;
            if sum != points[(a + b) % order] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The ring `Z_p[x]/([p](X)/X)` for the law of `pX + X^p`, and the level-1
/// points `[a](x)`, `0 <= a < p`.
pub fn level_one_points(module: &FormalModule, precision: u32) -> Result<(Arc<QuotRing>, Vec<QuotElem>)> {
    let p = module.ctx.p();
    let rctx = make_context(p, 1, precision)?;
    let f = module.mult_int(p as i64)?;
    let deg = f.degree().unwrap_or(0) as usize;
    if deg < 2 || f.terms().any(|(m, _)| m[0] == 0) {
        return Err(Error::NotFrobeniusPoly("[p] must be a polynomial with zero constant term".into()));
    }
    // Phi = [p](X)/X must be monic
    if f.coeff(&m1(deg as u16)) != module.ctx.one() {
        return Err(Error::NotFrobeniusPoly("[p] must be monic".into()));
    }
    let phi: Vec<PadicScalar> = (1..deg).map(|k| f.coeff(&m1(k as u16)).rehome(&rctx)).collect::<Result<_>>()?;
    let ring = QuotRing::new(&rctx, phi)?;
    let x = ring.root();
    let mut points = Vec::with_capacity(p as usize);
    for a in 0..p as i64 {
        let s = module.mult_int(a)?;
        let sr: TruncSeries<QuotElem> = s.map_into(&ring.zero(), |c| ring.scalar(&c.rehome(&rctx).expect("same prime")));
        points.push(sr.eval(&[x.clone()]));
    }
    Ok((ring, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lt_module_fixes_p_series() {
        let f = frobenius_poly(3, 1, 6, 10).unwrap();
        let m = lt_construct(&f, 10).unwrap();
        assert_eq!(m.mult_int(3).unwrap(), f);
        assert_eq!(m.mult_int(1).unwrap(), TruncSeries::var(1, 10, 0, &m.ctx().zero()));
        let law = m.law();
        let swapped = PowerTable::new(
            &[TruncSeries::var(2, 10, 1, &m.ctx().zero()), TruncSeries::var(2, 10, 0, &m.ctx().zero())],
            10,
        )
        .apply(&law);
        assert_eq!(law, swapped);
    }

    #[test]
    fn rejects_non_frobenius() {
        let ctx = make_context(3, 1, 6).unwrap();
        let z = ctx.zero();
        let bad = TruncSeries::from_terms(1, 8, &z, &[(m1(1), ctx.from_u64(3)), (m1(2), ctx.one())]);
        assert!(matches!(lt_construct(&bad, 8), Err(Error::NotFrobeniusPoly(_))));
        let bad2 = TruncSeries::from_terms(1, 8, &z, &[(m1(1), ctx.one()), (m1(3), ctx.one())]);
        assert!(matches!(lt_construct(&bad2, 8), Err(Error::NotFrobeniusPoly(_))));
    }

    #[test]
    fn gm_p_series_is_binomial() {
        let m = gm_module(3, 8, 12).unwrap();
        let z = m.ctx().zero();
        let x = TruncSeries::var(1, 12, 0, &z);
        let want = x.add(&TruncSeries::one(1, 12, &z)).pow(3).sub(&TruncSeries::one(1, 12, &z));
        assert_eq!(m.mult_int(3).unwrap(), want);
        assert_eq!(height(&m.reduce_mod_p()).unwrap(), Height::Finite(1));
    }

    #[test]
    fn ga_height_and_log() {
        let ctx = make_context(5, 1, 6).unwrap();
        let m = ga_module(&ctx, 10);
        assert_eq!(height(&m.reduce_mod_p()).unwrap(), Height::Infinite);
        let l = logarithm(&m).unwrap();
        assert_eq!(l.coeff(1), (ctx.one(), 0));
        assert!(l.num.terms().all(|(mo, _)| mo[0] == 1));
    }
}
