//! Dense truncated power series in up to four variables.
//!
//! Monomials are ordered by total degree and, within a degree, by the first
//! exponent descending (then recursively on the remaining variables). The
//! coefficient vector of a series is indexed by the rank of its monomial in
//! this order, so every series of total degree `<= D` occupies exactly
//! `C(D+n, n)` slots.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{ContextExt, Ctx, PadicScalar, Valuation};

pub const MAX_VARS: usize = 4;
pub type Mono = [u16; MAX_VARS];

/// Ring operations required of series coefficients.
pub trait Coeff: Clone + fmt::Debug + PartialEq + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn int_like(&self, n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div_int(&self, n: i64) -> Result<Self>;
    /// Coefficient serialization for JSON term lists.
    fn to_json(&self) -> serde_json::Value;
}

impl Coeff for PadicScalar {
    fn zero_like(&self) -> Self {
        self.ctx().zero()
    }
    fn one_like(&self) -> Self {
        self.ctx().one()
    }
    fn int_like(&self, n: i64) -> Self {
        self.ctx().from_int(n)
    }
    fn is_zero(&self) -> bool {
        PadicScalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_int(&self, n: i64) -> Result<Self> {
        PadicScalar::div_int(self, n)
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.coords())
    }
}

pub fn mono_degree(m: &Mono) -> u32 {
    m.iter().map(|&a| a as u32).sum()
}

pub fn mono_add(a: &Mono, b: &Mono) -> Mono {
    let mut c = [0u16; MAX_VARS];
    for i in 0..MAX_VARS {
        c[i] = a[i] + b[i];
    }
    c
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

/// Number of monomials of total degree `<= d` in `n` variables.
pub fn count_upto(n: usize, d: i64) -> usize {
    if d < 0 {
        0
    } else {
        binomial(d as u64 + n as u64, n as u64) as usize
    }
}

fn rank_in_degree(m: &[u16], n: usize, d: u32) -> usize {
    if n <= 1 {
        return 0;
    }
    let a = m[0] as u32;
    let above = if d > a { count_upto(n - 1, (d - a - 1) as i64) } else { 0 };
    above + rank_in_degree(&m[1..], n - 1, d - a)
}

/// Position of `m` in the graded order on monomials in `n` variables.
pub fn rank(m: &Mono, n: usize) -> usize {
    let d = mono_degree(m);
    count_upto(n, d as i64 - 1) + rank_in_degree(&m[..n], n, d)
}

fn gen_degree(n: usize, d: u32, prefix: &mut Vec<u16>, out: &mut Vec<Mono>) {
    if n == 0 {
        if d == 0 {
            let mut m = [0u16; MAX_VARS];
            m[..prefix.len()].copy_from_slice(prefix);
            out.push(m);
        }
        return;
    }
    if n == 1 {
        prefix.push(d as u16);
        gen_degree(0, 0, prefix, out);
        prefix.pop();
        return;
    }
    for a in (0..=d).rev() {
        prefix.push(a as u16);
        gen_degree(n - 1, d - a, prefix, out);
        prefix.pop();
    }
}

/// Monomials of degree `<= dmax` in `nvars` variables, in rank order.
#[derive(Debug)]
pub struct MonoSpace {
    pub nvars: usize,
    pub dmax: u32,
    pub monos: Vec<Mono>,
    /// `degree_end[d]` is the number of monomials of degree `<= d`.
    pub degree_end: Vec<usize>,
}

type SpaceCache = Mutex<HashMap<(usize, u32), Arc<MonoSpace>>>;

pub fn mono_space(nvars: usize, dmax: u32) -> Arc<MonoSpace> {
    assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables are supported");
    static CACHE: OnceLock<SpaceCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("monomial cache poisoned");
    guard
        .entry((nvars, dmax))
        .or_insert_with(|| {
            let mut monos = Vec::with_capacity(count_upto(nvars, dmax as i64));
            let mut degree_end = Vec::with_capacity(dmax as usize + 1);
            for d in 0..=dmax {
                gen_degree(nvars, d, &mut Vec::new(), &mut monos);
                degree_end.push(monos.len());
            }
            Arc::new(MonoSpace { nvars, dmax, monos, degree_end })
        })
        .clone()
}

/// Truncated power series `sum c_alpha X^alpha`, `|alpha| <= dmax`.
#[derive(Clone)]
pub struct TruncSeries<C: Coeff> {
    space: Arc<MonoSpace>,
    coeffs: Vec<C>,
    zero: C,
}

impl<C: Coeff> fmt::Debug for TruncSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_map();
        for (m, c) in self.terms() {
            list.entry(&&m[..self.nvars()], c);
        }
        list.finish()
    }
}

impl<C: Coeff> PartialEq for TruncSeries<C> {
    /// Coefficientwise equality at precision over the common degree range.
    fn eq(&self, other: &Self) -> bool {
        if self.nvars() != other.nvars() {
            return false;
        }
        let d = self.dmax().min(other.dmax());
        let end = self.space.degree_end[d as usize];
        self.coeffs[..end].iter().zip(&other.coeffs[..end]).all(|(a, b)| a.sub(b).is_zero())
    }
}

impl<C: Coeff> TruncSeries<C> {
    pub fn zero(nvars: usize, dmax: u32, zero: &C) -> Self {
        let space = mono_space(nvars, dmax);
        let z = zero.zero_like();
        TruncSeries { coeffs: vec![z.clone(); space.monos.len()], space, zero: z }
    }

    pub fn constant(nvars: usize, dmax: u32, c: &C) -> Self {
        let mut s = Self::zero(nvars, dmax, c);
        s.coeffs[0] = c.clone();
        s
    }

    pub fn one(nvars: usize, dmax: u32, zero: &C) -> Self {
        Self::constant(nvars, dmax, &zero.one_like())
    }

    /// The coordinate function `X_i`.
    pub fn var(nvars: usize, dmax: u32, i: usize, zero: &C) -> Self {
        let mut m = [0u16; MAX_VARS];
        m[i] = 1;
        Self::monomial(nvars, dmax, m, &zero.one_like())
    }

    pub fn monomial(nvars: usize, dmax: u32, m: Mono, c: &C) -> Self {
        let mut s = Self::zero(nvars, dmax, c);
        if mono_degree(&m) <= dmax {
            s.coeffs[rank(&m, nvars)] = c.clone();
        }
        s
    }

    /// Builds a series from `(exponents, coefficient)` pairs; terms above
    /// `dmax` are dropped.
    pub fn from_terms(nvars: usize, dmax: u32, zero: &C, terms: &[(Mono, C)]) -> Self {
        let mut s = Self::zero(nvars, dmax, zero);
        for (m, c) in terms {
            if mono_degree(m) <= dmax {
                let r = rank(m, nvars);
                s.coeffs[r] = s.coeffs[r].add(c);
            }
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.space.nvars
    }

    pub fn dmax(&self) -> u32 {
        self.space.dmax
    }

    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }

    pub fn space(&self) -> &Arc<MonoSpace> {
        &self.space
    }

    pub fn coeff(&self, m: &Mono) -> C {
        if mono_degree(m) > self.dmax() {
            return self.zero.clone();
        }
        self.coeffs[rank(m, self.nvars())].clone()
    }

    pub fn coeff_ref(&self, m: &Mono) -> Option<&C> {
        if mono_degree(m) > self.dmax() {
            None
        } else {
            Some(&self.coeffs[rank(m, self.nvars())])
        }
    }

    /// Sets a coefficient; a monomial above `dmax` is ignored.
    pub fn set(&mut self, m: &Mono, c: C) {
        if mono_degree(m) <= self.dmax() {
            let r = rank(m, self.nvars());
            self.coeffs[r] = c;
        }
    }

    pub fn coeff_at_rank(&self, r: usize) -> &C {
        &self.coeffs[r]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> + '_ {
        self.space.monos.iter().zip(&self.coeffs).filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms().map(|(m, _)| mono_degree(m)).next()
    }

    /// Highest total degree carrying a nonzero coefficient.
    pub fn degree(&self) -> Option<u32> {
        self.terms().map(|(m, _)| mono_degree(m)).last()
    }

    /// Change the truncation bound, dropping or zero-padding as needed.
    pub fn with_dmax(&self, dmax: u32) -> Self {
        let mut s = Self::zero(self.nvars(), dmax, &self.zero);
        let end = s.coeffs.len().min(self.coeffs.len());
        s.coeffs[..end].clone_from_slice(&self.coeffs[..end]);
        s
    }

    /// Homogeneous part of degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut s = Self::zero(self.nvars(), self.dmax(), &self.zero);
        if d <= self.dmax() {
            let start = if d == 0 { 0 } else { self.space.degree_end[d as usize - 1] };
            let end = self.space.degree_end[d as usize];
            s.coeffs[start..end].clone_from_slice(&self.coeffs[start..end]);
        }
        s
    }

    pub fn map<F: Fn(&C) -> C>(&self, f: F) -> Self {
        TruncSeries {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
            zero: self.zero.clone(),
        }
    }

    pub fn try_map<F: Fn(&C) -> Result<C>>(&self, f: F) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(TruncSeries { space: self.space.clone(), coeffs, zero: self.zero.clone() })
    }

    /// Map coefficients into another coefficient ring.
    pub fn map_into<D: Coeff, F: Fn(&C) -> D>(&self, zero: &D, f: F) -> TruncSeries<D> {
        TruncSeries {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
            zero: zero.zero_like(),
        }
    }

    fn zip_with<F: Fn(&C, &C) -> C>(&self, other: &Self, f: F) -> Self {
        assert_eq!(self.nvars(), other.nvars(), "series in different variable counts");
        let dmax = self.dmax().min(other.dmax());
        let n = self.space.degree_end[dmax as usize];
        TruncSeries {
            space: mono_space(self.nvars(), dmax),
            coeffs: self.coeffs[..n].iter().zip(&other.coeffs[..n]).map(|(a, b)| f(a, b)).collect(),
            zero: self.zero.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|a| a.mul(c))
    }

    fn nonzero(&self) -> Vec<(usize, &C)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Truncated product; the result is bounded by the smaller `dmax`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars(), other.nvars(), "series in different variable counts");
        let dmax = self.dmax().min(other.dmax());
        let n = self.nvars();
        let mut out = Self::zero(n, dmax, &self.zero);
        let a_terms = self.nonzero();
        let b_terms = other.nonzero();
        for &(i, a) in &a_terms {
            let ma = &self.space.monos[i];
            let da = mono_degree(ma);
            if da > dmax {
                break;
            }
            let limit = out.space.degree_end[(dmax - da) as usize];
            for &(j, b) in &b_terms {
                if j >= limit {
                    break;
                }
                let mb = &other.space.monos[j];
                let r = rank(&mono_add(ma, mb), n);
                out.coeffs[r] = out.coeffs[r].add(&a.mul(b));
            }
        }
        out
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::one(self.nvars(), self.dmax(), &self.zero);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse of a series with unit constant term, given the
    /// inverse of that constant.
    pub fn inverse_with(&self, c0_inv: &C) -> Self {
        // 1/(c0 (1 + e)) = c0^{-1} sum (-e)^k, with e of positive order
        let unit = self.scale(c0_inv);
        let mut eps = unit.clone();
        eps.coeffs[0] = self.zero.clone();
        let neg_eps = eps.neg();
        let mut acc = Self::one(self.nvars(), self.dmax(), &self.zero);
        let mut term = acc.clone();
        for _ in 0..self.dmax() {
            term = term.mul(&neg_eps);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        acc.scale(c0_inv)
    }

    /// Partial derivative in variable `v`.
    pub fn derivative(&self, v: usize) -> Self {
        let mut out = Self::zero(self.nvars(), self.dmax(), &self.zero);
        for (m, c) in self.terms() {
            if m[v] == 0 {
                continue;
            }
            let mut m2 = *m;
            m2[v] -= 1;
            let r = rank(&m2, self.nvars());
            out.coeffs[r] = c.mul(&c.int_like(m[v] as i64));
        }
        out
    }

    /// Formal antiderivative in variable `v`; terms pushed above `dmax` are
    /// dropped.
    pub fn integrate(&self, v: usize) -> Result<Self> {
        let mut out = Self::zero(self.nvars(), self.dmax(), &self.zero);
        for (m, c) in self.terms() {
            let mut m2 = *m;
            m2[v] += 1;
            if mono_degree(&m2) > self.dmax() {
                continue;
            }
            let q = c.div_int(m2[v] as i64).map_err(|_| {
                Error::PrecisionLoss(format!("integration exhausts precision at degree {}", mono_degree(&m2)))
            })?;
            let r = rank(&m2, self.nvars());
            out.coeffs[r] = q;
        }
        Ok(out)
    }

    /// Substitute `args[i]` for variable `i`. The arguments share a variable
    /// count and the result is truncated at the smallest argument bound.
    pub fn substitute(&self, args: &[TruncSeries<C>]) -> TruncSeries<C> {
        let d = self.degree().unwrap_or(0);
        PowerTable::new(args, d).apply(self)
    }

    /// Evaluate the truncated series at a point of the coefficient ring.
    pub fn eval(&self, point: &[C]) -> C {
        let mut acc = self.zero.clone();
        for (m, c) in self.terms() {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                for _ in 0..m[i] {
                    t = t.mul(x);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// JSON term list `{vars, Dmax, terms: [[exponents, coeff]]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms()
            .map(|(m, c)| serde_json::json!([&m[..self.nvars()], c.to_json()]))
            .collect();
        serde_json::json!({"vars": self.nvars(), "Dmax": self.dmax(), "terms": terms})
    }
}

impl TruncSeries<PadicScalar> {
    /// Coefficients reduced to the residue field.
    pub fn reduce_mod_p(&self) -> Self {
        self.map(|c| c.reduce_precision(1))
    }

    pub fn reduce_precision(&self, prec: u32) -> Self {
        self.map(|c| c.reduce_precision(prec))
    }

    pub fn ctx(&self) -> &Ctx {
        self.zero.ctx()
    }

    /// Minimum coefficient valuation.
    pub fn min_valuation(&self) -> Valuation {
        let prec = self.coeffs.iter().map(|c| c.precision()).min().unwrap_or(0);
        self.terms()
            .filter_map(|(_, c)| c.valuation().finite())
            .min()
            .map(Valuation::Finite)
            .unwrap_or(Valuation::AtLeast(prec))
    }

    pub fn from_json(ctx: &Ctx, value: &serde_json::Value) -> Result<Self> {
        let parsed: SeriesJson = serde_json::from_value(value.clone())
            .map_err(|e| Error::Malformed(e.to_string()))?;
        let zero = ctx.zero();
        let mut s = Self::zero(parsed.vars, parsed.dmax, &zero);
        for (exps, coords) in parsed.terms {
            if exps.len() != parsed.vars || coords.len() != ctx.degree() {
                return Err(Error::Malformed("term shape does not match the series".into()));
            }
            let mut m = [0u16; MAX_VARS];
            m[..exps.len()].copy_from_slice(&exps);
            let c: Vec<i64> = coords.iter().map(|&x| x as i64).collect();
            s.set(&m, ctx.from_coords(&c));
        }
        Ok(s)
    }
}

#[derive(Deserialize, Serialize)]
struct SeriesJson {
    vars: usize,
    #[serde(rename = "Dmax")]
    dmax: u32,
    terms: Vec<(Vec<u16>, Vec<u64>)>,
}

/// Cached products `args^alpha` for all monomials of degree `<= d`, used to
/// substitute many series into the same arguments.
pub struct PowerTable<C: Coeff> {
    nvars: usize,
    prods: Vec<TruncSeries<C>>,
}

impl<C: Coeff> PowerTable<C> {
    pub fn new(args: &[TruncSeries<C>], d: u32) -> Self {
        let n = args.len();
        assert!(!args.is_empty() || d == 0 || n == 0);
        let space = mono_space(n, d);
        let (m, dmax, zero) = match args.first() {
            Some(a) => (a.nvars(), args.iter().map(|a| a.dmax()).min().unwrap(), a.zero.clone()),
            None => panic!("substitution needs at least one argument"),
        };
        let mut prods: Vec<TruncSeries<C>> = Vec::with_capacity(space.monos.len());
        for (idx, mono) in space.monos.iter().enumerate() {
            if idx == 0 {
                prods.push(TruncSeries::one(m, dmax, &zero));
                continue;
            }
            // peel the last variable with a positive exponent
            let k = (0..n).rev().find(|&i| mono[i] > 0).unwrap();
            let mut prev = *mono;
            prev[k] -= 1;
            let p = prods[rank(&prev, n)].mul(&args[k].with_dmax(dmax));
            prods.push(p);
        }
        PowerTable { nvars: n, prods }
    }

    pub fn apply(&self, f: &TruncSeries<C>) -> TruncSeries<C> {
        assert_eq!(f.nvars(), self.nvars, "substitution arity mismatch");
        let template = &self.prods[0];
        let mut out = TruncSeries::zero(template.nvars(), template.dmax(), &template.zero);
        for (mono, c) in f.terms() {
            let r = rank(mono, self.nvars);
            let prod = self
                .prods
                .get(r)
                .expect("power table built below the degree of the substituted series");
            for (slot, b) in out.coeffs.iter_mut().zip(&prod.coeffs) {
                if !b.is_zero() {
                    *slot = slot.add(&c.mul(b));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    fn mono(e: &[u16]) -> Mono {
        let mut m = [0u16; MAX_VARS];
        m[..e.len()].copy_from_slice(e);
        m
    }

    #[test]
    fn rank_matches_enumeration() {
        for n in 0..=4 {
            let sp = mono_space(n, 7);
            for (i, m) in sp.monos.iter().enumerate() {
                assert_eq!(rank(m, n), i);
            }
            assert_eq!(sp.monos.len(), count_upto(n, 7));
        }
    }

    #[test]
    fn derivative_of_cube() {
        let ctx = make_context(5, 1, 8).unwrap();
        let z = ctx.zero();
        let x3 = TruncSeries::monomial(1, 10, mono(&[3]), &ctx.one());
        let d = x3.derivative(0);
        assert_eq!(d, TruncSeries::monomial(1, 10, mono(&[2]), &ctx.from_u64(3)));
        let x = TruncSeries::var(1, 10, 0, &z);
        let f = x.add(&x.mul(&x));
        assert_eq!(f.substitute(&[x.clone()]), f);
    }

    #[test]
    fn product_and_power_agree() {
        let ctx = make_context(3, 2, 6).unwrap();
        let z = ctx.zero();
        let x = TruncSeries::var(2, 9, 0, &z);
        let y = TruncSeries::var(2, 9, 1, &z);
        let s = x.add(&y).add(&TruncSeries::one(2, 9, &z));
        let cube = s.mul(&s).mul(&s);
        assert_eq!(s.pow(3), cube);
        // binomial coefficients of (1 + x + y)^3 at x y
        assert_eq!(cube.coeff(&mono(&[1, 1])), ctx.from_u64(6));
    }

    #[test]
    fn inverse_of_one_plus_x() {
        let ctx = make_context(3, 1, 6).unwrap();
        let z = ctx.zero();
        let s = TruncSeries::var(1, 12, 0, &z).add(&TruncSeries::one(1, 12, &z));
        let inv = s.inverse_with(&ctx.one());
        assert_eq!(inv.mul(&s), TruncSeries::one(1, 12, &z));
    }
}
