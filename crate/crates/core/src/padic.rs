//! Precision-tracked arithmetic in the ring of integers of an unramified
//! extension of `Q_p`.
//!
//! An [`UnramContext`] fixes `p`, the degree `e`, an absolute precision cap
//! `N` and a monic modulus that is irreducible mod `p`. Elements are stored as
//! coordinate vectors in the basis `1, x, ..., x^{e-1}`, each coordinate
//! reduced modulo `p^prec` where `prec <= N` is the element's own absolute
//! precision. Binary operations return the smaller of the two precisions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub(crate) type Coords = SmallVec<[u64; 4]>;

/// Largest supported residue modulus; products of two residues must fit `u128`
/// with headroom for accumulating a handful of them.
const MAX_MODULUS: u128 = 1 << 62;

/// The ring `o_e / p^N` together with its Frobenius automorphism.
#[derive(Debug)]
pub struct UnramContext {
    p: u64,
    degree: usize,
    precision: u32,
    /// Low coefficients `c_0..c_{e-1}` of the monic modulus `x^e + sum c_i x^i`.
    modulus: Vec<u64>,
    /// `fold[j]` holds the coordinates of `x^{e+j}` reduced by the modulus.
    fold: Vec<Vec<u64>>,
    /// `frobenius[i][k]` is the `i`-th coordinate of `sigma(x^k)`.
    frobenius: Vec<Vec<u64>>,
    powers: Vec<u64>,
}

pub type Ctx = Arc<UnramContext>;

/// JSON shape of a context: `{p, e, N, modulus, frobenius}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSpec {
    pub p: u64,
    pub e: usize,
    #[serde(rename = "N")]
    pub n: u32,
    pub modulus: Vec<u64>,
    pub frobenius: Vec<Vec<u64>>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(p: u64, mut n: u128) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p as u128 == 0 {
        n /= p as u128;
        v += 1;
    }
    v
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

// ---- polynomial helpers over F_p used for the modulus search -------------

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo the monic polynomial `b` over `F_p`.
fn poly_rem_fp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bi) in b.iter().enumerate() {
                let t = (lead * bi) % p;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
        r.pop();
    }
    poly_trim(r)
}

/// Monic polynomials of degree `d` over `F_p`, in increasing order of the
/// integer `sum c_i p^i` formed by the non-leading coefficients.
fn monic_polys(p: u64, d: usize) -> impl Iterator<Item = Vec<u64>> {
    let count = p.pow(d as u32);
    (0..count).map(move |mut code| {
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push(code % p);
            code /= p;
        }
        c.push(1);
        c
    })
}

fn is_irreducible_fp(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    for k in 1..=d / 2 {
        for g in monic_polys(p, k) {
            if poly_rem_fp(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least monic irreducible polynomial of degree `e` over
/// `F_p`; returned as the full coefficient list `c_0..c_{e-1}, 1`.
pub fn least_irreducible(p: u64, e: usize) -> Vec<u64> {
    monic_polys(p, e)
        .find(|f| is_irreducible_fp(f, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Builds `o_e / p^N`: the modulus is the least irreducible of degree `e` over
/// `F_p` and the Frobenius matrix is obtained by Hensel-lifting the image of
/// `x^p` to a root of the modulus.
pub fn make_context(p: u64, e: usize, n: u32) -> Result<Ctx> {
    if !is_prime(p) {
        return Err(Error::InvalidContext(format!("{p} is not prime")));
    }
    if e == 0 || n == 0 {
        return Err(Error::InvalidContext("degree and precision must be >= 1".into()));
    }
    let modulus = least_irreducible(p, e);
    build_context(p, e, n, modulus[..e].to_vec())
}

fn build_context(p: u64, e: usize, n: u32, modulus: Vec<u64>) -> Result<Ctx> {
    let mut powers = Vec::with_capacity(n as usize + 1);
    let mut acc: u128 = 1;
    for _ in 0..=n {
        if acc > MAX_MODULUS {
            return Err(Error::PrecisionTooLarge { p, n });
        }
        powers.push(acc as u64);
        acc *= p as u128;
    }
    let m = powers[n as usize];
    // x^e = -sum c_i x^i; fold[j] = x^{e+j}
    let mut fold: Vec<Vec<u64>> = Vec::with_capacity(e.saturating_sub(1));
    let mut cur: Vec<u64> = modulus.iter().map(|&c| (m - c % m) % m).collect();
    for _ in 0..e.saturating_sub(1) {
        fold.push(cur.clone());
        // multiply cur by x
        let top = cur[e - 1];
        let mut next = vec![0u64; e];
        for i in (1..e).rev() {
            next[i] = cur[i - 1];
        }
        for (i, slot) in next.iter_mut().enumerate() {
            let t = mulmod(top, (m - modulus[i] % m) % m, m);
            *slot = (*slot + t) % m;
        }
        cur = next;
    }
    let identity: Vec<Vec<u64>> = (0..e)
        .map(|i| (0..e).map(|k| u64::from(i == k)).collect())
        .collect();
    let provisional = Arc::new(UnramContext {
        p,
        degree: e,
        precision: n,
        modulus: modulus.clone(),
        fold: fold.clone(),
        frobenius: identity,
        powers: powers.clone(),
    });
    let frobenius = if e == 1 {
        vec![vec![1]]
    } else {
        frobenius_matrix(&provisional)?
    };
    Ok(Arc::new(UnramContext {
        p,
        degree: e,
        precision: n,
        modulus,
        fold,
        frobenius,
        powers,
    }))
}

/// Hensel lift of the residue Frobenius: the root `theta` of the modulus with
/// `theta = x^p mod p`; column `k` of the result is `theta^k`.
fn frobenius_matrix(ctx: &Ctx) -> Result<Vec<Vec<u64>>> {
    let e = ctx.degree;
    let x = ctx.generator();
    let mut theta = x.pow(ctx.p);
    let eval = |t: &PadicScalar| -> (PadicScalar, PadicScalar) {
        // g(t) and g'(t) by Horner, g monic of degree e
        let mut g = ctx.one();
        let mut dg = ctx.zero();
        for i in (0..e).rev() {
            dg = &(&dg * t) + &g;
            g = &(&g * t) + &ctx.from_u64(ctx.modulus[i]);
        }
        (g, dg)
    };
    let mut iterations = 0;
    loop {
        let (g, dg) = eval(&theta);
        if g.is_zero() {
            break;
        }
        iterations += 1;
        if iterations > 2 * ctx.precision + 4 {
            return Err(Error::InvalidContext("Hensel lift of Frobenius did not converge".into()));
        }
        theta = &theta - &(&g * &dg.inv()?);
    }
    let mut cols = Vec::with_capacity(e);
    let mut pw = ctx.one();
    for _ in 0..e {
        cols.push(pw.coords.to_vec());
        pw = &pw * &theta;
    }
    Ok((0..e).map(|i| (0..e).map(|k| cols[k][i]).collect()).collect())
}

impl UnramContext {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Full monic modulus coefficients `c_0..c_{e-1}, 1`.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    pub fn frobenius_matrix(&self) -> &[Vec<u64>] {
        &self.frobenius
    }

    /// `p^k` as an integer, `k <= N`.
    pub fn p_pow(&self, k: u32) -> u64 {
        self.powers[k as usize]
    }

    pub fn same_field(&self, other: &UnramContext) -> bool {
        self.p == other.p && self.degree == other.degree && self.modulus == other.modulus
    }

    pub fn spec(&self) -> ContextSpec {
        ContextSpec {
            p: self.p,
            e: self.degree,
            n: self.precision,
            modulus: self.modulus(),
            frobenius: self.frobenius.clone(),
        }
    }

    /// Rebuilds a context from its JSON shape, checking it against a fresh
    /// construction with the same parameters.
    pub fn from_spec(spec: &ContextSpec) -> Result<Ctx> {
        let ctx = make_context(spec.p, spec.e, spec.n)?;
        if ctx.spec() != *spec {
            return Err(Error::Malformed("context does not match its canonical construction".into()));
        }
        Ok(ctx)
    }
}

/// Zero context helpers live on `Arc<UnramContext>` so elements can hold a
/// shared handle.
pub trait ContextExt {
    fn zero(&self) -> PadicScalar;
    fn one(&self) -> PadicScalar;
    fn from_int(&self, n: i64) -> PadicScalar;
    fn from_u64(&self, n: u64) -> PadicScalar;
    fn from_coords(&self, coords: &[i64]) -> PadicScalar;
    fn generator(&self) -> PadicScalar;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> PadicScalar;
    fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> PadicScalar;
    /// A random element of the prime subring `Z_p / p^N`.
    fn random_rational<R: Rng + ?Sized>(&self, rng: &mut R) -> PadicScalar;
}

impl ContextExt for Ctx {
    fn zero(&self) -> PadicScalar {
        PadicScalar {
            ctx: self.clone(),
            coords: SmallVec::from_elem(0, self.degree),
            prec: self.precision,
        }
    }

    fn one(&self) -> PadicScalar {
        self.from_u64(1)
    }

    fn from_int(&self, n: i64) -> PadicScalar {
        let m = self.powers[self.precision as usize] as i128;
        let r = (n as i128).rem_euclid(m) as u64;
        self.from_u64(r)
    }

    fn from_u64(&self, n: u64) -> PadicScalar {
        let mut z = self.zero();
        z.coords[0] = n % self.powers[self.precision as usize];
        z
    }

    fn from_coords(&self, coords: &[i64]) -> PadicScalar {
        assert_eq!(coords.len(), self.degree, "coordinate count must equal the degree");
        let m = self.powers[self.precision as usize] as i128;
        PadicScalar {
            ctx: self.clone(),
            coords: coords.iter().map(|&c| (c as i128).rem_euclid(m) as u64).collect(),
            prec: self.precision,
        }
    }

    fn generator(&self) -> PadicScalar {
        let mut z = self.zero();
        if self.degree == 1 {
            // x is the root -c_0 of the linear modulus
            z.coords[0] = (self.powers[self.precision as usize] - self.modulus[0])
                % self.powers[self.precision as usize];
        } else {
            z.coords[1] = 1;
        }
        z
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> PadicScalar {
        let m = self.powers[self.precision as usize];
        PadicScalar {
            ctx: self.clone(),
            coords: (0..self.degree).map(|_| rng.gen_range(0..m)).collect(),
            prec: self.precision,
        }
    }

    fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> PadicScalar {
        loop {
            let a = self.random(rng);
            if a.is_unit() {
                return a;
            }
        }
    }

    fn random_rational<R: Rng + ?Sized>(&self, rng: &mut R) -> PadicScalar {
        let m = self.powers[self.precision as usize];
        self.from_u64(rng.gen_range(0..m))
    }
}

/// Valuation of a scalar, or a lower bound when the scalar vanishes at its
/// precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u32),
    AtLeast(u32),
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// The valuation, or its lower bound.
    pub fn bound(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

/// Element of `o_e / p^prec`.
#[derive(Clone)]
pub struct PadicScalar {
    ctx: Ctx,
    coords: Coords,
    prec: u32,
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + O({}^{})", self.coords.as_slice(), self.ctx.p, self.prec)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.degree == 1 {
            write!(f, "{} + O({}^{})", self.coords[0], self.ctx.p, self.prec)
        } else {
            fmt::Debug::fmt(self, f)
        }
    }
}

impl PadicScalar {
    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    fn modulus(&self) -> u64 {
        self.ctx.powers[self.prec as usize]
    }

    fn check(&self, other: &PadicScalar) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx.same_field(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn reduced(ctx: &Ctx, mut coords: Coords, prec: u32) -> PadicScalar {
        let m = ctx.powers[prec as usize];
        for c in coords.iter_mut() {
            *c %= m;
        }
        PadicScalar { ctx: ctx.clone(), coords, prec }
    }

    pub fn try_add(&self, other: &PadicScalar) -> Result<PadicScalar> {
        self.check(other)?;
        let prec = self.prec.min(other.prec);
        let m = self.ctx.powers[prec as usize];
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| ((a % m) + (b % m)) % m)
            .collect();
        Ok(PadicScalar { ctx: self.ctx.clone(), coords, prec })
    }

    pub fn try_sub(&self, other: &PadicScalar) -> Result<PadicScalar> {
        self.check(other)?;
        let prec = self.prec.min(other.prec);
        let m = self.ctx.powers[prec as usize];
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| ((a % m) + m - (b % m)) % m)
            .collect();
        Ok(PadicScalar { ctx: self.ctx.clone(), coords, prec })
    }

    pub fn try_mul(&self, other: &PadicScalar) -> Result<PadicScalar> {
        self.check(other)?;
        let prec = self.prec.min(other.prec);
        Ok(self.mul_raw(other, prec))
    }

    fn mul_raw(&self, other: &PadicScalar, prec: u32) -> PadicScalar {
        let e = self.ctx.degree;
        let m = self.ctx.powers[prec as usize];
        if e == 1 {
            let c = mulmod(self.coords[0] % m, other.coords[0] % m, m);
            return PadicScalar { ctx: self.ctx.clone(), coords: SmallVec::from_elem(c, 1), prec };
        }
        let mut raw: SmallVec<[u128; 8]> = SmallVec::from_elem(0, 2 * e - 1);
        for (i, &a) in self.coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = a % m;
            for (j, &b) in other.coords.iter().enumerate() {
                raw[i + j] = (raw[i + j] + a as u128 * (b % m) as u128) % m as u128;
            }
        }
        let mut out: Coords = raw[..e].iter().map(|&r| r as u64).collect();
        for (j, &hi) in raw[e..].iter().enumerate() {
            let hi = hi as u64;
            if hi == 0 {
                continue;
            }
            for (slot, &f) in out.iter_mut().zip(&self.ctx.fold[j]) {
                *slot = ((*slot as u128 + hi as u128 * (f % m) as u128) % m as u128) as u64;
            }
        }
        PadicScalar { ctx: self.ctx.clone(), coords: out, prec }
    }

    pub fn pow(&self, mut k: u64) -> PadicScalar {
        let mut base = self.clone();
        let mut acc = self.ctx.one().reduce_precision(self.prec);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    pub fn valuation(&self) -> Valuation {
        let p = self.ctx.p;
        let v = self
            .coords
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| int_valuation(p, c as u128))
            .min();
        match v {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(self.prec),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    /// Multiplicative inverse of a unit by Newton iteration from the
    /// residue-field inverse.
    pub fn inv(&self) -> Result<PadicScalar> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let e = self.ctx.degree as u32;
        let q = (self.ctx.p as u128).pow(e);
        let residue = self.reduce_precision(1);
        // a^{q-2} in F_{p^e}
        let mut y = residue.pow_u128(q - 2).lift_precision(self.prec);
        let two = self.ctx.from_u64(2);
        let mut known = 1u32;
        while known < self.prec {
            y = &y * &(&two - &(self * &y));
            known *= 2;
        }
        Ok(y.reduce_precision(self.prec))
    }

    fn pow_u128(&self, mut k: u128) -> PadicScalar {
        let mut base = self.clone();
        let mut acc = self.ctx.one().reduce_precision(self.prec);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// `sigma^k(self)`.
    pub fn frobenius(&self, k: usize) -> PadicScalar {
        let e = self.ctx.degree;
        let k = k % e;
        let mut cur = self.clone();
        let m = self.modulus();
        for _ in 0..k {
            let mut out: Coords = SmallVec::from_elem(0, e);
            for (i, slot) in out.iter_mut().enumerate() {
                let mut acc: u128 = 0;
                for (kk, &a) in cur.coords.iter().enumerate() {
                    acc = (acc + a as u128 * (self.ctx.frobenius[i][kk] % m) as u128) % m as u128;
                }
                *slot = acc as u64;
            }
            cur = PadicScalar { ctx: self.ctx.clone(), coords: out, prec: self.prec };
        }
        cur
    }

    /// True when all non-constant coordinates vanish (the element lies in `Z_p`).
    pub fn is_rational(&self) -> bool {
        self.coords[1..].iter().all(|&c| c == 0)
    }

    /// Reduce to a lower absolute precision.
    pub fn reduce_precision(&self, prec: u32) -> PadicScalar {
        let prec = prec.min(self.prec);
        PadicScalar::reduced(&self.ctx, self.coords.clone(), prec)
    }

    /// Reinterpret the stored representative as exact and raise the declared
    /// precision. Only valid when the caller knows the extra digits.
    pub fn lift_precision(&self, prec: u32) -> PadicScalar {
        PadicScalar { ctx: self.ctx.clone(), coords: self.coords.clone(), prec: prec.min(self.ctx.precision) }
    }

    /// Move the element into another context over the same field.
    pub fn rehome(&self, ctx: &Ctx) -> Result<PadicScalar> {
        if !self.ctx.same_field(ctx) {
            return Err(Error::ContextMismatch);
        }
        let prec = self.prec.min(ctx.precision);
        Ok(PadicScalar::reduced(ctx, self.coords.clone(), prec))
    }

    /// `p^k * self`; the absolute precision grows by `k` up to the context cap.
    pub fn mul_p_pow(&self, k: u32) -> PadicScalar {
        let prec = (self.prec + k).min(self.ctx.precision);
        let m = self.ctx.powers[prec as usize];
        let pk = if k > self.ctx.precision { 0 } else { self.ctx.powers[k as usize] };
        let coords = self.coords.iter().map(|&c| mulmod(c, pk, m)).collect();
        PadicScalar { ctx: self.ctx.clone(), coords, prec }
    }

    /// Exact division by `p^k`; the absolute precision drops by `k`.
    pub fn div_p_pow(&self, k: u32) -> Result<PadicScalar> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k > self.prec {
            return Err(Error::PrecisionLoss(format!(
                "dividing by p^{k} needs more than the {} available digits",
                self.prec
            )));
        }
        if self.valuation().bound() < k {
            return Err(Error::PrecisionLoss(format!("element is not divisible by p^{k}")));
        }
        let pk = self.ctx.powers[k as usize];
        let coords = self.coords.iter().map(|&c| c / pk).collect();
        Ok(PadicScalar::reduced(&self.ctx, coords, self.prec - k))
    }

    /// Division by a nonzero integer, exact in `o_e`.
    pub fn div_int(&self, n: i64) -> Result<PadicScalar> {
        if n == 0 {
            return Err(Error::NonUnit);
        }
        let p = self.ctx.p;
        let v = int_valuation(p, n.unsigned_abs() as u128);
        let unit = n / (p as i64).pow(v);
        let q = self.div_p_pow(v)?;
        let u = self.ctx.from_int(unit).reduce_precision(q.prec).inv()?;
        Ok(&q * &u)
    }

    pub fn mul_int(&self, n: i64) -> PadicScalar {
        self * &self.ctx.from_int(n)
    }

    /// Equality at the common precision.
    pub fn eq_at_precision(&self, other: &PadicScalar) -> bool {
        self.try_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// Signed representative of a `Z_p` element in `(-p^prec/2, p^prec/2]`.
    pub fn to_signed(&self) -> i128 {
        let m = self.modulus() as i128;
        let c = self.coords[0] as i128;
        if c > m / 2 {
            c - m
        } else {
            c
        }
    }
}

impl PartialEq for PadicScalar {
    fn eq(&self, other: &Self) -> bool {
        self.eq_at_precision(other)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&PadicScalar> for &PadicScalar {
            type Output = PadicScalar;
            fn $m(self, rhs: &PadicScalar) -> PadicScalar {
                self.$try(rhs).expect("scalars from mismatched contexts")
            }
        }
        impl $tr<PadicScalar> for PadicScalar {
            type Output = PadicScalar;
            fn $m(self, rhs: PadicScalar) -> PadicScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&PadicScalar> for PadicScalar {
            type Output = PadicScalar;
            fn $m(self, rhs: &PadicScalar) -> PadicScalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        let m = self.modulus();
        let coords = self.coords.iter().map(|&c| (m - c % m) % m).collect();
        PadicScalar { ctx: self.ctx.clone(), coords, prec: self.prec }
    }
}

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        -&self
    }
}
