//! Coefficients `a_n` of the universal logarithm over `Z_p[u_1..u_{h-1}]`,
//! the period approximants `phi_i^{(n)}` and the norms `||.||_l`.
//!
//! A `UnivPoly` is `p^{-den} * sum c_beta u^beta` with integral `c_beta`.

use std::collections::BTreeMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::padic::{ContextExt, Ctx, PadicScalar};

#[derive(Clone, Debug)]
pub struct UnivPoly {
    h: usize,
    ctx: Ctx,
    dmax: u32,
    den: u32,
    terms: BTreeMap<Vec<u16>, PadicScalar>,
}

impl PartialEq for UnivPoly {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

fn degree(beta: &[u16]) -> u64 {
    beta.iter().map(|&b| b as u64).sum()
}

impl UnivPoly {
    pub fn zero(ctx: &Ctx, h: usize, dmax: u32) -> UnivPoly {
        UnivPoly { h, ctx: ctx.clone(), dmax, den: 0, terms: BTreeMap::new() }
    }

    pub fn constant(c: &PadicScalar, h: usize, dmax: u32) -> UnivPoly {
        let mut out = UnivPoly::zero(c.ctx(), h, dmax);
        if !c.is_zero() {
            out.terms.insert(vec![0; h - 1], c.clone());
        }
        out
    }

    /// `c p^{-den} u^beta`.
    pub fn monomial(c: &PadicScalar, den: u32, beta: &[u16], dmax: u32) -> Result<UnivPoly> {
        let h = beta.len() + 1;
        if degree(beta) > dmax as u64 {
            return Err(Error::DegreeOverflow { needed: degree(beta), dmax });
        }
        let mut out = UnivPoly::zero(c.ctx(), h, dmax);
        out.den = den;
        if !c.is_zero() {
            out.terms.insert(beta.to_vec(), c.clone());
        }
        Ok(out)
    }

    /// `u_i`, `1 <= i <= h-1`.
    pub fn u(ctx: &Ctx, h: usize, i: usize, dmax: u32) -> UnivPoly {
        let mut beta = vec![0; h - 1];
        beta[i - 1] = 1;
        UnivPoly::monomial(&ctx.one(), 0, &beta, dmax).expect("degree one fits")
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn dmax(&self) -> u32 {
        self.dmax
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// The stored exponent `den`, not necessarily in lowest terms.
    pub fn raw_denominator(&self) -> u32 {
        self.den
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &PadicScalar)> + '_ {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    /// Least `k` with `p^k f` integral.
    pub fn denominator_exponent(&self) -> u32 {
        let v = self.terms.values().filter(|c| !c.is_zero()).map(|c| c.valuation().bound()).min();
        match v {
            None => 0,
            Some(v) => self.den.saturating_sub(v),
        }
    }

    pub fn is_integral(&self) -> bool {
        self.denominator_exponent() == 0
    }

    /// Coefficient of `u^beta` as `(numerator, exponent of the p-power
    /// denominator)`.
    pub fn coeff(&self, beta: &[u16]) -> (PadicScalar, u32) {
        match self.terms.get(beta) {
            Some(c) => (c.clone(), self.den),
            None => (self.ctx.zero(), 0),
        }
    }

    fn rescaled(&self, den: u32) -> UnivPoly {
        debug_assert!(den >= self.den);
        let k = den - self.den;
        let terms = self.terms.iter().map(|(b, c)| (b.clone(), c.mul_p_pow(k))).collect();
        UnivPoly { den, terms, ..self.clone() }
    }

    fn combine(&self, other: &UnivPoly, sign: bool) -> Result<UnivPoly> {
        if self.h != other.h || !self.ctx.same_field(&other.ctx) {
            return Err(Error::ContextMismatch);
        }
        let den = self.den.max(other.den);
        let mut out = self.rescaled(den);
        out.dmax = self.dmax.min(other.dmax);
        for (b, c) in other.rescaled(den).terms {
            let e = out.terms.entry(b).or_insert_with(|| self.ctx.zero());
            *e = if sign { &*e + &c } else { &*e - &c };
        }
        out.terms.retain(|b, c| !c.is_zero() && degree(b) <= out.dmax as u64);
        Ok(out)
    }

    pub fn add(&self, other: &UnivPoly) -> Result<UnivPoly> {
        self.combine(other, true)
    }

    pub fn sub(&self, other: &UnivPoly) -> Result<UnivPoly> {
        self.combine(other, false)
    }

    /// Product, failing when a product term exceeds the degree bound.
    pub fn mul(&self, other: &UnivPoly) -> Result<UnivPoly> {
        if self.h != other.h || !self.ctx.same_field(&other.ctx) {
            return Err(Error::ContextMismatch);
        }
        let dmax = self.dmax.min(other.dmax);
        let mut terms: BTreeMap<Vec<u16>, PadicScalar> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let beta: Vec<u16> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                let d = degree(&beta);
                if d > dmax as u64 {
                    return Err(Error::DegreeOverflow { needed: d, dmax });
                }
                let e = terms.entry(beta).or_insert_with(|| self.ctx.zero());
                *e = &*e + &(x * y);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(UnivPoly { h: self.h, ctx: self.ctx.clone(), dmax, den: self.den + other.den, terms })
    }

    /// `p^k f` for `k` in `Z`, moving the power into the denominator.
    pub fn mul_p_pow(&self, k: i64) -> UnivPoly {
        if k >= 0 {
            let k = k as u32;
            let cancel = k.min(self.den);
            let terms = self.terms.iter().map(|(b, c)| (b.clone(), c.mul_p_pow(k - cancel))).collect();
            UnivPoly { den: self.den - cancel, terms, ..self.clone() }
        } else {
            UnivPoly { den: self.den + (-k) as u32, ..self.clone() }
        }
    }

    /// `f(0)` as `(numerator, denominator exponent)`.
    pub fn at_origin(&self) -> (PadicScalar, u32) {
        self.coeff(&vec![0; self.h - 1])
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> =
            self.terms.iter().map(|(b, c)| json!([b, c.to_signed() as i64])).collect();
        json!({ "h": self.h, "Dmax": self.dmax, "denominator_exponent": self.den, "terms": terms })
    }
}

/// `||f||_l` as the valuation `min(l (v(c_beta) - den) + |beta|)` in units of
/// `v(p)/l`.
pub fn norm_l(f: &UnivPoly, l: u32) -> Result<i64> {
    if l == 0 {
        return Err(Error::ConfigInvalid("l must be positive".into()));
    }
    f.terms
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(b, c)| l as i64 * (c.valuation().bound() as i64 - f.den as i64) + degree(b) as i64)
        .min()
        .ok_or(Error::ZeroAtPrecision)
}

/// `a_0, ..., a_nmax` from `p a_n = sum_{i=1}^h u_i^{p^{n-i}} a_{n-i}`,
/// `u_h = 1`.
pub fn univ_log_coeffs(ctx: &Ctx, h: usize, nmax: u32, dmax: u32) -> Result<Vec<UnivPoly>> {
    if h < 2 || ctx.degree() != 1 {
        return Err(Error::ConfigInvalid("the universal logarithm is built over Z_p with h >= 2".into()));
    }
    let p = ctx.p();
    let mut a = vec![UnivPoly::constant(&ctx.one(), h, dmax)];
    for n in 1..=nmax as usize {
        let mut acc = UnivPoly::zero(ctx, h, dmax);
        for i in 1..=h.min(n) {
            let prev = &a[n - i];
            let term = if i == h {
                prev.clone()
            } else {
                let e = (p as u128).checked_pow((n - i) as u32).filter(|&e| e <= dmax as u128).ok_or(
                    Error::DegreeOverflow { needed: (p as u64).saturating_pow((n - i) as u32), dmax },
                )?;
                let mut beta = vec![0u16; h - 1];
                beta[i - 1] = e as u16;
                UnivPoly::monomial(&ctx.one(), 0, &beta, dmax)?.mul(prev)?
            };
            acc = acc.add(&term)?;
        }
        a.push(acc.mul_p_pow(-1));
    }
    Ok(a)
}

/// `p^n a_{nh}` for `i = 0`, `p^{n+1} a_{nh+i}` otherwise.
pub fn phi_approx(coeffs: &[UnivPoly], i: usize, n: u32) -> Result<UnivPoly> {
    let h = coeffs.first().map(|a| a.h).ok_or(Error::ConfigInvalid("no coefficients".into()))?;
    if i >= h {
        return Err(Error::ConfigInvalid(format!("period index {i} out of range")));
    }
    let k = n as usize * h + i;
    let a = coeffs.get(k).ok_or(Error::ConfigInvalid(format!("a_{k} is not available")))?;
    Ok(a.mul_p_pow(if i == 0 { n as i64 } else { n as i64 + 1 }))
}

/// The residual `p a_n - sum u_i^{p^{n-i}} a_{n-i}` for each `n <= nmax`,
/// recomputed independently of the recursion's bookkeeping.
pub fn recursion_residuals(coeffs: &[UnivPoly]) -> Result<Vec<UnivPoly>> {
    let h = coeffs.first().map(|a| a.h).ok_or(Error::ConfigInvalid("no coefficients".into()))?;
    let ctx = coeffs[0].ctx.clone();
    let p = ctx.p();
    let dmax = coeffs[0].dmax;
    let mut out = Vec::new();
    for n in 1..coeffs.len() {
        let mut r = coeffs[n].mul_p_pow(1);
        for i in 1..=h.min(n) {
            let mut t = coeffs[n - i].clone();
            if i < h {
                let u = UnivPoly::u(&ctx, h, i, dmax);
                for _ in 0..p.pow((n - i) as u32) {
                    t = u.mul(&t)?;
                }
            }
            r = r.sub(&t)?;
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn first_coefficients() {
        let ctx = make_context(3, 1, 30).unwrap();
        let a = univ_log_coeffs(&ctx, 2, 3, 40).unwrap();
        assert_eq!(a[1], UnivPoly::monomial(&ctx.one(), 1, &[1], 40).unwrap());
        // a_2 = (u^{p+1}/p + 1)/p
        let want = UnivPoly::monomial(&ctx.one(), 2, &[4], 40)
            .unwrap()
            .add(&UnivPoly::monomial(&ctx.one(), 1, &[0], 40).unwrap())
            .unwrap();
        assert_eq!(a[2], want);
        assert_eq!(norm_l(&UnivPoly::u(&ctx, 2, 1, 40), 3).unwrap(), 1);
        assert_eq!(norm_l(&UnivPoly::constant(&ctx.one(), 2, 40), 3).unwrap(), 0);
    }

    #[test]
    fn overflow_is_an_error() {
        let ctx = make_context(3, 1, 30).unwrap();
        assert!(matches!(univ_log_coeffs(&ctx, 2, 5, 20), Err(Error::DegreeOverflow { .. })));
    }
}
