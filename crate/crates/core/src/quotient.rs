//! Quotients `Z_p[x]/(Phi)` by a monic polynomial, with precision-tracked
//! coefficients. Elements are polynomials of degree `< deg Phi`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{ContextExt, Ctx, PadicScalar};
use crate::series::Coeff;

#[derive(Debug)]
pub struct QuotRing {
    ctx: Ctx,
    /// Low coefficients `c_0..c_{k-1}` of `Phi = x^k + sum c_i x^i`.
    phi: Vec<PadicScalar>,
}

impl QuotRing {
    /// `phi` lists the non-leading coefficients of a monic modulus.
    pub fn new(ctx: &Ctx, phi: Vec<PadicScalar>) -> Result<Arc<QuotRing>> {
        if phi.is_empty() {
            return Err(Error::InvalidContext("the modulus must have positive degree".into()));
        }
        if ctx.degree() != 1 {
            return Err(Error::InvalidContext("quotient rings are built over Z_p".into()));
        }
        Ok(Arc::new(QuotRing { ctx: ctx.clone(), phi }))
    }

    pub fn degree(&self) -> usize {
        self.phi.len()
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }
}

pub trait QuotRingExt {
    fn elem(&self, coeffs: Vec<PadicScalar>) -> QuotElem;
    fn scalar(&self, c: &PadicScalar) -> QuotElem;
    /// The class of `x`.
    fn root(&self) -> QuotElem;
    fn zero(&self) -> QuotElem;
}

impl QuotRingExt for Arc<QuotRing> {
    fn elem(&self, mut coeffs: Vec<PadicScalar>) -> QuotElem {
        assert!(coeffs.len() <= self.degree(), "representative exceeds the modulus degree");
        coeffs.resize(self.degree(), self.ctx.zero());
        QuotElem { ring: self.clone(), coeffs }
    }

    fn scalar(&self, c: &PadicScalar) -> QuotElem {
        self.elem(vec![c.clone()])
    }

    fn root(&self) -> QuotElem {
        if self.degree() == 1 {
            // x = -c_0 in a linear quotient
            self.scalar(&-&self.phi[0])
        } else {
            self.elem(vec![self.ctx.zero(), self.ctx.one()])
        }
    }

    fn zero(&self) -> QuotElem {
        self.elem(Vec::new())
    }
}

#[derive(Clone)]
pub struct QuotElem {
    ring: Arc<QuotRing>,
    coeffs: Vec<PadicScalar>,
}

impl fmt::Debug for QuotElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs.iter().map(|c| c.to_signed()).collect::<Vec<_>>())
    }
}

impl PartialEq for QuotElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a == b)
    }
}

impl QuotElem {
    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn ring(&self) -> &Arc<QuotRing> {
        &self.ring
    }

    fn same(&self, f: impl Fn(&PadicScalar) -> PadicScalar) -> QuotElem {
        QuotElem { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn pow(&self, mut k: u64) -> QuotElem {
        let mut acc = self.one_like();
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = Coeff::mul(&acc, &base);
            }
            base = Coeff::mul(&base, &base);
            k >>= 1;
        }
        acc
    }
}

impl Coeff for QuotElem {
    fn zero_like(&self) -> Self {
        self.ring.zero()
    }
    fn one_like(&self) -> Self {
        self.ring.scalar(&self.ring.ctx.one())
    }
    fn int_like(&self, n: i64) -> Self {
        self.ring.scalar(&self.ring.ctx.from_int(n))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn add(&self, o: &Self) -> Self {
        QuotElem { ring: self.ring.clone(), coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
    fn sub(&self, o: &Self) -> Self {
        QuotElem { ring: self.ring.clone(), coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        let k = self.ring.degree();
        let ctx = &self.ring.ctx;
        let mut raw = vec![ctx.zero(); 2 * k - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                raw[i + j] = &raw[i + j] + &(a * b);
            }
        }
        // x^k = -sum c_i x^i, folding from the top
        for d in (k..2 * k - 1).rev() {
            let top = std::mem::replace(&mut raw[d], ctx.zero());
            if top.is_zero() {
                continue;
            }
            for (i, c) in self.ring.phi.iter().enumerate() {
                raw[d - k + i] = &raw[d - k + i] - &(&top * c);
            }
        }
        raw.truncate(k);
        QuotElem { ring: self.ring.clone(), coeffs: raw }
    }
    fn neg(&self) -> Self {
        self.same(|c| -c)
    }
    fn div_int(&self, n: i64) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.div_int(n)).collect::<Result<Vec<_>>>()?;
        Ok(QuotElem { ring: self.ring.clone(), coeffs })
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.coeffs.iter().map(|c| c.to_signed() as i64).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn root_satisfies_modulus() {
        // Phi = x^2 + 3
        let ctx = make_context(3, 1, 6).unwrap();
        let r = QuotRing::new(&ctx, vec![ctx.from_u64(3), ctx.zero()]).unwrap();
        let x = r.root();
        assert_eq!(x.pow(2), r.scalar(&ctx.from_int(-3)));
        assert!(x.pow(12).is_zero());
        assert!(!x.pow(11).is_zero());
    }
}
