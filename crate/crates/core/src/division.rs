//! The central division algebra `B_h = K_h{Pi}` of invariant `1/h`, its
//! maximal order, the congruence filtration `Gamma_n` and the embedding `j`.
//!
//! Elements are kept in the normal form `sum lambda_i Pi^i` with
//! `0 <= i < h` and `lambda_i` in a context of degree `h`. Products use
//! `Pi lambda = sigma(lambda) Pi` and `Pi^h = p`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::padic::{ContextExt, Ctx, PadicScalar, Valuation};

#[derive(Clone, Debug)]
pub struct DivElem {
    coeffs: Vec<PadicScalar>,
}

/// JSON shape `{coeffs: [[ints per basis coordinate]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivElemJson {
    pub coeffs: Vec<Vec<u64>>,
}

impl PartialEq for DivElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs.len() == other.coeffs.len() && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a == b)
    }
}

impl DivElem {
    pub fn new(coeffs: Vec<PadicScalar>) -> Result<DivElem> {
        let h = coeffs.first().map(|c| c.ctx().degree()).ok_or_else(|| Error::Shape("empty element".into()))?;
        if coeffs.len() != h {
            return Err(Error::Shape(format!("expected {h} coefficients, got {}", coeffs.len())));
        }
        let ctx = coeffs[0].ctx().clone();
        if coeffs.iter().any(|c| !c.ctx().same_field(&ctx)) {
            return Err(Error::ContextMismatch);
        }
        Ok(DivElem { coeffs })
    }

    pub fn zero(ctx: &Ctx) -> DivElem {
        DivElem { coeffs: vec![ctx.zero(); ctx.degree()] }
    }

    pub fn one(ctx: &Ctx) -> DivElem {
        DivElem::scalar(&ctx.one())
    }

    pub fn scalar(lambda: &PadicScalar) -> DivElem {
        let ctx = lambda.ctx();
        let mut d = DivElem::zero(ctx);
        d.coeffs[0] = lambda.clone();
        d
    }

    /// `lambda * Pi^i` for `0 <= i < h`.
    pub fn monomial(lambda: &PadicScalar, i: usize) -> DivElem {
        let ctx = lambda.ctx();
        let mut d = DivElem::zero(ctx);
        d.coeffs[i] = lambda.clone();
        d
    }

    /// The uniformizer `Pi` (equal to `p` when `h = 1`).
    pub fn pi(ctx: &Ctx) -> DivElem {
        if ctx.degree() == 1 {
            DivElem::scalar(&ctx.from_u64(ctx.p()))
        } else {
            DivElem::monomial(&ctx.one(), 1)
        }
    }

    pub fn ctx(&self) -> &Ctx {
        self.coeffs[0].ctx()
    }

    pub fn h(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &PadicScalar {
        &self.coeffs[i]
    }

    fn check(&self, other: &DivElem) -> Result<()> {
        if self.h() != other.h() || !self.ctx().same_field(other.ctx()) {
            Err(Error::ContextMismatch)
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &DivElem) -> Result<DivElem> {
        self.check(other)?;
        Ok(DivElem { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn try_sub(&self, other: &DivElem) -> Result<DivElem> {
        self.check(other)?;
        Ok(DivElem { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn add(&self, other: &DivElem) -> DivElem {
        self.try_add(other).expect("division algebra elements from mismatched contexts")
    }

    pub fn sub(&self, other: &DivElem) -> DivElem {
        self.try_sub(other).expect("division algebra elements from mismatched contexts")
    }

    pub fn neg(&self) -> DivElem {
        DivElem { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    /// Left multiplication by a scalar of `K_h`.
    pub fn scale(&self, lambda: &PadicScalar) -> DivElem {
        DivElem { coeffs: self.coeffs.iter().map(|a| lambda * a).collect() }
    }

    /// Normal-form product.
    pub fn try_mul(&self, other: &DivElem) -> Result<DivElem> {
        self.check(other)?;
        let h = self.h();
        let mut out = DivElem::zero(self.ctx());
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                // lambda_i Pi^i mu_k Pi^k = lambda_i sigma^i(mu_k) Pi^{i+k}
                let mut t = a * &b.frobenius(i);
                let mut idx = i + k;
                if idx >= h {
                    idx -= h;
                    t = t.mul_p_pow(1);
                }
                out.coeffs[idx] = &out.coeffs[idx] + &t;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &DivElem) -> DivElem {
        self.try_mul(other).expect("division algebra elements from mismatched contexts")
    }

    pub fn pow(&self, mut k: u64) -> DivElem {
        let mut acc = DivElem::one(self.ctx());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Membership in `Gamma`: `lambda_0` is a unit.
    pub fn is_gamma(&self) -> bool {
        self.coeffs[0].is_unit()
    }

    /// Inverse of an element of `Gamma`. Solves `j(a) x = e_0`; the first
    /// column of `j(b)` determines `b` without any factor of `p`.
    pub fn inv(&self) -> Result<DivElem> {
        if !self.is_gamma() {
            return Err(Error::NonUnit);
        }
        let h = self.h();
        let ctx = self.ctx().clone();
        let m = j_embed(self);
        let mut e0 = vec![ctx.zero(); h];
        e0[0] = ctx.one();
        let x = m.solve(&e0)?;
        // column 0 of j(b): (b_0, sigma(b_{h-1}), sigma^2(b_{h-2}), ...)
        let mut coeffs = vec![ctx.zero(); h];
        coeffs[0] = x[0].clone();
        for r in 1..h {
            coeffs[h - r] = x[r].frobenius(h - r);
        }
        Ok(DivElem { coeffs })
    }

    /// `Pi`-adic valuation `min_i (h v(lambda_i) + i)`.
    pub fn pi_valuation(&self) -> Valuation {
        let h = self.h() as u32;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.valuation().finite().map(|v| h * v + i as u32))
            .min();
        match v {
            Some(v) => Valuation::Finite(v),
            None => {
                let prec = self.coeffs.iter().map(|c| c.precision()).min().unwrap_or(0);
                Valuation::AtLeast(h * prec)
            }
        }
    }

    pub fn reduced_norm(&self) -> PadicScalar {
        nrd(self)
    }

    pub fn to_json(&self) -> DivElemJson {
        DivElemJson { coeffs: self.coeffs.iter().map(|c| c.coords().to_vec()).collect() }
    }

    pub fn from_json(ctx: &Ctx, json: &DivElemJson) -> Result<DivElem> {
        if json.coeffs.len() != ctx.degree() {
            return Err(Error::Malformed("coefficient count must equal h".into()));
        }
        let coeffs = json
            .coeffs
            .iter()
            .map(|c| {
                if c.len() != ctx.degree() {
                    return Err(Error::Malformed("coordinate count must equal the degree".into()));
                }
                Ok(ctx.from_coords(&c.iter().map(|&x| x as i64).collect::<Vec<_>>()))
            })
            .collect::<Result<Vec<_>>>()?;
        DivElem::new(coeffs)
    }
}

/// The matrix of left multiplication on the basis `1, Pi^{h-1}, ..., Pi`
/// with scalars acting on the right:
///
/// ```text
/// (0, 0) = lambda_0          (0, c) = p lambda_c
/// (r, 0) = s^r(lambda_{h-r}) (r, c) = s^r(lambda_{c-r})       for c >= r >= 1
///                            (r, c) = p s^r(lambda_{h+c-r})   for 1 <= c < r
/// ```
pub fn j_embed(a: &DivElem) -> Mat {
    let h = a.h();
    let ctx = a.ctx();
    let mut m = Mat::zeros(ctx, h, h);
    for r in 0..h {
        for c in 0..h {
            let v = if r == 0 {
                if c == 0 {
                    a.coeffs[0].clone()
                } else {
                    a.coeffs[c].mul_p_pow(1)
                }
            } else if c == 0 {
                a.coeffs[h - r].frobenius(r)
            } else if c >= r {
                a.coeffs[c - r].frobenius(r)
            } else {
                a.coeffs[h + c - r].frobenius(r).mul_p_pow(1)
            };
            m.set(r, c, v);
        }
    }
    m
}

/// Reduced norm as `det(j(a))`.
pub fn nrd(a: &DivElem) -> PadicScalar {
    j_embed(a).det().expect("j(a) is square")
}

/// `a in Gamma_n`: for `n = 0` membership in `Gamma`, otherwise every
/// coefficient of `a - 1` has valuation `>= n`.
pub fn in_filtration(a: &DivElem, n: u32) -> bool {
    if n == 0 {
        return a.is_gamma();
    }
    let d = a.sub(&DivElem::one(a.ctx()));
    d.coeffs.iter().all(|c| c.valuation().bound() >= n)
}

/// Random element of `Gamma_n` drawn from `rng`.
pub fn sample_gamma_rng<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R, n: u32) -> DivElem {
    let h = ctx.degree();
    if n == 0 {
        let mut coeffs = Vec::with_capacity(h);
        coeffs.push(ctx.random_unit(rng));
        for _ in 1..h {
            coeffs.push(ctx.random(rng));
        }
        return DivElem { coeffs };
    }
    let u = sample_order_rng(ctx, rng);
    DivElem::one(ctx).add(&DivElem { coeffs: u.coeffs.iter().map(|c| c.mul_p_pow(n)).collect() })
}

/// Random element of the maximal order.
pub fn sample_order_rng<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R) -> DivElem {
    DivElem { coeffs: (0..ctx.degree()).map(|_| ctx.random(rng)).collect() }
}

/// Deterministic sampler of `Gamma_n` keyed by a seed.
pub fn sample_gamma(ctx: &Ctx, seed: u64, n: u32) -> DivElem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_gamma_rng(ctx, &mut rng, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn pi_power_is_p() {
        for h in 2..=4 {
            let ctx = make_context(3, h, 8).unwrap();
            let pi = DivElem::pi(&ctx);
            assert_eq!(pi.pow(h as u64), DivElem::scalar(&ctx.from_u64(3)));
            assert_eq!(pi.mul(&pi.pow(h as u64 - 1)), DivElem::scalar(&ctx.from_u64(3)));
        }
    }

    #[test]
    fn pi_twists_scalars() {
        let ctx = make_context(5, 3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pi = DivElem::pi(&ctx);
        for _ in 0..20 {
            let l = ctx.random(&mut rng);
            let lhs = pi.mul(&DivElem::scalar(&l));
            let rhs = DivElem::scalar(&l.frobenius(1)).mul(&pi);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn inverse_in_gamma() {
        let ctx = make_context(5, 3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let one = DivElem::one(&ctx);
        assert_eq!(one.inv().unwrap(), one);
        for _ in 0..100 {
            let a = sample_gamma_rng(&ctx, &mut rng, 0);
            let b = a.inv().unwrap();
            assert_eq!(a.mul(&b), one);
            assert_eq!(b.mul(&a), one);
        }
        assert_eq!(DivElem::pi(&ctx).inv().unwrap_err(), Error::NonUnit);
    }

    #[test]
    fn filtration_examples() {
        let ctx = make_context(3, 2, 8).unwrap();
        let one = DivElem::one(&ctx);
        for n in 0..=8 {
            assert!(in_filtration(&one, n));
        }
        let a = one.add(&DivElem::monomial(&ctx.from_u64(9), 1));
        assert!(in_filtration(&a, 2));
        assert!(!in_filtration(&a, 3));
        let s = sample_gamma(&ctx, 17, 3);
        assert!(in_filtration(&s, 3));
        assert_eq!(s, sample_gamma(&ctx, 17, 3));
        assert!(sample_gamma(&ctx, 17, 0).coeff(0).is_unit());
    }

    #[test]
    fn j_of_scalar_is_diagonal() {
        let ctx = make_context(3, 3, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let l = ctx.random_unit(&mut rng);
        let m = j_embed(&DivElem::scalar(&l));
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { l.frobenius(r) } else { ctx.zero() };
                assert_eq!(m.get(r, c), &want);
            }
        }
        let field_norm = &(&l * &l.frobenius(1)) * &l.frobenius(2);
        assert_eq!(nrd(&DivElem::scalar(&l)), field_norm);
        assert_eq!(j_embed(&DivElem::one(&ctx)), Mat::identity(&ctx, 3));
    }

    #[test]
    fn json_roundtrip() {
        let ctx = make_context(3, 2, 6).unwrap();
        let a = sample_gamma(&ctx, 9, 1);
        let j = serde_json::to_string(&a.to_json()).unwrap();
        let back: DivElemJson = serde_json::from_str(&j).unwrap();
        assert_eq!(DivElem::from_json(&ctx, &back).unwrap(), a);
    }
}
