//! Finite group-ring elements of `Gamma`, monomials `b^alpha` in `b_i =
//! gamma_i - 1`, the norms `||.||_r` and the action on sections.

use serde_json::json;

use crate::division::DivElem;
use crate::domain::{GammaAction, Section};
use crate::error::{Error, Result};
use crate::padic::{ContextExt, Ctx, PadicScalar};

/// Largest number of Dirac terms an expansion may produce.
pub const MAX_EXPANSION: usize = 4096;

/// `sum c_k delta_{gamma_k}` with distinct `gamma_k`.
#[derive(Clone, Debug)]
pub struct GroupRingElem {
    terms: Vec<(PadicScalar, DivElem)>,
}

impl GroupRingElem {
    pub fn zero() -> GroupRingElem {
        GroupRingElem { terms: Vec::new() }
    }

    pub fn delta(gamma: &DivElem) -> Result<GroupRingElem> {
        if !gamma.is_gamma() {
            return Err(Error::NonUnit);
        }
        Ok(GroupRingElem { terms: vec![(gamma.ctx().one(), gamma.clone())] })
    }

    pub fn one(ctx: &Ctx) -> GroupRingElem {
        GroupRingElem { terms: vec![(ctx.one(), DivElem::one(ctx))] }
    }

    pub fn from_terms(terms: Vec<(PadicScalar, DivElem)>) -> Result<GroupRingElem> {
        let mut out = GroupRingElem::zero();
        for (c, g) in terms {
            if !g.is_gamma() {
                return Err(Error::NonUnit);
            }
            out.push(c, g);
        }
        Ok(out)
    }

    fn push(&mut self, c: PadicScalar, g: DivElem) {
        match self.terms.iter_mut().find(|(_, h)| *h == g) {
            Some((d, _)) => *d = &*d + &c,
            None => self.terms.push((c, g)),
        }
        self.terms.retain(|(d, _)| !d.is_zero());
    }

    pub fn terms(&self) -> &[(PadicScalar, DivElem)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &GroupRingElem) -> GroupRingElem {
        let mut out = self.clone();
        for (c, g) in &o.terms {
            out.push(c.clone(), g.clone());
        }
        out
    }

    pub fn scale(&self, c: &PadicScalar) -> GroupRingElem {
        let mut out = GroupRingElem::zero();
        for (d, g) in &self.terms {
            out.push(d * c, g.clone());
        }
        out
    }

    /// Convolution `(sum c_k gamma_k)(sum d_l eta_l) = sum c_k d_l gamma_k eta_l`.
    pub fn mul(&self, o: &GroupRingElem) -> Result<GroupRingElem> {
        if self.len() * o.len() > MAX_EXPANSION {
            return Err(Error::ExpansionTooLarge(self.len() * o.len()));
        }
        let mut out = GroupRingElem::zero();
        for (c, g) in &self.terms {
            for (d, e) in &o.terms {
                out.push(c * d, g.mul(e));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self
            .terms
            .iter()
            .map(|(c, g)| json!({ "coeff": c.coords(), "gamma": g.to_json().coeffs }))
            .collect::<Vec<_>>())
    }
}

/// `sum c_k gamma_k(x)`.
pub fn apply_group_ring(mu: &GroupRingElem, x: &Section, dmax: u32) -> Result<Section> {
    let mut acc = Section::new(crate::domain::DomainFunc::zero(x.ctx(), dmax), x.s);
    for (c, g) in mu.terms() {
        let mut act = GammaAction::new(g, dmax)?;
        acc = acc.add(&act.apply(&x.with_dmax(dmax)).scale(c));
    }
    Ok(acc)
}

/// Base `gamma_1..gamma_t` with exponents `alpha`, standing for
/// `b^alpha = b_1^{alpha_1} ... b_t^{alpha_t}`.
#[derive(Clone, Debug)]
pub struct BMonomialSet {
    pub gammas: Vec<DivElem>,
    pub alpha: Vec<u32>,
}

impl BMonomialSet {
    pub fn new(gammas: Vec<DivElem>, alpha: Vec<u32>) -> Result<BMonomialSet> {
        if gammas.len() != alpha.len() {
            return Err(Error::Shape("one exponent per base element".into()));
        }
        if gammas.iter().any(|g| !g.is_gamma()) {
            return Err(Error::NonUnit);
        }
        Ok(BMonomialSet { gammas, alpha })
    }

    pub fn total_degree(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

/// Signed binomial expansion of `b^alpha` into Dirac terms.
pub fn expand_b_monomial(b: &BMonomialSet) -> Result<GroupRingElem> {
    let ctx = b.gammas.first().map(|g| g.ctx().clone()).ok_or(Error::Shape("empty base".into()))?;
    let bound: usize = b.alpha.iter().map(|&a| a as usize + 1).product();
    if bound > MAX_EXPANSION {
        return Err(Error::ExpansionTooLarge(bound));
    }
    let mut out = GroupRingElem::one(&ctx);
    for (g, &a) in b.gammas.iter().zip(&b.alpha) {
        // (gamma - 1)^a = sum_k (-1)^{a-k} C(a, k) gamma^k
        let mut factor = GroupRingElem::zero();
        for k in 0..=a {
            let c = crate::series::binomial(a as u64, k as u64) as i64;
            let sign = if (a - k) % 2 == 0 { 1 } else { -1 };
            factor.push(ctx.from_int(sign * c), g.pow(k as u64));
        }
        out = out.mul(&factor)?;
    }
    Ok(out)
}

/// `b^alpha(x)` by applying `gamma_i - 1` one step at a time, rightmost
/// factor first. Intermediate results carry `N` extra degrees so that the
/// truncation at `dmax` is exact.
pub fn apply_b_iterated(b: &BMonomialSet, x: &Section, dmax: u32) -> Result<Section> {
    let work = dmax + x.ctx().precision();
    let mut y = x.with_dmax(dmax).with_dmax(work);
    for (g, &a) in b.gammas.iter().zip(&b.alpha).rev() {
        let mut act = GammaAction::new(g, work)?;
        for _ in 0..a {
            y = act.apply(&y).sub(&y);
        }
    }
    Ok(y.with_dmax(dmax))
}

/// `sup |d_alpha| r^{|alpha|}` as its natural logarithm, with the
/// maximizing `(v(d_alpha), |alpha|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistNorm {
    pub log_value: f64,
    pub argmax: Option<(u32, u32)>,
}

/// `r = num/den` must lie in `[1/p, 1)`.
pub fn dist_norm_r(coeffs: &[(Vec<u32>, PadicScalar)], r: (u64, u64)) -> Result<DistNorm> {
    let (num, den) = r;
    let p = match coeffs.first() {
        Some((_, c)) => c.ctx().p(),
        None => return Ok(DistNorm { log_value: f64::NEG_INFINITY, argmax: None }),
    };
    if num == 0 || num >= den || num * p < den {
        return Err(Error::ConfigInvalid(format!("r = {num}/{den} is outside [1/{p}, 1)")));
    }
    let lr = (num as f64 / den as f64).ln();
    let lp = (p as f64).ln();
    let mut best = DistNorm { log_value: f64::NEG_INFINITY, argmax: None };
    for (alpha, d) in coeffs {
        if d.is_zero() {
            continue;
        }
        let v = d.valuation().bound();
        let k: u32 = alpha.iter().sum();
        let val = -(v as f64) * lp + k as f64 * lr;
        if val > best.log_value {
            best = DistNorm { log_value: val, argmax: Some((v, k)) };
        }
    }
    Ok(best)
}
