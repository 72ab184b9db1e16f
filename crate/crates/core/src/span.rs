//! Linear algebra over truncated section spaces: operator closures under
//! `gl_h`, joint kernels by valuation pivoting, and the local-finiteness
//! proxy.

use crate::domain::{lie_act, DomainFunc, Section};
use crate::error::{Error, Result};
use crate::padic::{ContextExt, Ctx, PadicScalar};
use crate::series::{mono_space, Mono, TruncSeries};

/// Dense coefficient vector of `f` in rank order of degree `<= dmax`.
fn to_vec(f: &DomainFunc, dmax: u32) -> Vec<PadicScalar> {
    f.with_dmax(dmax).series().coeffs().to_vec()
}

fn from_vec(ctx: &Ctx, v: &[PadicScalar], dmax: u32) -> DomainFunc {
    let h = ctx.degree();
    let space = mono_space(h - 1, dmax);
    let mut s = TruncSeries::zero(h - 1, dmax, &ctx.zero());
    for (m, c) in space.monos.iter().zip(v) {
        if !c.is_zero() {
            s.set(m, c.clone());
        }
    }
    DomainFunc::from_series(h, s).expect("shape fixed by the context")
}

/// Row echelon basis with unit pivots, each vector primitive.
struct Echelon {
    rows: Vec<(usize, Vec<PadicScalar>)>,
}

impl Echelon {
    fn reduce(&self, mut v: Vec<PadicScalar>) -> Vec<PadicScalar> {
        for (c, b) in &self.rows {
            if v[*c].is_zero() {
                continue;
            }
            let f = v[*c].clone();
            for (x, y) in v.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        v
    }

    /// Adds `v` if independent; returns the stored vector.
    fn insert(&mut self, v: Vec<PadicScalar>) -> Option<Vec<PadicScalar>> {
        let v = self.reduce(v);
        let content = v.iter().filter(|c| !c.is_zero()).map(|c| c.valuation().bound()).min()?;
        let v: Vec<PadicScalar> = v.iter().map(|c| c.div_p_pow(content).expect("content divides")).collect();
        let pivot = v.iter().position(|c| c.is_unit())?;
        let inv = v[pivot].inv().expect("unit pivot");
        let v: Vec<PadicScalar> = v.iter().map(|c| c * &inv).collect();
        self.rows.push((pivot, v.clone()));
        Some(v)
    }
}

/// The closure of `x` under all `x_ij`, truncated at `dmax`.
#[derive(Clone, Debug)]
pub struct ReachSpan {
    pub s: i64,
    pub dmax: u32,
    pub dimension: usize,
    pub basis: Vec<Section>,
    /// Monomials `w^alpha` lying in the span.
    pub monomials: Vec<Mono>,
}

impl ReachSpan {
    pub fn reaches_all(&self) -> bool {
        self.monomials.len() == self.basis.first().map(|b| b.f.series().coeffs().len()).unwrap_or(0)
    }
}

pub fn reach_span(x: &Section, dmax: u32) -> Result<ReachSpan> {
    if x.is_zero() {
        return Err(Error::ConfigInvalid("the starting section must be nonzero".into()));
    }
    let ctx = x.ctx().clone();
    let h = x.h();
    let x = x.with_dmax(dmax);
    let mut ech = Echelon { rows: Vec::new() };
    let mut queue = Vec::new();
    if let Some(v) = ech.insert(to_vec(&x.f, dmax)) {
        queue.push(v);
    }
    while let Some(v) = queue.pop() {
        let sec = Section::new(from_vec(&ctx, &v, dmax), x.s);
        for i in 0..h {
            for j in 0..h {
                let img = lie_act(i, j, &sec);
                if img.is_zero() {
                    continue;
                }
                if let Some(new) = ech.insert(to_vec(&img.f, dmax)) {
                    queue.push(new);
                }
            }
        }
    }
    let space = mono_space(h - 1, dmax);
    let monomials = space
        .monos
        .iter()
        .enumerate()
        .filter(|(r, _)| {
            let mut e = vec![ctx.zero(); space.monos.len()];
            e[*r] = ctx.one();
            ech.reduce(e).iter().all(|c| c.is_zero())
        })
        .map(|(_, m)| *m)
        .collect();
    let basis: Vec<Section> = ech.rows.iter().map(|(_, v)| Section::new(from_vec(&ctx, v, dmax), x.s)).collect();
    Ok(ReachSpan { s: x.s, dmax, dimension: basis.len(), basis, monomials })
}

/// Basis of the joint kernel of `x_ij`, `(i, j)` in `ops`, on `f phi_0^s`
/// with `deg f <= dmax`. Full pivoting by minimal valuation, ties broken by
/// the graded term order of the input monomial.
pub fn operator_kernel(ctx: &Ctx, ops: &[(usize, usize)], s: i64, dmax: u32) -> Result<Vec<DomainFunc>> {
    let h = ctx.degree();
    let space = mono_space(h - 1, dmax);
    let ncols = space.monos.len();
    let mut rows: Vec<Vec<PadicScalar>> = Vec::new();
    let images: Vec<Vec<Section>> = space
        .monos
        .iter()
        .map(|m| {
            let e = Section::new(DomainFunc::monomial(&ctx.one(), &m[..h - 1], dmax), s);
            ops.iter().map(|&(i, j)| lie_act(i, j, &e)).collect()
        })
        .collect();
    for k in 0..ops.len() {
        for r in 0..ncols {
            let row: Vec<PadicScalar> = (0..ncols).map(|c| images[c][k].f.series().coeffs()[r].clone()).collect();
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    let budget = ctx.precision() / 2;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut free_rows: Vec<usize> = (0..rows.len()).collect();
    let mut free_cols: Vec<usize> = (0..ncols).collect();
    loop {
        let best = free_cols
            .iter()
            .flat_map(|&c| free_rows.iter().map(move |&r| (c, r)))
            .filter(|&(c, r)| !rows[r][c].is_zero())
            .min_by_key(|&(c, r)| (rows[r][c].valuation().bound(), c, r));
        let Some((pc, pr)) = best else { break };
        let v = rows[pr][pc].valuation().bound();
        if v > budget {
            return Err(Error::PrecisionLoss(format!("pivot valuation {v} exceeds half the precision")));
        }
        // every remaining entry has valuation >= v
        let unit = rows[pr][pc].div_p_pow(v)?.inv()?;
        let scaled: Vec<PadicScalar> = rows[pr]
            .iter()
            .map(|c| if c.is_zero() { c.clone() } else { &c.div_p_pow(v).unwrap_or_else(|_| c.ctx().zero()) * &unit })
            .collect();
        rows[pr] = scaled;
        for r in 0..rows.len() {
            if r == pr || rows[r][pc].is_zero() {
                continue;
            }
            let f = rows[r][pc].clone();
            let pivot_row = rows[pr].clone();
            for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push((pc, pr));
        free_rows.retain(|&r| r != pr);
        free_cols.retain(|&c| c != pc);
    }
    let basis = free_cols
        .iter()
        .map(|&fc| {
            let mut v = vec![ctx.zero(); ncols];
            v[fc] = ctx.one();
            for &(pc, pr) in &pivots {
                v[pc] = -&rows[pr][fc];
            }
            from_vec(ctx, &v, dmax)
        })
        .collect();
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LfVerdict {
    Finite(usize),
    Growing,
}

#[derive(Clone, Debug)]
pub struct LfReport {
    pub ladder: Vec<u32>,
    pub dimensions: Vec<usize>,
    pub verdict: LfVerdict,
}

/// Span dimensions along an increasing truncation ladder; finite when the
/// top two rungs agree.
pub fn lf_diagnostic(x: &Section, ladder: &[u32]) -> Result<LfReport> {
    if ladder.len() < 2 || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::ConfigInvalid("the ladder needs at least two increasing rungs".into()));
    }
    let dimensions = ladder.iter().map(|&d| reach_span(x, d).map(|r| r.dimension)).collect::<Result<Vec<_>>>()?;
    let n = dimensions.len();
    let verdict = if dimensions[n - 1] == dimensions[n - 2] { LfVerdict::Finite(dimensions[n - 1]) } else { LfVerdict::Growing };
    Ok(LfReport { ladder: ladder.to_vec(), dimensions, verdict })
}
