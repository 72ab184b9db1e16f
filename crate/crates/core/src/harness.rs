//! Seeded experiments over every layer of the workbench, collected into
//! schema-versioned reports.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::division::{j_embed, nrd, sample_gamma_rng, sample_order_rng, DivElem};
use crate::domain::{
    contraction_profile, fn_sequence, gamma_act, lie_act, lie_finite_difference, mono_of, DomainFunc,
    GammaAction, Section, VsSpace,
};
use crate::error::{Error, Result};
use crate::formal::{
    check_endomorphism, frobenius_poly, ga_module, gm_module, height, level_one_points, level_structure_check,
    logarithm, lt_construct, FormalModule, Height,
};
use crate::iwasawa::{apply_b_iterated, apply_group_ring, dist_norm_r, expand_b_monomial, BMonomialSet, GroupRingElem};
use crate::padic::{is_prime, make_context, ContextExt, Ctx, PadicScalar};
use crate::period::{norm_l, phi_approx, recursion_residuals, univ_log_coeffs};
use crate::series::{binomial, Coeff, mono_degree, mono_space, Mono, PowerTable, TruncSeries, MAX_VARS};
use crate::span::{lf_diagnostic, operator_kernel, reach_span, LfVerdict};

pub const SCHEMA_VERSION: u32 = 1;

/// Experiment names with one-line descriptions.
pub const EXPERIMENTS: [(&str, &str); 20] = [
    ("j-homomorphism", "j is multiplicative and Nrd = det j is multiplicative"),
    ("dheq-vs-matrix", "explicit action formula agrees with the fractional-linear matrix action"),
    ("action-law", "group action law and Gauss norm preservation"),
    ("lie-weights", "diagonal operators act on monomial sections by their weights"),
    ("lie-bracket", "gl_h commutation relations on a monomial basis"),
    ("finite-difference", "difference quotients converge to the derived operator"),
    ("fn-sequence", "recursive and closed forms of the f_n sequence agree"),
    ("vs-stability", "V_s is Gamma-stable of the expected dimension"),
    ("reachability", "operator closures of highest-weight and generic sections"),
    ("kernels", "joint kernels of raising operators"),
    ("lf-diagnostic", "span dimensions along a truncation ladder"),
    ("contraction", "Gamma_n contracts differences by n*h units"),
    ("formal-group-axioms", "Lubin-Tate laws are commutative formal modules"),
    ("gm-identities", "multiplicative law endomorphisms are binomial series"),
    ("logarithm", "logarithms are additive and linear"),
    ("height", "heights of reductions mod p"),
    ("level-structure", "torsion points divide [p] over the quotient ring"),
    ("endomorphism-frobenius", "X^q is an endomorphism of the reduction with tau^h = [p]"),
    ("period-convergence", "recursion, integrality and convergence of period approximants"),
    ("dist-norms", "distribution norms of b-monomials and evaluation orders"),
];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub p: u64,
    pub h: usize,
    pub e: usize,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "Dmax")]
    pub dmax: u32,
    pub nmax: u32,
    pub seed: u64,
    pub s: Option<i64>,
    pub samples: Option<usize>,
    pub out: Option<String>,
    pub record_timing: bool,
}

impl ExperimentConfig {
    /// Parameters each experiment runs with when the config leaves them out.
    pub fn defaults_for(experiment: &str) -> Result<ExperimentConfig> {
        let (p, h, n, dmax, nmax, s, samples): (u64, usize, u32, u32, u32, Option<i64>, Option<usize>) = match experiment {
            "j-homomorphism" => (5, 2, 8, 6, 0, None, Some(200)),
            "dheq-vs-matrix" => (5, 2, 8, 6, 0, None, Some(50)),
            "action-law" => (5, 2, 8, 6, 0, None, Some(20)),
            "lie-weights" => (5, 3, 8, 6, 0, None, None),
            "lie-bracket" => (5, 3, 8, 5, 0, None, None),
            "finite-difference" => (5, 2, 12, 4, 0, Some(1), Some(20)),
            "fn-sequence" => (3, 2, 16, 12, 10, Some(2), Some(3)),
            "vs-stability" => (5, 3, 8, 5, 0, None, Some(3)),
            "reachability" => (5, 2, 8, 8, 0, None, Some(3)),
            "kernels" => (5, 2, 8, 8, 0, None, None),
            "lf-diagnostic" => (5, 2, 8, 10, 0, Some(2), None),
            "contraction" => (5, 2, 12, 4, 0, None, Some(200)),
            "formal-group-axioms" => (3, 2, 8, 20, 0, None, None),
            "gm-identities" => (3, 1, 8, 20, 0, None, Some(5)),
            "logarithm" => (3, 2, 8, 20, 0, None, None),
            "height" => (3, 2, 8, 27, 0, None, None),
            "level-structure" => (3, 1, 6, 12, 0, None, None),
            "endomorphism-frobenius" => (3, 2, 8, 18, 0, None, None),
            "period-convergence" => (3, 2, 30, 400, 6, None, None),
            "dist-norms" => (5, 2, 10, 4, 0, None, Some(5)),
            other => return Err(Error::UnknownExperiment(other.to_string())),
        };
        Ok(ExperimentConfig {
            experiment: experiment.to_string(),
            p,
            h,
            e: h,
            n,
            dmax,
            nmax,
            seed: 1,
            s,
            samples,
            out: None,
            record_timing: false,
        })
    }

    /// Overlay a partial JSON object on the experiment's defaults.
    pub fn from_json(value: &Value) -> Result<ExperimentConfig> {
        let obj = value.as_object().ok_or_else(|| Error::ConfigInvalid("config must be a JSON object".into()))?;
        let name = obj
            .get("experiment")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::ConfigInvalid("config needs an `experiment` name".into()))?;
        let mut base = serde_json::to_value(ExperimentConfig::defaults_for(name)?).expect("config serializes");
        let target = base.as_object_mut().expect("object");
        let explicit_h = obj.contains_key("h");
        for (k, v) in obj {
            target.insert(k.clone(), v.clone());
        }
        if explicit_h && !obj.contains_key("e") {
            target.insert("e".into(), obj["h"].clone());
        }
        let cfg: ExperimentConfig =
            serde_json::from_value(base).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ExperimentConfig::defaults_for(&self.experiment)?;
        if !is_prime(self.p) {
            return Err(Error::ConfigInvalid(format!("p = {} is not prime", self.p)));
        }
        if self.h == 0 || self.n == 0 || self.dmax == 0 {
            return Err(Error::ConfigInvalid("h, N and Dmax must be positive".into()));
        }
        if self.e < self.h {
            return Err(Error::ConfigInvalid(format!("e = {} must be at least h = {}", self.e, self.h)));
        }
        if self.e != self.h {
            return Err(Error::ConfigInvalid(format!(
                "only e = h is supported, the division algebra lives over the degree-h extension (got e = {})",
                self.e
            )));
        }
        if self.h > MAX_VARS + 1 {
            return Err(Error::ConfigInvalid(format!("h <= {} is supported", MAX_VARS + 1)));
        }
        if self.samples == Some(0) {
            return Err(Error::ConfigInvalid("samples must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub inputs_digest: String,
    pub measured: Value,
    pub pass: bool,
    pub runtime_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl Report {
    pub fn empty(config: &ExperimentConfig) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            experiment: config.experiment.clone(),
            config: config.clone(),
            checks: Vec::new(),
            pass: true,
        }
    }
}

/// SHA-256 of the canonical (key-sorted, compact) JSON encoding.
pub fn digest(value: &Value) -> String {
    let bytes = serde_json::to_vec(value).expect("json encodes");
    hex::encode(Sha256::digest(&bytes))
}

struct Recorder<'a> {
    cfg: &'a ExperimentConfig,
    checks: Vec<CheckRecord>,
    started: Instant,
}

impl Recorder<'_> {
    fn check(&mut self, id: &str, anchor: &str, inputs: Value, measured: Value, pass: bool) {
        let elapsed = self.started.elapsed().as_millis() as u64;
        self.started = Instant::now();
        let cfg = serde_json::to_value(self.cfg).expect("config serializes");
        self.checks.push(CheckRecord {
            id: id.to_string(),
            anchor: anchor.to_string(),
            inputs_digest: digest(&json!({ "config": cfg, "check": id, "inputs": inputs })),
            measured,
            pass,
            runtime_ms: self.cfg.record_timing.then_some(elapsed),
        });
    }
}

/// Run one experiment; deterministic for a fixed config unless timing is
/// recorded.
pub fn run(experiment: &str, config: &ExperimentConfig) -> Result<Report> {
    let cfg = ExperimentConfig { experiment: experiment.to_string(), ..config.clone() };
    cfg.validate()?;
    let mut rec = Recorder { cfg: &cfg, checks: Vec::new(), started: Instant::now() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match experiment {
        "j-homomorphism" => j_homomorphism(&cfg, &mut rec, &mut rng)?,
        "dheq-vs-matrix" => dheq_vs_matrix(&cfg, &mut rec, &mut rng)?,
        "action-law" => action_law(&cfg, &mut rec, &mut rng)?,
        "lie-weights" => lie_weights(&cfg, &mut rec)?,
        "lie-bracket" => lie_bracket(&cfg, &mut rec)?,
        "finite-difference" => finite_difference(&cfg, &mut rec, &mut rng)?,
        "fn-sequence" => fn_sequence_exp(&cfg, &mut rec, &mut rng)?,
        "vs-stability" => vs_stability(&cfg, &mut rec, &mut rng)?,
        "reachability" => reachability(&cfg, &mut rec, &mut rng)?,
        "kernels" => kernels(&cfg, &mut rec)?,
        "lf-diagnostic" => lf_exp(&cfg, &mut rec, &mut rng)?,
        "contraction" => contraction(&cfg, &mut rec, &mut rng)?,
        "formal-group-axioms" => formal_axioms(&cfg, &mut rec)?,
        "gm-identities" => gm_identities(&cfg, &mut rec, &mut rng)?,
        "logarithm" => logarithm_exp(&cfg, &mut rec)?,
        "height" => height_exp(&cfg, &mut rec)?,
        "level-structure" => level_exp(&cfg, &mut rec)?,
        "endomorphism-frobenius" => frobenius_exp(&cfg, &mut rec)?,
        "period-convergence" => period_exp(&cfg, &mut rec)?,
        "dist-norms" => dist_exp(&cfg, &mut rec, &mut rng)?,
        other => return Err(Error::UnknownExperiment(other.to_string())),
    }
    let checks = rec.checks;
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report { schema_version: SCHEMA_VERSION, experiment: cfg.experiment.clone(), config: cfg, checks, pass })
}

fn domain_ctx(cfg: &ExperimentConfig) -> Result<Ctx> {
    if cfg.h < 2 {
        return Err(Error::ConfigInvalid("this experiment needs h >= 2".into()));
    }
    make_context(cfg.p, cfg.h, cfg.n)
}

fn samples(cfg: &ExperimentConfig, default: usize) -> usize {
    cfg.samples.unwrap_or(default)
}

fn j_homomorphism(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = make_context(cfg.p, cfg.h, cfg.n)?;
    let n = samples(cfg, 200);
    let (mut j_ok, mut nrd_ok) = (0, 0);
    for _ in 0..n {
        let a = sample_gamma_rng(&ctx, rng, 0);
        let b = sample_gamma_rng(&ctx, rng, 0);
        let ab = a.mul(&b);
        j_ok += (j_embed(&ab) == j_embed(&a).mul(&j_embed(&b))) as usize;
        nrd_ok += (nrd(&ab) == &nrd(&a) * &nrd(&b)) as usize;
    }
    rec.check("j-multiplicative", "j(γγ') = j(γ) j(γ')", json!({ "pairs": n }), json!({ "agree": j_ok, "pairs": n }), j_ok == n);
    rec.check("nrd-multiplicative", "Nrd = det ∘ j", json!({ "pairs": n }), json!({ "agree": nrd_ok, "pairs": n }), nrd_ok == n);
    let mut worst = Vec::new();
    let mut ok = true;
    for k in 1..cfg.n.min(4) {
        let mut least = u32::MAX;
        for _ in 0..n.min(20) {
            let u = sample_order_rng(&ctx, rng);
            let g = DivElem::one(&ctx).add(&DivElem::new(u.coeffs().iter().map(|c| c.mul_p_pow(k)).collect())?);
            let v = (&nrd(&g) - &ctx.one()).valuation().bound();
            least = least.min(v);
        }
        ok &= least >= k;
        worst.push(json!({ "n": k, "min_valuation": least }));
    }
    rec.check("nrd-congruence", "Nrd(1 + p^n u) ≡ 1 mod p^n", json!({ "levels": cfg.n.min(4) - 1 }), json!(worst), ok);
    Ok(())
}

fn dheq_vs_matrix(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let n = samples(cfg, 50);
    let mut agree = 0;
    for _ in 0..n {
        let g = sample_gamma_rng(&ctx, rng, 0);
        let a = GammaAction::new(&g, cfg.dmax)?;
        let b = GammaAction::from_matrix(&j_embed(&g), cfg.dmax)?;
        agree += (1..cfg.h).all(|i| a.image(i) == b.image(i)) as usize;
    }
    rec.check(
        "images-agree",
        "γ(w_i) = (w j(γ))_i / (w j(γ))_0",
        json!({ "samples": n, "Dmax": cfg.dmax }),
        json!({ "agree": agree, "samples": n }),
        agree == n,
    );
    Ok(())
}

fn random_section(ctx: &Ctx, dmax: u32, s: i64, rng: &mut ChaCha8Rng) -> Section {
    Section::new(DomainFunc::random(ctx, 0, dmax, rng), s)
}

fn action_law(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let n = samples(cfg, 20);
    let d = cfg.dmax;
    let guard = d + cfg.n;
    let twists = [-2, 0, 3];
    let mut agree = 0;
    for k in 0..n {
        let a = sample_gamma_rng(&ctx, rng, 0);
        let b = sample_gamma_rng(&ctx, rng, 0);
        let x = random_section(&ctx, d, twists[k % 3], rng);
        let lhs = gamma_act(&a, &gamma_act(&b, &x, guard)?, guard)?.with_dmax(d);
        let rhs = gamma_act(&a.mul(&b), &x, d)?;
        agree += (lhs == rhs) as usize;
    }
    rec.check(
        "left-action",
        "γ(γ'(x)) = (γγ')(x)",
        json!({ "samples": n, "twists": twists }),
        json!({ "agree": agree, "samples": n }),
        agree == n,
    );
    let m = 5 * n;
    let mut kept = 0;
    for _ in 0..m {
        let g = sample_gamma_rng(&ctx, rng, 0);
        let x = random_section(&ctx, d, rng.gen_range(-2..=3), rng);
        kept += (gamma_act(&g, &x, d)?.gauss_valuation()? == x.gauss_valuation()?) as usize;
    }
    rec.check(
        "norm-preservation",
        "‖a(w_i)‖_D = ‖w_i‖_D",
        json!({ "samples": m }),
        json!({ "preserved": kept, "samples": m }),
        kept == m,
    );
    Ok(())
}

fn lie_weights(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let h = cfg.h;
    let space = mono_space(h - 1, cfg.dmax);
    let twists = cfg.s.map(|s| vec![s]).unwrap_or_else(|| vec![0, 1, 3]);
    let (mut tested, mut bad00, mut badii, mut badn) = (0, 0, 0, 0);
    for &s in &twists {
        for m in &space.monos {
            let x = Section::new(DomainFunc::monomial(&ctx.one(), &m[..h - 1], cfg.dmax), s);
            tested += 1;
            let want = x.f.scale(&ctx.from_int(s - mono_degree(m) as i64));
            bad00 += (lie_act(0, 0, &x).f != want) as usize;
            for i in 1..h {
                badii += (lie_act(i, i, &x).f != x.f.scale(&ctx.from_int(m[i - 1] as i64))) as usize;
            }
        }
        let top = Section::new(DomainFunc::one(&ctx, cfg.dmax), s);
        badn += (1..h).filter(|&j| !lie_act(0, j, &top).is_zero()).count();
    }
    rec.check(
        "x00-weight",
        "x_00(w^α φ_0^s) = (s − |α|) w^α φ_0^s",
        json!({ "twists": twists, "Dmax": cfg.dmax }),
        json!({ "monomials": tested, "failures": bad00 }),
        bad00 == 0,
    );
    rec.check(
        "xii-weight",
        "x_ii(w^α φ_0^s) = α_i w^α φ_0^s",
        json!({ "twists": twists, "Dmax": cfg.dmax }),
        json!({ "monomials": tested, "failures": badii }),
        badii == 0,
    );
    rec.check("n-kills-top", "𝔫 φ_0^s = 0", json!({ "twists": twists }), json!({ "failures": badn }), badn == 0);
    Ok(())
}

fn lie_bracket(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let h = cfg.h;
    // two raising steps stay inside the working truncation
    let work = cfg.dmax + 2;
    let space = mono_space(h - 1, cfg.dmax);
    let twists = cfg.s.map(|s| vec![s]).unwrap_or_else(|| vec![-1, 2]);
    let (mut tested, mut bad) = (0, 0);
    for &s in &twists {
        for m in &space.monos {
            let x = Section::new(DomainFunc::monomial(&ctx.one(), &m[..h - 1], work), s);
            for i in 0..h {
                for j in 0..h {
                    for k in 0..h {
                        for l in 0..h {
                            let lhs = lie_act(i, j, &lie_act(k, l, &x)).sub(&lie_act(k, l, &lie_act(i, j, &x)));
                            let mut rhs = Section::new(DomainFunc::zero(&ctx, work), s);
                            if j == k {
                                rhs = rhs.add(&lie_act(i, l, &x));
                            }
                            if l == i {
                                rhs = rhs.sub(&lie_act(k, j, &x));
                            }
                            tested += 1;
                            bad += (lhs != rhs) as usize;
                        }
                    }
                }
            }
        }
    }
    rec.check(
        "gl-relations",
        "[x_ij, x_kl] = δ_jk x_il − δ_li x_kj",
        json!({ "twists": twists, "Dmax": cfg.dmax }),
        json!({ "relations": tested, "failures": bad }),
        bad == 0,
    );
    Ok(())
}

/// Valuation, or `None` for an exact zero.
fn opt_val(x: &Section) -> Result<Option<i64>> {
    if x.is_zero() {
        Ok(None)
    } else {
        x.gauss_valuation().map(Some)
    }
}

fn finite_difference(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let n = samples(cfg, 20);
    let s = cfg.s.unwrap_or(1);
    let ks: Vec<u32> = (2..=5).filter(|&k| k < cfg.n).collect();
    let mut traces = Vec::new();
    let mut min_step = i64::MAX;
    for _ in 0..n {
        let delta = sample_order_rng(&ctx, rng);
        let x = random_section(&ctx, cfg.dmax, s, rng);
        let mut vals = Vec::new();
        for &k in &ks {
            let (q, d) = lie_finite_difference(&delta, &x, k, cfg.dmax)?;
            vals.push(opt_val(&q.sub(&d))?);
        }
        for w in vals.windows(2) {
            let step = match (w[0], w[1]) {
                (Some(a), Some(b)) => b - a,
                (_, None) => i64::MAX,
                (None, Some(_)) => i64::MIN,
            };
            min_step = min_step.min(step);
        }
        traces.push(json!(vals));
    }
    rec.check(
        "convergence-rate",
        "lim_{t→0} (exp(tx)(v) − v)/t",
        json!({ "samples": n, "k": ks, "s": s }),
        json!({ "min_increase": min_step, "valuations": traces }),
        min_step >= 1,
    );
    Ok(())
}

fn fn_sequence_exp(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let twists = cfg.s.map(|s| vec![s]).unwrap_or_else(|| vec![-1, 0, 2]);
    let d = 2.min(cfg.dmax);
    let (mut runs, mut agree, mut stable) = (0, 0, 0);
    let mut stable_runs = 0;
    for &s in &twists {
        for _ in 0..samples(cfg, 3) {
            let f0 = DomainFunc::random(&ctx, d, cfg.dmax, rng);
            let seq = fn_sequence(&f0, d, s, cfg.nmax)?;
            runs += 1;
            agree += seq.recursive.iter().zip(&seq.closed).all(|(a, b)| a == b) as usize;
            let from = cfg.dmax.saturating_sub(d) as usize;
            if from <= cfg.nmax as usize {
                stable_runs += 1;
                let top = f0.homogeneous_part(d);
                stable += seq.recursive[from..].iter().all(|f| *f == top) as usize;
            }
        }
    }
    rec.check(
        "recursion-closed-form",
        "f_n = (1/n)((d+n−s) f_{n−1} + x_00(f_{n−1})), (−1)^n binom(i−1,n)",
        json!({ "twists": twists, "d": d, "nmax": cfg.nmax }),
        json!({ "agree": agree, "runs": runs }),
        agree == runs,
    );
    rec.check(
        "stabilization",
        "binom(i−1, n) = 0 for 1 ≤ i ≤ n",
        json!({ "from": cfg.dmax.saturating_sub(d) }),
        json!({ "stable": stable, "runs": stable_runs }),
        stable == stable_runs,
    );
    Ok(())
}

fn vs_stability(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let smax = cfg.dmax as i64;
    let (mut tested, mut inside) = (0, 0);
    let mut dims = Vec::new();
    let mut dims_ok = true;
    for s in 0..=smax {
        let vs = VsSpace::new(cfg.h, s);
        let basis = vs.basis(&ctx, s as u32 + 3);
        let want = binomial(s as u64 + cfg.h as u64 - 1, cfg.h as u64 - 1) as usize;
        dims_ok &= basis.len() == want && vs.dimension() == want;
        dims.push(json!({ "s": s, "dimension": basis.len() }));
        for _ in 0..samples(cfg, 3) {
            let g = sample_gamma_rng(&ctx, rng, 0);
            let mut act = GammaAction::new(&g, s as u32 + 3)?;
            for b in &basis {
                tested += 1;
                inside += vs.contains(&act.apply(b)) as usize;
            }
        }
    }
    rec.check(
        "gamma-stable",
        "γ(w^α φ_0^s) ∈ V_s",
        json!({ "smax": smax }),
        json!({ "inside": inside, "tested": tested }),
        inside == tested,
    );
    rec.check("dimension", "dim V_s = binom(s+h−1, h−1)", json!({ "smax": smax }), json!(dims), dims_ok);
    Ok(())
}

fn homogeneous_random(ctx: &Ctx, d: u32, dmax: u32, rng: &mut ChaCha8Rng) -> DomainFunc {
    DomainFunc::random(ctx, d, d, rng).with_dmax(dmax)
}

fn reachability(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let d = cfg.dmax;
    let mut top = Vec::new();
    let mut top_ok = true;
    for s in 0..=3i64.min(d as i64) {
        let r = reach_span(&Section::new(DomainFunc::one(&ctx, d), s), d)?;
        let want: Vec<Mono> = mono_space(cfg.h - 1, s as u32).monos.clone();
        top_ok &= r.monomials == want && r.dimension == VsSpace::new(cfg.h, s).dimension();
        top.push(json!({ "s": s, "dimension": r.dimension }));
    }
    rec.check(
        "highest-weight-span",
        "U(g) φ_0^s = V_s",
        json!({ "Dmax": d }),
        json!(top),
        top_ok,
    );
    let mut generic = Vec::new();
    let mut gen_ok = true;
    for s in [-2i64, -1, 0, 1, 2] {
        for _ in 0..samples(cfg, 3) {
            let deg = if s < 0 { rng.gen_range(0..=3u32) } else { s as u32 + rng.gen_range(1..=2u32) };
            let f = homogeneous_random(&ctx, deg.min(d), d, rng);
            let r = reach_span(&Section::new(f, s), d)?;
            gen_ok &= r.reaches_all();
            generic.push(json!({ "s": s, "degree": deg, "dimension": r.dimension }));
        }
    }
    rec.check(
        "generic-span",
        "contained in (U(g)⊗_K K̆)(f φ_0^s)",
        json!({ "Dmax": d }),
        json!({ "runs": generic, "total": mono_space(cfg.h - 1, d).monos.len() }),
        gen_ok,
    );
    Ok(())
}

fn kernels(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let h = cfg.h;
    let lowering: Vec<(usize, usize)> = (1..h).map(|j| (0, j)).collect();
    let mut dims = Vec::new();
    let mut ok = true;
    for d in 1..=cfg.dmax {
        let k = operator_kernel(&ctx, &lowering, 0, d)?;
        ok &= k.len() == 1 && k[0].degree() == Some(0);
        dims.push(k.len());
    }
    rec.check("constants", "must be a constant power series", json!({ "Dmax": cfg.dmax }), json!(dims), ok);
    let upper: Vec<(usize, usize)> = (0..h).flat_map(|i| (i + 1..h).map(move |j| (i, j))).collect();
    let mut lines = Vec::new();
    let mut ok = true;
    for s in 0..=3u32.min(cfg.dmax) {
        let k = operator_kernel(&ctx, &upper, s as i64, s)?;
        ok &= k.len() == 1 && k[0].degree() == Some(0);
        lines.push(k.len());
    }
    rec.check("highest-weight-line", "𝔫 φ_0^s = 0", json!({ "smax": 3 }), json!(lines), ok);
    Ok(())
}

fn lf_exp(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let top = cfg.dmax.max(6);
    let ladder = [top - 4, top - 2, top];
    let mut rows = Vec::new();
    let mut ok = true;
    let smax = cfg.s.unwrap_or(2).max(0);
    for s in 0..=smax {
        let vs = VsSpace::new(cfg.h, s);
        let mut x = Section::new(DomainFunc::zero(&ctx, top), s);
        for b in vs.basis(&ctx, top) {
            x = x.add(&b.scale(&ctx.random(rng)));
        }
        if x.is_zero() {
            x = Section::new(DomainFunc::one(&ctx, top), s);
        }
        let r = lf_diagnostic(&x, &ladder)?;
        let fin = matches!(r.verdict, LfVerdict::Finite(d) if d <= vs.dimension());
        let mut alpha = [0u16; MAX_VARS];
        alpha[0] = s as u16 + 1;
        let y = Section::new(DomainFunc::monomial(&ctx.one(), &alpha[..cfg.h - 1], top), s);
        let g = lf_diagnostic(&y, &ladder)?;
        let grows = g.verdict == LfVerdict::Growing;
        ok &= fin && grows;
        rows.push(json!({ "s": s, "in_vs": r.dimensions, "outside": g.dimensions }));
    }
    let c = lf_diagnostic(&Section::new(DomainFunc::one(&ctx, top), 0), &ladder)?;
    ok &= c.verdict == LfVerdict::Finite(1);
    rec.check(
        "ladder",
        "(M^s_D)_lf = V_s",
        json!({ "ladder": ladder, "smax": smax }),
        json!({ "runs": rows, "constant": c.dimensions }),
        ok,
    );
    Ok(())
}

fn contraction(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let h = cfg.h as i64;
    let n_samples = samples(cfg, 200);
    let mut rows = Vec::new();
    let mut ok = true;
    for n in 1..=3u32 {
        let mut least: Option<i64> = None;
        for _ in 0..n_samples {
            let g = sample_gamma_rng(&ctx, rng, n);
            let x = random_section(&ctx, cfg.dmax, rng.gen_range(-1..=2), rng);
            if let Some(v) = contraction_profile(&g, &x, cfg.dmax)? {
                least = Some(least.map_or(v, |l| l.min(v)));
            }
        }
        ok &= least.map_or(true, |l| l >= n as i64 * h);
        rows.push(json!({ "n": n, "min_profile": least, "bound": n as i64 * h }));
    }
    rec.check(
        "single-step",
        "‖γ(f) − f‖ ≤ |ϖ|^n ‖f‖",
        json!({ "samples": n_samples }),
        json!(rows),
        ok,
    );
    let mut rows = Vec::new();
    let mut ok = true;
    let shapes: [[u32; 2]; 4] = [[1, 0], [0, 1], [1, 1], [2, 1]];
    for n in 1..=3u32 {
        for alpha in shapes {
            let mut least: Option<i64> = None;
            for _ in 0..(n_samples / 20).max(1) {
                let base = vec![sample_gamma_rng(&ctx, rng, n), sample_gamma_rng(&ctx, rng, n)];
                let b = BMonomialSet::new(base, alpha.to_vec())?;
                let x = random_section(&ctx, cfg.dmax, rng.gen_range(-1..=2), rng);
                let y = apply_b_iterated(&b, &x, cfg.dmax)?;
                if let Some(v) = opt_val(&y)? {
                    let prof = v - x.gauss_valuation()?;
                    least = Some(least.map_or(prof, |l| l.min(prof)));
                }
            }
            let bound = b_total(&alpha) as i64 * n as i64 * h;
            ok &= least.map_or(true, |l| l >= bound);
            rows.push(json!({ "n": n, "alpha": alpha, "min_profile": least, "bound": bound }));
        }
    }
    rec.check(
        "b-monomials",
        "‖b^α(f)‖ ≤ ‖b^α‖ ‖f‖",
        json!({ "samples": (n_samples / 20).max(1) }),
        json!(rows),
        ok,
    );
    Ok(())
}

fn b_total(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}

fn m1(a: u16) -> Mono {
    mono_of(&[a])
}

/// Re-index a series into `nvars` variables, sending variable `k` to
/// `targets[k]`.
fn embed(s: &TruncSeries<PadicScalar>, nvars: usize, targets: &[usize]) -> TruncSeries<PadicScalar> {
    let terms: Vec<(Mono, PadicScalar)> = s
        .terms()
        .map(|(m, c)| {
            let mut out = [0u16; MAX_VARS];
            for (k, &t) in targets.iter().enumerate() {
                out[t] += m[k];
            }
            (out, c.clone())
        })
        .collect();
    TruncSeries::from_terms(nvars, s.dmax(), s.zero_coeff(), &terms)
}

fn compose(outer: &TruncSeries<PadicScalar>, args: &[TruncSeries<PadicScalar>]) -> TruncSeries<PadicScalar> {
    let d = outer.degree().unwrap_or(0).max(1);
    PowerTable::new(args, d).apply(outer)
}

struct AxiomCounts {
    commutative: bool,
    associative: bool,
    mult: bool,
    endo: bool,
    p_series: bool,
    log: bool,
}

fn module_axioms(m: &FormalModule, f: Option<&TruncSeries<PadicScalar>>, samples: &[i64]) -> Result<AxiomCounts> {
    let d = m.dmax();
    let law = m.law();
    let z = law.zero_coeff().clone();
    let swapped = compose(&law, &[TruncSeries::var(2, d, 1, &z), TruncSeries::var(2, d, 0, &z)]);
    let l3 = |a: usize, b: usize| embed(&law, 3, &[a, b]);
    let x3 = |k: usize| TruncSeries::var(3, d, k, &z);
    let left = compose(&law, &[l3(0, 1), x3(2)]);
    let right = compose(&law, &[x3(0), l3(1, 2)]);
    let mut mult = true;
    let mut endo = true;
    for &a in samples {
        let ma = m.mult_int(a)?;
        for &b in samples {
            let mb = m.mult_int(b)?;
            mult &= compose(&ma, &[mb]) == m.mult_int(a * b)?;
        }
        let lhs = compose(&ma, &[law.clone()]);
        let rhs = compose(&law, &[embed(&ma, 2, &[0]), embed(&ma, 2, &[1])]);
        endo &= lhs == rhs;
    }
    let p_series = match f {
        Some(f) => m.mult_int(m.ctx().p() as i64)? == *f,
        None => true,
    };
    let log = logarithm(m)?.additivity_defect(&law).is_zero();
    Ok(AxiomCounts { commutative: swapped == law, associative: left == right, mult, endo, p_series, log })
}

fn formal_axioms(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = cfg.p;
    let samples = [2i64, -1, p as i64 + 1];
    for k in [1u32, cfg.h.max(1) as u32] {
        let f = frobenius_poly(p, k, cfg.n, cfg.dmax)?;
        let m = lt_construct(&f, cfg.dmax)?;
        let a = module_axioms(&m, Some(&f), &samples)?;
        let inputs = json!({ "f": format!("pX + X^{}", p.pow(k)), "Dmax": cfg.dmax });
        let tag = format!("q^{k}");
        rec.check(&format!("commutative-{tag}"), "F(X,Y) = F(Y,X)", inputs.clone(), json!(a.commutative), a.commutative);
        rec.check(&format!("associative-{tag}"), "F(F(X,Y),Z) = F(X,F(Y,Z))", inputs.clone(), json!(a.associative), a.associative);
        rec.check(&format!("ring-map-{tag}"), "[a]∘[b] = [ab]", inputs.clone(), json!({ "samples": samples, "ok": a.mult }), a.mult);
        rec.check(&format!("endomorphism-{tag}"), "[a](F(X,Y)) = F([a]X,[a]Y)", inputs.clone(), json!(a.endo), a.endo);
        rec.check(&format!("p-series-{tag}"), "[ϖ]_F = f", inputs.clone(), json!(a.p_series), a.p_series);
        rec.check(&format!("log-additive-{tag}"), "log_F(F(X,Y)) = log_F(X) + log_F(Y)", inputs, json!(a.log), a.log);
    }
    Ok(())
}

fn gm_identities(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let p = cfg.p;
    let m = gm_module(p, cfg.n, cfg.dmax)?;
    let z = m.ctx().zero();
    let one = TruncSeries::one(1, cfg.dmax, &z);
    let want = TruncSeries::var(1, cfg.dmax, 0, &z).add(&one).pow(p).sub(&one);
    let got = m.mult_int(p as i64)?;
    rec.check("p-series", "[p]_{G_m} = (1+X)^p − 1", json!({ "p": p }), json!(got == want), got == want);
    let mut ok = true;
    let mut tried = Vec::new();
    for _ in 0..samples(cfg, 5) {
        let a = rng.gen_range(-50i64..=50);
        let s = m.mult_int(a)?;
        // binom(a, n) for integer a, by the integer recurrence
        let mut c: i128 = 1;
        for n in 1..=cfg.dmax as i128 {
            c = c * (a as i128 - n + 1) / n;
            let modulus = (p as i128).pow(cfg.n);
            ok &= s.coeff(&m1(n as u16)) == m.ctx().from_int(c.rem_euclid(modulus) as i64);
        }
        tried.push(a);
    }
    rec.check("binomial", "[a]_{G_m}(X) = Σ binom(a,n) X^n", json!({ "a": tried }), json!(ok), ok);
    let a = module_axioms(&m, Some(&want), &[2, -1, p as i64 + 1])?;
    let all = a.commutative && a.associative && a.mult && a.endo;
    rec.check(
        "module",
        "[a]∘[b] = [ab]",
        json!({ "Dmax": cfg.dmax }),
        json!({ "commutative": a.commutative, "associative": a.associative, "ring_map": a.mult, "endomorphism": a.endo }),
        all,
    );
    Ok(())
}

fn logarithm_exp(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = cfg.p;
    let ctx = make_context(p, 1, cfg.n)?;
    let modules = [
        ("additive", ga_module(&ctx, cfg.dmax)),
        ("multiplicative", gm_module(p, cfg.n, cfg.dmax)?),
        ("lubin-tate", lt_construct(&frobenius_poly(p, 1, cfg.n, cfg.dmax)?, cfg.dmax)?),
    ];
    for (name, m) in &modules {
        let log = logarithm(m)?;
        let additive = log.additivity_defect(&m.law()).is_zero();
        let mut linear = true;
        for a in [2i64, -1, p as i64] {
            let lhs = compose(&log.num, &[m.mult_int(a)?]);
            linear &= lhs == log.num.scale(&m.ctx().from_int(a));
        }
        rec.check(
            &format!("{name}-additive"),
            "log_F(F(X,Y)) = log_F(X) + log_F(Y)",
            json!({ "module": name, "Dmax": cfg.dmax }),
            json!({ "denominator_exponent": log.den }),
            additive,
        );
        rec.check(&format!("{name}-linear"), "log_F([a]X) = a log_F(X)", json!({ "module": name }), json!(linear), linear);
    }
    let log = logarithm(&modules[1].1)?;
    let mut ok = true;
    for k in 1..=cfg.dmax as u16 {
        let (num, den) = log.coeff(k);
        let v = crate::padic::int_valuation(p, k as u128);
        let unit = k as i64 / (p as i64).pow(v);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        ok &= den == v && num == ctx.from_int(sign).div_int(unit)?;
    }
    rec.check("multiplicative-coefficients", "log(1+X) = Σ (−1)^{n+1} X^n / n", json!({ "Dmax": cfg.dmax }), json!(ok), ok);
    Ok(())
}

fn height_json(h: &Result<Height>) -> Value {
    match h {
        Ok(Height::Finite(k)) => json!(k),
        Ok(Height::Infinite) => json!("infinite"),
        Err(e) => json!(e.to_string()),
    }
}

fn height_exp(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = cfg.p;
    let ctx = make_context(p, 1, cfg.n)?;
    let gm = height(&gm_module(p, cfg.n, cfg.dmax)?.reduce_mod_p());
    rec.check("multiplicative", "height(G_m) = 1", json!({ "p": p }), height_json(&gm), gm == Ok(Height::Finite(1)));
    let ga = height(&ga_module(&ctx, cfg.dmax).reduce_mod_p());
    rec.check("additive", "height(G_a) = ∞", json!({ "p": p }), height_json(&ga), ga == Ok(Height::Infinite));
    for k in [2u32, 3] {
        let d = cfg.dmax.max(p.pow(k) as u32);
        let m = lt_construct(&frobenius_poly(p, k, cfg.n, d)?, d)?;
        let got = height(&m.reduce_mod_p());
        rec.check(
            &format!("lubin-tate-{k}"),
            "[ϖ](X) = g(X^{q^h}), g'(0) ≠ 0",
            json!({ "f": format!("pX + X^{}", p.pow(k)), "Dmax": d }),
            height_json(&got),
            got == Ok(Height::Finite(k)),
        );
    }
    Ok(())
}

fn level_exp(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = cfg.p;
    // additivity needs the law to the degree where points vanish mod p^N
    let d = cfg.dmax.max(cfg.n * (p as u32 - 1).max(1));
    let f = frobenius_poly(p, 1, cfg.n, d)?;
    let m = lt_construct(&f, d)?;
    let (ring, points) = level_one_points(&m, cfg.n)?;
    let ok = level_structure_check(&points, 1, &m, &ring)?;
    rec.check(
        "divides-p-series",
        "Π (X − φ(α)) divides [ϖ^m](X)",
        json!({ "p": p, "m": 1, "precision": cfg.n, "Dmax": d }),
        json!({ "points": points.iter().map(|t| t.to_json()).collect::<Vec<_>>() }),
        ok,
    );
    Ok(())
}

fn frobenius_exp(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = cfg.p;
    let k = cfg.h as u32;
    let q_h = p.pow(k) as u32;
    let d = cfg.dmax.max(q_h);
    let m = lt_construct(&frobenius_poly(p, k, cfg.n, d)?, d)?.reduce_mod_p();
    let z = m.ctx().zero();
    let tau = TruncSeries::monomial(1, d, m1(p as u16), &m.ctx().one());
    let samples = [2i64, -1, p as i64 + 1];
    let endo = check_endomorphism(&tau, &m, &samples)?;
    rec.check(
        "tau-endomorphism",
        "End(H_0) ≃ o_{B_h}",
        json!({ "h": k, "Dmax": d, "samples": samples }),
        json!(endo),
        endo,
    );
    let mut tau_h = TruncSeries::var(1, d, 0, &z);
    for _ in 0..k {
        tau_h = compose(&tau, &[tau_h]);
    }
    let pp = m.mult_int(p as i64)?;
    let ok = tau_h.reduce_mod_p() == pp;
    rec.check("tau-power", "τ^h = [p]", json!({ "h": k, "Dmax": d }), json!(ok), ok);
    Ok(())
}

fn period_exp(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let ctx = make_context(cfg.p, 1, cfg.n)?;
    let h = cfg.h.max(2);
    let a = univ_log_coeffs(&ctx, h, cfg.nmax, cfg.dmax)?;
    let res = recursion_residuals(&a)?;
    let exact = res.iter().all(|r| r.is_zero());
    rec.check("recursion", "p a_n = Σ u_i^{q^{n−i}} a_{n−i}", json!({ "nmax": cfg.nmax }), json!(exact), exact);
    let mut dens = Vec::new();
    let mut origin_ok = true;
    let mut diffs = Vec::new();
    let mut conv_ok = true;
    for i in 0..h {
        let stages: Vec<u32> = (0..).take_while(|&n| n * h as u32 + i as u32 <= cfg.nmax).collect();
        let approx: Vec<_> = stages.iter().map(|&n| phi_approx(&a, i, n)).collect::<Result<_>>()?;
        for (n, f) in approx.iter().enumerate() {
            dens.push(json!({ "i": i, "n": n, "denominator_exponent": f.denominator_exponent() }));
            let (c, den) = f.at_origin();
            let want = if i == 0 { ctx.one() } else { ctx.zero() };
            origin_ok &= c == want.mul_p_pow(den);
        }
        for l in [1u32, 2] {
            let vals: Vec<Option<i64>> = approx
                .windows(2)
                .map(|w| w[1].sub(&w[0]).map(|d| norm_l(&d, l).ok()))
                .collect::<Result<_>>()?;
            let strictly = vals.windows(2).all(|w| match (w[0], w[1]) {
                (Some(x), Some(y)) => y > x,
                (_, None) => true,
                (None, Some(_)) => false,
            });
            conv_ok &= strictly;
            diffs.push(json!({ "i": i, "l": l, "difference_valuations": vals }));
        }
    }
    let integral = dens.iter().all(|d| d["denominator_exponent"] == json!(0));
    rec.check("integrality", "ϖ^n a_{nh} integral", json!({ "nmax": cfg.nmax }), json!(dens), integral);
    rec.check(
        "convergence",
        "φ_0 := lim ϖ^n a_{nh}",
        json!({ "nmax": cfg.nmax, "l": [1, 2] }),
        json!(diffs),
        conv_ok,
    );
    rec.check("origin", "Φ(0) = [1:0:…:0]", json!({ "nmax": cfg.nmax }), json!(origin_ok), origin_ok);
    Ok(())
}

fn dist_exp(cfg: &ExperimentConfig, rec: &mut Recorder, rng: &mut ChaCha8Rng) -> Result<()> {
    let ctx = domain_ctx(cfg)?;
    let p = cfg.p;
    let alphas: [[u32; 2]; 6] = [[0, 0], [1, 0], [0, 1], [1, 1], [2, 1], [1, 2]];
    let radii: Vec<(u64, u64)> = vec![(1, p), (p - 1, p), (2, 3)].into_iter().filter(|&(a, b)| a * p >= b && a < b).collect();
    let mut ok = true;
    let mut rows = Vec::new();
    for alpha in alphas {
        for &r in &radii {
            let n = dist_norm_r(&[(alpha.to_vec(), ctx.one())], r)?;
            let want = b_total(&alpha) as f64 * (r.0 as f64 / r.1 as f64).ln();
            let good = n.argmax == Some((0, b_total(&alpha))) && (n.log_value - want).abs() <= 1e-12 * want.abs().max(1.0);
            ok &= good;
            rows.push(json!({ "alpha": alpha, "r": [r.0, r.1], "log_norm": n.log_value }));
        }
    }
    rec.check("b-monomial-norm", "sup |d_α| r^{|α|}", json!({ "radii": radii }), json!(rows), ok);
    let (mut agree, mut total) = (0, 0);
    let mut linear = true;
    for _ in 0..samples(cfg, 5) {
        let base = vec![sample_gamma_rng(&ctx, rng, 1), sample_gamma_rng(&ctx, rng, 1)];
        for alpha in &alphas[1..] {
            let b = BMonomialSet::new(base.clone(), alpha.to_vec())?;
            let x = random_section(&ctx, cfg.dmax, rng.gen_range(-1..=2), rng);
            let mu = expand_b_monomial(&b)?;
            let lhs = apply_group_ring(&mu, &x, cfg.dmax)?;
            let rhs = apply_b_iterated(&b, &x, cfg.dmax)?;
            total += 1;
            agree += (lhs == rhs) as usize;
        }
        let x = random_section(&ctx, cfg.dmax, 0, rng);
        let y = random_section(&ctx, cfg.dmax, 0, rng);
        let mu = GroupRingElem::delta(&base[0])?.add(&GroupRingElem::delta(&base[1])?.scale(&ctx.random(rng)));
        let nu = GroupRingElem::one(&ctx).scale(&ctx.random(rng));
        let sum = apply_group_ring(&mu.add(&nu), &x.add(&y), cfg.dmax)?;
        let parts = [(&mu, &x), (&mu, &y), (&nu, &x), (&nu, &y)]
            .iter()
            .map(|(m, v)| apply_group_ring(m, v, cfg.dmax))
            .collect::<Result<Vec<_>>>()?;
        let split = parts[1..].iter().fold(parts[0].clone(), |a, b| a.add(b));
        linear &= sum == split;
    }
    rec.check(
        "evaluation-orders",
        "b^α by expansion = iterated (γ_i − 1)",
        json!({ "samples": samples(cfg, 5) }),
        json!({ "agree": agree, "total": total }),
        agree == total,
    );
    rec.check("linearity", "μ(x) is bilinear", json!({ "samples": samples(cfg, 5) }), json!(linear), linear);
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "text-table" => Ok(Format::Text),
            other => Err(Error::ConfigInvalid(format!("unknown format `{other}`"))),
        }
    }
}

/// Render a report; identical reports give identical bytes.
pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["experiment", "check_id", "anchor", "pass", "inputs_digest", "measured", "runtime_ms"])
                .expect("in-memory write");
            for c in &report.checks {
                let runtime = c.runtime_ms.map(|r| r.to_string()).unwrap_or_default();
                let measured = serde_json::to_string(&c.measured).expect("json encodes");
                w.write_record([
                    report.experiment.as_str(),
                    &c.id,
                    &c.anchor,
                    if c.pass { "pass" } else { "fail" },
                    &c.inputs_digest,
                    &measured,
                    &runtime,
                ])
                .expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
        Format::Text => {
            let rows: Vec<[String; 3]> = report
                .checks
                .iter()
                .map(|c| [c.id.clone(), if c.pass { "PASS".into() } else { "FAIL".into() }, c.anchor.clone()])
                .collect();
            let w0 = rows.iter().map(|r| r[0].chars().count()).max().unwrap_or(0).max(5);
            let mut out = format!("{}  {}\n", report.experiment, if report.pass { "PASS" } else { "FAIL" });
            out += &format!("{:<w0$}  {:<6}{}\n", "check", "result", "  claim");
            for r in rows {
                out += &format!("{:<w0$}  {:<6}  {}\n", r[0], r[1], r[2]);
            }
            out.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_experiment() {
        let cfg = ExperimentConfig::defaults_for("kernels").unwrap();
        assert!(matches!(run("no-such-thing", &cfg), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn empty_report_csv_is_header_only() {
        let cfg = ExperimentConfig::defaults_for("kernels").unwrap();
        let out = String::from_utf8(emit(&Report::empty(&cfg), Format::Csv)).unwrap();
        assert_eq!(out.lines().count(), 1);
    }

    #[test]
    fn config_round_trips() {
        let cfg = ExperimentConfig::defaults_for("fn-sequence").unwrap();
        let v = serde_json::to_value(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&v).unwrap(), cfg);
        let bad = json!({ "experiment": "kernels", "h": 3, "e": 4 });
        assert!(matches!(ExperimentConfig::from_json(&bad), Err(Error::ConfigInvalid(_))));
    }
}
