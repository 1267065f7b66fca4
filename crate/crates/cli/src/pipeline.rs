//! Case file to verdict.

use iwasawa_cyc_core::decision::{
    decide_cyclic_thm512, decide_generators_thm11, derive_action_coefficients, fujii_layer, minardi_subset,
    ord_mu_from_action, prop_test_sufficient, ActionCoefficients, ClassForms, DecisionError, MuValuations,
};
use iwasawa_cyc_core::lambda_class::{infer_k, FiniteLevelData, LambdaError};
use iwasawa_cyc_core::padic::{arith, splitting_type, PadicError};
use iwasawa_cyc_core::{
    Cyclicity, ExtField, IwasawaPoly, KInference, ModuleClass, SplitKind, SplittingData, TowerData, Verdict,
};
use serde::Serialize;
use thiserror::Error;

use crate::schema::{CaseFile, Derivable, PolyBlock, Rational};
use crate::validate::{effective_poly, validate, Options, Violation};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("case file is invalid")]
    Invalid(Vec<Violation>),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Invalid(_) => 3,
            PipelineError::Inconsistent(_) => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitSummary {
    pub kind: String,
    pub ord_alpha: u32,
    pub ord_beta: u32,
    pub ord_diff: u32,
    pub m: u32,
    /// `iwasawa_poly`, `extended_poly`, `roots` or `splitting_override`.
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerSummary {
    pub n1: Option<u32>,
    pub n2: Option<u32>,
    pub lk_in_ktilde: Option<bool>,
    pub direct_summand: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionSummary {
    pub a: u64,
    pub b: u64,
    pub modulus_exponent: u32,
    /// `v_p(A)`, `v_p(B)`; `None` when zero at the modulus.
    pub vp_a: Option<u32>,
    pub vp_b: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub generator_count: Option<u32>,
    pub cyclic: String,
    pub fired_case: Option<String>,
    pub needs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Analysis {
    pub p: u64,
    pub d: u64,
    pub class_group_k: Vec<u32>,
    /// Splitting read from the Iwasawa polynomial alone, if determinate.
    pub computed_splitting: Option<SplitSummary>,
    /// Splitting used by the decision.
    pub splitting: Option<SplitSummary>,
    pub k: Option<u32>,
    pub k_candidates: Vec<u32>,
    pub tower: TowerSummary,
    pub action: Option<ActionSummary>,
    pub mu21: Option<u32>,
    pub mu22: Option<u32>,
    pub verdict: VerdictReport,
    pub trace: Vec<String>,
}

impl Analysis {
    pub fn cyclicity(&self) -> &str {
        &self.verdict.cyclic
    }

    pub fn exit_code(&self) -> i32 {
        if self.verdict.cyclic == Cyclicity::Undetermined.label() {
            2
        } else {
            0
        }
    }
}

fn summary(sd: &SplittingData, source: &str) -> SplitSummary {
    SplitSummary {
        kind: sd.kind.label().into(),
        ord_alpha: sd.ord_alpha,
        ord_beta: sd.ord_beta,
        ord_diff: sd.ord_diff,
        m: sd.m(),
        source: source.into(),
    }
}

fn parse_kind(s: &str) -> SplitKind {
    match s {
        "unramified" => SplitKind::Unramified,
        "ramified" => SplitKind::Ramified,
        _ => SplitKind::Split,
    }
}

struct Ctx {
    trace: Vec<String>,
    needs: Vec<String>,
}

impl Ctx {
    fn note(&mut self, s: impl Into<String>) {
        self.trace.push(s.into());
    }

    fn need(&mut self, s: impl Into<String>) {
        let s = s.into();
        if !self.needs.contains(&s) {
            self.needs.push(s);
        }
    }
}

fn poly_splitting(p: u64, block: &PolyBlock, name: &str, ctx: &mut Ctx) -> Result<Option<SplittingData>, PipelineError> {
    let f = IwasawaPoly::new(p, block.precision, block.c1.0, block.c0.0)
        .map_err(|e| PipelineError::Inconsistent(format!("{name}: {e}")))?;
    match splitting_type(&f) {
        Ok(sd) => {
            ctx.note(format!(
                "{name}: f = {f}, E/Q_p {}, ord(beta - alpha) = {}, m = {}",
                sd.kind,
                sd.ord_diff,
                sd.m()
            ));
            Ok(Some(sd))
        }
        Err(PadicError::InsufficientPrecision) => {
            ctx.note(format!("{name}: f = {f}: splitting type needs more digits"));
            ctx.need(format!("f mod {p}^{}", block.precision + 2));
            Ok(None)
        }
        Err(PadicError::InconsistentPolynomial) => {
            Err(PipelineError::Inconsistent(format!("{name}: root valuations disagree with the Newton polygon")))
        }
        Err(e) => Err(PipelineError::Inconsistent(format!("{name}: {e}"))),
    }
}

fn roots_splitting(case: &CaseFile, ctx: &mut Ctx) -> Option<SplittingData> {
    let r = case.roots.as_ref()?;
    let field = ExtField::base(case.p, r.precision).ok()?;
    let (x, y) = (field.int(r.alpha.0), field.int(r.beta.0));
    let (vx, vy, vd) = (x.valuation().exact(), y.valuation().exact(), (y - x).valuation().exact());
    let (Some(vx), Some(vy), Some(vd)) = (vx, vy, vd) else {
        ctx.note("roots: valuations are not determined at the given precision");
        return None;
    };
    let ((a, va), (b, vb)) = if (vx, x.canonical_key()) <= (vy, y.canonical_key()) { ((x, vx), (y, vy)) } else { ((y, vy), (x, vx)) };
    ctx.note(format!("roots: alpha = {a}, beta = {b}, ord(beta - alpha) = {vd}"));
    if let Some(poly) = &case.iwasawa_poly {
        let m = arith::pow(case.p, poly.precision.min(r.precision));
        let sum_ok = arith::reduce(r.alpha.0 + r.beta.0 + poly.c1.0, m) == 0;
        let prod_ok = arith::reduce(r.alpha.0 * r.beta.0 - poly.c0.0, m) == 0;
        if !(sum_ok && prod_ok) {
            ctx.note(format!("roots: not roots of iwasawa_poly mod {m}; they are used as a separate datum"));
        }
    }
    Some(SplittingData {
        kind: SplitKind::Split,
        p: case.p,
        field: Some(field),
        roots: Some((a, b)),
        ord_alpha: va,
        ord_beta: vb,
        ord_diff: vd,
    })
}

struct Splitting {
    computed: Option<SplittingData>,
    used: Option<(SplittingData, &'static str)>,
}

fn resolve_splitting(case: &CaseFile, opts: &Options, ctx: &mut Ctx) -> Result<Splitting, PipelineError> {
    let mut computed = None;
    let mut used = None;
    if let Some(block) = effective_poly(case, opts) {
        computed = poly_splitting(case.p, &block, "iwasawa_poly", ctx)?;
        used = computed.map(|sd| (sd, "iwasawa_poly"));
    }
    if used.is_none() {
        if let Some(block) = &case.extended_poly {
            used = poly_splitting(case.p, block, "extended_poly", ctx)?.map(|sd| (sd, "extended_poly"));
        }
    }
    if used.is_none() {
        used = roots_splitting(case, ctx).map(|sd| (sd, "roots"));
    }
    if let Some(s) = &case.splitting_override {
        let over = SplittingData::from_valuations(case.p, parse_kind(&s.kind), s.ord_alpha, s.ord_beta, s.ord_diff);
        match &used {
            None => {
                ctx.note(format!(
                    "splitting_override: E/Q_p {}, ord(beta - alpha) = {}, m = {}",
                    over.kind,
                    over.ord_diff,
                    over.m()
                ));
                used = Some((over, "splitting_override"));
            }
            Some((sd, src)) => {
                if (sd.kind, sd.ord_alpha, sd.ord_beta, sd.ord_diff) != (over.kind, over.ord_alpha, over.ord_beta, over.ord_diff) {
                    ctx.note(format!(
                        "splitting_override ({} {} {} {}) differs from {src}; keeping {src}",
                        over.kind, over.ord_alpha, over.ord_beta, over.ord_diff
                    ));
                }
            }
        }
    }
    Ok(Splitting { computed, used })
}

fn total(exps: &[u32]) -> u32 {
    exps.iter().sum()
}

fn given<T: Copy>(x: Option<Derivable<T>>) -> Option<T> {
    match x {
        Some(Derivable::Given(v)) => Some(v),
        _ => None,
    }
}

/// Reconciles a stated value with one derived from the supporting blocks.
fn reconcile<T: Copy + PartialEq + std::fmt::Debug>(
    name: &str,
    stated: Option<Derivable<T>>,
    derived: Option<T>,
    ctx: &mut Ctx,
) -> Result<Option<T>, PipelineError> {
    match (given(stated), derived) {
        (Some(s), Some(d)) if s != d => {
            Err(PipelineError::Inconsistent(format!("{name}: stated {s:?} but the supplied data give {d:?}")))
        }
        (Some(s), _) => Ok(Some(s)),
        (None, Some(d)) => {
            ctx.note(format!("{name} = {d:?} (derived)"));
            Ok(Some(d))
        }
        (None, None) => Ok(None),
    }
}

fn resolve_tower(case: &CaseFile, ctx: &mut Ctx) -> Result<TowerSummary, PipelineError> {
    let t = &case.tower;
    let ak = &case.class_group_k;
    let lk_derived = case.minardi.as_ref().and_then(|m| minardi_subset(case.p, case.d, m.h_aux_div_by_3));
    if let Some(lk) = lk_derived {
        ctx.note(format!("Minardi criterion: L_K inside K~ is {lk}"));
    }
    let lk = reconcile("lk_in_ktilde", t.lk_in_ktilde, lk_derived, ctx)?;

    let mut fujii = None;
    if let Some(ray) = &case.ray_class {
        let flag = t.local_torsion_trivial == Some(true);
        match fujii_layer(&ray.factor_exponents, ray.n, ak, flag) {
            Ok(Some(out)) => {
                ctx.note(format!(
                    "Fujii at n = {}: bound N = {}, Tor X_K exponents {:?}",
                    ray.n, out.bound, out.torsion
                ));
                fujii = Some(out);
            }
            Ok(None) => ctx.note(format!("Fujii at n = {}: hypotheses N + 2 <= n, N < N_i fail", ray.n)),
            Err(DecisionError::AmbiguousDecomposition) => {
                ctx.note("Fujii: more than two ray class factors exceed the bound");
            }
            Err(e) => return Err(PipelineError::Inconsistent(format!("{e}"))),
        }
    }
    let mut n1_derived = fujii.as_ref().and_then(|f| f.n1);
    if n1_derived.is_none() && lk == Some(true) {
        n1_derived = Some(total(ak));
    }
    let n1 = reconcile("n1", t.n1, n1_derived, ctx)?;
    let n2_derived = n1.and_then(|n1| total(ak).checked_sub(n1));
    let n2 = reconcile("n2", t.n2, n2_derived, ctx)?;
    if let (Some(a), Some(b)) = (n1, n2) {
        if a + b != total(ak) {
            return Err(PipelineError::Inconsistent(format!("n1 + n2 = {} but #A_K = p^{}", a + b, total(ak))));
        }
    }
    let mut ds_derived = fujii.as_ref().and_then(|f| f.direct_summand);
    if ds_derived.is_none() && (n1 == Some(0) || n2 == Some(0)) {
        ds_derived = Some(true);
    }
    let direct_summand = reconcile("direct_summand", t.direct_summand, ds_derived, ctx)?;
    Ok(TowerSummary { n1, n2, lk_in_ktilde: lk, direct_summand })
}

fn residue(r: Rational, p: u64, e: u32) -> Option<u64> {
    let m = arith::checked_pow(p, e)?;
    match r {
        Rational::Whole(x) => Some(arith::reduce(x.0, m)),
        Rational::Frac { num, den } => {
            let inv = arith::inv(arith::reduce(den.0, m), m)?;
            Some(arith::mul(arith::reduce(num.0, m), inv, m))
        }
    }
}

fn resolve_action(case: &CaseFile, ctx: &mut Ctx) -> Result<Option<ActionCoefficients>, PipelineError> {
    if let Some(block) = &case.action_coefficients {
        let e = block.class_order_exponent;
        let (Some(a), Some(b)) = (residue(block.a, case.p, e), residue(block.b, case.p, e)) else {
            return Err(PipelineError::Inconsistent("action coefficients do not reduce".into()));
        };
        let m = block.multipliers;
        return Ok(Some(ActionCoefficients { a, b, s: m.s, t: m.t, u: m.u, v: m.v, class_order_exponent: e }));
    }
    let Some(block) = &case.action_forms else {
        return Ok(None);
    };
    let orders = [block.factor_orders[0].0 as u64, block.factor_orders[1].0 as u64];
    let two = |x: [crate::schema::Int; 2]| [x[0].0, x[1].0];
    let forms = ClassForms {
        factor_orders: orders,
        q: two(block.q),
        l: two(block.l),
        sigma_q: two(block.sigma_q),
        sigma_l: two(block.sigma_l),
    };
    let m = block.multipliers;
    match derive_action_coefficients(case.p, &forms, (m.s, m.t, m.u, m.v)) {
        Ok(ac) => Ok(Some(ac)),
        Err(e) => {
            ctx.note(format!("action forms: {e}"));
            ctx.need("ideal-class forms of Q1, L1 spanning the p-part");
            Ok(None)
        }
    }
}

fn action_summary(ac: &ActionCoefficients, p: u64) -> ActionSummary {
    let m = arith::pow(p, ac.class_order_exponent);
    ActionSummary {
        a: ac.a % m,
        b: ac.b % m,
        modulus_exponent: ac.class_order_exponent,
        vp_a: arith::vp(ac.a % m, p),
        vp_b: arith::vp(ac.b % m, p),
    }
}

/// Candidates for `k` with the source of each conclusion noted in `ctx`.
fn resolve_k(case: &CaseFile, sd: &SplittingData, ctx: &mut Ctx) -> Result<Vec<u32>, PipelineError> {
    let mut inferred: Option<Vec<u32>> = None;
    if let Some(fl) = &case.finite_level {
        if fl.class_group.len() == 2 {
            let orders = [arith::pow(case.p, fl.class_group[0]), arith::pow(case.p, fl.class_group[1])];
            let mut s = [[0u64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] = arith::reduce(fl.s_action[i][j].0, orders[i]);
                }
            }
            let fld = FiniteLevelData { p: case.p, n: fl.n, class_group: [fl.class_group[0], fl.class_group[1]], s_action: s };
            match infer_k(&fld, sd) {
                Ok(rep) => {
                    ctx.note(format!(
                        "finite level n = {}: Fitt_1 = {}, k in {:?}{}",
                        fl.n,
                        rep.computed,
                        rep.outcome.candidates(),
                        if rep.root_check_skipped { " (matched by valuation only)" } else { "" }
                    ));
                    inferred = Some(rep.outcome.candidates());
                    if let KInference::Ambiguous(_) = rep.outcome {
                        ctx.need(format!("finite-level data at a layer n > {}", fl.n));
                    }
                }
                Err(LambdaError::NoMatch) => {
                    ctx.note(format!("finite level n = {}: no k reproduces the Fitting ideal of the data", fl.n));
                }
                Err(e) => ctx.note(format!("finite level n = {}: {e}", fl.n)),
            }
        }
    }
    if let Some(k) = case.k_override {
        if k > sd.ord_diff {
            return Err(PipelineError::Inconsistent(format!("k_override = {k} exceeds ord_diff = {}", sd.ord_diff)));
        }
        match &inferred {
            Some(ks) if !ks.contains(&k) => ctx.note(format!("k_override = {k} is outside the inferred set {ks:?}")),
            _ => {}
        }
        ctx.note(format!("k = {k} (k_override)"));
        return Ok(vec![k]);
    }
    match inferred {
        Some(ks) => Ok(ks),
        None => {
            ctx.need("k (finite_level block or k_override)");
            Ok(Vec::new())
        }
    }
}

fn tower_data(case: &CaseFile, t: &TowerSummary) -> Option<TowerData> {
    let dim = case.class_group_k.iter().filter(|&&e| e > 0).count() as u32;
    Some(TowerData {
        dim_ak_mod_p: dim,
        lambda_c: case.lambda_c,
        n1: t.n1?,
        n2: t.n2?,
        lk_in_ktilde: t.lk_in_ktilde,
        direct_summand: t.direct_summand,
    })
}

fn report(v: &Verdict) -> VerdictReport {
    VerdictReport {
        generator_count: v.generator_count,
        cyclic: v.cyclic.label().into(),
        fired_case: v.fired_case.map(|c| c.label().into()),
        needs: v.needs.clone(),
    }
}

fn undetermined(ctx: &Ctx) -> VerdictReport {
    VerdictReport { generator_count: None, cyclic: Cyclicity::Undetermined.label().into(), fired_case: None, needs: ctx.needs.clone() }
}

pub fn analyze(case: &CaseFile, opts: &Options) -> Result<Analysis, PipelineError> {
    validate(case, opts).map_err(PipelineError::Invalid)?;
    let mut ctx = Ctx { trace: Vec::new(), needs: Vec::new() };
    ctx.note(format!("K = Q(sqrt(-{})), p = {}, A_K exponents {:?}, lambda = {}", case.d, case.p, case.class_group_k, case.lambda_c));
    let tower = resolve_tower(case, &mut ctx)?;
    let split = resolve_splitting(case, opts, &mut ctx)?;
    let mut out = Analysis {
        p: case.p,
        d: case.d,
        class_group_k: case.class_group_k.clone(),
        computed_splitting: split.computed.as_ref().map(|sd| summary(sd, "iwasawa_poly")),
        splitting: split.used.as_ref().map(|(sd, src)| summary(sd, src)),
        k: None,
        k_candidates: Vec::new(),
        tower: tower.clone(),
        action: None,
        mu21: None,
        mu22: None,
        verdict: undetermined(&ctx),
        trace: Vec::new(),
    };
    let dim = case.class_group_k.iter().filter(|&&e| e > 0).count();

    let Some(td) = tower_data(case, &tower) else {
        ctx.need("n1 (ray_class, minardi or tower.n1)");
        out.verdict = undetermined(&ctx);
        out.trace = ctx.trace;
        return Ok(out);
    };

    if dim == 1 || td.n1 == 0 {
        let v = decide_generators_thm11(&td).map_err(|e| PipelineError::Inconsistent(format!("{e}")))?;
        ctx.trace.extend(v.trace.iter().cloned());
        for n in &v.needs {
            ctx.need(n.clone());
        }
        out.verdict = report(&v);
        out.verdict.needs = ctx.needs.clone();
        out.trace = ctx.trace;
        return Ok(out);
    }

    let Some((sd, _)) = split.used else {
        ctx.need("splitting data (more digits of f, roots, or splitting_override)");
        out.verdict = undetermined(&ctx);
        out.trace = ctx.trace;
        return Ok(out);
    };
    let ks = resolve_k(case, &sd, &mut ctx)?;
    out.k_candidates = ks.clone();
    if ks.len() == 1 {
        out.k = Some(ks[0]);
    }

    let action = resolve_action(case, &mut ctx)?;
    if let Some(ac) = &action {
        let s = action_summary(ac, case.p);
        ctx.note(format!(
            "S [uQ1 + vL1] = A [sQ1] + B [uQ1 + vL1] with A = {}, B = {} mod {}^{}",
            s.a, s.b, case.p, s.modulus_exponent
        ));
        out.action = Some(s);
        if let (Some(n1), Some(fl)) = (tower.n1, &case.finite_level) {
            if ac.class_order_exponent != n1 + fl.n {
                ctx.note(format!(
                    "order of [sQ1] is p^{}, expected p^(n1 + n) = p^{}",
                    ac.class_order_exponent,
                    n1 + fl.n
                ));
            }
        }
    }

    let (m1, m2) = {
        let mut e: Vec<u32> = case.class_group_k.iter().copied().filter(|&x| x > 0).collect();
        e.sort_unstable();
        (e[0], e[e.len() - 1])
    };
    let prop = prop_test_sufficient(&sd, (m1, m2), td.n1);

    if ks.is_empty() {
        if let Some(v) = prop {
            ctx.trace.extend(v.trace.iter().cloned());
            ctx.needs.clear();
            out.verdict = report(&v);
        } else {
            out.verdict = undetermined(&ctx);
        }
        out.trace = ctx.trace;
        return Ok(out);
    }

    let mut verdicts: Vec<(u32, Verdict, MuValuations)> = Vec::new();
    for &k in &ks {
        let mc = ModuleClass::new(k, sd).map_err(|e| PipelineError::Inconsistent(format!("{e}")))?;
        let mu = match &action {
            Some(ac) => match ord_mu_from_action(ac, &mc) {
                Ok(mu) => mu,
                Err(e) => {
                    ctx.note(format!("k = {k}: {e}"));
                    ctx.need(format!("action coefficients at a layer n with n1 + n > {}", sd.ord_diff));
                    MuValuations::default()
                }
            },
            None => MuValuations::default(),
        };
        let v = match decide_cyclic_thm512(&td, &mc, mu) {
            Ok(v) => v,
            Err(DecisionError::PreconditionViolated(why)) => {
                ctx.note(format!("cyclicity criterion not applicable: {why}"));
                Verdict::undetermined(vec![], vec![format!("hypothesis: {why}")])
            }
            Err(e) => return Err(PipelineError::Inconsistent(format!("{e}"))),
        };
        verdicts.push((k, v, mu));
    }

    let first = verdicts[0].1.cyclic;
    let agree = verdicts.iter().all(|(_, v, _)| v.cyclic == first);
    if verdicts.len() == 1 {
        let (_, v, mu) = &verdicts[0];
        out.mu21 = mu.mu21;
        out.mu22 = mu.mu22;
        ctx.trace.extend(v.trace.iter().cloned());
        for n in &v.needs {
            ctx.need(n.clone());
        }
        out.verdict = report(v);
    } else if agree && first != Cyclicity::Undetermined {
        for (k, v, _) in &verdicts {
            ctx.note(format!("k = {k}: {} ({})", v.cyclic, v.fired_case.map(|c| c.label()).unwrap_or("-")));
        }
        ctx.note("verdict does not depend on the remaining choice of k");
        let v = &verdicts[0].1;
        out.verdict = report(v);
        ctx.needs.retain(|n| !n.starts_with("finite-level data"));
    } else {
        for (k, v, _) in &verdicts {
            ctx.note(format!("k = {k}: {}", v.cyclic));
        }
        out.verdict = undetermined(&ctx);
    }
    if out.verdict.cyclic != Cyclicity::Undetermined.label() {
        ctx.needs.clear();
    }
    out.verdict.needs = ctx.needs.clone();

    if let Some(pv) = prop {
        if out.verdict.cyclic == Cyclicity::NonCyclic.label() {
            return Err(PipelineError::Inconsistent(
                "sufficient criterion says cyclic but the four-case test says non-cyclic".into(),
            ));
        }
        ctx.note(format!("sufficient criterion also applies: {}", pv.cyclic));
    }
    out.trace = ctx.trace;
    Ok(out)
}

/// `k` alone, for the `classify` verb.
pub fn classify(case: &CaseFile, opts: &Options) -> Result<(Vec<u32>, Vec<String>), PipelineError> {
    validate(case, opts).map_err(PipelineError::Invalid)?;
    let mut ctx = Ctx { trace: Vec::new(), needs: Vec::new() };
    let split = resolve_splitting(case, opts, &mut ctx)?;
    let Some((sd, _)) = split.used else {
        ctx.note("no splitting data");
        return Ok((Vec::new(), ctx.trace));
    };
    let ks = resolve_k(case, &sd, &mut ctx)?;
    Ok((ks, ctx.trace))
}

