use std::fmt;

use iwasawa_cyc_core::decision::minardi_subset;
use iwasawa_cyc_core::padic::arith;
use iwasawa_cyc_core::IwasawaPoly;
use serde::Serialize;

use crate::schema::{CaseFile, Derivable, PolyBlock, Rational, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Truncate the Iwasawa polynomial to this many digits.
    pub precision_override: Option<u32>,
}

struct Sink(Vec<Violation>);

impl Sink {
    fn push(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.0.push(Violation { path: path.into(), reason: reason.into() });
    }
}

fn square_free(d: u64) -> bool {
    let mut n = d;
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            n /= q;
            if n % q == 0 {
                return false;
            }
        }
        q += 1;
    }
    true
}

/// Kronecker symbol `(-d | p)` for an odd prime `p`.
pub fn p_splits(p: u64, d: u64) -> bool {
    let r = arith::reduce(-(d as i128), p);
    r != 0 && arith::legendre(r as i128, p) == 1
}

fn check_poly(sink: &mut Sink, path: &str, p: u64, block: &PolyBlock) {
    if block.precision == 0 {
        sink.push(format!("{path}.precision"), "must be positive");
        return;
    }
    if let Err(e) = IwasawaPoly::new(p, block.precision, block.c1.0, block.c0.0) {
        sink.push(path, format!("{e}"));
    }
}

/// Poly block after `--precision-override`.
pub fn effective_poly(case: &CaseFile, opts: &Options) -> Option<PolyBlock> {
    let mut block = case.iwasawa_poly.clone()?;
    if let Some(n) = opts.precision_override {
        block.precision = block.precision.min(n);
    }
    Some(block)
}

pub fn validate(case: &CaseFile, opts: &Options) -> Result<(), Vec<Violation>> {
    let mut sink = Sink(Vec::new());
    let p = case.p;
    if case.schema_version != SCHEMA_VERSION {
        sink.push("schema_version", format!("unsupported version {:?}, expected {SCHEMA_VERSION:?}", case.schema_version));
    }
    if p < 3 || !arith::is_prime(p) {
        sink.push("p", "must be an odd prime");
        return Err(sink.0);
    }
    if case.d == 0 || !square_free(case.d) {
        sink.push("d", "must be a positive square-free integer");
    } else if p_splits(p, case.d) {
        sink.push("d", format!("p splits in K: (-{} | {p}) = 1", case.d));
    }
    let dim = case.class_group_k.iter().filter(|&&e| e > 0).count();
    if dim == 0 {
        sink.push("class_group_K", "the p-part of the class group is trivial");
    }
    if dim > 2 {
        sink.push("class_group_K", "at most two cyclic factors are supported");
    }

    if let Some(block) = &case.iwasawa_poly {
        check_poly(&mut sink, "iwasawa_poly", p, block);
        if let Some(n) = opts.precision_override {
            if n > block.precision {
                sink.push(
                    "iwasawa_poly.precision",
                    format!("--precision-override {n} exceeds the {} supplied digits", block.precision),
                );
            } else if n == 0 {
                sink.push("iwasawa_poly.precision", "--precision-override must be positive");
            }
        }
    }
    if let Some(block) = &case.extended_poly {
        check_poly(&mut sink, "extended_poly", p, block);
        if let Some(base) = &case.iwasawa_poly {
            let m = arith::checked_pow(p, base.precision.min(block.precision));
            if let Some(m) = m {
                let same = |a: i128, b: i128| arith::reduce(a - b, m) == 0;
                if !(same(base.c1.0, block.c1.0) && same(base.c0.0, block.c0.0)) && base.sigma_tag == block.sigma_tag {
                    sink.push("extended_poly", "not congruent to iwasawa_poly at the common precision");
                }
            }
        }
    }
    if let Some(r) = &case.roots {
        if r.precision == 0 || arith::checked_pow(p, r.precision).is_none() {
            sink.push("roots.precision", "out of range");
        }
        for (name, x) in [("alpha", r.alpha), ("beta", r.beta)] {
            if x.0 % p as i128 != 0 {
                sink.push(format!("roots.{name}"), "must be divisible by p");
            }
        }
    }
    if let Some(s) = &case.splitting_override {
        if !["split", "unramified", "ramified"].contains(&s.kind.as_str()) {
            sink.push("splitting_override.kind", format!("unknown kind {:?}", s.kind));
        }
        if s.ord_alpha == 0 || s.ord_beta == 0 {
            sink.push("splitting_override", "root valuations must be positive");
        }
    }

    if let Some(fl) = &case.finite_level {
        if fl.class_group.len() != 2 || fl.class_group.contains(&0) {
            sink.push("finite_level.class_group", "need exactly two non-trivial factors");
        } else if dim == 2 {
            // A_{K_n^c} = Z/p^(a1 + n) + Z/p^(a2 + n)
            let mut want: Vec<u32> = case.class_group_k.iter().filter(|&&e| e > 0).map(|e| e + fl.n).collect();
            let mut have = fl.class_group.clone();
            want.sort_unstable();
            have.sort_unstable();
            if want != have {
                sink.push(
                    "finite_level.class_group",
                    format!("growth formula predicts exponents {want:?} at n = {}, found {have:?}", fl.n),
                );
            }
        }
        if fl.n == 0 {
            sink.push("finite_level.n", "must be at least 1");
        }
    }
    if let Some(k) = case.k_override {
        if let Some(s) = &case.splitting_override {
            if k > s.ord_diff {
                sink.push("k_override", format!("k = {k} exceeds ord_diff = {}", s.ord_diff));
            }
        }
    }

    if let Some(m) = &case.minardi {
        let applies = minardi_subset(p, case.d, m.h_aux_div_by_3).is_some();
        if m.applicable != applies {
            sink.push(
                "minardi.applicable",
                format!("criterion {} for p = {p}, d = {}", if applies { "applies" } else { "does not apply" }, case.d),
            );
        }
    }
    let t = &case.tower;
    let minardi_ok = case.minardi.as_ref().is_some_and(|m| m.applicable);
    let fujii_ok = case.ray_class.is_some() && t.local_torsion_trivial == Some(true);
    if t.lk_in_ktilde == Some(Derivable::Derive) && !minardi_ok {
        sink.push("tower.lk_in_ktilde", "\"derive\" needs an applicable minardi block");
    }
    let minardi_inside = case.minardi.as_ref().and_then(|m| minardi_subset(p, case.d, m.h_aux_div_by_3)) == Some(true);
    let lk_known = matches!(t.lk_in_ktilde, Some(Derivable::Given(true))) || minardi_inside;
    if t.n1 == Some(Derivable::Derive) && !fujii_ok && !lk_known {
        sink.push("tower.n1", "\"derive\" needs ray_class with local_torsion_trivial, or L_K inside K~");
    }
    if t.n2 == Some(Derivable::Derive) && t.n1.is_none() {
        sink.push("tower.n2", "\"derive\" needs n1");
    }
    if t.direct_summand == Some(Derivable::Derive) && !fujii_ok && !lk_known {
        sink.push("tower.direct_summand", "\"derive\" needs ray_class with local_torsion_trivial");
    }

    if let Some(a) = &case.action_forms {
        for (i, o) in a.factor_orders.iter().enumerate() {
            if o.0 <= 0 {
                sink.push(format!("action_forms.factor_orders[{i}]"), "must be positive");
            }
        }
    }
    if let Some(ac) = &case.action_coefficients {
        for (name, r) in [("a", ac.a), ("b", ac.b)] {
            if let Rational::Frac { den, .. } = r {
                if den.0 == 0 || den.0 % p as i128 == 0 {
                    sink.push(format!("action_coefficients.{name}.den"), "denominator must be a p-adic unit");
                }
            }
        }
    }
    if sink.0.is_empty() {
        Ok(())
    } else {
        Err(sink.0)
    }
}
