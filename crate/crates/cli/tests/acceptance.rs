//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use iwasawa_cyc::{analyze, load_case, Analysis, Options};
use iwasawa_cyc_core::decision::{decide_cyclic_thm512, fujii_layer, prop_test_sufficient, MuValuations};
use iwasawa_cyc_core::lambda_class::{class_group_structure_from_k, koike_partner};
use iwasawa_cyc_core::oracle::{self, Corruption};
use iwasawa_cyc_core::padic::{splitting_type, PadicError};
use iwasawa_cyc_core::{Cyclicity, ExtField, FiredCase, IwasawaPoly, ModuleClass, SplitKind, SplittingData, TowerData};

const BUDGET: u64 = 1 << 22;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run(name: &str) -> Result<Analysis, String> {
    let case = load_case(&corpus().join(name)).map_err(|e| e.to_string())?;
    analyze(&case, &Options::default()).map_err(|e| e.to_string())
}

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn table_1(r: &mut Report) {
    // (d, ord_diff, kind, m)
    let rows = [
        (5703, 3, "ramified", 3),
        (12394, 3, "ramified", 3),
        (50293, 3, "ramified", 3),
        (54931, 3, "ramified", 3),
        (89269, 3, "unramified", 2),
    ];
    let ((ok, notes), time) = timed(|| {
        let mut ok = true;
        let mut notes = Vec::new();
        for (d, od, kind, m) in rows {
            match run(&format!("d{d}.json")) {
                Ok(a) => {
                    let got = a.computed_splitting.as_ref().map(|s| (s.ord_diff, s.kind.clone(), s.m));
                    let tuple_ok = got == Some((od, kind.to_string(), m));
                    let verdict_ok = a.cyclicity() == "cyclic";
                    if !(tuple_ok && verdict_ok) {
                        ok = false;
                        notes.push(format!("{d}: tuple {got:?} want ({od}, {kind}, {m}), verdict {}", a.cyclicity()));
                    }
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("{d}: {e}"));
                }
            }
        }
        (ok, notes)
    });
    let ok = ok && time < Duration::from_secs(1);
    r.line("Table 1 splitting tuples and verdicts", ok, format!("{:?}, exact; {}", time, if notes.is_empty() { "5/5 rows".into() } else { notes.join("; ") }));
}

fn table_3(r: &mut Report) {
    let ((ok, notes), time) = timed(|| {
        let mut ok = true;
        let mut notes = Vec::new();
        for d in [32137, 34989, 42619] {
            match run(&format!("d{d}.json")) {
                Ok(a) if a.cyclicity() == "non-cyclic" => {}
                Ok(a) => {
                    ok = false;
                    notes.push(format!("{d}: {}", a.cyclicity()));
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("{d}: {e}"));
                }
            }
        }
        let printed = IwasawaPoly::new(3, 6, 573, 252).unwrap();
        let raised = matches!(splitting_type(&printed), Err(PadicError::InsufficientPrecision));
        if !raised {
            ok = false;
            notes.push("42619 printed polynomial did not raise InsufficientPrecision".into());
        }
        match run("d42619.json") {
            Ok(a) if a.splitting.as_ref().is_some_and(|s| s.source == "roots") && a.verdict.fired_case.as_deref() == Some("T512-none") => {}
            Ok(a) => {
                ok = false;
                notes.push(format!("42619 resolved via {:?}, case {:?}", a.splitting.map(|s| s.source), a.verdict.fired_case));
            }
            Err(_) => ok = false,
        }
        (ok, notes)
    });
    let ok = ok && time < Duration::from_secs(1);
    let detail = if notes.is_empty() { "3/3 non-cyclic; 42619 InsufficientPrecision then resolved from the extended datum".into() } else { notes.join("; ") };
    r.line("Table 3 verdicts", ok, format!("{time:?}, exact; {detail}"));
}

fn table_5(r: &mut Report) {
    let ((ok, notes), time) = timed(|| {
        let mut ok = true;
        let mut notes = Vec::new();
        for d in [2437, 3886, 4027, 7977] {
            match run(&format!("d{d}.json")) {
                Ok(a) if a.cyclicity() == "cyclic" && a.verdict.fired_case.as_deref() == Some("T512-iv") => {}
                Ok(a) => {
                    ok = false;
                    notes.push(format!("{d}: {} {:?} needs {:?}", a.cyclicity(), a.verdict.fired_case, a.verdict.needs));
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("{d}: {e}"));
                }
            }
        }
        (ok, notes)
    });
    let ok = ok && time < Duration::from_secs(1);
    r.line("Table 5 cyclic via case (iv)", ok, format!("{time:?}, exact; {}", if notes.is_empty() { "4/4 rows".into() } else { notes.join("; ") }));
}

fn generator_counts(r: &mut Report) {
    let want = [("d71_p7.json", 1), ("d61.json", 1), ("d1207.json", 1), ("d186.json", 1), ("d6382.json", 2)];
    let mut got = Vec::new();
    let mut ok = true;
    for (file, n) in want {
        let a = run(file);
        let count = a.as_ref().ok().and_then(|a| a.verdict.generator_count);
        let via_thm = a.as_ref().ok().and_then(|a| a.verdict.fired_case.clone()).is_some_and(|c| c.starts_with("T11"));
        ok &= count == Some(n) && via_thm;
        got.push(count.map_or("?".into(), |c| c.to_string()));
    }
    r.line("generator counts of the rank-one examples", ok, format!("({}), want (1, 1, 1, 1, 2), exact", got.join(", ")));
}

fn action_example(r: &mut Report) {
    match run("d2437.json") {
        Ok(a) => {
            let act = a.action.as_ref();
            let (va, vb) = (act.and_then(|x| x.vp_a), act.and_then(|x| x.vp_b));
            let ok = va == Some(1)
                && vb == Some(1)
                && a.mu21 == Some(0)
                && a.mu22 == Some(0)
                && a.cyclicity() == "cyclic"
                && a.verdict.fired_case.as_deref() == Some("T512-iv");
            let shown = |v: Option<u32>| v.map_or(">= modulus".to_string(), |x| x.to_string());
            r.line(
                "d = 2437 action coefficients and verdict",
                ok,
                format!(
                    "A = {} (v3 {}), B = {} (v3 {}) mod 3^{}, want v3 = 1 each; mu = ({:?}, {:?}); {} {:?}",
                    act.map_or(0, |x| x.a),
                    shown(va),
                    act.map_or(0, |x| x.b),
                    shown(vb),
                    act.map_or(0, |x| x.modulus_exponent),
                    a.mu21,
                    a.mu22,
                    a.cyclicity(),
                    a.verdict.fired_case
                ),
            );
        }
        Err(e) => r.line("d = 2437 action coefficients and verdict", false, e),
    }
}

fn fujii_example(r: &mut Report) {
    let out = fujii_layer(&[1, 4, 6], 5, &[2, 1], true);
    let n1 = out.as_ref().ok().and_then(|o| o.as_ref()).and_then(|o| o.n1);
    r.line("ray class (3, 3^4, 3^6) at n = 5 with A_K = (9, 3)", n1 == Some(2), format!("n1 = {n1:?}, want 2, exact"));
}

fn sd_of(c1: i128, c0: i128) -> SplittingData {
    splitting_type(&IwasawaPoly::new(3, 8, c1, c0).unwrap()).unwrap()
}

fn oracle_suite(r: &mut Report) {
    let (result, time) = timed(|| -> Result<String, String> {
        let base = |p: u64, digits: u32, a: i128, b: i128| {
            let f = ExtField::base(p, digits).unwrap();
            (f.int(a), f.int(b))
        };
        let mut pairs = vec![base(3, 5, 3, 4), base(3, 5, 3, 6), base(3, 5, 3, 12), base(3, 6, 3, 30), base(5, 5, 5, 30)];
        for (c1, c0) in [(9, 9), (90, 189)] {
            pairs.push(sd_of(c1, c0).roots.unwrap());
        }
        let mut diffs = Vec::new();
        for (a, b) in &pairs {
            let d = (*b - *a).valuation().exact().ok_or("indeterminate difference")?;
            let n = oracle::enumerate_classes(a, b, BUDGET).map_err(|e| e.to_string())?;
            if n as u32 != d + 1 {
                return Err(format!("{n} classes at ord_diff {d}"));
            }
            diffs.push(d);
        }
        if !(0..=3).all(|d| diffs.contains(&d)) {
            return Err(format!("ord_diff coverage {diffs:?}"));
        }
        let polys = [(-15, 36), (-33, 90), (9, 9), (90, 189)];
        let mut fitting = 0;
        let mut frames = 0;
        for (c1, c0) in polys {
            let sd = sd_of(c1, c0);
            let (a, b) = sd.roots.unwrap();
            for k in 0..=sd.ord_diff {
                let mc = ModuleClass::new(k, sd).unwrap();
                if !oracle::verify_koike_iso(&a, &b, k, koike_partner(&mc).x, BUDGET).map_err(|e| e.to_string())? {
                    return Err(format!("Koike partner fails at f = S^2 + {c1}S + {c0}, k = {k}"));
                }
                oracle::verify_fitting(&mc, 100, u64::from(k), Corruption::None).map_err(|c| c.to_string())?;
                fitting += 100;
                oracle::verify_main_lem(&mc, 100, u64::from(k)).map_err(|c| c.to_string())?;
                frames += 100;
            }
        }
        Ok(format!("{} parameter sets, ord_diff {:?}; {fitting} Fitting trials; {frames} conjugation trials", pairs.len(), diffs))
    });
    let ok = result.is_ok() && time < Duration::from_secs(60);
    r.line("oracle suite", ok, format!("{time:?} (limit 60 s), exact; {}", result.unwrap_or_else(|e| e)));
}

fn consistency(r: &mut Report) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for p in [3, 5, 7] {
        for kind in [SplitKind::Split, SplitKind::Unramified, SplitKind::Ramified] {
            for a in 1..=6 {
                for extra in 0..=5 {
                    let sd = SplittingData::from_valuations(p, kind, a, a, a + extra);
                    for k in 0..=sd.ord_diff {
                        let mc = ModuleClass::new(k, sd).unwrap();
                        let (m1, m2) = class_group_structure_from_k(&mc);
                        if prop_test_sufficient(&sd, (m1, m2), m2.max(m1)).is_none() {
                            continue;
                        }
                        checked += 1;
                        let td = TowerData { dim_ak_mod_p: 2, lambda_c: 2, n1: m2.max(m1), n2: m1.min(m2), lk_in_ktilde: None, direct_summand: Some(true) };
                        match decide_cyclic_thm512(&td, &mc, MuValuations::default()) {
                            Ok(v) if v.cyclic == Cyclicity::Cyclic && v.fired_case == Some(FiredCase::T512I) => {}
                            other => bad.push(format!("p={p} {kind:?} a={a} diff={} k={k}: {:?}", a + extra, other.map(|v| v.cyclic))),
                        }
                    }
                }
            }
        }
    }
    let ok = checked >= 200 && bad.is_empty();
    r.line(
        "sufficient criterion implies cyclic",
        ok,
        format!("{checked} synthetic dossiers (need >= 200), {} disagreements, exact{}", bad.len(), bad.first().map_or(String::new(), |b| format!("; first: {b}"))),
    );
}

fn main() {
    let mut r = Report { failed: 0 };
    table_1(&mut r);
    table_3(&mut r);
    table_5(&mut r);
    generator_counts(&mut r);
    action_example(&mut r);
    fujii_example(&mut r);
    oracle_suite(&mut r);
    consistency(&mut r);
    println!("{} of 8 criteria failed", r.failed);
    if r.failed > 0 {
        std::process::exit(1);
    }
}
