//! Generator counts and the cyclicity decision for `X` over the
//! two-variable Iwasawa algebra.

mod action;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use action::{derive_action_coefficients, ActionCoefficients, ActionError, ClassForms};

use crate::lambda_class::ModuleClass;
use crate::padic::{arith, SplittingData};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecisionError {
    /// The hypotheses of the cyclicity criterion are not all known to hold.
    PreconditionViolated(String),
    InconsistentInput(String),
    InsufficientPrecision(String),
    /// More than two ray-class factors exceed the Fujii bound.
    AmbiguousDecomposition,
}

impl fmt::Display for DecisionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionError::PreconditionViolated(s) => write!(f, "precondition violated: {s}"),
            DecisionError::InconsistentInput(s) => write!(f, "inconsistent input: {s}"),
            DecisionError::InsufficientPrecision(s) => write!(f, "insufficient precision: {s}"),
            DecisionError::AmbiguousDecomposition => write!(f, "ray class factors cannot be split off uniquely"),
        }
    }
}

/// Facts about `K`, its class group and the tower `K~ / K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TowerData {
    pub dim_ak_mod_p: u32,
    pub lambda_c: u32,
    /// `p^n1 = #Gal(L_K cap K~ / K)`.
    pub n1: u32,
    /// `p^n2 = #Gal(L_K / L_K cap K~)`.
    pub n2: u32,
    pub lk_in_ktilde: Option<bool>,
    pub direct_summand: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cyclicity {
    Cyclic,
    NonCyclic,
    Undetermined,
}

impl Cyclicity {
    pub fn label(self) -> &'static str {
        match self {
            Cyclicity::Cyclic => "cyclic",
            Cyclicity::NonCyclic => "non-cyclic",
            Cyclicity::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Cyclicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiredCase {
    T11I,
    T11IIa,
    T11IIb,
    T512I,
    T512II,
    T512III,
    T512IV,
    T512None,
    PropTest,
}

impl FiredCase {
    pub fn label(self) -> &'static str {
        match self {
            FiredCase::T11I => "T11-i",
            FiredCase::T11IIa => "T11-iia",
            FiredCase::T11IIb => "T11-iib",
            FiredCase::T512I => "T512-i",
            FiredCase::T512II => "T512-ii",
            FiredCase::T512III => "T512-iii",
            FiredCase::T512IV => "T512-iv",
            FiredCase::T512None => "T512-none",
            FiredCase::PropTest => "PropTest",
        }
    }
}

impl fmt::Display for FiredCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub generator_count: Option<u32>,
    pub cyclic: Cyclicity,
    pub fired_case: Option<FiredCase>,
    pub trace: Vec<String>,
    /// Quantities that would settle an undetermined verdict.
    pub needs: Vec<String>,
}

impl Verdict {
    fn counted(count: u32, case: FiredCase, trace: Vec<String>) -> Self {
        let cyclic = if count == 1 { Cyclicity::Cyclic } else { Cyclicity::NonCyclic };
        Self { generator_count: Some(count), cyclic, fired_case: Some(case), trace, needs: Vec::new() }
    }

    pub fn undetermined(trace: Vec<String>, needs: Vec<String>) -> Self {
        Self { generator_count: None, cyclic: Cyclicity::Undetermined, fired_case: None, trace, needs }
    }
}

/// Generator count `dim_F_p X / (p, S, T) X` when the criterion applies.
pub fn decide_generators_thm11(td: &TowerData) -> Result<Verdict, DecisionError> {
    let mut trace = alloc::vec![format!(
        "dim A_K/p = {}, lambda = {}, n1 = {}, n2 = {}",
        td.dim_ak_mod_p, td.lambda_c, td.n1, td.n2
    )];
    if td.n1 == 0 && td.lk_in_ktilde == Some(true) && td.n2 > 0 {
        return Err(DecisionError::InconsistentInput(
            "L_K inside K~ forces L_K cap K~ = L_K, but n1 = 0 with A_K non-trivial".into(),
        ));
    }
    if td.n1 == 0 {
        trace.push("L_K cap K~ = K: count equals dim A_K/p".into());
        return Ok(Verdict::counted(td.dim_ak_mod_p, FiredCase::T11I, trace));
    }
    if td.dim_ak_mod_p == 1 {
        if td.lambda_c == 1 {
            trace.push("A_K cyclic, L_K cap K~ != K, lambda = 1".into());
            return Ok(Verdict::counted(1, FiredCase::T11IIa, trace));
        }
        if td.lambda_c >= 2 {
            return match td.lk_in_ktilde {
                Some(inside) => {
                    trace.push(format!("A_K cyclic, lambda >= 2, L_K inside K~: {inside}"));
                    Ok(Verdict::counted(if inside { 1 } else { 2 }, FiredCase::T11IIb, trace))
                }
                None => Ok(Verdict::undetermined(trace, alloc::vec!["whether L_K is contained in K~".into()])),
            };
        }
    }
    trace.push("no generator-count case applies".into());
    Ok(Verdict::undetermined(trace, Vec::new()))
}

/// `ord_E(mu_21)`, `ord_E(mu_22)`; `None` is unknown.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MuValuations {
    pub mu21: Option<u32>,
    pub mu22: Option<u32>,
}

impl MuValuations {
    pub fn swapped(self) -> Self {
        Self { mu21: self.mu22, mu22: self.mu21 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tri {
    Yes,
    No,
    Open,
}

fn tri(b: bool) -> Tri {
    if b {
        Tri::Yes
    } else {
        Tri::No
    }
}

fn and(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Tri::No, _) | (_, Tri::No) => Tri::No,
        (Tri::Yes, Tri::Yes) => Tri::Yes,
        _ => Tri::Open,
    }
}

fn or(a: Tri, b: Tri) -> Tri {
    match (a, b) {
        (Tri::Yes, _) | (_, Tri::Yes) => Tri::Yes,
        (Tri::No, Tri::No) => Tri::No,
        _ => Tri::Open,
    }
}

fn mu_is(v: Option<u32>, want: u32) -> Tri {
    match v {
        Some(x) => tri(x == want),
        None => Tri::Open,
    }
}

/// Evaluates the four cyclicity cases. Returns one entry per case.
fn thm512_cases(td: &TowerData, mc: &ModuleClass, mu: MuValuations) -> [(FiredCase, Tri); 4] {
    let sd = &mc.splitting;
    let k = mc.k;
    let diff = sd.ord_diff;
    let m = sd.m();
    let c1 = and(tri(k > 0), tri(diff - k < m));
    let c2 = and(and(tri(k > 0), tri(diff - k == m)), mu_is(mu.mu21, 0));
    let base34 = and(tri(k == 0), tri(diff == m));
    let c3 = and(and(base34, tri(td.n1 < td.n2)), mu_is(mu.mu21, 0));
    let want22 = sd.ord_beta - sd.ord_alpha;
    let iv = |mu: MuValuations| and(mu_is(mu.mu21, 0), mu_is(mu.mu22, want22));
    let mut labeled = iv(mu);
    if sd.ord_alpha == sd.ord_beta {
        labeled = or(labeled, iv(mu.swapped()));
    }
    let c4 = and(and(base34, tri(td.n1 >= td.n2)), labeled);
    [(FiredCase::T512I, c1), (FiredCase::T512II, c2), (FiredCase::T512III, c3), (FiredCase::T512IV, c4)]
}

fn check_thm512_hypotheses(td: &TowerData, sd: &SplittingData) -> Result<(), DecisionError> {
    if td.dim_ak_mod_p != 2 {
        return Err(DecisionError::PreconditionViolated(format!("dim A_K/p = {}, need 2", td.dim_ak_mod_p)));
    }
    if td.direct_summand != Some(true) {
        return Err(DecisionError::PreconditionViolated(
            "Gal(L_K cap K~ / K) is not known to be a direct summand".into(),
        ));
    }
    if td.lambda_c != 2 {
        return Err(DecisionError::PreconditionViolated(format!("lambda = {}, need 2", td.lambda_c)));
    }
    if sd.ord_alpha + sd.ord_beta == 0 {
        return Err(DecisionError::PreconditionViolated("f is not distinguished".into()));
    }
    Ok(())
}

/// The four-case cyclicity criterion for `dim A_K/p = 2`, `lambda = 2`.
pub fn decide_cyclic_thm512(td: &TowerData, mc: &ModuleClass, mu: MuValuations) -> Result<Verdict, DecisionError> {
    let sd = &mc.splitting;
    check_thm512_hypotheses(td, sd)?;
    let mut trace = alloc::vec![format!(
        "k = {}, ord(beta - alpha) = {}, m = {}, ord alpha = {}, ord beta = {}, n1 = {}, n2 = {}, ord mu21 = {}, ord mu22 = {}",
        mc.k,
        sd.ord_diff,
        sd.m(),
        sd.ord_alpha,
        sd.ord_beta,
        td.n1,
        td.n2,
        show_mu(mu.mu21),
        show_mu(mu.mu22)
    )];
    let cases = thm512_cases(td, mc, mu);
    if let Some((case, _)) = cases.iter().find(|(_, t)| *t == Tri::Yes) {
        trace.push(format!("case {case} holds"));
        return Ok(Verdict::counted(1, *case, trace));
    }
    if cases.iter().all(|(_, t)| *t == Tri::No) {
        trace.push("every case is violated".into());
        return Ok(Verdict::counted(2, FiredCase::T512None, trace));
    }
    let mut needs = Vec::new();
    for (case, t) in cases {
        if t == Tri::Open {
            trace.push(format!("case {case} open"));
            if mu.mu21.is_none() && !needs.iter().any(|s: &String| s.starts_with("ord mu21")) {
                needs.push("ord mu21".into());
            }
            if case == FiredCase::T512IV && mu.mu22.is_none() {
                needs.push("ord mu22".into());
            }
        }
    }
    Ok(Verdict::undetermined(trace, needs))
}

fn show_mu(v: Option<u32>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "?".into(),
    }
}

/// Reads `ord_E(mu_21)`, `ord_E(mu_22)` off the coefficient `A` of the
/// relation `S [u Q1 + v L1] = A [s Q1] + B [u Q1 + v L1]`.
///
/// `Ord([s Q1])` is taken as `e * (n1 + n)`.
pub fn ord_mu_from_action(ac: &ActionCoefficients, mc: &ModuleClass) -> Result<MuValuations, DecisionError> {
    let sd = &mc.splitting;
    let p = sd.p;
    let e = sd.e();
    let modulus = arith::checked_pow(p, ac.class_order_exponent)
        .ok_or_else(|| DecisionError::InsufficientPrecision("class order exponent too large".into()))?;
    let ord_bound = e * ac.class_order_exponent;
    let a = ac.a % modulus;
    let Some(va) = arith::vp(a, p) else {
        return Err(DecisionError::InsufficientPrecision(format!(
            "A = 0 mod {p}^{}; ord_E(A) >= {ord_bound}",
            ac.class_order_exponent
        )));
    };
    let ord_a = e * va;
    if ord_a >= ord_bound {
        return Err(DecisionError::InsufficientPrecision("ord_E(A) reaches the class order".into()));
    }
    let diff = sd.ord_diff;
    if mc.k == 0 && ord_a == diff {
        return Ok(MuValuations { mu21: Some(0), mu22: Some(0) });
    }
    if mc.k > 0 && diff - mc.k == ord_a {
        return Ok(MuValuations { mu21: Some(0), mu22: None });
    }
    Ok(MuValuations::default())
}

/// The sufficient condition: equal root valuations, `A_K = Z/p^m1 + Z/p^m2`
/// with `m1 < m2`, and `L_K cap K~ = K_{m2}^an`.
pub fn prop_test_sufficient(sd: &SplittingData, ak_exponents: (u32, u32), anticyclo_layer: u32) -> Option<Verdict> {
    let (m1, m2) = (ak_exponents.0.min(ak_exponents.1), ak_exponents.0.max(ak_exponents.1));
    if sd.ord_alpha != sd.ord_beta || m1 >= m2 || anticyclo_layer != m2 {
        return None;
    }
    let trace = alloc::vec![format!(
        "ord alpha = ord beta = {}, A_K = (p^{m1}, p^{m2}), L_K cap K~ = K_{m2}^an",
        sd.ord_alpha
    )];
    Some(Verdict::counted(1, FiredCase::PropTest, trace))
}

/// Outcome of the ray-class criterion for `Tor X_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FujiiOutcome {
    /// `N` with `p^N = p * exp(A_K)`.
    pub bound: u32,
    /// Exponents of `A = Tor X_K`.
    pub torsion: Vec<u32>,
    /// `n1 = v_p(#A_K) - v_p(#A)` when the local torsion term is trivial.
    pub n1: Option<u32>,
    pub n2: Option<u32>,
    pub direct_summand: Option<bool>,
}

/// Splits `(I(p) / S(p^n)) (x) Z_p = A + Z/p^N1 + Z/p^N2`; `None` when the
/// hypotheses `N + 2 <= n`, `N < N1, N2` fail.
pub fn fujii_layer(
    ray: &[u32],
    n: u32,
    ak_exponents: &[u32],
    assume_trivial_local_torsion: bool,
) -> Result<Option<FujiiOutcome>, DecisionError> {
    let bound = 1 + ak_exponents.iter().copied().max().unwrap_or(0);
    if bound + 2 > n {
        return Ok(None);
    }
    let mut big: Vec<u32> = ray.iter().copied().filter(|&x| x > bound).collect();
    if big.len() < 2 {
        return Ok(None);
    }
    if big.len() > 2 {
        return Err(DecisionError::AmbiguousDecomposition);
    }
    big.sort_unstable();
    let mut torsion: Vec<u32> = ray.iter().copied().filter(|&x| x <= bound && x > 0).collect();
    torsion.sort_unstable();
    let mut outcome = FujiiOutcome { bound, torsion, n1: None, n2: None, direct_summand: None };
    if assume_trivial_local_torsion {
        let total: u32 = ak_exponents.iter().sum();
        let tor: u32 = outcome.torsion.iter().sum();
        if tor > total {
            return Err(DecisionError::InconsistentInput("torsion of X_K exceeds A_K".into()));
        }
        let n1 = total - tor;
        outcome.n1 = Some(n1);
        outcome.n2 = Some(tor);
        // G / H cyclic of order p^n1 with H = Gal(L_K / L_K cap K~); the
        // quotient splits off iff G = H + G/H as abstract groups.
        let mut want: Vec<u32> = outcome.torsion.clone();
        if n1 > 0 {
            want.push(n1);
        }
        want.sort_unstable();
        let mut have: Vec<u32> = ak_exponents.iter().copied().filter(|&x| x > 0).collect();
        have.sort_unstable();
        outcome.direct_summand = Some(want == have);
    }
    Ok(Some(outcome))
}

/// For `p = 3` and `d != 3 mod 9`: `L_K` lies in `K~` iff the class number of
/// `Q(sqrt(3d))` is prime to 3.
pub fn minardi_subset(p: u64, d: u64, h_aux_div_by_3: bool) -> Option<bool> {
    if p != 3 || d % 9 == 3 {
        return None;
    }
    Some(!h_aux_div_by_3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::SplitKind;

    fn tower(dim: u32, lambda: u32, n1: u32, n2: u32, lk: Option<bool>) -> TowerData {
        TowerData { dim_ak_mod_p: dim, lambda_c: lambda, n1, n2, lk_in_ktilde: lk, direct_summand: Some(true) }
    }

    fn mc(kind: SplitKind, oa: u32, ob: u32, diff: u32, k: u32) -> ModuleClass {
        ModuleClass::new(k, SplittingData::from_valuations(3, kind, oa, ob, diff)).unwrap()
    }

    #[test]
    fn generator_counts() {
        let v = decide_generators_thm11(&tower(1, 1, 0, 1, None)).unwrap();
        assert_eq!((v.generator_count, v.fired_case), (Some(1), Some(FiredCase::T11I)));
        let v = decide_generators_thm11(&tower(1, 1, 1, 0, Some(true))).unwrap();
        assert_eq!(v.fired_case, Some(FiredCase::T11IIa));
        let v = decide_generators_thm11(&tower(1, 2, 1, 1, Some(false))).unwrap();
        assert_eq!((v.generator_count, v.cyclic), (Some(2), Cyclicity::NonCyclic));
        let v = decide_generators_thm11(&tower(2, 2, 1, 1, None)).unwrap();
        assert_eq!(v.cyclic, Cyclicity::Undetermined);
        assert!(decide_generators_thm11(&tower(1, 2, 0, 1, Some(true))).is_err());
    }

    #[test]
    fn cyclicity_cases() {
        let td = tower(2, 2, 2, 1, None);
        let v = decide_cyclic_thm512(&td, &mc(SplitKind::Ramified, 3, 3, 3, 2), MuValuations::default()).unwrap();
        assert_eq!((v.cyclic, v.fired_case), (Cyclicity::Cyclic, Some(FiredCase::T512I)));

        let td = tower(2, 2, 1, 1, None);
        let v = decide_cyclic_thm512(&td, &mc(SplitKind::Split, 1, 1, 3, 0), MuValuations::default()).unwrap();
        assert_eq!((v.cyclic, v.fired_case), (Cyclicity::NonCyclic, Some(FiredCase::T512None)));

        let mu = MuValuations { mu21: Some(0), mu22: Some(0) };
        let v = decide_cyclic_thm512(&td, &mc(SplitKind::Unramified, 1, 1, 1, 0), mu).unwrap();
        assert_eq!(v.fired_case, Some(FiredCase::T512IV));

        let v = decide_cyclic_thm512(&td, &mc(SplitKind::Unramified, 1, 1, 1, 0), MuValuations::default()).unwrap();
        assert_eq!(v.cyclic, Cyclicity::Undetermined);
        assert!(v.needs.contains(&"ord mu22".into()));

        let mut bad = td;
        bad.direct_summand = None;
        assert!(decide_cyclic_thm512(&bad, &mc(SplitKind::Split, 1, 1, 1, 0), mu).is_err());
    }

    #[test]
    fn mu_from_action() {
        // A = 3 mod 9, unramified, k = 0, ord_diff = 1 < Ord = 2
        let ac = ActionCoefficients { a: 3, b: 0, s: 434, t: 434, u: 434, v: 434, class_order_exponent: 2 };
        let m = mc(SplitKind::Unramified, 1, 1, 1, 0);
        assert_eq!(ord_mu_from_action(&ac, &m).unwrap(), MuValuations { mu21: Some(0), mu22: Some(0) });
        let unit = ActionCoefficients { a: 4, ..ac };
        let m1 = mc(SplitKind::Split, 1, 1, 1, 1);
        assert_eq!(ord_mu_from_action(&unit, &m1).unwrap(), MuValuations { mu21: Some(0), mu22: None });
        let zero = ActionCoefficients { a: 9, ..ac };
        assert!(matches!(ord_mu_from_action(&zero, &m), Err(DecisionError::InsufficientPrecision(_))));
    }

    #[test]
    fn prop_test_applicability() {
        let sd = SplittingData::from_valuations(3, SplitKind::Ramified, 3, 3, 3);
        assert!(prop_test_sufficient(&sd, (1, 2), 2).is_some());
        assert!(prop_test_sufficient(&sd, (1, 2), 1).is_none());
        let uneven = SplittingData::from_valuations(3, SplitKind::Split, 1, 2, 1);
        assert!(prop_test_sufficient(&uneven, (1, 2), 2).is_none());
    }

    #[test]
    fn fujii_examples() {
        let out = fujii_layer(&[1, 4, 6], 5, &[2, 1], true).unwrap().unwrap();
        assert_eq!((out.bound, out.torsion.clone(), out.n1), (3, alloc::vec![1], Some(2)));
        assert_eq!(out.direct_summand, Some(true));
        let out = fujii_layer(&[1, 3, 4], 4, &[1, 1], true).unwrap().unwrap();
        assert_eq!((out.bound, out.n1, out.direct_summand), (2, Some(1), Some(true)));
        assert_eq!(fujii_layer(&[1, 3, 4], 3, &[1, 1], true).unwrap(), None);
        assert_eq!(fujii_layer(&[3, 4, 5], 4, &[1, 1], true), Err(DecisionError::AmbiguousDecomposition));
    }

    #[test]
    fn minardi() {
        assert_eq!(minardi_subset(3, 61, false), Some(true));
        assert_eq!(minardi_subset(5, 61, false), None);
        assert_eq!(minardi_subset(3, 1207, false), Some(true));
        assert_eq!(minardi_subset(3, 12, false), None);
    }
}
