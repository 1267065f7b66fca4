//! Rank-two torsion `Lambda_E`-modules with characteristic polynomial
//! `(S - alpha)(S - beta)`: the lattices `M(k)`, their Fitting ideals and the
//! inference of `k` from class groups at a finite layer.

use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{self, Mat2, ResMat};
use crate::padic::{arith, ExtField, PadicElem, PadicError, SplitKind, SplittingData, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaError {
    KOutOfRange { k: u32, ord_diff: u32 },
    NonUnitDeterminant,
    /// The roots are needed but only their valuations are known.
    RootsUnavailable,
    Padic(PadicError),
    /// Finite-level data is malformed.
    BadFiniteLevel(&'static str),
    /// No `k` reproduces the Fitting ideal of the finite-level data.
    NoMatch,
}

impl From<PadicError> for LambdaError {
    fn from(e: PadicError) -> Self {
        LambdaError::Padic(e)
    }
}

impl fmt::Display for LambdaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaError::KOutOfRange { k, ord_diff } => write!(f, "k = {k} is outside [0, {ord_diff}]"),
            LambdaError::NonUnitDeterminant => write!(f, "change-of-basis determinant is not a unit"),
            LambdaError::RootsUnavailable => write!(f, "roots of f are not materialized"),
            LambdaError::Padic(e) => write!(f, "{e}"),
            LambdaError::BadFiniteLevel(why) => write!(f, "finite-level data: {why}"),
            LambdaError::NoMatch => write!(f, "no k in range reproduces the finite-level Fitting ideal"),
        }
    }
}

/// The class `[M(k)]` with `M(k) = <(1,1), (0, pi^k)>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuleClass {
    pub k: u32,
    pub splitting: SplittingData,
}

impl ModuleClass {
    pub fn new(k: u32, splitting: SplittingData) -> Result<Self, LambdaError> {
        if k > splitting.ord_diff {
            return Err(LambdaError::KOutOfRange { k, ord_diff: splitting.ord_diff });
        }
        Ok(Self { k, splitting })
    }

    pub fn ord_diff(&self) -> u32 {
        self.splitting.ord_diff
    }
}

/// Koike's lattice `N_x = <S + c1/2, pi^x>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KoikeLattice {
    pub x: u32,
    pub ord_diff: u32,
}

/// The ideal `(S - root, pi^pi_exp)` of `Lambda_E`; `pi_exp = 0` is `(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearIdeal {
    pub root: Option<PadicElem>,
    pub pi_exp: u32,
}

impl LinearIdeal {
    pub fn is_unit_ideal(&self) -> bool {
        self.pi_exp == 0
    }
}

impl fmt::Display for LinearIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pi_exp == 0 {
            return write!(f, "(1)");
        }
        match &self.root {
            Some(r) => write!(f, "(S - [{r}], pi^{})", self.pi_exp),
            None => write!(f, "(S - alpha, pi^{})", self.pi_exp),
        }
    }
}

/// `Fitt_0 = ((S - alpha)(S - beta))` and `Fitt_1 = (S - alpha, g)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FittingPair {
    pub fitt0_roots: Option<(PadicElem, PadicElem)>,
    pub fitt1: LinearIdeal,
    /// Canonical second generator `(beta - alpha) pi^-k` when computable.
    pub fitt1_generator: Option<PadicElem>,
}

pub fn fitting_ideals_mk(mc: &ModuleClass) -> FittingPair {
    let sd = &mc.splitting;
    let pi_exp = sd.ord_diff - mc.k;
    let generator = sd.roots.and_then(|(a, b)| (b - a).div_pi_pow(mc.k).ok());
    FittingPair {
        fitt0_roots: sd.roots,
        fitt1: LinearIdeal { root: sd.alpha(), pi_exp },
        fitt1_generator: generator,
    }
}

/// `M(k) = N_{ord_diff - k}`.
pub fn koike_partner(mc: &ModuleClass) -> KoikeLattice {
    KoikeLattice { x: mc.ord_diff() - mc.k, ord_diff: mc.ord_diff() }
}

/// Valuations of the two `O_E`-cyclic factors of `A_K (x) O_E = M(k) / S M(k)`.
pub fn class_group_structure_from_k(mc: &ModuleClass) -> (u32, u32) {
    let sd = &mc.splitting;
    let j = sd.ord_diff - mc.k;
    if j >= sd.m() {
        (sd.ord_alpha, sd.ord_beta)
    } else {
        (j, sd.ord_alpha + sd.ord_beta - j)
    }
}

/// Generators `x1, x2` of `X` written in the basis `e1, e2` of `X (x) O_E`.
///
/// For `k = 0` the basis is `(1,0), (0,1)`, otherwise `(1,1), (0, pi^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorFrame {
    pub lambda: Mat2,
    pub k: u32,
}

impl GeneratorFrame {
    pub fn new(lambda: Mat2, k: u32) -> Result<Self, LambdaError> {
        if !lambda.det().is_unit() {
            return Err(LambdaError::NonUnitDeterminant);
        }
        Ok(Self { lambda, k })
    }

    pub fn standard_basis(&self) -> bool {
        self.k == 0
    }

    /// `(mu_i1, mu_i2)`: the image of `x_i (x) 1` in `O_E (+) O_E`.
    pub fn mu(&self) -> Mat2 {
        let [[l11, l12], [l21, l22]] = self.lambda.m;
        if self.standard_basis() {
            return self.lambda;
        }
        Mat2::new(l11, l11 + l12.mul_pi_pow(self.k), l21, l21 + l22.mul_pi_pow(self.k))
    }
}

/// Matrix `T` with `S (x1, x2)^t = T (x1, x2)^t`, from the closed forms.
pub fn s_action_matrix(frame: &GeneratorFrame, sd: &SplittingData) -> Result<Mat2, LambdaError> {
    let (alpha, beta) = sd.roots.ok_or(LambdaError::RootsUnavailable)?;
    let [[l11, l12], [l21, l22]] = frame.lambda.m;
    let dinv = frame.lambda.det().inverse().map_err(|_| LambdaError::NonUnitDeterminant)?;
    let base = [
        [alpha * l11 * l22 - beta * l12 * l21, (beta - alpha) * l11 * l12],
        [(alpha - beta) * l21 * l22, beta * l11 * l22 - alpha * l12 * l21],
    ];
    let t = if frame.k == 0 {
        base
    } else {
        if (alpha - beta).valuation().lower_bound() < frame.k {
            return Err(LambdaError::KOutOfRange { k: frame.k, ord_diff: sd.ord_diff });
        }
        // gamma = (alpha - beta) pi^-k
        let gamma = (alpha - beta).div_pi_pow(frame.k)?;
        [
            [base[0][0] - l11 * l21 * gamma, base[0][1] + l11 * l11 * gamma],
            [base[1][0] - l21 * l21 * gamma, base[1][1] + l11 * l21 * gamma],
        ]
    };
    Ok(Mat2::new(t[0][0] * dinv, t[0][1] * dinv, t[1][0] * dinv, t[1][1] * dinv))
}

/// `A_{K_n} = Z/p^{a1} [b1] (+) Z/p^{a2} [b2]` with the action of `S = sigma - 1`.
///
/// `s_action[i][j]` is the coefficient of `b_i` in `S b_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiniteLevelData {
    pub p: u64,
    pub n: u32,
    pub class_group: [u32; 2],
    pub s_action: ResMat,
}

/// `(S - c, p^t)` over `Z_p[[S]]`: `Fitt_1` of the finite-level module.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseLinearIdeal {
    pub c: u64,
    pub t: u32,
}

impl fmt::Display for BaseLinearIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t == 0 {
            write!(f, "(1)")
        } else {
            write!(f, "(S - {}, p^{})", self.c, self.t)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KInference {
    Determined(u32),
    /// Several `k` survive at the available precision.
    Ambiguous(Vec<u32>),
}

impl KInference {
    pub fn candidates(&self) -> Vec<u32> {
        match self {
            KInference::Determined(k) => alloc::vec![*k],
            KInference::Ambiguous(ks) => ks.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KInferenceReport {
    pub computed: BaseLinearIdeal,
    pub outcome: KInference,
    /// Candidates matched by valuation alone because the roots are unknown.
    pub root_check_skipped: bool,
}

/// `omega_n(x) = (1 + x)^{p^n} - 1` by the binomial expansion.
pub fn omega_n(x: &PadicElem, n: u32) -> PadicElem {
    let field = x.field();
    let p = field.p();
    let deg = arith::pow(p, n);
    let mut acc = field.zero();
    let mut xi = field.one();
    for i in 1..=deg {
        xi = xi * *x;
        let c = arith::binomial_mod(deg, i, field.modulus());
        acc = acc + field.int(c as i128) * xi;
    }
    acc
}

/// `ord_E(omega_n(x))` from `ord_E(x)` alone when the Newton-type minimum is
/// attained once; the terms are `binom(p^n, i) x^i`.
pub fn omega_n_valuation_from_ord(p: u64, e: u32, n: u32, ord_x: u32) -> Option<u32> {
    let deg = arith::pow(p, n);
    let mut best: Option<(u32, u32)> = None; // (value, multiplicity)
    for i in 1..=deg {
        let v = e * arith::vp_binomial_prime_power(p, n, i) + i as u32 * ord_x;
        best = match best {
            Some((b, c)) if v == b => Some((b, c + 1)),
            Some((b, _)) if v > b => best,
            _ => Some((v, 1)),
        };
    }
    match best {
        Some((v, 1)) => Some(v),
        _ => None,
    }
}

fn vp_or(x: u64, p: u64, cap: u32) -> u32 {
    arith::vp(x, p).unwrap_or(cap).min(cap)
}

/// `Fitt_1` over `Z_p[[S]] / omega_n` of the module presented by `fld`.
pub fn finite_level_fitting(fld: &FiniteLevelData) -> Result<BaseLinearIdeal, LambdaError> {
    let p = fld.p;
    let [a1, a2] = fld.class_group;
    if a1 == 0 || a2 == 0 {
        return Err(LambdaError::BadFiniteLevel("class group needs two non-trivial factors"));
    }
    let cap = a1.min(a2);
    let m = arith::checked_pow(p, a1.max(a2) + 1).ok_or(LambdaError::BadFiniteLevel("exponents too large"))?;
    let s = &fld.s_action;
    let c = s[0][0] % arith::pow(p, a1);
    let diag = arith::sub(s[0][0] % m, s[1][1] % m, m);
    let mut t = cap;
    t = t.min(vp_or(diag, p, cap));
    t = t.min(vp_or(s[0][1] % m, p, cap));
    t = t.min(vp_or(s[1][0] % m, p, cap));
    let z = ExtField::base(p, a1.max(a2) + 1)?;
    let w = omega_n(&z.int(c as i128), fld.n);
    t = t.min(w.valuation().lower_bound());
    Ok(BaseLinearIdeal { c: c % arith::pow(p, t.max(1)), t })
}

/// Infers `k` by matching `Fitt_1(X / omega_n X) (x) O_E` against the
/// predictions `(S - alpha, pi^{min(ord_diff - k, ord omega_n(alpha))})`.
pub fn infer_k(fld: &FiniteLevelData, sd: &SplittingData) -> Result<KInferenceReport, LambdaError> {
    if fld.p != sd.p {
        return Err(LambdaError::BadFiniteLevel("prime differs from the splitting data"));
    }
    let computed = finite_level_fitting(fld)?;
    let e = sd.e();
    let target = e * computed.t;

    let (omega_ord, root_ok) = match sd.roots {
        Some((alpha, _)) => {
            let w = omega_n(&alpha, fld.n).valuation();
            let field = alpha.field();
            let c = PadicElem::from_coords(field, computed.c as i128, 0, field.cap());
            let close = match (c - alpha).valuation() {
                Valuation::Exact(v) => Some(v >= target),
                Valuation::Indeterminate(v) => (v >= target).then_some(true),
            };
            (w, close)
        }
        None => {
            let w = omega_n_valuation_from_ord(sd.p, e, fld.n, sd.ord_alpha)
                .map(Valuation::Exact)
                .unwrap_or(Valuation::Indeterminate(0));
            (w, None)
        }
    };

    let mut survivors = Vec::new();
    for k in 0..=sd.ord_diff {
        let j = sd.ord_diff - k;
        let predicted = match omega_ord {
            Valuation::Exact(w) => Some(j.min(w)),
            Valuation::Indeterminate(w) if j <= w => Some(j),
            Valuation::Indeterminate(_) => None,
        };
        match predicted {
            Some(j) if j == target => survivors.push(k),
            Some(_) => {}
            None => survivors.push(k),
        }
    }
    if root_ok == Some(false) && target > 0 {
        survivors.clear();
    }
    let outcome = match survivors.len() {
        0 => return Err(LambdaError::NoMatch),
        1 => KInference::Determined(survivors[0]),
        _ => KInference::Ambiguous(survivors),
    };
    Ok(KInferenceReport { computed, outcome, root_check_skipped: sd.roots.is_none() })
}

/// Finite-level data of `M(k) / omega_n M(k)` for split `f` with integral
/// roots, in a Smith basis.
pub fn synthesize_finite_level(mc: &ModuleClass, n: u32) -> Result<FiniteLevelData, LambdaError> {
    let sd = &mc.splitting;
    if sd.kind != SplitKind::Split {
        return Err(LambdaError::BadFiniteLevel("synthesis needs roots in Z_p"));
    }
    let (alpha, beta) = sd.roots.ok_or(LambdaError::RootsUnavailable)?;
    let field = alpha.field();
    let p = sd.p;
    let l = field.digits();
    let m = field.modulus();
    // S on the basis (1,1), (0,p^k): columns are the images
    let gamma = (beta - alpha).div_pi_pow(mc.k)?;
    let smat = [alpha, field.zero(), gamma, beta];
    let res = |x: &PadicElem| x.coords().0 % m;
    let s_res: ResMat = [[res(&smat[0]), res(&smat[1])], [res(&smat[2]), res(&smat[3])]];
    // omega_n(S) as a matrix: evaluate the polynomial on the 2x2 matrix
    let deg = arith::pow(p, n);
    let mut acc: ResMat = [[0, 0], [0, 0]];
    let mut power: ResMat = [[1, 0], [0, 1]];
    for i in 1..=deg {
        power = linalg::res_mul(&power, &s_res, m);
        let c = arith::binomial_mod(deg, i, m);
        for r in 0..2 {
            for q in 0..2 {
                acc[r][q] = arith::add(acc[r][q], arith::mul(c, power[r][q], m), m);
            }
        }
    }
    let smith = linalg::smith2_mod(&acc, p, l);
    if smith.exps[1] >= l {
        return Err(LambdaError::BadFiniteLevel("precision too low for the quotient"));
    }
    let u_inv = linalg::res_inverse(&smith.u, m).ok_or(LambdaError::BadFiniteLevel("singular transform"))?;
    let action = linalg::res_mul(&linalg::res_mul(&smith.u, &s_res, m), &u_inv, m);
    let mut s_action = [[0u64; 2]; 2];
    for i in 0..2 {
        let mi = arith::pow(p, smith.exps[i]);
        for j in 0..2 {
            s_action[i][j] = action[i][j] % mi;
        }
    }
    Ok(FiniteLevelData { p, n, class_group: smith.exps, s_action })
}
