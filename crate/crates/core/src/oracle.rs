//! Brute-force checks over finite quotients. Nothing here calls into the
//! closed forms it verifies, except as the value under test.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lambda_class::{self, GeneratorFrame, ModuleClass};
use crate::linalg::Mat2;
use crate::padic::{ExtField, PadicElem, PadicError, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    ResourceLimit { needed: u64, budget: u64 },
    Precondition(&'static str),
    Padic(PadicError),
}

impl From<PadicError> for OracleError {
    fn from(e: PadicError) -> Self {
        OracleError::Padic(e)
    }
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::ResourceLimit { needed, budget } => {
                write!(f, "enumeration needs {needed} steps, budget is {budget}")
            }
            OracleError::Precondition(s) => write!(f, "precondition: {s}"),
            OracleError::Padic(e) => write!(f, "{e}"),
        }
    }
}

/// Failed check with enough context to reproduce it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub trial: usize,
    pub dump: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trial {}: {}", self.trial, self.dump)
    }
}

/// Hermite form `<(pi^a, x), (0, pi^b)>` of a full-rank `O_E`-lattice in
/// `E^2`, with `x` reduced mod `pi^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub a: u32,
    pub b: u32,
    pub x: PadicElem,
}

impl Lattice {
    fn new(a: u32, b: u32, x: PadicElem) -> Self {
        Self { a, b, x: x.with_prec(b) }
    }

    fn same(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.x.coords() == other.x.coords()
    }
}

fn exact(v: Valuation) -> Option<u32> {
    v.exact()
}

/// Hermite form of the lattice spanned by `gens`; `None` when it is not of
/// full rank at the available precision.
pub fn hermite(gens: &[(PadicElem, PadicElem)]) -> Option<Lattice> {
    let (i0, a) = gens
        .iter()
        .enumerate()
        .filter_map(|(i, (u, _))| exact(u.valuation()).map(|v| (i, v)))
        .min_by_key(|&(_, v)| v)?;
    if gens.iter().any(|(u, _)| u.valuation().lower_bound() < a) {
        return None;
    }
    let (u0, w0) = gens[i0];
    let unit_inv = u0.div_pi_pow(a).ok()?.inverse().ok()?;
    let x = w0 * unit_inv;
    let mut rest = Vec::new();
    for (i, (u, w)) in gens.iter().enumerate() {
        if i == i0 {
            continue;
        }
        let q = u.div_pi_pow(a).ok()?;
        rest.push(*w - q * x);
    }
    let b = rest.iter().filter_map(|w| exact(w.valuation())).min()?;
    if rest.iter().any(|w| w.valuation().lower_bound() < b) {
        return None;
    }
    if x.prec() < b {
        return None;
    }
    Some(Lattice::new(a, b, x))
}

fn units(field: ExtField, prec: u32) -> Vec<PadicElem> {
    if prec == 0 {
        return alloc::vec![field.one()];
    }
    field.enumerate(prec).into_iter().filter(|r| r.is_unit()).collect()
}

/// Searches for `diag(pi^i u, pi^j w)` carrying `l1` onto `l2`. These are
/// all the `S`-equivariant automorphisms of `E^2` when `alpha != beta`.
pub fn lattices_isomorphic(field: ExtField, l1: &Lattice, l2: &Lattice, budget: u64) -> Result<bool, OracleError> {
    let top = l1.b.max(l2.b);
    let cands = units(field, top);
    if cands.len() as u64 > budget {
        return Err(OracleError::ResourceLimit { needed: cands.len() as u64, budget });
    }
    let (b1, b2) = (l1.b, l2.b);
    for r in cands {
        let ok = if b2 >= b1 {
            let lhs = (r * l1.x).mul_pi_pow(b2 - b1).with_prec(b2);
            lhs.coords() == l2.x.with_prec(b2).coords()
        } else {
            let lhs = (r * l1.x).with_prec(b1);
            let rhs = l2.x.mul_pi_pow(b1 - b2).with_prec(b1);
            lhs.coords() == rhs.coords()
        };
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Count of isomorphism classes of `S`-stable lattices in `E^2` with
/// `S = diag(alpha, beta)`, searched among `pi^c O^2 <= M <= O^2` for
/// `c = ord(beta - alpha) + 1`.
pub fn enumerate_classes(alpha: &PadicElem, beta: &PadicElem, budget: u64) -> Result<usize, OracleError> {
    Ok(enumerate_class_representatives(alpha, beta, budget)?.len())
}

pub fn enumerate_class_representatives(
    alpha: &PadicElem,
    beta: &PadicElem,
    budget: u64,
) -> Result<Vec<Lattice>, OracleError> {
    let field = alpha.field();
    let diff = *beta - *alpha;
    let d = diff.valuation().exact().ok_or(OracleError::Precondition("alpha = beta at this precision"))?;
    if d + 2 > alpha.prec().min(beta.prec()) {
        return Err(OracleError::Precondition("need ord(beta - alpha) + 2 <= precision"));
    }
    let c = d + 1;
    let mut needed = 0u64;
    for b in 0..=c {
        needed += field.enumerate(b).len() as u64 * (c as u64 + 1);
    }
    if needed > budget {
        return Err(OracleError::ResourceLimit { needed, budget });
    }
    let mut reps: Vec<Lattice> = Vec::new();
    for b in 0..=c {
        let xs = field.enumerate(b);
        for a in 0..=c {
            for x in &xs {
                let vx = x.valuation().lower_bound();
                // contains (pi^c, 0) and is stable under S
                if vx + c < a + b || d + vx < b {
                    continue;
                }
                let lat = Lattice::new(a, b, *x);
                let mut known = false;
                for r in &reps {
                    if lattices_isomorphic(field, &lat, r, budget)? {
                        known = true;
                        break;
                    }
                }
                if !known {
                    reps.push(lat);
                }
            }
        }
    }
    Ok(reps)
}

fn embed(field: ExtField, x: u32) -> PadicElem {
    field.one().mul_pi_pow(x)
}

/// Hermite form of `M(k) = <(1,1), (0, pi^k)>`.
pub fn sumida_lattice(field: ExtField, k: u32) -> Option<Lattice> {
    let one = field.one();
    let zero = field.zero();
    hermite(&[(one, one), (zero, embed(field, k))])
}

/// Hermite form of `N_x = <S + c1/2, pi^x>` inside `O_E^2` via `g -> (g(alpha), g(beta))`.
pub fn koike_lattice(alpha: &PadicElem, beta: &PadicElem, x: u32) -> Option<Lattice> {
    let field = alpha.field();
    let half = field.int(2).inverse().ok()?;
    let c1 = -(*alpha + *beta);
    let g = (*alpha + c1 * half, *beta + c1 * half);
    let px = embed(field, x);
    let gens = [g, (*alpha * g.0, *beta * g.1), (px, px), (*alpha * px, *beta * px)];
    hermite(&gens)
}

/// Exhaustive isomorphism search between `M(k)` and `N_x`.
pub fn verify_koike_iso(alpha: &PadicElem, beta: &PadicElem, k: u32, x: u32, budget: u64) -> Result<bool, OracleError> {
    let field = alpha.field();
    let m = sumida_lattice(field, k).ok_or(OracleError::Precondition("M(k) lost precision"))?;
    let n = koike_lattice(alpha, beta, x).ok_or(OracleError::Precondition("N_x lost precision"))?;
    lattices_isomorphic(field, &m, &n, budget)
}

/// Elementary divisors of `M(k) / S M(k)`, computed from coordinates.
pub fn coinvariant_valuations(alpha: &PadicElem, beta: &PadicElem, k: u32) -> Option<(u32, u32)> {
    // S(1,1) = (alpha, beta) = alpha (1,1) + ((beta - alpha) / pi^k) (0, pi^k)
    let c21 = (*beta - *alpha).div_pi_pow(k).ok()?;
    let entries = [*alpha, c21, *beta];
    let d1 = entries.iter().filter_map(|x| x.valuation().exact()).min()?;
    if entries.iter().any(|x| x.valuation().lower_bound() < d1) {
        return None;
    }
    let det = (*alpha * *beta).valuation().exact()?;
    Some((d1, det - d1))
}

type Poly = Vec<PadicElem>;

fn poly_trim(mut f: Poly) -> Poly {
    while f.len() > 1 && f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

fn poly_add(f: &Poly, g: &Poly, field: ExtField) -> Poly {
    let n = f.len().max(g.len());
    let at = |h: &Poly, i: usize| h.get(i).copied().unwrap_or_else(|| field.zero());
    poly_trim((0..n).map(|i| at(f, i) + at(g, i)).collect())
}

fn poly_mul(f: &Poly, g: &Poly, field: ExtField) -> Poly {
    let mut out = alloc::vec![field.zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            out[i + j] = out[i + j] + *a * *b;
        }
    }
    poly_trim(out)
}

/// Quotient and remainder by a monic polynomial.
fn poly_divmod(f: &Poly, monic: &Poly, field: ExtField) -> (Poly, Poly) {
    let dm = monic.len() - 1;
    let mut r = f.clone();
    if r.len() <= dm {
        return (alloc::vec![field.zero()], r);
    }
    let mut q = alloc::vec![field.zero(); r.len() - dm];
    for i in (dm..r.len()).rev() {
        let c = r[i];
        q[i - dm] = c;
        for j in 0..=dm {
            r[i - dm + j] = r[i - dm + j] - c * monic[j];
        }
    }
    r.truncate(dm);
    (q, r)
}

type PolyMat = [[Poly; 2]; 2];

fn polymat_mul(a: &PolyMat, b: &PolyMat, field: ExtField) -> PolyMat {
    let e = |i: usize, j: usize| poly_add(&poly_mul(&a[i][0], &b[0][j], field), &poly_mul(&a[i][1], &b[1][j], field), field);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn random_elem(rng: &mut ChaCha8Rng, field: ExtField) -> PadicElem {
    let m = field.modulus();
    PadicElem::from_coords(field, rng.gen_range(0..m) as i128, rng.gen_range(0..m) as i128, field.cap())
}

fn random_unit(rng: &mut ChaCha8Rng, field: ExtField) -> PadicElem {
    loop {
        let x = random_elem(rng, field);
        if x.is_unit() {
            return x;
        }
    }
}

/// Random matrix of determinant a unit constant: a product of elementary
/// matrices with linear polynomial entries and a unit diagonal.
fn random_unimodular(rng: &mut ChaCha8Rng, field: ExtField) -> PolyMat {
    let one = || alloc::vec![field.one()];
    let zero = || alloc::vec![field.zero()];
    let mut acc: PolyMat = [[one(), zero()], [zero(), one()]];
    for step in 0..3 {
        let t = poly_trim(alloc::vec![random_elem(rng, field), random_elem(rng, field)]);
        let el: PolyMat = if step % 2 == 0 { [[one(), t], [zero(), one()]] } else { [[one(), zero()], [t, one()]] };
        acc = polymat_mul(&acc, &el, field);
    }
    let d: PolyMat = [[alloc::vec![random_unit(rng, field)], zero()], [zero(), alloc::vec![random_unit(rng, field)]]];
    polymat_mul(&acc, &d, field)
}

/// Hermite form of an ideal of `O_E[S] / (f, pi^level)` as a submodule of
/// the free module with basis `1, S`.
fn ideal_lattice(gens: &[Poly], f: &Poly, level: u32, field: ExtField) -> Option<Lattice> {
    let s = alloc::vec![field.zero(), field.one()];
    let mut vecs = Vec::new();
    for g in gens {
        for h in [g.clone(), poly_mul(g, &s, field)] {
            let (_, r) = poly_divmod(&h, f, field);
            let at = |i: usize| r.get(i).copied().unwrap_or_else(|| field.zero());
            vecs.push((at(0), at(1)));
        }
    }
    let pl = embed(field, level);
    vecs.push((pl, field.zero()));
    vecs.push((field.zero(), pl));
    hermite(&vecs)
}

/// Presentation of `M(k)`: relations `(S - alpha) e1 - g e2` and `(S - beta) e2`.
fn presentation(alpha: &PadicElem, beta: &PadicElem, g: &PadicElem) -> PolyMat {
    let field = alpha.field();
    [
        [alloc::vec![-*alpha, field.one()], alloc::vec![-*g]],
        [alloc::vec![field.zero()], alloc::vec![-*beta, field.one()]],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corruption {
    None,
    /// Swap the two entries of the first relation.
    SwapFirstRow,
}

/// Checks `Fitt_0 = (f)` and `Fitt_1 = (S - alpha, pi^{ord_diff - k})` on
/// random unimodular transforms `U P V` of the presentation of `M(k)`.
pub fn verify_fitting(mc: &ModuleClass, trials: usize, seed: u64, corruption: Corruption) -> Result<(), Counterexample> {
    let fail = |trial: usize, dump: String| Counterexample { trial, dump };
    let (alpha, beta) = mc.splitting.roots.ok_or_else(|| fail(0, "roots not materialized".into()))?;
    let field = alpha.field();
    let d = (beta - alpha).valuation().exact().ok_or_else(|| fail(0, "alpha = beta at this precision".into()))?;
    if mc.k > d {
        return Err(fail(0, format!("k = {} exceeds ord(beta - alpha) = {d}", mc.k)));
    }
    let g = (beta - alpha).div_pi_pow(mc.k).map_err(|e| fail(0, format!("{e}")))?;
    let f = poly_mul(&alloc::vec![-alpha, field.one()], &alloc::vec![-beta, field.one()], field);
    let j = d - mc.k;
    let level = (j + 1).min(alpha.prec().min(beta.prec()).saturating_sub(mc.k + 1)).max(j);
    let expected = ideal_lattice(
        &[alloc::vec![-alpha, field.one()], alloc::vec![embed(field, j)]],
        &f,
        level,
        field,
    )
    .ok_or_else(|| fail(0, "expected ideal lost precision".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let mut p = presentation(&alpha, &beta, &g);
        if corruption == Corruption::SwapFirstRow {
            let [row0, row1] = p;
            let [x, y] = row0;
            p = [[y, x], row1];
        }
        let u = random_unimodular(&mut rng, field);
        let v = random_unimodular(&mut rng, field);
        let pp = polymat_mul(&polymat_mul(&u, &p, field), &v, field);
        let det = poly_add(
            &poly_mul(&pp[0][0], &pp[1][1], field),
            &poly_mul(&pp[0][1], &pp[1][0], field).iter().map(|c| -*c).collect(),
            field,
        );
        let (q, r) = poly_divmod(&det, &f, field);
        if !r.iter().all(|c| c.is_zero()) || !q[0].is_unit() {
            return Err(fail(trial, format!("Fitt_0 is not (f): det = {det:?}")));
        }
        let entries: Vec<Poly> = pp.iter().flatten().cloned().collect();
        let got = ideal_lattice(&entries, &f, level, field).ok_or_else(|| fail(trial, "Fitt_1 lost precision".into()))?;
        if !got.same(&expected) {
            return Err(fail(
                trial,
                format!("Fitt_1 mismatch: got {got:?}, expected {expected:?}, presentation {pp:?}"),
            ));
        }
    }
    Ok(())
}

fn conjugate_directly(l: &Mat2, u: &Mat2) -> Option<Mat2> {
    let [[a, b], [c, d]] = l.m;
    let det = a * d - b * c;
    let dinv = det.inverse().ok()?;
    let adj = Mat2::new(d * dinv, -b * dinv, -c * dinv, a * dinv);
    let mul = |x: &Mat2, y: &Mat2| {
        let e = |i: usize, j: usize| x.m[i][0] * y.m[0][j] + x.m[i][1] * y.m[1][j];
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    };
    Some(mul(&mul(l, u), &adj))
}

/// Compares the closed-form action matrix with `L U L^-1` for random
/// unit-determinant `L`. Returns the number of rejected singular draws.
pub fn verify_main_lem(mc: &ModuleClass, trials: usize, seed: u64) -> Result<usize, Counterexample> {
    let fail = |trial: usize, dump: String| Counterexample { trial, dump };
    let sd = &mc.splitting;
    let (alpha, beta) = sd.roots.ok_or_else(|| fail(0, "roots not materialized".into()))?;
    let field = alpha.field();
    let corner = if mc.k == 0 {
        field.zero()
    } else {
        (alpha - beta).div_pi_pow(mc.k).map_err(|e| fail(0, format!("{e}")))?
    };
    let u = Mat2::new(alpha, corner, field.zero(), beta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0;
    let mut done = 0;
    while done < trials {
        let l = Mat2::new(
            random_elem(&mut rng, field),
            random_elem(&mut rng, field),
            random_elem(&mut rng, field),
            random_elem(&mut rng, field),
        );
        let frame = match GeneratorFrame::new(l, mc.k) {
            Ok(fr) => fr,
            Err(_) => {
                rejected += 1;
                continue;
            }
        };
        let closed = lambda_class::s_action_matrix(&frame, sd).map_err(|e| fail(done, format!("{e}")))?;
        let direct = conjugate_directly(&l, &u).ok_or_else(|| fail(done, "singular L accepted".into()))?;
        if !closed.congruent(&direct) {
            return Err(fail(done, format!("L = {l:?}: closed form {closed:?} vs conjugation {direct:?}")));
        }
        done += 1;
    }
    Ok(rejected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{splitting_type, IwasawaPoly};

    fn split_roots(alpha: i128, beta: i128, digits: u32) -> (PadicElem, PadicElem) {
        let f = ExtField::base(3, digits).unwrap();
        (f.int(alpha), f.int(beta))
    }

    #[test]
    fn hermite_of_standard_lattices() {
        let f = ExtField::base(3, 6).unwrap();
        let m2 = sumida_lattice(f, 2).unwrap();
        assert_eq!((m2.a, m2.b, m2.x.coords().0), (0, 2, 1));
        let m0 = sumida_lattice(f, 0).unwrap();
        assert_eq!((m0.a, m0.b), (0, 0));
    }

    #[test]
    fn class_counts() {
        let (a, b) = split_roots(3, 30, 5);
        assert_eq!(enumerate_classes(&a, &b, 1 << 20).unwrap(), 4);
        let (a, b) = split_roots(3, 12, 4);
        assert_eq!(enumerate_classes(&a, &b, 1 << 20).unwrap(), 3);
        let (a, b) = split_roots(3, 4, 4);
        assert_eq!(enumerate_classes(&a, &b, 1 << 20).unwrap(), 1);
        assert!(matches!(enumerate_classes(&a, &b, 2), Err(OracleError::ResourceLimit { .. })));
    }

    #[test]
    fn koike_partner_and_negative_control() {
        let f = IwasawaPoly::new(3, 8, 90, 189).unwrap();
        let sd = splitting_type(&f).unwrap();
        let (a, b) = sd.roots.unwrap();
        assert!(verify_koike_iso(&a, &b, 2, 1, 1 << 16).unwrap());
        assert!(!verify_koike_iso(&a, &b, 2, 2, 1 << 16).unwrap());
    }

    #[test]
    fn fitting_and_main_lemma() {
        let f = IwasawaPoly::new(3, 6, -15, 36).unwrap();
        let sd = splitting_type(&f).unwrap();
        assert_eq!(sd.ord_diff, 2);
        for k in 0..=2 {
            let mc = ModuleClass::new(k, sd).unwrap();
            verify_fitting(&mc, 10, 7, Corruption::None).unwrap();
            verify_main_lem(&mc, 10, 7).unwrap();
        }
        let mc = ModuleClass::new(0, sd).unwrap();
        assert!(verify_fitting(&mc, 3, 7, Corruption::SwapFirstRow).is_err());
    }
}
