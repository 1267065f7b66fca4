//! Truncated `p`-adic arithmetic and the splitting analysis of a
//! distinguished quadratic `f(S) = S^2 + c1 S + c0`.

pub mod arith;
mod elem;

use core::fmt;

pub use elem::{ExtField, FieldKind, PadicElem, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadicError {
    NotOddPrime(u64),
    ZeroPrecision,
    PrecisionTooLarge { p: u64, digits: u32 },
    NotAUnit,
    NotDivisible,
    /// The known digits cannot settle the requested quantity.
    InsufficientPrecision,
    NotDistinguished,
    NoRoot,
    NotSplit(SplitKind),
    /// Coefficients whose Newton polygon contradicts their discriminant.
    InconsistentPolynomial,
}

impl fmt::Display for PadicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicError::NotOddPrime(p) => write!(f, "{p} is not an odd prime"),
            PadicError::ZeroPrecision => write!(f, "precision must be positive"),
            PadicError::PrecisionTooLarge { p, digits } => {
                write!(f, "{p}^{digits} exceeds the supported modulus")
            }
            PadicError::NotAUnit => write!(f, "element is not a unit"),
            PadicError::NotDivisible => write!(f, "element is not divisible by the uniformizer"),
            PadicError::InsufficientPrecision => write!(f, "insufficient precision"),
            PadicError::NotDistinguished => write!(f, "polynomial is not distinguished"),
            PadicError::NoRoot => write!(f, "no square root exists"),
            PadicError::NotSplit(kind) => write!(f, "polynomial does not split over Q_p ({kind})"),
            PadicError::InconsistentPolynomial => write!(f, "Newton polygon contradicts the discriminant"),
        }
    }
}

/// Square root of a unit modulo `p^digits` by Hensel lifting.
///
/// The returned root is the one whose residue mod `p` is smallest.
pub fn sqrt_unit(u: i128, p: u64, digits: u32) -> Result<PadicElem, PadicError> {
    let field = ExtField::base(p, digits)?;
    let m = field.modulus();
    let u = arith::reduce(u, m);
    if u % p == 0 {
        return Err(PadicError::NotAUnit);
    }
    let x0 = (1..p).find(|x| x * x % p == u % p).ok_or(PadicError::NoRoot)?;
    // Newton step x <- x - (x^2 - u) / (2x); each step doubles the precision.
    let mut x = x0;
    let mut known = 1;
    while known < digits {
        let fx = arith::sub(arith::mul(x, x, m), u, m);
        let dfx = arith::mul(2, x, m);
        let step = arith::mul(fx, arith::inv(dfx, m).ok_or(PadicError::NotAUnit)?, m);
        x = arith::sub(x, step, m);
        known *= 2;
    }
    Ok(field.int(x as i128))
}

/// Distinguished quadratic `S^2 + c1 S + c0` with coefficients mod `p^prec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IwasawaPoly {
    p: u64,
    prec: u32,
    c1: u64,
    c0: u64,
}

impl IwasawaPoly {
    pub fn new(p: u64, prec: u32, c1: i128, c0: i128) -> Result<Self, PadicError> {
        let field = ExtField::base(p, prec)?;
        let m = field.modulus();
        let (c1, c0) = (arith::reduce(c1, m), arith::reduce(c0, m));
        if c1 % p != 0 || c0 % p != 0 {
            return Err(PadicError::NotDistinguished);
        }
        Ok(Self { p, prec, c1, c0 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn c1(&self) -> u64 {
        self.c1
    }

    pub fn c0(&self) -> u64 {
        self.c0
    }

    pub fn modulus(&self) -> u64 {
        arith::pow(self.p, self.prec)
    }

    /// `c1^2 - 4 c0 mod p^prec`.
    pub fn discriminant(&self) -> u64 {
        let m = self.modulus();
        arith::sub(arith::mul(self.c1, self.c1, m), arith::mul(4, self.c0, m), m)
    }

    /// Same polynomial read at a lower precision.
    pub fn truncated(&self, prec: u32) -> Self {
        let prec = prec.min(self.prec).max(1);
        let m = arith::pow(self.p, prec);
        Self { prec, c1: self.c1 % m, c0: self.c0 % m, ..*self }
    }

    /// `f(x)` for `x` in any extension of `Q_p`.
    pub fn eval(&self, x: &PadicElem) -> PadicElem {
        let field = x.field();
        let c1 = PadicElem::from_coords(field, self.c1 as i128, 0, self.prec * field.e());
        let c0 = PadicElem::from_coords(field, self.c0 as i128, 0, self.prec * field.e());
        *x * *x + c1 * *x + c0
    }
}

impl fmt::Display for IwasawaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S^2 + {}S + {} mod {}^{}", self.c1, self.c0, self.p, self.prec)
    }
}

/// Splitting field type of a separable quadratic over `Q_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitKind {
    /// `E = Q_p`.
    Split,
    Unramified,
    Ramified,
}

impl SplitKind {
    pub fn e(self) -> u32 {
        match self {
            SplitKind::Ramified => 2,
            _ => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SplitKind::Split => "split",
            SplitKind::Unramified => "unramified",
            SplitKind::Ramified => "ramified",
        }
    }
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Splitting field, root valuations and (when liftable) the roots of `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplittingData {
    pub kind: SplitKind,
    pub p: u64,
    /// Field holding the materialized roots.
    pub field: Option<ExtField>,
    pub roots: Option<(PadicElem, PadicElem)>,
    pub ord_alpha: u32,
    pub ord_beta: u32,
    /// `ord_E(beta - alpha)`.
    pub ord_diff: u32,
}

impl SplittingData {
    /// Splitting data known only through its valuations, e.g. from a
    /// published table when the coefficients are too coarse.
    pub fn from_valuations(p: u64, kind: SplitKind, ord_alpha: u32, ord_beta: u32, ord_diff: u32) -> Self {
        let (ord_alpha, ord_beta) = (ord_alpha.min(ord_beta), ord_alpha.max(ord_beta));
        Self { kind, p, field: None, roots: None, ord_alpha, ord_beta, ord_diff }
    }

    pub fn e(&self) -> u32 {
        self.kind.e()
    }

    /// `m = min(ord alpha, ord beta)`.
    pub fn m(&self) -> u32 {
        self.ord_alpha.min(self.ord_beta)
    }

    pub fn alpha(&self) -> Option<PadicElem> {
        self.roots.map(|r| r.0)
    }

    pub fn beta(&self) -> Option<PadicElem> {
        self.roots.map(|r| r.1)
    }

    /// Same data with the two roots exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            roots: self.roots.map(|(a, b)| (b, a)),
            ord_alpha: self.ord_beta,
            ord_beta: self.ord_alpha,
            ..*self
        }
    }
}

/// Root valuations `(low, high)` in `Q_p`-units times two, read off the
/// Newton polygon of `(0, v(c0)), (1, v(c1)), (2, 0)`.
fn newton_half_slopes(f: &IwasawaPoly) -> Result<(u32, u32), PadicError> {
    let a0 = arith::vp(f.c0, f.p).ok_or(PadicError::InsufficientPrecision)?;
    match arith::vp(f.c1, f.p) {
        Some(b1) if 2 * b1 < a0 => Ok((2 * b1, 2 * (a0 - b1))),
        _ => Ok((a0, a0)),
    }
}

/// Determines the splitting field of `f` and the valuations of its roots.
///
/// Ramified iff `v_p(disc)` is odd. For even valuation the unit part of the
/// discriminant decides between split and unramified.
pub fn splitting_type(f: &IwasawaPoly) -> Result<SplittingData, PadicError> {
    let p = f.p;
    let n = f.prec;
    let m = f.modulus();
    let disc = f.discriminant();
    let v = arith::vp(disc, p).ok_or(PadicError::InsufficientPrecision)?;
    let unit = disc / arith::pow(p, v);
    let inv2 = arith::inv(2, m).expect("p is odd");
    let minus_half_c1 = arith::mul(arith::neg(f.c1, m), inv2, m) as i128;

    let (kind, roots) = if v % 2 == 1 {
        let digits = n - v + 1;
        let field = ExtField::ramified(p, digits, unit as i128)?;
        // sqrt(disc) = p^h pi with h = (v - 1) / 2
        let half_root = arith::mul(arith::pow(p, (v - 1) / 2) % m, inv2, m) as i128;
        let prec = field.cap();
        let r1 = PadicElem::from_coords(field, minus_half_c1, -half_root, prec);
        let r2 = PadicElem::from_coords(field, minus_half_c1, half_root, prec);
        (SplitKind::Ramified, (r1, r2))
    } else if arith::legendre(unit as i128, p) == 1 {
        let field = ExtField::base(p, n)?;
        let s = sqrt_unit(unit as i128, p, n - v)?.coords().0;
        let sq = arith::mul(arith::pow(p, v / 2) % m, s, m);
        let half = arith::mul(sq, inv2, m) as i128;
        let prec = n - v / 2;
        let r1 = PadicElem::from_coords(field, minus_half_c1 - half, 0, prec);
        let r2 = PadicElem::from_coords(field, minus_half_c1 + half, 0, prec);
        (SplitKind::Split, (r1, r2))
    } else {
        let field = ExtField::unramified(p, n)?;
        let r = field.t_square();
        let w = arith::mul(unit, arith::inv(r, m).expect("r is a unit"), m);
        let s = sqrt_unit(w as i128, p, n - v)?.coords().0;
        let sq = arith::mul(arith::pow(p, v / 2) % m, s, m);
        let half = arith::mul(sq, inv2, m) as i128;
        let prec = n - v / 2;
        let r1 = PadicElem::from_coords(field, minus_half_c1, -half, prec);
        let r2 = PadicElem::from_coords(field, minus_half_c1, half, prec);
        (SplitKind::Unramified, (r1, r2))
    };

    let e = kind.e();
    let (lo, hi) = newton_half_slopes(f)?;
    if (e * lo) % 2 != 0 || (e * hi) % 2 != 0 {
        return Err(PadicError::InconsistentPolynomial);
    }
    let (ord_lo, ord_hi) = (e * lo / 2, e * hi / 2);
    let ord_diff = if kind == SplitKind::Ramified { v } else { v / 2 };

    // alpha is the root of smaller valuation; ties go to the smaller residue.
    let (r1, r2) = roots;
    let key = |x: &PadicElem| (x.valuation().lower_bound(), x.canonical_key());
    let (alpha, beta) = if key(&r1) <= key(&r2) { (r1, r2) } else { (r2, r1) };
    for (root, expected) in [(alpha, ord_lo), (beta, ord_hi)] {
        if let Valuation::Exact(got) = root.valuation() {
            if got != expected {
                return Err(PadicError::InconsistentPolynomial);
            }
        }
    }
    Ok(SplittingData {
        kind,
        p,
        field: Some(alpha.field()),
        roots: Some((alpha, beta)),
        ord_alpha: ord_lo,
        ord_beta: ord_hi,
        ord_diff,
    })
}

/// Roots `(alpha, beta)` in `Z_p` of a polynomial that splits over `Q_p`.
pub fn hensel_roots(f: &IwasawaPoly) -> Result<(PadicElem, PadicElem), PadicError> {
    let sd = splitting_type(f)?;
    if sd.kind != SplitKind::Split {
        return Err(PadicError::NotSplit(sd.kind));
    }
    sd.roots.ok_or(PadicError::InsufficientPrecision)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(p: u64, n: u32, c1: i128, c0: i128) -> IwasawaPoly {
        IwasawaPoly::new(p, n, c1, c0).unwrap()
    }

    #[test]
    fn sqrt_unit_examples() {
        assert_eq!(sqrt_unit(1, 3, 4).unwrap().coords().0, 1);
        // exhaustive oracle: squares mod 81
        let roots: alloc::vec::Vec<u64> = (0..81u64).filter(|x| x * x % 81 == 7).collect();
        assert_eq!(roots, [13, 68]);
        assert_eq!(sqrt_unit(7, 3, 4).unwrap().coords().0, 13);
        assert_eq!(sqrt_unit(2, 3, 4), Err(PadicError::NoRoot));
        assert_eq!(sqrt_unit(3, 3, 4), Err(PadicError::NotAUnit));
    }

    #[test]
    fn ramified_example_with_equal_slopes() {
        let sd = splitting_type(&poly(3, 5, 90, 189)).unwrap();
        assert_eq!(sd.kind, SplitKind::Ramified);
        assert_eq!((sd.ord_diff, sd.ord_alpha, sd.ord_beta), (3, 3, 3));
        let (a, b) = sd.roots.unwrap();
        assert_eq!((b - a).valuation(), Valuation::Exact(3));
        let f = poly(3, 5, 90, 189);
        assert!(f.eval(&a).is_zero());
        assert!(f.eval(&b).is_zero());
    }

    #[test]
    fn unramified_example() {
        // disc = 81 - 36 = 45 = 9 * 5 and 5 is a non-residue mod 3
        let f = poly(3, 3, 9, 9);
        assert_eq!(f.discriminant(), 45 % 27);
        let sd = splitting_type(&f).unwrap();
        assert_eq!(sd.kind, SplitKind::Unramified);
        assert_eq!((sd.ord_diff, sd.m()), (1, 1));
    }

    #[test]
    fn derived_ramified_row() {
        // 63^2 - 4 * 135 = 3429 = 3^3 * 127
        assert_eq!(63i128 * 63 - 4 * 135, 27 * 127);
        let sd = splitting_type(&poly(3, 5, 63, 135)).unwrap();
        assert_eq!((sd.kind, sd.ord_diff), (SplitKind::Ramified, 3));
    }

    #[test]
    fn split_roots_by_hensel() {
        let (a, b) = hensel_roots(&poly(3, 5, -12, 27)).unwrap();
        assert_eq!((a.coords().0, b.coords().0), (3, 9));
        assert_eq!(a.prec(), 4);
    }

    #[test]
    fn non_split_input_is_rejected() {
        // S^2 - 6S + 9u with u = 2 a non-residue: disc = 36 - 72 = -36
        let f = poly(3, 5, -6, 18);
        assert_eq!(hensel_roots(&f), Err(PadicError::NotSplit(SplitKind::Unramified)));
    }

    #[test]
    fn printed_precision_can_be_insufficient() {
        // both published forms of the d = 42619 polynomial have disc = 0 mod 3^6
        assert_eq!(splitting_type(&poly(3, 6, 186, 630)), Err(PadicError::InsufficientPrecision));
        assert_eq!(splitting_type(&poly(3, 6, 573, 252)), Err(PadicError::InsufficientPrecision));
        assert_eq!(IwasawaPoly::new(3, 5, 1, 3), Err(PadicError::NotDistinguished));
    }

    #[test]
    fn extended_precision_lift_splits() {
        // c0 = 630 + 3^6 is a lift of the printed residue with disc = 3^6 * 40
        let f = poly(3, 8, 186, 630 + 729);
        let (a, b) = hensel_roots(&f).unwrap();
        assert_eq!((b - a).valuation(), Valuation::Exact(3));
        assert_eq!((a.valuation(), b.valuation()), (Valuation::Exact(1), Valuation::Exact(1)));
        assert!(f.eval(&a).is_zero() && f.eval(&b).is_zero());
    }
}
