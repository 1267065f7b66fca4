use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use super::arith;
use super::PadicError;

/// Splitting behaviour of the quadratic extension carrying an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Base,
    Unramified,
    Ramified,
}

/// `O_E = Z_p[t]` truncated to `p^digits` in each coordinate.
///
/// * `Base`: `O_E = Z_p`, the second coordinate is always zero.
/// * `Unramified`: `t^2 = r` with `r` the smallest positive non-residue.
/// * `Ramified`: `t = pi_E` with `pi_E^2 = p * u` for a unit `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExtField {
    p: u64,
    kind: FieldKind,
    digits: u32,
    modulus: u64,
    // t^2 as a residue mod p^digits
    t_square: u64,
}

impl ExtField {
    fn check(p: u64, digits: u32) -> Result<u64, PadicError> {
        if p == 2 || !arith::is_prime(p) {
            return Err(PadicError::NotOddPrime(p));
        }
        if digits == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        arith::checked_pow(p, digits).ok_or(PadicError::PrecisionTooLarge { p, digits })
    }

    pub fn base(p: u64, digits: u32) -> Result<Self, PadicError> {
        let modulus = Self::check(p, digits)?;
        Ok(Self { p, kind: FieldKind::Base, digits, modulus, t_square: 0 })
    }

    pub fn unramified(p: u64, digits: u32) -> Result<Self, PadicError> {
        let modulus = Self::check(p, digits)?;
        let r = arith::smallest_nonresidue(p);
        Ok(Self { p, kind: FieldKind::Unramified, digits, modulus, t_square: r % modulus })
    }

    /// Ramified extension with uniformizer `pi_E^2 = p * unit`.
    pub fn ramified(p: u64, digits: u32, unit: i128) -> Result<Self, PadicError> {
        let modulus = Self::check(p, digits)?;
        let u = arith::reduce(unit, modulus);
        if u % p == 0 {
            return Err(PadicError::NotAUnit);
        }
        Ok(Self {
            p,
            kind: FieldKind::Ramified,
            digits,
            modulus,
            t_square: arith::mul(p % modulus, u, modulus),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Coordinate precision: residues are stored modulo `p^digits`.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Ramification index `e` of `E / Q_p`.
    pub fn e(&self) -> u32 {
        match self.kind {
            FieldKind::Ramified => 2,
            _ => 1,
        }
    }

    /// Highest `ord_E` precision an element of this field can carry.
    pub fn cap(&self) -> u32 {
        self.e() * self.digits
    }

    /// `t^2` as a residue; `r` for unramified, `p u` for ramified fields.
    pub fn t_square(&self) -> u64 {
        self.t_square
    }

    /// Same field with coordinates truncated to fewer digits.
    pub fn truncated(&self, digits: u32) -> Self {
        let digits = digits.min(self.digits).max(1);
        let modulus = arith::pow(self.p, digits);
        Self { digits, modulus, t_square: self.t_square % modulus, ..*self }
    }

    pub fn zero(&self) -> PadicElem {
        PadicElem::from_coords(*self, 0, 0, self.cap())
    }

    pub fn one(&self) -> PadicElem {
        PadicElem::from_coords(*self, 1, 0, self.cap())
    }

    /// The chosen uniformizer: `p` unless the field is ramified.
    pub fn uniformizer(&self) -> PadicElem {
        match self.kind {
            FieldKind::Ramified => PadicElem::from_coords(*self, 0, 1, self.cap()),
            _ => PadicElem::from_coords(*self, self.p as i128, 0, self.cap()),
        }
    }

    pub fn int(&self, x: i128) -> PadicElem {
        PadicElem::from_coords(*self, x, 0, self.cap())
    }

    /// All residues of `O_E / pi_E^prec`, in lexicographic coordinate order.
    pub fn enumerate(&self, prec: u32) -> alloc::vec::Vec<PadicElem> {
        let prec = prec.min(self.cap());
        let (da, db) = coord_digits(self.kind, prec);
        let ma = arith::pow(self.p, da);
        let mb = arith::pow(self.p, db);
        let mut out = alloc::vec::Vec::with_capacity((ma * mb) as usize);
        for b in 0..mb {
            for a in 0..ma {
                out.push(PadicElem::from_coords(*self, a as i128, b as i128, prec));
            }
        }
        out
    }
}

/// Valuation of a precision-tracked element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(u32),
    /// Every known digit is zero; the valuation is at least this value.
    Indeterminate(u32),
}

impl Valuation {
    pub fn exact(self) -> Option<u32> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::Indeterminate(_) => None,
        }
    }

    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Exact(v) | Valuation::Indeterminate(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::Indeterminate(v) => write!(f, ">={v}"),
        }
    }
}

/// Number of base-`p` digits of each coordinate that are meaningful at
/// `ord_E`-precision `prec`.
fn coord_digits(kind: FieldKind, prec: u32) -> (u32, u32) {
    match kind {
        FieldKind::Base => (prec, 0),
        FieldKind::Unramified => (prec, prec),
        FieldKind::Ramified => (prec.div_ceil(2), prec / 2),
    }
}

/// An element `a + b t` of `O_E`, known modulo `pi_E^prec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicElem {
    field: ExtField,
    a: u64,
    b: u64,
    prec: u32,
}

impl PadicElem {
    pub fn from_coords(field: ExtField, a: i128, b: i128, prec: u32) -> Self {
        let m = field.modulus;
        let b = if field.kind == FieldKind::Base { 0 } else { arith::reduce(b, m) };
        Self { field, a: arith::reduce(a, m), b, prec: prec.min(field.cap()) }.normalized()
    }

    fn normalized(mut self) -> Self {
        let (da, db) = coord_digits(self.field.kind, self.prec);
        self.a %= arith::pow(self.field.p, da.min(self.field.digits));
        self.b %= arith::pow(self.field.p, db.min(self.field.digits));
        self
    }

    pub fn field(&self) -> ExtField {
        self.field
    }

    /// Precision in `ord_E` units: the element is known modulo `pi_E^prec`.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Canonical coordinates `(a, b)` with `0 <= a, b < p^digits`.
    pub fn coords(&self) -> (u64, u64) {
        (self.a, self.b)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self { prec: prec.min(self.prec), ..*self }.normalized()
    }

    pub fn valuation(&self) -> Valuation {
        let p = self.field.p;
        let va = arith::vp(self.a, p);
        let vb = arith::vp(self.b, p);
        let v = match self.field.kind {
            FieldKind::Base => va,
            FieldKind::Unramified => match (va, vb) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            FieldKind::Ramified => match (va.map(|x| 2 * x), vb.map(|y| 2 * y + 1)) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
        };
        match v {
            Some(v) if v < self.prec => Valuation::Exact(v),
            _ => Valuation::Indeterminate(self.prec),
        }
    }

    /// True when every known digit is zero.
    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Exact(0)
    }

    /// Congruence at the common precision of both operands.
    pub fn congruent(&self, other: &Self) -> bool {
        (*self - *other).is_zero()
    }

    fn same_field(&self, other: &Self) {
        assert_eq!(self.field, other.field, "operands live in different fields");
    }

    /// Inverse of a unit.
    pub fn inverse(&self) -> Result<Self, PadicError> {
        if !self.is_unit() {
            return Err(PadicError::NotAUnit);
        }
        let m = self.field.modulus;
        let (a, b) = (self.a, self.b);
        let norm = match self.field.kind {
            FieldKind::Base => a,
            _ => arith::sub(arith::mul(a, a, m), arith::mul(self.field.t_square, arith::mul(b, b, m), m), m),
        };
        let ninv = arith::inv(norm, m).ok_or(PadicError::NotAUnit)?;
        let (ra, rb) = match self.field.kind {
            FieldKind::Base => (ninv, 0),
            _ => (arith::mul(a, ninv, m), arith::mul(arith::neg(b, m), ninv, m)),
        };
        Ok(Self { field: self.field, a: ra, b: rb, prec: self.prec }.normalized())
    }

    /// Multiplication by `pi_E`.
    pub fn mul_pi(&self) -> Self {
        let f = self.field;
        let m = f.modulus;
        let out = match f.kind {
            FieldKind::Ramified => Self { field: f, a: arith::mul(f.t_square, self.b, m), b: self.a, prec: self.prec + 1 },
            _ => Self {
                field: f,
                a: arith::mul(self.a, f.p % m, m),
                b: arith::mul(self.b, f.p % m, m),
                prec: self.prec + 1,
            },
        };
        Self { prec: out.prec.min(f.cap()), ..out }.normalized()
    }

    /// Exact division by `pi_E`; requires `ord_E(self) >= 1`.
    pub fn div_pi(&self) -> Result<Self, PadicError> {
        if self.valuation().lower_bound() < 1 {
            return Err(PadicError::NotDivisible);
        }
        if self.prec == 0 {
            return Err(PadicError::InsufficientPrecision);
        }
        let f = self.field;
        let p = f.p;
        let m = f.modulus;
        let out = match f.kind {
            FieldKind::Ramified => {
                // (a + b pi) / pi = b + (a / p) u^{-1} pi, since pi^2 = p u
                let u = f.t_square / p; // t_square = p u, u known mod p^{digits-1}
                let mu = m / p;
                let uinv = if mu == 1 { 0 } else { arith::inv(u % mu, mu).ok_or(PadicError::NotAUnit)? };
                let a_over_p = self.a / p;
                let nb = if mu == 1 { 0 } else { arith::mul(a_over_p % mu, uinv, mu) };
                Self { field: f, a: self.b, b: nb, prec: self.prec - 1 }
            }
            _ => Self { field: f, a: self.a / p, b: self.b / p, prec: self.prec - 1 },
        };
        Ok(out.normalized())
    }

    pub fn div_pi_pow(&self, k: u32) -> Result<Self, PadicError> {
        let mut x = *self;
        for _ in 0..k {
            x = x.div_pi()?;
        }
        Ok(x)
    }

    pub fn mul_pi_pow(&self, k: u32) -> Self {
        let mut x = *self;
        for _ in 0..k {
            x = x.mul_pi();
        }
        x
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = *self;
        let mut acc = self.field.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    /// Conjugate `a - b t` under the non-trivial automorphism of `E / Q_p`.
    pub fn conjugate(&self) -> Self {
        Self { b: arith::neg(self.b, self.field.modulus), ..*self }.normalized()
    }

    /// Base-field residue when the `t`-coordinate vanishes.
    pub fn as_base(&self) -> Option<u64> {
        (self.b == 0).then_some(self.a)
    }

    /// Ordering key used for deterministic tie-breaks between roots.
    pub fn canonical_key(&self) -> (u64, u64) {
        (self.a, self.b)
    }
}

impl Add for PadicElem {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.same_field(&rhs);
        let m = self.field.modulus;
        Self {
            field: self.field,
            a: arith::add(self.a, rhs.a, m),
            b: arith::add(self.b, rhs.b, m),
            prec: self.prec.min(rhs.prec),
        }
        .normalized()
    }
}

impl Sub for PadicElem {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PadicElem {
    type Output = Self;
    fn neg(self) -> Self {
        let m = self.field.modulus;
        Self { a: arith::neg(self.a, m), b: arith::neg(self.b, m), ..self }.normalized()
    }
}

impl Mul for PadicElem {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.same_field(&rhs);
        let f = self.field;
        let m = f.modulus;
        let (a1, b1, a2, b2) = (self.a, self.b, rhs.a, rhs.b);
        let a = arith::add(arith::mul(a1, a2, m), arith::mul(f.t_square, arith::mul(b1, b2, m), m), m);
        let b = arith::add(arith::mul(a1, b2, m), arith::mul(a2, b1, m), m);
        let v1 = self.valuation().lower_bound();
        let v2 = rhs.valuation().lower_bound();
        let prec = (self.prec + v2).min(rhs.prec + v1).min(f.cap());
        Self { field: f, a, b, prec }.normalized()
    }
}

impl fmt::Display for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.field.p;
        let (da, db) = coord_digits(self.field.kind, self.prec);
        let digits = |mut x: u64, n: u32, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if n == 0 {
                return write!(f, "0");
            }
            for _ in 0..n {
                write!(f, "{}", x % p)?;
                x /= p;
            }
            Ok(())
        };
        match self.field.kind {
            FieldKind::Base => {
                digits(self.a, da, f)?;
                write!(f, "+O({p}^{})", self.prec)
            }
            kind => {
                digits(self.a, da, f)?;
                write!(f, " + (")?;
                digits(self.b, db, f)?;
                let (sym, unif) = if kind == FieldKind::Ramified { ("pi", "pi") } else { ("t", "p") };
                if kind == FieldKind::Ramified {
                    write!(f, ")*{sym}+O({unif}^{})", self.prec)
                } else {
                    write!(f, ")*{sym}+O({p}^{})", self.prec)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn base_valuations() {
        let z3 = ExtField::base(3, 5).unwrap();
        assert_eq!(z3.int(189).valuation(), Valuation::Exact(3));
        assert_eq!(z3.int(0).valuation(), Valuation::Indeterminate(5));
        assert_eq!(z3.int(243).valuation(), Valuation::Indeterminate(5));
    }

    #[test]
    fn ramified_valuation_of_integer() {
        // 7344 = 2^4 3^3 17, so ord_E = 2 * 3 in a ramified extension.
        let e = ExtField::ramified(3, 5, 17).unwrap();
        assert_eq!(e.int(7344).valuation(), Valuation::Exact(6));
        assert_eq!(e.uniformizer().valuation(), Valuation::Exact(1));
        let pi2 = e.uniformizer() * e.uniformizer();
        assert!(pi2.congruent(&e.int(3 * 17)));
    }

    #[test]
    fn unramified_inverse() {
        let e = ExtField::unramified(3, 4).unwrap();
        let x = PadicElem::from_coords(e, 2, 5, e.cap());
        let y = x.inverse().unwrap();
        assert!((x * y).congruent(&e.one()));
        assert_eq!(e.int(3).inverse(), Err(PadicError::NotAUnit));
    }

    #[test]
    fn pi_division_round_trip() {
        for field in [ExtField::ramified(3, 6, 5).unwrap(), ExtField::unramified(5, 4).unwrap()] {
            let x = PadicElem::from_coords(field, 7, 4, field.cap());
            let y = x.mul_pi_pow(3);
            assert_eq!(y.valuation(), Valuation::Exact(3));
            let back = y.div_pi_pow(3).unwrap();
            assert!(back.congruent(&x));
            assert!(x.div_pi().is_err());
        }
    }

    #[test]
    fn display_digits_least_significant_first() {
        let z3 = ExtField::base(3, 5).unwrap();
        assert_eq!(z3.int(189).to_string(), "00012+O(3^5)");
    }
}
