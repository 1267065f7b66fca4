//! Small matrices over `O_E` and over residue rings `Z/p^L`.

use core::ops::Mul;

use crate::padic::{arith, ExtField, PadicElem, PadicError, Valuation};

/// A 2x2 matrix over a truncated `O_E`, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub m: [[PadicElem; 2]; 2],
}

impl Mat2 {
    pub fn new(a: PadicElem, b: PadicElem, c: PadicElem, d: PadicElem) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn identity(field: ExtField) -> Self {
        Self::new(field.one(), field.zero(), field.zero(), field.one())
    }

    pub fn det(&self) -> PadicElem {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Inverse when the determinant is a unit.
    pub fn inverse(&self) -> Result<Self, PadicError> {
        let dinv = self.det().inverse()?;
        let [[a, b], [c, d]] = self.m;
        Ok(Self::new(d * dinv, -b * dinv, -c * dinv, a * dinv))
    }

    pub fn congruent(&self, other: &Self) -> bool {
        (0..2).all(|i| (0..2).all(|j| self.m[i][j].congruent(&other.m[i][j])))
    }

    pub fn min_precision(&self) -> u32 {
        self.m.iter().flatten().map(|x| x.prec()).min().unwrap_or(0)
    }
}

impl Mul for Mat2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let e = |i: usize, j: usize| self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
        Self::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

/// Elementary divisor valuations `(d1, d2)` of a 2x2 matrix over `O_E`,
/// `d1 <= d2`, or `None` when a needed valuation is indeterminate.
pub fn smith2_valuations(m: &Mat2) -> Option<(u32, u32)> {
    let d1 = m
        .m
        .iter()
        .flatten()
        .filter_map(|x| x.valuation().exact())
        .min()?;
    // every entry must be determinate or provably above d1
    if m.m.iter().flatten().any(|x| matches!(x.valuation(), Valuation::Indeterminate(v) if v < d1)) {
        return None;
    }
    let dv = m.det().valuation().exact()?;
    Some((d1, dv - d1))
}

/// 2x2 integer matrix modulo `p^L`, row-major.
pub type ResMat = [[u64; 2]; 2];

pub fn res_mul(a: &ResMat, b: &ResMat, m: u64) -> ResMat {
    let mut out = [[0u64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = arith::add(arith::mul(a[i][0], b[0][j], m), arith::mul(a[i][1], b[1][j], m), m);
        }
    }
    out
}

pub fn res_det(a: &ResMat, m: u64) -> u64 {
    arith::sub(arith::mul(a[0][0], a[1][1], m), arith::mul(a[0][1], a[1][0], m), m)
}

pub fn res_inverse(a: &ResMat, m: u64) -> Option<ResMat> {
    let dinv = arith::inv(res_det(a, m), m)?;
    Some([
        [arith::mul(a[1][1], dinv, m), arith::mul(arith::neg(a[0][1], m), dinv, m)],
        [arith::mul(arith::neg(a[1][0], m), dinv, m), arith::mul(a[0][0], dinv, m)],
    ])
}

pub fn res_apply(a: &ResMat, v: [u64; 2], m: u64) -> [u64; 2] {
    [
        arith::add(arith::mul(a[0][0], v[0], m), arith::mul(a[0][1], v[1], m), m),
        arith::add(arith::mul(a[1][0], v[0], m), arith::mul(a[1][1], v[1], m), m),
    ]
}

/// Smith form of a 2x2 matrix over `Z/p^L`: `U * a * V = diag(p^e1, p^e2)`
/// with `e1 <= e2` (an exponent of `L` stands for a zero entry).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Smith2 {
    pub u: ResMat,
    pub v: ResMat,
    pub exps: [u32; 2],
}

pub fn smith2_mod(a: &ResMat, p: u64, l: u32) -> Smith2 {
    let m = arith::pow(p, l);
    let val = |x: u64| arith::vp(x, p).unwrap_or(l);
    let mut w = *a;
    let mut u: ResMat = [[1, 0], [0, 1]];
    let mut v: ResMat = [[1, 0], [0, 1]];
    // move an entry of minimal valuation to (0, 0)
    let mut best = (0, 0);
    for i in 0..2 {
        for j in 0..2 {
            if val(w[i][j]) < val(w[best.0][best.1]) {
                best = (i, j);
            }
        }
    }
    if best.0 == 1 {
        w.swap(0, 1);
        u.swap(0, 1);
    }
    if best.1 == 1 {
        for row in w.iter_mut().chain(v.iter_mut()) {
            row.swap(0, 1);
        }
    }
    let e1 = val(w[0][0]);
    if e1 >= l {
        return Smith2 { u, v, exps: [l, l] };
    }
    // w00 = p^e1 * unit; scale row 0 so that w00 = p^e1
    let unit = w[0][0] / arith::pow(p, e1);
    let uinv = arith::inv(unit % m, m).expect("unit part");
    for j in 0..2 {
        w[0][j] = arith::mul(w[0][j], uinv, m);
        u[0][j] = arith::mul(u[0][j], uinv, m);
    }
    // clear (1, 0) with a row operation and (0, 1) with a column operation
    let f = w[1][0] / arith::pow(p, e1);
    for j in 0..2 {
        w[1][j] = arith::sub(w[1][j], arith::mul(f, w[0][j], m), m);
        u[1][j] = arith::sub(u[1][j], arith::mul(f, u[0][j], m), m);
    }
    let g = w[0][1] / arith::pow(p, e1);
    for row in w.iter_mut() {
        row[1] = arith::sub(row[1], arith::mul(g, row[0], m), m);
    }
    for row in v.iter_mut() {
        row[1] = arith::sub(row[1], arith::mul(g, row[0], m), m);
    }
    let e2 = val(w[1][1]);
    if e2 < l {
        let unit = w[1][1] / arith::pow(p, e2);
        let uinv = arith::inv(unit % m, m).expect("unit part");
        for j in 0..2 {
            u[1][j] = arith::mul(u[1][j], uinv, m);
        }
    }
    Smith2 { u, v, exps: [e1, e2] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_form_recovers_diagonal() {
        let (p, l) = (3, 5);
        let m = arith::pow(p, l);
        for a in [[[6, 9], [3, 12]], [[0, 27], [9, 0]], [[2, 1], [1, 5]], [[0, 0], [0, 0]]] {
            let s = smith2_mod(&a, p, l);
            let d = res_mul(&res_mul(&s.u, &a, m), &s.v, m);
            assert!(s.exps[0] <= s.exps[1]);
            let expect = |e: u32| if e >= l { 0 } else { arith::pow(p, e) };
            assert_eq!(d, [[expect(s.exps[0]), 0], [0, expect(s.exps[1])]], "{a:?}");
            assert!(res_inverse(&s.u, m).is_some() && res_inverse(&s.v, m).is_some());
        }
        // det 6*12 - 27 = 45 = 3^2 * 5 and gcd of entries 3
        assert_eq!(smith2_mod(&[[6, 9], [3, 12]], 3, 5).exps, [1, 1]);
    }

    #[test]
    fn padic_inverse_and_smith() {
        let f = ExtField::base(3, 5).unwrap();
        let a = Mat2::new(f.int(2), f.int(3), f.int(9), f.int(1));
        let prod = a * a.inverse().unwrap();
        assert!(prod.congruent(&Mat2::identity(f)));
        let f = ExtField::base(3, 6).unwrap();
        assert_eq!(smith2_valuations(&Mat2::new(f.int(9), f.int(0), f.int(3), f.int(27))), Some((1, 4)));
    }
}
