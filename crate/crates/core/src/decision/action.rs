//! Coefficients `A, B` of `S [u Q1 + v L1] = A [s Q1] + B [u Q1 + v L1]`
//! from ideal-class linear forms.

use core::fmt;

use crate::linalg::{self, ResMat};
use crate::padic::arith;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActionCoefficients {
    /// Residue of `A` mod `p^class_order_exponent`.
    pub a: u64,
    pub b: u64,
    pub s: u64,
    pub t: u64,
    pub u: u64,
    pub v: u64,
    /// `n1 + n`: the order of `[s Q1]` is `p^(n1 + n)`.
    pub class_order_exponent: u32,
}

impl ActionCoefficients {
    /// `s | u` and `t | v`.
    pub fn multipliers_consistent(&self) -> bool {
        let div = |x: u64, y: u64| if x == 0 { y == 0 } else { y % x == 0 };
        div(self.s, self.u) && div(self.t, self.v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionError {
    /// The forms of `Q1, L1` do not give a basis of the `p`-part.
    NonInvertibleBasis,
    /// The basis `[s Q1], [u Q1 + v L1]` is not invertible mod `p`.
    DegenerateGenerators,
    /// Both `p`-parts must have the same exponent.
    UnequalExponents { e1: u32, e2: u32 },
    TrivialPart,
    MultiplierMismatch,
}

impl fmt::Display for ActionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionError::NonInvertibleBasis => write!(f, "[Q1], [L1] do not span the p-part"),
            ActionError::DegenerateGenerators => write!(f, "[sQ1], [uQ1+vL1] do not span the p-part"),
            ActionError::UnequalExponents { e1, e2 } => {
                write!(f, "p-parts of the factors have exponents {e1} and {e2}; only equal exponents are supported")
            }
            ActionError::TrivialPart => write!(f, "the p-part of the class group is trivial"),
            ActionError::MultiplierMismatch => write!(f, "need s | u and t | v"),
        }
    }
}

/// Classes of `Q1, L1` and of their `sigma`-conjugates in the coordinates
/// of a fixed basis `[c1], [c2]` with the given factor orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassForms {
    pub factor_orders: [u64; 2],
    pub q: [i128; 2],
    pub l: [i128; 2],
    pub sigma_q: [i128; 2],
    pub sigma_l: [i128; 2],
}

fn p_exponent(order: u64, p: u64) -> u32 {
    arith::vp(order, p).unwrap_or(0)
}

/// `S` on the `p`-part in the basis `[Q1], [L1]`: column `j` holds the
/// coordinates of `S` applied to the `j`-th basis class.
pub fn s_matrix_in_ql_basis(p: u64, forms: &ClassForms) -> Result<(ResMat, u32), ActionError> {
    let e1 = p_exponent(forms.factor_orders[0], p);
    let e2 = p_exponent(forms.factor_orders[1], p);
    if e1 != e2 {
        return Err(ActionError::UnequalExponents { e1, e2 });
    }
    if e1 == 0 {
        return Err(ActionError::TrivialPart);
    }
    let m = arith::pow(p, e1);
    let r = |x: i128| arith::reduce(x, m);
    // x c_i has p-part coordinate x mod p^e_i
    let basis: ResMat = [[r(forms.q[0]), r(forms.l[0])], [r(forms.q[1]), r(forms.l[1])]];
    let inv = linalg::res_inverse(&basis, m).ok_or(ActionError::NonInvertibleBasis)?;
    let images: ResMat = [
        [r(forms.sigma_q[0] - forms.q[0]), r(forms.sigma_l[0] - forms.l[0])],
        [r(forms.sigma_q[1] - forms.q[1]), r(forms.sigma_l[1] - forms.l[1])],
    ];
    Ok((linalg::res_mul(&inv, &images, m), e1))
}

/// `A, B` from the `S`-matrix in the `[Q1], [L1]` basis over `Z/p^e`.
pub fn action_from_ql_matrix(
    p: u64,
    e: u32,
    s_ql: &ResMat,
    (s, t, u, v): (u64, u64, u64, u64),
) -> Result<ActionCoefficients, ActionError> {
    let m = arith::pow(p, e);
    let gens: ResMat = [[s % m, u % m], [0, v % m]];
    let inv = linalg::res_inverse(&gens, m).ok_or(ActionError::DegenerateGenerators)?;
    let image = linalg::res_apply(s_ql, [u % m, v % m], m);
    let [a, b] = linalg::res_apply(&inv, image, m);
    let ac = ActionCoefficients { a, b, s, t, u, v, class_order_exponent: e };
    if !ac.multipliers_consistent() {
        return Err(ActionError::MultiplierMismatch);
    }
    Ok(ac)
}

pub fn derive_action_coefficients(
    p: u64,
    forms: &ClassForms,
    multipliers: (u64, u64, u64, u64),
) -> Result<ActionCoefficients, ActionError> {
    let (s_ql, e) = s_matrix_in_ql_basis(p, forms)?;
    action_from_ql_matrix(p, e, &s_ql, multipliers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn published() -> ClassForms {
        ClassForms {
            factor_orders: [434 * 9, 9],
            q: [3229, 6],
            l: [2580, 7],
            sigma_q: [1327, 3],
            sigma_l: [624, 1],
        }
    }

    #[test]
    fn s_matrix_matches_rational_forms() {
        // S Q = -5574/7123 Q + 1725/7123 L, S L = 1788/7123 Q - 7638/7123 L
        let (s, e) = s_matrix_in_ql_basis(3, &published()).unwrap();
        assert_eq!(e, 2);
        let inv = arith::inv(7123 % 9, 9).unwrap();
        let q = |num: i128| arith::mul(arith::reduce(num, 9), inv, 9);
        assert_eq!(s, [[q(-5574), q(1788)], [q(1725), q(-7638)]]);
    }

    #[test]
    fn published_coefficients() {
        // exact: S[434(Q+L)] = 434(-3786/7123 Q - 5913/7123 L), and 3^4 | 5913
        let inv = arith::inv(7123 % 9, 9).unwrap();
        let q = |num: i128| arith::mul(arith::reduce(num, 9), inv, 9);
        let ac = derive_action_coefficients(3, &published(), (434, 434, 434, 434)).unwrap();
        assert_eq!((ac.a, ac.b), (q(2127), q(-5913)));
        assert_eq!((arith::vp(ac.a, 3), ac.b), (Some(1), 0));
        // with the roles of Q1 and L1 exchanged both valuations are 1
        let f = published();
        let swapped = ClassForms { q: f.l, l: f.q, sigma_q: f.sigma_l, sigma_l: f.sigma_q, ..f };
        let ac = derive_action_coefficients(3, &swapped, (434, 434, 434, 434)).unwrap();
        assert_eq!((ac.a, ac.b), (q(-2127), q(-3786)));
        assert_eq!((arith::vp(ac.a, 3), arith::vp(ac.b, 3)), (Some(1), Some(1)));
    }

    #[test]
    fn identity_action_is_zero() {
        let forms = ClassForms { factor_orders: [9, 9], q: [1, 0], l: [0, 1], sigma_q: [1, 0], sigma_l: [0, 1] };
        let ac = derive_action_coefficients(3, &forms, (1, 1, 1, 1)).unwrap();
        assert_eq!((ac.a, ac.b), (0, 0));
    }

    #[test]
    fn rejects_singular_forms() {
        let forms = ClassForms { factor_orders: [9, 9], q: [1, 1], l: [2, 2], sigma_q: [1, 0], sigma_l: [0, 1] };
        assert_eq!(derive_action_coefficients(3, &forms, (1, 1, 1, 1)), Err(ActionError::NonInvertibleBasis));
        let uneven = ClassForms { factor_orders: [27, 9], ..forms };
        assert!(matches!(
            derive_action_coefficients(3, &uneven, (1, 1, 1, 1)),
            Err(ActionError::UnequalExponents { .. })
        ));
    }
}
