//! Residue arithmetic modulo prime powers.
//!
//! Moduli are kept below `2^62` so that products fit in `u128` and sums of
//! two residues never overflow `u64`.

/// Largest modulus the residue helpers accept.
pub const MAX_MODULUS: u64 = 1 << 62;

/// `p^n`, or `None` when it would exceed [`MAX_MODULUS`].
pub fn checked_pow(p: u64, n: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(p)?;
        if acc > MAX_MODULUS {
            return None;
        }
    }
    Some(acc)
}

/// `p^n`; panics past [`MAX_MODULUS`]. Callers validate precision first.
pub fn pow(p: u64, n: u32) -> u64 {
    checked_pow(p, n).expect("prime power exceeds the supported modulus")
}

#[inline]
pub fn add(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

#[inline]
pub fn neg(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

#[inline]
pub fn mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, m);
        }
        base = mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed integer into `[0, m)`.
pub fn reduce(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Symmetric lift of a residue into `(-m/2, m/2]`.
pub fn lift_signed(x: u64, m: u64) -> i128 {
    if x > m / 2 {
        x as i128 - m as i128
    } else {
        x as i128
    }
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(reduce(old_s, m))
}

/// `v_p(x)` for `x != 0`; `None` for zero.
pub fn vp(x: u64, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let mut v = 0;
    let mut y = x;
    while y % p == 0 {
        y /= p;
        v += 1;
    }
    Some(v)
}

/// `v_p` of a signed integer; `None` for zero.
pub fn vp_i128(x: i128, p: u64) -> Option<u32> {
    if x == 0 {
        return None;
    }
    let p = p as i128;
    let mut v = 0;
    let mut y = x;
    while y % p == 0 {
        y /= p;
        v += 1;
    }
    Some(v)
}

/// Legendre symbol `(a | p)` for an odd prime `p`: 0, 1 or -1.
pub fn legendre(a: i128, p: u64) -> i32 {
    let a = reduce(a, p);
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Trial-division primality test; inputs here are small primes.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest positive quadratic non-residue modulo the odd prime `p`.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&r| legendre(r as i128, p) == -1)
        .expect("an odd prime has a quadratic non-residue")
}

/// `binom(n, k)` as `u128`; only used for small `n`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `v_p(binom(p^n, i))` for `1 <= i <= p^n`, which equals `n - v_p(i)`.
pub fn vp_binomial_prime_power(p: u64, n: u32, i: u64) -> u32 {
    n - vp(i, p).expect("i >= 1")
}

/// `binom(p^n, i) mod m` computed by multiplicative accumulation over `Z`.
pub fn binomial_mod(n: u64, k: u64, m: u64) -> u64 {
    // Pascal rows stay tiny for the degrees used here (p^n <= 81).
    let n = n as usize;
    let k = k as usize;
    let mut row = alloc::vec![0u64; k + 1];
    row[0] = 1 % m;
    for i in 1..=n {
        let upper = i.min(k);
        for j in (1..=upper).rev() {
            row[j] = add(row[j], row[j - 1], m);
        }
    }
    row[k]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_valuation() {
        assert_eq!(inv(7123 % 9, 9), Some(7));
        assert_eq!(inv(3, 9), None);
        assert_eq!(vp(189, 3), Some(3));
        assert_eq!(vp_i128(-7344, 3), Some(3));
        assert_eq!(vp(0, 3), None);
    }

    #[test]
    fn residues_and_symbols() {
        assert_eq!(legendre(7, 3), 1);
        assert_eq!(legendre(2, 3), -1);
        assert_eq!(legendre(-71, 7), -1);
        assert_eq!(smallest_nonresidue(3), 2);
        assert_eq!(smallest_nonresidue(7), 3);
        assert_eq!(lift_signed(68, 81), -13);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(9, 3), 84);
        assert_eq!(binomial_mod(9, 3, 27), 84 % 27);
        for i in 1..=9 {
            assert_eq!(
                vp_i128(binomial(9, i) as i128, 3).unwrap(),
                vp_binomial_prime_power(3, 2, i)
            );
        }
    }
}
