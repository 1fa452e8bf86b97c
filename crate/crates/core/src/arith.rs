//! Small fixed-width modular arithmetic helpers shared by the sieving and
//! factorization paths. Everything here is exact; u128 intermediates keep
//! 64-bit moduli overflow-free.

/// a*b mod m for m < 2^64.
#[inline]
pub fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// a+b mod m, assuming a, b < m.
#[inline]
pub fn addmod64(a: u64, b: u64, m: u64) -> u64 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

/// a-b mod m, assuming a, b < m.
#[inline]
pub fn submod64(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a.wrapping_sub(b).wrapping_add(m)
    }
}

/// base^exp mod m for m < 2^64.
pub fn powmod64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod64(acc, base, m);
        }
        base = mulmod64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse of a mod m (m need not be prime); None if gcd(a, m) != 1.
pub fn invmod64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    let mut inv = old_s % m as i128;
    if inv < 0 {
        inv += m as i128;
    }
    Some(inv as u64)
}

/// Montgomery context for odd moduli < 2^63. Used by the hot factorization
/// and primality loops where plain u128 division is too slow.
#[derive(Clone, Copy)]
pub struct Montgomery {
    pub n: u64,
    n_neg_inv: u64, // -n^{-1} mod 2^64
    r_mod_n: u64,   // 2^64 mod n
    r2_mod_n: u64,  // 2^128 mod n
}

impl Montgomery {
    pub fn new(n: u64) -> Self {
        debug_assert!(n > 1 && n & 1 == 1);
        // Newton iteration doubles the precision of n^{-1} mod 2^k each step.
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r_mod_n = ((1u128 << 64) % n as u128) as u64;
        let r2_mod_n = mulmod64(r_mod_n, r_mod_n, n);
        Montgomery {
            n,
            n_neg_inv: inv.wrapping_neg(),
            r_mod_n,
            r2_mod_n,
        }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.n_neg_inv);
        let u = (t + m as u128 * self.n as u128) >> 64;
        let u = u as u64;
        if u >= self.n {
            u - self.n
        } else {
            u
        }
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.redc(a as u128 * self.r2_mod_n as u128)
    }

    #[allow(dead_code)] // exercised in tests
    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn one(&self) -> u64 {
        self.r_mod_n
    }

    pub fn pow(&self, base_mont: u64, mut exp: u64) -> u64 {
        let mut acc = self.r_mod_n;
        let mut b = base_mont;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            exp >>= 1;
            if exp > 0 {
                b = self.mul(b, b);
            }
        }
        acc
    }
}

/// Floor of the k-th root of n, exact.
pub fn kth_root_u128(n: u128, k: u32) -> u128 {
    if n == 0 || k == 1 {
        return if k == 1 { n } else { n.min(1) };
    }
    // f64 seed, then fix up; the loop moves at most a couple of steps.
    let mut r = (n as f64).powf(1.0 / k as f64) as u128;
    while r > 0 && checked_pow_u128(r, k).map_or(true, |p| p > n) {
        r -= 1;
    }
    while checked_pow_u128(r + 1, k).map_or(false, |p| p <= n) {
        r += 1;
    }
    r
}

/// r^k if it fits in u128.
pub fn checked_pow_u128(r: u128, k: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(r)?;
    }
    Some(acc)
}

/// True iff n is a perfect k-th power (n >= 1).
pub fn is_perfect_kth_power(n: u128, k: u32) -> bool {
    let r = kth_root_u128(n, k);
    checked_pow_u128(r, k) == Some(n)
}

/// SplitMix64 step: derives independent sub-seeds from a master seed.
/// Per-item seeds keep randomized algorithms schedule-independent.
pub fn split_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powmod_small() {
        assert_eq!(powmod64(2, 10, 1000), 24);
        assert_eq!(powmod64(3, 0, 7), 1);
        assert_eq!(powmod64(5, 1_000_000, 1), 0);
    }

    #[test]
    fn invmod_basic() {
        assert_eq!(invmod64(3, 7), Some(5));
        assert_eq!(invmod64(2, 4), None);
        for a in 1..97u64 {
            let inv = invmod64(a, 97).unwrap();
            assert_eq!(mulmod64(a, inv, 97), 1);
        }
    }

    #[test]
    fn montgomery_matches_naive() {
        for &n in &[3u64, 17, 1_000_003, 0x7fff_ffff_ffff_ffe7] {
            let ctx = Montgomery::new(n);
            for a in [0u64, 1, 2, 12345, n - 1] {
                for b in [0u64, 1, 7, 99999, n - 1] {
                    let am = ctx.to_mont(a % n);
                    let bm = ctx.to_mont(b % n);
                    assert_eq!(ctx.from_mont(ctx.mul(am, bm)), mulmod64(a % n, b % n, n));
                }
            }
            assert_eq!(ctx.from_mont(ctx.pow(ctx.to_mont(2), 100)), powmod64(2, 100, n));
        }
    }

    #[test]
    fn kth_roots_exact() {
        assert_eq!(kth_root_u128(10_650, 2), 103);
        assert_eq!(kth_root_u128(1 << 60, 3), 1 << 20);
        assert!(is_perfect_kth_power(1 << 60, 3));
        assert!(!is_perfect_kth_power((1 << 60) + 1, 3));
        assert!(is_perfect_kth_power(1, 5));
    }
}
