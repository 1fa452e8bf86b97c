//! Dense polynomial arithmetic over Z/p for word-sized primes.
//!
//! Backs two consumers: root extraction mod p (via gcd with x^p - x and
//! Cantor–Zassenhaus degree-one splitting) and distinct-degree factorization
//! patterns for irreducibility certificates. Coefficients live in [0, p) and
//! all products go through u128.

use crate::arith::{addmod64, invmod64, mulmod64, split_seed, submod64};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

/// Polynomial over Z/p, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    pub coeffs: Vec<u64>,
    pub p: u64,
}

fn trim(coeffs: &mut Vec<u64>) {
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
}

impl ModPoly {
    pub fn new(mut coeffs: Vec<u64>, p: u64) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        trim(&mut coeffs);
        ModPoly { coeffs, p }
    }

    pub fn zero(p: u64) -> Self {
        ModPoly { coeffs: vec![], p }
    }

    pub fn one(p: u64) -> Self {
        ModPoly { coeffs: vec![1 % p], p }
    }

    /// x as an element of Z/p[x].
    pub fn x(p: u64) -> Self {
        ModPoly::new(vec![0, 1], p)
    }

    /// Reduce an integer polynomial (ascending BigInt coefficients) mod p.
    pub fn from_bigint_coeffs(coeffs: &[BigInt], p: u64) -> Self {
        let pb = BigInt::from(p);
        let reduced = coeffs
            .iter()
            .map(|c| {
                let mut r = c % &pb;
                if r.is_negative() {
                    r += &pb;
                }
                r.to_u64().expect("residue fits u64")
            })
            .collect();
        ModPoly::new(reduced, p)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = addmod64(mulmod64(acc, x, self.p), c, self.p);
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return ModPoly::zero(p);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = addmod64(out[i + j], mulmod64(a, b, p), p);
            }
        }
        trim(&mut out);
        ModPoly { coeffs: out, p }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u64; n];
        for i in 0..n {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            out[i] = submod64(a, b, p);
        }
        trim(&mut out);
        ModPoly { coeffs: out, p }
    }

    /// Remainder of self divided by divisor (divisor nonzero).
    pub fn rem(&self, divisor: &Self) -> Self {
        let p = self.p;
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.coeffs.len() < divisor.coeffs.len() {
            return self.clone();
        }
        let lead_inv = invmod64(*divisor.coeffs.last().unwrap(), p)
            .expect("leading coefficient invertible mod prime");
        let mut rem = self.coeffs.clone();
        let dd = divisor.coeffs.len() - 1;
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let q = mulmod64(c, lead_inv, p);
            for (j, &dcoef) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = submod64(rem[idx], mulmod64(q, dcoef, p), p);
            }
        }
        rem.truncate(dd);
        trim(&mut rem);
        ModPoly { coeffs: rem, p }
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic();
        a
    }

    pub fn make_monic(&mut self) {
        if let Some(&lc) = self.coeffs.last() {
            if lc != 1 {
                let inv = invmod64(lc, self.p).expect("prime modulus");
                for c in self.coeffs.iter_mut() {
                    *c = mulmod64(*c, inv, self.p);
                }
            }
        }
    }

    /// self^exp mod (modulus, p) where exp is given as big-endian bits.
    fn powmod_bits(&self, bits: impl Iterator<Item = bool>, modulus: &Self) -> Self {
        let mut acc = ModPoly::one(self.p);
        let base = self.rem(modulus);
        for bit in bits {
            acc = acc.mul(&acc).rem(modulus);
            if bit {
                acc = acc.mul(&base).rem(modulus);
            }
        }
        acc
    }

    pub fn powmod_u64(&self, exp: u64, modulus: &Self) -> Self {
        if exp == 0 {
            return ModPoly::one(self.p);
        }
        let nbits = 64 - exp.leading_zeros();
        self.powmod_bits((0..nbits).rev().map(|i| (exp >> i) & 1 == 1), modulus)
    }
}

/// All roots of f mod p, ascending. `enum_threshold` picks between direct
/// residue enumeration (p <= threshold) and gcd(x^p - x, f) extraction.
/// `seed` drives the Cantor–Zassenhaus splitting deterministically.
pub fn roots_mod_prime(f: &ModPoly, enum_threshold: u64, seed: u64) -> Vec<u64> {
    let p = f.p;
    if f.is_zero() {
        // Zero polynomial: every residue is a root.
        return (0..p).collect();
    }
    if f.degree() == 0 {
        return vec![];
    }
    if p <= enum_threshold {
        return (0..p).filter(|&x| f.eval(x) == 0).collect();
    }
    // Root part: gcd(x^p - x, f).
    let xp = ModPoly::x(p).powmod_u64(p, f);
    let xp_minus_x = xp.sub(&ModPoly::x(p).rem(f));
    let mut g = f.gcd(&xp_minus_x);
    if g.degree() == 0 {
        return vec![];
    }
    // Strip a root at zero first so the splitting works on invertible roots.
    let mut roots = Vec::new();
    if g.coeffs[0] == 0 {
        roots.push(0);
        let shifted: Vec<u64> = g.coeffs[1..].to_vec();
        g = ModPoly::new(shifted, p);
    }
    split_linear(&g, seed, &mut roots);
    roots.sort_unstable();
    roots
}

/// Equal-degree splitting for a monic product of distinct linear factors
/// with nonzero roots, odd p.
fn split_linear(g: &ModPoly, seed: u64, out: &mut Vec<u64>) {
    let p = g.p;
    match g.degree() {
        0 => {}
        1 => {
            // x + c -> root -c
            let c = g.coeffs[0];
            let lc = *g.coeffs.last().unwrap();
            let inv = invmod64(lc, p).unwrap();
            out.push(submod64(0, mulmod64(c, inv, p), p));
        }
        _ => {
            let mut salt = 0u64;
            loop {
                let a = split_seed(seed, salt) % p;
                salt += 1;
                // gcd(g, (x+a)^{(p-1)/2} - 1) splits the roots by the
                // quadratic character of root+a.
                let shifted = ModPoly::new(vec![a, 1], p);
                let pw = shifted.powmod_u64((p - 1) / 2, g);
                let pw_minus_1 = pw.sub(&ModPoly::one(p));
                let h = g.gcd(&pw_minus_1);
                if h.degree() > 0 && h.degree() < g.degree() {
                    let mut q = g.clone();
                    // q = g / h by repeated remainder-free division.
                    q = poly_div_exact(&q, &h);
                    split_linear(&h, split_seed(seed, salt), out);
                    split_linear(&q, split_seed(seed, salt + 1), out);
                    return;
                }
            }
        }
    }
}

/// Exact quotient a / b (b | a), both over Z/p.
fn poly_div_exact(a: &ModPoly, b: &ModPoly) -> ModPoly {
    let p = a.p;
    let lead_inv = invmod64(*b.coeffs.last().unwrap(), p).unwrap();
    let mut rem = a.coeffs.clone();
    let dd = b.coeffs.len() - 1;
    let mut quot = vec![0u64; rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        let q = mulmod64(c, lead_inv, p);
        quot[i - dd] = q;
        for (j, &bc) in b.coeffs.iter().enumerate() {
            let idx = i - dd + j;
            rem[idx] = submod64(rem[idx], mulmod64(q, bc, p), p);
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "non-exact division");
    ModPoly::new(quot, p)
}

/// Distinct-degree factorization pattern of a squarefree f mod p:
/// returns the multiset of irreducible factor degrees (e.g. x^4+1 mod 3
/// gives [2, 2]). Assumes gcd(f, f') = 1 mod p.
pub fn factor_degree_pattern(f: &ModPoly) -> Vec<usize> {
    let p = f.p;
    let mut work = f.clone();
    work.make_monic();
    let mut pattern = Vec::new();
    let mut h = ModPoly::x(p); // x^{p^i} mod work, starting at i=0
    let mut i = 0usize;
    while work.degree() >= 1 {
        i += 1;
        if 2 * i > work.degree() {
            // Whatever is left is a single irreducible factor.
            pattern.push(work.degree());
            break;
        }
        h = h.powmod_u64(p, &work);
        let g = work.gcd(&h.sub(&ModPoly::x(p).rem(&work)));
        if g.degree() > 0 {
            debug_assert_eq!(g.degree() % i, 0);
            for _ in 0..g.degree() / i {
                pattern.push(i);
            }
            work = poly_div_exact(&work, &g);
            h = h.rem(&work);
        }
    }
    pattern.sort_unstable();
    pattern
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[i64], p: u64) -> ModPoly {
        ModPoly::new(
            coeffs
                .iter()
                .map(|&c| c.rem_euclid(p as i64) as u64)
                .collect(),
            p,
        )
    }

    #[test]
    fn rem_and_gcd() {
        let p = 7;
        // (x^2 - 1) and (x - 1) share the factor x - 1.
        let a = poly(&[-1, 0, 1], p);
        let b = poly(&[-1, 1], p);
        let g = a.gcd(&b);
        assert_eq!(g, poly(&[-1, 1], p));
    }

    #[test]
    fn roots_by_enumeration_and_gcd_agree() {
        // f = x^3 + 2 over a selection of primes, both strategies.
        for &p in &[5u64, 7, 11, 31, 101, 1009, 100_003, 1_000_003] {
            let f = poly(&[2, 0, 0, 1], p);
            let mut by_enum: Vec<u64> = (0..p.min(2_000_000)).filter(|&x| f.eval(x) == 0).collect();
            by_enum.sort_unstable();
            let by_gcd = roots_mod_prime(&f, 2, 12345);
            assert_eq!(by_enum, by_gcd, "p = {p}");
        }
    }

    #[test]
    fn roots_with_zero_root() {
        // f = x^3 - x has roots 0, 1, p-1 mod any odd prime.
        for &p in &[1_000_003u64, 999_983] {
            let f = poly(&[0, -1, 0, 1], p);
            let r = roots_mod_prime(&f, 2, 7);
            assert_eq!(r, vec![0, 1, p - 1]);
        }
    }

    #[test]
    fn degree_pattern_x4_plus_1() {
        // x^4+1 factors as two quadratics mod 3 and splits mod 17.
        let f3 = poly(&[1, 0, 0, 0, 1], 3);
        assert_eq!(factor_degree_pattern(&f3), vec![2, 2]);
        let f17 = poly(&[1, 0, 0, 0, 1], 17);
        assert_eq!(factor_degree_pattern(&f17), vec![1, 1, 1, 1]);
    }

    #[test]
    fn degree_pattern_irreducible_cubic() {
        // x^3 + 2 is irreducible mod 7 (no roots, degree 3).
        let f = poly(&[2, 0, 0, 1], 7);
        assert_eq!(factor_degree_pattern(&f), vec![3]);
    }
}
