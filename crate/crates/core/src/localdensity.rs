//! Local solution counting: roots of f modulo primes and prime powers
//! (Hensel lifting with explicit branching at singular roots), the local
//! densities ρ(m) and ρ′(m), fixed power divisor detection, and the Euler
//! products c_f and c′_f with certified tail intervals.

use crate::arith::split_seed;
use crate::modpoly;
use crate::poly::{IntPolynomial, PolyError};
use crate::sievecount::{self, SieveError};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

/// Residue enumeration is used for primes up to this bound; above it root
/// extraction goes through gcd(x^p - x, f) in the residue ring.
pub const ENUM_THRESHOLD: u64 = 100_000;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error(transparent)]
    Factorization(#[from] SieveError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("degree {degree} too small (need >= {required})")]
    DegreeTooSmall { degree: usize, required: usize },
    #[error("prime limit {0} must be >= 2")]
    PrimeLimitTooSmall(u64),
    #[error("f has the fixed power divisor {prime}; the density constant is 0")]
    FixedDivisorPresent {
        prime: u64,
        estimate: Box<DensityEstimate>,
    },
}

/// The solutions of f ≡ 0 (mod m): residues in [0, m), sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    pub modulus: BigUint,
    pub roots: Vec<BigUint>,
}

impl RootSet {
    /// ρ(m): the number of solutions.
    pub fn rho(&self) -> usize {
        self.roots.len()
    }

    /// ρ′(m): solutions coprime to the modulus.
    pub fn rho_prime(&self) -> usize {
        self.roots
            .iter()
            .filter(|r| r.gcd(&self.modulus).is_one())
            .count()
    }
}

/// Exact root set of f modulo a prime p.
pub fn roots_mod_prime(f: &IntPolynomial, p: &BigUint) -> Result<RootSet, DensityError> {
    if !sievecount::is_prime(p) {
        return Err(DensityError::NotPrime(p.clone()));
    }
    Ok(roots_mod_prime_unchecked(f, p, ENUM_THRESHOLD))
}

/// Root set of f mod p without re-verifying primality; `enum_threshold`
/// selects enumeration vs gcd extraction for word-sized p.
pub(crate) fn roots_mod_prime_unchecked(
    f: &IntPolynomial,
    p: &BigUint,
    enum_threshold: u64,
) -> RootSet {
    let seed = split_seed(0x524f_4f54, p.to_u64_digits().first().copied().unwrap_or(1));
    let roots = if let Some(p64) = p.to_u64() {
        modpoly::roots_mod_prime(&f.to_mod(p64), enum_threshold, seed)
            .into_iter()
            .map(BigUint::from)
            .collect()
    } else {
        bigmod::roots_mod_prime_big(f, p, seed)
    };
    RootSet {
        modulus: p.clone(),
        roots,
    }
}

/// Number of roots of f mod p (word-sized prime), skipping root extraction:
/// deg gcd(x^p - x, f) counts without splitting.
pub(crate) fn root_count_mod_prime_u64(f: &IntPolynomial, p: u64, enum_threshold: u64) -> u64 {
    let fm = f.to_mod(p);
    if fm.is_zero() {
        return p;
    }
    if fm.degree() == 0 {
        return 0;
    }
    if p <= enum_threshold {
        return (0..p).filter(|&x| fm.eval(x) == 0).count() as u64;
    }
    // x^p - x is squarefree, so the gcd degree is the distinct root count.
    let xp = modpoly::ModPoly::x(p).powmod_u64(p, &fm);
    let xp_minus_x = xp.sub(&modpoly::ModPoly::x(p).rem(&fm));
    fm.gcd(&xp_minus_x).degree() as u64
}

/// Exact root set of f modulo p^k, computed level by level.
///
/// A root r mod p^j with f'(r) ≢ 0 (mod p) lifts uniquely; a singular root
/// branches to the p candidates r + t·p^j and keeps those with
/// f ≡ 0 (mod p^{j+1}).
pub fn lift_roots(f: &IntPolynomial, p: &BigUint, k: u32) -> Result<RootSet, DensityError> {
    let base = roots_mod_prime(f, p)?;
    Ok(lift_roots_from(f, p, k, base))
}

fn lift_roots_from(f: &IntPolynomial, p: &BigUint, k: u32, base: RootSet) -> RootSet {
    assert!(k >= 1);
    let fp = f.derivative();
    let p_int = BigInt::from(p.clone());
    let mut roots = base.roots;
    let mut modulus = p.clone();
    for _level in 1..k {
        let next_modulus = &modulus * p;
        let mut lifted = Vec::new();
        for r in &roots {
            let r_int = BigInt::from(r.clone());
            // f(r + t p^j) ≡ f(r) + t p^j f'(r)  (mod p^{j+1}) for j >= 1,
            // so t solves a linear congruence mod p.
            let fr = f.evaluate(&r_int);
            let q = &fr / &BigInt::from(modulus.clone()); // exact: p^j | f(r)
            let b = q.mod_floor(&p_int).to_biguint().unwrap();
            let a = fp.evaluate(&r_int).mod_floor(&p_int).to_biguint().unwrap();
            if !a.is_zero() {
                // Unique lift: t = -b * a^{-1} mod p.
                let a_inv = modinv_big(&a, p);
                let t = ((p - &b) * &a_inv) % p;
                lifted.push(r + &modulus * &t);
            } else if b.is_zero() {
                // Singular root that survives: all p branches lift.
                let mut t = BigUint::zero();
                while &t < p {
                    lifted.push(r + &modulus * &t);
                    t += 1u32;
                }
            }
            // Singular root with b != 0: dies at this level.
        }
        lifted.sort();
        roots = lifted;
        modulus = next_modulus;
    }
    RootSet { modulus, roots }
}

/// a^{-1} mod p for prime p (a nonzero mod p), via Fermat.
fn modinv_big(a: &BigUint, p: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    a.modpow(&(p - &two), p)
}

/// ρ(m): the number of residues n mod m with m | f(n). Computed by
/// factoring m, lifting at each prime power and multiplying the counts.
pub fn rho(f: &IntPolynomial, m: &BigUint) -> Result<BigUint, DensityError> {
    rho_counts(f, m).map(|(rho, _)| rho)
}

/// ρ′(m): as ρ, restricted to residues coprime to m.
pub fn rho_prime(f: &IntPolynomial, m: &BigUint) -> Result<BigUint, DensityError> {
    rho_counts(f, m).map(|(_, rho_prime)| rho_prime)
}

fn rho_counts(f: &IntPolynomial, m: &BigUint) -> Result<(BigUint, BigUint), DensityError> {
    if m.is_one() {
        return Ok((BigUint::one(), BigUint::one()));
    }
    let fact = sievecount::factorize(m)?;
    let mut count = BigUint::one();
    let mut count_coprime = BigUint::one();
    for (p, e) in &fact.factors {
        let set = lift_roots(f, p, *e)?;
        count *= BigUint::from(set.rho());
        count_coprime *= BigUint::from(set.rho_prime());
        if count.is_zero() && count_coprime.is_zero() {
            break;
        }
    }
    Ok((count, count_coprime))
}

/// ρ(m) together with the full root set mod m (CRT-combined).
pub fn rho_with_roots(f: &IntPolynomial, m: &BigUint) -> Result<RootSet, DensityError> {
    if m.is_one() {
        return Ok(RootSet {
            modulus: BigUint::one(),
            roots: vec![BigUint::zero()],
        });
    }
    let fact = sievecount::factorize(m)?;
    let mut acc = RootSet {
        modulus: BigUint::one(),
        roots: vec![BigUint::zero()],
    };
    for (p, e) in &fact.factors {
        let set = lift_roots(f, p, *e)?;
        acc = crt_combine(&acc, &set);
        if acc.roots.is_empty() {
            // Zero count propagates; fix up the final modulus and stop.
            acc.modulus = m.clone();
            return Ok(acc);
        }
    }
    debug_assert_eq!(acc.modulus, *m);
    Ok(acc)
}

/// Combine root sets modulo coprime moduli via CRT.
fn crt_combine(a: &RootSet, b: &RootSet) -> RootSet {
    let m = &a.modulus * &b.modulus;
    if a.modulus.is_one() {
        return RootSet {
            modulus: m,
            roots: b.roots.clone(),
        };
    }
    // x = ra + a.modulus * t with t ≡ (rb - ra) * a.modulus^{-1} (mod b.modulus)
    let inv = mod_inverse_coprime(&a.modulus, &b.modulus);
    let mut roots = Vec::with_capacity(a.roots.len() * b.roots.len());
    for ra in &a.roots {
        for rb in &b.roots {
            let diff = (rb + &b.modulus - (ra % &b.modulus)) % &b.modulus;
            let t = (&diff * &inv) % &b.modulus;
            roots.push(ra + &a.modulus * &t);
        }
    }
    roots.sort();
    RootSet { modulus: m, roots }
}

/// a^{-1} mod m for coprime a, m (extended Euclid on BigInt).
fn mod_inverse_coprime(a: &BigUint, m: &BigUint) -> BigUint {
    let e = BigInt::from(a.clone()).extended_gcd(&BigInt::from(m.clone()));
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(&BigInt::from(m.clone()))
        .to_biguint()
        .unwrap()
}

/// Smallest prime p with ρ(p^k) = p^k, i.e. p^k | f(n) for every n.
///
/// Only p <= deg(f) can be fixed prime divisors of a content-1 polynomial,
/// and p^k | f(n) for all n iff p^k divides gcd(f(0), ..., f(d)) (every
/// value of f is an integer combination of these via finite differences).
pub fn fixed_power_divisor(
    f: &IntPolynomial,
    k: u32,
) -> Result<Option<u64>, DensityError> {
    f.require_content_one()?;
    let d = f.degree();
    let mut g = BigInt::zero();
    for n in 0..=(d as i64) {
        g = g.gcd(&f.evaluate_i64(n));
    }
    let g = g.abs();
    for p in 2..=(d as u64).max(2) {
        if p > d as u64 {
            break;
        }
        if !small_is_prime(p) {
            continue;
        }
        let pk = BigInt::from(p).pow(k);
        if (&g % &pk).is_zero() {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn small_is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Exact Euler totient via factorization.
pub fn euler_phi(m: &BigUint) -> Result<BigUint, DensityError> {
    let fact = sievecount::factorize(m)?;
    let mut phi = BigUint::one();
    for (p, e) in &fact.factors {
        phi *= p.pow(e - 1) * (p - 1u32);
    }
    Ok(phi)
}

// ---------------------------------------------------------------------------
// Euler products
// ---------------------------------------------------------------------------

/// Which density constant an estimate refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConstantKind {
    /// c_f = prod_p (1 - ρ(p^{d-1}) / p^{d-1})       (integer arguments)
    #[serde(rename = "c_f")]
    CF,
    /// c'_f = prod_p (1 - ρ'(p^{d-1}) / φ(p^{d-1}))  (prime arguments)
    #[serde(rename = "c_f_prime")]
    CFPrime,
}

/// Truncated Euler product with a certified enclosing interval.
#[derive(Clone, Debug, Serialize)]
pub struct DensityEstimate {
    pub constant_kind: ConstantKind,
    /// Prime bound of the truncation.
    pub truncation: u64,
    /// Partial product over p <= truncation (floating point).
    pub partial_product: f64,
    /// Exact value of the partial product, kept for small truncations.
    #[serde(serialize_with = "crate::serialize::opt_rational_string")]
    pub exact_partial: Option<BigRational>,
    /// Bound on |log tail| of the omitted factors.
    pub tail_bound: f64,
    /// Accumulated floating-point rounding allowance (relative).
    pub rounding_slack: f64,
    /// Certified interval [lo, hi] containing the infinite product.
    #[serde(serialize_with = "crate::serialize::f64_string")]
    pub lo: f64,
    #[serde(serialize_with = "crate::serialize::f64_string")]
    pub hi: f64,
}

/// Keep the exact rational partial product up to this truncation.
const EXACT_PARTIAL_LIMIT: u64 = 1_000;
/// Tracked per-factor relative rounding error of the float accumulation.
const PER_FACTOR_ROUNDING: f64 = 1e-14;

/// Truncated Euler product for c_f or c'_f over primes p <= prime_limit,
/// with a rigorous enclosing interval.
///
/// For p not dividing lc(f)·disc(f), every root mod p is simple, so
/// ρ(p^{d-1}) = ρ(p) <= d and the omitted factors beyond the truncation obey
/// |log tail| <= Σ_{p > P} d · p^{-(d-2)} · max(1/p, 1/(p-1)) <= 2d/(P-1)
/// for d >= 3. Exceptional primes (dividing lc·disc) above the truncation
/// are folded into the tail: exactly when they can be located by trial
/// division, and through the coarse bound ρ(q^{d-1}) <= d·q^{d-2} otherwise,
/// so the interval is certified for every prime_limit >= 2.
pub fn euler_product(
    f: &IntPolynomial,
    kind: ConstantKind,
    prime_limit: u64,
) -> Result<DensityEstimate, DensityError> {
    f.require_content_one()?;
    let d = f.degree();
    if d < 3 {
        return Err(DensityError::DegreeTooSmall {
            degree: d,
            required: 3,
        });
    }
    if prime_limit < 2 {
        return Err(DensityError::PrimeLimitTooSmall(prime_limit));
    }
    let k = (d - 1) as u32;
    let fixed_divisor = fixed_power_divisor(f, k)?;

    let disc = f.discriminant()?;
    let bad = (f.leading_coeff() * &disc).abs().to_biguint().unwrap();

    let primes = sievecount::primes_up_to(prime_limit);
    let keep_exact = prime_limit <= EXACT_PARTIAL_LIMIT;

    let factor_at = |p: u64| -> (f64, Option<BigRational>) {
        let singular = (&bad % p).is_zero();
        let (num, den) = local_factor(f, p, k, kind, singular);
        let fl = 1.0 - num as f64 / den.to_f64().unwrap();
        let exact = keep_exact
            .then(|| BigRational::one() - BigRational::new(BigInt::from(num), den.into()));
        (fl, exact)
    };

    let mut partial = 1.0f64;
    let mut exact = keep_exact.then(BigRational::one);
    let n_factors = primes.len() as u64;

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        // Per-block accumulation, combined in fixed block order, keeps the
        // result independent of the thread schedule.
        let blocks: Vec<(f64, Option<BigRational>)> = primes
            .par_chunks(4096)
            .map(|chunk| {
                let mut acc = 1.0f64;
                let mut acc_exact = keep_exact.then(BigRational::one);
                for &p in chunk {
                    let (fl, ex) = factor_at(p);
                    acc *= fl;
                    if let (Some(a), Some(e)) = (acc_exact.as_mut(), ex) {
                        *a *= e;
                    }
                }
                (acc, acc_exact)
            })
            .collect();
        for (fl, ex) in blocks {
            partial *= fl;
            if let (Some(a), Some(e)) = (exact.as_mut(), ex) {
                *a *= e;
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        for &p in &primes {
            let (fl, ex) = factor_at(p);
            partial *= fl;
            if let (Some(a), Some(e)) = (exact.as_mut(), ex) {
                *a *= e;
            }
        }
    }

    // Locate exceptional primes beyond the truncation by stripping the prime
    // list off lc·disc; primes hiding in the remaining cofactor exceed
    // max(prime_limit, TRIAL) and get the coarse singular bound.
    const TRIAL: u64 = 1_000_000;
    let mut beyond: Vec<u64> = Vec::new();
    let mut cofactor = bad.clone();
    if !cofactor.is_zero() {
        for &p in &primes {
            while (&cofactor % p).is_zero() {
                cofactor /= p;
            }
        }
        let mut q = *primes.last().unwrap_or(&1) + 1;
        while q <= TRIAL {
            if cofactor.is_one() {
                break;
            }
            if (&cofactor % q).is_zero() {
                if small_is_prime(q) {
                    beyond.push(q);
                }
                while (&cofactor % q).is_zero() {
                    cofactor /= q;
                }
            }
            q += 1;
        }
        if !cofactor.is_one() && sievecount::is_prime(&cofactor) {
            if let Some(q) = cofactor.to_u64() {
                if q > prime_limit {
                    beyond.push(q);
                }
                cofactor = BigUint::one();
            }
        }
    }

    let mut tail = 2.0 * d as f64 / (prime_limit - 1) as f64;
    let mut zero_tail_factor = false;
    for &q in &beyond {
        let (num, den) = local_factor(f, q, k, kind, true);
        if BigUint::from(num) == den {
            zero_tail_factor = true;
        } else {
            let fl = 1.0 - num as f64 / den.to_f64().unwrap();
            tail += -fl.ln() * (1.0 + 1e-12) + 1e-15;
        }
    }
    if !cofactor.is_one() && !cofactor.is_zero() {
        // Unknown singular primes q > max(prime_limit, TRIAL): at most
        // log_q(cofactor) of them, each with ρ(q^k) <= d·q^{k-1}, so the
        // factor is at least 1 - d/(q-1).
        let q_min = prime_limit.max(TRIAL) as f64;
        let count = (cofactor.bits() as f64) / q_min.log2() + 1.0;
        tail += count * (-(1.0 - d as f64 / (q_min - 1.0)).ln());
    }

    let slack = (n_factors as f64 + 4.0) * PER_FACTOR_ROUNDING;
    let zero_product = zero_tail_factor || fixed_divisor.is_some();
    let (lo, hi) = if zero_product {
        (0.0, 0.0)
    } else {
        (
            partial * (-tail).exp() * (1.0 - slack),
            partial * tail.exp() * (1.0 + slack),
        )
    };

    let estimate = DensityEstimate {
        constant_kind: kind,
        truncation: prime_limit,
        partial_product: partial,
        exact_partial: exact,
        tail_bound: tail,
        rounding_slack: slack,
        lo,
        hi,
    };

    if let Some(p) = fixed_divisor {
        // A zero factor makes the infinite product exactly 0.
        return Err(DensityError::FixedDivisorPresent {
            prime: p,
            estimate: Box::new(estimate),
        });
    }
    Ok(estimate)
}

/// Local factor numerator/denominator at p:
/// c_f:  ρ(p^{d-1}) / p^{d-1};  c'_f: ρ'(p^{d-1}) / φ(p^{d-1}).
fn local_factor(
    f: &IntPolynomial,
    p: u64,
    k: u32,
    kind: ConstantKind,
    singular: bool,
) -> (u64, BigUint) {
    let (rho_pk, rho_prime_pk) = if singular {
        let set = lift_roots_from(
            f,
            &BigUint::from(p),
            k,
            roots_mod_prime_unchecked(f, &BigUint::from(p), 2_000),
        );
        (set.rho() as u64, set.rho_prime() as u64)
    } else {
        // Non-exceptional p: every root mod p is simple, so ρ(p^k) = ρ(p),
        // and the unique lift of a root r stays ≡ r (mod p); the lift fails
        // to be coprime to p exactly when 0 is a root, i.e. p | f(0).
        let r = root_count_mod_prime_u64(f, p, 2_000);
        let zero_is_root = (f.coeff(0) % BigInt::from(p)).is_zero();
        (r, r - u64::from(zero_is_root))
    };
    match kind {
        ConstantKind::CF => (rho_pk, BigUint::from(p).pow(k)),
        ConstantKind::CFPrime => (
            rho_prime_pk,
            BigUint::from(p).pow(k - 1) * BigUint::from(p - 1),
        ),
    }
}

// ---------------------------------------------------------------------------
// GF(p) polynomials with BigUint coefficients, for primes beyond u64.
// ---------------------------------------------------------------------------

mod bigmod {
    use super::*;

    #[derive(Clone)]
    struct BPoly {
        c: Vec<BigUint>, // ascending, trimmed
    }

    fn trim(v: &mut Vec<BigUint>) {
        while v.last().map_or(false, Zero::is_zero) {
            v.pop();
        }
    }

    impl BPoly {
        fn x() -> Self {
            BPoly {
                c: vec![BigUint::zero(), BigUint::one()],
            }
        }
        fn one() -> Self {
            BPoly {
                c: vec![BigUint::one()],
            }
        }
        fn is_zero(&self) -> bool {
            self.c.is_empty()
        }
        fn degree(&self) -> usize {
            self.c.len().saturating_sub(1)
        }

        fn mul(&self, o: &Self, p: &BigUint) -> Self {
            if self.is_zero() || o.is_zero() {
                return BPoly { c: vec![] };
            }
            let mut out = vec![BigUint::zero(); self.c.len() + o.c.len() - 1];
            for (i, a) in self.c.iter().enumerate() {
                for (j, b) in o.c.iter().enumerate() {
                    out[i + j] = (&out[i + j] + a * b) % p;
                }
            }
            trim(&mut out);
            BPoly { c: out }
        }

        fn sub(&self, o: &Self, p: &BigUint) -> Self {
            let n = self.c.len().max(o.c.len());
            let mut out = vec![BigUint::zero(); n];
            for i in 0..n {
                let a = self.c.get(i).cloned().unwrap_or_default();
                let b = o.c.get(i).cloned().unwrap_or_default();
                out[i] = (a + p - (b % p)) % p;
            }
            trim(&mut out);
            BPoly { c: out }
        }

        fn rem(&self, div: &Self, p: &BigUint) -> Self {
            let dd = div.degree();
            if self.c.len() < div.c.len() {
                return self.clone();
            }
            let inv = super::modinv_big(div.c.last().unwrap(), p);
            let mut rem = self.c.clone();
            for i in (dd..rem.len()).rev() {
                if rem[i].is_zero() {
                    continue;
                }
                let q = (&rem[i] * &inv) % p;
                for (j, dc) in div.c.iter().enumerate() {
                    let idx = i - dd + j;
                    let t = (&q * dc) % p;
                    rem[idx] = (&rem[idx] + p - t) % p;
                }
            }
            rem.truncate(dd);
            trim(&mut rem);
            BPoly { c: rem }
        }

        fn gcd(mut self, mut other: Self, p: &BigUint) -> Self {
            while !other.is_zero() {
                let r = self.rem(&other, p);
                self = other;
                other = r;
            }
            if let Some(lc) = self.c.last().cloned() {
                if !lc.is_one() {
                    let inv = super::modinv_big(&lc, p);
                    for c in self.c.iter_mut() {
                        *c = (&*c * &inv) % p;
                    }
                }
            }
            self
        }

        fn powmod(&self, exp: &BigUint, modulus: &Self, p: &BigUint) -> Self {
            let mut acc = BPoly::one();
            let base = self.rem(modulus, p);
            let bits = exp.bits();
            for i in (0..bits).rev() {
                acc = acc.mul(&acc, p).rem(modulus, p);
                if exp.bit(i) {
                    acc = acc.mul(&base, p).rem(modulus, p);
                }
            }
            acc
        }

        fn div_exact(&self, b: &Self, p: &BigUint) -> Self {
            let dd = b.degree();
            let inv = super::modinv_big(b.c.last().unwrap(), p);
            let mut rem = self.c.clone();
            let mut quot = vec![BigUint::zero(); rem.len() - dd];
            for i in (dd..rem.len()).rev() {
                if rem[i].is_zero() {
                    continue;
                }
                let q = (&rem[i] * &inv) % p;
                quot[i - dd] = q.clone();
                for (j, bc) in b.c.iter().enumerate() {
                    let idx = i - dd + j;
                    let t = (&q * bc) % p;
                    rem[idx] = (&rem[idx] + p - t) % p;
                }
            }
            trim(&mut quot);
            BPoly { c: quot }
        }
    }

    pub(super) fn roots_mod_prime_big(
        f: &IntPolynomial,
        p: &BigUint,
        seed: u64,
    ) -> Vec<BigUint> {
        let p_int = BigInt::from(p.clone());
        let mut c: Vec<BigUint> = f
            .coeffs()
            .iter()
            .map(|v| v.mod_floor(&p_int).to_biguint().unwrap())
            .collect();
        trim(&mut c);
        let fm = BPoly { c };
        if fm.is_zero() || fm.degree() == 0 {
            return vec![];
        }
        let xp = BPoly::x().powmod(p, &fm, p);
        let g = fm.clone().gcd(xp.sub(&BPoly::x().rem(&fm, p), p), p);
        if g.degree() == 0 {
            return vec![];
        }
        let mut roots = Vec::new();
        let mut g = g;
        if g.c[0].is_zero() {
            roots.push(BigUint::zero());
            g = BPoly {
                c: g.c[1..].to_vec(),
            };
        }
        split_linear(&g, p, seed, &mut roots);
        roots.sort();
        roots
    }

    fn split_linear(g: &BPoly, p: &BigUint, seed: u64, out: &mut Vec<BigUint>) {
        match g.degree() {
            0 => {}
            1 => {
                let inv = super::modinv_big(&g.c[1], p);
                let root = ((p - &g.c[0] % p) * inv) % p;
                out.push(root);
            }
            _ => {
                let half = (p - BigUint::one()) >> 1;
                let mut salt = 0u64;
                loop {
                    let a = random_residue(p, seed, salt);
                    salt += 1;
                    let shifted = BPoly {
                        c: vec![a, BigUint::one()],
                    };
                    let pw = shifted.powmod(&half, g, p);
                    let h = g.clone().gcd(pw.sub(&BPoly::one(), p), p);
                    if h.degree() > 0 && h.degree() < g.degree() {
                        let q = g.div_exact(&h, p);
                        split_linear(&h, p, split_seed(seed, salt), out);
                        split_linear(&q, p, split_seed(seed, salt + 1), out);
                        return;
                    }
                }
            }
        }
    }

    fn random_residue(p: &BigUint, seed: u64, salt: u64) -> BigUint {
        let words = (p.bits() as usize + 63) / 64 + 1;
        let digits: Vec<u64> = (0..words)
            .map(|i| split_seed(seed, salt.wrapping_mul(1000).wrapping_add(i as u64)))
            .collect();
        BigUint::from_slice(
            &digits
                .iter()
                .flat_map(|d| [(*d & 0xffff_ffff) as u32, (*d >> 32) as u32])
                .collect::<Vec<_>>(),
        ) % p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn f_x3p2() -> IntPolynomial {
        parse_polynomial("x^3+2").unwrap()
    }

    fn enumerate_roots(f: &IntPolynomial, m: u64) -> Vec<u64> {
        (0..m)
            .filter(|&r| (f.evaluate_i64(r as i64) % BigInt::from(m)).is_zero())
            .collect()
    }

    #[test]
    fn roots_mod_prime_examples() {
        let f = f_x3p2();
        // Oracle: enumeration of residues.
        assert_eq!(enumerate_roots(&f, 5), vec![2]);
        assert_eq!(enumerate_roots(&f, 7), Vec::<u64>::new());
        let r5 = roots_mod_prime(&f, &BigUint::from(5u32)).unwrap();
        assert_eq!(r5.roots, vec![BigUint::from(2u32)]);
        let r7 = roots_mod_prime(&f, &BigUint::from(7u32)).unwrap();
        assert!(r7.roots.is_empty());
        let r2 = roots_mod_prime(&f, &BigUint::from(2u32)).unwrap();
        assert_eq!(r2.roots, vec![BigUint::zero()]);
    }

    #[test]
    fn roots_mod_prime_rejects_composite() {
        let err = roots_mod_prime(&f_x3p2(), &BigUint::from(6u32));
        assert!(matches!(err, Err(DensityError::NotPrime(_))));
    }

    #[test]
    fn lift_roots_examples() {
        let f = f_x3p2();
        // Oracles: enumeration mod 25, 9, 4.
        assert_eq!(enumerate_roots(&f, 25), vec![22]);
        assert_eq!(enumerate_roots(&f, 9), Vec::<u64>::new());
        assert_eq!(enumerate_roots(&f, 4), Vec::<u64>::new());

        let s25 = lift_roots(&f, &BigUint::from(5u32), 2).unwrap();
        assert_eq!(s25.roots, vec![BigUint::from(22u32)]);
        let s9 = lift_roots(&f, &BigUint::from(3u32), 2).unwrap();
        assert!(s9.roots.is_empty());
        let s4 = lift_roots(&f, &BigUint::from(2u32), 2).unwrap();
        assert!(s4.roots.is_empty());
    }

    #[test]
    fn lift_matches_enumeration_at_singular_primes() {
        // Primes dividing disc(x^3+2) = -108: 2 and 3, several depths.
        let f = f_x3p2();
        for (p, k) in [(2u32, 3u32), (2, 4), (3, 3), (3, 4)] {
            let set = lift_roots(&f, &BigUint::from(p), k).unwrap();
            let m = (p as u64).pow(k);
            let expect: Vec<BigUint> =
                enumerate_roots(&f, m).into_iter().map(BigUint::from).collect();
            assert_eq!(set.roots, expect, "p={p} k={k}");
        }
    }

    #[test]
    fn singular_branching_survives() {
        // f = (x - 1)^2 + 9 ≡ (x-1)^2 mod 9: r=1 is singular mod 3 and all
        // three branches survive mod 9.
        let f = IntPolynomial::new(vec![10, -2, 1]);
        let set = lift_roots(&f, &BigUint::from(3u32), 2).unwrap();
        let expect: Vec<BigUint> = enumerate_roots(&f, 9).into_iter().map(BigUint::from).collect();
        assert_eq!(set.roots, expect);
        assert_eq!(set.rho(), 3);
    }

    #[test]
    fn rho_examples() {
        let f = f_x3p2();
        assert_eq!(rho(&f, &BigUint::from(25u32)).unwrap(), BigUint::one());
        assert_eq!(rho(&f, &BigUint::from(45u32)).unwrap(), BigUint::zero());
        assert_eq!(rho(&f, &BigUint::one()).unwrap(), BigUint::one());
    }

    #[test]
    fn rho_prime_examples() {
        let f = f_x3p2();
        assert_eq!(rho_prime(&f, &BigUint::from(2u32)).unwrap(), BigUint::zero());
        assert_eq!(rho_prime(&f, &BigUint::from(25u32)).unwrap(), BigUint::one());
        assert_eq!(rho_prime(&f, &BigUint::one()).unwrap(), BigUint::one());
    }

    #[test]
    fn rho_with_roots_crt() {
        let f = f_x3p2();
        // mod 35 = 5 * 7: roots mod 5 = {2}, mod 7 = {} -> empty.
        let s = rho_with_roots(&f, &BigUint::from(35u32)).unwrap();
        assert!(s.roots.is_empty());
        // mod 55 = 5 * 11: enumeration oracle.
        let s = rho_with_roots(&f, &BigUint::from(55u32)).unwrap();
        let expect: Vec<BigUint> = enumerate_roots(&f, 55).into_iter().map(BigUint::from).collect();
        assert_eq!(s.roots, expect);
    }

    #[test]
    fn fixed_power_divisor_examples() {
        let f = f_x3p2();
        assert_eq!(fixed_power_divisor(&f, 2).unwrap(), None);
        let g = parse_polynomial("x^3+x+2").unwrap();
        assert_eq!(fixed_power_divisor(&g, 1).unwrap(), Some(2));
        assert_eq!(fixed_power_divisor(&g, 2).unwrap(), None);
    }

    #[test]
    fn fixed_power_divisor_brute_force() {
        // Oracle: ρ(p^k) = p^k by enumeration, for all p <= d.
        for text in ["x^3+2", "x^3+x+2", "x^4+x+1"] {
            let f = parse_polynomial(text).unwrap();
            let d = f.degree() as u64;
            let k = (f.degree() - 1) as u32;
            let expected = (2..=d)
                .filter(|&p| small_is_prime(p))
                .find(|&p| {
                    let m = p.pow(k);
                    enumerate_roots(&f, m).len() as u64 == m
                });
            assert_eq!(fixed_power_divisor(&f, k).unwrap(), expected, "{text}");
        }
    }

    #[test]
    fn euler_phi_examples() {
        assert_eq!(euler_phi(&BigUint::one()).unwrap(), BigUint::one());
        assert_eq!(euler_phi(&BigUint::from(25u32)).unwrap(), BigUint::from(20u32));
        assert_eq!(euler_phi(&BigUint::from(45u32)).unwrap(), BigUint::from(24u32));
    }

    #[test]
    fn euler_product_partial_values() {
        let f = f_x3p2();
        // (1 - 0/4)(1 - 0/9)(1 - 1/25)(1 - 0/49) = 24/25
        let est = euler_product(&f, ConstantKind::CF, 10).unwrap();
        let exact = est.exact_partial.clone().unwrap();
        assert_eq!(exact, BigRational::new(BigInt::from(24), BigInt::from(25)));
        assert!(est.lo <= est.partial_product && est.partial_product <= est.hi);

        // (1)(1)(1 - 1/20)(1) = 19/20
        let est = euler_product(&f, ConstantKind::CFPrime, 10).unwrap();
        let exact = est.exact_partial.clone().unwrap();
        assert_eq!(exact, BigRational::new(BigInt::from(19), BigInt::from(20)));

        // P = 2: only the factor at p = 2, which is 1 - 0/4 = 1.
        let est = euler_product(&f, ConstantKind::CF, 2).unwrap();
        assert_eq!(est.exact_partial.clone().unwrap(), BigRational::one());
        // Exceptional prime 3 sits beyond the truncation; its exact factor
        // is 1, so the interval still contains the true constant.
        assert!(est.lo <= 0.96 && 0.96 <= est.hi);
    }

    #[test]
    fn euler_product_intervals_shrink_and_intersect() {
        let f = f_x3p2();
        let e100 = euler_product(&f, ConstantKind::CF, 100).unwrap();
        let e10k = euler_product(&f, ConstantKind::CF, 10_000).unwrap();
        assert!(e10k.hi - e10k.lo < e100.hi - e100.lo);
        assert!(e10k.lo <= e100.hi && e100.lo <= e10k.hi, "intervals intersect");

        let e1k = euler_product(&f, ConstantKind::CF, 1_000).unwrap();
        assert!(e1k.lo <= e100.hi && e100.lo <= e1k.hi);
        assert!(e10k.lo <= e1k.hi && e1k.lo <= e10k.hi);
    }

    #[test]
    fn euler_product_interval_width_bound() {
        let f = f_x3p2();
        for limit in [100u64, 1000, 10_000] {
            let e = euler_product(&f, ConstantKind::CF, limit).unwrap();
            // hi - lo <= 2*tail + slack, with the sinh(t) > t excess folded
            // into an explicit cubic term.
            let t = e.tail_bound;
            assert!(e.hi - e.lo <= 2.0 * t + 2.0 * t * t * t + 4.0 * e.rounding_slack + 1e-12);
        }
    }

    #[test]
    fn euler_product_fixed_divisor_reports_zero_interval() {
        // f = x(x+1)...(x+7) + 128: the product of 8 consecutive integers
        // is divisible by 8!, hence by 2^7 = 128, so 128 | f(n) for all n.
        // Content is 1 (monic), d = 8, k = d-1 = 7.
        let mut f = IntPolynomial::new(vec![BigInt::one()]);
        for i in 0..8i64 {
            f = f.mul(&IntPolynomial::new(vec![BigInt::from(i), BigInt::one()]));
        }
        let coeffs: Vec<BigInt> = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { c + BigInt::from(128) } else { c.clone() })
            .collect();
        let f = IntPolynomial::new(coeffs);
        assert_eq!(fixed_power_divisor(&f, 7).unwrap(), Some(2));
        match euler_product(&f, ConstantKind::CF, 10) {
            Err(DensityError::FixedDivisorPresent { prime, estimate }) => {
                assert_eq!(prime, 2);
                assert_eq!(estimate.lo, 0.0);
                assert_eq!(estimate.hi, 0.0);
            }
            other => panic!("expected FixedDivisorPresent, got {other:?}"),
        }
    }

    #[test]
    fn big_prime_roots_match_expected() {
        // p = 2^89 - 1 (Mersenne prime). x^2 - 4 has roots 2 and p - 2.
        let p: BigUint = (BigUint::one() << 89) - 1u32;
        let f = IntPolynomial::new(vec![-4, 0, 1]);
        let set = roots_mod_prime(&f, &p).unwrap();
        assert_eq!(set.roots, vec![BigUint::from(2u32), &p - 2u32]);
        // x^3 + 2 mod p: verify each claimed root satisfies the congruence.
        let f = f_x3p2();
        let set = roots_mod_prime(&f, &p).unwrap();
        for r in &set.roots {
            let v = f.evaluate(&BigInt::from(r.clone()));
            assert!(v.mod_floor(&BigInt::from(p.clone())).is_zero());
        }
        // gcd degree equals root count; p ≡ 1 mod 3 would allow 3 roots,
        // 2^89-1 ≡ (2 mod 3 pattern): 2^89 ≡ 2 mod 3 so p ≡ 1 mod 3.
        assert!(set.rho() == 0 || set.rho() == 1 || set.rho() == 3);
    }
}
