//! Prime generation, big-integer factorization, (d-1)-free value counters
//! over integer and prime arguments, exact Möbius-identity verification and
//! triple enumeration over dyadic boxes.
//!
//! Factorization is trial division to a configurable bound, Miller–Rabin
//! primality (deterministic witness set below 3.317e24, seeded random bases
//! with >= 64 rounds above) and Brent-variant Pollard rho, recursing until
//! every factor is proven prime. All randomness is derived from per-input
//! seeds so results are reproducible and schedule-independent.

use crate::arith::{is_perfect_kth_power, kth_root_u128, mulmod64, powmod64, split_seed, Montgomery};
use crate::localdensity::{self, DensityError};
use crate::poly::IntPolynomial;
use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, Clone)]
pub enum SieveError {
    #[error("factorization effort cap exceeded while splitting {n}")]
    EffortExceeded { n: BigUint },
    #[error("Moebius m-range bound {bound} exceeds the desk-scale limit {limit}")]
    BoundTooLarge { bound: BigUint, limit: u64 },
}

// ---------------------------------------------------------------------------
// Primes
// ---------------------------------------------------------------------------

const SEGMENT: usize = 1 << 16;

/// All primes <= x, ascending, via a segmented sieve of Eratosthenes.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if x < 2 {
        return out;
    }
    let root = x.sqrt();
    let base = simple_sieve(root.max(2));
    out.extend_from_slice(&base);
    let mut lo = root.max(2) + 1;
    let mut mark = vec![true; SEGMENT];
    while lo <= x {
        let hi = (lo + SEGMENT as u64 - 1).min(x);
        let len = (hi - lo + 1) as usize;
        mark[..len].fill(true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            if m < p * p {
                m = p * p;
            }
            while m <= hi {
                mark[(m - lo) as usize] = false;
                m += p;
            }
        }
        for (i, &is_p) in mark[..len].iter().enumerate() {
            if is_p {
                out.push(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
    out
}

fn simple_sieve(x: u64) -> Vec<u64> {
    let n = x as usize;
    let mut is_p = vec![true; n + 1];
    is_p[0] = false;
    if n >= 1 {
        is_p[1] = false;
    }
    let mut i = 2usize;
    while i * i <= n {
        if is_p[i] {
            let mut j = i * i;
            while j <= n {
                is_p[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| is_p[i]).map(|i| i as u64).collect()
}

/// π(x): number of primes <= x.
pub fn prime_count(x: u64) -> u64 {
    if x < 2 {
        return 0;
    }
    let root = x.sqrt();
    let base = simple_sieve(root.max(2));
    let mut count = base.len() as u64;
    let mut lo = root.max(2) + 1;
    let mut mark = vec![true; SEGMENT];
    while lo <= x {
        let hi = (lo + SEGMENT as u64 - 1).min(x);
        let len = (hi - lo + 1) as usize;
        mark[..len].fill(true);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            if m < p * p {
                m = p * p;
            }
            while m <= hi {
                mark[(m - lo) as usize] = false;
                m += p;
            }
        }
        count += mark[..len].iter().filter(|&&b| b).count() as u64;
        lo = hi + 1;
    }
    count
}

/// Primality of every n in (lo, hi]; entry i corresponds to n = lo + 1 + i.
pub fn sieve_window(lo: u64, hi: u64) -> Vec<bool> {
    if hi <= lo {
        return vec![];
    }
    let len = (hi - lo) as usize;
    let mut mark = vec![true; len];
    let base = simple_sieve(hi.sqrt().max(2));
    for &p in &base {
        let mut m = (lo + 1).div_ceil(p).max(2) * p;
        while m <= hi {
            mark[(m - lo - 1) as usize] = false;
            m += p;
        }
    }
    if lo < 1 && hi >= 1 {
        mark[0] = false; // n = 1
    }
    mark
}

// ---------------------------------------------------------------------------
// Primality
// ---------------------------------------------------------------------------

/// Deterministic Miller–Rabin for word-sized n: the first 12 primes witness
/// correctly for all n < 3.18e23 > 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    let witnesses = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < (1 << 63) {
        let mont = Montgomery::new(n);
        let one = mont.one();
        let minus_one = mont.to_mont(n - 1);
        'w: for &a in &witnesses {
            let mut x = mont.pow(mont.to_mont(a % n), d);
            if x == one || x == minus_one {
                continue;
            }
            for _ in 1..s {
                x = mont.mul(x, x);
                if x == minus_one {
                    continue 'w;
                }
            }
            return false;
        }
        true
    } else {
        'w2: for &a in &witnesses {
            let mut x = powmod64(a, d, n);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 1..s {
                x = mulmod64(x, x, n);
                if x == n - 1 {
                    continue 'w2;
                }
            }
            return false;
        }
        true
    }
}

/// Threshold below which the first 13 prime bases are a proven witness set.
fn deterministic_mr_limit() -> &'static BigUint {
    static LIMIT: OnceLock<BigUint> = OnceLock::new();
    LIMIT.get_or_init(|| "3317044064679887385961981".parse().unwrap())
}

/// Miller–Rabin primality: deterministic below 3.317e24, 64 seeded random
/// rounds above (reproducible: the bases are derived from n).
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(n64) = n.to_u64() {
        return is_prime_u64(n64);
    }
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    let mr_round = |a: &BigUint| -> bool {
        // true = passes (possibly prime)
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return true;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                return true;
            }
        }
        false
    };
    if n <= deterministic_mr_limit() {
        for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
            if !mr_round(&BigUint::from(a)) {
                return false;
            }
        }
        return true;
    }
    let seed = split_seed(0x4d52_7072, n.iter_u64_digits().next().unwrap_or(1));
    for round in 0..64u64 {
        let a = derive_base(n, seed, round);
        if !mr_round(&a) {
            return false;
        }
    }
    true
}

fn derive_base(n: &BigUint, seed: u64, round: u64) -> BigUint {
    let words = (n.bits() as usize + 63) / 64;
    let digits: Vec<u64> = (0..words)
        .map(|i| split_seed(seed, round * 1024 + i as u64))
        .collect();
    let raw = BigUint::from_slice(
        &digits
            .iter()
            .flat_map(|d| [(*d & 0xffff_ffff) as u32, (*d >> 32) as u32])
            .collect::<Vec<_>>(),
    );
    // base in [2, n-2]
    let span = n - 3u32;
    (raw % span) + 2u32
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

/// Knobs for the factorization backend. The seed fixes every randomized
/// sub-algorithm; identical configs give identical results.
#[derive(Clone, Debug, Serialize)]
pub struct FactorConfig {
    /// Trial-divide by primes up to this bound first.
    pub trial_bound: u64,
    /// Master seed for rho restarts and large-input MR bases.
    pub seed: u64,
    /// Total Brent-rho iteration budget per factorize call.
    pub effort_cap: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            trial_bound: 10_000,
            seed: 0,
            effort_cap: 200_000_000,
        }
    }
}

/// Complete factorization into a sorted (prime, exponent) multiset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationResult {
    #[serde(serialize_with = "crate::serialize::biguint_string")]
    pub n: BigUint,
    #[serde(serialize_with = "serialize_factors")]
    pub factors: Vec<(BigUint, u32)>,
}

fn serialize_factors<S: serde::Serializer>(
    v: &[(BigUint, u32)],
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(p, e)| (p.to_string(), *e)))
}

impl FactorizationResult {
    /// Largest exponent in the factorization (0 for n = 1).
    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).max().unwrap_or(0)
    }
}

fn default_trial_primes() -> &'static Vec<u64> {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(FactorConfig::default().trial_bound))
}

/// Factorize with default configuration.
pub fn factorize(n: &BigUint) -> Result<FactorizationResult, SieveError> {
    factorize_with(n, &FactorConfig::default())
}

/// Factorize n >= 1 completely; every returned factor passes the primality
/// check. Raises `EffortExceeded` when the rho budget runs out.
pub fn factorize_with(n: &BigUint, cfg: &FactorConfig) -> Result<FactorizationResult, SieveError> {
    assert!(!n.is_zero(), "factorize requires n >= 1");
    let mut factors: BTreeMap<BigUint, u32> = BTreeMap::new();
    let mut m = n.clone();

    if cfg.trial_bound >= 2 {
        let owned;
        let trial: &Vec<u64> = if cfg.trial_bound == FactorConfig::default().trial_bound {
            default_trial_primes()
        } else {
            owned = primes_up_to(cfg.trial_bound);
            &owned
        };
        for &p in trial {
            if m.is_one() {
                break;
            }
            if (&m % p).is_zero() {
                let mut e = 0u32;
                while (&m % p).is_zero() {
                    m /= p;
                    e += 1;
                }
                factors.insert(BigUint::from(p), e);
            }
            // Remaining cofactor below p^2 is prime (or 1).
            if !m.is_one() && m < BigUint::from(p) * p {
                break;
            }
        }
    }

    let mut effort = cfg.effort_cap;
    let mut stack: Vec<(BigUint, u32)> = Vec::new();
    if !m.is_one() {
        stack.push((m, 1));
    }
    while let Some((m, mult)) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            *factors.entry(m).or_insert(0) += mult;
            continue;
        }
        // Perfect powers: rho converges poorly on p^e, so peel them first.
        if let Some((base, e)) = perfect_power(&m) {
            stack.push((base, mult * e));
            continue;
        }
        let divisor = if let Some(m64) = m.to_u64() {
            BigUint::from(brent_u64(m64, cfg.seed, &mut effort).ok_or(
                SieveError::EffortExceeded { n: n.clone() },
            )?)
        } else {
            brent_big(&m, cfg.seed, &mut effort)
                .ok_or(SieveError::EffortExceeded { n: n.clone() })?
        };
        let quotient = &m / &divisor;
        stack.push((divisor, mult));
        stack.push((quotient, mult));
    }

    Ok(FactorizationResult {
        n: n.clone(),
        factors: factors.into_iter().collect(),
    })
}

/// m = base^e for some prime e >= 2 (recursion finishes composite
/// exponents). Word-sized inputs use float-seeded integer roots.
fn perfect_power(m: &BigUint) -> Option<(BigUint, u32)> {
    let bits = m.bits() as u32;
    if let Some(m128) = m.to_u128() {
        for e in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61] {
            if e > bits {
                break;
            }
            let r = kth_root_u128(m128, e);
            if r < 2 {
                break;
            }
            if crate::arith::checked_pow_u128(r, e) == Some(m128) {
                return Some((BigUint::from(r), e));
            }
        }
        return None;
    }
    for e in 2..=bits.max(2) {
        if !is_prime_u64(e as u64) {
            continue;
        }
        let r = m.nth_root(e);
        if r < BigUint::from(2u32) {
            break;
        }
        if r.pow(e) == *m {
            return Some((r, e));
        }
    }
    None
}

/// Brent-variant Pollard rho on a word-sized composite with no factors
/// below the trial bound. Returns a nontrivial divisor.
fn brent_u64(n: u64, seed: u64, effort: &mut u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    // All cycle arithmetic can run on any fixed unit-multiple representation
    // of the residues (gcds are unaffected), so Montgomery form is used
    // directly whenever n < 2^63.
    let use_mont = n < (1 << 63);
    let mont = use_mont.then(|| Montgomery::new(n));
    for attempt in 0..64u64 {
        let c = 1 + split_seed(seed, n.wrapping_add(attempt)) % (n - 2);
        let x0 = 2 + split_seed(seed, n.wrapping_mul(31).wrapping_add(attempt)) % (n - 3);
        let d = match &mont {
            Some(m) => brent_cycle(n, m.to_mont(c), m.to_mont(x0), effort, |a, b| m.mul(a, b)),
            None => brent_cycle(n, c, x0, effort, |a, b| mulmod64(a, b, n)),
        };
        if let Some(d) = d {
            if d != n {
                return Some(d);
            }
        }
        if *effort == 0 {
            return None;
        }
    }
    None
}

fn brent_cycle<M: Fn(u64, u64) -> u64>(
    n: u64,
    c: u64,
    x0: u64,
    effort: &mut u64,
    mul: M,
) -> Option<u64> {
    let add = |a: u64, b: u64| -> u64 {
        let s = a as u128 + b as u128;
        (s % n as u128) as u64
    };
    let step = |y: u64| add(mul(y, y), c);
    let mut y = x0;
    let mut r: u64 = 1;
    let mut q: u64 = 1;
    let mut g: u64 = 1;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            let batch = 128.min(r - k);
            if *effort < batch {
                *effort = 0;
                return None;
            }
            *effort -= batch;
            for _ in 0..batch {
                y = step(y);
                q = mul(q, x.abs_diff(y));
            }
            g = gcd_u64(q, n); // q = 0 gives g = n and the backtrack below
            k += batch;
        }
        r *= 2;
        if r > (1 << 33) {
            return None;
        }
    }
    if g == n {
        // Batch overshot: backtrack one step at a time.
        loop {
            ys = step(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
            if *effort == 0 {
                return None;
            }
            *effort -= 1;
        }
    }
    (g != n).then_some(g)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent rho over BigUint for inputs beyond 2^64.
fn brent_big(n: &BigUint, seed: u64, effort: &mut u64) -> Option<BigUint> {
    for attempt in 0..32u64 {
        let c = BigUint::from(1 + split_seed(seed, 0xb16_0000 + attempt) % u64::MAX);
        let mut y = BigUint::from(2 + split_seed(seed, 0xb16_1000 + attempt) % u64::MAX);
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let step = |v: &BigUint| (v * v + &c) % n;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = 128.min(r - k);
                if *effort < batch * 8 {
                    *effort = 0;
                    return None;
                }
                *effort -= batch * 8;
                for _ in 0..batch {
                    y = step(&y);
                    let d = if x > y { &x - &y } else { &y - &x };
                    if !d.is_zero() {
                        q = q * d % n;
                    }
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
            if r > (1 << 30) {
                break;
            }
        }
        if g == *n {
            loop {
                ys = step(&ys);
                let d = if x > ys { &x - &ys } else { &ys - &x };
                g = d.gcd(n);
                if !g.is_one() {
                    break;
                }
                if *effort < 8 {
                    *effort = 0;
                    return None;
                }
                *effort -= 8;
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
        if *effort == 0 {
            return None;
        }
    }
    None
}

/// True iff no prime power p^k divides n (n >= 1, k >= 2).
pub fn is_kfree(n: &BigUint, k: u32) -> Result<bool, SieveError> {
    is_kfree_with(n, k, &FactorConfig::default())
}

pub fn is_kfree_with(n: &BigUint, k: u32, cfg: &FactorConfig) -> Result<bool, SieveError> {
    assert!(k >= 2, "k-free needs k >= 2");
    if n.is_zero() {
        return Ok(false);
    }
    Ok(factorize_with(n, cfg)?.max_exponent() < k)
}

// ---------------------------------------------------------------------------
// k-free value counting
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Integers,
    Primes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Direct,
    Hybrid,
    Both,
}

/// Configuration for the counting paths.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CountConfig {
    pub factor: FactorConfig,
    /// Hybrid sieve bound Q; defaults to max(1000, sqrt(X)).
    pub hybrid_prime_bound: Option<u64>,
}

/// Result of a k-free count, with enough context to reproduce it.
#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub polynomial: String,
    pub x: u64,
    pub domain: Domain,
    pub k: u32,
    pub count: u64,
    /// Number of arguments scanned: X for integers, π(X) for primes.
    pub domain_size: u64,
    pub method: CountMethod,
    pub fixed_divisor: Option<u64>,
    pub elapsed_seconds: f64,
}

/// Count the arguments n in [1, X] (or primes p <= X) for which f(n) is
/// (d-1)-free. `direct` factorizes every value; `hybrid` sieves arithmetic
/// progressions mod q^{d-1} for primes q <= Q and only inspects surviving
/// cofactors; `both` runs the two and asserts they agree.
pub fn count_kfree(
    f: &IntPolynomial,
    x: u64,
    domain: Domain,
    method: CountMethod,
    cfg: &CountConfig,
) -> Result<CountReport, DensityError> {
    let d = f.degree();
    if d < 3 {
        return Err(DensityError::DegreeTooSmall {
            degree: d,
            required: 3,
        });
    }
    let k = (d - 1) as u32;
    let start = Instant::now();
    let count = count_kfree_window(f, 0, x, k, domain, method, cfg)?;
    let domain_size = match domain {
        Domain::Integers => x,
        Domain::Primes => prime_count(x),
    };
    Ok(CountReport {
        polynomial: f.to_string(),
        x,
        domain,
        k,
        count,
        domain_size,
        method,
        fixed_divisor: localdensity::fixed_power_divisor(f, k)?,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Count k-free values of f over the window (lo, hi].
pub fn count_kfree_window(
    f: &IntPolynomial,
    lo: u64,
    hi: u64,
    k: u32,
    domain: Domain,
    method: CountMethod,
    cfg: &CountConfig,
) -> Result<u64, DensityError> {
    if hi <= lo {
        return Ok(0);
    }
    let active: Option<Vec<bool>> = match domain {
        Domain::Integers => None,
        Domain::Primes => Some(sieve_window(lo, hi)),
    };
    match method {
        CountMethod::Direct => direct_count(f, lo, hi, k, active.as_deref(), cfg),
        CountMethod::Hybrid => hybrid_count(f, lo, hi, k, active.as_deref(), cfg),
        CountMethod::Both => {
            let a = direct_count(f, lo, hi, k, active.as_deref(), cfg)?;
            let b = hybrid_count(f, lo, hi, k, active.as_deref(), cfg)?;
            assert_eq!(a, b, "direct and hybrid counts disagree on ({lo}, {hi}]");
            Ok(a)
        }
    }
}

const BLOCK: u64 = 1 << 15;

fn blocks(lo: u64, hi: u64) -> Vec<(u64, u64)> {
    let mut v = Vec::new();
    let mut b = lo;
    while b < hi {
        let e = (b + BLOCK).min(hi);
        v.push((b, e));
        b = e;
    }
    v
}

fn map_blocks<F>(lo: u64, hi: u64, per_block: F) -> Result<u64, DensityError>
where
    F: Fn(u64, u64) -> Result<u64, DensityError> + Sync + Send,
{
    let blocks = blocks(lo, hi);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let counts: Vec<Result<u64, DensityError>> = blocks
            .par_iter()
            .map(|&(b, e)| per_block(b, e))
            .collect();
        let mut total = 0u64;
        for c in counts {
            total += c?;
        }
        Ok(total)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut total = 0u64;
        for (b, e) in blocks {
            total += per_block(b, e)?;
        }
        Ok(total)
    }
}

fn direct_count(
    f: &IntPolynomial,
    lo: u64,
    hi: u64,
    k: u32,
    active: Option<&[bool]>,
    cfg: &CountConfig,
) -> Result<u64, DensityError> {
    map_blocks(lo, hi, |blo, bhi| {
        let mut count = 0u64;
        for n in blo + 1..=bhi {
            if let Some(act) = active {
                if !act[(n - lo - 1) as usize] {
                    continue;
                }
            }
            let v = f.evaluate(&BigInt::from(n)).abs().to_biguint().unwrap();
            if v.is_zero() {
                continue;
            }
            let fcfg = FactorConfig {
                seed: split_seed(cfg.factor.seed, n),
                ..cfg.factor.clone()
            };
            if is_kfree_with(&v, k, &fcfg).map_err(DensityError::from)? {
                count += 1;
            }
        }
        Ok(count)
    })
}

fn hybrid_count(
    f: &IntPolynomial,
    lo: u64,
    hi: u64,
    k: u32,
    active: Option<&[bool]>,
    cfg: &CountConfig,
) -> Result<u64, DensityError> {
    let q_bound = cfg
        .hybrid_prime_bound
        .unwrap_or_else(|| 1_000u64.max(hi.sqrt()));
    let qprimes = primes_up_to(q_bound);
    // Root tables mod each sieving prime; the gcd extraction path keeps the
    // per-prime cost polynomial in log q.
    let tables: Vec<(u64, Vec<u64>)> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            qprimes
                .par_iter()
                .map(|&q| (q, roots_mod_u64(f, q)))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            qprimes.iter().map(|&q| (q, roots_mod_u64(f, q))).collect()
        }
    };

    // Values fit u128 iff a coarse magnitude bound does.
    let coarse: BigUint = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c.abs().to_biguint().unwrap() * BigUint::from(hi.max(1)).pow(i as u32))
        .sum();
    let fits_u128 = coarse < (BigUint::one() << 126);

    map_blocks(lo, hi, |blo, bhi| {
        if fits_u128 {
            hybrid_block_u128(f, lo, blo, bhi, k, q_bound, &tables, active, cfg)
        } else {
            hybrid_block_big(f, lo, blo, bhi, k, q_bound, &tables, active, cfg)
        }
    })
}

fn roots_mod_u64(f: &IntPolynomial, q: u64) -> Vec<u64> {
    let seed = split_seed(0x484b_5254, q);
    crate::modpoly::roots_mod_prime(&f.to_mod(q), 512, seed)
}

#[allow(clippy::too_many_arguments)]
fn hybrid_block_u128(
    f: &IntPolynomial,
    lo: u64,
    blo: u64,
    bhi: u64,
    k: u32,
    q_bound: u64,
    tables: &[(u64, Vec<u64>)],
    active: Option<&[bool]>,
    cfg: &CountConfig,
) -> Result<u64, DensityError> {
    let len = (bhi - blo) as usize;
    let coeffs: Vec<i128> = f
        .coeffs()
        .iter()
        .map(|c| c.to_i128().expect("coarse bound guarantees i128 range"))
        .collect();
    let mut vals = vec![0u128; len];
    let mut bad = vec![false; len];
    let is_active = |n: u64| active.map_or(true, |a| a[(n - lo - 1) as usize]);
    for (i, v) in vals.iter_mut().enumerate() {
        let n = blo + 1 + i as u64;
        if !is_active(n) {
            continue;
        }
        let mut acc: i128 = 0;
        for c in coeffs.iter().rev() {
            acc = acc * n as i128 + c;
        }
        *v = acc.unsigned_abs();
        if *v == 0 {
            bad[i] = true; // f(n) = 0 counts as not k-free
        }
    }
    // Divide out every sieving prime along its root progressions.
    for (q, roots) in tables {
        let q = *q;
        for &r in roots {
            let mut n = first_in_progression(blo + 1, r, q);
            while n <= bhi {
                let i = (n - blo - 1) as usize;
                if is_active(n) && !bad[i] && vals[i] != 0 {
                    let mut e = 0u32;
                    while vals[i] % q as u128 == 0 {
                        vals[i] /= q as u128;
                        e += 1;
                    }
                    if e >= k {
                        bad[i] = true;
                    }
                }
                match n.checked_add(q) {
                    Some(next) => n = next,
                    None => break,
                }
            }
        }
    }
    // Cofactors have all prime factors > Q.
    let threshold = crate::arith::checked_pow_u128(q_bound as u128, k + 1);
    let mut count = 0u64;
    for (i, &v) in vals.iter().enumerate() {
        let n = blo + 1 + i as u64;
        if !is_active(n) || bad[i] {
            continue;
        }
        if cofactor_is_kfree(v, k, threshold, cfg, n)? {
            count += 1;
        }
    }
    Ok(count)
}

/// k-freeness of a cofactor whose prime factors all exceed Q.
/// Below Q^{k+1} it has at most k prime factors, so the only non-k-free
/// shape is a perfect k-th power; larger cofactors get factorized (without
/// re-doing trial division).
fn cofactor_is_kfree(
    c: u128,
    k: u32,
    q_pow_threshold: Option<u128>,
    cfg: &CountConfig,
    n: u64,
) -> Result<bool, DensityError> {
    if c == 1 {
        return Ok(true);
    }
    if let Some(t) = q_pow_threshold {
        if c < t {
            return Ok(!is_perfect_kth_power(c, k));
        }
    }
    let fcfg = FactorConfig {
        trial_bound: 0,
        seed: split_seed(cfg.factor.seed, n),
        ..cfg.factor.clone()
    };
    let big = BigUint::from(c);
    Ok(factorize_with(&big, &fcfg)
        .map_err(DensityError::from)?
        .max_exponent()
        < k)
}

#[allow(clippy::too_many_arguments)]
fn hybrid_block_big(
    f: &IntPolynomial,
    lo: u64,
    blo: u64,
    bhi: u64,
    k: u32,
    _q_bound: u64,
    tables: &[(u64, Vec<u64>)],
    active: Option<&[bool]>,
    cfg: &CountConfig,
) -> Result<u64, DensityError> {
    let len = (bhi - blo) as usize;
    let is_active = |n: u64| active.map_or(true, |a| a[(n - lo - 1) as usize]);
    let mut vals: Vec<BigUint> = Vec::with_capacity(len);
    let mut bad = vec![false; len];
    for i in 0..len {
        let n = blo + 1 + i as u64;
        if !is_active(n) {
            vals.push(BigUint::zero());
            continue;
        }
        let v = f.evaluate(&BigInt::from(n)).abs().to_biguint().unwrap();
        if v.is_zero() {
            bad[i] = true;
        }
        vals.push(v);
    }
    for (q, roots) in tables {
        let q = *q;
        for &r in roots {
            let mut n = first_in_progression(blo + 1, r, q);
            while n <= bhi {
                let i = (n - blo - 1) as usize;
                if is_active(n) && !bad[i] && !vals[i].is_zero() {
                    let mut e = 0u32;
                    while (&vals[i] % q).is_zero() {
                        vals[i] /= q;
                        e += 1;
                    }
                    if e >= k {
                        bad[i] = true;
                    }
                }
                match n.checked_add(q) {
                    Some(next) => n = next,
                    None => break,
                }
            }
        }
    }
    let mut count = 0u64;
    for (i, v) in vals.iter().enumerate() {
        let n = blo + 1 + i as u64;
        if !is_active(n) || bad[i] {
            continue;
        }
        if v.is_one() {
            count += 1;
            continue;
        }
        let fcfg = FactorConfig {
            trial_bound: 0,
            seed: split_seed(cfg.factor.seed, n),
            ..cfg.factor.clone()
        };
        if factorize_with(v, &fcfg)
            .map_err(DensityError::from)?
            .max_exponent()
            < k
        {
            count += 1;
        }
    }
    Ok(count)
}

/// Smallest n >= start with n ≡ r (mod q).
fn first_in_progression(start: u64, r: u64, q: u64) -> u64 {
    let rem = start % q;
    if rem <= r {
        start + (r - rem)
    } else {
        start + (q - rem) + r
    }
}

// ---------------------------------------------------------------------------
// Divisibility counts and the Moebius identity
// ---------------------------------------------------------------------------

/// N'_0(X; m): arguments n (or primes) in the dyadic window (X, 2X] with
/// m^{d-1} | f(n). Enumerates the root set mod m^{d-1} and counts
/// progression members.
pub fn count_divisible(
    f: &IntPolynomial,
    x: u64,
    m: &BigUint,
    domain: Domain,
) -> Result<u64, DensityError> {
    let window = match domain {
        Domain::Primes => Some(sieve_window(x, 2 * x)),
        Domain::Integers => None,
    };
    count_divisible_in(f, x, m, window.as_deref())
}

fn count_divisible_in(
    f: &IntPolynomial,
    x: u64,
    m: &BigUint,
    window: Option<&[bool]>,
) -> Result<u64, DensityError> {
    let k = (f.degree() - 1) as u32;
    let modulus = m.pow(k);
    let set = localdensity::rho_with_roots(f, &modulus)?;
    let lo = BigUint::from(x) + 1u32;
    let hi = BigUint::from(2 * x);
    let mut count = 0u64;
    for r in &set.roots {
        // First member of the progression at or above lo.
        let rem = &lo % &set.modulus;
        let first = if rem <= *r {
            &lo + (r - rem)
        } else {
            &lo + (&set.modulus - rem) + r
        };
        if first > hi {
            continue;
        }
        match window {
            None => {
                count += ((&hi - &first) / &set.modulus).to_u64().unwrap() + 1;
            }
            Some(w) => {
                let mut n = first.clone();
                while n <= hi {
                    let idx = (n.to_u64().unwrap() - x - 1) as usize;
                    if w[idx] {
                        count += 1;
                    }
                    n += &set.modulus;
                }
            }
        }
    }
    Ok(count)
}

/// Result of the exact Möbius-decomposition check over (X, 2X].
#[derive(Clone, Debug, Serialize)]
pub struct MoebiusReport {
    pub x: u64,
    pub domain: Domain,
    /// Count of (d-1)-free values of f over the window.
    pub lhs: u64,
    /// Σ_m μ(m) N'_0(X; m) over squarefree m up to the exact cutoff.
    pub rhs: i64,
    /// Largest m that can contribute: (max |f| over the window)^{1/(d-1)}.
    pub m_bound: u64,
    pub equal: bool,
}

/// Desk-scale guard for the Möbius m-range.
const MOEBIUS_BOUND_LIMIT: u64 = 200_000_000;

/// Verify Σ_{m} μ(m) N'_0(X; m) equals the window count of (d-1)-free
/// values, exactly. The m-range is finite: beyond (max |f|)^{1/(d-1)} every
/// N'_0 vanishes.
pub fn moebius_check(
    f: &IntPolynomial,
    x: u64,
    domain: Domain,
    cfg: &CountConfig,
) -> Result<MoebiusReport, DensityError> {
    let d = f.degree();
    assert!(d >= 3, "moebius_check needs degree >= 3");
    let k = (d - 1) as u32;
    let lhs = count_kfree_window(f, x, 2 * x, k, domain, CountMethod::Direct, cfg)?;

    // Exact max |f(n)| over the window by direct scan.
    let mut max_abs = BigUint::zero();
    for n in x + 1..=2 * x {
        let v = f.evaluate(&BigInt::from(n)).abs().to_biguint().unwrap();
        if v > max_abs {
            max_abs = v;
        }
    }
    let m_bound_big = max_abs.nth_root(k);
    let m_bound = m_bound_big
        .to_u64()
        .filter(|&b| b <= MOEBIUS_BOUND_LIMIT)
        .ok_or(SieveError::BoundTooLarge {
            bound: m_bound_big.clone(),
            limit: MOEBIUS_BOUND_LIMIT,
        })
        .map_err(DensityError::from)?;

    // Smallest-prime-factor sieve drives μ and the squarefree filter; the
    // prime window is sieved once and shared across all m.
    let spf = smallest_prime_factors(m_bound);
    let window = match domain {
        Domain::Primes => Some(sieve_window(x, 2 * x)),
        Domain::Integers => None,
    };
    let mut rhs = 0i64;
    for m in 1..=m_bound {
        let Some(mu) = moebius_from_spf(m, &spf) else {
            continue; // not squarefree
        };
        let c = count_divisible_in(f, x, &BigUint::from(m), window.as_deref())?;
        rhs += mu as i64 * c as i64;
    }
    Ok(MoebiusReport {
        x,
        domain,
        lhs,
        rhs,
        m_bound,
        equal: rhs >= 0 && lhs == rhs as u64,
    })
}

fn smallest_prime_factors(n: u64) -> Vec<u32> {
    let n = n as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// μ(m) from an spf table; None when m is not squarefree.
fn moebius_from_spf(m: u64, spf: &[u32]) -> Option<i32> {
    if m == 1 {
        return Some(1);
    }
    let mut m = m as usize;
    let mut mu = 1i32;
    while m > 1 {
        let p = spf[m] as usize;
        m /= p;
        if m % p == 0 {
            return None;
        }
        mu = -mu;
    }
    Some(mu)
}

// ---------------------------------------------------------------------------
// Triple enumeration N(X; A, B)
// ---------------------------------------------------------------------------

/// A solution of a^{d-1} b = f(n) with a squarefree, over dyadic boxes
/// n ∈ (X, 2X], a ∈ (A, 2A], b ∈ (B, 2B].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleRecord {
    pub n: u64,
    #[serde(serialize_with = "crate::serialize::biguint_string")]
    pub a: BigUint,
    #[serde(serialize_with = "crate::serialize::biguint_string")]
    pub b: BigUint,
}

/// Enumerate all triples counted by N(X; A, B): factorize f(n) for each n
/// in the window, read off the squarefree a with a^{d-1} | f(n), and range-
/// check b = f(n) / a^{d-1}.
pub fn count_triples(
    f: &IntPolynomial,
    x: u64,
    a_bound: u64,
    b_bound: u64,
    cfg: &CountConfig,
) -> Result<Vec<TripleRecord>, DensityError> {
    let k = (f.degree() - 1) as u32;
    assert!(a_bound >= 1 && b_bound >= 1);
    let mut records = Vec::new();
    let b_lo = BigUint::from(b_bound);
    let b_hi = BigUint::from(2 * b_bound);
    for n in x + 1..=2 * x {
        let v = f.evaluate(&BigInt::from(n));
        if !v.is_positive() {
            continue;
        }
        let v = v.to_biguint().unwrap();
        let fcfg = FactorConfig {
            seed: split_seed(cfg.factor.seed, n),
            ..cfg.factor.clone()
        };
        let fact = factorize_with(&v, &fcfg).map_err(DensityError::from)?;
        // a must be a squarefree product of primes with exponent >= k.
        let eligible: Vec<&BigUint> = fact
            .factors
            .iter()
            .filter(|&&(_, e)| e >= k)
            .map(|(p, _)| p)
            .collect();
        let mut subsets = vec![BigUint::one()];
        for p in eligible {
            let existing = subsets.clone();
            for s in existing {
                let candidate = &s * p;
                if candidate <= BigUint::from(2 * a_bound) {
                    subsets.push(candidate);
                }
            }
        }
        for a in subsets {
            if a <= BigUint::from(a_bound) || a > BigUint::from(2 * a_bound) {
                continue;
            }
            let apow = a.pow(k);
            let (b, rem) = v.div_rem(&apow);
            debug_assert!(rem.is_zero());
            if b > b_lo && b <= b_hi {
                records.push(TripleRecord { n, a: a.clone(), b });
            }
        }
    }
    records.sort_by(|l, r| (l.n, &l.a).cmp(&(r.n, &r.a)));
    Ok(records)
}
