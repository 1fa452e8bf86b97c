//! Determinant-method exponent bookkeeping, all in exact rational
//! arithmetic: monomial counting, the ξ exponent, the ordered list of
//! largest monomial sizes T₁^{-a} T₂^{-b}, admissible M-ranges and the
//! final feasibility chain. No floating point anywhere in this module.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("degree {0} too small (need >= {1})")]
    DegreeTooSmall(u32, u32),
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(Rational64),
    #[error("size ratio tau must be >= 1, got {0}")]
    TauTooSmall(Rational64),
}

/// Number of monomials of degree D in N variables: binom(N+D-1, D).
pub fn monomial_count(degree: u64, variables: u64) -> u128 {
    if degree == 0 {
        return 1;
    }
    if variables == 0 {
        return 0;
    }
    binom(variables + degree - 1, degree)
}

fn binom(n: u64, k: u64) -> u128 {
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

/// The closed-form exponent ξ = (d-1)(5d+2)/2 governing the determinant
/// bound Δ ≪ M^{-ξ} for d >= 4.
pub fn xi_exponent(d: u32) -> Result<Rational64, BoundsError> {
    if d < 4 {
        return Err(BoundsError::DegreeTooSmall(d, 4));
    }
    let d = d as i64;
    Ok(Rational64::new((d - 1) * (5 * d + 2), 2))
}

/// One monomial in the α-variables (sizes T₁^{-1}) and at most one
/// β-variable (size T₂^{-1}).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialSize {
    /// Total α-degree a: the size contributes T₁^{-a}.
    pub t1_exp: u32,
    /// β-degree b ∈ {0, 1}: contributes T₂^{-b}.
    pub t2_exp: u32,
    /// Exponents of α_1..α_{d-1}.
    pub alpha_exponents: Vec<u32>,
    /// Which β variable, if any (0-based).
    pub beta_index: Option<usize>,
}

impl MonomialSize {
    /// Ordering key a + τ·b (smaller key = larger monomial size).
    fn key(&self, tau: Rational64) -> Rational64 {
        Rational64::from(self.t1_exp as i64) + tau * Rational64::from(self.t2_exp as i64)
    }

    /// Label like `a1^2*a2` or `b1`.
    pub fn label(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, &e) in self.alpha_exponents.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("a{}", i + 1)),
                _ => parts.push(format!("a{}^{}", i + 1, e)),
            }
        }
        if let Some(b) = self.beta_index {
            parts.push(format!("b{}", b + 1));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// The R largest monomial sizes over the (d-1) α-variables and (d-1)
/// β-variables (β-degree at most 1 per monomial, matching the entry shape
/// (s+α)^{ε₁}(P+β)^{ε₂} after Taylor expansion), ordered by decreasing size
/// a + τ·b with ties broken toward smaller β-degree. Returns the list and
/// the product exponent sums (Σa, Σb).
pub fn largest_monomials(
    d: u32,
    tau: Rational64,
    r: usize,
) -> Result<(Vec<MonomialSize>, (u64, u64)), BoundsError> {
    if d < 2 {
        return Err(BoundsError::DegreeTooSmall(d, 2));
    }
    if tau < Rational64::from(1) {
        return Err(BoundsError::TauTooSmall(tau));
    }
    assert!(r >= 1);
    let vars = (d - 1) as usize;
    let mut items: Vec<MonomialSize> = Vec::new();
    let mut degree = 0u32;
    loop {
        for alpha in compositions(degree, vars) {
            items.push(MonomialSize {
                t1_exp: degree,
                t2_exp: 0,
                alpha_exponents: alpha.clone(),
                beta_index: None,
            });
            for b in 0..vars {
                items.push(MonomialSize {
                    t1_exp: degree,
                    t2_exp: 1,
                    alpha_exponents: alpha.clone(),
                    beta_index: Some(b),
                });
            }
        }
        // Anything not yet generated has α-degree > `degree`, hence key
        // strictly above `degree`; stop once the R smallest keys are settled.
        if items.len() >= r {
            items.sort_by(|x, y| {
                x.key(tau)
                    .cmp(&y.key(tau))
                    .then(x.t2_exp.cmp(&y.t2_exp))
                    .then(y.alpha_exponents.cmp(&x.alpha_exponents))
                    .then(x.beta_index.cmp(&y.beta_index))
            });
            let frontier = Rational64::from(degree as i64 + 1);
            if items[r - 1].key(tau) <= frontier {
                break;
            }
        }
        degree += 1;
    }
    items.truncate(r);
    let sum_a = items.iter().map(|m| m.t1_exp as u64).sum();
    let sum_b = items.iter().map(|m| m.t2_exp as u64).sum();
    Ok((items, (sum_a, sum_b)))
}

/// All exponent vectors of total degree `degree` in `vars` variables,
/// lexicographically descending.
fn compositions(degree: u32, vars: usize) -> Vec<Vec<u32>> {
    fn rec(remaining: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            rec(remaining - e, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if vars == 0 {
        if degree == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(degree, vars, &mut Vec::new(), &mut out);
    out
}

/// Admissible M-range as exponents of X, for A = X^{a_exp}, B = X^{b_exp}:
///   d >= 4:  (AB)^{2d/((5d+2)(d-1))} ≪ M ≪ min(X, A)^{1/(d-1)}
///   d  = 3:  (AB)^{3/11} X^{-2/11}   ≪ M ≪ min(X, A)^{1/2}
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MRange {
    #[serde(serialize_with = "crate::serialize::ratio64_string")]
    pub lower: Rational64,
    #[serde(serialize_with = "crate::serialize::ratio64_string")]
    pub upper: Rational64,
    pub nonempty: bool,
}

pub fn m_range(d: u32, a_exp: Rational64, b_exp: Rational64) -> Result<MRange, BoundsError> {
    if d < 3 {
        return Err(BoundsError::DegreeTooSmall(d, 3));
    }
    if !a_exp.is_positive() || !b_exp.is_positive() {
        return Err(BoundsError::NonPositiveExponent(if a_exp.is_positive() {
            b_exp
        } else {
            a_exp
        }));
    }
    let di = d as i64;
    let lower = if d == 3 {
        (a_exp + b_exp) * Rational64::new(3, 11) - Rational64::new(2, 11)
    } else {
        (a_exp + b_exp) * Rational64::new(2 * di, (5 * di + 2) * (di - 1))
    };
    let one = Rational64::from(1);
    let upper = one.min(a_exp) / Rational64::from(di - 1);
    Ok(MRange {
        lower,
        upper,
        nonempty: lower < upper,
    })
}

/// The closing step: with M = X^{m_exp}, the solution count is
/// ≪ M^{1-1/d} X^{1-1/d+ε}, i.e. X to the exponent (1-1/d)(1+m_exp); the
/// saving suffices iff (d-1)·m_exp < 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinalExponent {
    #[serde(serialize_with = "crate::serialize::ratio64_string")]
    pub n_bound_exp: Rational64,
    pub sufficient: bool,
}

pub fn final_exponent(d: u32, m_exp: Rational64) -> Result<FinalExponent, BoundsError> {
    if d < 2 {
        return Err(BoundsError::DegreeTooSmall(d, 2));
    }
    if !m_exp.is_positive() {
        return Err(BoundsError::NonPositiveExponent(m_exp));
    }
    let di = d as i64;
    let n_bound_exp = Rational64::new(di - 1, di) * (Rational64::from(1) + m_exp);
    let sufficient = Rational64::from(di - 1) * m_exp < Rational64::from(1);
    Ok(FinalExponent {
        n_bound_exp,
        sufficient,
    })
}

/// X-exponent of the auxiliary-curve estimate N(X;A,B) ≪ X^δ B(X/B+1)^{1/(d-1)}
/// for B = X^{b_exp}: b + max(1-b, 0)/(d-1).
pub fn large_b_exponent(d: u32, b_exp: Rational64) -> Result<Rational64, BoundsError> {
    if d < 2 {
        return Err(BoundsError::DegreeTooSmall(d, 2));
    }
    if !b_exp.is_positive() {
        return Err(BoundsError::NonPositiveExponent(b_exp));
    }
    let rest = (Rational64::from(1) - b_exp).max(Rational64::zero());
    Ok(b_exp + rest / Rational64::from(d as i64 - 1))
}

/// Full exponent bookkeeping for one degree: counts, the monomial list at
/// R = d², the ξ cross-check, the admissible M-range and the closing
/// feasibility, every inequality re-evaluated in exact rationals.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub d: u32,
    /// R = d²: monomials s_i t_j entering the determinant.
    pub r: u32,
    /// S = d(d+1)/2: monomials of α-degree <= 2.
    pub s: u32,
    #[serde(serialize_with = "crate::serialize::ratio64_string")]
    pub tau: Rational64,
    pub monomials: Vec<MonomialSize>,
    pub monomial_labels: Vec<String>,
    /// (Σa, Σb): Δ ≪ T₁^{-Σa} T₂^{-Σb}.
    pub exponent_sums: (u64, u64),
    /// Closed form ξ = (d-1)(5d+2)/2, d >= 4 only.
    #[serde(serialize_with = "opt_ratio_string")]
    pub xi: Option<Rational64>,
    pub xi_matches_enumeration: Option<bool>,
    #[serde(serialize_with = "crate::serialize::ratio64_string")]
    pub a_exp: Rational64,
    #[serde(serialize_with = "crate::serialize::ratio64_string")]
    pub b_exp: Rational64,
    pub m_range: MRange,
    pub final_exponent: FinalExponent,
    /// The governing inequalities, re-evaluated exactly.
    pub feasibility: Vec<(String, bool)>,
}

fn opt_ratio_string<S: serde::Serializer>(
    v: &Option<Rational64>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => crate::serialize::ratio64_string(r, s),
        None => s.serialize_none(),
    }
}

/// Assemble the full report for degree d with A = X^{a_exp}, B = X^{b_exp}.
pub fn bound_report(
    d: u32,
    a_exp: Rational64,
    b_exp: Rational64,
) -> Result<BoundReport, BoundsError> {
    if d < 3 {
        return Err(BoundsError::DegreeTooSmall(d, 3));
    }
    let r = d * d;
    let s = d * (d + 1) / 2;
    // T₁ ≍ M and T₂ ≍ X with M ≈ X^{1/(d-1)} give τ = d-1; for d = 3 the
    // dyadic case A = B = X puts M essentially at X^{4/11}, τ = 11/4.
    let tau = if d == 3 {
        Rational64::new(11, 4)
    } else {
        Rational64::from(d as i64 - 1)
    };
    let (monomials, exponent_sums) = largest_monomials(d, tau, r as usize)?;
    let xi = if d >= 4 { Some(xi_exponent(d)?) } else { None };
    let xi_matches_enumeration = xi.map(|x| x == Rational64::from(exponent_sums.0 as i64));
    let m_range = m_range(d, a_exp, b_exp)?;
    let final_exp = final_exponent(d, m_range.lower)?;
    let di = d as i64;
    let feasibility = vec![
        (
            format!("sum_{{m<=2}} n(m,{}) = {} < {} = d^2", d - 1, s, r),
            (s as u64) < r as u64,
        ),
        (
            format!("sum_{{m<=3}} n(m,{}) >= d^2", d - 1),
            (0..=3u64)
                .map(|m| monomial_count(m, (d - 1) as u64))
                .sum::<u128>()
                >= r as u128,
        ),
        ("m_range nonempty".to_string(), m_range.nonempty),
        (
            format!(
                "(d-1) * m_lower = {} < 1",
                Rational64::from(di - 1) * m_range.lower
            ),
            final_exp.sufficient,
        ),
        (
            format!("4d/(5d+2) = {} < 4/5", Rational64::new(4 * di, 5 * di + 2)),
            Rational64::new(4 * di, 5 * di + 2) < Rational64::new(4, 5),
        ),
    ];
    let labels = monomials.iter().map(MonomialSize::label).collect();
    Ok(BoundReport {
        d,
        r,
        s,
        tau,
        monomials,
        monomial_labels: labels,
        exponent_sums,
        xi,
        xi_matches_enumeration,
        a_exp,
        b_exp,
        m_range,
        final_exponent: final_exp,
        feasibility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn monomial_count_examples() {
        assert_eq!(monomial_count(2, 3), 6);
        assert_eq!(monomial_count(0, 7), 1);
        assert_eq!(monomial_count(0, 0), 1);
        assert_eq!(monomial_count(3, 0), 0);
        // Σ_{m<=2} n(m, d-1) = d(d+1)/2 for d = 3: 1 + 2 + 3 = 6 < 9 = d².
        let d = 3u64;
        let s: u128 = (0..=2).map(|m| monomial_count(m, d - 1)).sum();
        assert_eq!(s, 6);
        assert!(s < (d * d) as u128);
    }

    #[test]
    fn displayed_count_inequalities_all_degrees() {
        for d in 3u64..=12 {
            let s2: u128 = (0..=2).map(|m| monomial_count(m, d - 1)).sum();
            let s3: u128 = (0..=3).map(|m| monomial_count(m, d - 1)).sum();
            assert_eq!(s2, (d * (d + 1) / 2) as u128);
            assert!(s2 < (d * d) as u128, "d = {d}");
            assert!(s3 >= (d * d) as u128, "d = {d}");
        }
    }

    #[test]
    fn xi_closed_form() {
        assert_eq!(xi_exponent(4).unwrap(), rat(33, 1));
        assert_eq!(xi_exponent(5).unwrap(), rat(54, 1));
        assert!(xi_exponent(3).is_err());
    }

    #[test]
    fn xi_matches_enumeration_oracle() {
        // Independent oracle: enumerate the d² largest monomials at
        // τ = d-1 and sum the α-exponents.
        for d in 4u32..=12 {
            let tau = Rational64::from(d as i64 - 1);
            let (_, (sum_a, _)) = largest_monomials(d, tau, (d * d) as usize).unwrap();
            assert_eq!(
                Rational64::from(sum_a as i64),
                xi_exponent(d).unwrap(),
                "d = {d}"
            );
        }
    }

    #[test]
    fn d3_monomial_list_matches_expected_order() {
        let (monos, sums) = largest_monomials(3, rat(11, 4), 9).unwrap();
        let labels: Vec<String> = monos.iter().map(MonomialSize::label).collect();
        assert_eq!(
            labels,
            vec!["1", "a1", "a2", "a1^2", "a1*a2", "a2^2", "b1", "b2", "a1^3"]
        );
        assert_eq!(sums, (11, 2));
    }

    #[test]
    fn d4_tie_break_minimizes_beta() {
        // At τ = 3 the α-cubics tie with the β monomials; preferring
        // smaller β-degree gives sums (33, 0).
        let (_, sums) = largest_monomials(4, rat(3, 1), 16).unwrap();
        assert_eq!(sums, (33, 0));
    }

    #[test]
    fn r1_gives_constant() {
        let (monos, sums) = largest_monomials(5, rat(4, 1), 1).unwrap();
        assert_eq!(monos.len(), 1);
        assert_eq!((monos[0].t1_exp, monos[0].t2_exp), (0, 0));
        assert_eq!(sums, (0, 0));
    }

    #[test]
    fn product_exponents_monotone_in_r() {
        let tau = rat(11, 4);
        let mut prev = (0u64, 0u64);
        for r in 1..=20usize {
            let (_, sums) = largest_monomials(3, tau, r).unwrap();
            assert!(sums.0 >= prev.0 && sums.1 >= prev.1, "r = {r}");
            prev = sums;
        }
    }

    #[test]
    fn m_range_examples() {
        let r = m_range(3, rat(1, 1), rat(1, 1)).unwrap();
        assert_eq!(r.lower, rat(4, 11));
        assert_eq!(r.upper, rat(1, 2));
        assert!(r.nonempty);

        let r = m_range(4, rat(1, 1), rat(1, 1)).unwrap();
        assert_eq!(r.lower, rat(8, 33));
        assert_eq!(r.upper, rat(1, 3));
        assert!(r.nonempty);
        // Feasibility driver: (d-1)·lower = 8/11 < 1 for d = 4.
        assert_eq!(rat(3, 1) * r.lower, rat(8, 11));
        assert!(rat(3, 1) * r.lower < rat(1, 1));
    }

    #[test]
    fn m_range_nonempty_and_sufficient_3_to_12() {
        for d in 3u32..=12 {
            let r = m_range(d, rat(1, 1), rat(1, 1)).unwrap();
            assert!(r.nonempty, "d = {d}");
            let fe = final_exponent(d, r.lower).unwrap();
            assert!(fe.sufficient, "d = {d}");
        }
    }

    #[test]
    fn final_exponent_examples() {
        let fe = final_exponent(3, rat(4, 11)).unwrap();
        assert_eq!(fe.n_bound_exp, rat(10, 11));
        assert!(fe.sufficient);

        let fe = final_exponent(4, rat(8, 33)).unwrap();
        assert!(fe.sufficient);

        // Boundary: strict inequality fails at m = 1/2 for d = 3.
        let fe = final_exponent(3, rat(1, 2)).unwrap();
        assert!(!fe.sufficient);
    }

    #[test]
    fn large_b_exponent_examples() {
        assert_eq!(large_b_exponent(3, rat(9, 10)).unwrap(), rat(19, 20));
        assert_eq!(large_b_exponent(3, rat(1, 1)).unwrap(), rat(1, 1));
        assert_eq!(large_b_exponent(4, rat(9, 10)).unwrap(), rat(14, 15));
        // B above X contributes nothing extra from the X/B term.
        assert_eq!(large_b_exponent(3, rat(3, 2)).unwrap(), rat(3, 2));
    }

    #[test]
    fn bound_report_d3() {
        let rep = bound_report(3, rat(1, 1), rat(1, 1)).unwrap();
        assert_eq!(rep.r, 9);
        assert_eq!(rep.s, 6);
        assert_eq!(rep.exponent_sums, (11, 2));
        assert_eq!(rep.m_range.lower, rat(4, 11));
        assert_eq!(rep.m_range.upper, rat(1, 2));
        assert!(rep.final_exponent.sufficient);
        assert!(rep.feasibility.iter().all(|(_, ok)| *ok));
        assert_eq!(rep.xi, None);
    }

    #[test]
    fn bound_report_d5() {
        let rep = bound_report(5, rat(1, 1), rat(1, 1)).unwrap();
        assert_eq!(rep.xi, Some(rat(54, 1)));
        assert_eq!(rep.xi_matches_enumeration, Some(true));
        assert!(rep.feasibility.iter().all(|(_, ok)| *ok));
    }
}
