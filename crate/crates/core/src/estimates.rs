//! Exact rational-arithmetic verification of the exponent algebra behind
//! the boundedness analysis: the critical diffusion exponent, the
//! Gagliardo-Nirenberg interpolation balance, the absorption budget that the
//! velocity/signal coupling estimate needs to close, and the explicit Young
//! constants. No floating point enters any comparison here; reals appear
//! only in [`young_constant`], which evaluates a closed-form constant.
//!
//! Scope note: the time-integrated parabolic regularity constants the
//! coupling estimate also leans on (maximal-regularity bounds for the heat
//! and Stokes semigroups) are existence-only and have no closed form; only
//! the exponent algebra is computable, and that is what this module checks.

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::EstimatesError;

/// Exact fraction in canonical form (gcd 1, positive denominator).
pub type Rational = num::BigRational;

/// Shorthand constructor. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A Lebesgue exponent: a rational in `[1, ∞)` or `∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Finite(Rational),
    Infinity,
}

impl Exponent {
    pub fn finite(num: i64, den: i64) -> Self {
        Exponent::Finite(rat(num, den))
    }

    /// `1/q`, with `1/∞ = 0`.
    fn inverse(&self) -> Rational {
        match self {
            Exponent::Finite(q) => q.recip(),
            Exponent::Infinity => Rational::zero(),
        }
    }

    fn is_valid(&self) -> bool {
        match self {
            Exponent::Finite(q) => *q >= Rational::one(),
            Exponent::Infinity => true,
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Critical diffusion exponent `2 − 2/N`: nonlinear diffusion stronger than
/// this keeps the fluid-free model bounded; below it, blow-up can occur.
pub fn critical_exponent(dim: i64) -> Result<Rational, EstimatesError> {
    if dim < 1 {
        return Err(EstimatesError::BadDimension(dim));
    }
    Ok(rat(2, 1) - rat(2, dim))
}

/// Interpolation query `‖D^j f‖_{L^q} ≤ C ‖D^k f‖_{L^r}^a ‖f‖_{L^s}^{1−a}`.
#[derive(Debug, Clone)]
pub struct GnQuery {
    /// Derivative order on the left-hand side.
    pub j: u32,
    /// Derivative order of the strong factor.
    pub k: u32,
    pub dim: u32,
    pub q: Exponent,
    pub r: Exponent,
    pub s: Exponent,
}

impl GnQuery {
    fn validate(&self) -> Result<(), EstimatesError> {
        if self.dim != 2 && self.dim != 3 {
            return Err(EstimatesError::InvalidQuery(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        if self.j > self.k || self.k == 0 {
            return Err(EstimatesError::InvalidQuery(format!(
                "need 0 <= j <= k with k >= 1, got j={} k={}",
                self.j, self.k
            )));
        }
        for (name, e) in [("q", &self.q), ("r", &self.r), ("s", &self.s)] {
            if !e.is_valid() {
                return Err(EstimatesError::InvalidQuery(format!("exponent {name} must be >= 1 or inf")));
            }
        }
        Ok(())
    }
}

/// The exponent `a` solving the dimensional balance, plus its admissibility.
#[derive(Debug, Clone, PartialEq)]
pub struct GnExponent {
    pub a: Rational,
    /// True iff `a ∈ [j/k, 1]`, the range the interpolation inequality
    /// actually admits. Out-of-range solutions are returned regardless so
    /// that published exponent choices can be audited.
    pub admissible: bool,
}

/// Solve `1/q = j/N + a (1/r − k/N) + (1−a)/s` exactly for `a`.
pub fn gn_exponent(query: &GnQuery) -> Result<GnExponent, EstimatesError> {
    query.validate()?;
    let n = rat(query.dim as i64, 1);
    let j = rat(query.j as i64, 1);
    let k = rat(query.k as i64, 1);
    let inv_s = query.s.inverse();
    let numer = query.q.inverse() - &j / &n - &inv_s;
    let denom = query.r.inverse() - &k / &n - &inv_s;
    if denom.is_zero() {
        return Err(EstimatesError::DegenerateBalance);
    }
    let a = numer / denom;
    let lower = j / k;
    let admissible = a >= lower && a <= Rational::one();
    Ok(GnExponent { a, admissible })
}

/// Both interpolation exponents of the coupling estimate and their sum.
///
/// `a` interpolates `‖∇c‖_{L^{θ'(p+1)}}` between `‖Δc‖_{L^{p+1}}` and
/// `‖c‖_{L^2}`; `ã` interpolates `‖u‖_{L^{θ(p+1)}}` between the Stokes
/// operator image in `L^{p+1}` and `‖u‖_{L^{l0}}`. The Young absorption
/// closing the estimate needs `a + ã < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionCheck {
    pub a: Rational,
    pub a_tilde: Rational,
    pub sum: Rational,
    /// `sum < 1`, evaluated exactly.
    pub holds: bool,
}

fn check_positive(name: &'static str, v: &Rational) -> Result<(), EstimatesError> {
    if v <= &Rational::zero() {
        return Err(EstimatesError::NonPositive(name));
    }
    Ok(())
}

/// Evaluate the absorption budget at a given `l0`:
/// `a = (5/6 − 1/(θ'(p+1))) / (7/6 − 1/(p+1))`,
/// `ã = (1/l0 − 1/(θ(p+1))) / (1/l0 + 2/3 − 1/(p+1))`, `holds ⟺ a + ã < 1`.
pub fn absorption_check(
    p: &Rational,
    theta: &Rational,
    l0: &Rational,
) -> Result<AbsorptionCheck, EstimatesError> {
    let one = Rational::one();
    if p <= &one {
        return Err(EstimatesError::NonPositive("p - 1"));
    }
    if theta <= &one {
        return Err(EstimatesError::NonPositive("theta - 1"));
    }
    check_positive("l0", l0)?;

    let a = grad_signal_exponent(p, theta)?;
    let p1 = p + &one;
    let theta_p1 = theta * &p1;
    let x = l0.recip();
    let numer = &x - theta_p1.recip();
    let denom = &x + rat(2, 3) - p1.recip();
    if denom.is_zero() {
        return Err(EstimatesError::NonPositive("a_tilde denominator"));
    }
    let a_tilde = numer / denom;
    let sum = &a + &a_tilde;
    let holds = sum < one;
    Ok(AbsorptionCheck { a, a_tilde, sum, holds })
}

/// `a = (5/6 − 1/(θ'(p+1))) / (7/6 − 1/(p+1))` with `θ' = θ/(θ−1)`.
fn grad_signal_exponent(p: &Rational, theta: &Rational) -> Result<Rational, EstimatesError> {
    let one = Rational::one();
    let theta_conj = theta / (theta - &one);
    let p1 = p + &one;
    let denom = rat(7, 6) - p1.recip();
    if denom.is_zero() {
        return Err(EstimatesError::NonPositive("a denominator"));
    }
    Ok((rat(5, 6) - (theta_conj * &p1).recip()) / denom)
}

/// Solve `a + ã(l0) = 1` exactly for `l0`: the edge of the interval on
/// which the absorption budget closes. `holds` is true strictly above the
/// returned value and false at or below it.
pub fn absorption_threshold(p: &Rational, theta: &Rational) -> Result<Rational, EstimatesError> {
    let one = Rational::one();
    if p <= &one {
        return Err(EstimatesError::NonPositive("p - 1"));
    }
    if theta <= &one {
        return Err(EstimatesError::NonPositive("theta - 1"));
    }
    let a = grad_signal_exponent(p, theta)?;
    if a.is_zero() {
        return Err(EstimatesError::NoThreshold("a = 0 makes the budget independent of l0".into()));
    }
    let p1 = p + &one;
    let beta = (theta * &p1).recip();
    let gamma = rat(2, 3) - p1.recip();
    // a + (x-beta)/(x+gamma) = 1  =>  x = (beta + (1-a) gamma) / a
    let x = (&beta + (&one - &a) * &gamma) / &a;
    if x <= Rational::zero() {
        return Err(EstimatesError::NoThreshold(format!(
            "solved 1/l0 = {x}, which is not positive"
        )));
    }
    Ok(x.recip())
}

/// Closed-form Young constant
/// `C1 = (m−1/3)/(p+m−1/3) · (eps1 (p+m−1/3)/p)^{−p/(m−1/3)}
///      · ((p+1)/p)^{(p+m−1/3)/(m−1/3)} · vol`,
/// evaluated in the log domain so large exponents cannot overflow.
pub fn young_constant(
    eps1: &Rational,
    p: &Rational,
    m: &Rational,
    vol: &Rational,
) -> Result<f64, EstimatesError> {
    check_positive("eps1", eps1)?;
    if p <= &Rational::one() {
        return Err(EstimatesError::NonPositive("p - 1"));
    }
    if m <= &rat(1, 3) {
        return Err(EstimatesError::NonPositive("m - 1/3"));
    }
    check_positive("vol", vol)?;

    let m13 = m - rat(1, 3);
    let pm13 = p + &m13;
    let lead = &m13 / &pm13;
    let base_mid = eps1 * &pm13 / p;
    let exp_mid = -(p / &m13);
    let base_last = (p + Rational::one()) / p;
    let exp_last = &pm13 / &m13;

    let log = rational_ln(&lead)
        + to_f64(&exp_mid) * rational_ln(&base_mid)
        + to_f64(&exp_last) * rational_ln(&base_last)
        + rational_ln(vol);
    Ok(log.exp())
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

fn rational_ln(r: &Rational) -> f64 {
    assert!(r.is_positive(), "ln of a nonpositive rational");
    let num = r.numer().to_f64().unwrap_or(f64::INFINITY);
    let den = r.denom().to_f64().unwrap_or(f64::INFINITY);
    num.ln() - den.ln()
}

/// The exponent orderings that the porous-medium testing-function estimate
/// rests on, each verified exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentChain {
    /// `p + 1 < p + m − 1/3`, i.e. `m > 4/3`: the strict inequality that
    /// lets the dominant Young term absorb the lower-order one.
    pub young_split_strict: bool,
    /// Interpolation exponent `2(3p+2−3m)/(3p+3m−4)` of the density bound.
    pub interp_exponent: Rational,
    /// Its admissible ceiling `2(p+1−m)/(p+m−1)`.
    pub interp_ceiling: Rational,
    pub interp_positive: bool,
    pub interp_within_ceiling: bool,
    /// All of the above.
    pub holds: bool,
}

/// Check the chain for given `m > 1`, `p > 1`.
pub fn pm_exponent_chain(m: &Rational, p: &Rational) -> Result<ExponentChain, EstimatesError> {
    let one = Rational::one();
    if m <= &one {
        return Err(EstimatesError::NonPositive("m - 1"));
    }
    if p <= &one {
        return Err(EstimatesError::NonPositive("p - 1"));
    }
    let young_split_strict = (p + &one) < (p + m - rat(1, 3));
    let three = rat(3, 1);
    let two = rat(2, 1);
    let interp_exponent =
        &two * (&three * p + &two - &three * m) / (&three * p + &three * m - rat(4, 1));
    let interp_ceiling = &two * (p + &one - m) / (p + m - &one);
    let interp_positive = interp_exponent > Rational::zero();
    let interp_within_ceiling = interp_exponent <= interp_ceiling;
    Ok(ExponentChain {
        holds: young_split_strict && interp_positive && interp_within_ceiling,
        young_split_strict,
        interp_exponent,
        interp_ceiling,
        interp_positive,
        interp_within_ceiling,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

/// One row of the `check-estimates` table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub inputs: String,
    pub result: String,
    pub status: CheckStatus,
    pub note: String,
}

/// The fixed audit table behind the `check-estimates` subcommand: every
/// computable claim of the exponent algebra, evaluated exactly and compared
/// to its expected value. One known discrepancy is reported as a warning
/// rather than a failure: the first interpolation exponent of the coupling
/// estimate evaluates to 193/191 > 1, outside the admissible range, while
/// the combined budget `a + ã < 1` still closes on the stated interval.
pub fn standard_checks() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let p = rat(25, 16);
    let theta = rat(8, 7);

    {
        let got = critical_exponent(3).unwrap();
        let ok = got == rat(4, 3);
        rows.push(CheckRow {
            name: "critical_exponent",
            inputs: "N = 3".into(),
            result: format!("{got}"),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: "expected 4/3".into(),
        });
        let got = critical_exponent(2).unwrap();
        let ok = got == rat(1, 1);
        rows.push(CheckRow {
            name: "critical_exponent",
            inputs: "N = 2".into(),
            result: format!("{got}"),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: "expected 1".into(),
        });
    }

    {
        let got = absorption_threshold(&p, &theta).unwrap();
        let ok = got == rat(579, 194) && got == rat(1737, 582);
        rows.push(CheckRow {
            name: "absorption_threshold",
            inputs: "p = 25/16, theta = 8/7".into(),
            result: format!("{got}"),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: "expected 579/194 (= 1737/582); budget holds strictly above it".into(),
        });
    }

    for (l0, expect_holds, expect_sum, note) in [
        (rat(579, 194), false, Some(rat(1, 1)), "boundary: sum = 1 exactly, holds = false"),
        (rat(3, 1), true, Some(rat(14284, 14325)), "upper endpoint: sum = 14284/14325 < 1"),
        (rat(2, 1), false, None, "well below threshold: 1/l0 too large"),
    ] {
        let got = absorption_check(&p, &theta, &l0).unwrap();
        let sum_ok = expect_sum.as_ref().map_or(true, |s| &got.sum == s);
        let ok = got.holds == expect_holds && sum_ok;
        rows.push(CheckRow {
            name: "absorption_check",
            inputs: format!("p = 25/16, theta = 8/7, l0 = {l0}"),
            result: format!("a + a~ = {} ({})", got.sum, if got.holds { "holds" } else { "fails" }),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: note.into(),
        });
    }

    {
        // L^{9/2} control of c^2 via its gradient: a = 14/15, and the
        // gradient factor carries power 3a/2 = 7/5
        let q = GnQuery {
            j: 0,
            k: 1,
            dim: 3,
            q: Exponent::finite(9, 2),
            r: Exponent::finite(2, 1),
            s: Exponent::finite(1, 1),
        };
        let got = gn_exponent(&q).unwrap();
        let power = rat(3, 2) * &got.a;
        let ok = got.a == rat(14, 15) && got.admissible && power == rat(7, 5);
        rows.push(CheckRow {
            name: "gn_exponent",
            inputs: "j=0 k=1 N=3 q=9/2 r=2 s=1".into(),
            result: format!("a = {}, admissible = {}", got.a, got.admissible),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: format!("3a/2 = {power}, expected 7/5"),
        });
    }

    {
        // the coupling estimate's first interpolation exponent
        let q = GnQuery {
            j: 1,
            k: 2,
            dim: 3,
            q: Exponent::finite(41, 2),
            r: Exponent::finite(41, 16),
            s: Exponent::finite(2, 1),
        };
        let got = gn_exponent(&q).unwrap();
        let value_ok = got.a == rat(193, 191) && !got.admissible;
        rows.push(CheckRow {
            name: "gn_exponent",
            inputs: "j=1 k=2 N=3 q=41/2 r=41/16 s=2".into(),
            result: format!("a = {}, admissible = {}", got.a, got.admissible),
            status: if value_ok { CheckStatus::Warn } else { CheckStatus::Fail },
            note: "a = 193/191 > 1 falls outside the admissible interpolation range (0,1); \
                   surfaced for audit; the combined absorption budget above still closes"
                .into(),
        });
    }

    {
        let got = pm_exponent_chain(&rat(3, 2), &p).unwrap();
        rows.push(CheckRow {
            name: "pm_exponent_chain",
            inputs: "m = 3/2, p = 25/16".into(),
            result: format!(
                "p+1 < p+m-1/3: {}; interp {} <= ceiling {}: {}",
                got.young_split_strict, got.interp_exponent, got.interp_ceiling, got.interp_within_ceiling
            ),
            status: if got.young_split_strict { CheckStatus::Pass } else { CheckStatus::Fail },
            note: "strict Young split requires m > 4/3".into(),
        });
    }

    {
        // self-check of the log-domain evaluation at the point where the
        // middle factor's base is 1 and the constant simplifies
        let m = rat(3, 2);
        let eps1 = &p / (&p + &m - rat(1, 3));
        let got = young_constant(&eps1, &p, &m, &rat(1, 1)).unwrap();
        let m13 = to_f64(&(&m - rat(1, 3)));
        let pm13 = to_f64(&(&p + &m - rat(1, 3)));
        let pf = to_f64(&p);
        let direct = m13 / pm13 * ((pf + 1.0) / pf).powf(pm13 / m13);
        let ok = (got - direct).abs() <= 1e-12 * direct.abs();
        rows.push(CheckRow {
            name: "young_constant",
            inputs: "eps1 = p/(p+m-1/3), p = 25/16, m = 3/2, vol = 1".into(),
            result: format!("{got:.12e}"),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: "log-domain evaluation matches the simplified closed form".into(),
        });
    }

    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn critical_exponent_values() {
        assert_eq!(critical_exponent(3).unwrap(), rat(4, 3));
        assert_eq!(critical_exponent(2).unwrap(), rat(1, 1));
        assert_eq!(critical_exponent(1).unwrap(), rat(0, 1));
        assert!(critical_exponent(0).is_err());
        assert!(critical_exponent(-2).is_err());
    }

    #[test]
    fn gn_exponent_known_values() {
        let q = GnQuery {
            j: 0,
            k: 1,
            dim: 3,
            q: Exponent::finite(9, 2),
            r: Exponent::finite(2, 1),
            s: Exponent::finite(1, 1),
        };
        let got = gn_exponent(&q).unwrap();
        assert_eq!(got.a, rat(14, 15));
        assert!(got.admissible);
        assert_eq!(rat(3, 2) * got.a, rat(7, 5));

        let q = GnQuery {
            j: 1,
            k: 2,
            dim: 3,
            q: Exponent::finite(41, 2),
            r: Exponent::finite(41, 16),
            s: Exponent::finite(2, 1),
        };
        let got = gn_exponent(&q).unwrap();
        assert_eq!(got.a, rat(193, 191));
        assert!(!got.admissible);
    }

    #[test]
    fn gn_identity_interpolation() {
        // q = r with j = k forces a = 1
        let q = GnQuery {
            j: 1,
            k: 1,
            dim: 3,
            q: Exponent::finite(7, 2),
            r: Exponent::finite(7, 2),
            s: Exponent::finite(13, 4),
        };
        let got = gn_exponent(&q).unwrap();
        assert_eq!(got.a, rat(1, 1));
        assert!(got.admissible);
    }

    #[test]
    fn gn_degenerate_balance_is_an_error() {
        // r = s and k = 0 would degenerate, but k >= 1 is enforced; build a
        // degenerate case via 1/r - k/N - 1/s = 0: N=3, k=1, r=2, s=6
        let q = GnQuery {
            j: 0,
            k: 1,
            dim: 3,
            q: Exponent::finite(2, 1),
            r: Exponent::finite(2, 1),
            s: Exponent::finite(6, 1),
        };
        assert!(matches!(gn_exponent(&q), Err(EstimatesError::DegenerateBalance)));
    }

    #[test]
    fn absorption_check_pinned_values() {
        let p = rat(25, 16);
        let theta = rat(8, 7);

        let boundary = absorption_check(&p, &theta, &rat(579, 194)).unwrap();
        assert_eq!(boundary.sum, rat(1, 1));
        assert!(!boundary.holds);

        let at_three = absorption_check(&p, &theta, &rat(3, 1)).unwrap();
        assert_eq!(at_three.sum, rat(14284, 14325));
        assert!(at_three.holds);

        let at_two = absorption_check(&p, &theta, &rat(2, 1)).unwrap();
        assert!(!at_two.holds);
        assert!(at_two.a_tilde > Rational::zero());

        // a is independent of l0 and equals 193/191 for these p, theta
        assert_eq!(boundary.a, rat(193, 191));
    }

    #[test]
    fn threshold_matches_hand_solved_value_and_is_consistent() {
        let p = rat(25, 16);
        let theta = rat(8, 7);
        let l0 = absorption_threshold(&p, &theta).unwrap();
        assert_eq!(l0, rat(579, 194));
        assert_eq!(l0, rat(1737, 582)); // same canonical rational
        let at = absorption_check(&p, &theta, &l0).unwrap();
        assert_eq!(at.sum, rat(1, 1));
    }

    #[test]
    fn holds_is_monotone_against_brute_force_scan() {
        // scan 1000 rational points of (2, 3]; holds must flip exactly at
        // the threshold returned by the exact solve
        let p = rat(25, 16);
        let theta = rat(8, 7);
        let threshold = absorption_threshold(&p, &theta).unwrap();
        for i in 1..=1000i64 {
            let l0 = rat(2000 + i, 1000);
            let res = absorption_check(&p, &theta, &l0).unwrap();
            assert_eq!(
                res.holds,
                l0 > threshold,
                "holds mismatch at l0 = {l0} vs threshold {threshold}"
            );
        }
    }

    #[test]
    fn permuted_equivalent_inputs_give_identical_canonical_results() {
        let a = absorption_check(&rat(25, 16), &rat(8, 7), &rat(3, 1)).unwrap();
        let b = absorption_check(&rat(50, 32), &rat(24, 21), &rat(51, 17)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn young_constant_simplification_point_and_volume_linearity() {
        let p = rat(25, 16);
        let m = rat(3, 2);
        let eps1 = &p / (&p + &m - rat(1, 3));
        let v1 = young_constant(&eps1, &p, &m, &rat(1, 1)).unwrap();
        let m13: f64 = 3.0 / 2.0 - 1.0 / 3.0;
        let pm13 = 25.0 / 16.0 + m13;
        let pf: f64 = 25.0 / 16.0;
        let direct = m13 / pm13 * ((pf + 1.0) / pf).powf(pm13 / m13);
        assert!((v1 - direct).abs() < 1e-12 * direct);

        let v2 = young_constant(&eps1, &p, &m, &rat(2, 1)).unwrap();
        assert!((v2 - 2.0 * v1).abs() < 1e-12 * v2);

        assert!(young_constant(&rat(-1, 1), &p, &m, &rat(1, 1)).is_err());
        assert!(young_constant(&rat(1, 1), &p, &rat(1, 3), &rat(1, 1)).is_err());
    }

    #[test]
    fn young_constant_direct_vs_log_domain() {
        // independent direct evaluation (plain powf product) as the oracle
        let eps1 = rat(1, 1);
        let p = rat(25, 16);
        let m = rat(3, 2);
        let got = young_constant(&eps1, &p, &m, &rat(1, 1)).unwrap();
        let pf = 25.0 / 16.0;
        let mf: f64 = 1.5;
        let m13 = mf - 1.0 / 3.0;
        let pm13 = pf + m13;
        let direct =
            m13 / pm13 * (1.0 * pm13 / pf).powf(-pf / m13) * ((pf + 1.0) / pf).powf(pm13 / m13);
        assert!((got - direct).abs() < 1e-12 * direct.abs());
    }

    #[test]
    fn exponent_chain_hinges_on_m() {
        let chain = pm_exponent_chain(&rat(3, 2), &rat(25, 16)).unwrap();
        assert!(chain.young_split_strict);

        let at_boundary = pm_exponent_chain(&rat(4, 3), &rat(25, 16)).unwrap();
        assert!(!at_boundary.young_split_strict);
        assert!(!at_boundary.holds);

        let below = pm_exponent_chain(&rat(6, 5), &rat(4, 1)).unwrap();
        assert!(!below.young_split_strict);
        assert!(!below.holds);

        // inside the hypotheses (m > 4/3, p > 2 + m) the whole chain holds;
        // at m = 3/2, p = 4: 2(12 + 2 - 9/2)/(12 + 9/2 - 4) = 38/25
        let good = pm_exponent_chain(&rat(3, 2), &rat(4, 1)).unwrap();
        assert!(good.holds);
        assert_eq!(good.interp_exponent, rat(38, 25));
        assert_eq!(good.interp_ceiling, rat(14, 9));
    }

    #[test]
    fn standard_checks_pass_with_the_single_expected_warning() {
        let rows = standard_checks();
        assert!(rows.len() >= 3);
        assert!(rows.iter().all(|r| r.status != CheckStatus::Fail));
        let warns: Vec<_> = rows.iter().filter(|r| r.status == CheckStatus::Warn).collect();
        assert_eq!(warns.len(), 1);
        assert!(warns[0].result.contains("193/191"));
    }

    proptest! {
        // plugging the solved exponent back reproduces 1/q exactly
        #[test]
        fn gn_balance_round_trips(jn in 0u32..2, qn in 1i64..30, rn in 1i64..30, sn in 1i64..30) {
            let q = GnQuery {
                j: jn,
                k: 2,
                dim: 3,
                q: Exponent::Finite(rat(qn, 1) + rat(1, 2)),
                r: Exponent::Finite(rat(rn, 1) + rat(1, 3)),
                s: Exponent::Finite(rat(sn, 1) + rat(1, 5)),
            };
            if let Ok(got) = gn_exponent(&q) {
                let n = rat(3, 1);
                let lhs = q.q.inverse();
                let rhs = rat(jn as i64, 1) / &n
                    + &got.a * (q.r.inverse() - rat(2, 1) / &n)
                    + (Rational::one() - &got.a) * q.s.inverse();
                prop_assert_eq!(lhs, rhs);
            }
        }

        // the threshold, when it exists, is exactly where holds flips
        #[test]
        fn threshold_separates_holds(pn in 17i64..40, tn in 8i64..20, ln in 1i64..60) {
            let p = rat(pn, 16);
            let theta = rat(tn, 7);
            if let Ok(th) = absorption_threshold(&p, &theta) {
                let l0 = rat(ln, 10);
                let res = absorption_check(&p, &theta, &l0).unwrap();
                prop_assert_eq!(res.holds, l0 > th);
            }
        }
    }
}
