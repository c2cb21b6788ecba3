//! Coherency consequences of frequency-mimicking assertions: the all-FM
//! family and its sum bound, implied reductions, forced extensions, the
//! interior-mass identity of extended families, and the `(alpha, beta)`
//! line geometry of single conditional probabilities.

use alloc::vec::Vec;

use num_rational::Ratio;

use crate::completions::{build_predictive, CompletionKind, PanAssertion};
use crate::error::{Error, Result};
use crate::exch::{invert_to_mass, reduce_mass_to, reduce_predictive, MassFunction};
use crate::special::{harmonic_sum, log_sum_exp, CompensatedSum};

/// Upper bound on `q1` when every interior count mimics its frequency:
/// `(1 - q0) / (2 [N / (N + 1)] H(N))`.
pub fn theorem1_bound(n: usize, q0: f64) -> f64 {
    let nf = n as f64;
    (1.0 - q0) / (2.0 * (nf / (nf + 1.0)) * harmonic_sum(n))
}

// Relative slack for q1 sitting exactly on the bound.
const BOUND_SLACK: f64 = 1e-12;

/// The unique mass function of `S_{N+1}` with `p[a] = a / N` for
/// `a = 1..N-1`, parameterized by its first two components.
pub fn theorem1_mass(n: usize, q0: f64, q1: f64) -> Result<MassFunction> {
    if n < 1 {
        return Err(Error::Dimension { expected: 1, found: 0 });
    }
    if !(0.0..1.0).contains(&q0) || !(q1 >= 0.0) {
        return Err(Error::InvalidMass("need q0 in [0, 1) and q1 >= 0"));
    }
    let bound = theorem1_bound(n, q0);
    if q1 > bound * (1.0 + BOUND_SLACK) {
        return Err(Error::BoundViolation { q1, bound });
    }
    let nf = n as f64;
    let mut values = Vec::with_capacity(n + 2);
    values.push(q0);
    values.push(q1);
    for a in 2..=n {
        values.push(q1 / a as f64 * (nf / (n - a + 1) as f64));
    }
    let last = 1.0 - q0 - 2.0 * q1 * (nf / (nf + 1.0)) * harmonic_sum(n);
    values.push(last.max(0.0));
    MassFunction::from_linear(&values)
}

/// Both sides of the sum bound for the all-FM family reduced to `M` events:
/// `lhs = sum_{a=1}^{M-1} q_M[a]`, `rhs = 2^M [(N + 2 - M) / (N + 1)] q1`.
pub fn theorem2_sum_bound_check(n: usize, m: usize, q0: f64, q1: f64) -> Result<(f64, f64)> {
    if m == 0 || m > n {
        return Err(Error::Dimension { expected: n, found: m });
    }
    let reduced = reduce_mass_to(&theorem1_mass(n, q0, q1)?, m)?;
    let mut lhs = CompensatedSum::default();
    for a in 1..m {
        lhs.add(reduced.get(a));
    }
    let rhs = libm::pow(2.0, m as f64) * ((n + 2 - m) as f64 / (n + 1) as f64) * q1;
    Ok((lhs.value(), rhs))
}

/// The assertions `Pan[a1, a2 - (N - n), pL, pU]` for `n = N-1` down to
/// `N - (a2 - a1)`.
pub fn implied_reductions(assertion: &PanAssertion) -> Vec<PanAssertion> {
    let (n, a1, a2) = (assertion.n(), assertion.a1(), assertion.a2());
    let n0 = n - (a2 - a1);
    (n0..n)
        .rev()
        .map(|level| {
            PanAssertion::new(
                level,
                a1,
                a2 - (n - level),
                assertion.p_lower(),
                assertion.p_upper(),
            )
            .expect("reduced windows inherit validity")
        })
        .collect()
}

/// Builds the completed predictive vector, reduces it level by level down to
/// `N - (a2 - a1)`, and returns the largest `|p_n[a] - a / n|` over every
/// implied window.
pub fn verify_theorem3(assertion: &PanAssertion, kind: CompletionKind) -> Result<f64> {
    let (n, a1, a2) = (assertion.n(), assertion.a1(), assertion.a2());
    let mut p = build_predictive(assertion, kind)?;
    let mut worst: f64 = 0.0;
    let mut level = n;
    loop {
        let top = a2 - (n - level);
        for a in a1..=top {
            worst = worst.max(libm::fabs(p.get(a) - a as f64 / level as f64));
        }
        if top == a1 {
            return Ok(worst);
        }
        p = reduce_predictive(&p)?;
        level -= 1;
    }
}

/// The frequency-mimicking values `p_{N+1}[a] = a / (N + 1)` forced on
/// `a in [a1, a2 + 1]` once `p_{N+1}[a_star] = a_star / (N + 1)` is added.
///
/// Runs the one-step extension equations forward then backward from
/// `a_star` in exact rational arithmetic.
pub fn forced_extension(assertion: &PanAssertion, a_star: usize) -> Result<Vec<(usize, Ratio<i64>)>> {
    let (n, a1, a2) = (assertion.n(), assertion.a1(), assertion.a2());
    let (n128, s128) = (n as u128, a_star as u128);
    if s128 * n128 < a1 as u128 * (n128 + 1) || s128 * n128 > a2 as u128 * (n128 + 1) {
        return Err(Error::NotExtendible { a: a_star });
    }
    let n_i = n as i64;
    let fm = |a: usize, level: i64| Ratio::new(a as i64, level);
    let one = Ratio::from_integer(1);

    let seed = fm(a_star, n_i + 1);
    let mut upward = Vec::new();
    let mut cur = seed;
    for a in a_star..=a2 {
        let next = one + cur - cur / fm(a, n_i);
        upward.push((a + 1, next));
        cur = next;
    }
    let mut downward = Vec::new();
    let mut cur = seed;
    for a in (a1 + 1..=a_star).rev() {
        let lower_fm = fm(a - 1, n_i);
        let prev = lower_fm * (one - cur) / (one - lower_fm);
        downward.push((a - 1, prev));
        cur = prev;
    }
    let mut forced: Vec<(usize, Ratio<i64>)> = downward.into_iter().rev().collect();
    forced.push((a_star, seed));
    forced.extend(upward);
    Ok(forced)
}

/// An assertion at order `N` extended by `K` further events, with the
/// bounds asserted at order `N + K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionScenario {
    pub base: PanAssertion,
    pub k: usize,
    pub p_lower_ext: f64,
    pub p_upper_ext: f64,
}

impl ExtensionScenario {
    /// Bounds halfway between the forced window ends and `0`/`1`.
    pub fn with_midpoint_bounds(base: PanAssertion, k: usize) -> Self {
        let total = (base.n() + k + 1) as f64;
        ExtensionScenario {
            base,
            k,
            p_lower_ext: 0.5 * base.a1() as f64 / total,
            p_upper_ext: 0.5 + 0.5 * (base.a2() + k) as f64 / total,
        }
    }
}

/// `Pa(N+K)[a1, a2 + K, pL_ext, pU_ext]`.
pub fn extend_assertion(scenario: &ExtensionScenario) -> Result<PanAssertion> {
    let base = &scenario.base;
    let total = (base.n() + scenario.k + 1) as f64;
    let top = base.a2() + scenario.k;
    if !(scenario.p_lower_ext > 0.0 && scenario.p_lower_ext <= base.a1() as f64 / total) {
        return Err(Error::InvalidExtension("pL_ext must lie in (0, a1 / (N + K + 1)]"));
    }
    if !(scenario.p_upper_ext < 1.0 && scenario.p_upper_ext >= top as f64 / total) {
        return Err(Error::InvalidExtension("pU_ext must lie in [(a2 + K) / (N + K + 1), 1)"));
    }
    PanAssertion::new(
        base.n() + scenario.k,
        base.a1(),
        top,
        scenario.p_lower_ext,
        scenario.p_upper_ext,
    )
    .map_err(|_| Error::InvalidExtension("extended assertion is invalid"))
}

/// Mass on the widened window `[a1, a2 + K]` of an extended family, by
/// direct summation and by the harmonic closed form anchored at `q[a1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorMass {
    pub direct_sum: f64,
    pub closed_form: f64,
}

impl InteriorMass {
    pub fn relative_gap(&self) -> f64 {
        libm::fabs(self.direct_sum - self.closed_form) / libm::fabs(self.direct_sum).max(f64::MIN_POSITIVE)
    }
}

pub fn interior_mass(scenario: &ExtensionScenario, kind: CompletionKind) -> Result<InteriorMass> {
    let extended = extend_assertion(scenario)?;
    let q = invert_to_mass(&build_predictive(&extended, kind)?);
    let (big_n, a1, top) = (extended.n(), extended.a1(), extended.a2());
    let direct_sum = libm::exp(log_sum_exp(&q.log_values()[a1..=top]));
    let ln_coefficient = libm::log(a1 as f64) + libm::log((big_n + 1 - a1) as f64)
        - libm::log((big_n + 1) as f64);
    let bracket = harmonic_sum(top) - harmonic_sum(a1 - 1) + harmonic_sum(big_n - a1 + 1)
        - harmonic_sum(big_n - top);
    let closed_form = libm::exp(q.ln(a1) + ln_coefficient) * bracket;
    Ok(InteriorMass { direct_sum, closed_form })
}

/// The line of `(alpha, beta)` pairs representing one conditional
/// probability `p_{a,N} = (a + alpha) / (N + alpha + beta)`: it passes
/// through `(-a, -(N - a))` with slope `(1 - p) / p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalLine {
    pub a: usize,
    pub n: usize,
    pub p: f64,
    exact: Option<Ratio<i64>>,
}

impl ConditionalLine {
    /// The frequency-mimicking line `p = a / n`, carried exactly.
    pub fn frequency(a: usize, n: usize) -> Result<Self> {
        if a == 0 || a >= n {
            return Err(Error::InvalidParameters("frequency line needs 0 < a < n"));
        }
        Self::rational(a, n, Ratio::new(a as i64, n as i64))
    }

    /// A line whose probability is an exact rational.
    pub fn rational(a: usize, n: usize, p: Ratio<i64>) -> Result<Self> {
        let value = *p.numer() as f64 / *p.denom() as f64;
        let mut line = line_for_conditional(a, n, value)?;
        line.exact = Some(p);
        Ok(line)
    }

    pub fn anchor(&self) -> (f64, f64) {
        (-(self.a as f64), -((self.n - self.a) as f64))
    }

    pub fn slope(&self) -> f64 {
        (1.0 - self.p) / self.p
    }

    pub fn exact_p(&self) -> Option<Ratio<i64>> {
        self.exact
    }

    fn exact_slope(&self) -> Option<Ratio<i64>> {
        self.exact.map(|p| (Ratio::from_integer(1) - p) / p)
    }

    /// `beta` on this line at the given `alpha`.
    pub fn beta_at(&self, alpha: f64) -> f64 {
        -((self.n - self.a) as f64) + (alpha + self.a as f64) * self.slope()
    }
}

pub fn line_for_conditional(a: usize, n: usize, p: f64) -> Result<ConditionalLine> {
    if a > n {
        return Err(Error::Dimension { expected: n, found: a });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidPredictive { index: a, value: p });
    }
    Ok(ConditionalLine { a, n, p, exact: None })
}

/// Outcome of a concurrency check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Concurrency {
    /// The shared point of the three lines.
    Intersection { alpha: f64, beta: f64 },
    /// Equal slopes: the constant-`p` case.
    Parallel,
}

const CONCURRENCY_TOLERANCE: f64 = 1e-10;

/// Checks that the line for `p_{a,N-1}` passes through the intersection of
/// the lines for `p_{a,N}` and `p_{a+1,N}`.
pub fn concurrency_check(
    lower: &ConditionalLine,
    upper: &ConditionalLine,
    reduced: &ConditionalLine,
) -> Result<Concurrency> {
    let aligned = upper.n == lower.n
        && upper.a == lower.a + 1
        && lower.n >= 1
        && reduced.n + 1 == lower.n
        && reduced.a == lower.a;
    if !aligned {
        return Err(Error::NonCoherentTriple);
    }
    let a = lower.a as i64;
    let n = lower.n as i64;
    if let (Some(p1), Some(p2), Some(p3)) = (lower.exact, upper.exact, reduced.exact) {
        let one = Ratio::from_integer(1);
        if p3 != p1 / (one - p2 + p1) {
            return Err(Error::NonCoherentTriple);
        }
        let (s1, s2, s3) = (
            lower.exact_slope().unwrap(),
            upper.exact_slope().unwrap(),
            reduced.exact_slope().unwrap(),
        );
        if s1 == s2 {
            return if s3 == s1 { Ok(Concurrency::Parallel) } else { Err(Error::NonCoherentTriple) };
        }
        let ai = Ratio::from_integer(a);
        let alpha = (one + (ai + one) * s2 - ai * s1) / (s1 - s2);
        let beta = Ratio::from_integer(-(n - a)) + (alpha + ai) * s1;
        let beta3 = Ratio::from_integer(-(n - 1 - a)) + (alpha + ai) * s3;
        if beta != beta3 {
            return Err(Error::NonCoherentTriple);
        }
        let f = |r: Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
        return Ok(Concurrency::Intersection { alpha: f(alpha), beta: f(beta) });
    }

    let implied = lower.p / (1.0 - upper.p + lower.p);
    if libm::fabs(implied - reduced.p) > 1e-12 * implied {
        return Err(Error::NonCoherentTriple);
    }
    let (s1, s2, s3) = (lower.slope(), upper.slope(), reduced.slope());
    if libm::fabs(s1 - s2) <= 1e-12 * s1.max(s2) {
        return if libm::fabs(s3 - s1) <= CONCURRENCY_TOLERANCE * s1 {
            Ok(Concurrency::Parallel)
        } else {
            Err(Error::NonCoherentTriple)
        };
    }
    let af = a as f64;
    let alpha = (1.0 + (af + 1.0) * s2 - af * s1) / (s1 - s2);
    let beta = lower.beta_at(alpha);
    let scale = 1.0f64.max(libm::fabs(beta)).max(libm::fabs((alpha + af) * s3));
    if libm::fabs(reduced.beta_at(alpha) - beta) > CONCURRENCY_TOLERANCE * scale {
        return Err(Error::NonCoherentTriple);
    }
    Ok(Concurrency::Intersection { alpha, beta })
}

/// The lines for `p_{a,n}`, `p_{a+1,n}` and `p_{a,n-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineTriple {
    pub lower: ConditionalLine,
    pub upper: ConditionalLine,
    pub reduced: ConditionalLine,
}

/// Every adjacent frequency-mimicking triple implied by the assertion,
/// level by level from `N` down to `N - (a2 - a1) + 1`.
pub fn fm_line_system(assertion: &PanAssertion) -> Vec<LineTriple> {
    let (n, a1, a2) = (assertion.n(), assertion.a1(), assertion.a2());
    let mut triples = Vec::new();
    for level in (n - (a2 - a1) + 1..=n).rev() {
        let top = a2 - (n - level);
        for a in a1..top {
            triples.push(LineTriple {
                lower: ConditionalLine::frequency(a, level).expect("window lies inside (0, n)"),
                upper: ConditionalLine::frequency(a + 1, level).expect("window lies inside (0, n)"),
                reduced: ConditionalLine::frequency(a, level - 1).expect("window lies inside (0, n)"),
            });
        }
    }
    triples
}
