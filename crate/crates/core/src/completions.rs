//! PaN assertions and the four reference completions.
//!
//! A `PaN[a1, a2, pL, pU]` assertion fixes `p[a] = a / N` on the closed
//! window `[a1, a2]`. A completion fills in the remaining entries so the
//! vector is nondecreasing with `p[0] >= pL` and `p[N] <= pU`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::exch::PredictiveVector;

/// `PaN[a1, a2, pL, pU]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanAssertion {
    n: usize,
    a1: usize,
    a2: usize,
    p_lower: f64,
    p_upper: f64,
}

impl PanAssertion {
    pub fn new(n: usize, a1: usize, a2: usize, p_lower: f64, p_upper: f64) -> Result<Self> {
        if a1 < 1 {
            return Err(Error::InvalidAssertion("a1 must be at least 1"));
        }
        if a1 > a2 {
            return Err(Error::InvalidAssertion("a1 must not exceed a2"));
        }
        if a2 + 1 > n {
            return Err(Error::InvalidAssertion("a2 must be at most N - 1"));
        }
        if !(p_lower > 0.0 && p_lower <= a1 as f64 / n as f64) {
            return Err(Error::InvalidAssertion("pL must lie in (0, a1/N]"));
        }
        if !(p_upper < 1.0 && p_upper >= a2 as f64 / n as f64) {
            return Err(Error::InvalidAssertion("pU must lie in [a2/N, 1)"));
        }
        Ok(PanAssertion { n, a1, a2, p_lower, p_upper })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a1(&self) -> usize {
        self.a1
    }

    pub fn a2(&self) -> usize {
        self.a2
    }

    pub fn p_lower(&self) -> f64 {
        self.p_lower
    }

    pub fn p_upper(&self) -> f64 {
        self.p_upper
    }

    /// Whether `a` lies in the frequency-mimicking window.
    pub fn mimics(&self, a: usize) -> bool {
        (self.a1..=self.a2).contains(&a)
    }
}

impl fmt::Display for PanAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Pa{}[{},{},{},{}]",
            self.n, self.a1, self.a2, self.p_lower, self.p_upper
        )
    }
}

/// Rule applied outside the frequency-mimicking window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompletionKind {
    /// Straight lines to `(0, pL)` and `(1, pU)`.
    Linear,
    /// Cubic Hermite arcs with flat ends and unit slope at the window.
    Quartic,
    /// Jump straight to `pL` below and `pU` above.
    Weak,
    /// Hold `a1 / N` below and `a2 / N` above.
    Strict,
}

impl CompletionKind {
    pub const ALL: [CompletionKind; 4] = [
        CompletionKind::Linear,
        CompletionKind::Quartic,
        CompletionKind::Weak,
        CompletionKind::Strict,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CompletionKind::Linear => "linear",
            CompletionKind::Quartic => "quartic",
            CompletionKind::Weak => "weak",
            CompletionKind::Strict => "strict",
        }
    }
}

impl fmt::Display for CompletionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompletionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "L" => Ok(CompletionKind::Linear),
            "quartic" | "Q" => Ok(CompletionKind::Quartic),
            "weak" | "W" => Ok(CompletionKind::Weak),
            "strict" | "S" => Ok(CompletionKind::Strict),
            _ => Err(Error::InvalidAssertion("unknown completion kind")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// `sum_k coeffs[k] (x - origin)^k`, of degree at most four.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndPolynomial {
    pub origin: f64,
    pub coeffs: [f64; 5],
}

impl EndPolynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_offset(x - self.origin)
    }

    pub fn eval_offset(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let t = x - self.origin;
        let c = &self.coeffs;
        c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * 4.0 * c[4]))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }
}

/// The cubic meeting the four endpoint and slope conditions on one side:
/// lower `Q(0) = pL, Q(a1/N) = a1/N, Q'(0) = 0, Q'(a1/N) = 1`; upper
/// `Q(a2/N) = a2/N, Q(1) = pU, Q'(a2/N) = 1, Q'(1) = 0`.
pub fn quartic_coefficients(assertion: &PanAssertion, side: Side) -> EndPolynomial {
    let n = assertion.n as f64;
    match side {
        Side::Lower => {
            let h = assertion.a1 as f64 / n;
            let rise = h - assertion.p_lower;
            EndPolynomial {
                origin: 0.0,
                coeffs: [
                    assertion.p_lower,
                    0.0,
                    (3.0 * rise - h) / (h * h),
                    (h - 2.0 * rise) / (h * h * h),
                    0.0,
                ],
            }
        }
        Side::Upper => {
            let x2 = assertion.a2 as f64 / n;
            let h = (assertion.n - assertion.a2) as f64 / n;
            let excess = assertion.p_upper - 1.0;
            EndPolynomial {
                origin: x2,
                coeffs: [
                    x2,
                    1.0,
                    (3.0 * excess + h) / (h * h),
                    (-h - 2.0 * excess) / (h * h * h),
                    0.0,
                ],
            }
        }
    }
}

// Ratio of the secant slope across one side to the unit slope at the
// window edge, with the side's width.
fn side_geometry(assertion: &PanAssertion, side: Side) -> (f64, f64) {
    let n = assertion.n as f64;
    match side {
        Side::Lower => {
            let h = assertion.a1 as f64 / n;
            (h, (h - assertion.p_lower) / h)
        }
        Side::Upper => {
            let h = (assertion.n - assertion.a2) as f64 / n;
            (h, (assertion.p_upper - assertion.a2 as f64 / n) / h)
        }
    }
}

/// An increasing degree-four curve meeting the same four conditions, for
/// sides where the cubic overshoots.
///
/// On the unit interval with the window edge at `0` (slope `1`) and the
/// flat end at `1`, the shape is `F(0) = 0, F(1) = m` with `F'` equal to
/// `(1 - s)^2 (1 + (12m - 4) s)` when `m >= 1/4` (the second derivative
/// also vanishes at the flat end) and `(1 - s)(1 - y s)^2` with
/// `y = 2 - sqrt(12m - 2)` when `1/6 <= m < 1/4`. No nondecreasing quartic
/// exists for `m < 1/6`.
pub fn monotone_quartic(assertion: &PanAssertion, side: Side) -> Result<EndPolynomial> {
    let (h, m) = side_geometry(assertion, side);
    if !(m >= 1.0 / 6.0) {
        let index = match side {
            Side::Lower => 0,
            Side::Upper => assertion.n,
        };
        return Err(Error::NonMonotoneCompletion { index });
    }
    // F(s) = sum f[j] s^j
    let f = if m >= 0.25 {
        let k = 12.0 * m - 4.0;
        [0.0, 1.0, (k - 2.0) / 2.0, (1.0 - 2.0 * k) / 3.0, k / 4.0]
    } else {
        let y = 2.0 - libm::sqrt(12.0 * m - 2.0);
        [0.0, 1.0, -(2.0 * y + 1.0) / 2.0, (y * y + 2.0 * y) / 3.0, -y * y / 4.0]
    };
    let scale = |g: [f64; 5]| {
        let mut out = [0.0; 5];
        let mut hp = 1.0;
        for j in 0..5 {
            out[j] = h * g[j] / hp;
            hp *= h;
        }
        out
    };
    Ok(match side {
        Side::Upper => {
            let mut coeffs = scale(f);
            coeffs[0] = assertion.a2 as f64 / assertion.n as f64;
            EndPolynomial { origin: coeffs[0], coeffs }
        }
        Side::Lower => {
            // G(s) = m - F(1 - s), expanded in powers of s.
            const BINOM: [[f64; 5]; 5] = [
                [1.0, 0.0, 0.0, 0.0, 0.0],
                [1.0, 1.0, 0.0, 0.0, 0.0],
                [1.0, 2.0, 1.0, 0.0, 0.0],
                [1.0, 3.0, 3.0, 1.0, 0.0],
                [1.0, 4.0, 6.0, 4.0, 1.0],
            ];
            let mut g = [0.0; 5];
            g[0] = m;
            for (j, fj) in f.iter().enumerate() {
                for i in 0..=j {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    g[i] -= fj * BINOM[j][i] * sign;
                }
            }
            let mut coeffs = scale(g);
            coeffs[0] = assertion.p_lower;
            EndPolynomial { origin: 0.0, coeffs }
        }
    })
}

// Grid indices of one side, window edge included, in increasing order.
fn side_grid(assertion: &PanAssertion, side: Side) -> core::ops::RangeInclusive<usize> {
    match side {
        Side::Lower => 0..=assertion.a1,
        Side::Upper => assertion.a2..=assertion.n,
    }
}

fn side_value(assertion: &PanAssertion, poly: &EndPolynomial, a: usize) -> f64 {
    if assertion.mimics(a) {
        a as f64 / assertion.n as f64
    } else if a < assertion.a1 {
        let v = poly.eval_offset(a as f64 / assertion.n as f64);
        snap(v, assertion.p_lower, assertion.a1 as f64 / assertion.n as f64)
    } else {
        let v = poly.eval_offset((a - assertion.a2) as f64 / assertion.n as f64);
        snap(v, assertion.a2 as f64 / assertion.n as f64, assertion.p_upper)
    }
}

// Pulls values within rounding distance of a side's bounds onto them.
fn snap(v: f64, lo: f64, hi: f64) -> f64 {
    const ROUNDING: f64 = 1e-14;
    if v < lo && lo - v < ROUNDING {
        lo
    } else if v > hi && v - hi < ROUNDING {
        hi
    } else {
        v
    }
}

fn check_side(assertion: &PanAssertion, poly: &EndPolynomial, side: Side) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for a in side_grid(assertion, side) {
        let v = side_value(assertion, poly, a);
        if v < prev || !(v > 0.0 && v < 1.0) {
            return Err(Error::NonMonotoneCompletion { index: a });
        }
        prev = v;
    }
    Ok(())
}

/// The curve used by the Quartic completion on one side: the cubic when it
/// is nondecreasing on the integer grid, otherwise [`monotone_quartic`].
pub fn quartic_side(assertion: &PanAssertion, side: Side) -> Result<EndPolynomial> {
    let cubic = quartic_coefficients(assertion, side);
    let cubic_err = match check_side(assertion, &cubic, side) {
        Ok(()) => return Ok(cubic),
        Err(e) => e,
    };
    match monotone_quartic(assertion, side) {
        Ok(quartic) if check_side(assertion, &quartic, side).is_ok() => Ok(quartic),
        _ => Err(cubic_err),
    }
}

/// A completion bound to one assertion, checked once and evaluated per `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    assertion: PanAssertion,
    kind: CompletionKind,
    curves: Option<(EndPolynomial, EndPolynomial)>,
}

impl Completion {
    pub fn new(assertion: PanAssertion, kind: CompletionKind) -> Result<Self> {
        let curves = if kind == CompletionKind::Quartic {
            Some((
                quartic_side(&assertion, Side::Lower)?,
                quartic_side(&assertion, Side::Upper)?,
            ))
        } else {
            None
        };
        Ok(Completion { assertion, kind, curves })
    }

    pub fn assertion(&self) -> &PanAssertion {
        &self.assertion
    }

    pub fn kind(&self) -> CompletionKind {
        self.kind
    }

    /// `p[a]` for `0 <= a <= N`.
    pub fn value(&self, a: usize) -> Result<f64> {
        if a > self.assertion.n {
            return Err(Error::Dimension { expected: self.assertion.n, found: a });
        }
        Ok(self.raw_value(a))
    }

    fn raw_value(&self, a: usize) -> f64 {
        let s = &self.assertion;
        let n = s.n as f64;
        if s.mimics(a) {
            return a as f64 / n;
        }
        let low = a < s.a1;
        match self.kind {
            CompletionKind::Strict => {
                if low {
                    s.a1 as f64 / n
                } else {
                    s.a2 as f64 / n
                }
            }
            CompletionKind::Weak => {
                if low {
                    s.p_lower
                } else {
                    s.p_upper
                }
            }
            CompletionKind::Linear => {
                if low {
                    let top = s.a1 as f64 / n;
                    s.p_lower + (top - s.p_lower) * (a as f64 / s.a1 as f64)
                } else {
                    let bottom = s.a2 as f64 / n;
                    let frac = (a - s.a2) as f64 / (s.n - s.a2) as f64;
                    bottom + (s.p_upper - bottom) * frac
                }
            }
            CompletionKind::Quartic => {
                let (lower, upper) = self.curves.as_ref().expect("quartic curves are built in new");
                side_value(s, if low { lower } else { upper }, a)
            }
        }
    }

    pub fn predictive(&self) -> Result<PredictiveVector> {
        PredictiveVector::new((0..=self.assertion.n).map(|a| self.raw_value(a)).collect::<Vec<_>>())
    }
}

/// `p[a]` under `kind` for the given assertion.
pub fn completion_value(assertion: &PanAssertion, kind: CompletionKind, a: usize) -> Result<f64> {
    Completion::new(*assertion, kind)?.value(a)
}

/// The full predictive vector of order `N` for an assertion and completion.
pub fn build_predictive(assertion: &PanAssertion, kind: CompletionKind) -> Result<PredictiveVector> {
    Completion::new(*assertion, kind)?.predictive()
}
