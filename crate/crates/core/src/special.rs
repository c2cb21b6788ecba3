//! Log-space arithmetic and special functions.
//!
//! Everything here works on natural logarithms. `-inf` stands for an exact
//! zero and is propagated without producing NaN.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// `ln(exp(x) + exp(y))`.
pub fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + libm::log1p(libm::exp(lo - hi))
}

/// Max-shifted `ln(sum_i exp(x_i))`. Returns `-inf` for an empty slice or
/// when every entry is `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut acc = CompensatedSum::default();
    for &x in xs {
        acc.add(libm::exp(x - max));
    }
    max + libm::log(acc.value())
}

/// `ln(1 - exp(x))` for `x <= 0`.
pub fn log1m_exp(x: f64) -> f64 {
    if x > -core::f64::consts::LN_2 {
        libm::log(-libm::expm1(x))
    } else {
        libm::log1p(-libm::exp(x))
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// The `n`-th harmonic number, summed from the smallest term upward.
/// `H(0) = 0`.
pub fn harmonic_sum(n: usize) -> f64 {
    let mut acc = CompensatedSum::default();
    for a in (1..=n).rev() {
        acc.add(1.0 / a as f64);
    }
    acc.value()
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

// Below this many factors the binomial is formed as a direct product, which
// keeps near-identity hypergeometric weights accurate to a few ulps.
const SMALL_CHOOSE: usize = 16;

fn ln_choose_small(n: usize, k: usize) -> f64 {
    let mut prod = 1.0;
    for i in 1..=k {
        prod *= (n - k + i) as f64 / i as f64;
    }
    libm::log(prod)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k <= SMALL_CHOOSE {
        ln_choose_small(n, k)
    } else {
        ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
    }
}

/// Table of `ln k!` for `k = 0..=n`, used when many binomials share a range.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(n: usize) -> Self {
        let table = (0..=n).map(|k| ln_gamma(k as f64 + 1.0)).collect();
        LnFactorials { table }
    }

    /// `ln C(n, k)`; `n` must not exceed the table size.
    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        let k = k.min(n - k);
        if k <= SMALL_CHOOSE {
            ln_choose_small(n, k)
        } else {
            self.table[n] - self.table[k] - self.table[n - k]
        }
    }
}

/// Both tails of the regularized incomplete beta function, in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaTails {
    /// `ln I_x(a, b)`
    pub ln_lower: f64,
    /// `ln (1 - I_x(a, b))`
    pub ln_upper: f64,
}

const CF_EPS: f64 = 1e-15;
const CF_TINY: f64 = 1e-300;

// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let max_iter = 1000 + (20.0 * libm::sqrt(a + b)) as usize;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if libm::fabs(d) < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if libm::fabs(d) < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if libm::fabs(c) < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::Precision("incomplete beta continued fraction did not converge"))
}

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`, returned as the
/// logarithms of both tails. The continued fraction is evaluated on the
/// side of `x = (a + 1) / (a + b + 2)` where it converges fastest; the other
/// tail is recovered with `log1m_exp`, so tails far below `1e-300` keep
/// their relative accuracy.
pub fn ln_beta_inc(a: f64, b: f64, x: f64) -> Result<BetaTails> {
    if !(a > 0.0 && b > 0.0) || !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameters("incomplete beta needs a, b > 0 and x in [0, 1]"));
    }
    if x == 0.0 {
        return Ok(BetaTails { ln_lower: f64::NEG_INFINITY, ln_upper: 0.0 });
    }
    if x == 1.0 {
        return Ok(BetaTails { ln_lower: 0.0, ln_upper: f64::NEG_INFINITY });
    }
    let ln_front = a * libm::log(x) + b * libm::log1p(-x) - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        let cf = beta_continued_fraction(a, b, x)?;
        let ln_lower = ln_front + libm::log(cf) - libm::log(a);
        Ok(BetaTails { ln_lower, ln_upper: log1m_exp(ln_lower) })
    } else {
        let cf = beta_continued_fraction(b, a, 1.0 - x)?;
        let ln_upper = ln_front + libm::log(cf) - libm::log(b);
        Ok(BetaTails { ln_lower: log1m_exp(ln_upper), ln_upper })
    }
}
