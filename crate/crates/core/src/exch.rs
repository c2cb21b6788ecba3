//! Predictive vectors, mass functions, and the exact maps between them.
//!
//! A [`PredictiveVector`] of order `N` holds `p[a] = P(E_{N+1} | S_N = a)` for
//! `a = 0..=N`. A [`MassFunction`] of order `N + 1` holds
//! `q[a] = P(S_{N+1} = a)` for `a = 0..=N+1`. The two are in bijection when
//! every mass is strictly positive; all products of odds are formed in log
//! space so that `N` in the hundreds of thousands is routine.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::special::{log_add_exp, log_sum_exp, CompensatedSum, LnFactorials};

/// Tolerance on `|sum q - 1|` accepted by [`MassFunction::from_linear`].
pub const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// Conditional probabilities `p[a] = P(E_{N+1} | S_N = a)`, each in `(0, 1)`.
///
/// The log-odds are kept beside the probabilities: vectors derived from a
/// mass function carry them exactly, even where `p` itself rounds to `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveVector {
    values: Vec<f64>,
    log_odds: Vec<f64>,
}

// ln(1 + e^x)
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

impl PredictiveVector {
    /// Validates `values` (length `N + 1`, entries in the open unit interval).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension { expected: 1, found: 0 });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidPredictive { index, value });
            }
        }
        let log_odds = values.iter().map(|&p| libm::log(p) - libm::log1p(-p)).collect();
        Ok(PredictiveVector { values, log_odds })
    }

    /// Builds the vector from `ln(p / (1 - p))`, which must be finite.
    pub fn from_log_odds(log_odds: Vec<f64>) -> Result<Self> {
        if log_odds.is_empty() {
            return Err(Error::Dimension { expected: 1, found: 0 });
        }
        if let Some(index) = log_odds.iter().position(|l| !l.is_finite()) {
            return Err(Error::InvalidPredictive { index, value: logistic(log_odds[index]) });
        }
        let values = log_odds.iter().map(|&l| logistic(l)).collect();
        Ok(PredictiveVector { values, log_odds })
    }

    /// The constant vector of order `n`, i.e. the Binomial predictive.
    pub fn constant(n: usize, p: f64) -> Result<Self> {
        Self::new(alloc::vec![p; n + 1])
    }

    /// Number of conditioning events `N`.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, a: usize) -> f64 {
        self.values[a]
    }

    pub fn log_odds(&self) -> &[f64] {
        &self.log_odds
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.log_odds.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Mass function of `S_{N+1}`, stored as natural logarithms.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    log_values: Vec<f64>,
}

impl MassFunction {
    /// Accepts nonnegative linear masses whose sum is within
    /// [`MASS_SUM_TOLERANCE`] of one and renormalizes them.
    pub fn from_linear(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Dimension { expected: 2, found: values.len() });
        }
        let mut sum = CompensatedSum::default();
        for &v in values {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidMass("entries must be finite and nonnegative"));
            }
            sum.add(v);
        }
        let total = sum.value();
        if !(libm::fabs(total - 1.0) <= MASS_SUM_TOLERANCE) {
            return Err(Error::InvalidMass("entries do not sum to one"));
        }
        let ln_total = libm::log(total);
        let log_values = values.iter().map(|&v| libm::log(v) - ln_total).collect();
        Ok(MassFunction { log_values })
    }

    /// Accepts log masses whose linear sum is within [`MASS_SUM_TOLERANCE`]
    /// of one and renormalizes them.
    pub fn from_log(log_values: Vec<f64>) -> Result<Self> {
        let total = Self::check_log_entries(&log_values)?;
        if !(libm::fabs(libm::expm1(total)) <= MASS_SUM_TOLERANCE) {
            return Err(Error::InvalidMass("entries do not sum to one"));
        }
        Ok(Self::shifted(log_values, total))
    }

    /// Normalizes arbitrary nonnegative log weights to a mass function.
    pub fn from_log_weights(log_weights: Vec<f64>) -> Result<Self> {
        let total = Self::check_log_entries(&log_weights)?;
        if !total.is_finite() {
            return Err(Error::InvalidMass("weights have no finite positive total"));
        }
        Ok(Self::shifted(log_weights, total))
    }

    fn check_log_entries(log_values: &[f64]) -> Result<f64> {
        if log_values.len() < 2 {
            return Err(Error::Dimension { expected: 2, found: log_values.len() });
        }
        if log_values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidMass("log entries must be finite or -inf"));
        }
        Ok(log_sum_exp(log_values))
    }

    fn shifted(mut log_values: Vec<f64>, total: f64) -> Self {
        for v in log_values.iter_mut() {
            *v -= total;
        }
        MassFunction { log_values }
    }

    /// Number of summed events `N + 1`.
    pub fn nplus1(&self) -> usize {
        self.log_values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn ln(&self, a: usize) -> f64 {
        self.log_values[a]
    }

    pub fn get(&self, a: usize) -> f64 {
        libm::exp(self.log_values[a])
    }

    /// Linear view; masses below the `f64` floor read as zero.
    pub fn linear(&self) -> Vec<f64> {
        self.log_values.iter().map(|&v| libm::exp(v)).collect()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.log_values.iter().all(|v| v.is_finite())
    }

    /// Indices that are strict local maxima, with plateau-free neighbours.
    pub fn local_maxima(&self) -> Vec<usize> {
        let v = &self.log_values;
        let last = v.len() - 1;
        (0..v.len())
            .filter(|&a| {
                let left = a == 0 || v[a] > v[a - 1];
                let right = a == last || v[a] > v[a + 1];
                left && right && v[a] > f64::NEG_INFINITY
            })
            .collect()
    }
}

/// Normed histogram of a mass function: bin width `1 / (N + 2)`, density
/// `(N + 2) q[a]`, abscissa `a / (N + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityHistogram {
    pub bin_centers: Vec<f64>,
    pub densities: Vec<f64>,
    pub bin_width: f64,
}

impl DensityHistogram {
    pub fn integral(&self) -> f64 {
        let mut acc = CompensatedSum::default();
        for &d in &self.densities {
            acc.add(d * self.bin_width);
        }
        acc.value()
    }
}

/// Inverts a predictive vector to the mass function of `S_{N+1}`.
///
/// Runs the ratio recursion
/// `q[a+1] / q[a] = ((N + 1 - a) / (a + 1)) * p[a] / (1 - p[a])`
/// as a compensated cumulative sum of logs, then normalizes with a
/// max-shifted log-sum-exp.
pub fn invert_to_mass(p: &PredictiveVector) -> MassFunction {
    let n = p.n();
    let mut log_weights = Vec::with_capacity(n + 2);
    let mut acc = CompensatedSum::default();
    log_weights.push(0.0);
    for (a, &log_odds) in p.log_odds().iter().enumerate() {
        let combinatoric = libm::log((n + 1 - a) as f64 / (a + 1) as f64);
        acc.add(combinatoric);
        acc.add(log_odds);
        log_weights.push(acc.value());
    }
    let total = log_sum_exp(&log_weights);
    MassFunction::shifted(log_weights, total)
}

/// Predictive vector implied by a strictly positive mass function:
/// `p[a] = (a+1) q[a+1] / ((a+1) q[a+1] + (N+1-a) q[a])`.
pub fn mass_to_predictive(q: &MassFunction) -> Result<PredictiveVector> {
    if let Some(index) = q.log_values().iter().position(|v| !v.is_finite()) {
        return Err(Error::Degenerate { index });
    }
    let n = q.nplus1() - 1;
    let lq = q.log_values();
    let log_odds = (0..=n)
        .map(|a| {
            let up = libm::log((a + 1) as f64) + lq[a + 1];
            let down = libm::log((n + 1 - a) as f64) + lq[a];
            up - down
        })
        .collect();
    PredictiveVector::from_log_odds(log_odds)
}

/// Max absolute error of `invert_to_mass(mass_to_predictive(q))` against `q`.
pub fn roundtrip_check(q: &MassFunction) -> Result<f64> {
    let back = invert_to_mass(&mass_to_predictive(q)?);
    Ok(q.linear()
        .iter()
        .zip(back.linear())
        .map(|(x, y)| libm::fabs(x - y))
        .fold(0.0, f64::max))
}

/// One-step reduction from `S_{N+1}` to `S_N`:
/// `q_N[a] = ((N + 1 - a) q[a] + (a + 1) q[a+1]) / (N + 1)`.
pub fn reduce_mass_one(q: &MassFunction) -> Result<MassFunction> {
    let nplus1 = q.nplus1();
    if nplus1 < 2 {
        return Err(Error::Dimension { expected: 2, found: nplus1 });
    }
    let lq = q.log_values();
    let ln_total = libm::log(nplus1 as f64);
    let log_values = (0..nplus1)
        .map(|a| {
            let stay = lq[a] + libm::log((nplus1 - a) as f64) - ln_total;
            let drop = lq[a + 1] + libm::log((a + 1) as f64) - ln_total;
            log_add_exp(stay, drop)
        })
        .collect();
    Ok(MassFunction { log_values })
}

/// Reduction from `S_{N+1}` to `S_M` through hypergeometric weights,
/// `q_M[a] = sum_A C(A, a) C(N+1-A, M-a) / C(N+1, M) q[A]`. Cost `O(M N)`.
pub fn reduce_mass_to(q: &MassFunction, m: usize) -> Result<MassFunction> {
    let nplus1 = q.nplus1();
    if m > nplus1 {
        return Err(Error::Dimension { expected: nplus1, found: m });
    }
    if m == 0 {
        return Err(Error::Dimension { expected: 1, found: 0 });
    }
    if m == nplus1 {
        return Ok(q.clone());
    }
    let lf = LnFactorials::new(nplus1);
    let ln_norm = lf.ln_choose(nplus1, m);
    let lq = q.log_values();
    let mut terms = Vec::with_capacity(nplus1 + 1);
    let log_values = (0..=m)
        .map(|a| {
            terms.clear();
            for big_a in a..=(nplus1 - (m - a)) {
                let w = lf.ln_choose(big_a, a) + lf.ln_choose(nplus1 - big_a, m - a) - ln_norm;
                terms.push(w + lq[big_a]);
            }
            log_sum_exp(&terms)
        })
        .collect();
    Ok(MassFunction { log_values })
}

/// One-step reduction of a predictive vector:
/// `p_{N-1}[a] = p[a] / (1 - p[a+1] + p[a])`.
pub fn reduce_predictive(p: &PredictiveVector) -> Result<PredictiveVector> {
    let n = p.n();
    if n < 1 {
        return Err(Error::Dimension { expected: 1, found: 0 });
    }
    // logit p_{N-1}[a] = ln p[a] - ln(1 - p[a+1])
    let l = p.log_odds();
    let log_odds = (0..n).map(|a| softplus(l[a + 1]) - softplus(-l[a])).collect();
    PredictiveVector::from_log_odds(log_odds)
}

/// The normed density histogram of `q`.
pub fn density_histogram(q: &MassFunction) -> DensityHistogram {
    let nplus1 = q.nplus1();
    let bins = (nplus1 + 1) as f64;
    DensityHistogram {
        bin_centers: (0..=nplus1).map(|a| a as f64 / nplus1 as f64).collect(),
        densities: q.log_values().iter().map(|&v| bins * libm::exp(v)).collect(),
        bin_width: 1.0 / bins,
    }
}
