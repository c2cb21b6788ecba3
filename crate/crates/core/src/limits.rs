//! The large-`N` limit of frequency-mimicking families: the truncated
//! `Beta(0, 0)` density on `(theta1, theta2)` and its binomial mixture.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exch::{density_histogram, MassFunction};
use crate::quadrature::integrate;
use crate::special::{ln_beta_inc, log1m_exp, log_sum_exp};

/// Default interior margin for [`compare_to_limit`], as a fraction of
/// `theta2 - theta1`.
pub const DEFAULT_MARGIN_FRACTION: f64 = 0.02;

const MIXTURE_SUM_TOLERANCE: f64 = 1e-8;

/// Truncated incomplete-beta family on `(theta1, theta2)`. Only the
/// `alpha = beta = 0` member is supported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncompleteBetaParams {
    pub theta1: f64,
    pub theta2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl IncompleteBetaParams {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        Self::with_shape(theta1, theta2, 0.0, 0.0)
    }

    pub fn with_shape(theta1: f64, theta2: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0 < theta1 && theta1 < theta2 && theta2 < 1.0) {
            return Err(Error::InvalidParameters("need 0 < theta1 < theta2 < 1"));
        }
        Ok(IncompleteBetaParams { theta1, theta2, alpha, beta })
    }

    fn check_supported(&self) -> Result<()> {
        if self.alpha != 0.0 || self.beta != 0.0 {
            return Err(Error::UnsupportedParameters);
        }
        Ok(())
    }

    /// Normalizing constant `logit(theta2) - logit(theta1)`.
    pub fn normalizer(&self) -> f64 {
        let logit = |t: f64| libm::log(t) - libm::log1p(-t);
        logit(self.theta2) - logit(self.theta1)
    }
}

/// The frequency-mimicking window `[ceil(N theta1), floor(N theta2)]`.
pub fn fm_window(n: usize, theta1: f64, theta2: f64) -> Result<(usize, usize)> {
    let nf = n as f64;
    let mut a1 = libm::ceil(nf * theta1) as usize;
    while a1 > 0 && (a1 - 1) as f64 / nf >= theta1 {
        a1 -= 1;
    }
    while (a1 as f64 / nf) < theta1 {
        a1 += 1;
    }
    let mut a2 = libm::floor(nf * theta2).max(0.0) as usize;
    while (a2 as f64 / nf) > theta2 && a2 > 0 {
        a2 -= 1;
    }
    while ((a2 + 1) as f64 / nf) <= theta2 {
        a2 += 1;
    }
    if n < 2 || a1 < 1 || a1 > a2 || a2 > n - 1 {
        return Err(Error::EmptyWindow { a1, a2 });
    }
    Ok((a1, a2))
}

/// `1 / (Z theta (1 - theta))` inside `(theta1, theta2)`, zero outside.
pub fn incomplete_beta_density(theta: f64, params: &IncompleteBetaParams) -> Result<f64> {
    params.check_supported()?;
    if theta <= params.theta1 || theta >= params.theta2 {
        return Ok(0.0);
    }
    Ok(1.0 / (params.normalizer() * theta * (1.0 - theta)))
}

// ln of (I_{theta2} - I_{theta1}) for Beta(a, b), choosing whichever tail
// pair cancels least.
fn ln_beta_increment(a: f64, b: f64, theta1: f64, theta2: f64) -> Result<f64> {
    let t1 = ln_beta_inc(a, b, theta1)?;
    let t2 = ln_beta_inc(a, b, theta2)?;
    let from_lower = t1.ln_lower - t2.ln_lower;
    let from_upper = t2.ln_upper - t1.ln_upper;
    Ok(if from_lower <= from_upper {
        t2.ln_lower + log1m_exp(from_lower)
    } else {
        t1.ln_upper + log1m_exp(from_upper)
    })
}

// ln of the integral of exp(top + delta) over [lo, hi], where `delta`
// vanishes at the peak end (`lo` when `from_lo`) and decreases away from
// it. The far end is cut once delta has dropped below -40.
fn ln_integral<D: Fn(f64) -> f64>(top: f64, delta: D, lo: f64, hi: f64, from_lo: bool) -> Result<f64> {
    const DROP: f64 = 40.0;
    let f = |x: f64| libm::exp(delta(x));
    let step = 1e-7 * (hi - lo);
    let slope = libm::fabs(delta(if from_lo { lo + step } else { hi - step })) / step;
    let mut width = (DROP / slope).min(hi - lo);
    loop {
        let edge = if from_lo { lo + width } else { hi - width };
        if width >= hi - lo || delta(edge) <= -DROP {
            break;
        }
        width = (2.0 * width).min(hi - lo);
    }
    let (a, b) = if from_lo { (lo, lo + width) } else { (hi - width, hi) };
    let rough = integrate(f, a, b, 1e-6 * (b - a))?;
    let value = integrate(f, a, b, 1e-14 * rough)?;
    Ok(top + libm::log(value))
}

/// Mass function of `S_n` (`n = N + 1`) under the binomial mixture with the
/// truncated `Beta(0, 0)` mixing density.
pub fn incomplete_beta_mixture_mass(nplus1: usize, params: &IncompleteBetaParams) -> Result<MassFunction> {
    let logs = mixture_log_weights(nplus1, params)?;
    let total = log_sum_exp(&logs);
    if !(libm::fabs(libm::expm1(total)) <= MIXTURE_SUM_TOLERANCE) {
        return Err(Error::Precision("mixture masses do not sum to one"));
    }
    MassFunction::from_log_weights(logs)
}

/// The mixture masses in log space, each evaluated on its own and not yet
/// normalized.
pub fn mixture_log_weights(nplus1: usize, params: &IncompleteBetaParams) -> Result<Vec<f64>> {
    params.check_supported()?;
    if nplus1 == 0 {
        return Err(Error::Dimension { expected: 1, found: 0 });
    }
    let n = nplus1 as f64;
    let (t1, t2) = (params.theta1, params.theta2);
    let ln_z = libm::log(params.normalizer());
    let mut logs = Vec::with_capacity(nplus1 + 1);
    // a = 0: theta^-1 (1 - theta)^(n-1), largest at theta1.
    let top = -libm::log(t1) + (n - 1.0) * libm::log1p(-t1);
    let delta = |t: f64| -libm::log1p((t - t1) / t1) + (n - 1.0) * libm::log1p(-(t - t1) / (1.0 - t1));
    logs.push(ln_integral(top, delta, t1, t2, true)? - ln_z);
    for a in 1..nplus1 {
        let (af, bf) = (a as f64, n - a as f64);
        let ln_weight = libm::log(n) - libm::log(af) - libm::log(bf);
        logs.push(ln_weight + ln_beta_increment(af, bf, t1, t2)? - ln_z);
    }
    // a = n: theta^(n-1) (1 - theta)^-1, largest at theta2.
    let top = (n - 1.0) * libm::log(t2) - libm::log1p(-t2);
    let delta = |t: f64| (n - 1.0) * libm::log1p((t - t2) / t2) - libm::log1p((t2 - t) / (1.0 - t2));
    logs.push(ln_integral(top, delta, t1, t2, false)? - ln_z);
    Ok(logs)
}

/// Largest `|(N + 2) q[a] - f(a / (N + 1))|` over abscissae inside
/// `[theta1 + margin, theta2 - margin]`. `None` uses
/// [`DEFAULT_MARGIN_FRACTION`] of the interval width.
pub fn compare_to_limit(q: &MassFunction, params: &IncompleteBetaParams, margin: Option<f64>) -> Result<f64> {
    params.check_supported()?;
    let margin = margin.unwrap_or(DEFAULT_MARGIN_FRACTION * (params.theta2 - params.theta1));
    let (lo, hi) = (params.theta1 + margin, params.theta2 - margin);
    let hist = density_histogram(q);
    let mut sup: f64 = 0.0;
    for (&x, &d) in hist.bin_centers.iter().zip(&hist.densities) {
        if x >= lo && x <= hi {
            sup = sup.max(libm::fabs(d - incomplete_beta_density(x, params)?));
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_choose;

    #[test]
    fn density_values() {
        let p = IncompleteBetaParams::new(0.25, 0.6).unwrap();
        let z = libm::log(1.5) - libm::log(1.0 / 3.0);
        assert!((p.normalizer() - z).abs() < 1e-15);
        let f = incomplete_beta_density(0.4, &p).unwrap();
        assert!((f - 1.0 / (z * 0.24)).abs() < 1e-13);
        assert_eq!(incomplete_beta_density(0.2, &p).unwrap(), 0.0);
        assert_eq!(incomplete_beta_density(0.7, &p).unwrap(), 0.0);
        let bad = IncompleteBetaParams::with_shape(0.25, 0.6, 1.0, 0.0).unwrap();
        assert_eq!(incomplete_beta_density(0.4, &bad), Err(Error::UnsupportedParameters));
        assert!(incomplete_beta_mixture_mass(5, &bad).is_err());
        assert!(IncompleteBetaParams::new(0.6, 0.25).is_err());
    }

    #[test]
    fn density_integrates_to_one() {
        let p = IncompleteBetaParams::new(0.1, 0.85).unwrap();
        let v = integrate(|t| incomplete_beta_density(t, &p).unwrap(), 0.1, 0.85, 1e-14).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn windows() {
        assert_eq!(fm_window(100, 0.25, 0.6).unwrap(), (25, 60));
        assert_eq!(fm_window(1000, 0.25, 0.6).unwrap(), (250, 600));
        assert_eq!(fm_window(100_000, 0.25, 0.6).unwrap(), (25_000, 60_000));
        assert_eq!(fm_window(10, 0.25, 0.6).unwrap(), (3, 6));
        assert_eq!(fm_window(10, 0.11, 0.19), Err(Error::EmptyWindow { a1: 2, a2: 1 }));
    }

    #[test]
    fn single_trial_closed_form() {
        let p = IncompleteBetaParams::new(0.2, 0.6).unwrap();
        let q = incomplete_beta_mixture_mass(1, &p).unwrap();
        let ln6 = libm::log(6.0);
        assert!((q.get(0) - libm::log(3.0) / ln6).abs() < 1e-13);
        assert!((q.get(1) - libm::log(2.0) / ln6).abs() < 1e-13);
    }

    #[test]
    fn small_mixture_against_quadrature() {
        // Direct quadrature of C(n, a) theta^(a-1) (1-theta)^(n-a-1) / Z.
        let p = IncompleteBetaParams::new(0.25, 0.6).unwrap();
        let n = 12usize;
        let q = incomplete_beta_mixture_mass(n, &p).unwrap();
        let z = p.normalizer();
        for a in 0..=n {
            let c = libm::exp(ln_choose(n, a));
            let f = |t: f64| c * libm::pow(t, a as f64 - 1.0) * libm::pow(1.0 - t, (n - a) as f64 - 1.0) / z;
            let v = integrate(f, 0.25, 0.6, 1e-15).unwrap();
            assert!((q.get(a) - v).abs() < 1e-13, "a = {a}: {} vs {v}", q.get(a));
        }
    }

    #[test]
    fn large_mixture_sums_and_is_symmetric() {
        let p = IncompleteBetaParams::new(0.3, 0.55).unwrap();
        let mirror = IncompleteBetaParams::new(0.45, 0.7).unwrap();
        let n = 20_001;
        let q = incomplete_beta_mixture_mass(n, &p).unwrap();
        let r = incomplete_beta_mixture_mass(n, &mirror).unwrap();
        for a in (0..=n).step_by(97) {
            let (x, y) = (q.get(a), r.get(n - a));
            assert!((x - y).abs() <= 1e-10 * x.max(y) + 1e-300, "a = {a}: {x} vs {y}");
        }
        assert!(q.local_maxima().len() <= 2);
    }

    #[test]
    fn mixture_approaches_density() {
        // Away from the truncation points the binomial smoothing bias is
        // O(1/N); near them it decays with the margin measured in binomial
        // standard deviations.
        let p = IncompleteBetaParams::new(0.25, 0.6).unwrap();
        let sup = |n| compare_to_limit(&incomplete_beta_mixture_mass(n, &p).unwrap(), &p, None).unwrap();
        let dists: Vec<f64> = [101, 1001, 10_001, 100_001].iter().map(|&n| sup(n)).collect();
        assert!(dists.windows(2).all(|w| w[1] < w[0]), "{dists:?}");
        let inner = compare_to_limit(&incomplete_beta_mixture_mass(10_001, &p).unwrap(), &p, Some(0.05)).unwrap();
        assert!(inner < 1e-3, "{inner}");
    }
}
