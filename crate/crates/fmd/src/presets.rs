//! Parameter sets behind the published figures.

use fmd_core::{CompletionKind, ExtensionScenario, PanAssertion};

use crate::args::PresetName;
use crate::error::Result;
use crate::run::Job;

const BASE: (usize, usize, usize, f64, f64) = (100, 25, 60, 0.1, 0.7);

fn scaled(n: usize) -> Result<PanAssertion> {
    let (n0, a1, a2, pl, pu) = BASE;
    Ok(PanAssertion::new(n, a1 * n / n0, a2 * n / n0, pl, pu)?)
}

fn per_kind(prefix: &str, s: PanAssertion, kinds: &[CompletionKind], job: fn(PanAssertion, CompletionKind) -> Job) -> Vec<(String, Job)> {
    kinds.iter().map(|&k| (format!("{prefix}{k}"), job(s, k))).collect()
}

pub fn preset_jobs(name: PresetName) -> Result<Vec<(String, Job)>> {
    use CompletionKind::{Linear, Strict, Weak};
    let all = CompletionKind::ALL;
    Ok(match name {
        PresetName::Fig1 => per_kind("predict_", scaled(100)?, &all, Job::Predict),
        PresetName::Fig2Top => per_kind("mass_", scaled(100)?, &all, Job::Mass),
        PresetName::Fig2Bottom => per_kind("mass_", scaled(1000)?, &all, Job::Mass),
        PresetName::Fig3 => {
            let big = scaled(100_000)?;
            let small = scaled(100)?;
            vec![
                ("predict_L1".into(), Job::Predict(big, Linear)),
                ("predict_S1".into(), Job::Predict(big, Strict)),
                ("predict_L2".into(), Job::Predict(small, Linear)),
                ("predict_S2".into(), Job::Predict(small, Strict)),
                ("mass_L1".into(), Job::Mass(big, Linear)),
                ("mass_S1".into(), Job::Mass(big, Strict)),
                ("mass_L2".into(), Job::Mass(small, Linear)),
                ("mass_S2".into(), Job::Mass(small, Strict)),
                ("mass_LR".into(), Job::Reduce(big, Linear, 100)),
                ("mass_SR".into(), Job::Reduce(big, Strict, 100)),
            ]
        }
        PresetName::Fig4 => {
            let scenario = ExtensionScenario { base: scaled(100)?, k: 99_900, p_lower_ext: 0.00012, p_upper_ext: 0.99998 };
            vec![
                ("predict_L1".into(), Job::ExtendPredict(scenario, Linear)),
                ("mass_L1".into(), Job::Extend(scenario, Linear)),
            ]
        }
        PresetName::Fig8 => [100usize, 1_000, 100_000]
            .iter()
            .map(|&n| {
                let job = Job::Limit { n, theta1: 0.2, theta2: 0.6, p_lower: Some(0.1), p_upper: Some(0.8), kind: Strict };
                (format!("limit_N{n}"), job)
            })
            .collect(),
        PresetName::Appendix1 => {
            let (n, a1, a2, pl, _) = BASE;
            let mut jobs = Vec::new();
            for pu in [0.75, 0.79, 0.83] {
                jobs.push((format!("mass_pU_{pu}"), Job::Mass(PanAssertion::new(n, a1, a2, pl, pu)?, Weak)));
            }
            jobs
        }
        PresetName::Appendix2 => vec![("geometry".into(), Job::Geometry(PanAssertion::new(8, 2, 5, 0.2, 0.7)?))],
    })
}
