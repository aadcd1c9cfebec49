//! Synthetic examiner populations with known response probabilities.
//!
//! Generation is reproducible across runs and platforms: examiner `j`
//! (0-based, in profile order) draws from a ChaCha8 stream seeded with
//! `seed` and stream number `j`. Each trial takes one `f64` uniform `u` in
//! `[0, 1)` and picks ID if `u < p_ID`, IN if `u < p_ID + p_IN`, else EX.
//! Same-source trials are drawn before different-source trials.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calibration::fit_uninformative;
use crate::error::{Error, Result};
use crate::io::{aggregate, Dataset, ResponseRecord};
use crate::model::{Cells, ResponseCategory, TruthLabel};

/// True probabilities of ID, IN, EX under each truth label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExaminerProfile {
    pub theta_same: [f64; 3],
    pub theta_diff: [f64; 3],
}

impl ExaminerProfile {
    pub fn new(theta_same: [f64; 3], theta_diff: [f64; 3]) -> Result<Self> {
        let p = ExaminerProfile { theta_same, theta_diff };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, triple) in [("theta_same", self.theta_same), ("theta_diff", self.theta_diff)] {
            if triple.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::InvalidConfig(format!("{name} has a negative or non-finite entry")));
            }
            let sum: f64 = triple.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidConfig(format!("{name} sums to {sum}, not 1")));
            }
        }
        Ok(())
    }

    pub fn theta(&self, cat: ResponseCategory, t: TruthLabel) -> f64 {
        match t {
            TruthLabel::SameSource => self.theta_same[cat.index()],
            TruthLabel::DifferentSource => self.theta_diff[cat.index()],
        }
    }

    /// Always identifies same-source pairs and excludes different-source pairs.
    pub fn perfect() -> Self {
        ExaminerProfile { theta_same: [1.0, 0.0, 0.0], theta_diff: [0.0, 0.0, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub profiles: Vec<ExaminerProfile>,
    pub n_same: u64,
    pub n_diff: u64,
    pub seed: u64,
    #[serde(default = "default_condition")]
    pub condition_label: String,
}

fn default_condition() -> String {
    "simulated".to_owned()
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.profiles.is_empty() {
            return Err(Error::InvalidConfig("at least one profile is required".into()));
        }
        if self.n_same + self.n_diff == 0 {
            return Err(Error::InvalidConfig("n_same + n_diff must be at least 1".into()));
        }
        self.profiles.iter().try_for_each(ExaminerProfile::validate)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: SimConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }
}

/// Synthetic ids: examiner `SIM001`…, pairs `S00001`… and `D00001`….
pub fn examiner_id(index: usize) -> String {
    format!("SIM{:03}", index + 1)
}

fn draw(rng: &mut ChaCha8Rng, probs: &[f64; 3]) -> ResponseCategory {
    let u: f64 = rng.gen();
    if u < probs[0] {
        ResponseCategory::Identification
    } else if u < probs[0] + probs[1] {
        ResponseCategory::Inconclusive
    } else {
        ResponseCategory::Exclusion
    }
}

pub fn synthesize(config: &SimConfig) -> Result<Dataset> {
    config.validate()?;
    let mut records = Vec::with_capacity(config.profiles.len() * (config.n_same + config.n_diff) as usize);
    for (j, profile) in config.profiles.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(j as u64);
        let id = examiner_id(j);
        for (truth, n, probs, prefix) in [
            (TruthLabel::SameSource, config.n_same, &profile.theta_same, 'S'),
            (TruthLabel::DifferentSource, config.n_diff, &profile.theta_diff, 'D'),
        ] {
            for i in 0..n {
                records.push(ResponseRecord {
                    examiner_id: id.clone(),
                    pair_id: format!("{prefix}{:05}", i + 1),
                    truth,
                    response: draw(&mut rng, probs),
                });
            }
        }
    }
    Dataset::new(config.condition_label.clone(), records)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergencePoint {
    /// trials per truth label
    pub trials: u64,
    /// `|E[θ | data] − θ_true|` per cell
    pub errors: Cells<f64>,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub profile: ExaminerProfile,
    pub seed: u64,
    pub points: Vec<ConvergencePoint>,
}

/// Fits the uninformative model at each schedule point (`n_same = n_diff =
/// trials`) and records the posterior-mean error against the true profile.
pub fn convergence_study(profile: &ExaminerProfile, schedule: &[u64], seed: u64) -> Result<ConvergenceReport> {
    if schedule.is_empty() || schedule[0] == 0 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule);
    }
    profile.validate()?;
    let points = schedule
        .iter()
        .map(|&trials| {
            let config = SimConfig {
                profiles: vec![*profile],
                n_same: trials,
                n_diff: trials,
                seed,
                condition_label: default_condition(),
            };
            let ds = synthesize(&config)?;
            let (id, table) = aggregate(&ds).pop().expect("one examiner");
            let model = fit_uninformative(&id, &table)?;
            let errors = Cells::from_fn(|cat, t| (model.posteriors.expected_theta(cat, t) - profile.theta(cat, t)).abs());
            let max_error = errors.same_source.iter().chain(&errors.different_source).copied().fold(0.0, f64::max);
            Ok(ConvergencePoint { trials, errors, max_error })
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceReport { profile: *profile, seed, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CountTable;

    fn config(profiles: Vec<ExaminerProfile>, n_same: u64, n_diff: u64, seed: u64) -> SimConfig {
        SimConfig { profiles, n_same, n_diff, seed, condition_label: "t".into() }
    }

    #[test]
    fn perfect_profile_gives_perfect_table() {
        let ds = synthesize(&config(vec![ExaminerProfile::perfect()], 7, 5, 1)).unwrap();
        let tables = aggregate(&ds);
        assert_eq!(tables, vec![("SIM001".into(), CountTable::new([7, 0, 0], [0, 0, 5]))]);
    }

    #[test]
    fn same_seed_same_dataset() {
        let p = ExaminerProfile::new([0.6, 0.3, 0.1], [0.05, 0.35, 0.6]).unwrap();
        let c = config(vec![p, p, p], 7, 5, 42);
        assert_eq!(synthesize(&c).unwrap(), synthesize(&c).unwrap());
        let other = synthesize(&config(vec![p, p, p], 7, 5, 43)).unwrap();
        assert_ne!(synthesize(&c).unwrap(), other);
    }

    #[test]
    fn examiner_streams_do_not_depend_on_group_size() {
        let p = ExaminerProfile::new([0.6, 0.3, 0.1], [0.05, 0.35, 0.6]).unwrap();
        let one = synthesize(&config(vec![p], 50, 50, 9)).unwrap();
        let three = synthesize(&config(vec![p, p, p], 50, 50, 9)).unwrap();
        assert_eq!(one.records(), &three.records()[..100]);
    }

    #[test]
    fn invalid_configs() {
        assert!(ExaminerProfile::new([0.5, 0.5, 0.1], [0.0, 0.0, 1.0]).is_err());
        assert!(ExaminerProfile::new([1.5, -0.5, 0.0], [0.0, 0.0, 1.0]).is_err());
        assert!(synthesize(&config(vec![], 7, 5, 0)).is_err());
        assert!(synthesize(&config(vec![ExaminerProfile::perfect()], 0, 0, 0)).is_err());
    }

    #[test]
    fn config_from_json() {
        let c = SimConfig::from_json(
            r#"{"profiles":[{"theta_same":[1,0,0],"theta_diff":[0,0,1]}],"n_same":7,"n_diff":5,"seed":3}"#,
        )
        .unwrap();
        assert_eq!(c.condition_label, "simulated");
        assert!(SimConfig::from_json(r#"{"profiles":[],"n_same":7,"n_diff":5,"seed":3}"#).is_err());
    }

    #[test]
    fn schedule_validation() {
        let p = ExaminerProfile::perfect();
        assert!(matches!(convergence_study(&p, &[], 0), Err(Error::InvalidSchedule)));
        assert!(matches!(convergence_study(&p, &[10, 10], 0), Err(Error::InvalidSchedule)));
        assert!(matches!(convergence_study(&p, &[0, 10], 0), Err(Error::InvalidSchedule)));
    }
}
