use std::f64::consts::PI;

use serde::Serialize;

use super::{commands::simulate, invalid, ExperimentConfig};
use crate::coeffs::CoeffLaw;
use crate::error::Result;
use crate::stats::{ks_two_sample, mean, std_error};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawStats {
    pub law: CoeffLaw,
    pub seed: u64,
    /// Mean of `l(f_n on [0, pi]^2) / n`.
    pub mean: f64,
    pub se: f64,
    /// `mean / reference - 1`.
    pub relative_to_reference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairStats {
    pub a: CoeffLaw,
    pub b: CoeffLaw,
    /// `mean_a - mean_b`.
    pub difference: f64,
    /// `sqrt(se_a^2 + se_b^2)`.
    pub combined_se: f64,
    pub ks: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniversalityReport {
    pub n: usize,
    pub reps: usize,
    /// `pi^2 / (2 sqrt 3)`.
    pub constant: f64,
    /// `pi^2 / (2 sqrt 3) * (1 + 1 / (2n))`, the finite-`n` Gaussian value.
    pub reference: f64,
    pub laws: Vec<LawStats>,
    pub pairs: Vec<PairStats>,
    /// Per-law normalised lengths, in replication order.
    #[serde(skip)]
    pub samples: Vec<Vec<f64>>,
}

/// Run `simulate` for each config and compare the normalised length
/// distributions. All configs must share `n`, `reps`, window and grid.
pub fn compare_laws(configs: &[ExperimentConfig]) -> Result<UniversalityReport> {
    if configs.len() < 2 {
        return Err(invalid("compare needs at least two configs"));
    }
    let first = &configs[0];
    for c in &configs[1..] {
        if c.n != first.n
            || c.reps != first.reps
            || c.window != first.window
            || c.samples_per_unit != first.samples_per_unit
        {
            return Err(invalid(
                "compared configs must share n, reps, window and samples_per_unit",
            ));
        }
    }
    let mut laws = Vec::new();
    let mut samples = Vec::new();
    let mut n = 0;
    let mut reps = 0;
    for c in configs {
        let (records, report) = simulate(c)?;
        n = report.n;
        reps = report.reps;
        let xs: Vec<f64> = records.iter().map(|r| r.total_length / n as f64).collect();
        laws.push((report.law, report.seed, mean(&xs), std_error(&xs)));
        samples.push(xs);
    }
    let constant = PI * PI / (2.0 * 3f64.sqrt());
    let reference = constant * (1.0 + 1.0 / (2.0 * n as f64));
    let mut pairs = Vec::new();
    for i in 0..laws.len() {
        for j in i + 1..laws.len() {
            pairs.push(PairStats {
                a: laws[i].0,
                b: laws[j].0,
                difference: laws[i].2 - laws[j].2,
                combined_se: laws[i].3.hypot(laws[j].3),
                ks: ks_two_sample(&samples[i], &samples[j]),
            });
        }
    }
    Ok(UniversalityReport {
        n,
        reps,
        constant,
        reference,
        laws: laws
            .into_iter()
            .map(|(law, seed, mean, se)| LawStats {
                law,
                seed,
                mean,
                se,
                relative_to_reference: mean / reference - 1.0,
            })
            .collect(),
        pairs,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(law: CoeffLaw, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            law: Some(law),
            seed: Some(seed),
            n: Some(4),
            reps: Some(40),
            ..Default::default()
        }
    }

    #[test]
    fn same_law_agrees() {
        let r = compare_laws(&[cfg(CoeffLaw::Gaussian, 1), cfg(CoeffLaw::Gaussian, 2)]).unwrap();
        assert_eq!(r.pairs.len(), 1);
        assert!(r.pairs[0].difference.abs() <= 3.0 * r.pairs[0].combined_se);
        assert_eq!(r.samples[0].len(), 40);
    }

    #[test]
    fn mismatch_rejected() {
        let mut b = cfg(CoeffLaw::Rademacher, 2);
        b.n = Some(5);
        assert!(compare_laws(&[cfg(CoeffLaw::Gaussian, 1), b]).is_err());
        assert!(compare_laws(&[cfg(CoeffLaw::Gaussian, 1)]).is_err());
    }
}
