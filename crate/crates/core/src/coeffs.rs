//! Centered, unit-variance coefficient laws and reproducible seeding.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffLaw {
    Gaussian,
    /// +1 or -1 with probability 1/2 each.
    Rademacher,
    /// `Exp(1) - 1`.
    ExponentialCentered,
    /// Uniform on `[-sqrt 3, sqrt 3]`.
    UniformCentered,
}

impl CoeffLaw {
    pub const ALL: [CoeffLaw; 4] = [
        CoeffLaw::Gaussian,
        CoeffLaw::Rademacher,
        CoeffLaw::ExponentialCentered,
        CoeffLaw::UniformCentered,
    ];

    /// Name used on the command line and in CSV output.
    pub fn cli_name(self) -> &'static str {
        match self {
            CoeffLaw::Gaussian => "gaussian",
            CoeffLaw::Rademacher => "rademacher",
            CoeffLaw::ExponentialCentered => "exponential",
            CoeffLaw::UniformCentered => "uniform",
        }
    }

    /// Laws whose characteristic function is real and even.
    pub fn is_symmetric(self) -> bool {
        !matches!(self, CoeffLaw::ExponentialCentered)
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            CoeffLaw::Gaussian => rng.sample(StandardNormal),
            CoeffLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            CoeffLaw::ExponentialCentered => {
                let e: f64 = rng.sample(Exp1);
                e - 1.0
            }
            CoeffLaw::UniformCentered => rng.random_range(-SQRT_3..SQRT_3),
        }
    }

    /// Exact characteristic function `E[exp(i t a)]`.
    pub fn char_fn(self, t: f64) -> Complex64 {
        match self {
            CoeffLaw::Gaussian => Complex64::new((-0.5 * t * t).exp(), 0.0),
            CoeffLaw::Rademacher => Complex64::new(t.cos(), 0.0),
            CoeffLaw::ExponentialCentered => {
                // e^{-it} / (1 - it)
                let (s, c) = t.sin_cos();
                Complex64::new(c, -s) / Complex64::new(1.0, -t)
            }
            CoeffLaw::UniformCentered => Complex64::new(sinc(SQRT_3 * t), 0.0),
        }
    }
}

impl fmt::Display for CoeffLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for CoeffLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(CoeffLaw::Gaussian),
            "rademacher" | "bernoulli" => Ok(CoeffLaw::Rademacher),
            "exponential" | "exponential_centered" => Ok(CoeffLaw::ExponentialCentered),
            "uniform" | "uniform_centered" => Ok(CoeffLaw::UniformCentered),
            _ => Err(Error::UnknownLaw(s.to_string())),
        }
    }
}

/// `sin(x) / x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// SplitMix64 finaliser; a bijective 64-bit mixer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `index` under a run seed. Depends only on the pair, so
/// results do not depend on how replications are scheduled.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ splitmix64(index)
}

/// Counter-based generator for one stream.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n x n` i.i.d. draws, deterministic in `(law, n, seed)`.
pub fn sample_matrix(law: CoeffLaw, n: usize, seed: u64) -> Result<Array2<f64>> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    let mut rng = rng_for(seed);
    Ok(Array2::from_shape_simple_fn((n, n), || {
        law.sample(&mut rng)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parses_cli_names() {
        for law in CoeffLaw::ALL {
            assert_eq!(law.cli_name().parse::<CoeffLaw>().unwrap(), law);
        }
        assert!("cauchy".parse::<CoeffLaw>().is_err());
    }

    #[test]
    fn zero_degree_rejected() {
        assert!(matches!(
            sample_matrix(CoeffLaw::Gaussian, 0, 1),
            Err(Error::ZeroDegree)
        ));
    }

    #[test]
    fn supports() {
        let m = sample_matrix(CoeffLaw::Rademacher, 30, 4).unwrap();
        assert!(m.iter().all(|&v| v == 1.0 || v == -1.0));
        let e = sample_matrix(CoeffLaw::ExponentialCentered, 30, 4).unwrap();
        assert!(e.iter().all(|&v| v > -1.0));
        let u = sample_matrix(CoeffLaw::UniformCentered, 30, 4).unwrap();
        assert!(u.iter().all(|&v| v.abs() <= SQRT_3));
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = sample_matrix(CoeffLaw::Gaussian, 8, 42).unwrap();
        let b = sample_matrix(CoeffLaw::Gaussian, 8, 42).unwrap();
        let c = sample_matrix(CoeffLaw::Gaussian, 8, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_matrix_moments() {
        let m = sample_matrix(CoeffLaw::Gaussian, 100, 2024).unwrap();
        let n = m.len() as f64;
        let mean = m.sum() / n;
        let var = m.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.04);
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn million_sample_moments() {
        for law in CoeffLaw::ALL {
            let mut rng = rng_for(77);
            let n = 1_000_000;
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let v = law.sample(&mut rng);
                s += v;
                s2 += v * v;
            }
            let mean = s / n as f64;
            let var = s2 / n as f64 - mean * mean;
            assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "{law}: mean {mean}");
            assert!((var - 1.0).abs() < 0.01, "{law}: var {var}");
        }
    }

    #[test]
    fn char_fn_values() {
        for law in CoeffLaw::ALL {
            let z = law.char_fn(0.0);
            assert!((z.re - 1.0).abs() < 1e-15 && z.im.abs() < 1e-15);
        }
        assert!((CoeffLaw::Rademacher.char_fn(PI).re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn char_fn_bounded_and_conjugate_symmetric() {
        for law in CoeffLaw::ALL {
            for i in 0..=1000 {
                let t = -50.0 + 0.1 * i as f64;
                let z = law.char_fn(t);
                assert!(z.norm() <= 1.0 + 1e-15);
                assert_eq!(law.char_fn(-t), z.conj(), "{law} at {t}");
            }
        }
    }

    #[test]
    fn unit_variance_from_curvature_at_zero() {
        let h = 1e-3;
        for law in CoeffLaw::ALL {
            let f = |t: f64| law.char_fn(t).re;
            let second = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            assert!((second + 1.0).abs() < 1e-4, "{law}: {second}");
        }
    }

    #[test]
    fn char_fn_matches_monte_carlo() {
        let n = 1_000_000;
        for law in CoeffLaw::ALL {
            let mut rng = rng_for(123);
            let samples: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
            for &t in &[0.5, 1.0, 2.0] {
                let mut acc = Complex64::new(0.0, 0.0);
                for &a in &samples {
                    let (s, c) = (t * a).sin_cos();
                    acc += Complex64::new(c, s);
                }
                acc /= n as f64;
                assert!((acc - law.char_fn(t)).norm() < 0.005, "{law} t={t}");
            }
        }
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> =
            (0..10_000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 10_000);
    }
}
