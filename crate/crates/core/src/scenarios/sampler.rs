//! Seeded rejection sampler for evaluation points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::consistency::SamplePoint;
use crate::dyncore::{LambdaPoint, SpectralPoint};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Consecutive rejections tolerated before giving up.
pub const RETRY_CAP: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub seed: u64,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Real and imaginary parts are drawn from `[-half_width, half_width]`.
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    /// Minimum distance between distinct Cartan coordinates and between
    /// distinct spectral values.
    #[serde(default = "default_separation")]
    pub min_separation: f64,
}

fn default_count() -> usize {
    50
}

fn default_half_width() -> f64 {
    2.0
}

fn default_separation() -> f64 {
    0.1
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: default_count(),
            half_width: default_half_width(),
            min_separation: default_separation(),
        }
    }
}

/// What to draw besides the configuration.
#[derive(Debug, Clone, Default)]
pub struct SampleShape {
    pub rank: usize,
    /// Spectral slots `0..u_slots`; zero leaves the spectral point empty.
    pub u_slots: usize,
    /// Fixed spectral values that sampled ones must stay away from.
    pub avoid: Vec<C64>,
}

fn separated(values: &[C64], sep: f64) -> bool {
    values
        .iter()
        .enumerate()
        .all(|(i, a)| values[i + 1..].iter().all(|b| (a - b).norm() >= sep))
}

/// Deterministic given the configuration; every point satisfies the
/// separation constraints and `valid`.
pub fn sample_points<F>(
    cfg: &SamplerConfig,
    shape: &SampleShape,
    valid: F,
) -> Result<Vec<SamplePoint>>
where
    F: Fn(&SamplePoint) -> bool,
{
    if cfg.count == 0 {
        return Err(Error::Sampler("sample count must be at least 1".into()));
    }
    if cfg.half_width.is_nan()
        || cfg.half_width <= 0.0
        || cfg.min_separation.is_nan()
        || cfg.min_separation < 0.0
    {
        return Err(Error::Sampler(
            "half_width must be positive and min_separation non-negative".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let h = cfg.half_width;
    let draw = |rng: &mut ChaCha8Rng| C64::new(rng.gen_range(-h..=h), rng.gen_range(-h..=h));
    let mut out = Vec::with_capacity(cfg.count);
    let mut misses = 0;
    while out.len() < cfg.count {
        let lambda: Vec<C64> = (0..shape.rank).map(|_| draw(&mut rng)).collect();
        let u: Vec<C64> = (0..shape.u_slots).map(|_| draw(&mut rng)).collect();
        let far_from_fixed = u.iter().all(|x| {
            shape
                .avoid
                .iter()
                .all(|a| (x - a).norm() >= cfg.min_separation)
        });
        let point = SamplePoint {
            lambda: LambdaPoint(lambda),
            u: SpectralPoint(u),
        };
        if far_from_fixed
            && separated(&point.lambda.0, cfg.min_separation)
            && separated(&point.u.0, cfg.min_separation)
            && valid(&point)
        {
            out.push(point);
            misses = 0;
        } else {
            misses += 1;
            if misses >= RETRY_CAP {
                return Err(Error::Sampler(format!(
                    "{RETRY_CAP} consecutive rejections after {} accepted points; constraints too tight",
                    out.len()
                )));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape() -> SampleShape {
        SampleShape {
            rank: 3,
            u_slots: 6,
            avoid: vec![C64::new(0.3, 0.2)],
        }
    }

    #[test]
    fn deterministic() {
        let cfg = SamplerConfig {
            seed: 11,
            count: 20,
            ..Default::default()
        };
        let a = sample_points(&cfg, &shape(), |_| true).unwrap();
        let b = sample_points(&cfg, &shape(), |_| true).unwrap();
        assert_eq!(a, b);
        let other = sample_points(&SamplerConfig { seed: 12, ..cfg }, &shape(), |_| true).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn separation_respected() {
        let cfg = SamplerConfig {
            seed: 3,
            count: 200,
            half_width: 0.5,
            min_separation: 0.1,
        };
        for p in sample_points(&cfg, &shape(), |_| true).unwrap() {
            for (i, a) in p.u.0.iter().enumerate() {
                assert!((a - C64::new(0.3, 0.2)).norm() >= 0.1);
                for b in &p.u.0[i + 1..] {
                    assert!((a - b).norm() >= 0.1);
                }
            }
            for (i, a) in p.lambda.0.iter().enumerate() {
                for b in &p.lambda.0[i + 1..] {
                    assert!((a - b).norm() >= 0.1);
                }
            }
        }
    }

    #[test]
    fn impossible_constraints_hit_the_cap() {
        let cfg = SamplerConfig {
            seed: 1,
            count: 5,
            half_width: 0.01,
            min_separation: 0.1,
        };
        assert!(matches!(
            sample_points(&cfg, &shape(), |_| true),
            Err(Error::Sampler(_))
        ));
    }

    #[test]
    fn predicate_filters() {
        let cfg = SamplerConfig {
            seed: 5,
            count: 30,
            ..Default::default()
        };
        let pts = sample_points(&cfg, &shape(), |p| p.lambda.0[0].re > 0.0).unwrap();
        assert!(pts.iter().all(|p| p.lambda.0[0].re > 0.0));
    }
}
