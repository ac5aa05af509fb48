//! Built-in scenarios, parameterized by rank.

use super::sampler::SamplerConfig;
use super::scenario::{AutoSpec, Cx, MatrixSpec, QuantumSpectral, RSpec, Scenario};
use crate::error::{Error, Result};

pub const BUILTINS: [&str; 6] = [
    "trivial_yangian",
    "diagonal_dressed",
    "projector_b",
    "constant_g",
    "spectral_shift_g",
    "nonsimilar_detwist",
];

/// Overrides applied on top of a builtin.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub rank: Option<usize>,
    pub sites: Option<usize>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub tolerance: Option<f64>,
}

fn base(name: &str, rank: usize) -> Scenario {
    Scenario {
        name: name.to_string(),
        rank,
        gamma: [1.0, 0.0],
        spectral: true,
        b: None,
        k: None,
        q: None,
        q_right: None,
        q_left: None,
        chi: None,
        g: None,
        a: None,
        f: None,
        r0: RSpec::Yangian,
        rbar: None,
        projectors: None,
        sites: 1,
        quantum_spectral: None,
        transfer_spectral: vec![[0.3, 0.2], [-0.7, 0.5], [1.1, -0.4]],
        sampler: SamplerConfig {
            seed: 20240917,
            ..Default::default()
        },
        tolerance: 1e-9,
        deep_tolerance: 1e-8,
        suites: Vec::new(),
    }
}

fn diagonal(entries: Vec<String>) -> MatrixSpec {
    let n = entries.len();
    MatrixSpec::Expr(
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            entries[i].clone()
                        } else {
                            "0".to_string()
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

fn constant(rows: Vec<Vec<f64>>) -> Vec<Vec<Cx>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(|v| [v, 0.0]).collect())
        .collect()
}

fn constant_diag(values: &[Cx]) -> Vec<Vec<Cx>> {
    let n = values.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { values[i] } else { [0.0, 0.0] })
                .collect()
        })
        .collect()
}

/// `exp(sum_j c_ij lambda_j + s u1)` with a fixed, generic coefficient pattern.
fn exp_diagonal(rank: usize, scale: f64, with_u: bool) -> Vec<String> {
    (0..rank)
        .map(|i| {
            let mut terms = Vec::new();
            for j in 0..rank {
                let coef = if i == j {
                    0.3 * scale
                } else {
                    -0.1 * scale * (j + 1) as f64 / rank as f64
                };
                terms.push(format!("{coef:.4}*lambda{}", j + 1));
            }
            if with_u {
                terms.push(format!("{:.4}*u1", 0.1 * (i + 1) as f64));
            }
            format!("exp({})", terms.join(" + "))
        })
        .collect()
}

/// A non-diagonal, spectral-dependent dressing matrix.
fn dense_b(rank: usize) -> MatrixSpec {
    let mut rows: Vec<Vec<String>> = vec![
        vec!["exp(lambda1 + 0.3*u1)".into(), "0.4*lambda2 + 0.2".into()],
        vec!["0.3*u1 - 0.1*lambda1".into(), "exp(0.5*lambda2)".into()],
    ];
    if rank == 3 {
        rows[0].push("0.1*u1".into());
        rows[1].push("0".into());
        rows.push(vec![
            "0".into(),
            "0.2*lambda3 - 0.1".into(),
            "exp(0.4*lambda3 - 0.2*u1)".into(),
        ]);
    }
    MatrixSpec::Expr(rows)
}

fn twist_q(rank: usize) -> MatrixSpec {
    // the linear factors keep D dynamical; pure exponentials cancel out of it
    let all = [
        "exp(0.7*lambda2 + 0.1*lambda1)*(5 + lambda1)",
        "exp(-0.4*lambda1)*(6 - lambda2)",
        "exp(0.3*lambda3 - 0.2*lambda2)*(5 + 0.5*lambda3)",
    ];
    diagonal(all[..rank].iter().map(|s| s.to_string()).collect())
}

fn dense_constant(rank: usize, shift: f64) -> Vec<Vec<Cx>> {
    constant(
        (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| {
                        if i == j {
                            1.0 + shift * (i + 1) as f64
                        } else {
                            0.2 + 0.15 * (i + 2 * j) as f64
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

fn unit_projector(rank: usize, i: usize) -> Vec<Vec<Cx>> {
    constant(
        (0..rank)
            .map(|r| {
                (0..rank)
                    .map(|s| if r == i && s == i { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect(),
    )
}

pub fn builtin(name: &str, rank: usize) -> Result<Scenario> {
    if !(2..=3).contains(&rank) {
        return Err(Error::Scenario(format!(
            "builtin scenarios support rank 2 or 3, got {rank}"
        )));
    }
    let mut s = base(name, rank);
    match name {
        "trivial_yangian" => {}
        "diagonal_dressed" => {
            s.b = Some(diagonal(exp_diagonal(rank, 1.0, true)));
            s.k = Some(diagonal(exp_diagonal(rank, 0.5, false)));
            s.q_right = Some(MatrixSpec::Constant(dense_constant(rank, 0.5)));
            s.q_left = Some(MatrixSpec::Constant(dense_constant(rank, -0.2)));
        }
        "projector_b" => {
            s.b = Some(diagonal(exp_diagonal(rank, 1.0, false)));
            s.q = Some(diagonal(exp_diagonal(rank, 0.7, false)));
            s.projectors = Some((0..rank).map(|i| unit_projector(rank, i)).collect());
            s.suites = [
                "zero-weight",
                "ybce",
                "dybe",
                "sdre",
                "intertwiner",
                "detwist",
                "theta-period",
            ]
            .map(String::from)
            .to_vec();
        }
        "constant_g" => {
            let g: Vec<Cx> = [[2.0, 0.0], [1.0, 0.0], [0.5, 0.0]][..rank].to_vec();
            s.g = Some(AutoSpec::Constant {
                matrix: constant_diag(&g),
            });
            s.b = Some(dense_b(rank));
            s.q = Some(twist_q(rank));
            s.q_right = Some(MatrixSpec::Constant(constant_diag(
                &[[1.3, 0.2], [-0.7, 0.0], [0.9, -0.3]][..rank],
            )));
            s.q_left = Some(MatrixSpec::Constant(constant_diag(
                &[[0.8, 0.0], [1.2, 0.1], [1.5, 0.0]][..rank],
            )));
        }
        "spectral_shift_g" => {
            s.g = Some(AutoSpec::SpectralShift { step: [1.0, 0.0] });
            s.b = Some(dense_b(rank));
            s.q = Some(twist_q(rank));
            s.q_right = Some(MatrixSpec::Constant(constant_diag(
                &[[1.3, 0.2], [-0.7, 0.0], [0.9, -0.3]][..rank],
            )));
            s.q_left = Some(MatrixSpec::Constant(constant_diag(
                &[[0.8, 0.0], [1.2, 0.1], [1.5, 0.0]][..rank],
            )));
            s.quantum_spectral = Some(QuantumSpectral::Preset("locality".into()));
        }
        "nonsimilar_detwist" => {
            s.rbar = Some(RSpec::ReshetikhinYangian { theta: 0.35 });
            s.b = Some(diagonal(exp_diagonal(rank, 1.0, true)));
            s.k = Some(diagonal(exp_diagonal(rank, 0.5, false)));
            s.q_right = Some(MatrixSpec::Constant(unit_projector(rank, 0)));
        }
        _ => {
            return Err(Error::Scenario(format!(
                "unknown builtin '{name}'; available: {}",
                BUILTINS.join(", ")
            )))
        }
    }
    Ok(s)
}

pub fn builtin_scenario(name: &str, overrides: &Overrides) -> Result<Scenario> {
    let mut s = builtin(name, overrides.rank.unwrap_or(2))?;
    if let Some(n) = overrides.sites {
        s.sites = n;
    }
    if let Some(seed) = overrides.seed {
        s.sampler.seed = seed;
    }
    if let Some(count) = overrides.count {
        s.sampler.count = count;
    }
    if let Some(t) = overrides.tolerance {
        s.tolerance = t;
    }
    s.validate()?;
    Ok(s)
}
