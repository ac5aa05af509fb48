#![allow(dead_code)]

use dynrefl::consistency::SamplePoint;
use dynrefl::dyncore::{DynMat, LambdaPoint, SpectralPoint, WeightScheme};
use dynrefl::scenarios::{sample_points, SampleShape, SamplerConfig};
use dynrefl::{CMat, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn scheme(n: usize) -> WeightScheme {
    WeightScheme::new(n, r(1.0)).unwrap()
}

pub fn points(n: usize, u_slots: usize, count: usize, seed: u64) -> Vec<SamplePoint> {
    let cfg = SamplerConfig {
        seed,
        count,
        half_width: 1.5,
        min_separation: 0.2,
    };
    let shape = SampleShape {
        rank: n,
        u_slots,
        avoid: Vec::new(),
    };
    sample_points(&cfg, &shape, |_| true).unwrap()
}

pub fn at(lambda: &[f64], u: &[f64]) -> (LambdaPoint, SpectralPoint) {
    (
        LambdaPoint(lambda.iter().map(|&x| r(x)).collect()),
        SpectralPoint(u.iter().map(|&x| r(x)).collect()),
    )
}

/// Flip operator written out entry by entry: `P |i j> = |j i>`.
pub fn flip(n: usize) -> CMat {
    let mut p = CMat::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            p[(j * n + i, i * n + j)] = r(1.0);
        }
    }
    p
}

pub fn yangian_at(n: usize, u1: C64, u2: C64) -> CMat {
    CMat::identity(n * n, n * n) + flip(n) / (u1 - u2)
}

pub fn yangian(s: WeightScheme) -> DynMat {
    let n = s.rank;
    DynMat::spectral_fn(s, vec![1, 2], move |_, u| Ok(yangian_at(n, u[0], u[1]))).unwrap()
}

pub fn diag(entries: &[C64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = r(1.0);
    m
}

pub fn constant(s: WeightScheme, legs: Vec<usize>, m: CMat) -> DynMat {
    DynMat::constant(s, legs, m).unwrap()
}

/// `diag(exp(sum_j coef[i][j] lambda_j))` on leg 1.
pub fn exp_diag(s: WeightScheme, coef: Vec<Vec<f64>>) -> DynMat {
    DynMat::lambda_fn(s, 1, move |lam| {
        let e: Vec<C64> = coef
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&lam.0)
                    .map(|(a, l)| l * *a)
                    .sum::<C64>()
                    .exp()
            })
            .collect();
        Ok(diag(&e))
    })
}

/// A generic invertible diagonal dressing for rank `n`.
pub fn generic_b(s: WeightScheme) -> DynMat {
    let n = s.rank;
    exp_diag(
        s,
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 0.3 } else { -0.1 * (j + 1) as f64 })
                    .collect()
            })
            .collect(),
    )
}

pub fn generic_q(s: WeightScheme) -> DynMat {
    let n = s.rank;
    exp_diag(
        s,
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { -0.2 } else { 0.15 * (i + j) as f64 })
                    .collect()
            })
            .collect(),
    )
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `kron` written out, independent of the library helper.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}
