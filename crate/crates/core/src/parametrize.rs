//! Standard parametrization of the structure matrices in terms of
//! dressing matrices `b`, `q` and non-dynamical R-matrices.

use crate::consistency::{residual_quasi_nondyn, ResidualReport, SamplePoint, StructureSet};
use crate::dyncore::{adjoint_auto, dyn_shift, pi_transpose, Automorphism, DynMat, Power, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, rel_residual, CMat};

fn require_legs(x: &DynMat, legs: &[usize], what: &str) -> Result<()> {
    if x.legs() != legs {
        return Err(Error::InvalidLeg(format!(
            "{what} must act on legs {legs:?}, got {:?}",
            x.legs()
        )));
    }
    Ok(())
}

/// `g b g^-1` (or the spectral translate of `b`).
pub fn conjugated(b: &DynMat, g: &Automorphism) -> Result<DynMat> {
    let legs = b.legs().to_vec();
    adjoint_auto(b, g, &legs, Side::Conjugate, Power::int(1))
}

/// `Ad (g (x) ... (x) g)^(k sigma/gamma)` on all legs of `x`.
pub fn sigma_conjugate(x: &DynMat, g: &Automorphism, coefficient: f64) -> Result<DynMat> {
    let legs = x.legs().to_vec();
    adjoint_auto(
        x,
        g,
        &legs,
        Side::Conjugate,
        Power::Sigma(linalg::c(coefficient, 0.0)),
    )
}

/// `A = b_1^-1 beta_2^-1 Ad (g_1 g_2)^-sigma R0 b_2 beta_1`, `beta = g b g^-1`.
pub fn build_a(r0: &DynMat, b: &DynMat, g: &Automorphism) -> Result<DynMat> {
    require_legs(r0, &[1, 2], "R")?;
    require_legs(b, &[1], "b")?;
    let beta = conjugated(b, g)?;
    let rt = sigma_conjugate(r0, g, -1.0)?;
    let b1 = b.clone();
    let b2 = b.on(&[2])?;
    let beta1 = beta.clone();
    let beta2 = beta.on(&[2])?;
    DynMat::product(&[&b1.inverse(), &beta2.inverse(), &rt, &b2, &beta1])
}

/// `B = b_2^-1 beta_2(h_1)` and `C = B^pi = b_1^-1 beta_1(h_2)`.
pub fn build_bc(b: &DynMat, g: &Automorphism) -> Result<(DynMat, DynMat)> {
    require_legs(b, &[1], "b")?;
    let beta2 = conjugated(b, g)?.on(&[2])?;
    let bm = DynMat::product(&[&b.on(&[2])?.inverse(), &dyn_shift(&beta2, &[1])?])?;
    let cm = pi_transpose(&bm)?;
    Ok((bm, cm))
}

/// Non-invertible variant `B = sum_i e_ii (x) P_i b^-1(lambda) b(lambda + gamma e_i)`.
pub fn build_bc_projector(b: &DynMat, projectors: &[CMat]) -> Result<(DynMat, DynMat)> {
    require_legs(b, &[1], "b")?;
    let n = b.rank();
    if projectors.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "need {n} projectors, got {}",
            projectors.len()
        )));
    }
    for (i, p) in projectors.iter().enumerate() {
        if p.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "projector {i} is not {n}x{n}"
            )));
        }
    }
    let projs = projectors.to_vec();
    let b2 = b.on(&[2])?;
    let gamma = b.scheme().gamma;
    let bm = DynMat::new(b.scheme(), vec![1, 2], move |lam, u| {
        let base = linalg::inverse(&b2.eval(lam, u)?)?;
        let mut out = CMat::zeros(n * n, n * n);
        for (i, p) in projs.iter().enumerate() {
            let shifted = b2.eval(&lam.bumped(i, gamma), u)?;
            out += linalg::kron(&linalg::unit(n, i, i), &(p * &base * shifted));
        }
        Ok(out)
    })?;
    let cm = pi_transpose(&bm)?;
    Ok((bm, cm))
}

/// `D = q_1^-1(h_2) q_2^-1 R q_1 q_2(h_1)`.
pub fn build_d_twist(r: &DynMat, q: &DynMat) -> Result<DynMat> {
    require_legs(r, &[1, 2], "R")?;
    require_legs(q, &[1], "q")?;
    let q1 = q.clone();
    let q2 = q.on(&[2])?;
    DynMat::product(&[
        &dyn_shift(&q1, &[2])?.inverse(),
        &q2.inverse(),
        r,
        &q1,
        &dyn_shift(&q2, &[1])?,
    ])
}

/// Inverse of [`build_d_twist`]: `R = q_2 q_1(h_2) D q_2(h_1)^-1 q_1^-1`.
pub fn untwist(d: &DynMat, q: &DynMat) -> Result<DynMat> {
    require_legs(d, &[1, 2], "D")?;
    require_legs(q, &[1], "q")?;
    let q1 = q.clone();
    let q2 = q.on(&[2])?;
    DynMat::product(&[
        &q2,
        &dyn_shift(&q1, &[2])?,
        d,
        &dyn_shift(&q2, &[1])?.inverse(),
        &q1.inverse(),
    ])
}

/// Result of removing a twist from `D`.
#[derive(Debug, Clone)]
pub struct DetwistOutcome {
    pub r_tilde: DynMat,
    pub nondynamical: ResidualReport,
    pub quasi: Vec<(String, ResidualReport)>,
}

impl DetwistOutcome {
    /// Every verdict that holds: `"nondynamical"` and/or `"quasi:<name>"`.
    pub fn verdicts(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.nondynamical.pass {
            out.push("nondynamical".to_string());
        }
        for (name, r) in &self.quasi {
            if r.pass {
                out.push(format!("quasi:{name}"));
            }
        }
        out
    }
}

pub fn detwist(
    d: &DynMat,
    q: &DynMat,
    candidates: &[(String, Automorphism)],
    samples: &[SamplePoint],
    tol: f64,
) -> Result<DetwistOutcome> {
    let r_tilde = untwist(d, q)?;
    let nondynamical = residual_quasi_nondyn(&r_tilde, &Automorphism::Identity, samples, tol)?;
    let quasi = candidates
        .iter()
        .map(|(name, f)| {
            Ok((
                name.clone(),
                residual_quasi_nondyn(&r_tilde, f, samples, tol)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DetwistOutcome {
        r_tilde,
        nondynamical,
        quasi,
    })
}

/// `D` determined by the reflection equation from an invertible solution `k`:
/// `D = k_1^-1(h_2) C^-1 k_2^-1 A k_1 B k_2(h_1)`.
pub fn build_d_from_scalar(a: &DynMat, b: &DynMat, c: &DynMat, k: &DynMat) -> Result<DynMat> {
    require_legs(k, &[1], "k")?;
    let k1 = k.clone();
    let k2 = k.on(&[2])?;
    DynMat::product(&[
        &dyn_shift(&k1, &[2])?.inverse(),
        &c.inverse(),
        &k2.inverse(),
        a,
        &k1,
        b,
        &dyn_shift(&k2, &[1])?,
    ])
}

/// Full structure set for a given R-matrix pair, dressing and automorphism.
/// `r_right` is twisted into `D` after `Ad (g_1 g_2)^-sigma`.
pub fn build_structure(
    r0: &DynMat,
    r_right: &DynMat,
    b: &DynMat,
    q: &DynMat,
    g: &Automorphism,
) -> Result<StructureSet> {
    let a = build_a(r0, b, g)?;
    let (bm, cm) = build_bc(b, g)?;
    let d = build_d_twist(&sigma_conjugate(r_right, g, -1.0)?, q)?;
    StructureSet::new(a, bm, cm, d, g.clone())
}

/// `b_i = b^-1(lambda) b(lambda + gamma e_i)` for each `i`.
pub fn build_b_family(b: &DynMat) -> Result<Vec<DynMat>> {
    require_legs(b, &[1], "b")?;
    let n = b.rank();
    Ok((0..n)
        .map(|i| {
            let mut m = vec![0i64; n];
            m[i] = 1;
            let bb = b.clone();
            let shifted = b.translate(&m);
            b.with_evaluator(move |lam, u| {
                Ok(linalg::inverse(&bb.eval(lam, u)?)? * shifted.eval(lam, u)?)
            })
        })
        .collect())
}

/// `b_i(lambda) b_j(lambda + gamma e_i) = b_j(lambda) b_i(lambda + gamma e_j)`.
pub fn residual_b_family_compat(
    family: &[DynMat],
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    let n = family.len();
    crate::consistency::check_points("b_family_compat", samples, tol, |p| {
        let gamma = family[0].scheme().gamma;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let lhs = family[i].eval(&p.lambda, &p.u)?
                    * family[j].eval(&p.lambda.bumped(i, gamma), &p.u)?;
                let rhs = family[j].eval(&p.lambda, &p.u)?
                    * family[i].eval(&p.lambda.bumped(j, gamma), &p.u)?;
                worst = worst.max(rel_residual(&lhs, &rhs));
            }
        }
        Ok(worst)
    })
}

/// `R0 = Ad (f_1 f_2)^{sigma} R~`, after confirming `R~` is
/// quasi-non-dynamical for `f`. The returned report covers that check;
/// non-dynamicity of `R0` itself is checked by the caller.
pub fn extract_r0(
    r_tilde: &DynMat,
    f: &Automorphism,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<(DynMat, ResidualReport)> {
    require_legs(r_tilde, &[1, 2], "R")?;
    let report = residual_quasi_nondyn(r_tilde, f, samples, tol)?;
    if !report.pass {
        return Err(Error::Precondition(format!(
            "R is not quasi-non-dynamical for the given automorphism (residual {:.3e})",
            report.max_residual
        )));
    }
    Ok((sigma_conjugate(r_tilde, f, 1.0)?, report))
}
