//! Reflection-matrix solutions built from intertwiners of non-dynamical
//! R-matrices, their dressings and duals.

use crate::consistency::{
    compare, residual_quasi_nondyn, residual_zwc, ReflectionOperand, ResidualReport, SamplePoint,
    StructureSet,
};
use crate::dyncore::{adjoint_auto, Automorphism, DynMat, Power, Side};
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::parametrize::{conjugated, sigma_conjugate};

fn check_single(x: &DynMat, what: &str) -> Result<()> {
    if x.legs() != [1] {
        return Err(Error::InvalidLeg(format!(
            "{what} must act on leg 1, got {:?}",
            x.legs()
        )));
    }
    Ok(())
}

fn check_all(items: &[(&DynMat, &str)]) -> Result<()> {
    for (x, what) in items {
        check_single(x, what)?;
    }
    let n = items[0].0.rank();
    if items.iter().any(|(x, _)| x.rank() != n) {
        return Err(Error::DimensionMismatch(
            "inputs have different ranks".into(),
        ));
    }
    Ok(())
}

fn sigma_power_side(x: &DynMat, g: &Automorphism, side: Side, coefficient: f64) -> Result<DynMat> {
    adjoint_auto(x, g, &[1], side, Power::Sigma(c(coefficient, 0.0)))
}

/// `K = b^-1 Q q`.
pub fn build_k_nondyn(q_mat: &DynMat, b: &DynMat, q: &DynMat) -> Result<DynMat> {
    check_all(&[(q_mat, "Q"), (b, "b"), (q, "q")])?;
    DynMat::product(&[&b.inverse(), q_mat, q])
}

/// `K = b^-1 (a^sigma Q a^-sigma) q`, returned with the residual of the
/// core's quasi-non-dynamical condition `X(lambda + gamma e_i) = a X a^-1`.
pub fn build_k_quasinondyn(
    q_mat: &DynMat,
    a: &Automorphism,
    b: &DynMat,
    q: &DynMat,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<(DynMat, ResidualReport)> {
    check_all(&[(q_mat, "Q"), (b, "b"), (q, "q")])?;
    let core = sigma_conjugate(q_mat, a, 1.0)?;
    let report = residual_quasi_nondyn(&core, &a.inverse()?, samples, tol)?;
    Ok((DynMat::product(&[&b.inverse(), &core, q])?, report))
}

/// Solution families for the automorphism-deformed relations.
#[derive(Debug, Clone)]
pub enum KVariant {
    /// `K = beta^-1 (Ad g^-sigma Q) q`.
    Standard,
    /// `K = beta^-1 (Ad g^-sigma Ad a^sigma Q) q`.
    Dressed { a: Automorphism },
    /// `K = beta^-1 g^-sigma Q f^sigma q`.
    RightFactor { f: Automorphism },
    /// `K = beta^-1 g^-sigma (Ad a^-sigma Q) f^sigma q`.
    DressedRightFactor { a: Automorphism, f: Automorphism },
}

fn same_shift(g: &Automorphism, f: &Automorphism) -> bool {
    matches!((g, f), (Automorphism::SpectralShift(s), Automorphism::SpectralShift(t)) if s == t)
}

/// `g^-sigma X f^sigma`; spectral shifts only combine into a conjugation.
fn sandwich(x: &DynMat, g: &Automorphism, f: &Automorphism) -> Result<DynMat> {
    if same_shift(g, f) || (g.is_identity() && f.is_identity()) {
        return sigma_power_side(x, g, Side::Conjugate, -1.0);
    }
    let left = sigma_power_side(x, g, Side::Left, -1.0)?;
    sigma_power_side(&left, f, Side::Right, 1.0)
}

/// Reflection matrix from an intertwiner `Q0` in the deformed setting.
pub fn build_k_g(
    q0: &DynMat,
    g: &Automorphism,
    b: &DynMat,
    q: &DynMat,
    variant: &KVariant,
) -> Result<DynMat> {
    check_all(&[(q0, "Q"), (b, "b"), (q, "q")])?;
    let core = match variant {
        KVariant::Standard => sigma_conjugate(q0, g, -1.0)?,
        KVariant::Dressed { a } => sigma_conjugate(&sigma_conjugate(q0, a, 1.0)?, g, -1.0)?,
        KVariant::RightFactor { f } => sandwich(q0, g, f)?,
        KVariant::DressedRightFactor { a, f } => sandwich(&sigma_conjugate(q0, a, -1.0)?, g, f)?,
    };
    let beta = conjugated(b, g)?;
    DynMat::product(&[&beta.inverse(), &core, q])
}

/// Dressing of a known solution by a non-dynamical intertwiner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DressingKind {
    /// `K' = b^-1 Q b K`.
    Plain,
    /// `K' = beta^-1 (Ad g^-sigma Q) beta K`.
    Deformed,
}

pub fn dress(
    k0: &DynMat,
    q_mat: &DynMat,
    b: &DynMat,
    g: &Automorphism,
    kind: DressingKind,
) -> Result<DynMat> {
    check_all(&[(k0, "K"), (q_mat, "Q"), (b, "b")])?;
    match kind {
        DressingKind::Plain => {
            if !g.is_identity() {
                return Err(Error::Precondition(
                    "plain dressing needs the identity automorphism".into(),
                ));
            }
            DynMat::product(&[&b.inverse(), q_mat, b, k0])
        }
        DressingKind::Deformed => {
            let beta = conjugated(b, g)?;
            DynMat::product(&[
                &beta.inverse(),
                &sigma_conjugate(q_mat, g, -1.0)?,
                &beta,
                k0,
            ])
        }
    }
}

/// `K g^p`; kept symbolic so spectral shifts remain representable.
pub fn k_g_power(k: &DynMat, g: &Automorphism, p: i64) -> Result<ReflectionOperand> {
    check_single(k, "K")?;
    Ok(ReflectionOperand {
        base: k.clone(),
        right: if p == 0 || g.is_identity() {
            None
        } else {
            Some((g.clone(), p))
        },
    })
}

/// [`k_g_power`] after confirming `[D, g (x) g] = [B, g (x) 1] = [C, 1 (x) g] = 0`
/// on the samples, which is what makes `K g^p` a solution again.
pub fn k_g_power_checked(
    s: &StructureSet,
    k: &DynMat,
    p: i64,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ReflectionOperand> {
    if p != 0 && !s.g.is_identity() {
        let zwc = residual_zwc(s, samples, tol)?;
        if !zwc.pass {
            return Err(Error::Precondition(format!(
                "structure matrices do not commute with the automorphism (residual {:.3e})",
                zwc.max_residual
            )));
        }
    }
    k_g_power(k, &s.g, p)
}

/// Dual reflection matrix `chi = k^-1 beta^-1 (Ad g^-sigma Q_L^-1) beta`.
pub fn build_dual(k: &DynMat, b: &DynMat, g: &Automorphism, q_left: &DynMat) -> Result<DynMat> {
    check_all(&[(k, "k"), (b, "b"), (q_left, "Q_L")])?;
    let beta = conjugated(b, g)?;
    let core = sigma_conjugate(&q_left.inverse(), g, -1.0)?;
    DynMat::product(&[&k.inverse(), &beta.inverse(), &core, &beta])
}

/// The invertible scalar solution `k = beta^-1 q`.
pub fn scalar_solution(b: &DynMat, q: &DynMat, g: &Automorphism) -> Result<DynMat> {
    check_all(&[(b, "b"), (q, "q")])?;
    DynMat::product(&[&conjugated(b, g)?.inverse(), q])
}

/// `kappa = beta K q^-1`, the part of a solution that carries the
/// intertwiner.
pub fn reduced_core(k: &DynMat, b: &DynMat, q: &DynMat, g: &Automorphism) -> Result<DynMat> {
    check_all(&[(k, "K"), (b, "b"), (q, "q")])?;
    DynMat::product(&[&conjugated(b, g)?, k, &q.inverse()])
}

/// `R kappa_1(lambda) kappa_2(lambda + gamma e_1) = kappa_2(lambda) kappa_1(lambda + gamma e_1) R~`
/// for a core `kappa` that depends on `sigma` only.
pub fn residual_reduced_intertwining(
    r: &DynMat,
    r_tilde: &DynMat,
    kappa: &DynMat,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    check_single(kappa, "kappa")?;
    let n = kappa.rank();
    let mut step = vec![0i64; n];
    step[0] = 1;
    let k1 = kappa.clone();
    let k2 = kappa.on(&[2])?;
    let lhs = DynMat::product(&[r, &k1, &k2.translate(&step)])?;
    let rhs = DynMat::product(&[&k2, &k1.translate(&step), r_tilde])?;
    compare("reduced_intertwining", &lhs, &rhs, samples, tol)
}
