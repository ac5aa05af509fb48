//! Sampled residual checks for the Yang-Baxter-type relations between the
//! structure matrices and reflection matrices.

use serde::{Deserialize, Serialize, Serializer};

use crate::dyncore::{
    adjoint_auto, dyn_shift, Automorphism, DynMat, LambdaPoint, Leg, Power, Side, SpectralPoint,
};
use crate::error::{Error, Result};
use crate::linalg::{self, rel_residual, CMat};

/// One evaluation point: Cartan variables plus spectral values by leg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub lambda: LambdaPoint,
    pub u: SpectralPoint,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

/// Worst-case relative residual of one relation over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub samples: usize,
    #[serde(serialize_with = "finite_or_null")]
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub non_finite: bool,
    pub worst_point: Option<SamplePoint>,
}

impl ResidualReport {
    /// Folds several reports into one named report (maximum residual).
    pub fn merge(name: &str, parts: &[ResidualReport], tolerance: f64) -> ResidualReport {
        let mut out = ResidualReport {
            name: name.to_string(),
            samples: parts.iter().map(|p| p.samples).max().unwrap_or(0),
            max_residual: 0.0,
            tolerance,
            pass: true,
            non_finite: false,
            worst_point: None,
        };
        for p in parts {
            if out.worst_point.is_none() || p.max_residual > out.max_residual {
                out.max_residual = p.max_residual;
                out.worst_point = p.worst_point.clone();
            }
            out.non_finite |= p.non_finite;
        }
        out.pass = !out.non_finite && out.max_residual <= tolerance;
        out
    }

    pub fn retolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = !self.non_finite && self.max_residual <= tolerance;
        self
    }
}

/// Evaluates a per-point residual and keeps the first worst point.
pub fn check_points<F>(
    name: &str,
    samples: &[SamplePoint],
    tol: f64,
    f: F,
) -> Result<ResidualReport>
where
    F: Fn(&SamplePoint) -> Result<f64>,
{
    let mut worst = 0.0f64;
    let mut worst_point = None;
    let mut non_finite = false;
    for p in samples {
        let mut r = f(p)?;
        if !r.is_finite() {
            non_finite = true;
            r = f64::INFINITY;
        }
        if worst_point.is_none() || r > worst {
            worst = r;
            worst_point = Some(p.clone());
        }
    }
    Ok(ResidualReport {
        name: name.to_string(),
        samples: samples.len(),
        max_residual: worst,
        tolerance: tol,
        pass: !non_finite && worst <= tol,
        non_finite,
        worst_point,
    })
}

/// Residual of `lhs = rhs` on the union of their legs.
pub fn compare(
    name: &str,
    lhs: &DynMat,
    rhs: &DynMat,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    let mut legs: Vec<Leg> = lhs.legs().iter().chain(rhs.legs()).copied().collect();
    legs.sort_unstable();
    legs.dedup();
    let l = lhs.embed(&legs)?;
    let r = rhs.embed(&legs)?;
    check_points(name, samples, tol, |p| {
        Ok(rel_residual(
            &l.eval(&p.lambda, &p.u)?,
            &r.eval(&p.lambda, &p.u)?,
        ))
    })
}

fn prod(items: &[&DynMat]) -> Result<DynMat> {
    DynMat::product(items)
}

fn at(x: &DynMat, i: Leg, j: Leg) -> Result<DynMat> {
    x.on(&[i, j])
}

fn shift(x: &DynMat, legs: &[Leg]) -> Result<DynMat> {
    dyn_shift(x, legs)
}

fn ad(x: &DynMat, g: &Automorphism, legs: &[Leg]) -> Result<DynMat> {
    adjoint_auto(x, g, legs, Side::Conjugate, Power::int(1))
}

fn ad_pow(x: &DynMat, g: &Automorphism, legs: &[Leg], p: i64) -> Result<DynMat> {
    adjoint_auto(x, g, legs, Side::Conjugate, Power::int(p))
}

/// The structure matrices of the dynamical reflection algebra, stored on
/// legs `(1, 2)`, together with the automorphism of the deformed relations.
#[derive(Debug, Clone)]
pub struct StructureSet {
    pub a: DynMat,
    pub b: DynMat,
    pub c: DynMat,
    pub d: DynMat,
    pub g: Automorphism,
}

impl StructureSet {
    pub fn new(a: DynMat, b: DynMat, c: DynMat, d: DynMat, g: Automorphism) -> Result<Self> {
        for (name, x) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if x.legs() != [1, 2] {
                return Err(Error::InvalidLeg(format!(
                    "{name} must act on legs (1, 2), got {:?}",
                    x.legs()
                )));
            }
        }
        let rank = a.rank();
        if [&b, &c, &d].iter().any(|x| x.rank() != rank) {
            return Err(Error::DimensionMismatch(
                "structure matrices have different ranks".into(),
            ));
        }
        Ok(Self { a, b, c, d, g })
    }

    pub fn rank(&self) -> usize {
        self.a.rank()
    }
}

/// Which Cartan generators a zero-weight condition commutes with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightKind {
    /// `[h_i (x) 1, X] = 0`
    B,
    /// `[1 (x) h_i, X] = 0`
    C,
    /// `[h_i (x) 1 + 1 (x) h_i, X] = 0`
    D,
}

pub fn residual_zero_weight(
    x: &DynMat,
    kind: WeightKind,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    if x.legs().len() != 2 {
        return Err(Error::InvalidLeg(
            "zero-weight conditions apply to two-leg matrices".into(),
        ));
    }
    let n = x.rank();
    let gens: Vec<CMat> = (0..n)
        .map(|i| {
            let e = linalg::unit(n, i, i);
            let id = linalg::eye(n);
            match kind {
                WeightKind::B => linalg::kron(&e, &id),
                WeightKind::C => linalg::kron(&id, &e),
                WeightKind::D => linalg::kron(&e, &id) + linalg::kron(&id, &e),
            }
        })
        .collect();
    let name = match kind {
        WeightKind::B => "zero_weight.B",
        WeightKind::C => "zero_weight.C",
        WeightKind::D => "zero_weight.D",
    };
    check_points(name, samples, tol, |p| {
        let m = x.eval(&p.lambda, &p.u)?;
        Ok(gens
            .iter()
            .map(|h| rel_residual(&(h * &m), &(&m * h)))
            .fold(0.0, f64::max))
    })
}

fn require_identity(g: &Automorphism) -> Result<()> {
    if g.is_identity() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "undeformed relations need the identity automorphism, got {}",
            g.kind()
        )))
    }
}

fn d_relation(s: &StructureSet) -> Result<(DynMat, DynMat)> {
    let d = &s.d;
    let lhs = prod(&[
        &shift(&at(d, 1, 2)?, &[3])?,
        &at(d, 1, 3)?,
        &shift(&at(d, 2, 3)?, &[1])?,
    ])?;
    let rhs = prod(&[&at(d, 2, 3)?, &shift(&at(d, 1, 3)?, &[2])?, &at(d, 1, 2)?])?;
    Ok((lhs, rhs))
}

/// The four Yang-Baxter-type consistency relations with trivial automorphism.
pub fn residual_ybce(
    s: &StructureSet,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    require_identity(&s.g)?;
    let (a, b, c) = (&s.a, &s.b, &s.c);
    let mut out = Vec::with_capacity(4);
    let lhs = prod(&[&at(a, 1, 2)?, &at(a, 1, 3)?, &at(a, 2, 3)?])?;
    let rhs = prod(&[&at(a, 2, 3)?, &at(a, 1, 3)?, &at(a, 1, 2)?])?;
    out.push(compare("ybce.A_A_A", &lhs, &rhs, samples, tol)?);
    let lhs = prod(&[&at(a, 1, 2)?, &at(c, 1, 3)?, &at(c, 2, 3)?])?;
    let rhs = prod(&[&at(c, 2, 3)?, &at(c, 1, 3)?, &shift(&at(a, 1, 2)?, &[3])?])?;
    out.push(compare("ybce.A_C_C", &lhs, &rhs, samples, tol)?);
    let lhs = prod(&[
        &at(&s.d, 1, 2)?,
        &at(b, 1, 3)?,
        &shift(&at(b, 2, 3)?, &[1])?,
    ])?;
    let rhs = prod(&[
        &at(b, 2, 3)?,
        &shift(&at(b, 1, 3)?, &[2])?,
        &at(&s.d, 1, 2)?,
    ])?;
    out.push(compare("ybce.D_B_B", &lhs, &rhs, samples, tol)?);
    let (lhs, rhs) = d_relation(s)?;
    out.push(compare("ybce.D_D_D", &lhs, &rhs, samples, tol)?);
    Ok(out)
}

/// The automorphism-deformed consistency relations.
pub fn residual_gybce(
    s: &StructureSet,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let (a, b, c, g) = (&s.a, &s.b, &s.c, &s.g);
    let mut out = Vec::with_capacity(4);
    let lhs = prod(&[
        &at(a, 1, 2)?,
        &ad(&at(a, 1, 3)?, g, &[1, 3])?,
        &at(a, 2, 3)?,
    ])?;
    let rhs = prod(&[
        &ad(&at(a, 2, 3)?, g, &[2, 3])?,
        &at(a, 1, 3)?,
        &ad(&at(a, 1, 2)?, g, &[1, 2])?,
    ])?;
    out.push(compare("gybce.A_A_A", &lhs, &rhs, samples, tol)?);
    let lhs = prod(&[&at(a, 1, 2)?, &ad(&at(c, 1, 3)?, g, &[1])?, &at(c, 2, 3)?])?;
    let rhs = prod(&[
        &ad(&at(c, 2, 3)?, g, &[2])?,
        &at(c, 1, 3)?,
        &shift(&ad(&at(a, 1, 2)?, g, &[1, 2])?, &[3])?,
    ])?;
    out.push(compare("gybce.A_C_C", &lhs, &rhs, samples, tol)?);
    let lhs = prod(&[
        &at(&s.d, 1, 2)?,
        &at(b, 1, 3)?,
        &shift(&ad(&at(b, 2, 3)?, g, &[3])?, &[1])?,
    ])?;
    let rhs = prod(&[
        &at(b, 2, 3)?,
        &shift(&ad(&at(b, 1, 3)?, g, &[3])?, &[2])?,
        &at(&s.d, 1, 2)?,
    ])?;
    out.push(compare("gybce.D_B_B", &lhs, &rhs, samples, tol)?);
    let (lhs, rhs) = d_relation(s)?;
    out.push(compare("gybce.D_D_D", &lhs, &rhs, samples, tol)?);
    Ok(out)
}

/// Dynamical Yang-Baxter relation for a two-leg matrix alone.
pub fn residual_dybe(d: &DynMat, samples: &[SamplePoint], tol: f64) -> Result<ResidualReport> {
    let lhs = prod(&[
        &shift(&at(d, 1, 2)?, &[3])?,
        &at(d, 1, 3)?,
        &shift(&at(d, 2, 3)?, &[1])?,
    ])?;
    let rhs = prod(&[&at(d, 2, 3)?, &shift(&at(d, 1, 3)?, &[2])?, &at(d, 1, 2)?])?;
    compare("dybe", &lhs, &rhs, samples, tol)
}

/// A reflection matrix, optionally multiplied on the right by a power of
/// an automorphism that may have no matrix realization.
#[derive(Debug, Clone)]
pub struct ReflectionOperand {
    pub base: DynMat,
    pub right: Option<(Automorphism, i64)>,
}

impl ReflectionOperand {
    pub fn plain(k: DynMat) -> Self {
        Self {
            base: k,
            right: None,
        }
    }

    /// Dense `K g^p` when `g` has a matrix realization.
    pub fn realize(&self) -> Result<DynMat> {
        match &self.right {
            None => Ok(self.base.clone()),
            Some((g, p)) => {
                adjoint_auto(&self.base, g, self.base.legs(), Side::Right, Power::int(*p))
            }
        }
    }
}

fn single_leg(k: &DynMat) -> Result<()> {
    if k.legs() != [1] {
        return Err(Error::InvalidLeg(format!(
            "reflection matrix must act on leg 1, got {:?}",
            k.legs()
        )));
    }
    Ok(())
}

/// `A K_1 B K_2(h_1) = K_2 C K_1(h_2) D`. A right factor `g^p` on `K` is
/// moved through to conjugations, which is exact for any automorphism.
pub fn residual_sdre(
    s: &StructureSet,
    k: &ReflectionOperand,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    single_leg(&k.base)?;
    let k1 = k.base.clone();
    let k2 = k.base.on(&[2])?;
    let bk = prod(&[&s.b, &shift(&k2, &[1])?])?;
    let ck = prod(&[&s.c, &shift(&k1, &[2])?])?;
    let (bk, ck, d) = match &k.right {
        None => (bk, ck, s.d.clone()),
        Some((g, p)) => (
            ad_pow(&bk, g, &[1], *p)?,
            ad_pow(&ck, g, &[2], *p)?,
            ad_pow(&s.d, g, &[1, 2], *p)?,
        ),
    };
    let lhs = prod(&[&s.a, &k1, &bk])?;
    let rhs = prod(&[&k2, &ck, &d])?;
    compare("sdre", &lhs, &rhs, samples, tol)
}

/// `A K_1(h_2) B K_2(h_1) = K_2(h_1) C K_1(h_2) D`.
pub fn residual_boundary_dra(
    s: &StructureSet,
    k: &DynMat,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    single_leg(k)?;
    let k1h = shift(k, &[2])?;
    let k2h = shift(&k.on(&[2])?, &[1])?;
    let lhs = prod(&[&s.a, &k1h, &s.b, &k2h])?;
    let rhs = prod(&[&k2h, &s.c, &k1h, &s.d])?;
    compare("boundary_dra", &lhs, &rhs, samples, tol)
}

/// `X(lambda + gamma e_i) = Ad (f (x) f)^-1 X(lambda)` for every `i`;
/// with the identity this is plain non-dynamicity.
pub fn residual_quasi_nondyn(
    x: &DynMat,
    f: &Automorphism,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    let legs = x.legs().to_vec();
    let target = ad_pow(x, f, &legs, -1)?;
    let n = x.rank();
    let gamma = x.scheme().gamma;
    let name = if f.is_identity() {
        "nondynamical"
    } else {
        "quasi_nondynamical"
    };
    check_points(name, samples, tol, |p| {
        let want = target.eval(&p.lambda, &p.u)?;
        let mut worst = 0.0f64;
        for i in 0..n {
            let got = x.eval(&p.lambda.bumped(i, gamma), &p.u)?;
            worst = worst.max(rel_residual(&got, &want));
        }
        Ok(worst)
    })
}

/// Periodicity of a single-leg matrix under `theta_i -> theta_i + 2 gamma`
/// at fixed `sigma`, i.e. `X(lambda + gamma (e_1 - e_i)) = X(lambda)`.
pub fn residual_theta_period(
    x: &DynMat,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    let n = x.rank();
    let gamma = x.scheme().gamma;
    check_points("theta_period", samples, tol, |p| {
        let base = x.eval(&p.lambda, &p.u)?;
        let mut worst = 0.0f64;
        for i in 1..n {
            let mut m = vec![0i64; n];
            m[0] = 1;
            m[i] = -1;
            let moved = x.eval(&p.lambda.translated(&m, gamma), &p.u)?;
            worst = worst.max(rel_residual(&moved, &base));
        }
        Ok(worst)
    })
}

/// Idempotence is a precondition; the residual covers mutual commutation,
/// commutation with `b`, and `[P_i (x) P_i, R] = 0`.
pub fn residual_projector_compat(
    r: &DynMat,
    projectors: &[CMat],
    b: &DynMat,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    let n = b.rank();
    for (i, p) in projectors.iter().enumerate() {
        if p.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "projector {i} is not {n}x{n}"
            )));
        }
        if rel_residual(&(p * p), p) > 1e-12 {
            return Err(Error::Precondition(format!(
                "projector {i} is not idempotent"
            )));
        }
    }
    check_points("projector_compat", samples, tol, |pt| {
        let bm = b.eval(&pt.lambda, &pt.u)?;
        let rm = r.eval(&pt.lambda, &pt.u)?;
        let mut worst = 0.0f64;
        for (i, p) in projectors.iter().enumerate() {
            for q in &projectors[i + 1..] {
                worst = worst.max(rel_residual(&(p * q), &(q * p)));
            }
            worst = worst.max(rel_residual(&(p * &bm), &(&bm * p)));
            let pp = linalg::kron(p, p);
            worst = worst.max(rel_residual(&(&pp * &rm), &(&rm * &pp)));
        }
        Ok(worst)
    })
}

/// Transformation applied to a copy of the intertwiner inside a relation.
#[derive(Debug, Clone)]
pub struct Decoration {
    pub auto: Automorphism,
    pub side: Side,
    pub power: i64,
    /// Replaces `g` by `Ad d^(k sigma/gamma) g` (matrix automorphisms only).
    pub dressing: Option<(Automorphism, f64)>,
}

impl Decoration {
    pub fn conjugate(auto: Automorphism, power: i64) -> Self {
        Self {
            auto,
            side: Side::Conjugate,
            power,
            dressing: None,
        }
    }

    pub fn left(auto: Automorphism, power: i64) -> Self {
        Self {
            auto,
            side: Side::Left,
            power,
            dressing: None,
        }
    }

    pub fn right(auto: Automorphism, power: i64) -> Self {
        Self {
            auto,
            side: Side::Right,
            power,
            dressing: None,
        }
    }

    pub fn dressed(mut self, by: Automorphism, coefficient: f64) -> Self {
        self.dressing = Some((by, coefficient));
        self
    }

    pub fn apply(&self, q: &DynMat) -> Result<DynMat> {
        let Some((by, k)) = &self.dressing else {
            return adjoint_auto(q, &self.auto, q.legs(), self.side, Power::int(self.power));
        };
        if matches!(self.auto, Automorphism::SpectralShift(_))
            || matches!(by, Automorphism::SpectralShift(_))
        {
            return Err(Error::Unsupported(
                "sigma-dressing of a spectral-shift automorphism".into(),
            ));
        }
        let legs = q.legs().to_vec();
        let (g, by, k, side, power) = (self.auto.clone(), by.clone(), *k, self.side, self.power);
        let scheme = q.scheme();
        let n = scheme.rank;
        let inner = q.clone();
        let total = legs.len();
        Ok(q.with_evaluator(move |lam, u| {
            let e = scheme.sigma_exponent(lam) * k;
            let mut fwd = linalg::eye(linalg::pow_usize(n, total));
            let mut bwd = fwd.clone();
            for (pos, &l) in legs.iter().enumerate() {
                let uv = u.get(l).ok();
                let d = by.matrix_power(uv, e)?.unwrap_or_else(|| linalg::eye(n));
                let dinv = by.matrix_power(uv, -e)?.unwrap_or_else(|| linalg::eye(n));
                let gp = g
                    .matrix_power(uv, linalg::c(power as f64, 0.0))?
                    .unwrap_or_else(|| linalg::eye(n));
                let gm = g
                    .matrix_power(uv, linalg::c(-power as f64, 0.0))?
                    .unwrap_or_else(|| linalg::eye(n));
                fwd *= linalg::expand(&(&d * gp * &dinv), n, &[pos], total);
                bwd *= linalg::expand(&(&d * gm * &dinv), n, &[pos], total);
            }
            let m = inner.eval(lam, u)?;
            Ok(match side {
                Side::Conjugate => fwd * m * bwd,
                Side::Left => fwd * m,
                Side::Right => m * fwd,
            })
        }))
    }
}

/// `R_left Q_1 L(Q)_2 = Q_2 R'(Q)_1 R_right` with decoration pipelines
/// `L = left_deco` and `R' = right_deco`.
#[derive(Debug, Clone)]
pub struct IntertwinerSpec {
    pub r_left: DynMat,
    pub r_right: DynMat,
    pub left_deco: Vec<Decoration>,
    pub right_deco: Vec<Decoration>,
}

impl IntertwinerSpec {
    pub fn plain(r_left: DynMat, r_right: DynMat) -> Self {
        Self {
            r_left,
            r_right,
            left_deco: Vec::new(),
            right_deco: Vec::new(),
        }
    }
}

/// Errors if `q` varies with the Cartan variables at any sample.
pub fn require_nondynamical(q: &DynMat, samples: &[SamplePoint]) -> Result<()> {
    let gamma = q.scheme().gamma;
    for p in samples {
        let base = q.eval(&p.lambda, &p.u)?;
        for i in 0..q.rank() {
            if rel_residual(&q.eval(&p.lambda.bumped(i, gamma), &p.u)?, &base) > 1e-12 {
                return Err(Error::DynamicalInput(
                    "intertwiner depends on lambda".into(),
                ));
            }
        }
    }
    Ok(())
}

pub fn residual_intertwiner(
    spec: &IntertwinerSpec,
    q: &DynMat,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    single_leg(q)?;
    require_nondynamical(q, samples)?;
    let mut left = q.clone();
    for d in &spec.left_deco {
        left = d.apply(&left)?;
    }
    let mut right = q.clone();
    for d in &spec.right_deco {
        right = d.apply(&right)?;
    }
    let lhs = prod(&[&spec.r_left, q, &left.on(&[2])?])?;
    let rhs = prod(&[&q.on(&[2])?, &right, &spec.r_right])?;
    compare("intertwiner", &lhs, &rhs, samples, tol)
}

/// Non-dynamical Yang-Baxter equations deformed by an automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftedForm {
    /// `R_12 R_13^{gg} R_23 = R_23^{gg} R_13 R_12^{gg}`
    Conjugated,
    /// `Ad(g_1 g_2)^-1 R_12 R_13 Ad(g_2 g_3)^-1 R_23 = R_23 Ad(g_1 g_3)^-1 R_13 R_12`
    InverseConjugated,
}

pub fn residual_shifted_ybe(
    r: &DynMat,
    g: &Automorphism,
    form: ShiftedForm,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    let (r12, r13, r23) = (at(r, 1, 2)?, at(r, 1, 3)?, at(r, 2, 3)?);
    let (lhs, rhs, name) = match form {
        ShiftedForm::Conjugated => (
            prod(&[&r12, &ad(&r13, g, &[1, 3])?, &r23])?,
            prod(&[&ad(&r23, g, &[2, 3])?, &r13, &ad(&r12, g, &[1, 2])?])?,
            "shifted_ybe",
        ),
        ShiftedForm::InverseConjugated => (
            prod(&[
                &ad_pow(&r12, g, &[1, 2], -1)?,
                &r13,
                &ad_pow(&r23, g, &[2, 3], -1)?,
            ])?,
            prod(&[&r23, &ad_pow(&r13, g, &[1, 3], -1)?, &r12])?,
            "modified_ybe",
        ),
    };
    compare(name, &lhs, &rhs, samples, tol)
}

/// Plain Yang-Baxter equation for a two-leg matrix.
pub fn residual_ybe(r: &DynMat, samples: &[SamplePoint], tol: f64) -> Result<ResidualReport> {
    let lhs = prod(&[&at(r, 1, 2)?, &at(r, 1, 3)?, &at(r, 2, 3)?])?;
    let rhs = prod(&[&at(r, 2, 3)?, &at(r, 1, 3)?, &at(r, 1, 2)?])?;
    compare("ybe", &lhs, &rhs, samples, tol)
}

/// `[D, g (x) g] = [B, g (x) 1] = [C, 1 (x) g] = 0` and `[h, g] = 0`.
pub fn residual_zwc(s: &StructureSet, samples: &[SamplePoint], tol: f64) -> Result<ResidualReport> {
    let g = &s.g;
    let parts = [
        compare("zwc.D", &ad(&s.d, g, &[1, 2])?, &s.d, samples, tol)?,
        compare("zwc.B", &ad(&s.b, g, &[1])?, &s.b, samples, tol)?,
        compare("zwc.C", &ad(&s.c, g, &[2])?, &s.c, samples, tol)?,
    ];
    let mut merged = ResidualReport::merge("zwc", &parts, tol);
    if let Some(m) = g.matrix() {
        let n = m.nrows();
        let cartan = (0..n)
            .map(|i| {
                let e = linalg::unit(n, i, i);
                rel_residual(&(&e * m), &(m * &e))
            })
            .fold(0.0, f64::max);
        if cartan > merged.max_residual {
            merged.max_residual = cartan;
        }
        merged.pass = !merged.non_finite && merged.max_residual <= tol;
    }
    Ok(merged)
}

/// Constant-`g` gauge map to undeformed relations: `(g_1 A g_2^-1, g_2 B, g_1 C, D)`.
pub fn gauge_tilde(s: &StructureSet) -> Result<StructureSet> {
    let g = &s.g;
    if !matches!(g, Automorphism::Constant(_) | Automorphism::Identity) {
        return Err(Error::Unsupported(
            "gauge map needs a constant automorphism".into(),
        ));
    }
    let a = adjoint_auto(
        &adjoint_auto(&s.a, g, &[1], Side::Left, Power::int(1))?,
        g,
        &[2],
        Side::Right,
        Power::int(-1),
    )?;
    let b = adjoint_auto(&s.b, g, &[2], Side::Left, Power::int(1))?;
    let c = adjoint_auto(&s.c, g, &[1], Side::Left, Power::int(1))?;
    StructureSet::new(a, b, c, s.d.clone(), Automorphism::Identity)
}
