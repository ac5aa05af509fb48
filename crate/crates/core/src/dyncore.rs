//! Dynamical matrices: matrix-valued functions of the Cartan variables and
//! per-leg spectral values, acting on tensor powers of `C^n`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, Eigen, C64};

/// Leg identifier. Kronecker order is ascending identifier order.
pub type Leg = usize;

/// Rank of the Cartan subalgebra together with the shift step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub rank: usize,
    pub gamma: C64,
}

impl WeightScheme {
    pub fn new(rank: usize, gamma: C64) -> Result<Self> {
        if rank == 0 {
            return Err(Error::DimensionMismatch("rank must be positive".into()));
        }
        if gamma.norm() == 0.0 || !gamma.re.is_finite() || !gamma.im.is_finite() {
            return Err(Error::Precondition(
                "shift step must be finite and non-zero".into(),
            ));
        }
        Ok(Self { rank, gamma })
    }

    pub fn unit(rank: usize) -> Self {
        Self {
            rank,
            gamma: c(1.0, 0.0),
        }
    }

    /// Exponent used for sigma-powers: `sum(lambda) / gamma`.
    pub fn sigma_exponent(&self, lambda: &LambdaPoint) -> C64 {
        lambda.sigma() / self.gamma
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint(pub Vec<C64>);

impl LambdaPoint {
    pub fn new(values: Vec<C64>) -> Self {
        Self(values)
    }

    pub fn sigma(&self) -> C64 {
        self.0.iter().sum()
    }

    /// `lambda + gamma * m` for an integer weight vector `m`.
    pub fn translated(&self, m: &[i64], gamma: C64) -> Self {
        let mut v = self.0.clone();
        for (x, k) in v.iter_mut().zip(m) {
            *x += gamma * (*k as f64);
        }
        Self(v)
    }

    /// `lambda + gamma * e_i`.
    pub fn bumped(&self, i: usize, gamma: C64) -> Self {
        let mut v = self.0.clone();
        v[i] += gamma;
        Self(v)
    }
}

/// Spectral values indexed by leg identifier. Unset slots hold NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint(pub Vec<C64>);

impl SpectralPoint {
    pub fn new(values: Vec<C64>) -> Self {
        Self(values)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn get(&self, leg: Leg) -> Result<C64> {
        match self.0.get(leg) {
            Some(v) if !v.re.is_nan() => Ok(*v),
            _ => Err(Error::MissingSpectral(leg)),
        }
    }

    fn raw(&self, leg: Leg) -> C64 {
        self.0.get(leg).copied().unwrap_or(c(f64::NAN, f64::NAN))
    }

    pub fn set(&mut self, leg: Leg, value: C64) {
        if self.0.len() <= leg {
            self.0.resize(leg + 1, c(f64::NAN, f64::NAN));
        }
        self.0[leg] = value;
    }

    pub fn with(&self, leg: Leg, value: C64) -> Self {
        let mut out = self.clone();
        out.set(leg, value);
        out
    }
}

type EvalFn = dyn Fn(&LambdaPoint, &SpectralPoint) -> Result<CMat> + Send + Sync;

/// Matrix-valued function of `(lambda, u)` acting on the legs `legs`.
#[derive(Clone)]
pub struct DynMat {
    scheme: WeightScheme,
    legs: Vec<Leg>,
    f: Arc<EvalFn>,
}

impl fmt::Debug for DynMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynMat")
            .field("rank", &self.scheme.rank)
            .field("legs", &self.legs)
            .finish()
    }
}

fn union_legs(a: &[Leg], b: &[Leg]) -> Vec<Leg> {
    let mut out: Vec<Leg> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl DynMat {
    /// Builds a dynamical matrix whose evaluator returns a matrix in the
    /// Kronecker order of `legs` as given; legs are re-sorted internally.
    pub fn new<F>(scheme: WeightScheme, legs: Vec<Leg>, f: F) -> Result<Self>
    where
        F: Fn(&LambdaPoint, &SpectralPoint) -> Result<CMat> + Send + Sync + 'static,
    {
        let mut sorted = legs.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidLeg(format!("duplicate legs in {legs:?}")));
        }
        if sorted == legs {
            return Ok(Self {
                scheme,
                legs,
                f: Arc::new(f),
            });
        }
        // perm[k] = position in `legs` of the k-th sorted leg
        let perm: Vec<usize> = sorted
            .iter()
            .map(|l| legs.iter().position(|x| x == l).unwrap())
            .collect();
        let n = scheme.rank;
        Ok(Self {
            scheme,
            legs: sorted,
            f: Arc::new(move |lam: &LambdaPoint, u: &SpectralPoint| {
                Ok(linalg::permute_legs(&f(lam, u)?, n, &perm))
            }),
        })
    }

    pub fn constant(scheme: WeightScheme, legs: Vec<Leg>, m: CMat) -> Result<Self> {
        let d = linalg::pow_usize(scheme.rank, legs.len());
        if m.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "constant matrix is {:?}, expected {d}x{d}",
                m.shape()
            )));
        }
        Self::new(scheme, legs, move |_, _| Ok(m.clone()))
    }

    pub fn identity(scheme: WeightScheme, legs: Vec<Leg>) -> Result<Self> {
        let d = linalg::pow_usize(scheme.rank, legs.len());
        Self::constant(scheme, legs, linalg::eye(d))
    }

    /// Single-leg matrix depending on lambda only.
    pub fn lambda_fn<F>(scheme: WeightScheme, leg: Leg, f: F) -> Self
    where
        F: Fn(&LambdaPoint) -> Result<CMat> + Send + Sync + 'static,
    {
        Self {
            scheme,
            legs: vec![leg],
            f: Arc::new(move |lam, _| f(lam)),
        }
    }

    /// Matrix on `legs` depending on lambda and the spectral values of
    /// those legs (passed in the given leg order).
    pub fn spectral_fn<F>(scheme: WeightScheme, legs: Vec<Leg>, f: F) -> Result<Self>
    where
        F: Fn(&LambdaPoint, &[C64]) -> Result<CMat> + Send + Sync + 'static,
    {
        let order = legs.clone();
        Self::new(scheme, legs, move |lam, u| {
            let us = order
                .iter()
                .map(|&l| u.get(l))
                .collect::<Result<Vec<_>>>()?;
            f(lam, &us)
        })
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn rank(&self) -> usize {
        self.scheme.rank
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn dim(&self) -> usize {
        linalg::pow_usize(self.scheme.rank, self.legs.len())
    }

    pub fn eval(&self, lambda: &LambdaPoint, u: &SpectralPoint) -> Result<CMat> {
        if lambda.0.len() != self.scheme.rank {
            return Err(Error::DimensionMismatch(format!(
                "lambda has {} components, rank is {}",
                lambda.0.len(),
                self.scheme.rank
            )));
        }
        let m = (self.f)(lambda, u)?;
        let d = self.dim();
        if m.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "evaluator returned {:?}, expected {d}x{d}",
                m.shape()
            )));
        }
        Ok(m)
    }

    fn same_space(&self, other: &DynMat) -> Result<()> {
        if self.scheme.rank != other.scheme.rank {
            return Err(Error::DimensionMismatch(
                "operands have different ranks".into(),
            ));
        }
        Ok(())
    }

    /// Identity-extends onto a superset of legs.
    pub fn embed(&self, legs: &[Leg]) -> Result<DynMat> {
        let mut target = legs.to_vec();
        target.sort_unstable();
        target.dedup();
        if !self.legs.iter().all(|l| target.contains(l)) {
            return Err(Error::InvalidLeg(format!(
                "cannot embed legs {:?} into {:?}",
                self.legs, target
            )));
        }
        if target == self.legs {
            return Ok(self.clone());
        }
        let positions: Vec<usize> = self
            .legs
            .iter()
            .map(|l| target.iter().position(|x| x == l).unwrap())
            .collect();
        let total = target.len();
        let n = self.scheme.rank;
        let inner = self.clone();
        Ok(DynMat {
            scheme: self.scheme,
            legs: target,
            f: Arc::new(move |lam, u| {
                Ok(linalg::expand(&inner.eval(lam, u)?, n, &positions, total))
            }),
        })
    }

    /// Renames legs; spectral slots travel with their legs.
    pub fn relabel(&self, map: &[(Leg, Leg)]) -> Result<DynMat> {
        let target = |l: Leg| {
            map.iter()
                .find(|(from, _)| *from == l)
                .map_or(l, |(_, to)| *to)
        };
        let new_legs: Vec<Leg> = self.legs.iter().map(|&l| target(l)).collect();
        if new_legs == self.legs {
            return Ok(self.clone());
        }
        let pairs: Vec<(Leg, Leg)> = self.legs.iter().map(|&l| (l, target(l))).collect();
        let inner = self.clone();
        DynMat::new(self.scheme, new_legs, move |lam, u| {
            let mut moved = u.clone();
            for &(old, new) in &pairs {
                moved.set(old, u.raw(new));
            }
            inner.eval(lam, &moved)
        })
    }

    /// Relabels legs `1, 2, ...` (in sorted order) to the given identifiers.
    pub fn on(&self, legs: &[Leg]) -> Result<DynMat> {
        if legs.len() != self.legs.len() {
            return Err(Error::InvalidLeg(format!(
                "matrix has {} legs, {} targets given",
                self.legs.len(),
                legs.len()
            )));
        }
        let map: Vec<(Leg, Leg)> = self
            .legs
            .iter()
            .copied()
            .zip(legs.iter().copied())
            .collect();
        self.relabel(&map)
    }

    pub fn mul(&self, other: &DynMat) -> Result<DynMat> {
        DynMat::product(&[self, other])
    }

    /// Ordered product over a common ambient space. Factors are evaluated on
    /// their own legs and applied locally.
    pub fn product(items: &[&DynMat]) -> Result<DynMat> {
        let first = items
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty product".into()))?;
        let mut legs: Vec<Leg> = Vec::new();
        for x in items {
            first.same_space(x)?;
            legs = union_legs(&legs, &x.legs);
        }
        let n = first.scheme.rank;
        let layouts: Vec<linalg::LegLayout> = items
            .iter()
            .map(|x| {
                let positions: Vec<usize> = x
                    .legs
                    .iter()
                    .map(|l| legs.iter().position(|y| y == l).unwrap())
                    .collect();
                linalg::LegLayout::new(n, &positions, legs.len())
            })
            .collect();
        let parts: Vec<DynMat> = items.iter().map(|x| (*x).clone()).collect();
        Ok(DynMat {
            scheme: first.scheme,
            legs,
            f: Arc::new(move |lam, u| {
                let mut acc = layouts[0].expand(&parts[0].eval(lam, u)?);
                for (p, layout) in parts[1..].iter().zip(&layouts[1..]) {
                    acc = layout.mul_right(&acc, &p.eval(lam, u)?);
                }
                Ok(acc)
            }),
        })
    }

    fn zip_with<F>(&self, other: &DynMat, op: F) -> Result<DynMat>
    where
        F: Fn(CMat, CMat) -> CMat + Send + Sync + 'static,
    {
        self.same_space(other)?;
        let legs = union_legs(&self.legs, &other.legs);
        let a = self.embed(&legs)?;
        let b = other.embed(&legs)?;
        Ok(DynMat {
            scheme: self.scheme,
            legs,
            f: Arc::new(move |lam, u| Ok(op(a.eval(lam, u)?, b.eval(lam, u)?))),
        })
    }

    pub fn add(&self, other: &DynMat) -> Result<DynMat> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DynMat) -> Result<DynMat> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn map<F>(&self, op: F) -> DynMat
    where
        F: Fn(CMat) -> Result<CMat> + Send + Sync + 'static,
    {
        let inner = self.clone();
        DynMat {
            scheme: self.scheme,
            legs: self.legs.clone(),
            f: Arc::new(move |lam, u| op(inner.eval(lam, u)?)),
        }
    }

    pub fn scale(&self, s: C64) -> DynMat {
        self.map(move |m| Ok(m * s))
    }

    pub fn inverse(&self) -> DynMat {
        self.map(|m| linalg::inverse(&m))
    }

    /// `X(lambda + gamma * m)` for a fixed integer weight vector.
    pub fn translate(&self, m: &[i64]) -> DynMat {
        let inner = self.clone();
        let m = m.to_vec();
        let gamma = self.scheme.gamma;
        DynMat {
            scheme: self.scheme,
            legs: self.legs.clone(),
            f: Arc::new(move |lam, u| inner.eval(&lam.translated(&m, gamma), u)),
        }
    }

    /// Fixes the spectral value of a leg.
    pub fn pin_spectral(&self, leg: Leg, value: C64) -> DynMat {
        let inner = self.clone();
        DynMat {
            scheme: self.scheme,
            legs: self.legs.clone(),
            f: Arc::new(move |lam, u| inner.eval(lam, &u.with(leg, value))),
        }
    }

    /// Replaces the evaluator while keeping scheme and legs; the closure
    /// must return a matrix in the sorted leg order.
    pub fn with_evaluator<F>(&self, f: F) -> DynMat
    where
        F: Fn(&LambdaPoint, &SpectralPoint) -> Result<CMat> + Send + Sync + 'static,
    {
        DynMat {
            scheme: self.scheme,
            legs: self.legs.clone(),
            f: Arc::new(f),
        }
    }
}

pub fn eval(x: &DynMat, lambda: &LambdaPoint, u: &SpectralPoint) -> Result<CMat> {
    x.eval(lambda, u)
}

pub fn embed(x: &DynMat, legs: &[Leg]) -> Result<DynMat> {
    x.embed(legs)
}

/// Flip operator as a constant two-leg matrix.
pub fn permutation_dynmat(scheme: WeightScheme, a: Leg, b: Leg) -> Result<DynMat> {
    DynMat::constant(
        scheme,
        vec![a, b],
        linalg::permutation_operator(scheme.rank),
    )
}

pub use crate::linalg::permutation_operator;

/// Dynamical shift `X(h_k)`: `sum_i X(lambda + gamma e_i) e_ii^(k)` with the
/// projectors on the right, for every leg in `shift_legs`.
pub fn dyn_shift(x: &DynMat, shift_legs: &[Leg]) -> Result<DynMat> {
    if shift_legs.is_empty() {
        return Ok(x.clone());
    }
    let mut sl = shift_legs.to_vec();
    sl.sort_unstable();
    if sl.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidLeg(format!(
            "repeated shift legs {shift_legs:?}"
        )));
    }
    let legs = union_legs(x.legs(), &sl);
    let xe = x.embed(&legs)?;
    let n = x.rank();
    let total = legs.len();
    let positions: Vec<usize> = sl
        .iter()
        .map(|l| legs.iter().position(|x| x == l).unwrap())
        .collect();
    let d = linalg::pow_usize(n, total);
    // combo digits of each column, restricted to the shift legs
    let col_combo: Vec<usize> = (0..d)
        .map(|col| {
            let ds = linalg::digits(col, n, total);
            positions.iter().fold(0, |acc, &p| acc * n + ds[p])
        })
        .collect();
    let r = sl.len();
    let ncombo = linalg::pow_usize(n, r);
    let gamma = x.scheme().gamma;
    Ok(xe.clone().with_evaluator(move |lam, u| {
        let mut out = CMat::zeros(d, d);
        for combo in 0..ncombo {
            let ds = linalg::digits(combo, n, r);
            let mut shifted = lam.clone();
            for i in ds {
                shifted.0[i] += gamma;
            }
            let m = xe.eval(&shifted, u)?;
            for (col, _) in col_combo.iter().enumerate().filter(|(_, &cc)| cc == combo) {
                out.set_column(col, &m.column(col));
            }
        }
        Ok(out)
    }))
}

/// `P X P` on a two-leg matrix: swaps the roles of the two legs.
pub fn pi_transpose(x: &DynMat) -> Result<DynMat> {
    match x.legs() {
        [a, b] => x.relabel(&[(*a, *b), (*b, *a)]),
        other => Err(Error::InvalidLeg(format!(
            "pi-transpose needs two legs, got {other:?}"
        ))),
    }
}

/// Exponent of an automorphism power, possibly proportional to `sigma/gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Power {
    Fixed(C64),
    /// `coefficient * sum(lambda) / gamma`, evaluated at the point.
    Sigma(C64),
}

impl Power {
    pub fn int(p: i64) -> Self {
        Power::Fixed(c(p as f64, 0.0))
    }

    pub fn at(&self, lambda: &LambdaPoint, scheme: &WeightScheme) -> C64 {
        match *self {
            Power::Fixed(p) => p,
            Power::Sigma(k) => k * scheme.sigma_exponent(lambda),
        }
    }

    pub fn neg(&self) -> Self {
        match *self {
            Power::Fixed(p) => Power::Fixed(-p),
            Power::Sigma(k) => Power::Sigma(-k),
        }
    }
}

/// How an automorphism acts on a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Conjugate,
    Left,
    Right,
}

/// Constant group element with a cached eigen-decomposition.
#[derive(Debug)]
pub struct ConstantAuto {
    matrix: CMat,
    eigen: Result<Eigen>,
}

type FactorFn = dyn Fn(C64) -> Result<CMat> + Send + Sync;

/// Automorphism of `End(V)`, possibly acting on the spectral slot.
#[derive(Clone)]
pub enum Automorphism {
    Identity,
    Constant(Arc<ConstantAuto>),
    /// `u -> g(u)`, a matrix depending on the spectral value of its leg.
    Factorizable(Arc<FactorFn>),
    /// `Ad g^p` maps `u_k` to `u_k + p * step` on its leg.
    SpectralShift(C64),
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Automorphism::Identity => write!(f, "Identity"),
            Automorphism::Constant(g) => write!(f, "Constant({:?})", g.matrix.as_slice()),
            Automorphism::Factorizable(_) => write!(f, "Factorizable(..)"),
            Automorphism::SpectralShift(s) => write!(f, "SpectralShift({s})"),
        }
    }
}

impl Automorphism {
    pub fn constant(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(
                "automorphism matrix must be square".into(),
            ));
        }
        linalg::inverse(&m)?;
        let eigen = Eigen::new(&m);
        Ok(Automorphism::Constant(Arc::new(ConstantAuto {
            matrix: m,
            eigen,
        })))
    }

    pub fn factorizable<F>(f: F) -> Self
    where
        F: Fn(C64) -> Result<CMat> + Send + Sync + 'static,
    {
        Automorphism::Factorizable(Arc::new(f))
    }

    /// The inverse group element.
    pub fn inverse(&self) -> Result<Self> {
        match self {
            Automorphism::Identity => Ok(Automorphism::Identity),
            Automorphism::Constant(g) => Automorphism::constant(linalg::inverse(&g.matrix)?),
            Automorphism::Factorizable(f) => {
                let f = f.clone();
                Ok(Automorphism::factorizable(move |u| linalg::inverse(&f(u)?)))
            }
            Automorphism::SpectralShift(s) => Ok(Automorphism::SpectralShift(-s)),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Automorphism::Identity)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Automorphism::Identity => "identity",
            Automorphism::Constant(_) => "constant",
            Automorphism::Factorizable(_) => "factorizable",
            Automorphism::SpectralShift(_) => "spectral_shift",
        }
    }

    pub fn matrix(&self) -> Option<&CMat> {
        match self {
            Automorphism::Constant(g) => Some(&g.matrix),
            _ => None,
        }
    }

    /// Matrix of `g^e` on a leg with spectral value `u`; `None` when the
    /// automorphism has no matrix realization (identity or spectral shift).
    pub fn matrix_power(&self, u: Option<C64>, e: C64) -> Result<Option<CMat>> {
        match self {
            Automorphism::Identity | Automorphism::SpectralShift(_) => Ok(None),
            Automorphism::Constant(g) => match linalg::as_integer(e) {
                Some(k) => Ok(Some(linalg::int_power(&g.matrix, k)?)),
                None => match &g.eigen {
                    Ok(eig) => Ok(Some(eig.power(e)?)),
                    Err(err) => Err(err.clone()),
                },
            },
            Automorphism::Factorizable(f) => {
                let u = u.ok_or_else(|| {
                    Error::Unsupported("factorizable automorphism needs a spectral value".into())
                })?;
                Ok(Some(linalg::complex_power(&f(u)?, e)?))
            }
        }
    }

    /// Whether `[e_ii, g] = 0` for all `i` (spectral actions always commute).
    pub fn commutes_with_cartan(&self) -> bool {
        match self {
            Automorphism::Constant(g) => {
                let m = &g.matrix;
                (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() == 0.0))
            }
            _ => true,
        }
    }
}

/// Applies `g^p` to `x` on each leg in `legs`: conjugation, or one-sided
/// multiplication from the left or right.
pub fn adjoint_auto(
    x: &DynMat,
    g: &Automorphism,
    legs: &[Leg],
    side: Side,
    power: Power,
) -> Result<DynMat> {
    if let Automorphism::Identity = g {
        return Ok(x.clone());
    }
    if let (Automorphism::SpectralShift(_), Side::Left | Side::Right) = (g, side) {
        return Err(Error::Unsupported(
            "one-sided multiplication by a spectral-shift automorphism".into(),
        ));
    }
    let all = union_legs(x.legs(), legs);
    let xe = x.embed(&all)?;
    let scheme = x.scheme();
    let n = scheme.rank;
    let g = g.clone();
    let mut act = legs.to_vec();
    act.sort_unstable();
    act.dedup();
    let positions: Vec<usize> = act
        .iter()
        .map(|l| all.iter().position(|x| x == l).unwrap())
        .collect();
    let total = all.len();
    Ok(xe.clone().with_evaluator(move |lam, u| {
        let e = power.at(lam, &scheme);
        if let Automorphism::SpectralShift(step) = &g {
            let mut moved = u.clone();
            for &l in &act {
                moved.set(l, u.raw(l) + e * step);
            }
            return xe.eval(lam, &moved);
        }
        let m = xe.eval(lam, u)?;
        let factor = |exp: C64| -> Result<CMat> {
            let mut acc = linalg::eye(linalg::pow_usize(n, total));
            for (&l, &p) in act.iter().zip(&positions) {
                let uv = u.get(l).ok();
                if let Some(gm) = g.matrix_power(uv, exp)? {
                    acc *= linalg::expand(&gm, n, &[p], total);
                }
            }
            Ok(acc)
        };
        match side {
            Side::Left => Ok(factor(e)? * m),
            Side::Right => Ok(m * factor(e)?),
            Side::Conjugate => Ok(factor(e)? * m * factor(-e)?),
        }
    }))
}

/// The automorphism `g^(sigma/gamma)` at a fixed point, realized as a
/// constant matrix or a fixed spectral shift.
pub fn sigma_power(
    g: &Automorphism,
    lambda: &LambdaPoint,
    scheme: &WeightScheme,
) -> Result<Automorphism> {
    let e = scheme.sigma_exponent(lambda);
    match g {
        Automorphism::Identity => Ok(Automorphism::Identity),
        Automorphism::Constant(_) => {
            Automorphism::constant(g.matrix_power(None, e)?.expect("constant has a matrix"))
        }
        Automorphism::Factorizable(f) => {
            let f = f.clone();
            Ok(Automorphism::factorizable(move |u| {
                linalg::complex_power(&f(u)?, e)
            }))
        }
        Automorphism::SpectralShift(s) => Ok(Automorphism::SpectralShift(s * e)),
    }
}

/// `sigma = sum(lambda)` and `theta_i = sigma - 2 lambda_i` for `i >= 2`.
pub fn sigma_theta(lambda: &LambdaPoint) -> (C64, Vec<C64>) {
    let sigma = lambda.sigma();
    let theta = lambda.0.iter().skip(1).map(|l| sigma - l * 2.0).collect();
    (sigma, theta)
}

/// Inverse of [`sigma_theta`].
pub fn lambda_from_sigma_theta(sigma: C64, theta: &[C64]) -> LambdaPoint {
    let rest: Vec<C64> = theta.iter().map(|t| (sigma - t) * 0.5).collect();
    let first = sigma - rest.iter().sum::<C64>();
    let mut v = vec![first];
    v.extend(rest);
    LambdaPoint(v)
}

/// Components of a zero-weight two-leg matrix:
/// `D = sum d_ij e_ii (x) e_jj + sum_{i != j} delta_ij e_ij (x) e_ji`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroWeightParts {
    pub d: CMat,
    pub delta: CMat,
    /// Relative Frobenius mass outside the zero-weight slots.
    pub residual: f64,
}

pub fn decompose_zero_weight(m: &CMat, n: usize, tol: f64) -> Result<ZeroWeightParts> {
    if m.shape() != (n * n, n * n) {
        return Err(Error::DimensionMismatch(format!(
            "expected a {0}x{0} two-leg matrix",
            n * n
        )));
    }
    let mut d = CMat::zeros(n, n);
    let mut delta = CMat::zeros(n, n);
    let mut rest = m.clone();
    for i in 0..n {
        for j in 0..n {
            let ij = i * n + j;
            d[(i, j)] = m[(ij, ij)];
            rest[(ij, ij)] = c(0.0, 0.0);
            if i != j {
                let ji = j * n + i;
                delta[(i, j)] = m[(ij, ji)];
                rest[(ij, ji)] = c(0.0, 0.0);
            }
        }
    }
    let residual = rest.norm() / m.norm().max(1.0);
    if residual.is_nan() || residual > tol {
        return Err(Error::NotZeroWeight(format!(
            "off-slot mass {residual:.3e}"
        )));
    }
    Ok(ZeroWeightParts { d, delta, residual })
}
