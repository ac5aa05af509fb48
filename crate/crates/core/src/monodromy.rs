//! Difference operators with matrix coefficients, monodromy matrices of
//! the reflection algebra and their transfer matrices.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::consistency::{
    check_points, residual_gybce, residual_sdre, residual_ybce, residual_zero_weight, residual_zwc,
    ReflectionOperand, ResidualReport, SamplePoint, StructureSet, WeightKind,
};
use crate::dyncore::{
    adjoint_auto, dyn_shift, Automorphism, DynMat, LambdaPoint, Leg, Power, Side, SpectralPoint,
    WeightScheme,
};
use crate::error::{Error, Result};
use crate::linalg::{self, rel_residual, CMat, C64};

type TermsFn = dyn Fn(&LambdaPoint, &SpectralPoint) -> Result<Vec<CMat>> + Send + Sync;

/// `sum_k M_k(lambda) exp(gamma m_k . d/dlambda)` with distinct, sorted
/// shift vectors. All coefficients are evaluated together so shared work
/// (a monodromy product) is done once per point.
#[derive(Clone)]
pub struct ShiftOpSum {
    scheme: WeightScheme,
    legs: Vec<Leg>,
    shifts: Vec<Vec<i64>>,
    f: Arc<TermsFn>,
}

impl fmt::Debug for ShiftOpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShiftOpSum")
            .field("legs", &self.legs)
            .field("shifts", &self.shifts)
            .finish()
    }
}

fn add_shift(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Merges terms with equal shifts; returns sorted shifts and, for each
/// input term, the index of its merged slot.
fn merge_plan(shifts: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<usize>) {
    let mut map: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for s in shifts {
        map.entry(s.clone()).or_insert(0);
    }
    for (i, v) in map.values_mut().enumerate() {
        *v = i;
    }
    let slots = shifts.iter().map(|s| map[s]).collect();
    (map.into_keys().collect(), slots)
}

impl ShiftOpSum {
    /// From explicit `(coefficient, shift)` terms; equal shifts are summed.
    pub fn from_terms(terms: Vec<(DynMat, Vec<i64>)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty difference operator".into()))?;
        let scheme = first.0.scheme();
        let rank = scheme.rank;
        let mut legs: Vec<Leg> = Vec::new();
        for (m, s) in &terms {
            if s.len() != rank || m.rank() != rank {
                return Err(Error::DimensionMismatch(
                    "shift vector length must equal the rank".into(),
                ));
            }
            legs.extend_from_slice(m.legs());
        }
        legs.sort_unstable();
        legs.dedup();
        let coeffs = terms
            .iter()
            .map(|(m, _)| m.embed(&legs))
            .collect::<Result<Vec<_>>>()?;
        let raw: Vec<Vec<i64>> = terms.into_iter().map(|(_, s)| s).collect();
        let (shifts, slots) = merge_plan(&raw);
        let count = shifts.len();
        Ok(Self {
            scheme,
            legs,
            shifts,
            f: Arc::new(move |lam, u| {
                let mut out: Vec<Option<CMat>> = vec![None; count];
                for (c, &slot) in coeffs.iter().zip(&slots) {
                    let m = c.eval(lam, u)?;
                    out[slot] = Some(match out[slot].take() {
                        Some(acc) => acc + m,
                        None => m,
                    });
                }
                Ok(out
                    .into_iter()
                    .map(|m| m.expect("every slot has a term"))
                    .collect())
            }),
        })
    }

    /// `sum_i M(lambda) e_ii^(leg) exp(gamma d/dlambda_i)`.
    pub fn diagonal_shift(m: &DynMat, leg: Leg) -> Result<Self> {
        let n = m.rank();
        let mut legs = m.legs().to_vec();
        legs.push(leg);
        legs.sort_unstable();
        legs.dedup();
        let me = m.embed(&legs)?;
        let pos = legs.iter().position(|&l| l == leg).unwrap();
        let total = legs.len();
        // digit of the shift leg for each column
        let col_digit: Vec<usize> = (0..linalg::pow_usize(n, total))
            .map(|c| linalg::digits(c, n, total)[pos])
            .collect();
        // sorted order of unit vectors is e_n, ..., e_1
        let shifts = (0..n)
            .rev()
            .map(|i| {
                let mut s = vec![0i64; n];
                s[i] = 1;
                s
            })
            .collect::<Vec<_>>();
        Ok(Self {
            scheme: m.scheme(),
            legs,
            shifts,
            f: Arc::new(move |lam, u| {
                let mm = me.eval(lam, u)?;
                Ok((0..n)
                    .rev()
                    .map(|i| {
                        let mut part = CMat::zeros(mm.nrows(), mm.ncols());
                        for (c, _) in col_digit.iter().enumerate().filter(|(_, &d)| d == i) {
                            part.set_column(c, &mm.column(c));
                        }
                        part
                    })
                    .collect())
            }),
        })
    }

    /// A plain multiplication operator (zero shift).
    pub fn multiplication(m: &DynMat) -> Self {
        let n = m.rank();
        let inner = m.clone();
        Self {
            scheme: m.scheme(),
            legs: m.legs().to_vec(),
            shifts: vec![vec![0; n]],
            f: Arc::new(move |lam, u| Ok(vec![inner.eval(lam, u)?])),
        }
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn shifts(&self) -> &[Vec<i64>] {
        &self.shifts
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn eval(&self, lambda: &LambdaPoint, u: &SpectralPoint) -> Result<Vec<(Vec<i64>, CMat)>> {
        let ms = (self.f)(lambda, u)?;
        Ok(self.shifts.iter().cloned().zip(ms).collect())
    }

    /// Coefficient of one shift as a dynamical matrix.
    pub fn coefficient(&self, shift: &[i64]) -> Option<DynMat> {
        let idx = self.shifts.iter().position(|s| s == shift)?;
        let me = self.clone();
        let d = linalg::pow_usize(self.scheme.rank, self.legs.len());
        let legs = self.legs.clone();
        DynMat::new(self.scheme, legs, move |lam, u| {
            let mut ms = (me.f)(lam, u)?;
            let m = ms.swap_remove(idx);
            debug_assert_eq!(m.nrows(), d);
            Ok(m)
        })
        .ok()
    }

    fn embed(&self, legs: &[Leg]) -> Result<Self> {
        if legs == self.legs.as_slice() {
            return Ok(self.clone());
        }
        if !self.legs.iter().all(|l| legs.contains(l)) {
            return Err(Error::InvalidLeg("cannot embed difference operator".into()));
        }
        let n = self.scheme.rank;
        let positions: Vec<usize> = self
            .legs
            .iter()
            .map(|l| legs.iter().position(|x| x == l).unwrap())
            .collect();
        let total = legs.len();
        let inner = self.f.clone();
        Ok(Self {
            scheme: self.scheme,
            legs: legs.to_vec(),
            shifts: self.shifts.clone(),
            f: Arc::new(move |lam, u| {
                Ok(inner(lam, u)?
                    .iter()
                    .map(|m| linalg::expand(m, n, &positions, total))
                    .collect())
            }),
        })
    }

    /// `(M, m)(M', m') = (M(lambda) M'(lambda + gamma m), m + m')`.
    pub fn compose(&self, other: &ShiftOpSum) -> Result<Self> {
        if self.scheme.rank != other.scheme.rank {
            return Err(Error::DimensionMismatch(
                "operators have different ranks".into(),
            ));
        }
        let mut legs: Vec<Leg> = self.legs.iter().chain(&other.legs).copied().collect();
        legs.sort_unstable();
        legs.dedup();
        let x = self.embed(&legs)?;
        let y = other.embed(&legs)?;
        let mut raw = Vec::new();
        for sx in &x.shifts {
            for sy in &y.shifts {
                raw.push(add_shift(sx, sy));
            }
        }
        let (shifts, slots) = merge_plan(&raw);
        let count = shifts.len();
        let gamma = self.scheme.gamma;
        let ny = y.shifts.len();
        Ok(Self {
            scheme: self.scheme,
            legs,
            shifts,
            f: Arc::new(move |lam, u| {
                let xs = (x.f)(lam, u)?;
                let mut out: Vec<Option<CMat>> = vec![None; count];
                for (ix, (sx, mx)) in x.shifts.iter().zip(&xs).enumerate() {
                    let ys = (y.f)(&lam.translated(sx, gamma), u)?;
                    for (iy, my) in ys.iter().enumerate() {
                        let slot = slots[ix * ny + iy];
                        let prod = mx * my;
                        out[slot] = Some(match out[slot].take() {
                            Some(acc) => acc + prod,
                            None => prod,
                        });
                    }
                }
                Ok(out
                    .into_iter()
                    .map(|m| m.expect("every slot has a term"))
                    .collect())
            }),
        })
    }

    /// `O^-1 X O` for a multiplication operator `O`.
    pub fn conjugate_by(&self, o: &DynMat) -> Result<Self> {
        let left = ShiftOpSum::multiplication(&o.inverse());
        let right = ShiftOpSum::multiplication(o);
        left.compose(self)?.compose(&right)
    }

    /// Fixes the spectral value of a leg in every coefficient.
    pub fn pin_spectral(&self, leg: Leg, value: C64) -> Self {
        let inner = self.f.clone();
        Self {
            scheme: self.scheme,
            legs: self.legs.clone(),
            shifts: self.shifts.clone(),
            f: Arc::new(move |lam, u| inner(lam, &u.with(leg, value))),
        }
    }
}

/// Relative residual per shift group of `X Y - Y X`.
pub fn residual_commutator(
    x: &ShiftOpSum,
    y: &ShiftOpSum,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    let xy = x.compose(y)?;
    let yx = y.compose(x)?;
    check_points("transfer_commutator", samples, tol, |p| {
        let a: BTreeMap<Vec<i64>, CMat> = xy.eval(&p.lambda, &p.u)?.into_iter().collect();
        let b: BTreeMap<Vec<i64>, CMat> = yx.eval(&p.lambda, &p.u)?.into_iter().collect();
        let mut worst = 0.0f64;
        for key in a.keys().chain(b.keys()) {
            let r = match (a.get(key), b.get(key)) {
                (Some(l), Some(r)) => rel_residual(l, r),
                (Some(m), None) | (None, Some(m)) => {
                    rel_residual(m, &CMat::zeros(m.nrows(), m.ncols()))
                }
                (None, None) => 0.0,
            };
            worst = worst.max(r);
        }
        Ok(worst)
    })
}

/// Entry-wise comparison of two difference operators, per shift group.
pub fn residual_shiftop_equal(
    x: &ShiftOpSum,
    y: &ShiftOpSum,
    samples: &[SamplePoint],
    tol: f64,
) -> Result<ResidualReport> {
    if x.shifts != y.shifts {
        return Err(Error::DimensionMismatch(format!(
            "shift supports differ: {:?} vs {:?}",
            x.shifts, y.shifts
        )));
    }
    if x.legs != y.legs {
        return Err(Error::InvalidLeg("operators act on different legs".into()));
    }
    check_points("monodromy_factorization", samples, tol, |p| {
        let a = x.eval(&p.lambda, &p.u)?;
        let b = y.eval(&p.lambda, &p.u)?;
        Ok(a.iter()
            .zip(&b)
            .map(|((_, l), (_, r))| rel_residual(l, r))
            .fold(0.0, f64::max))
    })
}

/// Odd quantum legs strictly above `a`.
pub fn odd_legs_above(a: usize, sites: usize) -> Vec<Leg> {
    ((a + 1)..=(2 * sites)).filter(|m| m % 2 == 1).collect()
}

fn shifted(x: &DynMat, legs: &[Leg]) -> Result<DynMat> {
    dyn_shift(x, legs)
}

fn ad_aux(x: &DynMat, g: &Automorphism, power: i64) -> Result<DynMat> {
    if power == 0 || g.is_identity() {
        return Ok(x.clone());
    }
    adjoint_auto(x, g, &[0], Side::Conjugate, Power::int(power))
}

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 {
        return Err(Error::Precondition("at least one site is required".into()));
    }
    Ok(())
}

/// Monodromy matrix `chi_0 X_{0,2N} ... X_{01} K_0 Y_{01} ... Y_{0,2N} e^{D_0}`
/// with `X = A` (even legs) / `C` (odd legs), `Y = D` (odd) / `B` (even),
/// each factor shifted by the odd quantum legs above it, and the automorphism
/// insertions of the deformed case normalized into conjugations.
pub fn build_monodromy_direct(
    s: &StructureSet,
    k0: &DynMat,
    chi: &DynMat,
    sites: usize,
    u_quantum: Option<&[C64]>,
) -> Result<ShiftOpSum> {
    check_sites(sites)?;
    let g = &s.g;
    let mut factors = vec![chi.on(&[0])?];
    for (count, a) in (1..=2 * sites).rev().enumerate() {
        let x = if a % 2 == 0 { &s.a } else { &s.c };
        let xa = shifted(&x.on(&[0, a])?, &odd_legs_above(a, sites))?;
        factors.push(ad_aux(&xa, g, count as i64 + 1)?);
    }
    let tail_power = 2 * sites as i64;
    factors.push(ad_aux(
        &shifted(&k0.on(&[0])?, &odd_legs_above(0, sites))?,
        g,
        tail_power,
    )?);
    for a in 1..=2 * sites {
        let y = if a % 2 == 1 { &s.d } else { &s.b };
        let ya = shifted(&y.on(&[0, a])?, &odd_legs_above(a, sites))?;
        factors.push(ad_aux(&ya, g, tail_power)?);
    }
    let m = DynMat::product(&factors.iter().collect::<Vec<_>>())?;
    let all: Vec<Leg> = (0..=2 * sites).collect();
    let mut t = ShiftOpSum::diagonal_shift(&m.embed(&all)?, 0)?;
    if let Some(us) = u_quantum {
        t = pin_quantum(t, us, sites)?;
    }
    Ok(t)
}

fn pin_quantum(mut t: ShiftOpSum, us: &[C64], sites: usize) -> Result<ShiftOpSum> {
    if us.len() != 2 * sites {
        return Err(Error::DimensionMismatch(format!(
            "expected {} quantum spectral values, got {}",
            2 * sites,
            us.len()
        )));
    }
    for (i, v) in us.iter().enumerate() {
        t = t.pin_spectral(i + 1, *v);
    }
    Ok(t)
}

/// Ingredients of the factored monodromy.
#[derive(Debug, Clone)]
pub struct FactoredInputs {
    /// R-matrix on even (A-type) positions, already in its sigma-dressed form.
    pub r_even: DynMat,
    /// R-matrix on odd (D-type) positions, already in its sigma-dressed form.
    pub r_odd: DynMat,
    /// Intertwiner part of the reflection matrix, `beta K q^-1`.
    pub core: DynMat,
    pub chi: DynMat,
    /// `g b g^-1`.
    pub beta: DynMat,
    pub q: DynMat,
    pub g: Automorphism,
}

/// `O_N = prod_{k=N..1} (beta_{2k} q_{2k-1})(h_odd > 2k-1)`.
pub fn build_on(beta: &DynMat, q: &DynMat, sites: usize) -> Result<DynMat> {
    check_sites(sites)?;
    let mut parts = Vec::with_capacity(sites);
    for k in (1..=sites).rev() {
        let pair = DynMat::product(&[&beta.on(&[2 * k])?, &q.on(&[2 * k - 1])?])?;
        parts.push(shifted(&pair, &odd_legs_above(2 * k - 1, sites))?);
    }
    let all: Vec<Leg> = (1..=2 * sites).collect();
    DynMat::product(&parts.iter().collect::<Vec<_>>())?.embed(&all)
}

/// Core of the factored monodromy, `T = O_N^-1 (core e^{D_0}) O_N`.
pub fn build_factored_core(inp: &FactoredInputs, sites: usize) -> Result<DynMat> {
    check_sites(sites)?;
    let mut seq: Vec<(DynMat, i64)> =
        vec![(inp.chi.on(&[0])?, 0), (inp.beta.on(&[0])?.inverse(), 0)];
    let mut pending = 0;
    for a in (1..=2 * sites).rev() {
        pending += 1;
        if a % 2 == 0 {
            seq.push((
                shifted(&inp.r_even.on(&[0, a])?, &odd_legs_above(a, sites))?,
                pending,
            ));
            pending = 0;
        }
    }
    seq.push((
        shifted(&inp.core.on(&[0])?, &odd_legs_above(0, sites))?,
        pending,
    ));
    for a in (1..=2 * sites).filter(|a| a % 2 == 1) {
        seq.push((
            shifted(&inp.r_odd.on(&[0, a])?, &odd_legs_above(a, sites))?,
            0,
        ));
    }
    seq.push((inp.q.on(&[0])?, 0));
    let mut count = 0;
    let mut parts = Vec::with_capacity(seq.len());
    for (f, k) in seq {
        count += k;
        parts.push(ad_aux(&f, &inp.g, count)?);
    }
    let all: Vec<Leg> = (0..=2 * sites).collect();
    DynMat::product(&parts.iter().collect::<Vec<_>>())?.embed(&all)
}

pub fn build_monodromy_factored(
    inp: &FactoredInputs,
    sites: usize,
    u_quantum: Option<&[C64]>,
) -> Result<ShiftOpSum> {
    let core = build_factored_core(inp, sites)?;
    let o = build_on(&inp.beta, &inp.q, sites)?;
    let mut t = ShiftOpSum::diagonal_shift(&core, 0)?.conjugate_by(&o)?;
    if let Some(us) = u_quantum {
        t = pin_quantum(t, us, sites)?;
    }
    Ok(t)
}

/// Trace over the auxiliary leg.
#[derive(Debug, Clone)]
pub enum TraceVariant {
    Plain,
    /// Inserts `q_0^-1 (.) q_0` before tracing.
    Twisted(DynMat),
}

/// Partial trace of a monodromy over leg 0, at auxiliary spectral value `u0`.
pub fn transfer_trace(
    t: &ShiftOpSum,
    variant: &TraceVariant,
    u0: Option<C64>,
) -> Result<ShiftOpSum> {
    if t.legs.first() != Some(&0) || t.legs.len() < 2 {
        return Err(Error::InvalidLeg(
            "monodromy must act on the auxiliary leg 0 and quantum legs".into(),
        ));
    }
    let n = t.scheme.rank;
    let total = t.legs.len();
    let inner = match u0 {
        Some(v) => t.pin_spectral(0, v),
        None => t.clone(),
    };
    let twist = match variant {
        TraceVariant::Plain => None,
        TraceVariant::Twisted(q) => {
            if q.legs() != [1] {
                return Err(Error::InvalidLeg(
                    "twist must be a single-leg matrix".into(),
                ));
            }
            Some(q.on(&[0])?.embed(&t.legs)?)
        }
    };
    Ok(ShiftOpSum {
        scheme: t.scheme,
        legs: t.legs[1..].to_vec(),
        shifts: t.shifts.clone(),
        f: Arc::new(move |lam, u| {
            let u = match u0 {
                Some(v) => u.with(0, v),
                None => u.clone(),
            };
            let ms = (inner.f)(lam, &u)?;
            let tw = match &twist {
                Some(q) => {
                    let qm = q.eval(lam, &u)?;
                    Some((linalg::inverse(&qm)?, qm))
                }
                None => None,
            };
            Ok(ms
                .iter()
                .map(|m| {
                    let m = match &tw {
                        Some((qi, qm)) => qi * m * qm,
                        None => m.clone(),
                    };
                    linalg::partial_trace_first(&m, n, total)
                })
                .collect())
        }),
    })
}

/// Outcome of certifying that transfer matrices commute.
#[derive(Debug, Clone)]
pub struct CommutingFamilyReport {
    pub preconditions: Vec<ResidualReport>,
    pub commutators: Vec<ResidualReport>,
    pub pass: bool,
}

impl CommutingFamilyReport {
    pub fn failed_preconditions(&self) -> Vec<&str> {
        self.preconditions
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name.as_str())
            .collect()
    }
}

/// Inputs of the transfer-matrix family.
#[derive(Debug, Clone)]
pub struct TransferFamily {
    pub structure: StructureSet,
    pub k0: DynMat,
    pub chi: DynMat,
}

/// Checks the structural preconditions, then pairwise commutation of
/// `t(u)` over `u_list`.
#[allow(clippy::too_many_arguments)]
pub fn certify_commuting_family(
    fam: &TransferFamily,
    sites: usize,
    u_list: &[C64],
    u_quantum: Option<&[C64]>,
    precondition_samples: &[SamplePoint],
    samples: &[SamplePoint],
    pre_tol: f64,
    tol: f64,
) -> Result<CommutingFamilyReport> {
    let s = &fam.structure;
    let mut pre = vec![
        residual_zero_weight(&s.b, WeightKind::B, precondition_samples, pre_tol)?,
        residual_zero_weight(&s.c, WeightKind::C, precondition_samples, pre_tol)?,
    ];
    let mut dec = residual_zero_weight(&s.d, WeightKind::D, precondition_samples, pre_tol)?;
    dec.name = "twist_decomposition_zero_weight".to_string();
    pre.push(dec);
    let rel = if s.g.is_identity() {
        residual_ybce(s, precondition_samples, pre_tol)?
    } else {
        residual_gybce(s, precondition_samples, pre_tol)?
    };
    pre.extend(rel);
    pre.push(residual_sdre(
        s,
        &ReflectionOperand::plain(fam.k0.clone()),
        precondition_samples,
        pre_tol,
    )?);
    if !s.g.is_identity() {
        pre.push(residual_zwc(s, precondition_samples, pre_tol)?);
    }
    if pre.iter().any(|r| !r.pass) {
        return Ok(CommutingFamilyReport {
            preconditions: pre,
            commutators: Vec::new(),
            pass: false,
        });
    }
    let t = build_monodromy_direct(s, &fam.k0, &fam.chi, sites, u_quantum)?;
    let ts = u_list
        .iter()
        .map(|&u| transfer_trace(&t, &TraceVariant::Plain, Some(u)))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..ts.len())
        .flat_map(|i| ((i + 1)..ts.len()).map(move |j| (i, j)))
        .collect();
    let ts = &ts;
    let commutators = std::thread::scope(|scope| {
        let handles: Vec<_> = pairs
            .iter()
            .map(|&(i, j)| {
                scope.spawn(move || {
                    let mut r = residual_commutator(&ts[i], &ts[j], samples, tol)?;
                    r.name = format!("transfer_commutator[{i},{j}]");
                    Ok(r)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("commutator worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let pass = commutators.iter().all(|r| r.pass);
    Ok(CommutingFamilyReport {
        preconditions: pre,
        commutators,
        pass,
    })
}
