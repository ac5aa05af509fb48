//! Scenario documents and their assembly into runtime ingredients.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::expr::{EvalContext, Expr};
use super::sampler::{sample_points, SampleShape, SamplerConfig};
use crate::consistency::{Decoration, IntertwinerSpec, SamplePoint, StructureSet};
use crate::dyncore::{Automorphism, DynMat, Leg, SpectralPoint, WeightScheme};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64};
use crate::parametrize::{
    build_a, build_bc_projector, build_d_twist, build_structure, conjugated, sigma_conjugate,
};
use crate::solutions::{build_dual, build_k_g, reduced_core, scalar_solution, KVariant};

/// Complex number as `[re, im]`.
pub type Cx = [f64; 2];

fn cx(v: Cx) -> C64 {
    c(v[0], v[1])
}

/// Constant entries or expression strings, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Constant(Vec<Vec<Cx>>),
    Expr(Vec<Vec<String>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RSpec {
    /// `I + P / (u1 - u2)`.
    Yangian,
    /// Yangian twisted by `exp(theta sum_{i<j} (e_ii (x) e_jj - e_jj (x) e_ii))`.
    ReshetikhinYangian {
        theta: f64,
    },
    Matrix {
        entries: MatrixSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AutoSpec {
    Identity,
    Constant {
        matrix: Vec<Vec<Cx>>,
    },
    SpectralShift {
        step: Cx,
    },
    /// Entries are expressions in `u1`.
    Factorizable {
        matrix: Vec<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuantumSpectral {
    Values(Vec<Cx>),
    /// `"locality"`: `u_{2m} = 2N - 2m + 1`, `u_{2m-1} = 2N`.
    Preset(String),
}

pub const SUITES: [&str; 11] = [
    "zero-weight",
    "ybce",
    "gybce",
    "dybe",
    "sdre",
    "intertwiner",
    "detwist",
    "theta-period",
    "monodromy-factor",
    "transfer-commute",
    "zwc",
];

fn default_sites() -> usize {
    1
}

fn default_tolerance() -> f64 {
    1e-9
}

fn default_deep_tolerance() -> f64 {
    1e-8
}

fn default_transfer() -> Vec<Cx> {
    vec![[0.3, 0.2], [-0.7, 0.5], [1.1, -0.4]]
}

fn default_gamma() -> Cx {
    [1.0, 0.0]
}

/// A fully specified instance, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub rank: usize,
    #[serde(default = "default_gamma")]
    pub gamma: Cx,
    /// Whether matrices carry spectral parameters.
    #[serde(default)]
    pub spectral: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MatrixSpec>,
    /// Scalar solution; when given, `q = g b g^-1 k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<MatrixSpec>,
    /// Intertwiner entering the reflection matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_right: Option<MatrixSpec>,
    /// Intertwiner entering the dual reflection matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_left: Option<MatrixSpec>,
    /// Explicit dual reflection matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<AutoSpec>,
    /// Dressing automorphism of the intertwiner.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<AutoSpec>,
    /// Candidate for quasi-non-dynamical detwisting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<AutoSpec>,
    pub r0: RSpec,
    /// R-matrix on the right of the intertwiner relation; defaults to `r0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rbar: Option<RSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projectors: Option<Vec<Vec<Vec<Cx>>>>,
    #[serde(default = "default_sites")]
    pub sites: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum_spectral: Option<QuantumSpectral>,
    #[serde(default = "default_transfer")]
    pub transfer_spectral: Vec<Cx>,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_deep_tolerance")]
    pub deep_tolerance: f64,
    /// Suites the scenario is expected to pass; empty means all applicable.
    #[serde(default)]
    pub suites: Vec<String>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Scenario(format!("{path}: {}", e.into_inner()))
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::Scenario(format!("{field}: {msg}")));
        if self.rank < 2 {
            return bad("rank", "must be at least 2");
        }
        let g = cx(self.gamma);
        if g.norm() == 0.0 || !g.re.is_finite() || !g.im.is_finite() {
            return bad("gamma", "must be finite and non-zero");
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad("tolerance", "must be positive");
        }
        if self.deep_tolerance.is_nan() || self.deep_tolerance <= 0.0 {
            return bad("deep_tolerance", "must be positive");
        }
        if self.sites == 0 {
            return bad("sites", "must be at least 1");
        }
        if self.k.is_some() && self.q.is_some() {
            return bad("k", "give either k or q, not both");
        }
        if let Some(QuantumSpectral::Preset(p)) = &self.quantum_spectral {
            if p != "locality" {
                return bad(
                    "quantum_spectral",
                    &format!("unknown preset '{p}' (known: locality)"),
                );
            }
        }
        if let Some(QuantumSpectral::Values(v)) = &self.quantum_spectral {
            if v.len() != 2 * self.sites {
                return bad(
                    "quantum_spectral",
                    &format!("expected {} values", 2 * self.sites),
                );
            }
        }
        for s in &self.suites {
            if s != "all" && !SUITES.contains(&s.as_str()) {
                return bad("suites", &format!("unknown suite '{s}'"));
            }
        }
        if self.sampler.count == 0 {
            return bad("sampler.count", "must be at least 1");
        }
        Ok(())
    }

    pub fn scheme(&self) -> Result<WeightScheme> {
        WeightScheme::new(self.rank, cx(self.gamma))
    }

    /// Quantum spectral values if fixed by the scenario.
    pub fn quantum_values(&self, sites: usize) -> Option<Vec<C64>> {
        quantum_values(self.quantum_spectral.as_ref(), sites)
    }

    pub fn assemble(&self) -> Result<Instance> {
        Instance::new(self)
    }
}

fn quantum_values(spec: Option<&QuantumSpectral>, sites: usize) -> Option<Vec<C64>> {
    match spec {
        None => None,
        Some(QuantumSpectral::Values(v)) if v.len() == 2 * sites => {
            Some(v.iter().map(|x| cx(*x)).collect())
        }
        Some(QuantumSpectral::Values(_)) => None,
        Some(QuantumSpectral::Preset(_)) => Some(locality_preset(sites)),
    }
}

/// `u_{2m} = 2N - 2m + 1`, `u_{2m-1} = 2N`, `m = 1..N`.
pub fn locality_preset(sites: usize) -> Vec<C64> {
    (1..=2 * sites)
        .map(|a| {
            if a % 2 == 0 {
                c((2 * sites - a + 1) as f64, 0.0)
            } else {
                c((2 * sites) as f64, 0.0)
            }
        })
        .collect()
}

fn parse_entries(rows: &[Vec<String>], dim: usize, field: &str) -> Result<Vec<Expr>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Scenario(format!(
            "{field}: expected a {dim}x{dim} matrix"
        )));
    }
    rows.iter()
        .flatten()
        .enumerate()
        .map(|(k, s)| {
            Expr::parse(s)
                .map_err(|e| Error::Scenario(format!("{field}[{}][{}]: {e}", k / dim, k % dim)))
        })
        .collect()
}

fn constant_matrix(rows: &[Vec<Cx>], dim: usize, field: &str) -> Result<CMat> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Scenario(format!(
            "{field}: expected a {dim}x{dim} matrix"
        )));
    }
    Ok(CMat::from_fn(dim, dim, |i, j| cx(rows[i][j])))
}

fn spectral_values(u: &SpectralPoint, legs: &[Leg]) -> Vec<C64> {
    legs.iter()
        .map(|&l| u.get(l).unwrap_or(c(f64::NAN, f64::NAN)))
        .collect()
}

fn expr_dynmat(entries: Vec<Expr>, scheme: WeightScheme, legs: Vec<Leg>) -> Result<DynMat> {
    let dim = linalg::pow_usize(scheme.rank, legs.len());
    let gamma = scheme.gamma;
    let order = legs.clone();
    DynMat::new(scheme, legs, move |lam, u| {
        let us = spectral_values(u, &order);
        let ctx = EvalContext {
            lambda: &lam.0,
            u: &us,
            gamma,
        };
        let vals = entries
            .iter()
            .map(|e| e.eval(&ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(CMat::from_row_slice(dim, dim, &vals))
    })
}

fn check_indices(
    entries: &[Expr],
    rank: usize,
    legs: usize,
    spectral: bool,
    field: &str,
) -> Result<()> {
    for e in entries {
        if e.max_lambda() > rank {
            return Err(Error::Scenario(format!(
                "{field}: lambda{} exceeds the rank {rank}",
                e.max_lambda()
            )));
        }
        if e.max_u() > legs {
            return Err(Error::Scenario(format!(
                "{field}: u{} exceeds the {legs} leg(s) of this matrix",
                e.max_u()
            )));
        }
        if e.max_u() > 0 && !spectral {
            return Err(Error::Scenario(format!(
                "{field}: spectral parameter used in a non-spectral scenario"
            )));
        }
    }
    Ok(())
}

fn matrix_dynmat(
    spec: &MatrixSpec,
    scheme: WeightScheme,
    legs: Vec<Leg>,
    spectral: bool,
    field: &str,
) -> Result<DynMat> {
    let dim = linalg::pow_usize(scheme.rank, legs.len());
    match spec {
        MatrixSpec::Constant(rows) => {
            DynMat::constant(scheme, legs, constant_matrix(rows, dim, field)?)
        }
        MatrixSpec::Expr(rows) => {
            let entries = parse_entries(rows, dim, field)?;
            check_indices(&entries, scheme.rank, legs.len(), spectral, field)?;
            expr_dynmat(entries, scheme, legs)
        }
    }
}

fn difference(u: &[C64]) -> Result<C64> {
    let d = u[0] - u[1];
    if d.norm() <= super::expr::POLE_EPS {
        return Err(Error::Pole("coinciding spectral parameters".into()));
    }
    Ok(d)
}

/// `I + P / (u1 - u2)` on legs `(1, 2)`.
pub fn yangian(scheme: WeightScheme) -> Result<DynMat> {
    let n = scheme.rank;
    let p = linalg::permutation_operator(n);
    DynMat::spectral_fn(scheme, vec![1, 2], move |_, u| {
        let d = difference(u)?;
        Ok(linalg::eye(n * n) + &p / d)
    })
}

/// Yangian R-matrix twisted by a Cartan exponential with antisymmetric
/// parameters `theta_ij = theta` (`i < j`).
pub fn reshetikhin_yangian(scheme: WeightScheme, theta: f64) -> Result<DynMat> {
    let n = scheme.rank;
    DynMat::spectral_fn(scheme, vec![1, 2], move |_, u| {
        let inv = difference(u)?.inv();
        let mut m = CMat::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let row = i * n + j;
                if i == j {
                    m[(row, row)] = c(1.0, 0.0) + inv;
                } else {
                    let t = if i < j { theta } else { -theta };
                    m[(row, row)] = c((-2.0 * t).exp(), 0.0);
                    m[(row, j * n + i)] = inv;
                }
            }
        }
        Ok(m)
    })
}

fn r_dynmat(spec: &RSpec, scheme: WeightScheme, spectral: bool, field: &str) -> Result<DynMat> {
    let needs_u = || {
        if spectral {
            Ok(())
        } else {
            Err(Error::Scenario(format!(
                "{field}: spectral R-matrix in a non-spectral scenario"
            )))
        }
    };
    match spec {
        RSpec::Yangian => {
            needs_u()?;
            yangian(scheme)
        }
        RSpec::ReshetikhinYangian { theta } => {
            needs_u()?;
            reshetikhin_yangian(scheme, *theta)
        }
        RSpec::Matrix { entries } => matrix_dynmat(entries, scheme, vec![1, 2], spectral, field),
    }
}

fn auto_from_spec(
    spec: &AutoSpec,
    scheme: WeightScheme,
    spectral: bool,
    field: &str,
) -> Result<Automorphism> {
    let n = scheme.rank;
    match spec {
        AutoSpec::Identity => Ok(Automorphism::Identity),
        AutoSpec::Constant { matrix } => Automorphism::constant(constant_matrix(matrix, n, field)?)
            .map_err(|e| Error::Scenario(format!("{field}: {e}"))),
        AutoSpec::SpectralShift { step } => {
            if !spectral {
                return Err(Error::Scenario(format!(
                    "{field}: spectral shift in a non-spectral scenario"
                )));
            }
            Ok(Automorphism::SpectralShift(cx(*step)))
        }
        AutoSpec::Factorizable { matrix } => {
            let entries = parse_entries(matrix, n, field)?;
            check_indices(&entries, 0, 1, spectral, field)?;
            if entries.iter().any(Expr::is_dynamical) {
                return Err(Error::Scenario(format!(
                    "{field}: automorphism entries may not depend on lambda"
                )));
            }
            let gamma = scheme.gamma;
            Ok(Automorphism::factorizable(move |u| {
                let us = [u];
                let ctx = EvalContext {
                    lambda: &[],
                    u: &us,
                    gamma,
                };
                let vals = entries
                    .iter()
                    .map(|e| e.eval(&ctx))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CMat::from_row_slice(n, n, &vals))
            }))
        }
    }
}

/// Runtime ingredients of a scenario.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub scheme: WeightScheme,
    pub spectral: bool,
    pub b: DynMat,
    pub q: DynMat,
    pub q_right: DynMat,
    pub q_left: DynMat,
    pub g: Automorphism,
    pub a: Option<Automorphism>,
    pub f: Option<(String, Automorphism)>,
    pub r0: DynMat,
    pub rbar: DynMat,
    pub projectors: Option<Vec<CMat>>,
    pub structure: StructureSet,
    /// Reflection matrix built from `q_right`.
    pub k: DynMat,
    /// Invertible scalar solution `beta^-1 q`; needs the two R-matrices to coincide.
    pub scalar: Option<DynMat>,
    /// Dual reflection matrix, supplied or derived.
    pub chi: Option<DynMat>,
    pub sites: usize,
    pub quantum_spectral: Option<QuantumSpectral>,
    /// Whether the right R-matrix was given separately from `r0`.
    pub rbar_distinct: bool,
    pub transfer_u: Vec<C64>,
    pub sampler: SamplerConfig,
    pub tolerance: f64,
    pub deep_tolerance: f64,
    pub suites: Vec<String>,
}

impl Instance {
    fn new(s: &Scenario) -> Result<Self> {
        s.validate()?;
        let scheme = s.scheme()?;
        let n = s.rank;
        let one = |legs: Vec<Leg>| DynMat::identity(scheme, legs);
        let single = |spec: &Option<MatrixSpec>, field: &str| -> Result<Option<DynMat>> {
            spec.as_ref()
                .map(|m| matrix_dynmat(m, scheme, vec![1], s.spectral, field))
                .transpose()
        };
        let g = match &s.g {
            Some(spec) => auto_from_spec(spec, scheme, s.spectral, "g")?,
            None => Automorphism::Identity,
        };
        let a =
            s.a.as_ref()
                .map(|x| auto_from_spec(x, scheme, s.spectral, "a"))
                .transpose()?;
        let f = s
            .f
            .as_ref()
            .map(|x| Ok::<_, Error>(("f".to_string(), auto_from_spec(x, scheme, s.spectral, "f")?)))
            .transpose()?;
        let b = single(&s.b, "b")?.map_or_else(|| one(vec![1]), Ok)?;
        let q = match (single(&s.k, "k")?, single(&s.q, "q")?) {
            (Some(k), None) => DynMat::product(&[&conjugated(&b, &g)?, &k])?,
            (None, Some(q)) => q,
            (None, None) => one(vec![1])?,
            (Some(_), Some(_)) => unreachable!("rejected by validation"),
        };
        let q_right = single(&s.q_right, "q_right")?.map_or_else(|| one(vec![1]), Ok)?;
        let q_left = single(&s.q_left, "q_left")?.map_or_else(|| one(vec![1]), Ok)?;
        let r0 = r_dynmat(&s.r0, scheme, s.spectral, "r0")?;
        let rbar = match &s.rbar {
            Some(spec) => r_dynmat(spec, scheme, s.spectral, "rbar")?,
            None => r0.clone(),
        };
        let projectors = s
            .projectors
            .as_ref()
            .map(|ps| {
                ps.iter()
                    .enumerate()
                    .map(|(i, p)| constant_matrix(p, n, &format!("projectors[{i}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        let structure = match &projectors {
            Some(ps) => {
                if !g.is_identity() {
                    return Err(Error::Scenario(
                        "projectors: only supported with the identity automorphism".into(),
                    ));
                }
                let (bm, cm) = build_bc_projector(&b, ps)?;
                StructureSet::new(
                    build_a(&r0, &b, &g)?,
                    bm,
                    cm,
                    build_d_twist(&rbar, &q)?,
                    g.clone(),
                )?
            }
            None => build_structure(&r0, &rbar, &b, &q, &g)?,
        };
        let variant = match &a {
            Some(a) => KVariant::Dressed { a: a.clone() },
            None => KVariant::Standard,
        };
        let k = build_k_g(&q_right, &g, &b, &q, &variant)?;
        let scalar = if projectors.is_none() && s.rbar.is_none() {
            Some(scalar_solution(&b, &q, &g)?)
        } else {
            None
        };
        let chi = match (&s.chi, &scalar) {
            (Some(spec), _) => Some(matrix_dynmat(spec, scheme, vec![1], s.spectral, "chi")?),
            (None, Some(k0)) => Some(build_dual(k0, &b, &g, &q_left)?),
            _ => None,
        };
        Ok(Self {
            name: s.name.clone(),
            scheme,
            spectral: s.spectral,
            b,
            q,
            q_right,
            q_left,
            g,
            a,
            f,
            r0,
            rbar,
            projectors,
            structure,
            k,
            scalar,
            chi,
            sites: s.sites,
            quantum_spectral: s.quantum_spectral.clone(),
            rbar_distinct: s.rbar.is_some(),
            transfer_u: s.transfer_spectral.iter().map(|v| cx(*v)).collect(),
            sampler: s.sampler.clone(),
            tolerance: s.tolerance,
            deep_tolerance: s.deep_tolerance,
            suites: s.suites.clone(),
        })
    }

    pub fn rank(&self) -> usize {
        self.scheme.rank
    }

    /// Intertwiner relation satisfied by `q_right`, decorated for the
    /// automorphisms in play.
    pub fn intertwiner_spec(&self, left: bool) -> IntertwinerSpec {
        let mut spec = if left {
            IntertwinerSpec::plain(self.r0.clone(), self.r0.clone())
        } else {
            IntertwinerSpec::plain(self.r0.clone(), self.rbar.clone())
        };
        let mut decos = Vec::new();
        if !self.g.is_identity() {
            decos.push(Decoration::conjugate(self.g.clone(), -1));
        }
        if let (Some(a), false) = (&self.a, left) {
            decos.push(Decoration::conjugate(a.clone(), 1));
        }
        spec.left_deco = decos.clone();
        spec.right_deco = decos;
        spec
    }

    /// `beta K q^-1`.
    pub fn reduced_core(&self) -> Result<DynMat> {
        reduced_core(&self.k, &self.b, &self.q, &self.g)
    }

    /// R-matrices after the sigma-conjugation by `g`.
    pub fn dressed_r(&self) -> Result<(DynMat, DynMat)> {
        Ok((
            sigma_conjugate(&self.r0, &self.g, -1.0)?,
            sigma_conjugate(&self.rbar, &self.g, -1.0)?,
        ))
    }

    /// Spectral values sampled points must avoid: the transfer parameters
    /// together with their images under the automorphism.
    pub fn avoided_spectral(&self, sites: usize) -> Vec<C64> {
        let mut out = Vec::new();
        let reach = 2 * sites as i64 + 2;
        for &u in &self.transfer_u {
            match self.g {
                Automorphism::SpectralShift(s) => {
                    out.extend((-reach..=reach).map(|k| u + s * k as f64));
                }
                _ => out.push(u),
            }
        }
        if let Some(qs) = self.quantum_for(sites) {
            out.extend(qs);
        }
        out
    }

    /// Points where `b` and `q` are invertible at the shifts the checks use
    /// and the scenario's matrices evaluate without poles.
    pub fn sample(
        &self,
        sites: usize,
        count: Option<usize>,
        seed: Option<u64>,
    ) -> Result<Vec<SamplePoint>> {
        let mut cfg = self.sampler.clone();
        if let Some(c) = count {
            cfg.count = c;
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        let shape = SampleShape {
            rank: self.rank(),
            u_slots: (2 * sites + 1).max(4),
            avoid: self.avoided_spectral(sites),
        };
        let n = self.rank();
        let gamma = self.scheme.gamma;
        let mut shifts = vec![vec![0i64; n]];
        for i in 0..n {
            for j in i..n {
                let mut m = vec![0i64; n];
                m[i] += 1;
                m[j] += 1;
                shifts.push(m);
            }
            let mut m = vec![0i64; n];
            m[i] = 1;
            shifts.push(m);
        }
        let invertible = [
            self.b.clone(),
            self.q.clone(),
            conjugated(&self.b, &self.g).unwrap_or_else(|_| self.b.clone()),
        ];
        let probes = [self.k.clone()];
        sample_points(&cfg, &shape, |p| {
            for m in &shifts {
                let lam = p.lambda.translated(m, gamma);
                for legs in [1usize, 2, 3] {
                    let u = p.u.clone();
                    for x in &invertible {
                        let Ok(on) = x.on(&[legs]) else { return false };
                        match on.eval(&lam, &u).and_then(|v| linalg::inverse(&v)) {
                            Ok(_) => {}
                            Err(_) => return false,
                        }
                    }
                }
                for x in &probes {
                    if x.eval(&lam, &p.u)
                        .map(|v| !linalg::is_finite(&v))
                        .unwrap_or(true)
                    {
                        return false;
                    }
                }
            }
            true
        })
    }

    pub fn rbar_is_r0(&self) -> bool {
        !self.rbar_distinct
    }

    /// Fixed quantum spectral values for a chain of `sites` sites.
    pub fn quantum_for(&self, sites: usize) -> Option<Vec<C64>> {
        quantum_values(self.quantum_spectral.as_ref(), sites)
    }
}
