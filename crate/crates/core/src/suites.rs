//! Named check suites run against an assembled scenario.

use crate::consistency::{
    residual_dybe, residual_gybce, residual_intertwiner, residual_projector_compat, residual_sdre,
    residual_theta_period, residual_ybce, residual_zero_weight, residual_zwc, ResidualReport,
    SamplePoint, WeightKind,
};
use crate::dyncore::{Automorphism, DynMat};
use crate::error::{Error, Result};
use crate::monodromy::{
    build_monodromy_direct, build_monodromy_factored, certify_commuting_family,
    residual_shiftop_equal, FactoredInputs, TransferFamily,
};
use crate::parametrize::{conjugated, detwist};
use crate::report::{Report, Skip};
use crate::scenarios::{Instance, SUITES};
use crate::solutions::{k_g_power_checked, residual_reduced_intertwining};

/// Per-run settings overriding the scenario's own.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub sites: Option<usize>,
}

/// Sample count used by monodromy-level suites when none is requested.
pub const DEEP_SAMPLES: usize = 20;

struct Ctx<'a> {
    inst: &'a Instance,
    opts: &'a RunOptions,
    samples: Vec<SamplePoint>,
    tol: f64,
    deep_tol: f64,
    sites: usize,
}

impl Ctx<'_> {
    fn deep_samples(&self) -> Result<Vec<SamplePoint>> {
        let count = self
            .opts
            .samples
            .unwrap_or_else(|| self.inst.sampler.count.min(DEEP_SAMPLES));
        self.inst.sample(self.sites, Some(count), self.opts.seed)
    }
}

enum Outcome {
    Checks(Vec<ResidualReport>),
    Skipped(String),
}

/// Expands `all` and validates names, keeping the given order.
pub fn resolve_suites(names: &[String]) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for n in names {
        if n == "all" {
            for s in SUITES {
                if !out.iter().any(|x| x == s) {
                    out.push(s.to_string());
                }
            }
        } else if SUITES.contains(&n.as_str()) {
            if !out.contains(n) {
                out.push(n.clone());
            }
        } else {
            return Err(Error::Scenario(format!(
                "unknown suite '{n}'; available: all, {}",
                SUITES.join(", ")
            )));
        }
    }
    if out.is_empty() {
        return Err(Error::Scenario("no suite selected".into()));
    }
    Ok(out)
}

pub fn run_suites(inst: &Instance, suites: &[String], opts: &RunOptions) -> Result<Report> {
    let sites = opts.sites.unwrap_or(inst.sites);
    if sites == 0 {
        return Err(Error::Scenario("sites must be at least 1".into()));
    }
    let tol = opts.tolerance.unwrap_or(inst.tolerance);
    let deep_tol = opts.tolerance.unwrap_or(inst.deep_tolerance);
    let samples = inst.sample(sites, opts.samples, opts.seed)?;
    let ctx = Ctx {
        inst,
        opts,
        samples,
        tol,
        deep_tol,
        sites,
    };
    let resolved = resolve_suites(suites)?;
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for s in &resolved {
        match run_one(&ctx, s)? {
            Outcome::Checks(c) => checks.extend(c),
            Outcome::Skipped(reason) => skipped.push(Skip {
                suite: s.clone(),
                reason,
            }),
        }
    }
    Ok(Report::new(&inst.name, suites, checks, skipped))
}

fn run_one(ctx: &Ctx<'_>, suite: &str) -> Result<Outcome> {
    let inst = ctx.inst;
    let s = &inst.structure;
    let (samples, tol) = (&ctx.samples[..], ctx.tol);
    let g_trivial = inst.g.is_identity();
    Ok(match suite {
        "zero-weight" => {
            let mut out = vec![
                residual_zero_weight(&s.b, WeightKind::B, samples, tol)?,
                residual_zero_weight(&s.c, WeightKind::C, samples, tol)?,
                residual_zero_weight(&s.d, WeightKind::D, samples, tol)?,
            ];
            if let Some(ps) = &inst.projectors {
                out.push(residual_projector_compat(
                    &inst.r0, ps, &inst.b, samples, tol,
                )?);
            }
            Outcome::Checks(out)
        }
        "ybce" if !g_trivial => Outcome::Skipped(
            "needs the identity automorphism; the deformed relations are in gybce".into(),
        ),
        "ybce" => Outcome::Checks(residual_ybce(s, samples, tol)?),
        "gybce" if g_trivial => Outcome::Skipped("identity automorphism: identical to ybce".into()),
        "gybce" => Outcome::Checks(residual_gybce(s, samples, tol)?),
        "dybe" => Outcome::Checks(vec![residual_dybe(&s.d, samples, tol)?]),
        "sdre" => Outcome::Checks(sdre_checks(ctx)?),
        "intertwiner" => {
            let mut right =
                residual_intertwiner(&inst.intertwiner_spec(false), &inst.q_right, samples, tol)?;
            right.name = "intertwiner.right".into();
            let mut out = vec![right];
            if inst.chi.is_some() && inst.rbar_is_r0() {
                let mut left =
                    residual_intertwiner(&inst.intertwiner_spec(true), &inst.q_left, samples, tol)?;
                left.name = "intertwiner.left".into();
                out.push(left);
            }
            Outcome::Checks(out)
        }
        "detwist" => Outcome::Checks(vec![detwist_check(ctx)?]),
        "theta-period" => {
            let kappa = inst.reduced_core()?;
            let mut out = vec![residual_theta_period(&kappa, samples, tol)?];
            if g_trivial {
                out.push(residual_reduced_intertwining(
                    &inst.r0, &inst.rbar, &kappa, samples, tol,
                )?);
            }
            Outcome::Checks(out)
        }
        "monodromy-factor" if inst.projectors.is_some() => Outcome::Skipped(
            "the factorized form needs the dressed parametrization of A, B, C".into(),
        ),
        "monodromy-factor" => Outcome::Checks(vec![monodromy_factor(ctx)?]),
        "transfer-commute" => match &inst.chi {
            None => Outcome::Skipped(
                "no dual reflection matrix: the scenario supplies none and none is derivable"
                    .into(),
            ),
            Some(chi) => transfer_commute(ctx, chi)?,
        },
        "zwc" if g_trivial => {
            Outcome::Skipped("identity automorphism: the conditions hold trivially".into())
        }
        "zwc" => Outcome::Checks(vec![residual_zwc(s, samples, tol)?]),
        other => return Err(Error::Scenario(format!("unknown suite '{other}'"))),
    })
}

fn sdre_checks(ctx: &Ctx<'_>) -> Result<Vec<ResidualReport>> {
    let inst = ctx.inst;
    let s = &inst.structure;
    let (samples, tol) = (&ctx.samples[..], ctx.tol);
    let mut out = vec![residual_sdre(
        s,
        &crate::consistency::ReflectionOperand::plain(inst.k.clone()),
        samples,
        tol,
    )?];
    if let Some(k) = &inst.scalar {
        let mut r = residual_sdre(
            s,
            &crate::consistency::ReflectionOperand::plain(k.clone()),
            samples,
            tol,
        )?;
        r.name = "sdre.scalar_solution".into();
        out.push(r);
    }
    if !inst.g.is_identity() {
        for p in [-2i64, -1, 1, 2] {
            match k_g_power_checked(s, &inst.k, p, samples, tol) {
                Ok(op) => {
                    let mut r = residual_sdre(s, &op, samples, tol)?;
                    r.name = format!("sdre.k_g_power[{p}]");
                    out.push(r);
                }
                Err(Error::Precondition(_)) => break,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn detwist_check(ctx: &Ctx<'_>) -> Result<ResidualReport> {
    let inst = ctx.inst;
    let mut candidates = Vec::new();
    if let Some(f) = &inst.f {
        candidates.push(f.clone());
    }
    if matches!(
        inst.g,
        Automorphism::Constant(_) | Automorphism::Factorizable(_)
    ) {
        candidates.push(("g".to_string(), inst.g.clone()));
    }
    let out = detwist(
        &inst.structure.d,
        &inst.q,
        &candidates,
        &ctx.samples,
        ctx.tol,
    )?;
    let verdicts = out.verdicts();
    let mut best = out.nondynamical.clone();
    for (_, r) in &out.quasi {
        if r.max_residual < best.max_residual {
            best = r.clone();
        }
    }
    best.name = if verdicts.is_empty() {
        "detwist[neither]".to_string()
    } else {
        format!("detwist[{}]", verdicts.join(","))
    };
    Ok(best)
}

fn factored_inputs(inst: &Instance, chi: &DynMat) -> Result<FactoredInputs> {
    let (r_even, r_odd) = inst.dressed_r()?;
    Ok(FactoredInputs {
        r_even,
        r_odd,
        core: inst.reduced_core()?,
        chi: chi.clone(),
        beta: conjugated(&inst.b, &inst.g)?,
        q: inst.q.clone(),
        g: inst.g.clone(),
    })
}

fn monodromy_factor(ctx: &Ctx<'_>) -> Result<ResidualReport> {
    let inst = ctx.inst;
    let chi = match &inst.chi {
        Some(c) => c.clone(),
        None => DynMat::identity(inst.scheme, vec![1])?,
    };
    let quantum = inst.quantum_for(ctx.sites);
    let direct = build_monodromy_direct(
        &inst.structure,
        &inst.k,
        &chi,
        ctx.sites,
        quantum.as_deref(),
    )?;
    let factored =
        build_monodromy_factored(&factored_inputs(inst, &chi)?, ctx.sites, quantum.as_deref())?;
    let mut r = residual_shiftop_equal(&direct, &factored, &ctx.deep_samples()?, ctx.deep_tol)?;
    r.name = format!("monodromy_factorization[N={}]", ctx.sites);
    Ok(r)
}

fn transfer_commute(ctx: &Ctx<'_>, chi: &DynMat) -> Result<Outcome> {
    let inst = ctx.inst;
    let fam = TransferFamily {
        structure: inst.structure.clone(),
        k0: inst.k.clone(),
        chi: chi.clone(),
    };
    let report = certify_commuting_family(
        &fam,
        ctx.sites,
        &inst.transfer_u,
        inst.quantum_for(ctx.sites).as_deref(),
        &ctx.samples,
        &ctx.deep_samples()?,
        ctx.tol,
        ctx.deep_tol,
    )?;
    let mut out: Vec<ResidualReport> = report
        .preconditions
        .into_iter()
        .map(|mut r| {
            r.name = format!("transfer.precondition.{}", r.name);
            r
        })
        .collect();
    out.extend(report.commutators);
    Ok(Outcome::Checks(out))
}
