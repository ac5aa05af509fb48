mod common;

use common::*;
use dynrefl::consistency::{
    residual_intertwiner, residual_sdre, residual_theta_period, Decoration, IntertwinerSpec,
    ReflectionOperand, StructureSet,
};
use dynrefl::dyncore::{Automorphism, DynMat, LambdaPoint, WeightScheme};
use dynrefl::parametrize::build_structure;
use dynrefl::solutions::{
    build_dual, build_k_g, build_k_nondyn, build_k_quasinondyn, dress, k_g_power,
    k_g_power_checked, reduced_core, residual_reduced_intertwining, scalar_solution, DressingKind,
    KVariant,
};
use dynrefl::{CMat, Error};

fn id1(s: WeightScheme) -> DynMat {
    DynMat::identity(s, vec![1]).unwrap()
}

fn dressed(s: WeightScheme, g: &Automorphism) -> StructureSet {
    build_structure(&yangian(s), &yangian(s), &generic_b(s), &generic_q(s), g).unwrap()
}

fn diag_g() -> Automorphism {
    Automorphism::constant(diag(&[r(2.0), r(1.0)])).unwrap()
}

fn assert_same(x: &DynMat, y: &DynMat, u_slots: usize, seed: u64, tol: f64) {
    let n = x.rank();
    for p in points(n, u_slots, 10, seed) {
        let a = x.eval(&p.lambda, &p.u).unwrap();
        let b = y.eval(&p.lambda, &p.u).unwrap();
        assert!(max_abs_diff(&a, &b) < tol, "{}", max_abs_diff(&a, &b));
    }
}

#[test]
fn intertwiner_identity_between_equal_r() {
    let s = scheme(2);
    let spec = IntertwinerSpec::plain(yangian(s), yangian(s));
    let rep = residual_intertwiner(&spec, &id1(s), &points(2, 3, 10, 201), 1e-12).unwrap();
    assert_eq!(rep.max_residual, 0.0);
}

#[test]
fn yangian_intertwines_every_constant_matrix() {
    for n in [2, 3] {
        let s = scheme(n);
        let spec = IntertwinerSpec::plain(yangian(s), yangian(s));
        let q = CMat::from_fn(n, n, |i, j| {
            c(0.2 + i as f64 - 0.7 * j as f64, 0.1 * (i + j) as f64)
        });
        let rep = residual_intertwiner(
            &spec,
            &constant(s, vec![1], q),
            &points(n, 3, 10, 202),
            1e-12,
        )
        .unwrap();
        assert!(rep.pass, "{}", rep.max_residual);
    }
}

#[test]
fn shifted_intertwiner_with_diagonal_g() {
    let s = scheme(2);
    let mut spec = IntertwinerSpec::plain(yangian(s), yangian(s));
    spec.left_deco.push(Decoration::conjugate(diag_g(), -1));
    let pts = points(2, 3, 10, 203);
    let good = constant(s, vec![1], diag(&[r(1.5), c(0.0, -2.0)]));
    assert!(
        residual_intertwiner(&spec, &good, &pts, 1e-12)
            .unwrap()
            .max_residual
            < 1e-14
    );
    let swap = constant(s, vec![1], unit(2, 0, 1) + unit(2, 1, 0));
    let rep = residual_intertwiner(&spec, &swap, &pts, 1e-9).unwrap();
    assert!(!rep.pass);
    assert!(rep.max_residual > 0.1);
}

#[test]
fn intertwiner_rejects_dynamical_input() {
    let s = scheme(2);
    let spec = IntertwinerSpec::plain(yangian(s), yangian(s));
    let res = residual_intertwiner(&spec, &generic_b(s), &points(2, 3, 5, 204), 1e-9);
    assert!(matches!(res, Err(Error::DynamicalInput(_))));
}

#[test]
fn nondyn_with_identity_intertwiner_is_scalar_solution() {
    let s = scheme(2);
    let b = generic_b(s);
    let k = exp_diag(s, vec![vec![0.4, -0.1], vec![0.2, 0.3]]);
    let q = DynMat::product(&[&b, &k]).unwrap();
    let out = build_k_nondyn(&id1(s), &b, &q).unwrap();
    assert_same(&out, &k, 0, 205, 1e-13);
}

#[test]
fn nondyn_with_trivial_dressing_is_intertwiner() {
    let s = scheme(2);
    let qm = constant(
        s,
        vec![1],
        CMat::from_fn(2, 2, |i, j| c(i as f64 + 0.5, j as f64)),
    );
    let k = build_k_nondyn(&qm, &id1(s), &id1(s)).unwrap();
    assert_same(&k, &qm, 0, 206, 1e-15);
    let id = DynMat::identity(s, vec![1, 2]).unwrap();
    let st = StructureSet::new(
        yangian(s),
        id.clone(),
        id,
        yangian(s),
        Automorphism::Identity,
    )
    .unwrap();
    let rep = residual_sdre(
        &st,
        &ReflectionOperand::plain(k),
        &points(2, 3, 20, 207),
        1e-10,
    )
    .unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
}

#[test]
fn nondyn_with_rank_one_intertwiner() {
    let s = scheme(2);
    let k = build_k_nondyn(
        &constant(s, vec![1], unit(2, 0, 0)),
        &generic_b(s),
        &generic_q(s),
    )
    .unwrap();
    for p in points(2, 0, 5, 208) {
        assert_eq!(k.eval(&p.lambda, &p.u).unwrap().rank(1e-12), 1);
    }
    let rep = residual_sdre(
        &dressed(s, &Automorphism::Identity),
        &ReflectionOperand::plain(k),
        &points(2, 3, 30, 209),
        1e-9,
    )
    .unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
}

#[test]
fn quasinondyn_with_identity_reduces() {
    let s = scheme(2);
    let qm = constant(s, vec![1], unit(2, 0, 1) + CMat::identity(2, 2));
    let (k, rep) = build_k_quasinondyn(
        &qm,
        &Automorphism::Identity,
        &generic_b(s),
        &generic_q(s),
        &points(2, 0, 10, 210),
        1e-12,
    )
    .unwrap();
    assert!(rep.pass);
    let direct = build_k_nondyn(&qm, &generic_b(s), &generic_q(s)).unwrap();
    assert_same(&k, &direct, 0, 211, 1e-13);
}

#[test]
fn quasinondyn_conjugation_closed_form() {
    let s = scheme(2);
    let qm = constant(s, vec![1], unit(2, 0, 1));
    let (k, rep) = build_k_quasinondyn(
        &qm,
        &diag_g(),
        &id1(s),
        &id1(s),
        &points(2, 0, 10, 212),
        1e-10,
    )
    .unwrap();
    assert!(rep.pass);
    assert!(rep.max_residual < 1e-14);
    for p in points(2, 0, 10, 213) {
        let sigma = p.lambda.sigma();
        let want = unit(2, 0, 1) * r(2.0).powc(sigma);
        assert!(max_abs_diff(&k.eval(&p.lambda, &p.u).unwrap(), &want) < 1e-13);
    }
}

#[test]
fn quasinondyn_solves_reflection_equation() {
    let s = scheme(2);
    let st = dressed(s, &Automorphism::Identity);
    for qm in [diag(&[r(1.0), r(-0.5)]), unit(2, 0, 1)] {
        let (k, _) = build_k_quasinondyn(
            &constant(s, vec![1], qm),
            &diag_g(),
            &generic_b(s),
            &generic_q(s),
            &points(2, 0, 5, 214),
            1e-10,
        )
        .unwrap();
        let rep = residual_sdre(
            &st,
            &ReflectionOperand::plain(k),
            &points(2, 3, 30, 215),
            1e-9,
        )
        .unwrap();
        assert!(rep.pass, "{}", rep.max_residual);
    }
}

#[test]
fn k_g_with_identity_reduces() {
    let s = scheme(2);
    let qm = constant(s, vec![1], unit(2, 1, 0) + unit(2, 0, 0) * r(0.3));
    let k = build_k_g(
        &qm,
        &Automorphism::Identity,
        &generic_b(s),
        &generic_q(s),
        &KVariant::Standard,
    )
    .unwrap();
    let direct = build_k_nondyn(&qm, &generic_b(s), &generic_q(s)).unwrap();
    assert_same(&k, &direct, 0, 216, 1e-13);
}

#[test]
fn k_g_with_identity_intertwiner_is_conjugated_scalar() {
    let s = scheme(2);
    let g = diag_g();
    let (b, q) = (generic_b(s), generic_q(s));
    let k = build_k_g(&id1(s), &g, &b, &q, &KVariant::Standard).unwrap();
    let gm = diag(&[r(2.0), r(1.0)]);
    let gi = diag(&[r(0.5), r(1.0)]);
    for p in points(2, 0, 10, 217) {
        let bi = b.eval(&p.lambda, &p.u).unwrap().try_inverse().unwrap();
        let want = &gm * bi * &gi * q.eval(&p.lambda, &p.u).unwrap();
        let got = k.eval(&p.lambda, &p.u).unwrap();
        assert!(max_abs_diff(&got, &want) < 1e-13);
        assert_eq!(got.rank(1e-12), 2);
    }
    let sc = scalar_solution(&b, &q, &g).unwrap();
    assert_same(&k, &sc, 0, 218, 1e-13);
}

#[test]
fn k_g_with_diagonal_g_solves_reflection_equation() {
    let s = scheme(2);
    let g = diag_g();
    let st = dressed(s, &g);
    let qm = constant(s, vec![1], diag(&[r(0.7), c(0.0, 1.1)]));
    let k = build_k_g(&qm, &g, &generic_b(s), &generic_q(s), &KVariant::Standard).unwrap();
    let rep = residual_sdre(
        &st,
        &ReflectionOperand::plain(k),
        &points(2, 3, 30, 219),
        1e-9,
    )
    .unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
}

#[test]
fn dressing_by_identity_is_trivial() {
    let s = scheme(2);
    let k0 = generic_q(s);
    for (g, kind) in [
        (Automorphism::Identity, DressingKind::Plain),
        (diag_g(), DressingKind::Deformed),
    ] {
        let k = dress(&k0, &id1(s), &generic_b(s), &g, kind).unwrap();
        assert_same(&k, &k0, 0, 220, 1e-13);
    }
}

#[test]
fn plain_dressing_matches_direct_builder() {
    let s = scheme(2);
    let b = generic_b(s);
    let k0 = exp_diag(s, vec![vec![-0.3, 0.2], vec![0.1, 0.4]]);
    let qm = constant(s, vec![1], diag(&[r(2.0), c(0.5, 0.5)]));
    let dressed_k = dress(&k0, &qm, &b, &Automorphism::Identity, DressingKind::Plain).unwrap();
    let bk = DynMat::product(&[&b, &k0]).unwrap();
    let direct = build_k_nondyn(&qm, &b, &bk).unwrap();
    assert_same(&dressed_k, &direct, 0, 221, 1e-12);
}

#[test]
fn plain_dressing_needs_identity_automorphism() {
    let s = scheme(2);
    let res = dress(&id1(s), &id1(s), &id1(s), &diag_g(), DressingKind::Plain);
    assert!(matches!(res, Err(Error::Precondition(_))));
}

#[test]
fn deformed_dressing_solves_reflection_equation() {
    let s = scheme(2);
    let g = diag_g();
    let st = dressed(s, &g);
    let k0 = scalar_solution(&generic_b(s), &generic_q(s), &g).unwrap();
    let qm = constant(s, vec![1], diag(&[c(1.0, 0.4), r(-0.8)]));
    let k = dress(&k0, &qm, &generic_b(s), &g, DressingKind::Deformed).unwrap();
    let rep = residual_sdre(
        &st,
        &ReflectionOperand::plain(k),
        &points(2, 3, 30, 222),
        1e-9,
    )
    .unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
}

#[test]
fn zeroth_power_is_unchanged() {
    let s = scheme(2);
    let op = k_g_power(&generic_q(s), &diag_g(), 0).unwrap();
    assert!(op.right.is_none());
}

#[test]
fn spectral_shift_power_of_identity_solves() {
    let s = scheme(2);
    let g = Automorphism::SpectralShift(r(1.0));
    let st = build_structure(&yangian(s), &yangian(s), &id1(s), &id1(s), &g).unwrap();
    let op = k_g_power(&id1(s), &g, 1).unwrap();
    assert!(op.right.is_some());
    let rep = residual_sdre(&st, &op, &points(2, 3, 20, 223), 1e-10).unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
}

#[test]
fn checked_power_rejects_non_commuting_structure() {
    let s = scheme(2);
    let id = DynMat::identity(s, vec![1, 2]).unwrap();
    let d = constant(
        s,
        vec![1, 2],
        CMat::identity(4, 4) + kron(&unit(2, 0, 1), &unit(2, 1, 1)),
    );
    let st = StructureSet::new(id.clone(), id.clone(), id, d, diag_g()).unwrap();
    let res = k_g_power_checked(&st, &id1(s), 1, &points(2, 0, 5, 224), 1e-9);
    assert!(matches!(res, Err(Error::Precondition(_))));
    assert!(k_g_power_checked(&st, &id1(s), 0, &points(2, 0, 5, 224), 1e-9).is_ok());
}

#[test]
fn checked_powers_solve_under_commuting_structure() {
    let s = scheme(2);
    let g = diag_g();
    let st = dressed(s, &g);
    let k = build_k_g(
        &id1(s),
        &g,
        &generic_b(s),
        &generic_q(s),
        &KVariant::Standard,
    )
    .unwrap();
    let pts = points(2, 3, 20, 225);
    for p in -2..=2 {
        let op = k_g_power_checked(&st, &k, p, &pts, 1e-9).unwrap();
        let rep = residual_sdre(&st, &op, &pts, 1e-9).unwrap();
        assert!(rep.pass, "p={p}: {}", rep.max_residual);
    }
}

#[test]
fn dual_of_identities_is_identity() {
    let s = scheme(2);
    let chi = build_dual(&id1(s), &id1(s), &Automorphism::Identity, &id1(s)).unwrap();
    let (l, u) = at(&[0.3, 0.9], &[]);
    assert_eq!(chi.eval(&l, &u).unwrap(), CMat::identity(2, 2));
}

#[test]
fn dual_of_diagonal_data_is_diagonal_and_dynamical() {
    let s = scheme(2);
    let b = generic_b(s);
    let k = scalar_solution(&b, &generic_q(s), &Automorphism::Identity).unwrap();
    let ql = constant(s, vec![1], diag(&[r(2.0), r(0.25)]));
    let chi = build_dual(&k, &b, &Automorphism::Identity, &ql).unwrap();
    let lam = LambdaPoint(vec![r(0.2), r(-0.4)]);
    let u = dynrefl::dyncore::SpectralPoint::empty();
    let m = chi.eval(&lam, &u).unwrap();
    assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);
    let moved = chi.eval(&lam.bumped(0, r(1.0)), &u).unwrap();
    assert!(max_abs_diff(&m, &moved) > 1e-3);
}

#[test]
fn reduced_cores_are_theta_periodic_and_intertwine() {
    let s = scheme(2);
    let (b, q) = (generic_b(s), generic_q(s));
    let pts = points(2, 3, 20, 227);
    let cases = [
        (
            CMat::from_fn(2, 2, |i, j| c(1.0 + i as f64, 0.3 * j as f64)),
            Automorphism::Identity,
        ),
        (unit(2, 0, 1), diag_g()),
    ];
    for (qm, a) in cases {
        let (k, _) =
            build_k_quasinondyn(&constant(s, vec![1], qm), &a, &b, &q, &pts, 1e-10).unwrap();
        let kappa = reduced_core(&k, &b, &q, &Automorphism::Identity).unwrap();
        let rep = residual_theta_period(&kappa, &pts, 1e-12).unwrap();
        assert!(rep.pass, "{}", rep.max_residual);
        let red =
            residual_reduced_intertwining(&yangian(s), &yangian(s), &kappa, &pts, 1e-10).unwrap();
        assert!(red.pass, "{}", red.max_residual);
    }
}

#[test]
fn reduced_intertwining_detects_non_symmetric_core() {
    // kappa(sigma) (x) kappa(sigma + 1) must equal its flip for the Yangian
    let s = scheme(2);
    let (b, q) = (generic_b(s), generic_q(s));
    let pts = points(2, 3, 10, 228);
    let qm = constant(s, vec![1], unit(2, 0, 1) + CMat::identity(2, 2));
    let (k, _) = build_k_quasinondyn(&qm, &diag_g(), &b, &q, &pts, 1e-10).unwrap();
    let kappa = reduced_core(&k, &b, &q, &Automorphism::Identity).unwrap();
    let red = residual_reduced_intertwining(&yangian(s), &yangian(s), &kappa, &pts, 1e-10).unwrap();
    assert!(!red.pass);
}
