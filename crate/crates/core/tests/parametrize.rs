mod common;

use common::*;
use dynrefl::consistency::{
    gauge_tilde, residual_dybe, residual_gybce, residual_quasi_nondyn, residual_shifted_ybe,
    residual_ybce, residual_zero_weight, ShiftedForm, StructureSet, WeightKind,
};
use dynrefl::dyncore::{Automorphism, DynMat, WeightScheme};
use dynrefl::parametrize::{
    build_a, build_b_family, build_bc, build_bc_projector, build_d_twist, build_structure, detwist,
    extract_r0, residual_b_family_compat, sigma_conjugate, untwist,
};
use dynrefl::scenarios::reshetikhin_yangian;
use dynrefl::{CMat, Error};

fn lambda_diag(s: WeightScheme) -> DynMat {
    DynMat::lambda_fn(s, 1, |l| Ok(diag(&l.0)))
}

/// A rotated, twisted Yangian; it does not commute with diagonal `f (x) f`.
fn rotated_yangian(s: WeightScheme) -> DynMat {
    let n = s.rank;
    let cm = CMat::from_fn(n, n, |i, j| {
        if i == j {
            r(1.0)
        } else {
            c(0.3 * (i + 1) as f64, -0.2 * j as f64)
        }
    });
    let rot = constant(s, vec![1, 2], kron(&cm, &cm));
    let twisted = reshetikhin_yangian(s, 0.35).unwrap();
    DynMat::product(&[&rot, &twisted, &rot.inverse()]).unwrap()
}

/// Polynomial diagonal twist; exponential diagonal twists cancel out of
/// zero-weight matrices and leave `D` constant.
fn poly_q(s: WeightScheme) -> DynMat {
    let n = s.rank;
    DynMat::lambda_fn(s, 1, move |l| {
        let sum: dynrefl::C64 = l.0.iter().sum();
        Ok(diag(
            &(0..n)
                .map(|i| r(3.0) + l.0[i] + sum * 0.2)
                .collect::<Vec<_>>(),
        ))
    })
}

#[test]
fn b_family_of_identity() {
    let s = scheme(3);
    let fam = build_b_family(&DynMat::identity(s, vec![1]).unwrap()).unwrap();
    assert_eq!(fam.len(), 3);
    let (l, u) = at(&[0.3, -0.1, 0.7], &[]);
    for b in fam {
        assert_eq!(b.eval(&l, &u).unwrap(), CMat::identity(3, 3));
    }
}

#[test]
fn b_family_of_lambda_diagonal() {
    let s = scheme(2);
    let fam = build_b_family(&lambda_diag(s)).unwrap();
    let (l, u) = at(&[1.0, 1.0], &[]);
    assert!(max_abs_diff(&fam[0].eval(&l, &u).unwrap(), &diag(&[r(2.0), r(1.0)])) < 1e-15);
    assert!(max_abs_diff(&fam[1].eval(&l, &u).unwrap(), &diag(&[r(1.0), r(2.0)])) < 1e-15);
}

#[test]
fn b_family_compatibility_for_diagonal_dressing() {
    for n in [2, 3] {
        let s = scheme(n);
        let fam = build_b_family(&generic_b(s)).unwrap();
        let rep = residual_b_family_compat(&fam, &points(n, 0, 20, 101), 1e-12).unwrap();
        assert!(rep.pass, "{}", rep.max_residual);
    }
}

#[test]
fn bc_of_identity() {
    let s = scheme(2);
    let (b, cm) = build_bc(
        &DynMat::identity(s, vec![1]).unwrap(),
        &Automorphism::Identity,
    )
    .unwrap();
    let (l, u) = at(&[0.5, 0.2], &[]);
    assert_eq!(b.eval(&l, &u).unwrap(), CMat::identity(4, 4));
    assert_eq!(cm.eval(&l, &u).unwrap(), CMat::identity(4, 4));
}

#[test]
fn bc_matches_direct_product() {
    let s = scheme(2);
    let (b, cm) = build_bc(&lambda_diag(s), &Automorphism::Identity).unwrap();
    let (l, u) = at(&[1.0, 2.0], &[]);
    // block i of B is b(lambda)^-1 b(lambda + e_i) on the second factor
    let blocks = [
        diag(&[r(2.0 / 1.0), r(2.0 / 2.0)]),
        diag(&[r(1.0 / 1.0), r(3.0 / 2.0)]),
    ];
    let mut want_b = CMat::zeros(4, 4);
    let mut want_c = CMat::zeros(4, 4);
    for (i, blk) in blocks.iter().enumerate() {
        want_b += kron(&unit(2, i, i), blk);
        want_c += kron(blk, &unit(2, i, i));
    }
    assert!(max_abs_diff(&b.eval(&l, &u).unwrap(), &want_b) < 1e-15);
    assert!(max_abs_diff(&cm.eval(&l, &u).unwrap(), &want_c) < 1e-15);
}

#[test]
fn bc_are_exactly_zero_weight() {
    let s = scheme(3);
    let b = DynMat::lambda_fn(s, 1, |l| {
        Ok(CMat::from_fn(3, 3, |i, j| {
            if i == j {
                (l.0[i] * 0.4).exp()
            } else {
                l.0[j] * 0.1 + r(0.05 * i as f64)
            }
        }))
    });
    let (bm, cm) = build_bc(&b, &Automorphism::Identity).unwrap();
    let pts = points(3, 0, 10, 102);
    assert_eq!(
        residual_zero_weight(&bm, WeightKind::B, &pts, 1e-12)
            .unwrap()
            .max_residual,
        0.0
    );
    assert_eq!(
        residual_zero_weight(&cm, WeightKind::C, &pts, 1e-12)
            .unwrap()
            .max_residual,
        0.0
    );
}

#[test]
fn bc_requires_single_leg() {
    let s = scheme(2);
    let x = DynMat::identity(s, vec![1, 2]).unwrap();
    assert!(matches!(
        build_bc(&x, &Automorphism::Identity),
        Err(Error::InvalidLeg(_))
    ));
}

#[test]
fn projector_bc_with_identity_projectors_reduces() {
    let s = scheme(2);
    let b = generic_b(s);
    let ids = vec![CMat::identity(2, 2); 2];
    let (pb, pc) = build_bc_projector(&b, &ids).unwrap();
    let (bm, cm) = build_bc(&b, &Automorphism::Identity).unwrap();
    for p in points(2, 0, 10, 103) {
        assert!(
            max_abs_diff(
                &pb.eval(&p.lambda, &p.u).unwrap(),
                &bm.eval(&p.lambda, &p.u).unwrap()
            ) < 1e-13
        );
        assert!(
            max_abs_diff(
                &pc.eval(&p.lambda, &p.u).unwrap(),
                &cm.eval(&p.lambda, &p.u).unwrap()
            ) < 1e-13
        );
    }
}

#[test]
fn projector_bc_with_unit_projectors_has_rank_two() {
    let s = scheme(2);
    let projs = vec![unit(2, 0, 0), unit(2, 1, 1)];
    let (pb, _) = build_bc_projector(&generic_b(s), &projs).unwrap();
    for p in points(2, 0, 5, 104) {
        let m = pb.eval(&p.lambda, &p.u).unwrap();
        assert_eq!(m.rank(1e-10), 2);
    }
}

#[test]
fn projector_family_compatibility() {
    let s = scheme(2);
    let b = generic_b(s);
    let projs = [unit(2, 0, 0), unit(2, 1, 1)];
    let fam: Vec<DynMat> = build_b_family(&b)
        .unwrap()
        .into_iter()
        .zip(projs)
        .map(|(bi, p)| {
            let pm = constant(s, vec![1], p);
            DynMat::product(&[&pm, &bi]).unwrap()
        })
        .collect();
    let rep = residual_b_family_compat(&fam, &points(2, 0, 20, 105), 1e-12).unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
}

#[test]
fn projector_bc_rejects_wrong_count() {
    let s = scheme(2);
    let res = build_bc_projector(&generic_b(s), &[unit(2, 0, 0)]);
    assert!(matches!(res, Err(Error::DimensionMismatch(_))));
}

#[test]
fn a_with_identity_dressing_is_r() {
    let s = scheme(2);
    let a = build_a(
        &yangian(s),
        &DynMat::identity(s, vec![1]).unwrap(),
        &Automorphism::Identity,
    )
    .unwrap();
    for p in points(2, 3, 10, 106) {
        let want = yangian(s).eval(&p.lambda, &p.u).unwrap();
        assert!(max_abs_diff(&a.eval(&p.lambda, &p.u).unwrap(), &want) < 1e-14);
    }
}

#[test]
fn dressed_yangian_passes_ybce() {
    for n in [2, 3] {
        let s = scheme(n);
        let st = build_structure(
            &yangian(s),
            &yangian(s),
            &generic_b(s),
            &generic_q(s),
            &Automorphism::Identity,
        )
        .unwrap();
        let reps = residual_ybce(&st, &points(n, 4, 20, 107), 1e-10).unwrap();
        assert_eq!(reps.len(), 4);
        for rep in reps {
            assert!(rep.pass, "{} {}", rep.name, rep.max_residual);
        }
    }
}

#[test]
fn spectral_shift_with_spectral_dressing_passes_gybce() {
    let s = scheme(2);
    let b = DynMat::spectral_fn(s, vec![1], |l, u| {
        Ok(diag(&[
            (l.0[0] * 0.3 + u[0] * 0.2).exp(),
            (l.0[1] * -0.25 + u[0] * 0.1).exp() * 1.5,
        ]))
    })
    .unwrap();
    let g = Automorphism::SpectralShift(r(1.0));
    let st = build_structure(&yangian(s), &yangian(s), &b, &generic_q(s), &g).unwrap();
    let reps = residual_gybce(&st, &points(2, 4, 20, 108), 1e-9).unwrap();
    for rep in reps {
        assert!(rep.pass, "{} {}", rep.name, rep.max_residual);
    }
}

#[test]
fn d_twist_with_identity_is_r() {
    let s = scheme(2);
    let d = build_d_twist(&yangian(s), &DynMat::identity(s, vec![1]).unwrap()).unwrap();
    for p in points(2, 3, 10, 109) {
        let want = yangian(s).eval(&p.lambda, &p.u).unwrap();
        assert!(max_abs_diff(&d.eval(&p.lambda, &p.u).unwrap(), &want) < 1e-14);
    }
}

#[test]
fn d_twist_of_exponential_diagonal_passes_dybe() {
    let s = scheme(2);
    let q = exp_diag(s, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    let d = build_d_twist(&yangian(s), &q).unwrap();
    let rep = residual_dybe(&d, &points(2, 4, 30, 110), 1e-9).unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
    // the exponential factors cancel against the zero-weight R
    let flat =
        residual_quasi_nondyn(&d, &Automorphism::Identity, &points(2, 3, 10, 111), 1e-9).unwrap();
    assert!(flat.pass);
}

#[test]
fn d_twist_of_polynomial_diagonal_is_dynamical() {
    let s = scheme(2);
    let q = poly_q(s);
    let d = build_d_twist(&yangian(s), &q).unwrap();
    let rep = residual_dybe(&d, &points(2, 4, 30, 110), 1e-9).unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
    // genuinely dynamical
    let flat =
        residual_quasi_nondyn(&d, &Automorphism::Identity, &points(2, 3, 10, 111), 1e-9).unwrap();
    assert!(!flat.pass);
}

#[test]
fn untwist_recovers_r() {
    let s = scheme(3);
    let q = generic_q(s);
    let d = build_d_twist(&yangian(s), &q).unwrap();
    let back = untwist(&d, &q).unwrap();
    for p in points(3, 3, 10, 112) {
        let want = yangian(s).eval(&p.lambda, &p.u).unwrap();
        let got = back.eval(&p.lambda, &p.u).unwrap();
        assert!(max_abs_diff(&got, &want) < 1e-12 * want.norm().max(1.0));
    }
}

#[test]
fn detwist_of_non_dynamical_d() {
    let s = scheme(2);
    let out = detwist(
        &yangian(s),
        &DynMat::identity(s, vec![1]).unwrap(),
        &[],
        &points(2, 3, 10, 113),
        1e-10,
    )
    .unwrap();
    assert_eq!(out.verdicts(), vec!["nondynamical".to_string()]);
}

#[test]
fn detwist_round_trip_is_non_dynamical() {
    let s = scheme(2);
    let q = poly_q(s);
    let d = build_d_twist(&yangian(s), &q).unwrap();
    let out = detwist(&d, &q, &[], &points(2, 3, 10, 114), 1e-10).unwrap();
    assert!(out.nondynamical.pass, "{}", out.nondynamical.max_residual);
}

#[test]
fn detwist_with_wrong_twist_gives_no_verdict() {
    let s = scheme(2);
    let d = build_d_twist(&yangian(s), &poly_q(s)).unwrap();
    let wrong = DynMat::lambda_fn(s, 1, |l| {
        Ok(diag(&[r(2.0) + l.0[1] * 0.5, r(4.0) - l.0[0]]))
    });
    let f = Automorphism::constant(diag(&[r(2.0), r(1.0)])).unwrap();
    let out = detwist(&d, &wrong, &[("f".into(), f)], &points(2, 3, 10, 115), 1e-9).unwrap();
    assert!(out.verdicts().is_empty());
}

#[test]
fn detwist_reports_quasi_verdict() {
    let s = scheme(2);
    let f = Automorphism::constant(diag(&[r(2.0), r(1.0)])).unwrap();
    let rt = sigma_conjugate(&rotated_yangian(s), &f, -1.0).unwrap();
    let q = generic_q(s);
    let d = build_d_twist(&rt, &q).unwrap();
    let out = detwist(&d, &q, &[("f".into(), f)], &points(2, 3, 10, 116), 1e-10).unwrap();
    assert_eq!(out.verdicts(), vec!["quasi:f".to_string()]);
}

#[test]
fn extract_r0_with_identity_returns_input() {
    let s = scheme(2);
    let (r0, rep) = extract_r0(
        &yangian(s),
        &Automorphism::Identity,
        &points(2, 3, 10, 117),
        1e-10,
    )
    .unwrap();
    assert!(rep.pass);
    for p in points(2, 3, 5, 118) {
        assert_eq!(
            r0.eval(&p.lambda, &p.u).unwrap(),
            yangian(s).eval(&p.lambda, &p.u).unwrap()
        );
    }
}

#[test]
fn extract_r0_round_trip() {
    let s = scheme(2);
    let f = Automorphism::constant(diag(&[r(2.0), r(1.0)])).unwrap();
    let r0 = rotated_yangian(s);
    let rt = sigma_conjugate(&r0, &f, -1.0).unwrap();
    let pts = points(2, 3, 20, 119);
    let quasi = residual_quasi_nondyn(&rt, &f, &pts, 1e-10).unwrap();
    assert!(quasi.pass, "{}", quasi.max_residual);
    let (back, _) = extract_r0(&rt, &f, &pts, 1e-10).unwrap();
    for p in &pts {
        let want = r0.eval(&p.lambda, &p.u).unwrap();
        let got = back.eval(&p.lambda, &p.u).unwrap();
        assert!(
            max_abs_diff(&got, &want) < 1e-11,
            "{}",
            max_abs_diff(&got, &want)
        );
    }
    let flat = residual_quasi_nondyn(&back, &Automorphism::Identity, &pts, 1e-10).unwrap();
    assert!(flat.pass, "{}", flat.max_residual);
}

#[test]
fn extract_r0_rejects_non_quasi_input() {
    let s = scheme(2);
    let f = Automorphism::constant(diag(&[r(2.0), r(1.0)])).unwrap();
    let d = build_d_twist(&yangian(s), &poly_q(s)).unwrap();
    let res = extract_r0(&d, &f, &points(2, 3, 10, 120), 1e-10);
    assert!(matches!(res, Err(Error::Precondition(_))));
}

#[test]
fn extracted_yangian_satisfies_shifted_ybe() {
    let s = scheme(2);
    let f = Automorphism::constant(diag(&[r(2.0), r(1.0)])).unwrap();
    let rt = sigma_conjugate(&yangian(s), &f, -1.0).unwrap();
    let pts = points(2, 4, 20, 121);
    let (r0, _) = extract_r0(&rt, &f, &pts, 1e-10).unwrap();
    let rep = residual_shifted_ybe(&r0, &f, ShiftedForm::InverseConjugated, &pts, 1e-9).unwrap();
    assert!(rep.pass, "{}", rep.max_residual);
}

#[test]
fn gauge_map_sends_constant_g_structure_to_ybce_solution() {
    let s = scheme(2);
    let g = Automorphism::constant(diag(&[r(2.0), r(0.5)])).unwrap();
    let st = build_structure(&yangian(s), &yangian(s), &generic_b(s), &generic_q(s), &g).unwrap();
    let pts = points(2, 4, 15, 122);
    for rep in residual_gybce(&st, &pts, 1e-9).unwrap() {
        assert!(rep.pass, "{} {}", rep.name, rep.max_residual);
    }
    let tilde: StructureSet = gauge_tilde(&st).unwrap();
    for rep in residual_ybce(&tilde, &pts, 1e-9).unwrap() {
        assert!(rep.pass, "{} {}", rep.name, rep.max_residual);
    }
}

#[test]
fn gauge_map_rejects_spectral_shift() {
    let s = scheme(2);
    let g = Automorphism::SpectralShift(r(1.0));
    let st = build_structure(&yangian(s), &yangian(s), &generic_b(s), &generic_q(s), &g).unwrap();
    assert!(matches!(gauge_tilde(&st), Err(Error::Unsupported(_))));
}
