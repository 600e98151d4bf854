use peakstate::algebra::{catalog, generate_cstar, make_subspace};
use peakstate::linalg::*;
use peakstate::rng::seeded;
use peakstate::states::*;
use peakstate::Tolerances;

fn plus() -> PureState {
    PureState::new(CVec::from_vec(vec![ONE, ONE])).unwrap()
}

#[test]
fn evaluate_examples() {
    let mut rng = seeded(1);
    let s = DensityState::random(3, &mut rng);
    assert!((evaluate(&s, &eye(3)) - ONE).norm() < 1e-14);
    let e1 = PureState::basis(2, 0).density();
    assert!((evaluate(&e1, &diag_real(&[3.0, 5.0])).re - 3.0).abs() < 1e-15);
    assert!((evaluate(&plus().density(), &unit(2, 0, 1)).re - 0.5).abs() < 1e-15);
}

#[test]
fn density_validation() {
    assert!(DensityState::new(diag_real(&[0.5, 0.6])).is_err());
    assert!(DensityState::new(diag_real(&[1.5, -0.5])).is_err());
    assert!(DensityState::new(diag_real(&[0.25, 0.75])).is_ok());
}

#[test]
fn left_support_examples() {
    let p = left_support(&PureState::basis(2, 0).density());
    assert!(fro(&(p - diag_real(&[1.0, 0.0]))) < 1e-12);
    let p = left_support(&plus().density());
    assert!(fro(&(p - from_real(&[&[0.5, 0.5], &[0.5, 0.5]]))) < 1e-12);
    let p = left_support(&DensityState::maximally_mixed(2));
    assert!(fro(&(p - eye(2))) < 1e-12);
}

#[test]
fn support_on_subalgebra() {
    // on the diagonal algebra the support of a vector state is diagonal
    let b = generate_cstar(&catalog::diagonal(2));
    let q = support_on(&b, &plus().density());
    assert!(fro(&(q - eye(2))) < 1e-10);
    let q = support_on(&b, &PureState::basis(2, 1).density());
    assert!(fro(&(q - unit(2, 1, 1))) < 1e-10);
    let full = generate_cstar(&catalog::full(2));
    assert!(fro(&(support_on(&full, &plus().density()) - left_support(&plus().density()))) < 1e-10);
}

#[test]
fn restrict_examples() {
    let s = DensityState::random(2, &mut seeded(2));
    let r = restrict(&s, &catalog::identity_only(2)).unwrap();
    assert_eq!(r.values.len(), 1);
    // the basis element is I/√2
    assert!((r.values[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    let m = make_subspace(&[eye(2), unit(2, 0, 1)], false).unwrap();
    let r = restrict(&plus().density(), &m).unwrap();
    let coeff_e12 = m.coeffs(&unit(2, 0, 1));
    let val: num_complex::Complex64 = r.values.iter().zip(&coeff_e12).map(|(v, k)| v * k).sum();
    assert!((val.re - 0.5).abs() < 1e-14);
}

#[test]
fn exposed_examples() {
    let tol = Tolerances::default();
    let scan = exposed_pure_states(&catalog::identity_only(2), 32, &mut seeded(3), &tol);
    assert!(scan.states.is_empty());
    assert_eq!(scan.degenerate, 32);
    let m = make_subspace(&[diag_real(&[1.0, -1.0])], true).unwrap();
    let scan = exposed_pure_states(&m, 64, &mut seeded(4), &tol);
    assert_eq!(scan.states.len(), 2);
    assert!(scan.states.iter().any(|s| s.same_ray(&PureState::basis(2, 0), 1e-10)));
    assert!(scan.states.iter().any(|s| s.same_ray(&PureState::basis(2, 1), 1e-10)));
    let h = re_part(&unit(2, 0, 1));
    let (_, v, _) = top_eigvec(&h);
    assert!(PureState::new(v).unwrap().same_ray(&plus(), 1e-12));
}

#[test]
fn exposed_states_are_maximizers() {
    let tol = Tolerances::default();
    let m = catalog::upper_triangular(3);
    let mut rng = seeded(5);
    let scan = exposed_pure_states(&m, 8, &mut rng, &tol);
    assert!(!scan.states.is_empty());
    for (w, h) in scan.states.iter().zip(&scan.exposing) {
        let top = w.eval(h).re;
        for _ in 0..1000 {
            let psi = DensityState::random(3, &mut rng);
            let v = evaluate(&psi, h).re;
            assert!(v <= top + 1e-12);
            if v >= top - 1e-12 {
                let a = restrict(&psi, &m).unwrap();
                let b = restrict(&w.density(), &m).unwrap();
                assert!(a.values.iter().zip(&b.values).all(|(x, y)| (x - y).norm() < 1e-8));
            }
        }
    }
}

#[test]
fn exposed_scan_ignores_unimodular_rescaling() {
    let tol = Tolerances::default();
    let m = catalog::identity_and_nilpotent();
    let rescaled: Vec<CMat> = m.basis().iter().map(|b| b * c(0.6, 0.8)).collect();
    let m2 = make_subspace(&rescaled, false).unwrap();
    let a = exposed_pure_states(&m, 16, &mut seeded(6), &tol);
    let b = exposed_pure_states(&m2, 16, &mut seeded(6), &tol);
    assert_eq!(a.states.len(), b.states.len());
    for (x, y) in a.states.iter().zip(&b.states) {
        assert!((x.xi() - y.xi()).norm() < 1e-10);
    }
}

#[test]
fn contraction_fixes_support_iff_value_one() {
    let mut rng = seeded(7);
    for _ in 0..50 {
        let w = PureState::random(3, &mut rng);
        let l = left_support(&w.density());
        // contraction fixing ξ: l + u(I − l) with u a random contraction
        let g = peakstate::rng::gaussian_matrix(3, &mut rng);
        let u = &g * c(0.9 / op_norm(&g), 0.0);
        let fix = &l + (eye(3) - &l) * &u * (eye(3) - &l);
        assert!(op_norm(&fix) <= 1.0 + 1e-12);
        assert!((w.eval(&fix).re - 1.0).abs() < 1e-12);
        assert!(fro(&(&fix * &l - &l)) < 1e-12);
        // a strict contraction never reaches value one
        assert!(w.eval(&u).norm() < 1.0);
        assert!(fro(&(&u * &l - &l)) > 1e-3);
    }
}

#[test]
fn pure_state_phase_and_normalization() {
    let w = PureState::new(CVec::from_vec(vec![c(0.0, 2.0), c(0.0, 0.0)])).unwrap();
    assert!((w.xi()[0] - ONE).norm() < 1e-15);
    assert!(PureState::new(CVec::zeros(2)).is_err());
}
