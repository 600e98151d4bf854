use peakstate::algebra::{catalog, generate_cstar, make_subspace, OperatorSubspace};
use peakstate::certify::*;
use peakstate::linalg::*;
use peakstate::rng::{seeded, unitary, Gen};
use peakstate::states::{random_pure_on, support_on, DensityState, PureState};
use peakstate::Tolerances;
use proptest::prelude::*;
use rand::Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn algebras() -> Vec<OperatorSubspace> {
    vec![
        catalog::upper_triangular(2),
        catalog::full(2),
        catalog::diagonal(2),
        catalog::identity_and_nilpotent(),
        catalog::upper_triangular(3),
        catalog::diagonal(3),
        catalog::scalar_plus_strict_upper(3),
        catalog::block_full(&[2, 1]),
        catalog::block_upper(&[2, 1]),
    ]
}

/// Density states with `ψ(l) ≤ 0.9`, mixing toward `I/n` when needed.
fn sample_k(l: &CMat, size: usize, rng: &mut Gen) -> Vec<DensityState> {
    let n = l.nrows();
    (0..size)
        .map(|_| {
            let mut s = DensityState::random(n, rng);
            let mixed = DensityState::maximally_mixed(n);
            let mut t = 0.0;
            while peakstate::states::evaluate(&s, l).re > 0.9 && t < 1.0 {
                t += 0.1;
                s = s.mix(&mixed, t);
            }
            s
        })
        .filter(|s| peakstate::states::evaluate(s, l).re <= 0.9)
        .collect()
}

#[derive(Debug, PartialEq)]
struct Verdicts {
    unique: bool,
    excision: bool,
    detected: bool,
    boundary: bool,
}

fn verdicts(m: &OperatorSubspace, w: &PureState, seed: u64) -> Verdicts {
    let t = tol();
    let mut rng = seeded(seed);
    Verdicts {
        unique: unique_extension_check(m, &w.density(), &t).unwrap().unique,
        excision: excision_check(m, w, &t).unwrap().exists,
        detected: detectable_check(m, w, 10, &mut rng, &t).unwrap().detected(),
        boundary: boundary_rep_check(m, w, &t).unwrap().boundary,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_survive_unimodular_rescaling(seed in any::<u64>(), which in 0usize..9) {
        let m = &algebras()[which];
        let mut rng = seeded(seed);
        let b = generate_cstar(m);
        let w = random_pure_on(&b, &mut rng);
        let scaled: Vec<CMat> = m
            .basis()
            .iter()
            .map(|x| x * num_complex::Complex64::from_polar(1.0, rng.gen_range(0.0..6.3)))
            .collect();
        let m2 = make_subspace(&scaled, true).unwrap();
        prop_assert_eq!(verdicts(m, &w, seed), verdicts(&m2, &w, seed));
    }

    #[test]
    fn verdicts_survive_unitary_conjugation(seed in any::<u64>(), which in 0usize..9) {
        let m = &algebras()[which];
        let mut rng = seeded(seed);
        let b = generate_cstar(m);
        let w = random_pure_on(&b, &mut rng);
        let u = unitary(m.ambient_dim(), &mut rng);
        let (mu, wu) = (m.conjugate(&u), w.conjugate(&u));
        prop_assert_eq!(verdicts(m, &w, seed), verdicts(&mu, &wu, seed));

        let l = support_on(&b, &w.density());
        let k = sample_k(&l, 3, &mut rng);
        let ku: Vec<DensityState> = k.iter().map(|s| s.conjugate(&u)).collect();
        let t = tol();
        let c1 = pinnacle_construct(m, &w, &k, 0.5, &t);
        let c2 = pinnacle_construct(&mu, &wu, &ku, 0.5, &t);
        prop_assert_eq!(c1.is_ok(), c2.is_ok());
        if let (Ok(c1), Ok(c2)) = (c1, c2) {
            prop_assert!((c1.epsilon - c2.epsilon).abs() <= 1e-12);
            prop_assert!((c1.gamma - c2.gamma).abs() <= 1e-8);
        }
    }

    #[test]
    fn detected_states_are_pure_and_boundary(seed in any::<u64>(), which in 0usize..9) {
        let m = &algebras()[which];
        let mut rng = seeded(seed);
        let b = generate_cstar(m);
        let w = random_pure_on(&b, &mut rng);
        let t = tol();
        if detectable_check_in(m, &b, &w, 10, &mut rng, &t).unwrap().detected() {
            prop_assert_eq!(w.density().rank(), 1);
            let v = boundary_rep_check_in(m, &b, &w, &t).unwrap();
            prop_assert!(v.boundary, "width {}", v.width);
        }
    }

    #[test]
    fn excising_element_is_the_support(seed in any::<u64>(), which in 0usize..9) {
        let m = &algebras()[which];
        let mut rng = seeded(seed);
        let b = generate_cstar(m);
        let w = random_pure_on(&b, &mut rng);
        let r = excision_check_in(m, &b, &w, &tol()).unwrap();
        if let Some(e) = &r.excising_element {
            prop_assert!(fro(&(e - support_on(&b, &w.density()))) == 0.0);
            prop_assert!(r.residual <= 1e-12);
            prop_assert!((r.omega_of_e - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn unique_extension_gives_pinnacles(seed in any::<u64>(), which in 0usize..9, size in 1usize..9) {
        let m = &algebras()[which];
        let mut rng = seeded(seed);
        let b = generate_cstar(m);
        let w = random_pure_on(&b, &mut rng);
        let t = tol();
        let unique = unique_extension_check_in(m, &b, &w.density(), &t).unwrap().unique;
        let l = support_on(&b, &w.density());
        let k = sample_k(&l, size, &mut rng);
        for alpha in [1.0, 0.5, 0.1] {
            let r = pinnacle_construct_in(m, &b, &w, &k, alpha, Some(unique), &t);
            if unique {
                let cert = r.unwrap();
                prop_assert!(cert.one_minus_max_k > 0.0 && cert.norm <= 1.0 + alpha);
                prop_assert!((cert.omega_value - 1.0).abs() <= 1e-9);
            }
        }
    }

    /// Certificates for nested `K_1 ⊂ K_2 ⊂ …` form a sequence that
    /// eventually pushes every sampled state below 1.
    #[test]
    fn nested_pinnacles_form_a_detecting_sequence(seed in any::<u64>(), which in 0usize..9) {
        let m = &algebras()[which];
        let mut rng = seeded(seed);
        let b = generate_cstar(m);
        let w = random_pure_on(&b, &mut rng);
        let t = tol();
        let unique = unique_extension_check_in(m, &b, &w.density(), &t).unwrap().unique;
        prop_assume!(unique);
        let l = support_on(&b, &w.density());
        let k = sample_k(&l, 6, &mut rng);
        let certs: Vec<PinnacleCertificate> = (1..=k.len())
            .map(|j| pinnacle_construct_in(m, &b, &w, &k[..j], 0.5, Some(true), &t).unwrap())
            .collect();
        for (j, psi) in k.iter().enumerate() {
            for cert in &certs[j..] {
                let v = peakstate::states::evaluate(psi, &(cert.a.adjoint() * &cert.a)).re;
                prop_assert!(v < 1.0);
            }
        }
    }

    #[test]
    fn commutative_detection_gives_peak_support(seed in any::<u64>(), n in 2usize..5) {
        let m = catalog::diagonal(n);
        let mut rng = seeded(seed);
        let b = generate_cstar(&m);
        let w = random_pure_on(&b, &mut rng);
        let t = tol();
        if detectable_check_in(&m, &b, &w, 5, &mut rng, &t).unwrap().detected() {
            prop_assert!(peak_support_check_in(&m, &b, &w, 5, &mut rng, &t).unwrap().is_some());
        }
    }

    #[test]
    fn derivative_formulas_hold(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let a = peakstate::rng::gaussian_matrix(3, &mut rng);
        let a = &a * c(rng.gen_range(0.1..2.0) / op_norm(&a), 0.0);
        let psi = DensityState::random(3, &mut rng);
        let r = expderiv_check(&a, &psi, &[0.0, 0.1, 0.25, 0.5, 1.0], &tol()).unwrap();
        prop_assert!(r.pass(), "max rel err {}", r.max_rel_err);
    }
}
