use peakstate::algebra::{catalog, *};
use peakstate::linalg::*;
use peakstate::rng::{gaussian_matrix, seeded};

#[test]
fn identity_alone() {
    let m = make_subspace(&[eye(2)], false).unwrap();
    assert_eq!(m.dim(), 1);
    assert!(m.unital && m.selfadjoint && m.algebra_closed);
}

#[test]
fn identity_and_nilpotent_flags() {
    let m = make_subspace(&[eye(2), unit(2, 0, 1)], false).unwrap();
    assert_eq!(m.dim(), 2);
    assert!(m.unital && !m.selfadjoint && m.algebra_closed);
}

#[test]
fn unit_adjoined_on_request() {
    let m = make_subspace(&[unit(2, 0, 1)], true).unwrap();
    assert_eq!(m.dim(), 2);
    assert!(m.distance(&eye(2)) < 1e-12);
}

#[test]
fn duplicates_dropped_and_mismatch_rejected() {
    let m = make_subspace(&[unit(2, 0, 1), unit(2, 0, 1) * c(2.0, 1.0)], false).unwrap();
    assert_eq!(m.dim(), 1);
    assert!(make_subspace(&[eye(2), eye(3)], false).is_err());
    assert!(make_subspace(&[], false).is_err());
}

#[test]
fn cstar_examples() {
    assert_eq!(generate_cstar(&catalog::identity_only(2)).dim(), 1);
    let b = generate_cstar(&catalog::identity_and_nilpotent());
    assert_eq!(b.dim(), 4);
    let d = generate_cstar(&make_subspace(&[diag_real(&[1.0, -1.0])], true).unwrap());
    assert_eq!(d.dim(), 2);
    assert!(d.space.algebra_closed && d.space.selfadjoint);
}

#[test]
fn block_examples() {
    let full = generate_cstar(&catalog::full(2));
    assert_eq!(full.blocks.block_dims, vec![2]);
    let diag = generate_cstar(&catalog::diagonal(2));
    assert_eq!(diag.blocks.block_dims, vec![1, 1]);
    assert!(fro(&(&diag.blocks.central_projections[0] - unit(2, 0, 0))) < 1e-10);
    let tri = generate_cstar(&catalog::upper_triangular(2));
    assert_eq!(tri.blocks.block_dims, vec![2]);
    let sum = generate_cstar(&catalog::block_upper(&[2, 1]));
    assert_eq!(sum.blocks.block_dims, vec![2, 1]);
    assert_eq!(sum.blocks.multiplicities, vec![1, 1]);
    // diag(x, x, y): one block of size 1 with multiplicity 2, one of size 1
    let rep = generate_cstar(&make_subspace(&[diag_real(&[1.0, 1.0, 0.0])], true).unwrap());
    assert_eq!(rep.blocks.block_dims, vec![1, 1]);
    assert_eq!(rep.blocks.multiplicities, vec![2, 1]);
}

#[test]
fn distance_examples() {
    let t2 = catalog::upper_triangular(2);
    assert!(member_distance(&eye(2), &t2).unwrap() < 1e-15);
    let p = from_real(&[&[0.5, 0.5], &[0.5, 0.5]]);
    assert!((member_distance(&p, &t2).unwrap() - 0.5).abs() < 1e-14);
    let m = catalog::identity_and_nilpotent();
    assert!((member_distance(&unit(2, 1, 0), &m).unwrap() - 1.0).abs() < 1e-14);
    assert!(member_distance(&eye(3), &t2).is_err());
}

#[test]
fn real_part_span_examples() {
    let r = real_part_span(&catalog::identity_only(2));
    assert_eq!(r.basis.len(), 1);
    assert!(fro(&(&r.basis[0] - eye(2) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0))) < 1e-14);
    let r = real_part_span(&catalog::identity_and_nilpotent());
    assert_eq!(r.basis.len(), 3);
    assert_eq!(real_part_span(&catalog::full(2)).basis.len(), 4);
    for (h, pre) in r.basis.iter().zip(&r.preimages) {
        assert!(fro(&(re_part(pre) - h)) < 1e-12);
        assert!(catalog::identity_and_nilpotent().contains(pre));
    }
}

#[test]
fn real_part_span_is_canonical() {
    let m = catalog::upper_triangular(3);
    let scaled: Vec<CMat> = m
        .basis()
        .iter()
        .enumerate()
        .map(|(k, b)| b * c((k as f64).cos(), (k as f64).sin()))
        .collect();
    let m2 = make_subspace(&scaled, false).unwrap();
    let a = real_part_span(&m);
    let b = real_part_span(&m2);
    for (x, y) in a.basis.iter().zip(&b.basis) {
        assert!(fro(&(x - y)) < 1e-10);
    }
}

#[test]
fn cstar_invariants_on_random_subspaces() {
    let mut rng = seeded(9);
    for n in 2..=4 {
        let m = make_subspace(&[gaussian_matrix(n, &mut rng) * unit(n, 0, n - 1)], true).unwrap();
        let b = generate_cstar(&m);
        assert_eq!(generate_cstar(&b.space).dim(), b.dim());
        for x in m.basis() {
            assert!(b.space.distance(x) <= 1e-9);
        }
        let total = b.blocks.central_projections.iter().fold(CMat::zeros(n, n), |acc, p| acc + p);
        assert!(fro(&(total - eye(n))) < 1e-10);
        for p in &b.blocks.central_projections {
            assert!(fro(&(p * p - p)) < 1e-9);
            for x in b.space.basis() {
                assert!(fro(&(p * x - x * p)) < 1e-9);
            }
        }
    }
}

#[test]
fn central_elements_are_block_diagonal() {
    let b = generate_cstar(&catalog::block_full(&[2, 1, 1]));
    let z = diag_real(&[2.0, 2.0, -1.0, 5.0]);
    let back = b.blocks.central_projections.iter().fold(CMat::zeros(4, 4), |acc, p| acc + p * &z * p);
    assert!(fro(&(back - &z)) < 1e-9);
    assert_eq!(b.blocks.block_dims, vec![2, 1, 1]);
}
