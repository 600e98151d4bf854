//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use peakstate::algebra::{catalog, generate_algebra, generate_cstar, make_subspace, OperatorSubspace};
use peakstate::certify::*;
use peakstate::kernel::width;
use peakstate::linalg::*;
use peakstate::numrange::*;
use peakstate::rng::{gaussian_matrix, trial_rng, Gen};
use peakstate::states::{evaluate, is_pure_on, random_pure_on, support_on, DensityState, PureState};
use peakstate::Tolerances;
use rand::Rng;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
}

fn run(id: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    Outcome { id, pass, detail, secs: start.elapsed().as_secs_f64() }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Density states with `ψ(l) ≤ 0.9`, mixed toward `I/n` when a draw is too close.
fn sample_k(l: &CMat, size: usize, rng: &mut Gen) -> Vec<DensityState> {
    let n = l.nrows();
    let mixed = DensityState::maximally_mixed(n);
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let mut s = if rng.gen_bool(0.5) {
            PureState::random(n, rng).density()
        } else {
            DensityState::random(n, rng)
        };
        let mut t = 0.0f64;
        while evaluate(&s, l).re > 0.9 && t < 1.0 {
            t += 0.1;
            s = s.mix(&mixed, t.min(1.0));
        }
        if evaluate(&s, l).re <= 0.9 {
            out.push(s);
        }
    }
    out
}

fn criterion_1() -> (bool, String) {
    let t = tol();
    let chunks: Vec<(usize, usize, f64, usize)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..4u64)
            .map(|wk| {
                let t = &t;
                scope.spawn(move || {
                    let (mut exposed, mut fails, mut max_w, mut errors) = (0, 0, 0.0f64, 0);
                    for i in (wk..200).step_by(4) {
                        let mut rng = trial_rng(1, i);
                        let g = gaussian_matrix(2, &mut rng);
                        let m = make_subspace(&[eye(2), g], true).unwrap();
                        match pep_scan(&m, 64, &mut rng, t) {
                            Ok(r) => {
                                exposed += r.exposed;
                                fails += r.failures.len();
                                max_w = max_w.max(r.max_width);
                            }
                            Err(_) => errors += 1,
                        }
                    }
                    (exposed, fails, max_w, errors)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let exposed: usize = chunks.iter().map(|c| c.0).sum();
    let fails: usize = chunks.iter().map(|c| c.1).sum();
    let max_w = chunks.iter().map(|c| c.2).fold(0.0, f64::max);
    let errors: usize = chunks.iter().map(|c| c.3).sum();
    let pass = fails == 0 && errors == 0 && max_w <= 1e-7;
    (pass, format!("200 subspaces of M_2, {exposed} exposed pure states, {fails} non-unique, {errors} errors, max width {max_w:.2e} (tol 1e-7)"))
}

/// Coarse grid, then three zoomed grids around the best cell.
fn grid_max(t: f64, gamma: f64, beta: f64) -> (f64, f64, f64, f64) {
    const N: usize = 2000;
    let f = |a: f64, s: f64| ellipse_objective(t, gamma, beta, a, s);
    let (mut best, mut ba, mut bs) = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..N {
        let a = 2.0 * PI * i as f64 / N as f64;
        for j in 0..N {
            let s = j as f64 / (N - 1) as f64;
            let v = f(a, s);
            if v > best {
                (best, ba, bs) = (v, a, s);
            }
        }
    }
    let coarse = best;
    let (mut ha, mut hs) = (2.0 * PI / N as f64, 1.0 / (N - 1) as f64);
    for _ in 0..4 {
        let (ca, cs) = (ba, bs);
        for i in 0..=200 {
            let a = ca + ha * (i as f64 / 100.0 - 1.0) * 2.0;
            for j in 0..=200 {
                let s = (cs + hs * (j as f64 / 100.0 - 1.0) * 2.0).clamp(0.0, 1.0);
                let v = f(a, s);
                if v > best {
                    (best, ba, bs) = (v, a, s);
                }
            }
        }
        ha /= 50.0;
        hs /= 50.0;
    }
    (coarse, best, ba.rem_euclid(2.0 * PI), bs)
}

fn criterion_2() -> (bool, String) {
    let mut rng = trial_rng(2, 0);
    let mut max_err: f64 = 0.0;
    for _ in 0..1000 {
        let (t, gamma, beta) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
        let m = m2_exposed_maximizer(t, gamma, beta).unwrap();
        let (v, _) = support_function(&[canonical_matrix(t, gamma)], &[beta.cos(), -beta.sin()]).unwrap();
        max_err = max_err.max((m.value - v).abs());
    }
    let mut grid_err: f64 = 0.0;
    let mut above = 0;
    let mut argmax_err: f64 = 0.0;
    for _ in 0..20 {
        let (t, gamma, beta) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
        let m = m2_exposed_maximizer(t, gamma, beta).unwrap();
        let (coarse, refined, a, s) = grid_max(t, gamma, beta);
        above += (coarse > m.value + 1e-12) as usize;
        grid_err = grid_err.max((refined - m.value).abs());
        let da = (a - m.alpha_star).rem_euclid(2.0 * PI);
        argmax_err = argmax_err.max(da.min(2.0 * PI - da)).max((s - m.s_star).abs());
    }
    let pass = max_err <= 1e-9 && grid_err <= 1e-6 && above == 0;
    (
        pass,
        format!(
            "formula vs eigen-oracle max err {max_err:.2e} (tol 1e-9) over 1000; grid oracle max err {grid_err:.2e} (tol 1e-6) over 20, argmax err {argmax_err:.1e}, grid above formula {above}"
        ),
    )
}

fn criterion_3() -> (bool, String) {
    let t = tol();
    let a = catalog::upper_triangular(2);
    let xi = PureState::new(CVec::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
    let ext = unique_extension_check(&a, &xi.density(), &t).unwrap();
    let ex = excision_check(&a, &xi, &t).unwrap();
    let mut rng = trial_rng(3, 0);
    let ps = peak_support_check(&a, &xi, 10, &mut rng, &t).unwrap();
    let pass = ext.unique && !ex.exists && (ex.distance - 0.5).abs() <= 1e-10 && ps.is_none();
    (
        pass,
        format!(
            "unique = {} (width {:.1e}), excision = {} (distance {:.12}), peak support = {}",
            ext.unique,
            ext.width,
            ex.exists,
            ex.distance,
            if ps.is_some() { "Some" } else { "None" }
        ),
    )
}

fn criterion_4() -> (bool, String) {
    let t = tol();
    let (mut max_err, mut bound_fail, mut fails) = (0.0f64, 0, 0);
    for i in 0..100 {
        let mut rng = trial_rng(4, i);
        let a = gaussian_matrix(3, &mut rng);
        let a = &a * c(rng.gen_range(0.05..2.0) / op_norm(&a), 0.0);
        let psi = DensityState::random(3, &mut rng);
        let ts = [rng.gen_range(0.0..1.0), 0.1, 0.5, 1.0];
        let r = expderiv_check(&a, &psi, &ts, &t).unwrap();
        max_err = max_err.max(r.max_rel_err);
        bound_fail += (!r.bound_ok) as usize;
        fails += (!r.pass()) as usize;
    }
    (
        fails == 0,
        format!("100 instances in M_3: max relative error {max_err:.2e} (tol 1e-5), bound violations {bound_fail}"),
    )
}

fn criterion_5() -> (bool, String) {
    let t = tol();
    let alphas = [1.0, 0.5, 0.1];
    let (mut fails, mut min_margin, mut worst_omega) = (Vec::new(), f64::INFINITY, 0.0f64);
    for i in 0..50u64 {
        let mut rng = trial_rng(5, i);
        let n = if i % 2 == 0 { 2 } else { 3 };
        let a = catalog::upper_triangular(n);
        let b = generate_cstar(&a);
        let w = PureState::random(n, &mut rng);
        let l = support_on(&b, &w.density());
        let k = sample_k(&l, rng.gen_range(1..=8), &mut rng);
        let alpha = alphas[i as usize % 3];
        match pinnacle_construct_in(&a, &b, &w, &k, alpha, None, &t) {
            Ok(cert) => {
                let aa = cert.a.adjoint() * &cert.a;
                let om = (w.eval(&aa).re - 1.0).abs();
                let max_k = k.iter().map(|s| evaluate(s, &aa).re).fold(f64::NEG_INFINITY, f64::max);
                worst_omega = worst_omega.max(om);
                min_margin = min_margin.min(1.0 - max_k);
                if om > 1e-9 || op_norm(&cert.a) > 1.0 + alpha || max_k >= 1.0 {
                    fails.push(format!("#{i}: margins"));
                }
            }
            Err(e) => fails.push(format!("#{i}: {e}")),
        }
    }
    (
        fails.is_empty(),
        format!(
            "50 instances: {} failures{}; max |ω(a*a)−1| {worst_omega:.1e} (tol 1e-9), min 1 − max_K ψ(a*a) {min_margin:.2e}",
            fails.len(),
            fails.first().map(|f| format!(" (first {f})")).unwrap_or_default()
        ),
    )
}

fn chain_algebras() -> Vec<(&'static str, OperatorSubspace)> {
    vec![
        ("T2", catalog::upper_triangular(2)),
        ("M2", catalog::full(2)),
        ("D2", catalog::diagonal(2)),
        ("span{I,E12}", catalog::identity_and_nilpotent()),
        ("T3", catalog::upper_triangular(3)),
        ("M3", catalog::full(3)),
        ("D3", catalog::diagonal(3)),
        ("CI+N3", catalog::scalar_plus_strict_upper(3)),
        ("M2+M1", catalog::block_full(&[2, 1])),
        ("T2+M1", catalog::block_upper(&[2, 1])),
    ]
}

struct ChainStats {
    violations: Vec<String>,
    iii_without_i: usize,
    excisions: usize,
    max_excision_residual: f64,
    detected: usize,
    detected_bad: Vec<String>,
    max_boundary_width: f64,
}

/// Chain report plus `(rank, boundary verdict)` when `ω` was detected.
type ChainOutcome = Result<(ChainReport, Option<(usize, BoundaryVerdict)>), String>;

fn chain_run() -> ChainStats {
    let t = tol();
    let algebras: Vec<_> = chain_algebras().into_iter().map(|(name, a)| (name, generate_cstar(&a), a)).collect();
    let alphas = [1.0, 0.5, 0.1];
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4).min(8);
    let results: Vec<Vec<(usize, ChainOutcome)>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|wk| {
                    let algebras = &algebras;
                    let t = &t;
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        for i in (wk..500).step_by(workers) {
                            let mut rng = trial_rng(6, i as u64);
                            let (_, b, a) = &algebras[i % algebras.len()];
                            let n = a.ambient_dim();
                            let w = if rng.gen_bool(1.0 / 3.0) {
                                let e = PureState::basis(n, rng.gen_range(0..n));
                                if is_pure_on(b, &e, 1e-8) {
                                    e
                                } else {
                                    random_pure_on(b, &mut rng)
                                }
                            } else {
                                random_pure_on(b, &mut rng)
                            };
                            let l = support_on(b, &w.density());
                            let k = sample_k(&l, rng.gen_range(1..=8), &mut rng);
                            let alpha = alphas[i % 3];
                            let res = chain_check_in(a, b, &w, &k, alpha, &mut rng, t).and_then(|rep| {
                                let det = detectable_check_in(a, b, &w, 10, &mut rng, t)?;
                                let bd = if det.detected() {
                                    Some((w.density().rank(), boundary_rep_check_in(a, b, &w, t)?))
                                } else {
                                    None
                                };
                                Ok((rep, bd))
                            });
                            out.push((i, res.map_err(|e| e.to_string())));
                        }
                        out
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
    let mut flat: Vec<_> = results.into_iter().flatten().collect();
    flat.sort_by_key(|(i, _)| *i);
    let mut stats = ChainStats {
        violations: vec![],
        iii_without_i: 0,
        excisions: 0,
        max_excision_residual: 0.0,
        detected: 0,
        detected_bad: vec![],
        max_boundary_width: 0.0,
    };
    for (i, res) in flat {
        let name = algebras[i % algebras.len()].0;
        match res {
            Err(e) => stats.violations.push(format!("#{i} {name}: error {e}")),
            Ok((rep, bd)) => {
                for v in rep.violations {
                    stats.violations.push(format!("#{i} {name}: {v}"));
                }
                stats.iii_without_i += rep.iii_without_i as usize;
                if rep.excision {
                    stats.excisions += 1;
                    stats.max_excision_residual = stats.max_excision_residual.max(rep.excision_residual);
                }
                if let Some((rank, v)) = bd {
                    stats.detected += 1;
                    stats.max_boundary_width = stats.max_boundary_width.max(v.width);
                    if rank != 1 || !v.boundary {
                        stats.detected_bad.push(format!("#{i} {name}: rank {rank}, width {:.2e}", v.width));
                    }
                }
            }
        }
    }
    stats
}

/// `w[k][j] ≥ 0` with `Σ_k w[k][j]² = 1` for every coordinate `j`.
fn unit_weights(n: usize, m: usize, rng: &mut Gen) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0f64)).collect();
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / nv).collect()
        })
        .collect();
    (0..m).map(|k| cols.iter().map(|c| c[k]).collect()).collect()
}

fn criterion_8() -> (bool, String) {
    let t = tol();
    let mut tuples: Vec<Vec<CMat>> = vec![vec![diag(&[c(1.0, 0.0), c(0.0, 1.0)])]];
    for i in 0..10 {
        let mut rng = trial_rng(8, i);
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(2..=3);
        let w = unit_weights(n, m, &mut rng);
        tuples.push(
            (0..m)
                .map(|k| {
                    let d: Vec<Complex64> =
                        (0..n).map(|j| Complex64::from_polar(w[k][j], rng.gen_range(0.0..2.0 * PI))).collect();
                    diag(&d)
                })
                .collect(),
        );
    }
    let (mut max_res, mut points, mut fails) = (0.0f64, 0, 0);
    for (i, b) in tuples.iter().enumerate() {
        let mut rng = trial_rng(8, 100 + i as u64);
        match warv_verify(b, 200, &mut rng, &t) {
            Ok(r) => {
                max_res = max_res.max(r.max_residual);
                points += r.points.len();
                fails += (!r.pass(&t) || r.points.is_empty()) as usize;
            }
            Err(_) => fails += 1,
        }
    }
    (
        fails == 0,
        format!("11 tuples, {points} exposed sphere points, max multiplicativity residual {max_res:.2e} (tol 1e-8), {fails} failures"),
    )
}

fn criterion_9() -> (bool, String) {
    let t = tol();
    let mut rng = trial_rng(9, 0);
    let r2 = m23_density_probe(&catalog::upper_triangular(2), 100, &mut rng, &t).unwrap();
    let mut rng = trial_rng(9, 1);
    let r3 = m23_density_probe(&catalog::scalar_plus_strict_upper(3), 100, &mut rng, &t).unwrap();
    let pass = r2.min_ratio >= 1.0 - 1e-6
        && r3.min_ratio >= 1.0 - 1e-4
        && r2.theorem_violations + r3.theorem_violations == 0
        && r3.hypotheses.verified();
    (
        pass,
        format!(
            "T2 min ratio {:.10} (tol 1−1e-6, {} exhausted); CI+N3 min ratio {:.10} (tol 1−1e-4, {} exhausted, max η {:.2}); theorem violations {}",
            r2.min_ratio,
            r2.exhausted,
            r3.min_ratio,
            r3.exhausted,
            r3.max_eta,
            r2.theorem_violations + r3.theorem_violations
        ),
    )
}

fn criterion_10() -> (bool, String) {
    let t = tol();
    let grid = default_t_grid();
    let (mut certified, mut sampled, mut bad, mut other) = (0, 0, 0, 0);
    for i in 0..50 {
        let mut rng = trial_rng(10, i);
        let n = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=3);
        let w = unit_weights(n, m, &mut rng);
        let b: Vec<CMat> = (0..m)
            .map(|k| diag(&(0..n).map(|j| Complex64::from_polar(w[k][j], rng.gen_range(0.0..2.0 * PI))).collect::<Vec<_>>()))
            .collect();
        let a_sp = generate_algebra(&b, n).unwrap();
        let a = a_sp.random_element(&mut rng);
        let a = &a * c(rng.gen_range(0.1..2.0) / op_norm(&a), 0.0);
        for _ in 0..20 {
            let psi = if rng.gen_bool(0.5) {
                DensityState::random(n, &mut rng)
            } else {
                PureState::random(n, &mut rng).density()
            };
            match a_convexity_check(&a_sp, &a, &psi, &grid, &t).unwrap() {
                Convexity::CertifiedConvex { .. } => certified += 1,
                Convexity::SampledConvex { .. } => sampled += 1,
                Convexity::NonConvexWitness { .. } => bad += 1,
                Convexity::Inconclusive { .. } => other += 1,
            }
        }
    }
    (
        bad == 0 && other == 0,
        format!("1000 (element, state) pairs: {certified} certified, {sampled} sampled convex, {bad} non-convex, {other} inconclusive"),
    )
}

fn criterion_12() -> (bool, String) {
    let t = tol();
    let dirs = herm_basis(2);
    let (mut mismatches, mut max_err, mut singletons) = (0, 0.0f64, 0);
    for i in 0..100 {
        let mut rng = trial_rng(12, i);
        let slice = common::random_qubit_slice(&mut rng);
        let oracle = common::bloch_slice(slice.constraints());
        let expected = dirs.iter().map(|d| oracle.width(d)).fold(0.0, f64::max);
        match width(&slice, &dirs, &t) {
            Ok(w) => {
                singletons += w.singleton as usize;
                mismatches += (w.singleton != (expected <= t.width)) as usize;
                max_err = max_err.max((w.width - expected).abs());
            }
            Err(_) => mismatches += 1,
        }
    }
    (
        mismatches == 0 && max_err <= 1e-5,
        format!("100 qubit slices ({singletons} singletons): {mismatches} misclassified, max width error {max_err:.2e} (tol 1e-5)"),
    )
}

fn main() {
    let start = Instant::now();
    let (mut outcomes, chain) = std::thread::scope(|s| {
        let h1 = s.spawn(|| run("1", criterion_1));
        let h2 = s.spawn(|| run("2", criterion_2));
        let h4 = s.spawn(|| run("4", criterion_4));
        let h5 = s.spawn(|| run("5", criterion_5));
        let h8 = s.spawn(|| run("8", criterion_8));
        let h9 = s.spawn(|| run("9", criterion_9));
        let h10 = s.spawn(|| run("10", criterion_10));
        let h12 = s.spawn(|| run("12", criterion_12));
        let o3 = run("3", criterion_3);
        let t6 = Instant::now();
        let chain = chain_run();
        let chain_secs = t6.elapsed().as_secs_f64();
        let outs = vec![
            h1.join().unwrap(),
            h2.join().unwrap(),
            o3,
            h4.join().unwrap(),
            h5.join().unwrap(),
            h8.join().unwrap(),
            h9.join().unwrap(),
            h10.join().unwrap(),
            h12.join().unwrap(),
        ];
        (outs, (chain, chain_secs))
    });
    let (stats, chain_secs) = chain;
    outcomes.push(Outcome {
        id: "6",
        pass: stats.violations.is_empty() && stats.iii_without_i > 0,
        detail: format!(
            "500 instances: {} violations{}; {} with (iii) but not (i)",
            stats.violations.len(),
            stats.violations.first().map(|v| format!(" (first {v})")).unwrap_or_default(),
            stats.iii_without_i
        ),
        secs: chain_secs,
    });
    outcomes.push(Outcome {
        id: "7",
        pass: stats.max_excision_residual <= 1e-12,
        detail: format!(
            "{} excisions, max residual over the basis of B {:.2e} (tol 1e-12)",
            stats.excisions, stats.max_excision_residual
        ),
        secs: 0.0,
    });
    outcomes.push(Outcome {
        id: "11",
        pass: stats.detected_bad.is_empty() && stats.detected > 0,
        detail: format!(
            "{} detected states, {} not rank one or not boundary{}; max Choi width {:.2e} (tol 1e-7)",
            stats.detected,
            stats.detected_bad.len(),
            stats.detected_bad.first().map(|v| format!(" (first {v})")).unwrap_or_default(),
            stats.max_boundary_width
        ),
        secs: 0.0,
    });
    outcomes.sort_by_key(|o| o.id.parse::<u32>().unwrap());
    let mut passed = 0;
    for o in &outcomes {
        passed += o.pass as usize;
        let time = if o.secs > 0.0 { format!(" [{:.1} s]", o.secs) } else { " [in 6]".into() };
        println!("{} criterion {:>2}: {}{}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.detail, time);
    }
    println!("acceptance: {passed}/{} criteria passed in {:.1} s", outcomes.len(), start.elapsed().as_secs_f64());
    if passed != outcomes.len() {
        std::process::exit(1);
    }
}
