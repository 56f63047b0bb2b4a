//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured figure (run with `--nocapture` to see
//! them). Tolerances are pinned here, not configurable.

use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hboltz_core::basis::{a_coeff, hermite_eval, index_set, n_basis, unrank, MultiIndex};
use hboltz_core::kernel::KernelModel;
use hboltz_core::models::{
    bgk_rhs, linearized_operator, quadratic_rhs, spectral_radius, HybridModel,
};
use hboltz_core::quadrature::{adaptive, QuadratureSpec};
use hboltz_core::solver::{
    bkw_coeffs, moments, project_bigaussian, project_discontinuous, rk4_integrate, BkwReference,
};
use hboltz_core::tensor::{assemble, memory_estimate, AssembleOptions, GammaOracle};

fn kernel(eta: f64) -> KernelModel {
    KernelModel::with_default_quadrature(eta).unwrap()
}

fn tensor(eta: f64, m0: u32) -> hboltz_core::tensor::CollisionTensor {
    assemble(&kernel(eta), m0, &AssembleOptions::default()).unwrap()
}

fn hybrid(eta: f64, m0: u32, m: u32) -> HybridModel {
    HybridModel::with_spectral_rate(tensor(eta, m0), m).unwrap()
}

#[test]
fn c01_index_space_arithmetic() {
    assert_eq!(n_basis(20), 1771);
    for m in 0..=40u32 {
        let formula = (m as usize + 1) * (m as usize + 2) * (m as usize + 3) / 6;
        assert_eq!(n_basis(m), formula);
        assert_eq!(
            index_set(m).count(),
            formula,
            "enumeration disagrees at M = {m}"
        );
        // rank/unrank stay bijective on the enumeration
        if m <= 25 {
            for (r, idx) in index_set(m).enumerate() {
                assert_eq!(idx.rank(), r);
                assert_eq!(unrank(r, m).unwrap(), idx);
            }
        }
    }
    println!("ACCEPTANCE 1 PASS: N_20 = 1771 and N_M formula verified for M <= 40");
}

#[test]
fn c02_memory_model_matches_published_table() {
    let published = [
        (5u32, 1.308e-3),
        (10, 0.1743),
        (15, 4.048),
        (20, 41.38),
        (25, 2.620e2),
        (30, 1.210e3),
        (35, 4.473e3),
        (40, 1.400e4),
    ];
    for (m0, gib) in published {
        let ours = memory_estimate(m0) as f64 / (1u64 << 30) as f64;
        let rel = (ours - gib).abs() / gib;
        assert!(
            rel < 5e-3,
            "M0 = {m0}: {ours} GiB vs published {gib} (rel {rel:.2e})"
        );
    }
    assert_eq!(memory_estimate(0), 8);
    println!("ACCEPTANCE 2 PASS: dense memory estimates within 0.5% of the published table");
}

#[test]
fn c03_bkw_end_to_end() {
    let m = 10u32;
    let dt = 0.01;
    let t_end = 1.0;
    let kernel5 = kernel(5.0);
    let reference = BkwReference::from_kernel(&kernel5).unwrap();
    let f400 = MultiIndex::new(4, 0, 0);
    let f220 = MultiIndex::new(2, 2, 0);

    let mut trajectories: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut worst_rel = 0.0f64;
    for m0 in [4u32, 5, 6, 8] {
        let model = hybrid(5.0, m0, m);
        let mut state = bkw_coeffs(0.0, &reference, m).unwrap();
        let mut track = Vec::new();
        rk4_integrate(
            |f| model.rhs(f),
            &mut state,
            dt,
            t_end,
            |t, s| {
                let e = reference.exp_factor(t);
                let exact400 = -e * e / 8.0;
                let exact220 = -e * e / 4.0;
                let v400 = s.coeff(f400);
                let v220 = s.coeff(f220);
                worst_rel = worst_rel
                    .max((v400 - exact400).abs() / exact400.abs())
                    .max((v220 - exact220).abs() / exact220.abs());
                track.push((v400, v220));
                Ok(())
            },
        )
        .unwrap();
        trajectories.push(track);
    }
    assert!(
        worst_rel <= 1e-5,
        "worst relative deviation {worst_rel:.3e} > 1e-5"
    );

    let mut worst_cross = 0.0f64;
    for other in &trajectories[1..] {
        for (a, b) in trajectories[0].iter().zip(other) {
            worst_cross = worst_cross.max((a.0 - b.0).abs()).max((a.1 - b.1).abs());
        }
    }
    assert!(
        worst_cross <= 1e-12,
        "M0 cross-disagreement {worst_cross:.3e} > 1e-12"
    );
    println!(
        "ACCEPTANCE 3 PASS: BKW f400/f220 rel error {worst_rel:.3e} (<= 1e-5), \
         M0-independence {worst_cross:.3e} (<= 1e-12)"
    );
}

#[test]
fn c04_conservation_along_trajectories() {
    let cases: [(f64, &str); 3] = [(5.0, "bkw"), (10.0, "bigaussian"), (3.1, "discontinuous")];
    for (eta, experiment) in cases {
        let m = 10u32;
        let model = hybrid(eta, 4, m);
        let mut state = match experiment {
            "bkw" => bkw_coeffs(0.0, &BkwReference::from_kernel(&kernel(5.0)).unwrap(), m).unwrap(),
            "bigaussian" => project_bigaussian(m).unwrap(),
            _ => project_discontinuous(m, &QuadratureSpec::default()).unwrap(),
        };
        let mut drift = [0.0f64; 3];
        rk4_integrate(
            |f| model.rhs(f),
            &mut state,
            0.01,
            5.0,
            |_, s| {
                let mom = moments(s);
                drift[0] = drift[0].max((mom.rho - 1.0).abs());
                drift[1] = drift[1].max(mom.u.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
                drift[2] = drift[2].max((mom.theta - 1.0).abs());
                Ok(())
            },
        )
        .unwrap();
        for (what, d) in ["rho", "u", "theta"].iter().zip(drift) {
            assert!(
                d <= 1e-10,
                "{experiment} (eta = {eta}): {what} drift {d:.3e} > 1e-10"
            );
        }
        println!(
            "ACCEPTANCE 4 PASS ({experiment}, eta = {eta}): drifts rho {:.1e}, u {:.1e}, theta {:.1e}",
            drift[0], drift[1], drift[2]
        );
    }
}

#[test]
fn c05_gamma_formula_vs_direct_quadrature() {
    for eta in [5.0, 10.0] {
        let model = kernel(eta);
        let oracle = GammaOracle::new(&model).unwrap();
        let triples: Vec<MultiIndex> = index_set(3).collect();
        let formula: Vec<Vec<f64>> = triples
            .iter()
            .map(|&j| {
                triples
                    .iter()
                    .map(|&l| hboltz_core::tensor::gamma_coeff(j, l, &model).unwrap())
                    .collect()
            })
            .collect();
        let scale = formula
            .iter()
            .flatten()
            .fold(0.0f64, |a, &b| a.max(b.abs()));
        let mut worst = 0.0f64;
        for (ji, &j) in triples.iter().enumerate() {
            for (li, &l) in triples.iter().enumerate() {
                let direct = oracle.eval(j, l).unwrap();
                let f = formula[ji][li];
                let err = (direct - f).abs() / f.abs().max(1e-3 * scale);
                worst = worst.max(err);
                assert!(
                    err <= 1e-5,
                    "eta = {eta}, j = {j:?}, l = {l:?}: formula {f:.9e} vs oracle {direct:.9e}"
                );
            }
        }
        println!(
            "ACCEPTANCE 5 PASS (eta = {eta}): all degree <= 3 pairs agree, worst rel {worst:.3e}"
        );
    }
}

#[test]
fn c06_tensor_conservation_identities() {
    for eta in [3.1, 5.0, 10.0] {
        let t = tensor(eta, 6);
        let n = t.n_coeffs();
        let trace_ranks: Vec<u32> = [(2u32, 0u32, 0u32), (0, 2, 0), (0, 0, 2)]
            .iter()
            .map(|&(a, b, c)| MultiIndex::new(a, b, c).rank() as u32)
            .collect();
        let mut energy = vec![0.0f64; n * n];
        let mut worst_low = 0.0f64;
        for e in t.entries() {
            let deg = unrank(e.k as usize, 6).unwrap().degree();
            if deg <= 1 {
                worst_low = worst_low.max(e.value.abs());
            }
            if trace_ranks.contains(&e.k) {
                energy[e.i as usize * n + e.j as usize] += e.value;
            }
        }
        let worst_energy = energy.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!(
            worst_low <= 1e-10,
            "eta = {eta}: mass/momentum row entry {worst_low:.3e}"
        );
        assert!(
            worst_energy <= 1e-10,
            "eta = {eta}: energy trace {worst_energy:.3e}"
        );
        println!(
            "ACCEPTANCE 6 PASS (eta = {eta}): mass/momentum rows {worst_low:.1e}, \
             energy trace {worst_energy:.1e} (<= 1e-10)"
        );
    }
}

#[test]
fn c07_maxwell_sparsity() {
    let t = tensor(5.0, 6);
    let mut worst = 0.0f64;
    for e in t.entries() {
        let dk = unrank(e.k as usize, 6).unwrap().degree();
        let di = unrank(e.i as usize, 6).unwrap().degree();
        let dj = unrank(e.j as usize, 6).unwrap().degree();
        if di + dj != dk {
            worst = worst.max(e.value.abs());
        }
    }
    assert!(worst < 1e-12, "off-pattern entry of magnitude {worst:.3e}");
    println!("ACCEPTANCE 7 PASS: Maxwell off-pattern entries below 1e-12 (worst {worst:.1e})");
}

#[test]
fn c08_radial_closed_form() {
    // K coefficients against brute-force quadrature of the radial
    // integral for all valid indices with k, l <= 6.
    let spec = QuadratureSpec {
        abs_tol: 1e-11,
        rel_tol: 1e-10,
        max_subdivisions: 2000,
    };
    for eta in [5.0, 10.0] {
        let model = kernel(eta);
        let mut checked = 0usize;
        for k in 0..=6u32 {
            for m in 0..=k / 2 {
                let r = k - 2 * m;
                for n in 0..=3u32 {
                    let l = r + 2 * n;
                    if l > 6 {
                        continue;
                    }
                    let closed = model.k_coeff(k, l, m, n).unwrap();
                    let alpha = r as f64 + 0.5;
                    let mu = (eta - 3.0) / (eta - 1.0) + r as f64;
                    let radial = adaptive(
                        &|s: f64| {
                            hboltz_core::basis::laguerre_eval(m, alpha, s).unwrap()
                                * hboltz_core::basis::laguerre_eval(n, alpha, s).unwrap()
                                * s.powf(mu)
                                * (-s).exp()
                        },
                        0.0,
                        80.0,
                        &spec,
                    )
                    .unwrap()
                    .value;
                    let brute = mu.exp2() * model.i_integral(r).unwrap() * radial;
                    // relative 1e-8; absolute floor at the quadrature noise
                    // scale for the exact zeros of the Maxwell case
                    assert!(
                        (closed - brute).abs() <= 1e-8 * brute.abs() + 1e-11,
                        "eta = {eta}, (k,l,m,n) = ({k},{l},{m},{n}): {closed:.12e} vs {brute:.12e}"
                    );
                    checked += 1;
                }
            }
        }
        println!("ACCEPTANCE 8 PASS (eta = {eta}): {checked} radial coefficients at rel 1e-8");
    }
}

#[test]
fn c09_hermite_splitting_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let triples: Vec<MultiIndex> = index_set(6).collect();
    let mut checked = 0usize;
    while checked < 100 {
        let k = triples[rng.gen_range(0..triples.len())];
        let l = triples[rng.gen_range(0..triples.len())];
        if k.degree() + l.degree() > 6 {
            continue;
        }
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let w: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let h_arg: [f64; 3] = std::array::from_fn(|s| (v[s] + w[s]) / 2.0f64.sqrt());
        let g_arg: [f64; 3] = std::array::from_fn(|s| (v[s] - w[s]) / 2.0f64.sqrt());
        let lhs = hermite_eval(k, v) * hermite_eval(l, w);
        let ks = k.components();
        let ls = l.components();
        let mut rhs = 0.0;
        for kp1 in 0..=ks[0] + ls[0] {
            for kp2 in 0..=ks[1] + ls[1] {
                for kp3 in 0..=ks[2] + ls[2] {
                    let kp = [kp1, kp2, kp3];
                    let a: f64 = (0..3)
                        .map(|s| a_coeff(ks[s], ls[s], kp[s], ks[s] + ls[s] - kp[s]).unwrap())
                        .product();
                    if a == 0.0 {
                        continue;
                    }
                    rhs += a
                        * hermite_eval(MultiIndex::new(kp[0], kp[1], kp[2]), h_arg)
                        * hermite_eval(
                            MultiIndex::new(
                                ks[0] + ls[0] - kp[0],
                                ks[1] + ls[1] - kp[1],
                                ks[2] + ls[2] - kp[2],
                            ),
                            g_arg,
                        );
                }
            }
        }
        assert!(
            (lhs - rhs).abs() <= 1e-9,
            "splitting identity violated at k = {k:?}, l = {l:?}: |{lhs} - {rhs}|"
        );
        checked += 1;
    }
    println!("ACCEPTANCE 9 PASS: splitting identity at 100 random points, degrees <= 6, tol 1e-9");
}

#[test]
fn c10_scaling_constant() {
    let ts = kernel(3.1).scaled_time_constant().unwrap();
    assert_abs_diff_eq!(ts, 1.36017, epsilon = 1e-4);
    println!("ACCEPTANCE 10 PASS: tau_s(3.1) = {ts:.6} (1.36017 +- 1e-4)");
}

#[test]
fn c11_discontinuous_stress_shape() {
    let m = 20u32;
    let model = hybrid(10.0, 5, m);
    let mut state = project_discontinuous(m, &QuadratureSpec::default()).unwrap();
    let mut sigma11 = Vec::new();
    let mut sigma22 = Vec::new();
    rk4_integrate(
        |f| model.rhs(f),
        &mut state,
        0.01,
        10.0,
        |_, s| {
            let mom = moments(s);
            sigma11.push(mom.sigma[0]);
            sigma22.push(mom.sigma[3]);
            Ok(())
        },
    )
    .unwrap();
    for (name, track) in [("sigma11", &sigma11), ("sigma22", &sigma22)] {
        assert!(
            track[0].abs() <= 1e-10,
            "{name} does not start at zero: {}",
            track[0]
        );
        let (argmax, peak) = track
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(ai, av), (i, &v)| {
                if v.abs() > av {
                    (i, v.abs())
                } else {
                    (ai, av)
                }
            });
        assert!(peak > 1e-4, "{name} never grows ({peak:.3e})");
        assert!(
            argmax > 0 && argmax < track.len() - 1,
            "{name} extremum not interior (index {argmax} of {})",
            track.len()
        );
        let tail = track.last().unwrap().abs();
        assert!(
            tail < 0.2 * peak,
            "{name} does not decay: final {tail:.3e} vs peak {peak:.3e}"
        );
        println!(
            "ACCEPTANCE 11 PASS: {name} rises from 0 to {peak:.4e} at step {argmax}, \
             decays to {tail:.1e}"
        );
    }
}

#[test]
fn c12_bgk_exponential_decay() {
    let m = 6u32;
    let tau = kernel(5.0).bgk_tau().unwrap();
    let initial = project_discontinuous(m, &QuadratureSpec::default()).unwrap();
    let mut state = initial.clone();
    let mut worst = 0.0f64;
    rk4_integrate(
        |f| Ok(bgk_rhs(tau, f)),
        &mut state,
        0.01,
        1.0,
        |t, s| {
            let decay = (-t / tau).exp();
            for (k, (&now, &start)) in s.coeffs.iter().zip(&initial.coeffs).enumerate() {
                if k == 0 {
                    continue;
                }
                let exact = start * decay;
                if exact.abs() > 1e-10 {
                    worst = worst.max((now - exact).abs() / exact.abs());
                } else {
                    assert!(now.abs() <= 1e-12);
                }
            }
            Ok(())
        },
    )
    .unwrap();
    assert!(
        worst <= 1e-6,
        "worst relative decay error {worst:.3e} > 1e-6"
    );
    println!("ACCEPTANCE 12 PASS: BGK coefficients follow exp(-t/tau), worst rel {worst:.3e}");
}

#[test]
fn c13_rhs_cost_scales_cubically() {
    // loose check: wall time per RHS evaluation divided by N^3 varies by
    // less than a factor of 3 across M0 in {4, 6, 8} for a dense kernel
    let mut normalized = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (m0, reps) in [(4u32, 400usize), (6, 60), (8, 12)] {
        let t = tensor(10.0, m0);
        let n = t.n_coeffs();
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        // warm up
        let mut sink = quadratic_rhs(&t, &f).unwrap()[0];
        let mut samples = Vec::with_capacity(reps);
        for _ in 0..reps {
            let start = std::time::Instant::now();
            sink += quadratic_rhs(&t, &f).unwrap()[0];
            samples.push(start.elapsed().as_secs_f64());
        }
        samples.sort_by(f64::total_cmp);
        let median = samples[reps / 2];
        normalized.push(median / (n as f64).powi(3));
        assert!(sink.is_finite());
    }
    let min = normalized.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = normalized.iter().cloned().fold(0.0f64, f64::max);
    assert!(
        max / min < 3.0,
        "time/N^3 spread {:.2} exceeds factor 3 ({normalized:?})",
        max / min
    );
    println!(
        "ACCEPTANCE 13 PASS: RHS time/N^3 spread factor {:.2} across M0 = 4, 6, 8",
        max / min
    );
}

#[test]
fn c03b_spectral_radius_feeds_hybrid() {
    // the tail rate used by the hybrid runs above: finite and nonnegative
    let t = tensor(5.0, 4);
    let nu = spectral_radius(&linearized_operator(&t)).unwrap();
    assert!(nu.is_finite() && nu >= 0.0);
    println!("PASS: nu_M0(eta = 5, M0 = 4) = {nu:.6}");
}
