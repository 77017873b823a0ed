//! End-to-end acceptance gate. Each numbered check prints one PASS/FAIL
//! line; tolerances are pinned here and nowhere else.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use staticmd_core::axisym::{
    electric_charge, magnetic_charge, monopole_ledger, monopole_limit,
    vector_potential_axisym, AxiPotentialGrid, MonopoleLedger,
};
use staticmd_core::fd::Grid2;
use staticmd_core::fit;
use staticmd_core::quad::gauss_legendre_ab;
use staticmd_core::spherical::{neutrality_flux, solve_spherical, ShootingConfig};
use staticmd_core::spinor::{
    current, dyad_from_angles, null_tetrad, reality_residuals, v_field, PhysicalConstants,
    SpinorPoint, StaticFieldGrid,
};
use staticmd_core::weighted::{
    decay_exponent_fit, multiplication_bound_check, sobolev_inequality_check,
    weighted_lp_norm, ExteriorDomain, RadialField, WeightedNormSpec,
};

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (step * i as f64).exp()).collect()
}

fn gauss_theta(n: usize) -> Vec<f64> {
    gauss_legendre_ab(n, 0.0, PI).0
}

fn report(idx: usize, name: &str, pass: bool, detail: &str) -> bool {
    println!(
        "criterion {idx} [{name}]: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

#[test]
fn acceptance() {
    let mut all = true;

    // Criteria 1-3 share one solve of the unit-parameter profile.
    let t0 = Instant::now();
    let sol = solve_spherical(&ShootingConfig::new(PhysicalConstants::new(1.0, 1.0))).unwrap();

    // 1: phase tail chi - pi ~ c1/r + c3/r^3 on [20, 100].
    let window: Vec<usize> = (0..sol.r.len())
        .filter(|&i| sol.r[i] >= 20.0 && sol.r[i] <= 100.0)
        .collect();
    let y: Vec<f64> = window.iter().map(|&i| sol.chi[i] - PI).collect();
    let inv1: Vec<f64> = window.iter().map(|&i| sol.r[i].powi(-1)).collect();
    let inv3: Vec<f64> = window.iter().map(|&i| sol.r[i].powi(-3)).collect();
    let c = fit::linear_least_squares(&[&inv1, &inv3], &y);
    let c3_target = -1.0 / 168.0;
    let elapsed = t0.elapsed().as_secs_f64();
    let ok = (c[0] + 1.0).abs() <= 0.01
        && (c[1] - c3_target).abs() <= 0.2 * c3_target.abs()
        && elapsed < 10.0;
    all &= report(
        1,
        "phase tail",
        ok,
        &format!("c1={:.5}, c3={:.6}, solve+fit {:.2}s", c[0], c[1], elapsed),
    );

    // 2: potential tail A0 + 1 ~ c2/r^2 + c4/r^4.
    let y: Vec<f64> = window.iter().map(|&i| sol.a0[i] + 1.0).collect();
    let inv2: Vec<f64> = window.iter().map(|&i| sol.r[i].powi(-2)).collect();
    let inv4: Vec<f64> = window.iter().map(|&i| sol.r[i].powi(-4)).collect();
    let c = fit::linear_least_squares(&[&inv2, &inv4], &y);
    let c4_target = -3.0 / 112.0;
    let ok = (c[0] - 1.0).abs() <= 0.02 && (c[1] - c4_target).abs() <= 0.25 * c4_target.abs();
    all &= report(
        2,
        "potential tail",
        ok,
        &format!("c2={:.5}, c4={:.5}", c[0], c[1]),
    );

    // 3: neutrality — enclosed charge decays like 1/r and is already small
    // at r = 100.
    let flux = neutrality_flux(&sol);
    let q100 = {
        let i = flux.r.iter().position(|&r| r >= 100.0).unwrap();
        flux.charge[i]
    };
    let ok = (flux.slope + 1.0).abs() <= 0.2 && q100.abs() < 0.025;
    all &= report(
        3,
        "neutrality",
        ok,
        &format!("slope={:.3}, |Q(100)|={:.4}", flux.slope, q100.abs()),
    );

    // 4: monopole quantization. Assembled potentials of the tau = theta
    // family must carry b = -1/(2e) at every radius; pole-limit families
    // must land on +-1/(2e).
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for e in [1.0, 2.0] {
        let grid = StaticFieldGrid::from_profiles(
            geometric(0.5, 5.0, 24),
            gauss_theta(64),
            PhysicalConstants::new(1.0, e),
            |r, _| 1.0 / (r * r),
            |_, t| t,
            |_, _| PI,
        )
        .unwrap();
        let pot = vector_potential_axisym(&grid).unwrap();
        for &r in &pot.r_nodes.clone() {
            let b = magnetic_charge(&pot, r).unwrap();
            worst = worst.max((b.value() + 1.0 / (2.0 * e)).abs());
        }
    }
    ok &= worst <= 1e-8;

    let radii = geometric(0.01, 1.0, 60);
    let theta = gauss_theta(48);
    let tau_plus = Grid2::from_fn(&radii, &theta, |r, t| t + 0.3 * r * t.sin());
    let lim_plus = monopole_limit(&radii, &theta, &tau_plus, 1.0, 1e-3).unwrap();
    let tau_minus = Grid2::from_fn(&radii, &theta, |r, t| PI - t - 0.3 * r * t.sin());
    let lim_minus = monopole_limit(&radii, &theta, &tau_minus, 1.0, 1e-3).unwrap();
    ok &= lim_plus.verdict.pass && (lim_plus.verdict.b0 + 0.5).abs() <= 1e-3;
    ok &= lim_minus.verdict.pass && (lim_minus.verdict.b0 - 0.5).abs() <= 1e-3;
    all &= report(
        4,
        "monopole quantization",
        ok,
        &format!(
            "max |b + 1/2e| = {worst:.2e}, b0 = {:.5}/{:.5}",
            lim_plus.verdict.b0, lim_minus.verdict.b0
        ),
    );

    // 5: ledger brute force over every sign vector with N <= 12.
    let t5 = Instant::now();
    let mut ok = true;
    for n in 1..=12usize {
        for mask in 0u32..(1 << n) {
            let signs: Vec<i8> = (0..n)
                .map(|k| if mask >> k & 1 == 1 { 1 } else { -1 })
                .collect();
            let sum: i64 = signs.iter().map(|&s| s as i64).sum();
            let rep = monopole_ledger(&MonopoleLedger::new(signs, 1), 1.0);
            ok &= rep.feasible == (sum.abs() <= 1);
            if rep.feasible {
                ok &= rep.b_total == 0.0 || rep.b_total.abs() == 0.5;
            }
        }
    }
    let dt5 = t5.elapsed().as_secs_f64();
    ok &= dt5 < 1.0;
    all &= report(5, "ledger brute force", ok, &format!("{dt5:.3}s"));

    // 6: property suites.
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let tau: f64 = rng.gen_range(-10.0..10.0);
        let eta: f64 = rng.gen_range(-10.0..10.0);
        let chi: f64 = rng.gen_range(-10.0..10.0);
        let magnitude = 10.0f64.powf(rng.gen_range(-6.0..6.0));
        let d = dyad_from_angles(tau, eta);
        ok &= (d.contraction() - 1.0).norm() < 1e-12;
        let t = null_tetrad(&d).unwrap();
        ok &= t.l.minkowski_dot(t.l).abs() < 1e-12
            && t.n.minkowski_dot(t.n).abs() < 1e-12
            && (t.l.minkowski_dot(t.n) - 1.0).abs() < 1e-12
            && t.m.minkowski_dot(&t.m).norm() < 1e-12
            && t.m.t.norm() < 1e-12;
        let p = SpinorPoint {
            magnitude,
            tau,
            chi,
            eta,
        };
        let j = current(&p).unwrap();
        let expect = 2.0 * magnitude * magnitude;
        ok &= (j.minkowski_dot(j) - expect).abs() <= 1e-12 * expect;
        ok &= (v_field(&p).unwrap().norm() - magnitude).abs() <= 1e-12 * magnitude.max(1.0);
    }

    // Reality-residual stencil convergence on an exact family.
    let residual_at = |n: usize| {
        let grid = StaticFieldGrid::from_profiles(
            (0..n).map(|i| 2.0 + 2.0 * i as f64 / (n - 1) as f64).collect(),
            (1..n).map(|j| PI * j as f64 / n as f64).collect(),
            PhysicalConstants::new(1.0, 1.0),
            |r, _| (2.0 / r).exp() / (r * r),
            |_, t| t,
            |r, _| PI - (1.0 / (r * r)).asin(),
        )
        .unwrap();
        let res = reality_residuals(&grid).unwrap();
        res.divergence_max
    };
    let slope = (residual_at(40) / residual_at(80)).log2();
    ok &= (slope - 2.0).abs() <= 0.2;

    // Decay-fit recovery.
    let mesh = geometric(1.0, 100.0, 400);
    for _ in 0..20 {
        let s: f64 = rng.gen_range(-4.0..-0.1);
        let f = RadialField::from_fn(mesh.clone(), |r| 1.7 * r.powf(s));
        ok &= (decay_exponent_fit(&f).unwrap().exponent - s).abs() <= 0.02;
    }

    // Weighted-norm laws over random power-law pairs.
    let domain = ExteriorDomain::new(1.0, 100.0);
    let spec = WeightedNormSpec::lebesgue(2.0, -0.5);
    for _ in 0..100 {
        let (a, b): (f64, f64) = (rng.gen_range(-3.0..-1.0), rng.gen_range(-3.0..-1.0));
        let s: f64 = rng.gen_range(0.1..10.0);
        let f = RadialField::from_fn(mesh.clone(), |t| t.powf(a));
        let g = RadialField::from_fn(mesh.clone(), |t| t.powf(b) * (t.ln()).cos());
        let nf = weighted_lp_norm(&f, &domain, &spec).unwrap().truncated;
        let ng = weighted_lp_norm(&g, &domain, &spec).unwrap().truncated;
        let scaled = RadialField::from_fn(mesh.clone(), |t| s * t.powf(a));
        let ns = weighted_lp_norm(&scaled, &domain, &spec).unwrap().truncated;
        ok &= (ns - s * nf).abs() <= 1e-10 * ns.max(1.0);
        let sum = RadialField {
            r: mesh.clone(),
            values: f
                .values
                .iter()
                .zip(&g.values)
                .map(|(&x, &y)| x + y)
                .collect(),
        };
        let nsum = weighted_lp_norm(&sum, &domain, &spec).unwrap().truncated;
        ok &= nsum <= nf + ng + 1e-10;
        // Weight monotonicity on sigma >= 1.
        let stronger = WeightedNormSpec::lebesgue(2.0, 0.5);
        let nw = weighted_lp_norm(&f, &domain, &stronger).unwrap().truncated;
        ok &= nw <= nf + 1e-12;
    }

    // Sobolev and multiplication ratios stay bounded over random families.
    let mut family = Vec::new();
    for _ in 0..100 {
        let a: f64 = rng.gen_range(-2.0..0.0);
        let c: f64 = rng.gen_range(3.0..30.0);
        let w: f64 = rng.gen_range(2.0..10.0);
        family.push(RadialField::from_fn(mesh.clone(), move |t| {
            t.powf(a) * (-((t - c) / w).powi(2)).exp()
        }));
    }
    let sob_spec = WeightedNormSpec::sobolev(2, 2.0, -1.0);
    let sob_worst = sobolev_inequality_check(&family, &domain, &sob_spec).unwrap();
    ok &= sob_worst.is_finite() && sob_worst < 10.0;
    let mut mult_worst: f64 = 0.0;
    for pair in family.chunks(2) {
        if let [f, g] = pair {
            let ratio =
                multiplication_bound_check(f, g, &domain, (1, -0.9), (1, -1.9), (0, -2.7))
                    .unwrap();
            mult_worst = mult_worst.max(ratio);
        }
    }
    ok &= mult_worst.is_finite() && mult_worst < 10.0;
    all &= report(
        6,
        "property suites",
        ok,
        &format!(
            "residual slope {slope:.2}, sobolev worst {sob_worst:.3}, mult worst {mult_worst:.3}"
        ),
    );

    // 7: flux sign convention — Coulomb potentials report Q = -q.
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let r = geometric(1.0, 1.5, 5000);
    let th = gauss_theta(32);
    for q in [-3.0, -1.0, 0.5, 2.0] {
        let grid = AxiPotentialGrid::from_fn(
            r.clone(),
            th.clone(),
            PhysicalConstants::new(1.0, 1.0),
            move |rr, _| q / rr,
            |_, _| 0.0,
        )
        .unwrap();
        let got = electric_charge(&grid, 1.25).unwrap();
        worst = worst.max((got + q).abs());
    }
    ok &= worst <= 1e-7;
    all &= report(
        7,
        "flux sign convention",
        ok,
        &format!("max |Q + q| = {worst:.2e}"),
    );

    assert!(all, "one or more acceptance criteria failed");
}
