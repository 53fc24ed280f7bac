//! Acceptance gate: one test per acceptance criterion, each emitting a single
//! pass/fail line through the harness (`test criterion_XX_... ok`).
//!
//! The criteria exercise the library end to end at desk scale: spectral
//! bounds against Bessel oracles, the minimal-time dichotomy, quasimode lower
//! bounds, spectral-inequality growth, the Carleman audits, the
//! low-frequency/dissipation constant derivation, uniform cost bounds, and
//! the cross-oracle equivalences.

use grlb::carleman::{
    bde_identity_check, canonical_psi, canonical_psi_sup, manufactured_bump, verify_inequality,
    verify_positivity, CarlemanWeights, InequalityVariant, ScalarField,
};
use grlb::estimates::{find_a, hyperbolic_bounds, inequality_audit, AuditKind};
use grlb::evolution::{fd_oracle, relative_gap, solve_harmonic_heat, to_nodal, FieldMode, SpectralField};
use grlb::harmonics::{log_spectral_constant_exact, AngularMode, Parity};
use grlb::lebeau_robbiano::{
    derive_constants, kappa0_search, synthetic_semigroup_check, uniform_cost_bound,
    verify_shift_property, BoundMode, LRParams, Variant,
};
use grlb::linalg;
use grlb::observability::{
    assemble_gramian, brute_force_cost, build_mode_set, cost_sweep_mu, linear_fit,
    min_norm_null_control, observability_cost, quasimode_lower_bound, ObservationRegion, Target,
};
use grlb::radial::{ground_eigenvalue_richardson, solve_modes, GridKind, RadialGrid, RadialProblem};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn grid(n: usize) -> RadialGrid {
    RadialGrid::new(2, 1.0, n, GridKind::Staggered).unwrap()
}

/// J₀ by its power series (converges fast for x < 10) — independent oracle.
fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn bessel_j0_first_zero() -> f64 {
    let (mut a, mut b) = (2.0f64, 3.0f64);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if bessel_j0(a) * bessel_j0(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn criterion_01_ground_state_bounds() {
    // d μ ≤ ν_μ ≤ d μ + κ(μ) with κ decreasing; discretization floor
    // measured at μ = 0 against the Bessel oracle.
    // Richardson extrapolation from n = 2048 removes the O(h²) term, which
    // at μ = 50 already exceeds the μ = 0 floor on the raw grid
    let nu_of = |mu: f64| ground_eigenvalue_richardson(2, 1.0, mu, 2048, GridKind::Staggered).unwrap();
    let j01 = bessel_j0_first_zero();
    // discretization floor measured on the raw n = 2048 grid at μ = 0
    let g2048 = RadialGrid::new(2, 1.0, 2048, GridKind::Staggered).unwrap();
    let nu0_raw = grlb::radial::ground_eigenvalue(2, 1.0, 0.0, &g2048).unwrap();
    let eps_disc = (nu0_raw - j01 * j01).abs();
    assert!(eps_disc <= 1e-4, "discretization floor {eps_disc}");
    let mut kappas = Vec::new();
    for mu in [1.0, 10.0, 50.0, 100.0] {
        let nu = nu_of(mu);
        let gap = nu - 2.0 * mu;
        assert!(gap >= -eps_disc, "mu={mu}: nu - 2mu = {gap}");
        kappas.push(gap.max(0.0));
    }
    for w in kappas.windows(2) {
        assert!(w[1] <= w[0] + eps_disc, "kappa not decreasing: {kappas:?}");
    }
    assert!(
        *kappas.last().unwrap() <= 1e-3 + eps_disc,
        "kappa(100) = {}",
        kappas.last().unwrap()
    );
    println!("criterion 1 (ground-state bounds): PASS, eps_disc = {eps_disc:.2e}, kappa = {kappas:?}");
}

#[test]
fn criterion_02_spectral_gap() {
    // second eigenvalue over all modes: nu2 - 2mu >= 2mu (1 - 1e-2)
    let g = RadialGrid::new(2, 1.0, 2048, GridKind::Staggered).unwrap();
    for mu in [1.0, 10.0, 50.0, 100.0] {
        let nu_max = 6.0 * mu + 40.0;
        let modes = build_mode_set(2, 1.0, mu, nu_max, &g).unwrap();
        assert!(modes.len() >= 2, "mu={mu}: need at least two modes");
        let nu2 = modes[1].eigenvalue();
        assert!(
            nu2 - 2.0 * mu >= 2.0 * mu * (1.0 - 1e-2),
            "mu={mu}: nu2 = {nu2}"
        );
    }
    println!("criterion 2 (spectral gap): PASS");
}

#[test]
fn criterion_03_minimal_time_dichotomy() {
    // full annulus (0.5, 0.8), T* = 0.0625. Below T* the log-cost grows in μ
    // with slope 0.25 − 4T; above T* the cost over all fibers stabilizes.
    let g = grid(384);
    let region = ObservationRegion::FullAnnulus { r1: 0.5, r2: 0.8 };
    let mus: Vec<f64> = (0..6).map(|i| 50.0 + 30.0 * i as f64).collect(); // 50..200
    let truncations = [40.0, 80.0];

    let below = cost_sweep_mu(&g, &region, 0.04, &mus, &truncations, Target::L2).unwrap();
    let target = 0.25 - 4.0 * 0.04; // 0.09
    assert!(
        (below.slope - target).abs() <= 0.2 * target,
        "T=0.04 slope {} vs {target}",
        below.slope
    );

    let above = cost_sweep_mu(&g, &region, 0.12, &mus, &truncations, Target::L2).unwrap();
    let conv: Vec<&_> = above.points.iter().filter(|p| p.converged).collect();
    assert!(conv.len() >= 4, "not enough converged points above T*");
    // cumulative (running max over fibers) varies < 10% across the ladder
    let first = above.cumulative.first().unwrap().1;
    let last = above.cumulative.last().unwrap().1;
    assert!(
        (last - first) / first < 0.10,
        "T=0.12 cumulative cost varies {first} -> {last}"
    );
    println!(
        "criterion 3 (minimal-time dichotomy): PASS, slope(T=0.04) = {:.4}, cumulative drift {:.2}%",
        below.slope,
        100.0 * (last - first) / first
    );
}

#[test]
fn criterion_04_quasimode_lower_bound() {
    // certified lower-bound log-slope vs mu matches r² − 2dT within 10%
    let g = grid(512);
    let region = ObservationRegion::FullAnnulus { r1: 0.5, r2: 0.8 };
    let mus: Vec<f64> = (0..9).map(|i| 100.0 + 25.0 * i as f64).collect(); // 100..300
    for t in [0.02, 0.04] {
        let (_, slope) = quasimode_lower_bound(&g, &mus, t, &region).unwrap();
        let target = 0.25 - 4.0 * t;
        assert!(
            (slope - target).abs() <= 0.10 * target,
            "T={t}: slope {slope} vs {target}"
        );
    }
    println!("criterion 4 (quasimode lower bound): PASS");
}

#[test]
fn criterion_05_spectral_inequality_growth() {
    // arc of length π/4 on the circle: log C(M) is linear in M for M = 2..24
    let ms: Vec<f64> = (2..=24).map(|m| m as f64).collect();
    let logs: Vec<f64> = (2..=24)
        .map(|m| log_spectral_constant_exact(1, m).unwrap())
        .collect();
    let (slope, _, r2) = linear_fit(&ms, &logs);
    assert!(slope > 0.0, "slope {slope}");
    assert!(r2 >= 0.99, "R² = {r2}");
    println!(
        "criterion 5 (spectral inequality growth): PASS, slope = {slope:.3}, R² = {r2:.5}, ln C(24) = {:.1}",
        logs.last().unwrap()
    );
}

/// Empirically determined thresholds for the canonical weight family,
/// reported with the criterion output.
const LAMBDA0_HAT: f64 = 20.0;
const S0_HAT: f64 = 2.0;
const C_HAT: f64 = 1.0e4;

#[test]
fn criterion_06_carleman_audits() {
    // (a) pointwise positivity for the canonical ψ = ½‖x − 2Re‖² on B₁
    let t_horizon = 1.0;
    let mut xs = Vec::new();
    let n_sp = 48;
    for i in 0..n_sp {
        for j in 0..n_sp {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / n_sp as f64;
            let y = -1.0 + 2.0 * (j as f64 + 0.5) / n_sp as f64;
            if x * x + y * y < 1.0 {
                xs.push(vec![x, y]);
            }
        }
    }
    let ts: Vec<f64> = (1..48).map(|i| t_horizon * i as f64 / 48.0).collect();
    for lambda in [LAMBDA0_HAT, 2.0 * LAMBDA0_HAT] {
        let psi = canonical_psi(2, 1.0, 1.0);
        let w = CarlemanWeights::new(
            t_horizon,
            lambda,
            10.0 * (1.0 + 1.0 / t_horizon),
            psi,
            canonical_psi_sup(1.0, 1.0),
        )
        .unwrap();
        let rep = verify_positivity(&w, &xs, &ts, 1e-9).unwrap();
        assert!(
            rep.pass,
            "positivity at lambda {lambda}: G2 {} H {}",
            rep.min_g2_normalized, rep.min_h_normalized
        );
    }

    // (b) weighted inequality for the manufactured family at s ≥ (1+1/T+μ)ŝ₀
    for mu in [0.0, 2.0, 10.0] {
        for t in [0.1, 1.0] {
            let amp = 0.01;
            let psi = canonical_psi(2, 1.0, amp);
            let s = S0_HAT * (1.0 + 1.0 / t + mu);
            let w =
                CarlemanWeights::new(t, 2.0, s, psi, canonical_psi_sup(1.0, amp)).unwrap();
            let y = manufactured_bump(t, 1.0);
            let m2 = mu * mu;
            let v = ScalarField {
                dim: 2,
                value: Box::new(move |x: &[f64]| m2 * (x[0] * x[0] + x[1] * x[1])),
                gradient: Box::new(move |x: &[f64]| vec![2.0 * m2 * x[0], 2.0 * m2 * x[1]]),
                hessian: Box::new(move |_| vec![2.0 * m2, 0.0, 0.0, 2.0 * m2]),
            };
            let rep =
                verify_inequality(&y, &v, &w, 1.0, InequalityVariant::Generic, C_HAT).unwrap();
            assert!(
                rep.ratio <= 1.0,
                "mu={mu}, T={t}: ratio {} (needs c = {:.3e})",
                rep.ratio,
                rep.c_needed
            );
        }
    }

    // (c) energy inequality for the conjugated equation on eigenmode-built w
    for (mu, d) in [(1.0, 2u32), (5.0, 2), (1.0, 3)] {
        let y = move |rho: f64| (1.0 - rho * rho) * (-mu * rho * rho / 2.0).exp();
        let rep = bde_identity_check(&y, mu, d, 1.0, 0.5).unwrap();
        assert!(rep.pass, "mu={mu}, d={d}: lhs {} rhs {}", rep.lhs, rep.rhs_source + rep.rhs_boundary);
    }
    println!(
        "criterion 6 (Carleman audits): PASS at lambda0 = {LAMBDA0_HAT}, s0 = {S0_HAT}, c = {C_HAT:.0e}"
    );
}

#[test]
fn criterion_07_low_frequency_iteration_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(271828);
    let mut last_constants = None;
    for trial in 0..100 {
        let a = rng.gen_range(0.2..3.0);
        let b = rng.gen_range(0.2..3.0);
        let c = rng.gen_range(0.2..3.0);
        let beta = rng.gen_range(0.6..3.0);
        let variant = if trial % 2 == 0 { Variant::Proof } else { Variant::Statement };
        let kappa = rng.gen_range(0.05..0.95) * kappa0_search(a, b, c, beta, variant);
        let params = LRParams::new(
            a,
            b,
            c,
            beta,
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.5..5.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            kappa,
            variant,
        )
        .unwrap();
        let constants = derive_constants(&params).unwrap();
        let rep = verify_shift_property(&constants);
        assert!(
            rep.pass,
            "trial {trial}: shift violated at {:?} (kappa {kappa})",
            rep.first_violation
        );
        last_constants = Some(constants);
    }
    // zero implication violations on random diagonal systems of size ≤ 32
    let constants = last_constants.unwrap();
    let mut total_violations = 0;
    let mut total_samples = 0;
    for _ in 0..20 {
        let n = rng.gen_range(2..=32usize);
        let spectrum: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..50.0)).collect();
        let rows = rng.gen_range(1..=n);
        let b: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let ys: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let ts = vec![0.3 * constants.t_prime, 0.7 * constants.t_prime, constants.t_prime];
        let rep = synthetic_semigroup_check(&spectrum, &b, &constants, &ys, &ts).unwrap();
        total_violations += rep.violations;
        total_samples += rep.samples;
    }
    assert_eq!(total_violations, 0, "implication violations detected");
    println!(
        "criterion 7 (iteration consistency): PASS, 100 param sets + {total_samples} semigroup samples, 0 violations"
    );
}

#[test]
fn criterion_08_uniform_bound_composition() {
    for (mode, radius) in [(BoundMode::Internal, 0.5), (BoundMode::Boundary, 1.0)] {
        let t_star = radius * radius / 4.0; // d = 2
        let mut prev = 0.0;
        let mut margins = Vec::with_capacity(100);
        for k in 1..=100 {
            let t = t_star * (1.0 + k as f64 / 100.0);
            let ub = uniform_cost_bound(t, t_star, radius, mode, 2.0).unwrap();
            assert!(ub.margin > 0.0, "k={k}: margin {}", ub.margin);
            assert!(ub.margin >= prev, "margin not monotone at k={k}");
            prev = ub.margin;
            margins.push(ub.margin);
        }
        // margin vanishes at the critical time
        let near = uniform_cost_bound(t_star * (1.0 + 1e-9), t_star, radius, mode, 2.0).unwrap();
        assert!(near.margin < 1e-6 * margins.last().unwrap());
    }
    println!("criterion 8 (uniform bound composition): PASS");
}

#[test]
fn criterion_09_oracle_equivalences() {
    // (a) spectral evolution vs Crank–Nicolson to 1e-3 relative L²
    let g = Arc::new(RadialGrid::new(2, 1.0, 1024, GridKind::Staggered).unwrap());
    let mu = 5.0;
    let mut modes = Vec::new();
    let mut coeffs = Vec::new();
    for (m, c) in [(0u32, 0.8), (1, -0.5), (2, 0.3)] {
        let problem = RadialProblem::new(2, 1.0, mu, m).unwrap();
        for (k, r) in solve_modes(&problem, &g, 2).unwrap().into_iter().enumerate() {
            let angular = if m == 0 {
                AngularMode { d: 2, m: 0, order: 0, parity: Parity::Zonal }
            } else {
                AngularMode { d: 2, m, order: m, parity: Parity::Cos }
            };
            modes.push(FieldMode { angular, radial: r });
            coeffs.push(c / (k as f64 + 1.0));
        }
    }
    let field = SpectralField::new(2, 1.0, mu, g.clone(), modes, coeffs).unwrap();
    let t = 0.1;
    let exact = solve_harmonic_heat(&field, t).unwrap();
    let fd = fd_oracle(&to_nodal(&field, 2.5e-4), t).unwrap();
    let gap = relative_gap(&exact, &fd);
    assert!(gap <= 1e-3, "evolution oracle gap {gap}");

    // (b) pencil vs dense random search within 1% on ≤ 8 modes
    let g = grid(256);
    let modes = build_mode_set(2, 1.0, 1.0, 22.0, &g).unwrap();
    let modes = &modes[..modes.len().min(8)];
    let region = ObservationRegion::FullAnnulus { r1: 0.5, r2: 0.8 };
    let sys = assemble_gramian(&g, modes, &region, 0.2, 1.0, Target::L2).unwrap();
    let k2 = observability_cost(&sys);
    let brute = brute_force_cost(&sys, 20_000, 7);
    assert!(brute <= k2 * (1.0 + 1e-9) && brute >= 0.99 * k2, "brute {brute} vs {k2}");

    // (c) null-control duality gap ≤ 1e-6
    let modes = build_mode_set(2, 1.0, 1.0, 25.0, &g).unwrap();
    let sys = assemble_gramian(&g, &modes, &region, 0.5, 1.0, Target::L2).unwrap();
    let n = modes.len();
    let mut e = linalg::SymMatrix::zeros(n);
    for (i, &v) in sys.e_diag.iter().enumerate() {
        e.set(i, i, v);
    }
    let (lam, v) = linalg::pencil_largest(&e, &sys.g).unwrap();
    let k = lam.max(0.0).sqrt();
    let y0: Vec<f64> = sys
        .modes
        .iter()
        .zip(v.iter())
        .map(|(fm, vi)| vi * (fm.eigenvalue() * sys.t).exp())
        .collect();
    let nrm = y0.iter().map(|x| x * x).sum::<f64>().sqrt();
    let y0: Vec<f64> = y0.iter().map(|x| x / nrm).collect();
    let ctrl = min_norm_null_control(&sys, &y0).unwrap();
    assert!(ctrl.residual < 1e-8, "residual {}", ctrl.residual);
    let gap = (ctrl.cost - k).abs() / k;
    assert!(gap <= 1e-6, "duality gap {gap}");
    println!("criterion 9 (oracle equivalences): PASS, evolution gap {gap:.2e}");
}

#[test]
fn criterion_10_appendix_audits() {
    // (a) every inequality audit kind on a regression trajectory
    let g = Arc::new(grid(256));
    let mu = 3.0;
    let problem = RadialProblem::new(2, 1.0, mu, 0).unwrap();
    let rmodes = solve_modes(&problem, &g, 3).unwrap();
    let modes: Vec<FieldMode> = rmodes
        .into_iter()
        .map(|r| FieldMode {
            angular: AngularMode { d: 2, m: 0, order: 0, parity: Parity::Zonal },
            radial: r,
        })
        .collect();
    let coeffs = vec![1.0, -0.4, 0.2];
    let field = SpectralField::new(2, 1.0, mu, g.clone(), modes, coeffs).unwrap();
    // nodal initial data for the trajectory kinds
    let y0: Vec<f64> = {
        let mut v = vec![0.0; g.n()];
        for (fm, c) in field.modes.iter().zip(field.coeffs.iter()) {
            for (vi, p) in v.iter_mut().zip(fm.radial.profile.iter()) {
                *vi += c * p;
            }
        }
        v
    };
    let source = |_t: f64, r: f64| 0.1 * (1.0 - r * r);
    let kinds: Vec<AuditKind> = vec![
        AuditKind::DissipL2 { field: &field, s: 0.05, t: 0.2 },
        AuditKind::DissipMu { field: &field, s: 0.05, t: 0.2 },
        AuditKind::Energy { grid: &g, mu, y0: &y0, source: &source, t_horizon: 0.3, dt: 1e-3 },
        AuditKind::Grad { grid: &g, mu, y0: &y0, t_horizon: 0.3, dt: 1e-3 },
        AuditKind::Caccioppoli {
            grid: &g,
            mu,
            y0: &y0,
            t_horizon: 0.3,
            dt: 1e-3,
            inner: (0.55, 0.75),
            outer: (0.45, 0.85),
        },
    ];
    for kind in &kinds {
        let rep = inequality_audit(kind).unwrap();
        assert!(rep.pass, "{}: lhs {} rhs {}", rep.kind, rep.lhs, rep.rhs);
    }

    // (b) find_a thresholds are minimal: 1% reduction breaks the bound
    for (alpha, c) in [(0.3, 1.0), (0.5, 2.0), (0.7, 5.0)] {
        let th = find_a(alpha, c).unwrap();
        let holds = |a: f64| {
            (0..2000).all(|i| {
                let x = 1e-3 * (1e6f64).powf(i as f64 / 1999.0); // 1e-3 .. 1e3
                (2.0 * a * x.powf(alpha)).sinh() >= c * x * (1.0 - 1e-12)
            })
        };
        assert!(holds(th.a_c), "a_c fails for alpha={alpha}, c={c}");
        assert!(!holds(0.99 * th.a_c), "a_c not minimal for alpha={alpha}, c={c}");
    }

    // (c) hyperbolic bounds across the stated range
    for i in 0..3000 {
        let x = 1e-3 * (350.0f64 / 1e-3).powf(i as f64 / 2999.0);
        let hb = hyperbolic_bounds(x).unwrap();
        assert!(hb.coth_x <= hb.coth_bound * (1.0 + 1e-14), "x={x}");
        assert!(hb.sinh_ratio <= hb.ratio_bound * (1.0 + 1e-14), "x={x}");
    }
    println!("criterion 10 (appendix audits): PASS");
}
