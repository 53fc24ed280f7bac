//! Closed-form threshold constants and numerical audits of the energy-type
//! estimates: L²/μ-norm dissipation, the energy estimate with source, the
//! gradient estimate, and the Caccioppoli-type inequality.

use crate::error::{GrlbError, Result};
use crate::evolution::{fd_evolve, field_norms, solve_harmonic_heat, SpectralField};
use crate::radial::RadialGrid;

/// Data of the minimal threshold a_c with sinh(2 a x^α) ≥ c x for all x > 0.
#[derive(Debug, Clone, Copy)]
pub struct SinhThreshold {
    pub alpha: f64,
    pub c: f64,
    /// Positive root of tanh(t) = α t.
    pub t_alpha: f64,
    /// Minimal admissible a.
    pub a_c: f64,
}

/// Minimal a with sinh(2 a x^α) ≥ c x: t_α solves tanh(t) = αt (safeguarded
/// Newton from t = 2/α) and a_c = (c^α/2) t_α sinh(t_α)^{−α}.
pub fn find_a(alpha: f64, c: f64) -> Result<SinhThreshold> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GrlbError::InvalidParameter("alpha must be in (0,1)".into()));
    }
    if c <= 0.0 {
        return Err(GrlbError::InvalidParameter("c must be positive".into()));
    }
    // tanh(t) - alpha t is positive at the interior maximum t1 and negative
    // for large t, so bracket [t1, hi] and run Newton with bisection fallback.
    let t1 = (1.0 - alpha).sqrt().atanh();
    let g = |t: f64| t.tanh() - alpha * t;
    let dg = |t: f64| 1.0 - t.tanh().powi(2) - alpha;
    let mut lo = t1;
    let mut hi = (2.0 / alpha).max(t1 + 1.0);
    while g(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut t = 2.0 / alpha;
    if t <= lo || t >= hi {
        t = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let gt = g(t);
        if gt > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let step = gt / dg(t);
        let mut next = t - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() < 1e-15 * t {
            t = next;
            break;
        }
        t = next;
    }
    let t_alpha = t;
    let a_c = 0.5 * c.powf(alpha) * t_alpha * t_alpha.sinh().powf(-alpha);
    Ok(SinhThreshold { alpha, c, t_alpha, a_c })
}

impl SinhThreshold {
    /// The touching abscissa x_c with 2 a_c x_c^α = t_α.
    pub fn touching_point(&self) -> f64 {
        (self.t_alpha / (2.0 * self.a_c)).powf(1.0 / self.alpha)
    }
}

/// The four quantities of the hyperbolic bounds coth(x) ≤ 1 + 1/x and
/// sinh(4x)/sinh(2x)² = 2coth(2x) ≤ 2 + 1/x.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicBounds {
    pub coth_x: f64,
    pub coth_bound: f64,
    pub sinh_ratio: f64,
    pub ratio_bound: f64,
}

/// Stable evaluation of coth: 1 + 2/(e^{2x} − 1), exact limit 1 at overflow.
pub fn coth(x: f64) -> f64 {
    1.0 + 2.0 / (2.0 * x).exp_m1()
}

pub fn hyperbolic_bounds(x: f64) -> Result<HyperbolicBounds> {
    if x <= 0.0 {
        return Err(GrlbError::InvalidParameter("x must be positive".into()));
    }
    let out = HyperbolicBounds {
        coth_x: coth(x),
        coth_bound: 1.0 + 1.0 / x,
        // sinh(4x)/sinh(2x)² reduced to 2coth(2x): no overflow past x ≈ 350
        sinh_ratio: 2.0 * coth(2.0 * x),
        ratio_bound: 2.0 + 1.0 / x,
    };
    debug_assert!(out.coth_x <= out.coth_bound * (1.0 + 1e-14));
    debug_assert!(out.sinh_ratio <= out.ratio_bound * (1.0 + 1e-14));
    Ok(out)
}

/// Outcome of one inequality audit: pass means lhs ≤ rhs·(1 + slack).
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub kind: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub slack: f64,
}

fn report(kind: &'static str, lhs: f64, rhs: f64, slack: f64) -> AuditReport {
    AuditReport { kind, lhs, rhs, pass: lhs <= rhs * (1.0 + slack), slack }
}

/// Default quadrature slack accepted by the audits.
pub const AUDIT_SLACK: f64 = 1e-3;

/// Inequality selector with the data each estimate needs. The trajectory
/// kinds run the d = 2, m = 0 finite-difference scheme internally.
pub enum AuditKind<'a> {
    /// ‖y(t)‖² ≤ e^{−2λ(t−s)}‖y(s)‖² with λ the smallest ν in the field.
    DissipL2 { field: &'a SpectralField, s: f64, t: f64 },
    /// ‖y(t)‖²_μ ≤ (1+R²)e^{−2λ(t−s)}‖y(s)‖²_μ.
    DissipMu { field: &'a SpectralField, s: f64, t: f64 },
    /// ∫_Ω |y(T)|² ≤ (3/T)∫_{T/3}^{2T/3}∫|y|² + C_Ω ∫ Θ|F|² with Θ a ramp
    /// reaching 1 at T/3 and C_Ω the squared Poincaré constant of the ball.
    Energy {
        grid: &'a RadialGrid,
        mu: f64,
        y0: &'a [f64],
        source: &'a dyn Fn(f64, f64) -> f64,
        t_horizon: f64,
        dt: f64,
    },
    /// ∫‖∇y(T)‖² ≤ (3/T)∫_{T/3}^{2T/3}∫‖∇y‖² + 2‖ΔV‖∞∫_{T/3}^{2T/3}∫|y|²,
    /// with ΔV = 2dμ² for V = μ²‖x‖².
    Grad {
        grid: &'a RadialGrid,
        mu: f64,
        y0: &'a [f64],
        t_horizon: f64,
        dt: f64,
    },
    /// ∫₀ᵀ∫_O ϑ‖∇y‖² ≤ ‖ϑ‖_{W1,∞}‖χ‖_{W2,∞}∫₀ᵀ∫_ω|y|² with ϑ(t) = (t/T)²
    /// and χ a radial bump, 1 on `inner`, supported in `outer`.
    Caccioppoli {
        grid: &'a RadialGrid,
        mu: f64,
        y0: &'a [f64],
        t_horizon: f64,
        dt: f64,
        inner: (f64, f64),
        outer: (f64, f64),
    },
}

/// Radial derivative of nodal samples on a staggered grid (even symmetry at
/// the axis, Dirichlet zero at R).
fn radial_derivative(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let h = grid.h;
    (0..n)
        .map(|i| {
            let left = if i == 0 { u[0] } else { u[i - 1] };
            let right = if i + 1 == n { 0.0 } else { u[i + 1] };
            (right - left) / (2.0 * h)
        })
        .collect()
}

/// ∫ u² r^{d−1} dr restricted to [r1, r2].
fn band_mass(grid: &RadialGrid, u: &[f64], r1: f64, r2: f64) -> f64 {
    grid.nodes
        .iter()
        .zip(u.iter())
        .zip(grid.weights.iter())
        .filter(|((&r, _), _)| r >= r1 && r <= r2)
        .map(|((_, v), w)| v * v * w)
        .sum()
}

/// Trapezoid rule over equispaced trajectory samples of a scalar functional.
fn time_integral<F: Fn(&(f64, Vec<f64>)) -> f64>(
    traj: &[(f64, Vec<f64>)],
    t_lo: f64,
    t_hi: f64,
    f: F,
) -> f64 {
    let mut acc = 0.0;
    for pair in traj.windows(2) {
        let (t0, t1) = (pair[0].0, pair[1].0);
        if t1 <= t_lo || t0 >= t_hi {
            continue;
        }
        acc += 0.5 * (f(&pair[0]) + f(&pair[1])) * (t1 - t0);
    }
    acc
}

fn check_resolution(t_horizon: f64, dt: f64) -> Result<()> {
    if (t_horizon / dt) < 64.0 {
        return Err(GrlbError::InvalidParameter(
            "trajectory needs at least 64 time samples".into(),
        ));
    }
    Ok(())
}

pub fn inequality_audit(kind: &AuditKind) -> Result<AuditReport> {
    match kind {
        AuditKind::DissipL2 { field, s, t } => {
            if t < s {
                return Err(GrlbError::InvalidParameter("need s <= t".into()));
            }
            let lambda = field
                .modes
                .iter()
                .map(|m| m.eigenvalue())
                .fold(f64::INFINITY, f64::min);
            let ys = solve_harmonic_heat(field, *s)?;
            let yt = solve_harmonic_heat(field, *t)?;
            let lhs = yt.l2_norm().powi(2);
            let rhs = (-2.0 * lambda * (t - s)).exp() * ys.l2_norm().powi(2);
            Ok(report("DISSIP_L2", lhs, rhs, AUDIT_SLACK))
        }
        AuditKind::DissipMu { field, s, t } => {
            if t < s {
                return Err(GrlbError::InvalidParameter("need s <= t".into()));
            }
            let lambda = field
                .modes
                .iter()
                .map(|m| m.eigenvalue())
                .fold(f64::INFINITY, f64::min);
            let ys = solve_harmonic_heat(field, *s)?;
            let yt = solve_harmonic_heat(field, *t)?;
            let lhs = field_norms(&yt)?.mu_norm.powi(2);
            let r2 = field.radius * field.radius;
            let rhs = (1.0 + r2)
                * (-2.0 * lambda * (t - s)).exp()
                * field_norms(&ys)?.mu_norm.powi(2);
            Ok(report("DISSIP_MU", lhs, rhs, AUDIT_SLACK))
        }
        AuditKind::Energy { grid, mu, y0, source, t_horizon, dt } => {
            check_resolution(*t_horizon, *dt)?;
            let t_end = *t_horizon;
            let traj = fd_evolve(grid, *mu, 0, y0, t_end, *dt, Some(source))?;
            let r = grid.radius;
            let last = &traj.last().unwrap().1;
            let lhs = band_mass(grid, last, 0.0, r);
            let mid = time_integral(&traj, t_end / 3.0, 2.0 * t_end / 3.0, |(_, u)| {
                band_mass(grid, u, 0.0, r)
            });
            // C_Omega: squared Poincaré constant = 1 / (lowest Dirichlet
            // eigenvalue of -Δ on the ball)
            let nu1 = crate::radial::ground_eigenvalue(grid.d, r, 0.0, grid)?;
            let theta = |t: f64| (3.0 * t / t_end).min(1.0);
            let src_term = time_integral(&traj, 0.0, t_end, |(t, _)| {
                let fv: Vec<f64> = grid.nodes.iter().map(|&rr| source(*t, rr)).collect();
                theta(*t)
                    * fv.iter()
                        .zip(grid.weights.iter())
                        .map(|(f, w)| f * f * w)
                        .sum::<f64>()
            });
            let rhs = 3.0 / t_end * mid + src_term / nu1;
            Ok(report("ENERGY", lhs, rhs, AUDIT_SLACK))
        }
        AuditKind::Grad { grid, mu, y0, t_horizon, dt } => {
            check_resolution(*t_horizon, *dt)?;
            let t_end = *t_horizon;
            let none: Option<&fn(f64, f64) -> f64> = None;
            let traj = fd_evolve(grid, *mu, 0, y0, t_end, *dt, none)?;
            let r = grid.radius;
            let grad_mass = |u: &[f64]| {
                let du = radial_derivative(grid, u);
                band_mass(grid, &du, 0.0, r)
            };
            let lhs = grad_mass(&traj.last().unwrap().1);
            let mid_grad =
                time_integral(&traj, t_end / 3.0, 2.0 * t_end / 3.0, |(_, u)| grad_mass(u));
            let mid_mass = time_integral(&traj, t_end / 3.0, 2.0 * t_end / 3.0, |(_, u)| {
                band_mass(grid, u, 0.0, r)
            });
            let laplacian_v = 2.0 * grid.d as f64 * mu * mu;
            let rhs = 3.0 / t_end * mid_grad + 2.0 * laplacian_v * mid_mass;
            Ok(report("GRAD", lhs, rhs, AUDIT_SLACK))
        }
        AuditKind::Caccioppoli { grid, mu, y0, t_horizon, dt, inner, outer } => {
            if grid.d != 2 {
                return Err(GrlbError::InvalidParameter(
                    "Caccioppoli audit is d = 2 only".into(),
                ));
            }
            check_resolution(*t_horizon, *dt)?;
            let (a2, b2) = *inner;
            let (a1, b1) = *outer;
            if !(a1 < a2 && a2 < b2 && b2 < b1 && b1 <= grid.radius) {
                return Err(GrlbError::InvalidParameter(
                    "need outer.0 < inner.0 < inner.1 < outer.1 <= R".into(),
                ));
            }
            let t_end = *t_horizon;
            let none: Option<&fn(f64, f64) -> f64> = None;
            let traj = fd_evolve(grid, *mu, 0, y0, t_end, *dt, none)?;
            // radial bump chi: 0 outside (a1, b1), 1 on [a2, b2]
            let chi = |r: f64| {
                if r <= a1 || r >= b1 {
                    0.0
                } else if r < a2 {
                    crate::radial::default_cutoff(0.5 + 0.5 * (r - a1) / (a2 - a1))
                } else if r <= b2 {
                    1.0
                } else {
                    crate::radial::default_cutoff(0.5 + 0.5 * (b1 - r) / (b1 - b2))
                }
            };
            // W-norms by dense sampling; max-of-derivatives convention
            let samples = 4000;
            let mut chi_sup: f64 = 0.0;
            let mut dchi_sup: f64 = 0.0;
            let mut lap_chi_sup: f64 = 0.0;
            let eps = (b1 - a1) / 1e6;
            for i in 0..=samples {
                let r = a1 + (b1 - a1) * i as f64 / samples as f64;
                let c0 = chi(r);
                let dc = (chi(r + eps) - chi(r - eps)) / (2.0 * eps);
                let d2c = (chi(r + eps) - 2.0 * c0 + chi(r - eps)) / (eps * eps);
                let lap = d2c + if r > 0.0 { dc / r } else { 0.0 };
                chi_sup = chi_sup.max(c0.abs());
                dchi_sup = dchi_sup.max(dc.abs());
                lap_chi_sup = lap_chi_sup.max(lap.abs());
            }
            let chi_w2 = chi_sup.max(dchi_sup).max(lap_chi_sup);
            // theta(t) = (t/T)^2 vanishes at 0; W^{1,inf} norm = max(1, 2/T)
            let theta = |t: f64| (t / t_end).powi(2);
            let theta_w1 = 1f64.max(2.0 / t_end);
            let lhs = time_integral(&traj, 0.0, t_end, |(t, u)| {
                let du = radial_derivative(grid, u);
                theta(*t) * band_mass(grid, &du, a2, b2)
            });
            let rhs_mass = time_integral(&traj, 0.0, t_end, |(_, u)| band_mass(grid, u, a1, b1));
            let rhs = theta_w1 * chi_w2 * rhs_mass;
            Ok(report("CACCIOPPOLI", lhs, rhs, AUDIT_SLACK))
        }
    }
}
