//! Observation Gramians over truncated eigenmode sets, observability costs
//! via the final-energy/Gramian pencil, minimal-norm null controls by
//! duality, cost sweeps in μ and T exhibiting the minimal time, and the
//! quasimode lower bound.

use crate::error::{GrlbError, Result};
use crate::evolution::FieldMode;
use crate::harmonics::{angular_mass, AngularMode, AngularRegion, Parity};
use crate::linalg::{self, SymMatrix};
use crate::radial::{assemble, solve_modes, RadialGrid, RadialProblem};

/// Where the solution is observed.
#[derive(Debug, Clone, PartialEq)]
pub enum ObservationRegion {
    /// {rθ : R₁ < r < R₂, θ ∈ Γ}.
    AnnularSector { r1: f64, r2: f64, gamma: AngularRegion },
    FullAnnulus { r1: f64, r2: f64 },
    /// Normal-derivative observation on {Rθ : θ ∈ Γ}.
    BoundaryArc { gamma: AngularRegion },
    FullBoundary,
    WholeBall,
}

impl ObservationRegion {
    pub fn is_boundary(&self) -> bool {
        matches!(
            self,
            ObservationRegion::BoundaryArc { .. } | ObservationRegion::FullBoundary
        )
    }

    pub fn validate(&self, radius: f64) -> Result<()> {
        match self {
            ObservationRegion::AnnularSector { r1, r2, gamma } => {
                if !(0.0 < *r1 && r1 < r2 && *r2 <= radius) {
                    return Err(GrlbError::InvalidParameter(format!(
                        "need 0 < R1 < R2 <= R, got ({r1}, {r2}, {radius})"
                    )));
                }
                if gamma.measure() <= 0.0 {
                    return Err(GrlbError::InvalidParameter("empty angular region".into()));
                }
                Ok(())
            }
            ObservationRegion::FullAnnulus { r1, r2 } => {
                if !(0.0 < *r1 && r1 < r2 && *r2 <= radius) {
                    return Err(GrlbError::InvalidParameter(format!(
                        "need 0 < R1 < R2 <= R, got ({r1}, {r2}, {radius})"
                    )));
                }
                Ok(())
            }
            ObservationRegion::BoundaryArc { gamma } => {
                if gamma.measure() <= 0.0 {
                    return Err(GrlbError::InvalidParameter("empty angular region".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Norm in which the final state is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    L2,
    MuNorm,
}

/// Angular basis members at degree m (the full eigenspace).
fn angular_members(d: u32, m: u32) -> Vec<AngularMode> {
    if m == 0 {
        return vec![AngularMode { d, m: 0, order: 0, parity: Parity::Zonal }];
    }
    match d {
        2 => vec![
            AngularMode { d, m, order: m, parity: Parity::Cos },
            AngularMode { d, m, order: m, parity: Parity::Sin },
        ],
        3 => {
            let mut v = vec![AngularMode { d, m, order: 0, parity: Parity::Zonal }];
            for l in 1..=m {
                v.push(AngularMode { d, m, order: l, parity: Parity::Cos });
                v.push(AngularMode { d, m, order: l, parity: Parity::Sin });
            }
            v
        }
        _ => unreachable!(),
    }
}

/// All modes (m, l, k) with ν ≤ nu_max, each angular eigenspace fully
/// included, sorted by eigenvalue.
pub fn build_mode_set(
    d: u32,
    radius: f64,
    mu: f64,
    nu_max: f64,
    grid: &RadialGrid,
) -> Result<Vec<FieldMode>> {
    if nu_max <= d as f64 * mu {
        return Err(GrlbError::InvalidParameter(format!(
            "nu_max = {nu_max} must exceed d mu = {}",
            d as f64 * mu
        )));
    }
    let mut out: Vec<FieldMode> = Vec::new();
    for m in 0u32.. {
        let problem = RadialProblem::new(d, radius, mu, m)?;
        let op = assemble(&problem, grid);
        let count = linalg::sturm_count(&op.diag, &op.off, nu_max);
        if count == 0 {
            // eigenvalues increase with m, so no higher degree contributes
            break;
        }
        let radial_modes = solve_modes(&problem, grid, count)?;
        for rm in radial_modes {
            if rm.eigenvalue > nu_max {
                continue;
            }
            for am in angular_members(d, m) {
                out.push(FieldMode { angular: am, radial: rm.clone() });
            }
        }
    }
    if out.is_empty() {
        return Err(GrlbError::InvalidParameter(format!(
            "no eigenvalue below nu_max = {nu_max}"
        )));
    }
    out.sort_by(|a, b| a.eigenvalue().partial_cmp(&b.eigenvalue()).unwrap());
    Ok(out)
}

/// ∫_{r1}^{r2} f g r^{d−1} dr on the grid's native quadrature.
fn radial_band_product(grid: &RadialGrid, f: &[f64], g: &[f64], r1: f64, r2: f64) -> f64 {
    grid.nodes
        .iter()
        .zip(f.iter().zip(g.iter()))
        .zip(grid.weights.iter())
        .filter(|((&r, _), _)| r >= r1 && r <= r2)
        .map(|((_, (a, b)), w)| a * b * w)
        .sum()
}

/// ⟨Bϖ_j, Bϖ_k⟩ for the region's observation operator.
fn b_product(
    grid: &RadialGrid,
    region: &ObservationRegion,
    j: &FieldMode,
    k: &FieldMode,
    radius: f64,
    d: u32,
) -> f64 {
    let full = AngularRegion::full_sphere(d);
    match region {
        ObservationRegion::AnnularSector { r1, r2, gamma } => {
            radial_band_product(grid, &j.radial.profile, &k.radial.profile, *r1, *r2)
                * angular_mass(gamma, &j.angular, &k.angular)
        }
        ObservationRegion::FullAnnulus { r1, r2 } => {
            radial_band_product(grid, &j.radial.profile, &k.radial.profile, *r1, *r2)
                * angular_mass(&full, &j.angular, &k.angular)
        }
        ObservationRegion::WholeBall => {
            radial_band_product(grid, &j.radial.profile, &k.radial.profile, 0.0, radius)
                * angular_mass(&full, &j.angular, &k.angular)
        }
        ObservationRegion::BoundaryArc { gamma } => {
            j.radial.boundary_slope
                * k.radial.boundary_slope
                * radius.powi(d as i32 - 1)
                * angular_mass(gamma, &j.angular, &k.angular)
        }
        ObservationRegion::FullBoundary => {
            j.radial.boundary_slope
                * k.radial.boundary_slope
                * radius.powi(d as i32 - 1)
                * angular_mass(&full, &j.angular, &k.angular)
        }
    }
}

/// Observation Gramian and final-energy matrix on a truncated mode set.
#[derive(Debug, Clone)]
pub struct GramianSystem {
    pub modes: Vec<FieldMode>,
    pub t: f64,
    pub mu: f64,
    pub target: Target,
    /// G_{jk} = ⟨Bϖ_j, Bϖ_k⟩ (1 − e^{−(ν_j+ν_k)T})/(ν_j+ν_k).
    pub g: SymMatrix,
    /// Diagonal of E: e^{−2νT} (L2) or the μ-norm weight of the eigenmode.
    pub e_diag: Vec<f64>,
}

pub fn assemble_gramian(
    grid: &RadialGrid,
    modes: &[FieldMode],
    region: &ObservationRegion,
    t: f64,
    mu: f64,
    target: Target,
) -> Result<GramianSystem> {
    let d = grid.d;
    let radius = grid.radius;
    region.validate(radius)?;
    if region.is_boundary() && target != Target::MuNorm {
        return Err(GrlbError::InvalidParameter(
            "boundary observation requires the MU_NORM target".into(),
        ));
    }
    if t <= 0.0 {
        return Err(GrlbError::InvalidParameter("T must be positive".into()));
    }
    let n = modes.len();
    let mut g = SymMatrix::zeros(n);
    for j in 0..n {
        for k in j..n {
            let b = b_product(grid, region, &modes[j], &modes[k], radius, d);
            let nu_sum = modes[j].eigenvalue() + modes[k].eigenvalue();
            g.set(j, k, b * (-(-nu_sum * t).exp_m1()) / nu_sum);
        }
    }
    let e_diag: Vec<f64> = modes
        .iter()
        .map(|fm| {
            let nu = fm.eigenvalue();
            let decay = (-2.0 * nu * t).exp();
            match target {
                Target::L2 => decay,
                Target::MuNorm => {
                    // μ-norm² of a unit eigenmode: ‖∇ϖ‖² + μ²‖ϖ‖²
                    // = (ν − μ² ∫‖x‖²ϖ²) + μ²
                    let x2: f64 = grid
                        .nodes
                        .iter()
                        .zip(fm.radial.profile.iter())
                        .zip(grid.weights.iter())
                        .map(|((r, f), w)| r * r * f * f * w)
                        .sum();
                    decay * ((nu - mu * mu * x2) + mu * mu)
                }
            }
        })
        .collect();
    Ok(GramianSystem { modes: modes.to_vec(), t, mu, target, g, e_diag })
}

fn e_matrix(system: &GramianSystem) -> SymMatrix {
    let n = system.e_diag.len();
    let mut e = SymMatrix::zeros(n);
    for (i, &v) in system.e_diag.iter().enumerate() {
        e.set(i, i, v);
    }
    e
}

/// K_T on the truncated subspace: the largest generalized eigenvalue of the
/// (E, G) pencil, i.e. the constant in ‖y(T)‖²_E ≤ K_T ∫₀ᵀ‖By‖². The
/// minimal-norm control cost is its square root. Singular G reports +∞.
pub fn observability_cost(system: &GramianSystem) -> f64 {
    let e = e_matrix(system);
    match linalg::pencil_largest(&e, &system.g) {
        Ok((lambda, _)) => lambda.max(0.0),
        Err(_) => f64::INFINITY,
    }
}

/// Minimal-norm null control of the truncated system.
#[derive(Debug, Clone)]
pub struct NullControl {
    /// Coefficient vector q: the control is u(t) = Σ_k q_k B e^{−ν_k(T−t)}ϖ_k.
    pub q: Vec<f64>,
    /// L²(0,T; U) norm of the control.
    pub cost: f64,
    /// Norm of the controlled final state (should vanish).
    pub residual: f64,
}

/// Solve the moment system G q = −(e^{−νT} ∘ y0); cost² = qᵀGq.
pub fn min_norm_null_control(system: &GramianSystem, y0: &[f64]) -> Result<NullControl> {
    let n = system.modes.len();
    if y0.len() != n {
        return Err(GrlbError::InvalidParameter("y0 length mismatch".into()));
    }
    let free_final: Vec<f64> = system
        .modes
        .iter()
        .zip(y0.iter())
        .map(|(fm, c)| (-fm.eigenvalue() * system.t).exp() * c)
        .collect();
    let l = linalg::cholesky(&system.g).map_err(|_| {
        GrlbError::LinearSolveFailure("Gramian singular: no control on the truncated set".into())
    })?;
    let rhs: Vec<f64> = free_final.iter().map(|v| -v).collect();
    let q = linalg::cholesky_solve(&l, &rhs);
    // cost² = qᵀ G q
    let mut cost_sq = 0.0;
    let mut residual_sq = 0.0;
    for j in 0..n {
        let mut gq = 0.0;
        for k in 0..n {
            gq += system.g.get(j, k) * q[k];
        }
        cost_sq += q[j] * gq;
        // controlled final coefficient: e^{−νT}y0 + (Gq)_j
        let fin = free_final[j] + gq;
        residual_sq += fin * fin;
    }
    Ok(NullControl {
        q,
        cost: cost_sq.max(0.0).sqrt(),
        residual: residual_sq.sqrt(),
    })
}

/// Dense random-search estimate of sup ‖y(T)‖²_E / ∫₀ᵀ‖By‖²: Rayleigh
/// quotient of the (E, G) pencil over pseudo-random directions, with a few
/// power-iteration refinements. Deterministic for a fixed seed.
pub fn brute_force_cost(system: &GramianSystem, samples: usize, seed: u64) -> f64 {
    let n = system.modes.len();
    let mut state = seed.max(1);
    let mut next = move || {
        // xorshift64*
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        (state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let rayleigh = |y: &[f64]| {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            num += system.e_diag[j] * y[j] * y[j];
            let mut gy = 0.0;
            for k in 0..n {
                gy += system.g.get(j, k) * y[k];
            }
            den += y[j] * gy;
        }
        if den <= 0.0 {
            0.0
        } else {
            num / den
        }
    };
    let mut best = 0.0f64;
    let mut best_y = vec![0.0; n];
    for _ in 0..samples {
        let y: Vec<f64> = (0..n).map(|_| next()).collect();
        let r = rayleigh(&y);
        if r > best {
            best = r;
            best_y = y;
        }
    }
    // refine: inverse-G power iteration on E-weighted direction
    if let Ok(l) = linalg::cholesky(&system.g) {
        let mut y = best_y;
        for _ in 0..200 {
            let ey: Vec<f64> = (0..n).map(|j| system.e_diag[j] * y[j]).collect();
            y = linalg::cholesky_solve(&l, &ey);
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            y.iter_mut().for_each(|v| *v /= norm);
        }
        best = best.max(rayleigh(&y));
    }
    best
}

/// One point of a cost sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub axis: f64,
    /// (nu_max, K) at each truncation level, coarsest first.
    pub costs: Vec<(f64, f64)>,
    /// K at the finest truncation.
    pub k: f64,
    /// True when the last two truncations differ by < 5%.
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct CostCurve {
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of ln K against the axis, over converged points.
    pub slope: f64,
    pub r2: f64,
    /// Running maximum of K over the ladder (the cost of observing all
    /// fibers up to each axis value). Above the minimal time the per-fiber
    /// cost decays, so this stabilizes; below it, it grows with the fibers.
    pub cumulative: Vec<(f64, f64)>,
}

/// Least-squares line fit; returns (slope, intercept, r²).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}

/// Sweep K_T along a μ ladder at fixed T. `truncations` are nu_max offsets
/// above dμ (at least two levels, increasing).
pub fn cost_sweep_mu(
    grid: &RadialGrid,
    region: &ObservationRegion,
    t: f64,
    mu_ladder: &[f64],
    truncations: &[f64],
    target: Target,
) -> Result<CostCurve> {
    if truncations.len() < 2 {
        return Err(GrlbError::InvalidParameter(
            "need at least two truncation levels".into(),
        ));
    }
    let d = grid.d;
    let mut points = Vec::with_capacity(mu_ladder.len());
    for &mu in mu_ladder {
        let mut costs = Vec::new();
        for &extra in truncations {
            let nu_max = d as f64 * mu + extra;
            let modes = build_mode_set(d, grid.radius, mu, nu_max, grid)?;
            let system = assemble_gramian(grid, &modes, region, t, mu, target)?;
            costs.push((nu_max, observability_cost(&system)));
        }
        let k = costs.last().unwrap().1;
        let prev = costs[costs.len() - 2].1;
        let converged = if k.is_finite() && prev.is_finite() && k > 0.0 {
            ((k - prev) / k).abs() < 0.05
        } else {
            false
        };
        points.push(SweepPoint { axis: mu, costs, k, converged });
    }
    let xs: Vec<f64> = points
        .iter()
        .filter(|p| p.converged && p.k.is_finite() && p.k > 0.0)
        .map(|p| p.axis)
        .collect();
    let ys: Vec<f64> = points
        .iter()
        .filter(|p| p.converged && p.k.is_finite() && p.k > 0.0)
        .map(|p| p.k.ln())
        .collect();
    let (slope, _, r2) = if xs.len() >= 2 {
        linear_fit(&xs, &ys)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    let mut cumulative = Vec::with_capacity(points.len());
    let mut running = 0.0f64;
    for p in &points {
        running = running.max(p.k);
        cumulative.push((p.axis, running));
    }
    Ok(CostCurve { points, slope, r2, cumulative })
}

/// Certified lower bound on K_T² per fiber: e^{−2ν_μT}·2ν_μ / ∫_region ϖ_μ²
/// using the ground mode only. Returns (μ, log lower bound) pairs and the
/// fitted slope of the log bound vs μ.
pub fn quasimode_lower_bound(
    grid: &RadialGrid,
    mu_ladder: &[f64],
    t: f64,
    region: &ObservationRegion,
) -> Result<(Vec<(f64, f64)>, f64)> {
    let (r1, r2, ang_frac) = match region {
        ObservationRegion::FullAnnulus { r1, r2 } => (*r1, *r2, 1.0),
        ObservationRegion::AnnularSector { r1, r2, gamma } => {
            let full = AngularRegion::full_sphere(grid.d).measure();
            (*r1, *r2, gamma.measure() / full)
        }
        _ => {
            return Err(GrlbError::InvalidParameter(
                "quasimode bound needs an internal annular region".into(),
            ))
        }
    };
    let mut curve = Vec::with_capacity(mu_ladder.len());
    for &mu in mu_ladder {
        let problem = RadialProblem::new(grid.d, grid.radius, mu, 0)?;
        let modes = solve_modes(&problem, grid, 1)?;
        let nu = modes[0].eigenvalue;
        if t <= 0.0 {
            curve.push((mu, f64::INFINITY));
            continue;
        }
        let mass =
            radial_band_product(grid, &modes[0].profile, &modes[0].profile, r1, r2) * ang_frac;
        // log of e^{−2νT} 2ν / ∫ϖ²
        let log_bound = -2.0 * nu * t + (2.0 * nu).ln() - mass.ln();
        curve.push((mu, log_bound));
    }
    let xs: Vec<f64> = curve.iter().map(|(m, _)| *m).collect();
    let ys: Vec<f64> = curve.iter().map(|(_, l)| *l).collect();
    let (slope, _, _) = linear_fit(&xs, &ys);
    Ok((curve, slope))
}

/// Sector construction around an interior point: the largest annular sector
/// ω_{Γ_α} = {rθ : r* < r < r*+α, ⟨θ, x*/r*⟩ > 1−α²} inside B_δ(x*).
#[derive(Debug, Clone)]
pub struct InnerSector {
    pub r_star: f64,
    /// The admissibility bound (δ/2)·min(1, 1/(√2 r*)).
    pub alpha_bound: f64,
    /// Used half of the bound (safety factor).
    pub alpha: f64,
    pub region: ObservationRegion,
}

pub fn inner_sector_for_ball(x_star: &[f64], delta: f64, radius: f64) -> Result<InnerSector> {
    if x_star.len() != 2 {
        return Err(GrlbError::InvalidParameter(
            "inner sector construction implemented for d = 2 points".into(),
        ));
    }
    let r_star = (x_star[0] * x_star[0] + x_star[1] * x_star[1]).sqrt();
    if r_star <= 0.0 {
        return Err(GrlbError::InvalidParameter("x* must be nonzero".into()));
    }
    if r_star + delta > radius {
        return Err(GrlbError::InvalidParameter(format!(
            "ball B_delta(x*) exits B_R: |x*| + delta = {} > {radius}",
            r_star + delta
        )));
    }
    let alpha_bound = (delta / 2.0) * 1f64.min(1.0 / (2f64.sqrt() * r_star));
    let alpha = alpha_bound / 2.0;
    let theta_star = x_star[1].atan2(x_star[0]);
    // ⟨θ, x*/r*⟩ > 1 − α² defines an arc of half-width arccos(1 − α²)
    let half_width = (1.0 - alpha * alpha).acos();
    let gamma = AngularRegion::Arc {
        theta1: theta_star - half_width,
        theta2: theta_star + half_width,
    };
    Ok(InnerSector {
        r_star,
        alpha_bound,
        alpha,
        region: ObservationRegion::AnnularSector { r1: r_star, r2: r_star + alpha, gamma },
    })
}
