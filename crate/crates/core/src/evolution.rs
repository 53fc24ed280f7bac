//! Spectral propagation of the harmonic-heat equation
//! ∂_t y − Δy + μ²‖x‖²y = 0 and of the Baouendi–Grushin equation
//! ∂_t y − Δ_x y − ‖x‖²Δ_x̃ y = 0 by fiber decomposition, plus an independent
//! Crank–Nicolson finite-difference oracle and the norms used by the
//! observability statements.

use crate::error::{GrlbError, Result};
use crate::harmonics::AngularMode;
use crate::linalg;
use crate::radial::{nodal_operator, RadialGrid, RadialMode, RadialProblem};

use std::sync::Arc;

/// One basis mode of the ball problem: radial eigenpair × sphere harmonic.
/// Both factors are unit-normalized, so the product is orthonormal in L²(B).
#[derive(Debug, Clone)]
pub struct FieldMode {
    pub angular: AngularMode,
    pub radial: RadialMode,
}

impl FieldMode {
    pub fn eigenvalue(&self) -> f64 {
        self.radial.eigenvalue
    }
}

/// Finite expansion y = Σ c_j f_j(r) Y_j(θ) in the eigenbasis of −Δ + μ²‖x‖².
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub d: u32,
    pub radius: f64,
    pub mu: f64,
    pub grid: Arc<RadialGrid>,
    pub modes: Vec<FieldMode>,
    pub coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn new(
        d: u32,
        radius: f64,
        mu: f64,
        grid: Arc<RadialGrid>,
        modes: Vec<FieldMode>,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        if modes.len() != coeffs.len() {
            return Err(GrlbError::InvalidParameter(
                "mode/coefficient length mismatch".into(),
            ));
        }
        // no duplicate (m, order, parity, k)
        for i in 0..modes.len() {
            for j in (i + 1)..modes.len() {
                if modes[i].angular == modes[j].angular
                    && modes[i].radial.index == modes[j].radial.index
                {
                    return Err(GrlbError::InvalidParameter(format!(
                        "duplicate mode at positions {i}, {j}"
                    )));
                }
            }
        }
        for fm in &modes {
            let p = &fm.radial.problem;
            if p.d != d || p.radius != radius || p.mu != mu || p.m != fm.angular.m {
                return Err(GrlbError::InvalidParameter(
                    "mode does not share the field's (d, R, mu) or degree".into(),
                ));
            }
        }
        Ok(SpectralField { d, radius, mu, grid, modes, coeffs })
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Exact mode-wise evolution: coefficients scaled by e^{−νT}.
pub fn solve_harmonic_heat(y0: &SpectralField, t: f64) -> Result<SpectralField> {
    if t < 0.0 {
        return Err(GrlbError::InvalidParameter("T must be nonnegative".into()));
    }
    let mut out = y0.clone();
    for (c, fm) in out.coeffs.iter_mut().zip(out.modes.iter()) {
        *c *= (-fm.eigenvalue() * t).exp();
    }
    Ok(out)
}

/// Grushin initial data on B × (0, L), expanded over the Dirichlet fibers
/// φ_p(x̃) = √(2/L) sin(pπx̃/L) so that ‖y‖² = Σ_p ‖fiber_p‖² exactly.
#[derive(Debug, Clone)]
pub struct TensorGrushinField {
    pub length: f64,
    /// (p, fiber field with μ = pπ/L), distinct p values.
    pub fibers: Vec<(u32, SpectralField)>,
}

impl TensorGrushinField {
    pub fn new(length: f64, fibers: Vec<(u32, SpectralField)>) -> Result<Self> {
        if length <= 0.0 {
            return Err(GrlbError::InvalidParameter("length must be positive".into()));
        }
        for i in 0..fibers.len() {
            for j in (i + 1)..fibers.len() {
                if fibers[i].0 == fibers[j].0 {
                    return Err(GrlbError::InvalidParameter(format!(
                        "duplicate fiber p = {}",
                        fibers[i].0
                    )));
                }
            }
        }
        for (p, field) in &fibers {
            let mu_p = *p as f64 * std::f64::consts::PI / length;
            if (field.mu - mu_p).abs() > 1e-12 * mu_p.max(1.0) {
                return Err(GrlbError::InvalidParameter(format!(
                    "fiber p = {p} has mu = {} but requires pi p / L = {mu_p}",
                    field.mu
                )));
            }
        }
        Ok(TensorGrushinField { length, fibers })
    }

    /// Parseval total norm: root-sum-square of the fiber norms.
    pub fn l2_norm(&self) -> f64 {
        self.fibers
            .iter()
            .map(|(_, f)| f.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Evolve each fiber by its own harmonic-heat semigroup.
pub fn solve_grushin(y0: &TensorGrushinField, t: f64) -> Result<TensorGrushinField> {
    let mut fibers = Vec::with_capacity(y0.fibers.len());
    for (p, field) in &y0.fibers {
        fibers.push((*p, solve_harmonic_heat(field, t)?));
    }
    Ok(TensorGrushinField { length: y0.length, fibers })
}

/// Norm bundle for a spectral field.
#[derive(Debug, Clone, Copy)]
pub struct FieldNorms {
    pub l2: f64,
    pub h1_seminorm: f64,
    pub mu_norm: f64,
    /// μ²‖ x u ‖²_{L²}.
    pub weighted_x2: f64,
}

/// ∫ ‖x‖² ϖ² over the ball for a unit mode: radial quadrature of r²f².
fn mode_x2(grid: &RadialGrid, mode: &FieldMode) -> f64 {
    grid.nodes
        .iter()
        .zip(mode.radial.profile.iter())
        .zip(grid.weights.iter())
        .map(|((r, f), w)| r * r * f * f * w)
        .sum()
}

/// L², H¹ seminorm, and μ-norm of a field, by the spectral identity
/// ‖∇u‖² = Σ c²(ν − μ² ∫‖x‖²ϖ²) and ‖u‖²_μ = ‖∇u‖² + μ²‖u‖².
pub fn field_norms(field: &SpectralField) -> Result<FieldNorms> {
    let mu2 = field.mu * field.mu;
    let mut l2_sq = 0.0;
    let mut h1_sq = 0.0;
    let mut wx2 = 0.0;
    for (c, fm) in field.coeffs.iter().zip(field.modes.iter()) {
        let c2 = c * c;
        l2_sq += c2;
        let x2 = mode_x2(&field.grid, fm);
        h1_sq += c2 * (fm.eigenvalue() - mu2 * x2);
        wx2 += c2 * mu2 * x2;
    }
    if h1_sq < -1e-8 {
        return Err(GrlbError::AuditCrossCheckFailure {
            location: "field_norms".into(),
            error: -h1_sq,
        });
    }
    let h1_sq = h1_sq.max(0.0);
    Ok(FieldNorms {
        l2: l2_sq.sqrt(),
        h1_seminorm: h1_sq.sqrt(),
        mu_norm: (h1_sq + mu2 * l2_sq).sqrt(),
        weighted_x2: wx2,
    })
}

/// Nodal state for the finite-difference oracle (d = 2 only): per retained
/// angular mode, samples of the radial factor on the grid.
#[derive(Debug, Clone)]
pub struct FDState {
    pub grid: Arc<RadialGrid>,
    pub mu: f64,
    pub modes: Vec<(AngularMode, Vec<f64>)>,
    pub dt: f64,
}

impl FDState {
    /// L²(B) norm by quadrature (angular factors are orthonormal).
    pub fn l2_norm(&self) -> f64 {
        self.modes
            .iter()
            .map(|(_, v)| self.grid.inner(v, v))
            .sum::<f64>()
            .sqrt()
    }
}

/// Crank–Nicolson step trajectory for one decoupled angular mode. Returns
/// (t, nodal values) at every step, starting from t = 0. An optional source
/// term F(t, r) is sampled at the half step.
pub fn fd_evolve<S: Fn(f64, f64) -> f64>(
    grid: &RadialGrid,
    mu: f64,
    m: u32,
    y0: &[f64],
    t_final: f64,
    dt: f64,
    source: Option<&S>,
) -> Result<Vec<(f64, Vec<f64>)>> {
    if dt <= 0.0 {
        return Err(GrlbError::InvalidParameter("dt must be positive".into()));
    }
    let problem = RadialProblem::new(2, grid.radius, mu, m)?;
    let (lower, diag, upper) = nodal_operator(&problem, grid);
    let n = grid.n();
    let steps = (t_final / dt).round().max(1.0) as usize;
    let dt = t_final / steps as f64;
    // (I + dt/2 A) u^{k+1} = (I - dt/2 A) u^k + dt F(t_{k+1/2})
    let li: Vec<f64> = lower.iter().map(|v| 0.5 * dt * v).collect();
    let ui: Vec<f64> = upper.iter().map(|v| 0.5 * dt * v).collect();
    let di: Vec<f64> = diag.iter().map(|v| 1.0 + 0.5 * dt * v).collect();
    let mut u = y0.to_vec();
    let mut out = Vec::with_capacity(steps + 1);
    out.push((0.0, u.clone()));
    for k in 0..steps {
        let t_half = (k as f64 + 0.5) * dt;
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let mut au = diag[i] * u[i];
            if i > 0 {
                au += lower[i - 1] * u[i - 1];
            }
            if i + 1 < n {
                au += upper[i] * u[i + 1];
            }
            rhs[i] = u[i] - 0.5 * dt * au;
            if let Some(f) = source {
                rhs[i] += dt * f(t_half, grid.nodes[i]);
            }
        }
        u = linalg::solve_tridiag(&li, &di, &ui, &rhs)?;
        out.push(((k + 1) as f64 * dt, u.clone()));
    }
    Ok(out)
}

/// Final-time finite-difference oracle: Crank–Nicolson over every retained
/// angular mode. Source-free variant.
pub fn fd_oracle(state: &FDState, t_final: f64) -> Result<FDState> {
    if state.grid.d != 2 {
        return Err(GrlbError::InvalidParameter(
            "fd_oracle is restricted to d = 2".into(),
        ));
    }
    let none: Option<&fn(f64, f64) -> f64> = None;
    let mut modes = Vec::with_capacity(state.modes.len());
    for (am, y0) in &state.modes {
        let traj = fd_evolve(
            &state.grid,
            state.mu,
            am.m,
            y0,
            t_final,
            state.dt,
            none,
        )?;
        modes.push((*am, traj.last().unwrap().1.clone()));
    }
    Ok(FDState {
        grid: state.grid.clone(),
        mu: state.mu,
        modes,
        dt: state.dt,
    })
}

/// Nodal samples of a spectral field's radial factor for each angular mode,
/// for seeding the finite-difference oracle.
pub fn to_nodal(field: &SpectralField, dt: f64) -> FDState {
    let n = field.grid.n();
    let mut modes: Vec<(AngularMode, Vec<f64>)> = Vec::new();
    for (c, fm) in field.coeffs.iter().zip(field.modes.iter()) {
        let slot = modes.iter_mut().find(|(am, _)| *am == fm.angular);
        let values = match slot {
            Some((_, v)) => v,
            None => {
                modes.push((fm.angular, vec![0.0; n]));
                &mut modes.last_mut().unwrap().1
            }
        };
        for (vi, fi) in values.iter_mut().zip(fm.radial.profile.iter()) {
            *vi += c * fi;
        }
    }
    FDState {
        grid: field.grid.clone(),
        mu: field.mu,
        modes,
        dt,
    }
}

/// Relative L² gap between a spectral field and a nodal state holding the
/// same angular modes.
pub fn relative_gap(field: &SpectralField, nodal: &FDState) -> f64 {
    let spectral = to_nodal(field, nodal.dt);
    let mut diff_sq = 0.0;
    let mut ref_sq = 0.0;
    for (am, v) in &spectral.modes {
        let other = nodal
            .modes
            .iter()
            .find(|(bm, _)| bm == am)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(|| vec![0.0; v.len()]);
        let d: Vec<f64> = v.iter().zip(other.iter()).map(|(a, b)| a - b).collect();
        diff_sq += field.grid.inner(&d, &d);
        ref_sq += field.grid.inner(v, v);
    }
    for (am, w) in &nodal.modes {
        if !spectral.modes.iter().any(|(bm, _)| bm == am) {
            diff_sq += field.grid.inner(w, w);
        }
    }
    (diff_sq / ref_sq.max(1e-300)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::Parity;
    use crate::radial::{solve_modes, GridKind};

    fn single_mode_field(mu: f64, m: u32, k: usize, n: usize) -> SpectralField {
        let grid = Arc::new(RadialGrid::new(2, 1.0, n, GridKind::Staggered).unwrap());
        let problem = RadialProblem::new(2, 1.0, mu, m).unwrap();
        let modes = solve_modes(&problem, &grid, k).unwrap();
        let angular = if m == 0 {
            AngularMode { d: 2, m: 0, order: 0, parity: Parity::Zonal }
        } else {
            AngularMode { d: 2, m, order: m, parity: Parity::Cos }
        };
        SpectralField::new(
            2,
            1.0,
            mu,
            grid,
            vec![FieldMode { angular, radial: modes[k - 1].clone() }],
            vec![1.0],
        )
        .unwrap()
    }

    #[test]
    fn eigenmode_evolution_is_exponential() {
        let field = single_mode_field(3.0, 1, 1, 128);
        let nu = field.modes[0].eigenvalue();
        let t = 0.2;
        let evolved = solve_harmonic_heat(&field, t).unwrap();
        assert!((evolved.coeffs[0] - (-nu * t).exp()).abs() < 1e-15);
    }

    #[test]
    fn semigroup_property() {
        let field = single_mode_field(2.0, 0, 2, 128);
        let a = solve_harmonic_heat(&solve_harmonic_heat(&field, 0.3).unwrap(), 0.4).unwrap();
        let b = solve_harmonic_heat(&field, 0.7).unwrap();
        for (x, y) in a.coeffs.iter().zip(b.coeffs.iter()) {
            assert!((x - y).abs() <= 1e-16 * x.abs().max(1.0));
        }
    }

    #[test]
    fn l2_decay_rate_d_mu() {
        // ‖y(t)‖ ≤ e^{−dμt}‖y0‖ since every ν ≥ dμ.
        let field = single_mode_field(5.0, 0, 1, 256);
        for t in [0.05, 0.1, 0.5] {
            let evolved = solve_harmonic_heat(&field, t).unwrap();
            assert!(evolved.l2_norm() <= (-2.0 * 5.0 * t).exp() * field.l2_norm() + 1e-12);
        }
    }

    #[test]
    fn single_mode_norm_identity() {
        // h1² + μ² w_x = ν within 1e-6 for a unit mode.
        let field = single_mode_field(4.0, 1, 1, 512);
        let norms = field_norms(&field).unwrap();
        let nu = field.modes[0].eigenvalue();
        let recomposed = norms.h1_seminorm.powi(2) + norms.weighted_x2;
        assert!((recomposed - nu).abs() < 1e-6 * nu, "{recomposed} vs {nu}");
        // mu_norm² = h1² + μ² l2²
        let expect = (norms.h1_seminorm.powi(2) + 16.0).sqrt();
        assert!((norms.mu_norm - expect).abs() < 1e-12);
    }

    #[test]
    fn mu_zero_h1_of_eigenmode_is_nu() {
        let field = single_mode_field(0.0, 0, 1, 512);
        let norms = field_norms(&field).unwrap();
        let nu = field.modes[0].eigenvalue();
        assert!((norms.h1_seminorm.powi(2) - nu).abs() < 1e-9 * nu);
        assert!((norms.mu_norm - norms.h1_seminorm).abs() < 1e-14);
    }

    #[test]
    fn fd_oracle_matches_bessel_decay() {
        let field = single_mode_field(0.0, 0, 1, 512);
        let nu = field.modes[0].eigenvalue();
        let t = 0.05;
        let state = to_nodal(&field, 1e-3);
        let evolved = fd_oracle(&state, t).unwrap();
        let expect = (-nu * t).exp();
        let got = evolved.l2_norm() / state.l2_norm();
        assert!((got - expect).abs() < 1e-4, "{got} vs {expect}");
    }

    #[test]
    fn fd_oracle_zero_data_and_monotone() {
        let grid = Arc::new(RadialGrid::new(2, 1.0, 64, GridKind::Staggered).unwrap());
        let zero = FDState {
            grid: grid.clone(),
            mu: 1.0,
            modes: vec![(
                AngularMode { d: 2, m: 0, order: 0, parity: Parity::Zonal },
                vec![0.0; 64],
            )],
            dt: 1e-2,
        };
        let out = fd_oracle(&zero, 0.1).unwrap();
        assert!(out.modes[0].1.iter().all(|&v| v == 0.0));

        // dissipativity: norms nonincreasing step to step
        let y0: Vec<f64> = grid.nodes.iter().map(|r| 1.0 - r * r).collect();
        let none: Option<&fn(f64, f64) -> f64> = None;
        let traj = fd_evolve(&grid, 1.0, 0, &y0, 0.2, 1e-2, none).unwrap();
        let norms: Vec<f64> = traj.iter().map(|(_, v)| grid.norm(v)).collect();
        assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }

    #[test]
    fn spectral_vs_fd_multimode() {
        // moderate-resolution version of the oracle agreement check
        let grid = Arc::new(RadialGrid::new(2, 1.0, 512, GridKind::Staggered).unwrap());
        let mu = 5.0;
        let mut modes = Vec::new();
        let mut coeffs = Vec::new();
        for (m, c) in [(0u32, 0.8), (1, -0.5), (2, 0.3)] {
            let problem = RadialProblem::new(2, 1.0, mu, m).unwrap();
            let rm = solve_modes(&problem, &grid, 2).unwrap();
            for (k, r) in rm.into_iter().enumerate() {
                let angular = if m == 0 {
                    AngularMode { d: 2, m: 0, order: 0, parity: Parity::Zonal }
                } else {
                    AngularMode { d: 2, m, order: m, parity: Parity::Cos }
                };
                modes.push(FieldMode { angular, radial: r });
                coeffs.push(c / (k as f64 + 1.0));
            }
        }
        let field = SpectralField::new(2, 1.0, mu, grid, modes, coeffs).unwrap();
        let t = 0.1;
        let exact = solve_harmonic_heat(&field, t).unwrap();
        let fd = fd_oracle(&to_nodal(&field, 5e-4), t).unwrap();
        let gap = relative_gap(&exact, &fd);
        assert!(gap < 2e-3, "relative gap {gap}");
    }

    #[test]
    fn grushin_parseval_and_decay_ordering() {
        let f1 = single_mode_field(std::f64::consts::PI / std::f64::consts::PI, 0, 1, 128);
        // fibers must satisfy mu = p pi / L; choose L = pi so mu_p = p
        let grid = f1.grid.clone();
        let mk = |p: u32| {
            let mu = p as f64;
            let problem = RadialProblem::new(2, 1.0, mu, 0).unwrap();
            let modes = solve_modes(&problem, &grid, 1).unwrap();
            SpectralField::new(
                2,
                1.0,
                mu,
                grid.clone(),
                vec![FieldMode {
                    angular: AngularMode { d: 2, m: 0, order: 0, parity: Parity::Zonal },
                    radial: modes[0].clone(),
                }],
                vec![1.0],
            )
            .unwrap()
        };
        let y0 = TensorGrushinField::new(
            std::f64::consts::PI,
            vec![(1, mk(1)), (3, mk(3))],
        )
        .unwrap();
        let total = y0.l2_norm();
        assert!((total - 2f64.sqrt()).abs() < 1e-10);
        let y = solve_grushin(&y0, 0.3).unwrap();
        // larger mu_p decays at least as fast
        let n1 = y.fibers[0].1.l2_norm();
        let n3 = y.fibers[1].1.l2_norm();
        assert!(n3 <= n1);
        // Parseval after evolution
        let rss = (n1 * n1 + n3 * n3).sqrt();
        assert!((y.l2_norm() - rss).abs() < 1e-12);
    }

    #[test]
    fn duplicate_fiber_rejected() {
        let f = single_mode_field(1.0, 0, 1, 64);
        assert!(TensorGrushinField::new(
            std::f64::consts::PI,
            vec![(1, f.clone()), (1, f)]
        )
        .is_err());
    }
}
