//! Radial eigenproblems for the operator −Δ + μ²‖x‖² on the ball, separated
//! into angular modes.
//!
//! After separation the radial part at angular degree m reads
//!
//! ```text
//! -(1/r^{d-1}) (r^{d-1} f')' + [ m(m+d-2)/r² + μ²r² ] f = ν f,   f(R) = 0,
//! ```
//!
//! discretized in finite-volume divergence form on a staggered grid so the
//! coordinate singularity at r = 0 needs no boundary condition. The assembled
//! operator is self-adjoint in the weighted discrete inner product
//! ⟨f,g⟩ = Σ f_i g_i w_i with w_i the exact cell integrals of r^{d-1}.

use crate::error::{GrlbError, Result};
use crate::linalg;

/// Parameters of one radial eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem {
    /// Space dimension, 2 or 3.
    pub d: u32,
    /// Ball radius.
    pub radius: f64,
    /// Frequency parameter μ ≥ 0 of the quadratic potential.
    pub mu: f64,
    /// Angular degree m ≥ 0.
    pub m: u32,
}

impl RadialProblem {
    pub fn new(d: u32, radius: f64, mu: f64, m: u32) -> Result<Self> {
        if !(d == 2 || d == 3) {
            return Err(GrlbError::InvalidParameter(format!("d must be 2 or 3, got {d}")));
        }
        if radius <= 0.0 {
            return Err(GrlbError::InvalidParameter("radius must be positive".into()));
        }
        if mu < 0.0 {
            return Err(GrlbError::InvalidParameter("mu must be nonnegative".into()));
        }
        Ok(RadialProblem { d, radius, mu, m })
    }

    /// Centrifugal coefficient m(m+d−2).
    pub fn centrifugal(&self) -> f64 {
        (self.m * (self.m + self.d - 2)) as f64
    }
}

/// Node placement rule for the radial grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// r_i = (i − 1/2) R/(n + 1/2): the Dirichlet point R lands one spacing
    /// beyond the last node and r = 0 is a zero-area flux face.
    Staggered,
    /// r_i = i R/(n+1).
    Uniform,
}

/// Radial quadrature/differencing grid on (0, R).
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub kind: GridKind,
    pub d: u32,
    pub radius: f64,
    /// Interior nodes, strictly increasing in (0, R).
    pub nodes: Vec<f64>,
    /// Quadrature weights for ∫₀^R · r^{d−1} dr (exact cell integrals).
    pub weights: Vec<f64>,
    /// Node spacing.
    pub h: f64,
}

impl RadialGrid {
    pub fn new(d: u32, radius: f64, n: usize, kind: GridKind) -> Result<Self> {
        if n < 16 {
            return Err(GrlbError::GridTooCoarse(n));
        }
        let dd = d as i32;
        let (nodes, h, faces): (Vec<f64>, f64, Vec<f64>) = match kind {
            GridKind::Staggered => {
                let h = radius / (n as f64 + 0.5);
                let nodes = (1..=n).map(|i| (i as f64 - 0.5) * h).collect();
                // Faces at 0, h, …, (n-1)h; the last cell runs to R.
                let mut faces: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
                faces.push(radius);
                (nodes, h, faces)
            }
            GridKind::Uniform => {
                let h = radius / (n as f64 + 1.0);
                let nodes = (1..=n).map(|i| i as f64 * h).collect();
                let mut faces: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
                faces.insert(0, 0.0);
                faces.pop();
                faces.push(radius);
                (nodes, h, faces)
            }
        };
        let weights: Vec<f64> = (0..n)
            .map(|i| (faces[i + 1].powi(dd) - faces[i].powi(dd)) / d as f64)
            .collect();
        Ok(RadialGrid {
            kind,
            d,
            radius,
            nodes,
            weights,
            h,
        })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    /// Weighted inner product ⟨f, g⟩ = Σ f_i g_i w_i.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g.iter())
            .zip(self.weights.iter())
            .map(|((a, b), w)| a * b * w)
            .sum()
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    /// Flux-face radii used by the divergence-form stencil. Face j sits
    /// between nodes j and j+1; face 0 carries the r = 0 (or inner) area.
    fn stencil_faces(&self) -> Vec<f64> {
        let n = self.n();
        match self.kind {
            GridKind::Staggered => (0..=n).map(|i| i as f64 * self.h).collect(),
            GridKind::Uniform => {
                let mut f: Vec<f64> = (0..=n).map(|i| (i as f64 + 0.5) * self.h).collect();
                f[0] = 0.0; // lump the core cell: no flux through the axis
                f
            }
        }
    }
}

/// Symmetrized tridiagonal discretization of the radial operator.
pub struct RadialOperator {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    /// sqrt of quadrature weights; maps symmetrized eigenvectors back to
    /// nodal samples.
    pub sqrt_w: Vec<f64>,
}

/// Assemble the symmetric tridiagonal form of the discrete operator.
pub fn assemble(problem: &RadialProblem, grid: &RadialGrid) -> RadialOperator {
    let n = grid.n();
    let faces = grid.stencil_faces();
    let dm1 = (problem.d - 1) as i32;
    let area: Vec<f64> = faces.iter().map(|r| r.powi(dm1)).collect();
    let cent = problem.centrifugal();
    let mu2 = problem.mu * problem.mu;
    let h = grid.h;
    let w = &grid.weights;
    let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for i in 0..n {
        let r = grid.nodes[i];
        diag[i] = (area[i] + area[i + 1]) / (w[i] * h) + cent / (r * r) + mu2 * r * r;
    }
    for i in 0..n - 1 {
        off[i] = -area[i + 1] / (h * (sqrt_w[i] * sqrt_w[i + 1]).max(1e-300));
    }
    RadialOperator { diag, off, sqrt_w }
}

/// The same discrete operator in nodal (non-symmetrized) form, as the three
/// diagonals (lower, diag, upper) of A with (A f)_i ≈ (L f)(r_i). Used by the
/// time-stepping oracle, which works on nodal samples directly.
pub fn nodal_operator(problem: &RadialProblem, grid: &RadialGrid) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = grid.n();
    let faces = grid.stencil_faces();
    let dm1 = (problem.d - 1) as i32;
    let area: Vec<f64> = faces.iter().map(|r| r.powi(dm1)).collect();
    let cent = problem.centrifugal();
    let mu2 = problem.mu * problem.mu;
    let h = grid.h;
    let w = &grid.weights;
    let mut diag = vec![0.0; n];
    let mut lower = vec![0.0; n - 1];
    let mut upper = vec![0.0; n - 1];
    for i in 0..n {
        let r = grid.nodes[i];
        diag[i] = (area[i] + area[i + 1]) / (w[i] * h) + cent / (r * r) + mu2 * r * r;
    }
    for i in 0..n - 1 {
        upper[i] = -area[i + 1] / (w[i] * h);
        lower[i] = -area[i + 1] / (w[i + 1] * h);
    }
    (lower, diag, upper)
}

/// One eigenpair of the radial reduction at angular degree m.
#[derive(Debug, Clone)]
pub struct RadialMode {
    pub problem: RadialProblem,
    /// Eigenvalue ν > 0.
    pub eigenvalue: f64,
    /// 1-based index among eigenvalues at fixed (d, R, μ, m).
    pub index: usize,
    /// Nodal samples f(r_i), unit weighted L² norm.
    pub profile: Vec<f64>,
    /// f′(R), 3-point one-sided difference using the Dirichlet zero at R.
    pub boundary_slope: f64,
}

/// Lowest `k_max` eigenpairs of the radial problem on `grid`.
///
/// Eigenvalues come back sorted ascending; eigenvectors are orthonormal in
/// the weighted discrete inner product and sign-fixed so the ground state is
/// nonnegative.
pub fn solve_modes(problem: &RadialProblem, grid: &RadialGrid, k_max: usize) -> Result<Vec<RadialMode>> {
    if k_max < 1 {
        return Err(GrlbError::InvalidParameter("k_max must be at least 1".into()));
    }
    if grid.n() < 16 {
        return Err(GrlbError::GridTooCoarse(grid.n()));
    }
    if k_max * 4 >= grid.n() {
        return Err(GrlbError::InvalidParameter(format!(
            "k_max = {k_max} too large for n = {} (need k_max < n/4)",
            grid.n()
        )));
    }
    let op = assemble(problem, grid);
    let eigenvalues = linalg::tridiag_lowest_eigenvalues(&op.diag, &op.off, k_max);
    let h = grid.h;
    let mut modes = Vec::with_capacity(k_max);
    for (k, &nu) in eigenvalues.iter().enumerate() {
        let sym_vec = linalg::tridiag_eigenvector(&op.diag, &op.off, nu)?;
        // Back to nodal samples, then normalize in the weighted product.
        let mut profile: Vec<f64> = sym_vec
            .iter()
            .zip(op.sqrt_w.iter())
            .map(|(v, sw)| v / sw)
            .collect();
        let norm = grid.norm(&profile);
        profile.iter_mut().for_each(|x| *x /= norm);
        // Sign: make the last antinode before the boundary carry the sign of
        // the ground state, i.e. fix f > 0 near r = 0 for k = 1 and keep the
        // leading-entry-positive convention otherwise.
        if profile[0] < 0.0 {
            profile.iter_mut().for_each(|x| *x = -*x);
        }
        let n = grid.n();
        let boundary_slope = (profile[n - 2] - 4.0 * profile[n - 1]) / (2.0 * h);
        modes.push(RadialMode {
            problem: *problem,
            eigenvalue: nu,
            index: k + 1,
            profile,
            boundary_slope,
        });
    }
    Ok(modes)
}

/// Lowest eigenvalue of −Δ + μ²‖x‖² on the ball (attained at m = 0).
pub fn ground_eigenvalue(d: u32, radius: f64, mu: f64, grid: &RadialGrid) -> Result<f64> {
    let problem = RadialProblem::new(d, radius, mu, 0)?;
    let op = assemble(&problem, grid);
    Ok(linalg::tridiag_lowest_eigenvalues(&op.diag, &op.off, 1)[0])
}

/// Richardson-extrapolated ground eigenvalue: runs at n and 2n and removes
/// the O(h²) error term.
pub fn ground_eigenvalue_richardson(d: u32, radius: f64, mu: f64, n: usize, kind: GridKind) -> Result<f64> {
    let coarse = ground_eigenvalue(d, radius, mu, &RadialGrid::new(d, radius, n, kind)?)?;
    let fine = ground_eigenvalue(d, radius, mu, &RadialGrid::new(d, radius, 2 * n, kind)?)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Smooth transition 0 → 1 built from the standard exponential bump:
/// B(u) = e^{−1/u} for u > 0, S(u) = B(u)/(B(u)+B(1−u)).
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let b = (-1.0 / u).exp();
    let b1 = (-1.0 / (1.0 - u)).exp();
    b / (b + b1)
}

/// Default cutoff θ: 0 on [0, 1/2], 1 at 1, smooth in between.
pub fn default_cutoff(s: f64) -> f64 {
    smooth_step(2.0 * s - 1.0)
}

/// Truncated-Gaussian quasimode g_μ = C_μ μ^{d/4}(e^{−μ‖x‖²/2} − θ(‖x‖/R)e^{−μR²/2}),
/// sampled on the grid and normalized to unit weighted L² norm.
///
/// Returns (profile, C_μ).
pub fn gaussian_quasimode<F: Fn(f64) -> f64>(
    d: u32,
    radius: f64,
    mu: f64,
    grid: &RadialGrid,
    cutoff: F,
) -> Result<(Vec<f64>, f64)> {
    if mu <= 0.0 {
        return Err(GrlbError::InvalidParameter(
            "gaussian quasimode requires mu > 0".into(),
        ));
    }
    let scale = mu.powf(d as f64 / 4.0);
    let tail = (-mu * radius * radius / 2.0).exp();
    let raw: Vec<f64> = grid
        .nodes
        .iter()
        .map(|&r| scale * ((-mu * r * r / 2.0).exp() - cutoff(r / radius) * tail))
        .collect();
    // d = 2 integrates over the circle of angles, d = 3 over the sphere:
    // the quasimode is radial so the angular factor is the sphere measure.
    let sphere_measure = match d {
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => return Err(GrlbError::InvalidParameter("d must be 2 or 3".into())),
    };
    let norm = (grid.inner(&raw, &raw) * sphere_measure).sqrt();
    let c_mu = 1.0 / norm;
    let profile = raw.iter().map(|v| v * c_mu).collect();
    Ok((profile, c_mu))
}
