//! Explicit constant calculus for the low-frequency/dissipation iteration:
//! given the rates of a spectral inequality, an observability estimate for a
//! larger observation operator, and high-frequency dissipation, produce the
//! constants (s₁, s₂, q, s, C₁, C₂, T′, f₀, g₀) of the restricted
//! observability bound K(A,B,T) ≤ 4 C_rel C_obs e^{2/(sT)^β}, plus a
//! finite-dimensional semigroup validator and the uniform-in-μ cost bound.

use crate::error::{GrlbError, Result};
use crate::quadrature::adaptive_simpson;

/// Which closed form of s₁ to use: the theorem statement carries a factor 2
/// inside the parenthesis, the proof derives the same expression without it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Statement,
    Proof,
}

/// Input rates and constants of the three assumed estimates.
#[derive(Debug, Clone, Copy)]
pub struct LRParams {
    /// Spectral-inequality rate: ‖B₀y‖² ≤ C_rel e^{2aσ^δ}‖By‖² on F_σ.
    pub a: f64,
    /// Observability rate for B₀: K₀(T) ≤ C_obs e^{2b/T^β}.
    pub b: f64,
    /// Dissipation rate: ‖e^{−tA}y‖² ≤ C_dissip e^{−2cσt}‖y‖² on F_σ^⊥.
    pub c: f64,
    pub beta: f64,
    /// δ = β/(1+β), the normalization β = δ/(1−δ).
    pub delta: f64,
    pub c_rel: f64,
    pub c_obs: f64,
    pub c_dissip: f64,
    pub adm_tmax: f64,
    pub t_max: f64,
    pub kappa: f64,
    pub variant: Variant,
}

impl LRParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: f64,
        b: f64,
        c: f64,
        beta: f64,
        c_rel: f64,
        c_obs: f64,
        c_dissip: f64,
        adm_tmax: f64,
        t_max: f64,
        kappa: f64,
        variant: Variant,
    ) -> Result<Self> {
        for (name, v) in [
            ("a", a),
            ("b", b),
            ("c", c),
            ("beta", beta),
            ("c_rel", c_rel),
            ("c_obs", c_obs),
            ("c_dissip", c_dissip),
            ("adm_tmax", adm_tmax),
            ("t_max", t_max),
        ] {
            if v <= 0.0 {
                return Err(GrlbError::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(GrlbError::InvalidParameter("kappa must be in (0,1)".into()));
        }
        let delta = beta / (1.0 + beta);
        debug_assert!((beta - delta / (1.0 - delta)).abs() < 1e-12 * beta);
        Ok(LRParams {
            a,
            b,
            c,
            beta,
            delta,
            c_rel,
            c_obs,
            c_dissip,
            adm_tmax,
            t_max,
            kappa,
            variant,
        })
    }
}

fn s1_of(a: f64, b: f64, c: f64, beta: f64, kappa: f64, variant: Variant) -> f64 {
    let _ = (a, b);
    let factor = match variant {
        Variant::Proof => 1.0,
        Variant::Statement => 2.0,
    };
    kappa.powf((beta + 1.0) / beta) * (factor / (c * (1.0 - kappa))).powf(1.0 / beta)
}

fn s2_of(a: f64, b: f64, kappa: f64, beta: f64) -> f64 {
    kappa / (a + b).powf(1.0 / beta)
}

/// Derived constants. The bound values f, g, and the observability bound are
/// exposed as logarithms because e^{2/(sT)^β} overflows f64 near T → 0.
#[derive(Debug, Clone, Copy)]
pub struct LRConstants {
    pub beta: f64,
    pub s1: f64,
    pub s2: f64,
    pub q: f64,
    pub s: f64,
    pub c1: f64,
    /// Statement arrangement 4C_dissip Adm C_rel C_obs + 2C_dissip e^{−2/(s₂T_max)^β};
    /// algebraically identical to g₀/f₀.
    pub c2: f64,
    pub t_prime: f64,
    pub f0: f64,
    pub g0: f64,
}

impl LRConstants {
    /// ln f(T), f(T) = f₀ e^{−2/(s₂T)^β}.
    pub fn log_f(&self, t: f64) -> f64 {
        self.f0.ln() - 2.0 / (self.s2 * t).powf(self.beta)
    }

    /// ln g(T), g(T) = g₀ e^{−2/(s₁T)^β}.
    pub fn log_g(&self, t: f64) -> f64 {
        self.g0.ln() - 2.0 / (self.s1 * t).powf(self.beta)
    }

    /// ln of the final observability bound T ↦ (1/f₀) e^{2/(sT)^β}.
    pub fn log_bound(&self, t: f64) -> f64 {
        -self.f0.ln() + 2.0 / (self.s * t).powf(self.beta)
    }
}

/// Largest κ with s₁(κ) < s₂(κ); the ratio s₁/s₂ is increasing in κ.
pub fn kappa0_search(a: f64, b: f64, c: f64, beta: f64, variant: Variant) -> f64 {
    let ratio = |k: f64| s1_of(a, b, c, beta, k, variant) / s2_of(a, b, k, beta);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn derive_constants(params: &LRParams) -> Result<LRConstants> {
    let LRParams { a, b, c, beta, kappa, variant, .. } = *params;
    let s2 = s2_of(a, b, kappa, beta);
    let s1 = s1_of(a, b, c, beta, kappa, variant);
    if s1 >= s2 {
        let kappa0 = kappa0_search(a, b, c, beta, variant);
        return Err(GrlbError::InvalidParameter(format!(
            "kappa = {kappa} too large: s1 = {s1} >= s2 = {s2} (kappa0 = {kappa0})"
        )));
    }
    let q = (s1 / s2).powf(beta / (beta + 1.0));
    let s = s2 * (1.0 - q);
    let c1 = 2.0 / s1.powf(beta) * (1.0 - q);
    let f0 = 1.0 / (4.0 * params.c_rel * params.c_obs);
    let f_tmax = f0 * (-2.0 / (s2 * params.t_max).powf(beta)).exp();
    let g0 = params.c_dissip * (params.adm_tmax + 2.0 * f_tmax);
    let c2 = 4.0 * params.c_dissip * params.adm_tmax * params.c_rel * params.c_obs
        + 2.0 * params.c_dissip * (-2.0 / (s2 * params.t_max).powf(beta)).exp();
    let t_prime = if c2 > 1.0 {
        (c1 / c2.ln()).powf(1.0 / beta)
    } else {
        params.t_max
    };
    Ok(LRConstants { beta, s1, s2, q, s, c1, c2, t_prime, f0, g0 })
}

/// Outcome of the g(T) ≤ f(qT) scan.
#[derive(Debug, Clone, Copy)]
pub struct ShiftReport {
    pub pass: bool,
    /// First T in the scan at which ln g(T) > ln f(qT), if any.
    pub first_violation: Option<f64>,
}

/// Check g(T) ≤ f(qT) on a 10³-point logarithmic grid over (0, T′]; this is
/// the shift property that makes the telescoping argument close.
pub fn verify_shift_property(constants: &LRConstants) -> ShiftReport {
    let n = 1000;
    let t_hi = constants.t_prime;
    let t_lo = t_hi * 1e-6;
    for i in 0..n {
        let t = t_lo * (t_hi / t_lo).powf(i as f64 / (n - 1) as f64);
        let lg = constants.log_g(t);
        let lf = constants.log_f(constants.q * t);
        if lg > lf + 1e-9 * lf.abs().max(1.0) {
            return ShiftReport { pass: false, first_violation: Some(t) };
        }
    }
    ShiftReport { pass: true, first_violation: None }
}

/// Findings of the finite-dimensional semigroup implication check.
#[derive(Debug, Clone, Copy)]
pub struct SemigroupReport {
    pub samples: usize,
    /// Samples on which the telescoping premise held at every level.
    pub premise_held: usize,
    /// Premise held but the concluded observability inequality failed.
    pub violations: usize,
}

/// ‖B e^{−tA} y‖² for diagonal A.
fn observed_energy(spectrum: &[f64], b: &[Vec<f64>], y: &[f64], t: f64) -> f64 {
    b.iter()
        .map(|row| {
            let v: f64 = row
                .iter()
                .zip(spectrum.iter())
                .zip(y.iter())
                .map(|((bij, lam), yj)| bij * (-lam * t).exp() * yj)
                .sum();
            v * v
        })
        .sum()
}

fn state_energy(spectrum: &[f64], y: &[f64], t: f64) -> f64 {
    spectrum
        .iter()
        .zip(y.iter())
        .map(|(lam, yj)| {
            let v = (-lam * t).exp() * yj;
            v * v
        })
        .sum()
}

/// On the diagonal semigroup e^{−tA} with observation matrix `b`, check the
/// implication of the telescoping lemma: if the approximate estimate
/// f(t)‖e^{−tA}z‖² ≤ f(qt)‖z‖² + ∫₀ᵗ‖Be^{−τA}z‖² holds along the proof's
/// telescoping family z_k = e^{−q^{k+1}TA}y, t_k = (1−q)q^kT, then
/// ‖e^{−TA}y‖² ≤ (1/f((1−q)T)) ∫₀ᵀ‖Be^{−tA}y‖² must hold.
pub fn synthetic_semigroup_check(
    spectrum: &[f64],
    b: &[Vec<f64>],
    constants: &LRConstants,
    ys: &[Vec<f64>],
    ts: &[f64],
) -> Result<SemigroupReport> {
    let n = spectrum.len();
    if n > 64 {
        return Err(GrlbError::InvalidParameter("N must be <= 64".into()));
    }
    if spectrum.iter().any(|&l| l < 0.0) {
        return Err(GrlbError::InvalidParameter(
            "spectrum must be nonnegative".into(),
        ));
    }
    let q = constants.q;
    let mut premise_held = 0usize;
    let mut violations = 0usize;
    let mut samples = 0usize;
    for y in ys {
        for &t_final in ts {
            samples += 1;
            // ∫_α^β ‖Be^{−τA}y‖² dτ by adaptive Simpson
            let observed = |alpha: f64, beta_t: f64| {
                adaptive_simpson(
                    &|tau| observed_energy(spectrum, b, y, tau),
                    alpha,
                    beta_t,
                    1e-12,
                )
            };
            // telescoping premise levels until q^k T is negligible
            let mut ok = true;
            let mut k = 0usize;
            loop {
                let tk = (1.0 - q) * q.powi(k as i32) * t_final;
                if tk < 1e-9 * t_final || k > 600 {
                    break;
                }
                let s_hi = q.powi(k as i32) * t_final; // state time after the step
                let s_lo = q.powi(k as i32 + 1) * t_final; // z_k lives here
                let lhs = constants.log_f(tk).exp() * state_energy(spectrum, y, s_hi);
                let rhs = constants.log_f(q * tk).exp() * state_energy(spectrum, y, s_lo)
                    + observed(s_lo, s_hi);
                if lhs > rhs * (1.0 + 1e-9) + 1e-300 {
                    ok = false;
                    break;
                }
                k += 1;
            }
            if !ok {
                continue;
            }
            premise_held += 1;
            let f_shift = constants.log_f((1.0 - q) * t_final).exp();
            let lhs = state_energy(spectrum, y, t_final);
            let rhs = observed(0.0, t_final) / f_shift.max(1e-300);
            if lhs > rhs * (1.0 + 1e-6) {
                violations += 1;
            }
        }
    }
    Ok(SemigroupReport { samples, premise_held, violations })
}

/// Observation mode for the uniform bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMode {
    /// Annular internal observation with inner radius R₁; T* = R₁²/(2d).
    Internal,
    /// Boundary observation on the ball of radius R; T* = R²/(2d).
    Boundary,
}

/// Ingredients of the uniform-in-μ composition at a supercritical time.
#[derive(Debug, Clone, Copy)]
pub struct UniformBound {
    pub gamma: f64,
    pub delta_gamma: f64,
    /// Radial enlargement (internal mode only; 0 in boundary mode).
    pub epsilon: f64,
    /// Positive exponent margin 2d(T−δ_γ) − (1+γ)(R₁+ε)², resp.
    /// 2dT(1−γ) − R²(1+γ): the coefficient of μ that sends the cost to 0.
    pub margin: f64,
    /// ln of the assembled bound shape e^{1/(T−T*)^{2β}}.
    pub log_bound: f64,
}

/// Compose dissipation with the supercritical observability estimate:
/// γ = (T−T*)/(T*+2T), δ_γ = Tγ, and (internal) ε chosen so the μ-exponent
/// margin stays positive for every T > T*.
pub fn uniform_cost_bound(
    t: f64,
    t_star: f64,
    radius: f64,
    mode: BoundMode,
    beta: f64,
) -> Result<UniformBound> {
    if t <= t_star {
        return Err(GrlbError::InvalidParameter(format!(
            "need T > T*: T = {t}, T* = {t_star}"
        )));
    }
    if t_star <= 0.0 || radius <= 0.0 || beta <= 0.0 {
        return Err(GrlbError::InvalidParameter(
            "t_star, radius, beta must be positive".into(),
        ));
    }
    let gamma = (t - t_star) / (t_star + 2.0 * t);
    let delta_gamma = t * gamma;
    // T* = radius²/(2d) fixes 2d = radius²/T*.
    let two_d = radius * radius / t_star;
    let (epsilon, margin) = match mode {
        BoundMode::Internal => {
            let eps = (radius / 2.0) * (((1.0 - gamma) / (1.0 - 2.0 * gamma)).sqrt() - 1.0);
            let m = two_d * (t - delta_gamma) - (1.0 + gamma) * (radius + eps).powi(2);
            (eps, m)
        }
        BoundMode::Boundary => {
            let m = two_d * t * (1.0 - gamma) - radius * radius * (1.0 + gamma);
            (0.0, m)
        }
    };
    Ok(UniformBound {
        gamma,
        delta_gamma,
        epsilon,
        margin,
        log_bound: 1.0 / (t - t_star).powf(2.0 * beta),
    })
}
