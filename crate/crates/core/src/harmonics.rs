//! Real orthonormal bases of sphere harmonics in dimensions 2 and 3, region
//! Gram matrices, and spectral-inequality constants on subsets of the sphere.
//!
//! d = 2 uses the Fourier basis {1/√(2π), cos(mθ)/√π, sin(mθ)/√π} on the unit
//! circle; d = 3 uses real spherical harmonics built from associated Legendre
//! functions. All bases are orthonormal for the surface measure.

use crate::error::{GrlbError, Result};
use crate::linalg::{self, SymMatrix};
use crate::quadrature::gauss_legendre;

use std::f64::consts::PI;

/// Trigonometric flavor of a basis function in its periodic variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// The constant / zonal member (order 0).
    Zonal,
    Cos,
    Sin,
}

/// One member of the real harmonic basis at degree m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularMode {
    pub d: u32,
    /// Degree m ≥ 0 (eigenvalue of the sphere Laplacian is m(m+d−2)).
    pub m: u32,
    /// Azimuthal order: 0 for the zonal member, 1..=m otherwise (d = 3);
    /// equal to m for d = 2.
    pub order: u32,
    pub parity: Parity,
}

/// Number of linearly independent harmonics of degree m on S^{d−1}.
pub fn multiplicity(m: u32, d: u32) -> usize {
    match (m, d) {
        (0, _) => 1,
        (_, 2) => 2,
        (m, 3) => (2 * m + 1) as usize,
        _ => panic!("multiplicity: d must be 2 or 3"),
    }
}

/// All basis members of degree strictly below `deg_max`, ordered by (m, order, parity).
pub fn all_modes(d: u32, deg_max: u32) -> Vec<AngularMode> {
    let mut out = Vec::new();
    for m in 0..deg_max {
        if m == 0 {
            out.push(AngularMode { d, m, order: 0, parity: Parity::Zonal });
            continue;
        }
        match d {
            2 => {
                out.push(AngularMode { d, m, order: m, parity: Parity::Cos });
                out.push(AngularMode { d, m, order: m, parity: Parity::Sin });
            }
            3 => {
                out.push(AngularMode { d, m, order: 0, parity: Parity::Zonal });
                for l in 1..=m {
                    out.push(AngularMode { d, m, order: l, parity: Parity::Cos });
                    out.push(AngularMode { d, m, order: l, parity: Parity::Sin });
                }
            }
            _ => panic!("all_modes: d must be 2 or 3"),
        }
    }
    out
}

/// Associated Legendre P_m^l(x) without Condon–Shortley phase.
fn assoc_legendre(m: u32, l: u32, x: f64) -> f64 {
    debug_assert!(l <= m);
    // P_l^l by the closed form, then upward recurrence in degree.
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pll = 1.0;
    for k in 1..=l {
        pll *= (2 * k - 1) as f64 * somx2;
    }
    if m == l {
        return pll;
    }
    let mut pl1 = pll; // P_l^l
    let mut pl2 = x * (2 * l + 1) as f64 * pll; // P_{l+1}^l
    if m == l + 1 {
        return pl2;
    }
    for deg in (l + 2)..=m {
        let deg = deg as f64;
        let lf = l as f64;
        let next = ((2.0 * deg - 1.0) * x * pl2 - (deg + lf - 1.0) * pl1) / (deg - lf);
        pl1 = pl2;
        pl2 = next;
    }
    pl2
}

fn factorial_ratio(m: u32, l: u32) -> f64 {
    // (m - l)! / (m + l)!
    let mut r = 1.0;
    for k in (m - l + 1)..=(m + l) {
        r /= k as f64;
    }
    r
}

impl AngularMode {
    /// Point evaluation. For d = 2 pass `[theta]`; for d = 3 pass
    /// `[theta, phi]` with polar angle θ ∈ [0, π] and azimuth φ.
    pub fn evaluate(&self, angles: &[f64]) -> f64 {
        match self.d {
            2 => {
                let theta = angles[0];
                match self.parity {
                    Parity::Zonal => 1.0 / (2.0 * PI).sqrt(),
                    Parity::Cos => (self.m as f64 * theta).cos() / PI.sqrt(),
                    Parity::Sin => (self.m as f64 * theta).sin() / PI.sqrt(),
                }
            }
            3 => {
                let (theta, phi) = (angles[0], angles[1]);
                let m = self.m;
                let l = self.order;
                let norm = ((2 * m + 1) as f64 / (4.0 * PI) * factorial_ratio(m, l)).sqrt();
                let p = assoc_legendre(m, l, theta.cos());
                match self.parity {
                    Parity::Zonal => norm * p,
                    Parity::Cos => 2f64.sqrt() * norm * p * (l as f64 * phi).cos(),
                    Parity::Sin => 2f64.sqrt() * norm * p * (l as f64 * phi).sin(),
                }
            }
            _ => panic!("evaluate: d must be 2 or 3"),
        }
    }
}

/// Subset of the unit sphere over which region Grams are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularRegion {
    /// d = 2 circular arc θ ∈ [theta1, theta2].
    Arc { theta1: f64, theta2: f64 },
    /// d = 3 patch: polar θ ∈ [theta1, theta2], azimuth φ ∈ [phi1, phi2].
    /// A polar cap is `phi1 = 0, phi2 = 2π`.
    Patch { theta1: f64, theta2: f64, phi1: f64, phi2: f64 },
}

impl AngularRegion {
    pub fn full_sphere(d: u32) -> Self {
        match d {
            2 => AngularRegion::Arc { theta1: 0.0, theta2: 2.0 * PI },
            3 => AngularRegion::Patch { theta1: 0.0, theta2: PI, phi1: 0.0, phi2: 2.0 * PI },
            _ => panic!("full_sphere: d must be 2 or 3"),
        }
    }

    pub fn dimension(&self) -> u32 {
        match self {
            AngularRegion::Arc { .. } => 2,
            AngularRegion::Patch { .. } => 3,
        }
    }

    /// Surface measure of the region.
    pub fn measure(&self) -> f64 {
        match *self {
            AngularRegion::Arc { theta1, theta2 } => theta2 - theta1,
            AngularRegion::Patch { theta1, theta2, phi1, phi2 } => {
                (theta1.cos() - theta2.cos()) * (phi2 - phi1)
            }
        }
    }
}

/// ∫ₐᵇ cos(kθ) dθ.
fn int_cos(k: f64, a: f64, b: f64) -> f64 {
    if k == 0.0 {
        b - a
    } else {
        ((k * b).sin() - (k * a).sin()) / k
    }
}

/// ∫ₐᵇ sin(kθ) dθ.
fn int_sin(k: f64, a: f64, b: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        ((k * a).cos() - (k * b).cos()) / k
    }
}

/// ∫ over the periodic variable of the (normalized-free) trig factors,
/// reduced to sums of single-frequency integrals.
fn trig_product_integral(pa: Parity, ka: f64, pb: Parity, kb: f64, a: f64, b: f64) -> f64 {
    match (pa, pb) {
        (Parity::Zonal, Parity::Zonal) => b - a,
        (Parity::Zonal, Parity::Cos) => int_cos(kb, a, b),
        (Parity::Cos, Parity::Zonal) => int_cos(ka, a, b),
        (Parity::Zonal, Parity::Sin) => int_sin(kb, a, b),
        (Parity::Sin, Parity::Zonal) => int_sin(ka, a, b),
        (Parity::Cos, Parity::Cos) => 0.5 * (int_cos(ka - kb, a, b) + int_cos(ka + kb, a, b)),
        (Parity::Sin, Parity::Sin) => 0.5 * (int_cos(ka - kb, a, b) - int_cos(ka + kb, a, b)),
        (Parity::Sin, Parity::Cos) => 0.5 * (int_sin(ka + kb, a, b) + int_sin(ka - kb, a, b)),
        (Parity::Cos, Parity::Sin) => 0.5 * (int_sin(ka + kb, a, b) - int_sin(ka - kb, a, b)),
    }
}

/// ∫_Γ Y_a Y_b dσ over the region. Closed form for d = 2 arcs; for d = 3 the
/// azimuthal factor is closed form and the polar factor uses Gauss–Legendre.
pub fn angular_mass(region: &AngularRegion, a: &AngularMode, b: &AngularMode) -> f64 {
    match *region {
        AngularRegion::Arc { theta1, theta2 } => {
            debug_assert!(a.d == 2 && b.d == 2);
            let norm_a = if a.parity == Parity::Zonal { 1.0 / (2.0 * PI).sqrt() } else { 1.0 / PI.sqrt() };
            let norm_b = if b.parity == Parity::Zonal { 1.0 / (2.0 * PI).sqrt() } else { 1.0 / PI.sqrt() };
            norm_a
                * norm_b
                * trig_product_integral(a.parity, a.m as f64, b.parity, b.m as f64, theta1, theta2)
        }
        AngularRegion::Patch { theta1, theta2, phi1, phi2 } => {
            debug_assert!(a.d == 3 && b.d == 3);
            let norm_a = ((2 * a.m + 1) as f64 / (4.0 * PI) * factorial_ratio(a.m, a.order)).sqrt()
                * if a.parity == Parity::Zonal { 1.0 } else { 2f64.sqrt() };
            let norm_b = ((2 * b.m + 1) as f64 / (4.0 * PI) * factorial_ratio(b.m, b.order)).sqrt()
                * if b.parity == Parity::Zonal { 1.0 } else { 2f64.sqrt() };
            let azimuth = trig_product_integral(
                a.parity,
                a.order as f64,
                b.parity,
                b.order as f64,
                phi1,
                phi2,
            );
            if azimuth == 0.0 {
                return 0.0;
            }
            // polar factor in x = cos θ; integrand is polynomial × possible
            // sqrt factors, degree ≤ a.m + b.m, so a fixed high rule suffices
            let n_gauss = ((a.m + b.m) as usize + 16).max(32);
            let (xs, ws) = gauss_legendre(n_gauss, theta2.cos(), theta1.cos());
            let polar: f64 = xs
                .iter()
                .zip(ws.iter())
                .map(|(&x, &w)| {
                    w * assoc_legendre(a.m, a.order, x) * assoc_legendre(b.m, b.order, x)
                })
                .sum();
            norm_a * norm_b * polar * azimuth
        }
    }
}

/// Gram matrix of the modes restricted to the region.
pub fn region_gram(region: &AngularRegion, modes: &[AngularMode]) -> SymMatrix {
    let n = modes.len();
    let mut g = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            g.set(i, j, angular_mass(region, &modes[i], &modes[j]));
        }
    }
    g
}

/// Smallest constant C(M) with ∫_S |f|² ≤ C(M) ∫_Γ |f|² over all combinations
/// f of harmonics of degree < M, i.e. 1/λ_min of the region Gram (the
/// full-sphere Gram is the identity).
pub fn spectral_inequality_constant(region: &AngularRegion, deg_max: u32) -> Result<f64> {
    let modes = all_modes(region.dimension(), deg_max);
    let gram = region_gram(region, &modes);
    // Jacobi scaling keeps the bisection well conditioned when the arc mass
    // of high degrees is tiny; undo it via the Rayleigh quotient afterwards.
    let n = modes.len();
    let diag: Vec<f64> = (0..n).map(|i| gram.get(i, i)).collect();
    if diag.iter().any(|&x| x <= 0.0) {
        return Err(GrlbError::SingularRegionGram { cond: f64::INFINITY });
    }
    let scale: Vec<f64> = diag.iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut scaled = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            scaled.set(i, j, gram.get(i, j) * scale[i] * scale[j]);
        }
    }
    let (vals, vecs) = linalg::sym_eigen(&scaled)?;
    if vals[0] <= 0.0 {
        return Err(GrlbError::SingularRegionGram {
            cond: vals[n - 1] / vals[0].abs().max(f64::MIN_POSITIVE),
        });
    }
    // eigenvector of the scaled problem, mapped back: v = D^{1/2 scaling} u.
    // It is only approximate for the unscaled Gram, so refine by a few steps
    // of inverse iteration through a Cholesky factor before taking the
    // Rayleigh quotient.
    let u = &vecs[0];
    let mut v: Vec<f64> = (0..n).map(|i| u[i] * scale[i]).collect();
    if let Ok(l) = linalg::cholesky(&gram) {
        for _ in 0..4 {
            let w = linalg::cholesky_solve(&l, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            v = w.iter().map(|x| x / norm).collect();
        }
    }
    let mut gv = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            gv[i] += gram.get(i, j) * v[j];
        }
    }
    let num: f64 = v.iter().zip(gv.iter()).map(|(a, b)| a * b).sum();
    let den: f64 = v.iter().map(|a| a * a).sum();
    let lambda_min = num / den;
    if lambda_min <= 0.0 {
        return Err(GrlbError::SingularRegionGram { cond: f64::INFINITY });
    }
    Ok(1.0 / lambda_min)
}

// ----- exact arc spectral constants in extended precision ------------------
//
// On arcs whose length is a multiple of π/4, every Gram entry is of the form
// q₁ + (q₂ + q₃√2)/π with rational qᵢ, because sin and cos at multiples of
// π/4 take values in {0, ±1, ±√2/2}. Assembling the Gram in 640-bit floats
// and counting eigenvalues by Sylvester inertia lets us evaluate constants
// far beyond f64 range: λ_min of the quarter-arc Gram decays roughly like
// e^{−9.4 M} and is below f64 rounding noise from degree 6 on.

use crate::bigfloat::{self, BigF};

/// sin(nπ/4) exactly.
fn sin_q(n: i64) -> BigF {
    let half_sqrt2 = bigfloat::SQRT2.mul(&BigF::ratio(1, 2));
    match n.rem_euclid(8) {
        0 | 4 => bigfloat::ZERO,
        1 | 3 => half_sqrt2,
        2 => BigF::from_i64(1),
        5 | 7 => half_sqrt2.neg(),
        6 => BigF::from_i64(-1),
        _ => unreachable!(),
    }
}

/// cos(nπ/4) exactly.
fn cos_q(n: i64) -> BigF {
    sin_q(n + 2)
}

/// ∫₀^{kπ/4} cos(jθ) dθ.
fn int_cos_b(j: i64, k: i64) -> BigF {
    if j == 0 {
        bigfloat::PI.mul(&BigF::ratio(k, 4))
    } else {
        sin_q(j * k).div(&BigF::from_i64(j))
    }
}

/// ∫₀^{kπ/4} sin(jθ) dθ.
fn int_sin_b(j: i64, k: i64) -> BigF {
    if j == 0 {
        bigfloat::ZERO
    } else {
        BigF::from_i64(1).sub(&cos_q(j * k)).div(&BigF::from_i64(j))
    }
}

fn trig_product_integral_b(pa: Parity, ma: i64, pb: Parity, mb: i64, k: i64) -> BigF {
    let half = BigF::ratio(1, 2);
    match (pa, pb) {
        (Parity::Zonal, Parity::Zonal) => bigfloat::PI.mul(&BigF::ratio(k, 4)),
        (Parity::Zonal, Parity::Cos) => int_cos_b(mb, k),
        (Parity::Cos, Parity::Zonal) => int_cos_b(ma, k),
        (Parity::Zonal, Parity::Sin) => int_sin_b(mb, k),
        (Parity::Sin, Parity::Zonal) => int_sin_b(ma, k),
        (Parity::Cos, Parity::Cos) => {
            half.mul(&int_cos_b(ma - mb, k).add(&int_cos_b(ma + mb, k)))
        }
        (Parity::Sin, Parity::Sin) => {
            half.mul(&int_cos_b(ma - mb, k).sub(&int_cos_b(ma + mb, k)))
        }
        (Parity::Sin, Parity::Cos) => {
            half.mul(&int_sin_b(ma + mb, k).add(&int_sin_b(ma - mb, k)))
        }
        (Parity::Cos, Parity::Sin) => {
            half.mul(&int_sin_b(ma + mb, k).sub(&int_sin_b(ma - mb, k)))
        }
    }
}

/// Gram of the d = 2 modes of degree < deg_max over the arc (0, kπ/4), in
/// extended precision (full symmetric storage).
fn exact_arc_gram(k: i64, deg_max: u32) -> Vec<Vec<BigF>> {
    let modes = all_modes(2, deg_max);
    let n = modes.len();
    let inv_pi = bigfloat::PI.recip();
    // products of the basis normalizations: 1/(2π), √2/(2π), or 1/π
    let norm = |pa: Parity, pb: Parity| -> BigF {
        match (pa == Parity::Zonal, pb == Parity::Zonal) {
            (true, true) => inv_pi.mul(&BigF::ratio(1, 2)),
            (true, false) | (false, true) => {
                inv_pi.mul(&bigfloat::SQRT2).mul(&BigF::ratio(1, 2))
            }
            (false, false) => inv_pi,
        }
    };
    let mut g = vec![vec![bigfloat::ZERO; n]; n];
    for i in 0..n {
        for j in i..n {
            let (a, b) = (&modes[i], &modes[j]);
            let v = norm(a.parity, b.parity).mul(&trig_product_integral_b(
                a.parity, a.m as i64, b.parity, b.m as i64, k,
            ));
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

/// Number of eigenvalues of `g` strictly below `lam`, by counting negative
/// pivots in a symmetric elimination of g − λI (Sylvester's law of inertia).
fn count_below(g: &[Vec<BigF>], lam: &BigF) -> usize {
    let n = g.len();
    let mut a: Vec<Vec<BigF>> = g.to_vec();
    for i in 0..n {
        a[i][i] = a[i][i].sub(lam);
    }
    let mut neg = 0;
    for k in 0..n {
        let mut d = a[k][k];
        if d.sign == 0 {
            // exact-zero pivot is measure zero; nudge below working precision
            d = BigF { sign: 1, exp: lam.exp - 64, ..lam.abs() };
        }
        if d.sign < 0 {
            neg += 1;
        }
        let inv_d = d.recip();
        for i in (k + 1)..n {
            let f = a[k][i].mul(&inv_d);
            for j in i..n {
                let upd = a[i][j].sub(&f.mul(&a[k][j]));
                a[i][j] = upd;
                a[j][i] = upd;
            }
        }
    }
    neg
}

fn pow2_big(j: i64) -> BigF {
    let mut mant = [0u64; bigfloat::LIMBS];
    mant[bigfloat::LIMBS - 1] = 1u64 << 63;
    BigF { sign: 1, exp: j - (64 * bigfloat::LIMBS as i64 - 1), mant }
}

/// ln C(M) for the arc (0, kπ/4) and degrees < deg_max, evaluated exactly
/// enough to reach constants like e^{300} that overflow the f64 Gram path.
/// `arc_quarters` = k ∈ 1..=8; k = 8 is the full circle (C = 1).
pub fn log_spectral_constant_exact(arc_quarters: u32, deg_max: u32) -> Result<f64> {
    if arc_quarters == 0 || arc_quarters > 8 {
        return Err(GrlbError::InvalidParameter(
            "arc_quarters must be in 1..=8".into(),
        ));
    }
    if deg_max == 0 {
        return Err(GrlbError::InvalidParameter("deg_max must be >= 1".into()));
    }
    if arc_quarters == 8 {
        return Ok(0.0);
    }
    let g = exact_arc_gram(arc_quarters as i64, deg_max);
    // λ_min ∈ (0, 1): the arc Gram is dominated by the full-circle identity.
    // Locate the magnitude first: smallest j ≥ 1 with no eigenvalue below 2^{−j}.
    let mut j_hi: i64 = 1;
    while count_below(&g, &pow2_big(-j_hi)) > 0 {
        j_hi *= 2;
        if j_hi > 1 << 14 {
            return Err(GrlbError::SingularRegionGram { cond: f64::INFINITY });
        }
    }
    let mut j_lo = j_hi / 2; // count > 0 here (or j_hi == 1)
    while j_hi - j_lo > 1 {
        let mid = (j_lo + j_hi) / 2;
        if count_below(&g, &pow2_big(-mid)) == 0 {
            j_hi = mid;
        } else {
            j_lo = mid;
        }
    }
    // bracket [2^{−j_hi}, 2^{−j_hi+1}) then bisect the value itself
    let mut lo = pow2_big(-j_hi);
    let mut hi = pow2_big(-j_hi + 1);
    let half = BigF::ratio(1, 2);
    for _ in 0..40 {
        let mid = lo.add(&hi).mul(&half);
        if count_below(&g, &mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // C = 1/λ_min; report ln C from the base-2 magnitude
    Ok(-lo.log2_abs() * std::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity(0, 2), 1);
        assert_eq!(multiplicity(0, 3), 1);
        assert_eq!(multiplicity(5, 2), 2);
        assert_eq!(multiplicity(2, 3), 5);
        let total: usize = (0..10).map(|m| multiplicity(m, 2)).sum();
        assert_eq!(total, 2 * 10 - 1);
        assert_eq!(all_modes(2, 10).len(), total);
        assert_eq!(all_modes(3, 4).len(), 1 + 3 + 5 + 7);
    }

    #[test]
    fn full_sphere_gram_is_identity_d2() {
        let modes = all_modes(2, 8);
        let region = AngularRegion::full_sphere(2);
        let g = region_gram(&region, &modes);
        for i in 0..modes.len() {
            for j in 0..modes.len() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g.get(i, j) - expect).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn full_sphere_gram_is_identity_d3() {
        let modes = all_modes(3, 5);
        let region = AngularRegion::full_sphere(3);
        let g = region_gram(&region, &modes);
        for i in 0..modes.len() {
            for j in 0..modes.len() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (g.get(i, j) - expect).abs() < 1e-10,
                    "({i},{j}): {}",
                    g.get(i, j)
                );
            }
        }
    }

    #[test]
    fn closed_form_arc_mass_matches_quadrature() {
        let region = AngularRegion::Arc { theta1: 0.3, theta2: 1.7 };
        let modes = all_modes(2, 6);
        for a in &modes {
            for b in &modes {
                let exact = angular_mass(&region, a, b);
                let numeric = crate::quadrature::simpson(
                    |t| a.evaluate(&[t]) * b.evaluate(&[t]),
                    0.3,
                    1.7,
                    2000,
                );
                assert!((exact - numeric).abs() < 1e-10, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn evaluate_matches_known_harmonics() {
        // Y_0^0 = 1/sqrt(4 pi); Y_1 zonal = sqrt(3/4pi) cos(theta)
        let y00 = AngularMode { d: 3, m: 0, order: 0, parity: Parity::Zonal };
        assert!((y00.evaluate(&[0.7, 1.2]) - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-14);
        let y10 = AngularMode { d: 3, m: 1, order: 0, parity: Parity::Zonal };
        let theta: f64 = 0.9;
        let expect = (3.0 / (4.0 * PI)).sqrt() * theta.cos();
        assert!((y10.evaluate(&[theta, 0.0]) - expect).abs() < 1e-14);
        // Y_1 cos: sqrt(3/4pi) sin(theta) cos(phi)
        let y11 = AngularMode { d: 3, m: 1, order: 1, parity: Parity::Cos };
        let (t, p): (f64, f64) = (1.1, 0.4);
        let expect = (3.0 / (4.0 * PI)).sqrt() * t.sin() * p.cos();
        assert!((y11.evaluate(&[t, p]) - expect).abs() < 1e-13);
    }

    #[test]
    fn spectral_constant_full_region_is_one() {
        let c = spectral_inequality_constant(&AngularRegion::full_sphere(2), 6).unwrap();
        assert!((c - 1.0).abs() < 1e-8, "{c}");
    }

    #[test]
    fn spectral_constant_grows_on_quarter_arc() {
        // f64 only reaches degree 4 here: λ_min of the quarter-arc Gram is
        // already ~7e−13 at degree 4 and below rounding noise by degree 6
        let region = AngularRegion::Arc { theta1: 0.0, theta2: PI / 4.0 };
        let mut prev = 0.0;
        for deg in [2u32, 3, 4] {
            let c = spectral_inequality_constant(&region, deg).unwrap();
            assert!(c > prev, "deg {deg}: {c} vs {prev}");
            assert!(c >= 1.0);
            prev = c;
        }
        assert!(prev > 1e3, "C(4) = {prev}");
    }

    #[test]
    fn exact_arc_constant_matches_f64_where_both_work() {
        let region = AngularRegion::Arc { theta1: 0.0, theta2: PI / 4.0 };
        for deg in [2u32, 3, 4] {
            let c = spectral_inequality_constant(&region, deg).unwrap();
            let log_c = log_spectral_constant_exact(1, deg).unwrap();
            // f64 accuracy here is eps·cond(G): λ_min(deg 4) ≈ 7e−13 leaves
            // only ~4 good digits, so compare at the level f64 can support
            assert!(
                (log_c - c.ln()).abs() < 1e-3 * c.ln().max(1.0),
                "deg {deg}: exact {log_c} vs f64 {}",
                c.ln()
            );
        }
    }

    #[test]
    fn exact_arc_constant_grows_past_f64_range() {
        // the quarter-arc constant keeps growing geometrically long after the
        // f64 Gram path has gone singular (around degree 6)
        let mut prev = 0.0;
        for deg in [6u32, 10, 14, 18] {
            let log_c = log_spectral_constant_exact(1, deg).unwrap();
            assert!(log_c > prev + 5.0, "deg {deg}: {log_c} vs {prev}");
            prev = log_c;
        }
        assert!(prev > 100.0, "ln C(18) = {prev}");
        // full circle is the trivial constant
        assert_eq!(log_spectral_constant_exact(8, 12).unwrap(), 0.0);
        // longer arcs see more mass, so the constant is smaller
        let quarter = log_spectral_constant_exact(1, 8).unwrap();
        let half = log_spectral_constant_exact(2, 8).unwrap();
        assert!(half < quarter);
        assert!(log_spectral_constant_exact(9, 4).is_err());
    }

    #[test]
    fn spectral_constant_cap_d3() {
        let region = AngularRegion::Patch { theta1: 0.0, theta2: PI / 3.0, phi1: 0.0, phi2: 2.0 * PI };
        let c2 = spectral_inequality_constant(&region, 2).unwrap();
        let c4 = spectral_inequality_constant(&region, 4).unwrap();
        assert!(c4 > c2 && c2 >= 1.0);
    }
}
