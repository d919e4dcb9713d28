//! Kraus representations of the pure-loss channel in a truncated Fock basis.
//!
//! Photon counting, heterodyne and homodyne readout of the loss mode give
//! three operator families that all describe the same channel:
//!
//! ```text
//! L^P_j      = t^j a^j / √j! · c^n̂
//! L^Het(μ)   = e^{-|μ|²/2} e^{μ* t a} c^n̂          measure d²μ/π
//! L^Hom(x,φ) = Σ_k ψ_k(x) e^{-ikφ} L^P_k             measure dx
//! ```
//!
//! with `s = √γ`, `c = √(1-γ)`, `t = s/c` and `ψ_k` the Hermite functions.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gkp::trig_of_gamma;
use crate::quadrature::gauss_hermite;

/// Loss rate and damping exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    pub gamma: f64,
    pub beta: f64,
}

impl LossParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("damping beta = {beta} must be finite and >= 0")));
        }
        trig_of_gamma(gamma)?;
        Ok(Self { gamma, beta })
    }

    /// Combined damping `d = β - ln c`; infinite at complete loss.
    pub fn effective_damping(&self) -> f64 {
        self.beta - 0.5 * (1.0 - self.gamma).ln()
    }
}

/// A dense operator on the Fock levels `|0⟩ … |N-1⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    pub matrix: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(Error::Domain("Fock operator must be square with cutoff >= 1".into()));
        }
        if matrix.iter().any(|z| !z.is_finite()) {
            return Err(Error::Domain("Fock operator has non-finite entries".into()));
        }
        Ok(Self { matrix })
    }

    pub fn cutoff(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn identity(cutoff: usize) -> Self {
        Self {
            matrix: DMatrix::identity(cutoff, cutoff),
        }
    }

    /// `e^{-βn̂}`.
    pub fn damping(beta: f64, cutoff: usize) -> Self {
        Self {
            matrix: DMatrix::from_fn(cutoff, cutoff, |i, j| {
                if i == j {
                    Complex64::new((-beta * i as f64).exp(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }
}

/// Measurement record of the loss mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum HeraldOutcome {
    PhotonCount(usize),
    Heterodyne(Complex64),
    Homodyne { x: f64, phi: f64 },
    /// Loss mode discarded.
    None,
}

/// `ln k!` for `k = 0..n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for k in 0..n {
        if k > 0 {
            acc += (k as f64).ln();
        }
        out.push(acc);
    }
    out
}

fn check_loss(gamma: f64, cutoff: usize) -> Result<(f64, f64)> {
    let trig = trig_of_gamma(gamma)?;
    if trig.is_complete_loss() {
        return Err(Error::CompleteLoss);
    }
    if cutoff == 0 {
        return Err(Error::Domain("cutoff must be at least 1".into()));
    }
    Ok((trig.t, trig.c))
}

/// Photon-counting Kraus operator for `j` lost photons.
pub fn kraus_photon(j: usize, gamma: f64, cutoff: usize) -> Result<FockOperator> {
    let (t, c) = check_loss(gamma, cutoff)?;
    if j >= cutoff {
        return Err(Error::Cutoff {
            cutoff,
            detail: format!("cannot represent the loss of {j} photons"),
        });
    }
    let lf = ln_factorials(cutoff);
    let mut m = DMatrix::zeros(cutoff, cutoff);
    if j > 0 && t == 0.0 {
        return FockOperator::new(m);
    }
    let ln_t = if j == 0 { 0.0 } else { j as f64 * t.ln() };
    let ln_c = c.ln();
    for n in j..cutoff {
        // t^j √C(n, j) c^n
        let log = ln_t + 0.5 * (lf[n] - lf[j] - lf[n - j]) + n as f64 * ln_c;
        m[(n - j, n)] = Complex64::new(log.exp(), 0.0);
    }
    FockOperator::new(m)
}

/// Heterodyne Kraus operator for outcome `μ`; the `1/π` of the measure is left
/// to the integration weight.
pub fn kraus_heterodyne(mu: Complex64, gamma: f64, cutoff: usize) -> Result<FockOperator> {
    let (t, c) = check_loss(gamma, cutoff)?;
    let lf = ln_factorials(cutoff);
    let env = (-0.5 * mu.norm_sqr()).exp();
    let step = mu.conj() * t;
    let mut m = DMatrix::zeros(cutoff, cutoff);
    let ln_c = c.ln();
    for k in 0..cutoff {
        m[(k, k)] = Complex64::new(env * (k as f64 * ln_c).exp(), 0.0);
    }
    if step.norm() > 0.0 {
        let (r, arg) = step.to_polar();
        let ln_r = r.ln();
        for j in 1..cutoff {
            let phase = Complex64::from_polar(1.0, j as f64 * arg);
            for k in 0..(cutoff - j) {
                // (μ*t)^j / j! · √((k+j)!/k!) · c^{k+j}
                let log = j as f64 * ln_r - lf[j] + 0.5 * (lf[k + j] - lf[k]) + (k + j) as f64 * ln_c;
                m[(k, k + j)] = phase * (env * log.exp());
            }
        }
    }
    FockOperator::new(m)
}

/// Normalized Hermite functions `ψ_0(x) … ψ_{n-1}(x)`.
///
/// The recurrence runs on a rescaled mantissa so that large `|x|`, where
/// `e^{-x²/2}` underflows but high orders are still O(1), stays accurate.
pub fn hermite_functions(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut log_scale = -0.5 * x * x - 0.25 * PI.ln();
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(log_scale.exp());
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            prev *= 1e-150;
            cur *= 1e-150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
        out.push(cur * log_scale.exp());
    }
    out
}

/// Homodyne Kraus operator for outcome `x` of the quadrature rotated by `φ`.
///
/// Built from the Hermite-function expansion `Σ_k ψ_k(x) e^{-ikφ} L^P_k`, the
/// series form of `π^{-1/4} e^{-x²/2} e^{√2 x u - u²/2} c^n̂` with
/// `u = e^{-iφ} t a`.
pub fn kraus_homodyne(x: f64, phi: f64, gamma: f64, cutoff: usize) -> Result<FockOperator> {
    let (t, c) = check_loss(gamma, cutoff)?;
    let lf = ln_factorials(cutoff);
    let psi = hermite_functions(x, cutoff);
    let mut m = DMatrix::zeros(cutoff, cutoff);
    let ln_c = c.ln();
    for k in 0..cutoff {
        if k > 0 && t == 0.0 {
            break;
        }
        let ln_t = if k == 0 { 0.0 } else { k as f64 * t.ln() };
        let phase = Complex64::from_polar(psi[k], -(k as f64) * phi);
        for n in k..cutoff {
            let log = ln_t + 0.5 * (lf[n] - lf[k] - lf[n - k]) + n as f64 * ln_c;
            m[(n - k, n)] = phase * log.exp();
        }
    }
    FockOperator::new(m)
}

/// Recovers `L^P_j` from the heterodyne family as
/// `(1/√j!) ∂ʲ_{μ*} [e^{|μ|²/2} L^Het(μ)]` at `μ* = 0`, using a 64-node
/// trapezoidal Cauchy integral on the unit circle.
pub fn photon_from_heterodyne(j: usize, gamma: f64, cutoff: usize) -> Result<FockOperator> {
    check_loss(gamma, cutoff)?;
    if j >= cutoff {
        return Err(Error::Cutoff {
            cutoff,
            detail: format!("cannot represent the loss of {j} photons"),
        });
    }
    const NODES: usize = 64;
    let mut acc = DMatrix::<Complex64>::zeros(cutoff, cutoff);
    for k in 0..NODES {
        let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / NODES as f64);
        // μ* = w on the contour, so |μ|² = 1
        let op = kraus_heterodyne(w.conj(), gamma, cutoff)?;
        let weight = w.powi(-(j as i32)) * 0.5f64.exp();
        acc += op.matrix * weight;
    }
    let lf = ln_factorials(j + 1);
    let scale = (0.5 * lf[j]).exp() / NODES as f64;
    FockOperator::new(acc * Complex64::new(scale, 0.0))
}

/// `Σ_j L_j ρ L_j†` over every photon number the cutoff can hold.
pub fn apply_photon_sum(rho: &DMatrix<Complex64>, gamma: f64) -> Result<DMatrix<Complex64>> {
    let n = rho.nrows();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let l = kraus_photon(j, gamma, n)?.matrix;
        out += &l * rho * l.adjoint();
    }
    Ok(out)
}

/// `(1/π) ∫ d²μ L^Het(μ) ρ L^Het(μ)†` by a Gauss–Hermite product rule.
///
/// The integrand is `e^{-|μ|²}` times a polynomial of degree below `2N` in
/// each component, so `order ≥ N` makes the rule exact for the truncated
/// operators.
pub fn apply_heterodyne_integral(
    rho: &DMatrix<Complex64>,
    gamma: f64,
    order: usize,
) -> Result<DMatrix<Complex64>> {
    let n = rho.nrows();
    let rule = gauss_hermite(order)?;
    let mut out = DMatrix::zeros(n, n);
    for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
        for (y, wy) in rule.nodes.iter().zip(&rule.weights) {
            let mu = Complex64::new(*x, *y);
            let l = kraus_heterodyne(mu, gamma, n)?.matrix;
            // the rule already carries e^{-|μ|²}, which L ρ L† also contains
            let w = wx * wy * mu.norm_sqr().exp() / PI;
            out += (&l * rho * l.adjoint()) * Complex64::new(w, 0.0);
        }
    }
    Ok(out)
}

/// `∫ dx L^Hom(x, φ)† L^Hom(x, φ)` by Gauss–Hermite quadrature.
pub fn homodyne_completeness(
    phi: f64,
    gamma: f64,
    cutoff: usize,
    order: usize,
) -> Result<DMatrix<Complex64>> {
    let rule = gauss_hermite(order)?;
    let mut out = DMatrix::zeros(cutoff, cutoff);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let l = kraus_homodyne(*x, phi, gamma, cutoff)?.matrix;
        out += (l.adjoint() * &l) * Complex64::new(w * (x * x).exp(), 0.0);
    }
    Ok(out)
}

/// Largest entrywise deviation from the identity on levels `0..levels`.
pub fn identity_defect(m: &DMatrix<Complex64>, levels: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..levels {
        for j in 0..levels {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().map(|l| l.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_photon_operator_is_damping() {
        let l = kraus_photon(0, 0.3, 30).unwrap();
        let beta = -(0.7f64).sqrt().ln();
        let d = FockOperator::damping(beta, 30);
        assert!(max_diff(&l.matrix, &d.matrix) < 1e-15);
        for n in 0..30 {
            assert!((l.matrix[(n, n)].re - 0.7f64.powf(n as f64 / 2.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn single_photon_element() {
        let l = kraus_photon(1, 0.5, 10).unwrap();
        assert!((l.matrix[(1, 2)].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(l.matrix[(2, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn photon_completeness() {
        for gamma in [0.1, 0.3, 0.7] {
            let n = 60;
            let mut sum = DMatrix::zeros(n, n);
            for j in 0..n {
                let l = kraus_photon(j, gamma, n).unwrap().matrix;
                sum += l.adjoint() * l;
            }
            assert!(identity_defect(&sum, n / 2) < 1e-10, "gamma {gamma}");
        }
    }

    #[test]
    fn complete_loss_is_rejected() {
        assert_eq!(kraus_photon(0, 1.0, 5).unwrap_err(), Error::CompleteLoss);
        assert_eq!(kraus_heterodyne(Complex64::new(0.0, 0.0), 1.0, 5).unwrap_err(), Error::CompleteLoss);
        assert_eq!(kraus_homodyne(0.0, 0.0, 1.0, 5).unwrap_err(), Error::CompleteLoss);
    }

    #[test]
    fn heterodyne_at_origin_is_damping() {
        for gamma in [0.0, 0.2, 0.6] {
            let a = kraus_heterodyne(Complex64::new(0.0, 0.0), gamma, 25).unwrap();
            let b = kraus_photon(0, gamma, 25).unwrap();
            assert!(max_diff(&a.matrix, &b.matrix) < 1e-15);
        }
        let mu = Complex64::new(0.8, -1.3);
        let l = kraus_heterodyne(mu, 0.4, 20).unwrap();
        assert!((l.matrix[(0, 0)].re - (-0.5 * mu.norm_sqr()).exp()).abs() < 1e-15);
    }

    #[test]
    fn heterodyne_is_a_photon_series() {
        let gamma = 0.35;
        let n = 30;
        let mu = Complex64::new(0.6, 0.9);
        let lf = ln_factorials(n);
        let mut sum = DMatrix::zeros(n, n);
        for j in 0..n {
            let coeff = mu.conj().powi(j as i32) / (0.5 * lf[j]).exp();
            sum += kraus_photon(j, gamma, n).unwrap().matrix * coeff;
        }
        sum *= Complex64::new((-0.5 * mu.norm_sqr()).exp(), 0.0);
        let het = kraus_heterodyne(mu, gamma, n).unwrap();
        assert!(max_diff(&sum, &het.matrix) < 1e-10);
    }

    #[test]
    fn photon_operators_from_heterodyne_contour() {
        for (j, gamma) in [(0usize, 0.3), (1, 0.3), (2, 0.5)] {
            let a = photon_from_heterodyne(j, gamma, 40).unwrap();
            let b = kraus_photon(j, gamma, 40).unwrap();
            let diff = (&a.matrix - &b.matrix).norm();
            assert!(diff < 1e-8, "j={j}: {diff:e}");
        }
    }

    #[test]
    fn homodyne_without_loss_is_scalar() {
        let x = 0.7;
        let l = kraus_homodyne(x, 0.4, 0.0, 12).unwrap();
        let expected = PI.powf(-0.25) * (-0.5 * x * x).exp();
        let target = DMatrix::identity(12, 12) * Complex64::new(expected, 0.0);
        assert!(max_diff(&l.matrix, &target) < 1e-15);
    }

    #[test]
    fn homodyne_matches_generating_function() {
        // compare ⟨n-k|L|n⟩ with the coefficient of the closed exponential
        // π^{-1/4} e^{-x²/2} e^{√2 x u - u²/2} c^n̂, expanded by hand to second order
        let (x, gamma): (f64, f64) = (0.4, 0.3);
        let t = (gamma / (1.0 - gamma)).sqrt();
        let c = (1.0 - gamma).sqrt();
        let l = kraus_homodyne(x, 0.0, gamma, 6).unwrap();
        let pref = PI.powf(-0.25) * (-0.5 * x * x).exp();
        // a² coefficient: (√2 x)²/2 - 1/2
        let coeff2 = (2.0 * x * x) / 2.0 - 0.5;
        let a2_elem = (3.0f64 * 2.0).sqrt(); // ⟨1|a²|3⟩
        let expected = pref * coeff2 * t * t * a2_elem * c.powi(3);
        assert!((l.matrix[(1, 3)].re - expected).abs() < 1e-14);
    }

    #[test]
    fn homodyne_completeness_on_protected_levels() {
        for gamma in [0.1, 0.3, 0.7] {
            let m = homodyne_completeness(0.3, gamma, 40, 60).unwrap();
            assert!(identity_defect(&m, 20) < 1e-8, "gamma {gamma}");
        }
    }

    #[test]
    fn homodyne_phase_covariance() {
        let n = 20;
        let phi = 0.83;
        // R = e^{-iφn̂} gives R† a R = e^{-iφ} a
        let r = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, -phi * i as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let base = kraus_homodyne(-0.9, 0.0, 0.4, n).unwrap().matrix;
        let rotated = kraus_homodyne(-0.9, phi, 0.4, n).unwrap().matrix;
        assert!(max_diff(&(r.adjoint() * base * &r), &rotated) < 1e-12);
    }

    #[test]
    fn photon_and_heterodyne_channels_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 16;
        let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut rho = &g * g.adjoint();
        let tr = rho.trace();
        rho /= tr;
        let a = apply_photon_sum(&rho, 0.3).unwrap();
        let b = apply_heterodyne_integral(&rho, 0.3, n + 2).unwrap();
        assert!(trace_norm(&(a - b)) < 1e-10);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let rule = gauss_hermite(80).unwrap();
        let n = 30;
        let mut gram = DMatrix::<f64>::zeros(n, n);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let psi = hermite_functions(*x, n);
            let w = w * (x * x).exp();
            for i in 0..n {
                for j in 0..n {
                    gram[(i, j)] += w * psi[i] * psi[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hermite_functions_survive_large_arguments() {
        // e^{-x²/2} underflows at x = 40, yet ψ_k(40) is O(1) for k near 800;
        // the local density Σ_k ψ_k(x)² follows the semicircle √(2N - x²)/π
        let n = 1200;
        let psi = hermite_functions(40.0, n);
        assert!(psi.iter().all(|v| v.is_finite()));
        let density: f64 = psi.iter().map(|v| v * v).sum();
        let semicircle = (2.0 * n as f64 - 1600.0).sqrt() / PI;
        assert!((density / semicircle - 1.0).abs() < 0.05, "{density} vs {semicircle}");
        assert!(psi[..400].iter().all(|v| v.abs() < 1e-30));
    }
}
