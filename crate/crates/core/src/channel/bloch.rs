//! Heterodyne- and photon-heralded Bloch four-vectors.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BlochFourVector, ChannelParams};
use crate::error::{Error, Result};
use crate::gkp::{PauliIndex, Syndrome, SQRT_PI};
use crate::loss::ln_factorials;
use crate::theta::{PreparedTheta, SiegelMatrix, ThetaOptions};

const THETA_TOL: f64 = 1e-14;
const CONTOUR_NODES: usize = 64;

/// `τ^Het = i·tau_imag·I` and `z^Het = z_scale·μ*·(1, i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeterodyneParameters {
    pub tau_imag: f64,
    pub z: [Complex64; 2],
}

/// Θ parameters of the heterodyne-heralded Bloch vector.
pub fn heterodyne_parameters(params: &ChannelParams, mu: Complex64) -> HeterodyneParameters {
    let trig = params.trig();
    let eb = params.beta.exp();
    let tau_imag = (0.5 * (params.beta - trig.c.ln())).tanh();
    let scale = -trig.s / ((2.0 * PI).sqrt() * (trig.c + eb));
    let zq = mu.conj() * scale;
    HeterodyneParameters {
        tau_imag,
        z: [zq, zq * Complex64::new(0.0, 1.0)],
    }
}

/// Θ parameters of the damping-only channel.
pub fn damping_only_parameters(beta: f64) -> HeterodyneParameters {
    HeterodyneParameters {
        tau_imag: (0.5 * beta).tanh(),
        z: [Complex64::new(0.0, 0.0); 2],
    }
}

/// Everything in `r^Het` that depends only on `(β, γ)`.
#[derive(Clone, Debug)]
pub struct HeterodyneKernel {
    params: ChannelParams,
    prefactor: f64,
    z_scale: f64,
    theta: PreparedTheta,
}

impl HeterodyneKernel {
    pub fn new(params: &ChannelParams) -> Result<Self> {
        if params.is_complete_loss() {
            return Err(Error::CompleteLoss);
        }
        let trig = params.trig();
        let eb = params.beta.exp();
        let hp = heterodyne_parameters(params, Complex64::new(1.0, 0.0));
        let tau = SiegelMatrix::scaled_identity(2, Complex64::new(0.0, hp.tau_imag))?;
        Ok(Self {
            params: *params,
            prefactor: eb / (SQRT_PI * (trig.c + eb)),
            z_scale: -trig.s / ((2.0 * PI).sqrt() * (trig.c + eb)),
            theta: PreparedTheta::new(&tau, THETA_TOL, ThetaOptions::default())?,
        })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    /// `e^{|μ|²/2} r^Het_a`, an entire function of `μ*` alone.
    pub fn entire(&self, a: PauliIndex, mu_conj: Complex64, m: &Syndrome) -> Result<Complex64> {
        let av = a.vector();
        let mq = m.frac_q / SQRT_PI;
        let mp = m.frac_p / SQRT_PI;
        let wp = [0.5 * (av[0] as f64 + mq), 0.5 * (av[1] as f64 + mp)];
        let wm = [0.5 * (av[0] as f64 - mq), 0.5 * (av[1] as f64 - mp)];
        // v₁ = -Ω w⁺, v₂ = w⁻
        let v1 = [-wp[1], wp[0]];
        let phase = PI * (wm[0] * wp[1] - wm[1] * wp[0]);
        let zq = mu_conj * self.z_scale;
        let z = [zq, zq * Complex64::new(0.0, 1.0)];
        let theta = self.theta.eval_scaled(&v1, &wm, &z)?;
        let pref = Complex64::from_polar(self.prefactor, phase);
        Ok(pref * theta.value())
    }

    pub fn heterodyne(&self, a: PauliIndex, mu: Complex64, m: &Syndrome) -> Result<Complex64> {
        Ok(self.entire(a, mu.conj(), m)? * (-0.5 * mu.norm_sqr()).exp())
    }

    pub fn heterodyne_vector(&self, mu: Complex64, m: &Syndrome) -> Result<BlochFourVector> {
        let mut r = [Complex64::new(0.0, 0.0); 4];
        for a in PauliIndex::ALL {
            r[a.index()] = self.heterodyne(a, mu, m)?;
        }
        Ok(BlochFourVector { r })
    }

    /// `(1/√j!) ∂ʲ_{μ*}[e^{|μ|²/2} r^Het_a]` at `μ* = 0` for every `a`, by a
    /// trapezoidal Cauchy integral on the unit circle.
    pub fn photon_vector(&self, j: usize, m: &Syndrome) -> Result<BlochFourVector> {
        let mut r = [Complex64::new(0.0, 0.0); 4];
        for k in 0..CONTOUR_NODES {
            let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / CONTOUR_NODES as f64);
            let weight = w.powi(-(j as i32));
            for a in PauliIndex::ALL {
                r[a.index()] += self.entire(a, w, m)? * weight;
            }
        }
        let scale = (0.5 * ln_factorials(j + 1)[j]).exp() / CONTOUR_NODES as f64;
        for v in &mut r {
            *v *= scale;
        }
        Ok(BlochFourVector { r })
    }
}

/// `r^Het_a(μ, m)`.
pub fn bloch_heterodyne(
    a: PauliIndex,
    mu: Complex64,
    m: &Syndrome,
    params: &ChannelParams,
) -> Result<Complex64> {
    HeterodyneKernel::new(params)?.heterodyne(a, mu, m)
}

/// `r^P_a(j, m)`.
pub fn bloch_photon(a: PauliIndex, j: usize, m: &Syndrome, params: &ChannelParams) -> Result<Complex64> {
    Ok(HeterodyneKernel::new(params)?.photon_vector(j, m)?.get(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{eval_theta, Characteristics, ThetaArgument};
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_component_at_origin_is_prefactor_times_theta() {
        let p = ChannelParams::new(0.1, 0.0).unwrap();
        let r = bloch_heterodyne(PauliIndex::I, c(0.0, 0.0), &Syndrome::zero(), &p).unwrap();
        let tau = SiegelMatrix::scaled_identity(2, c(0.0, 0.05f64.tanh())).unwrap();
        let theta = eval_theta(&ThetaArgument::plain(DVector::zeros(2), tau).unwrap(), 1e-14).unwrap();
        let pref = 0.1f64.exp() / (PI.sqrt() * (1.0 + 0.1f64.exp()));
        assert!((r - theta * pref).norm() < 1e-13 * r.norm());
    }

    #[test]
    fn lossless_limit_only_rescales_by_envelope() {
        let p = ChannelParams::new(0.2, 0.0).unwrap();
        let m = Syndrome::new(0.3, -0.5).unwrap();
        let mu = c(0.7, -0.2);
        for a in PauliIndex::ALL {
            let with_mu = bloch_heterodyne(a, mu, &m, &p).unwrap();
            let at_zero = bloch_heterodyne(a, c(0.0, 0.0), &m, &p).unwrap();
            assert!((with_mu - at_zero * (-0.5 * mu.norm_sqr()).exp()).norm() < 1e-15);
        }
        assert_eq!(heterodyne_parameters(&p, mu), damping_only_parameters(0.2));
    }

    #[test]
    fn zeroth_derivative_is_heterodyne_at_origin() {
        let p = ChannelParams::new(0.1, 0.3).unwrap();
        let m = Syndrome::new(0.2, 0.4).unwrap();
        let k = HeterodyneKernel::new(&p).unwrap();
        let het = k.heterodyne_vector(c(0.0, 0.0), &m).unwrap();
        let ph = k.photon_vector(0, &m).unwrap();
        for i in 0..4 {
            assert!((het.r[i] - ph.r[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn heterodyne_is_a_photon_series() {
        // e^{|μ|²/2} r^Het(μ) = Σ_j (μ*)^j/√j! r^P_j
        let p = ChannelParams::new(0.1, 0.3).unwrap();
        let m = Syndrome::new(-0.4, 0.1).unwrap();
        let k = HeterodyneKernel::new(&p).unwrap();
        let mu = c(0.5, 0.3);
        let lf = ln_factorials(40);
        let mut sum = [c(0.0, 0.0); 4];
        for j in 0..40 {
            let v = k.photon_vector(j, &m).unwrap();
            let coeff = mu.conj().powi(j as i32) / (0.5 * lf[j]).exp();
            for i in 0..4 {
                sum[i] += v.r[i] * coeff;
            }
        }
        let het = k.heterodyne_vector(mu, &m).unwrap();
        for i in 0..4 {
            let direct = het.r[i] * (0.5 * mu.norm_sqr()).exp();
            assert!((sum[i] - direct).norm() < 1e-12, "{i}");
        }
    }

    #[test]
    fn square_lattice_symmetry_at_zero_syndrome() {
        let p = ChannelParams::new(0.15, 0.2).unwrap();
        let k = HeterodyneKernel::new(&p).unwrap();
        let v = k.heterodyne_vector(c(0.0, 0.0), &Syndrome::zero()).unwrap();
        assert!((v.get(PauliIndex::X).norm() - v.get(PauliIndex::Z).norm()).abs() < 1e-14);
    }

    #[test]
    fn complete_loss_routed_elsewhere() {
        let p = ChannelParams::new(0.1, 1.0).unwrap();
        assert_eq!(HeterodyneKernel::new(&p).unwrap_err(), Error::CompleteLoss);
    }

    #[test]
    fn characteristics_match_explicit_argument() {
        let p = ChannelParams::new(0.3, 0.1).unwrap();
        let m = Syndrome::new(0.25, -0.6).unwrap();
        let mu = c(-0.3, 0.8);
        let a = PauliIndex::Y;
        let hp = heterodyne_parameters(&p, mu);
        let wp = [0.5 * (1.0 + 0.25 / SQRT_PI), 0.5 * (1.0 - 0.6 / SQRT_PI)];
        let wm = [0.5 * (1.0 - 0.25 / SQRT_PI), 0.5 * (1.0 + 0.6 / SQRT_PI)];
        let arg = ThetaArgument::new(
            DVector::from_vec(hp.z.to_vec()),
            SiegelMatrix::scaled_identity(2, c(0.0, hp.tau_imag)).unwrap(),
            Characteristics::from_slices(&[-wp[1], wp[0]], &wm).unwrap(),
        )
        .unwrap();
        let theta = eval_theta(&arg, 1e-14).unwrap();
        let trig = p.trig();
        let eb = p.beta.exp();
        let expected = theta
            * eb
            * (-0.5 * mu.norm_sqr()).exp()
            * Complex64::from_polar(1.0, PI * (wm[0] * wp[1] - wm[1] * wp[0]))
            / (PI.sqrt() * (trig.c + eb));
        let got = bloch_heterodyne(a, mu, &m, &p).unwrap();
        assert!((got - expected).norm() < 1e-13 * expected.norm());
    }
}
