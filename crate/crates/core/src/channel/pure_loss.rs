//! Process matrix of the pure-loss channel, with the loss mode traced out.
//!
//! Averaging `r^Het_a r^Het*_{a′}/4` over `d²μ/π` is a Gaussian integral of a
//! product of two Θ functions, which collapses to one four-dimensional Θ with
//! period matrix
//!
//! ```text
//! T = I⊗τ^Het - s²/(c + e^β)² · (i X⊗I + Ω⊗Ω)
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use super::{ChannelParams, ProcessMatrix};
use crate::error::{Error, Result};
use crate::gkp::{PauliIndex, Syndrome, SQRT_PI};
use crate::theta::{PreparedTheta, SiegelMatrix, ThetaOptions};

const THETA_TOL: f64 = 1e-12;

/// The period matrix `T` and its prepared lattice sum for fixed `(β, γ)`.
#[derive(Clone, Debug)]
pub struct PureLossKernel {
    params: ChannelParams,
    prefactor: f64,
    period: DMatrix<Complex64>,
    theta: PreparedTheta,
}

impl PureLossKernel {
    pub fn new(params: &ChannelParams) -> Result<Self> {
        if params.is_complete_loss() {
            return Err(Error::CompleteLoss);
        }
        if params.beta == 0.0 {
            // Im T is singular when β = 0
            return Err(Error::Domain(
                "the loss-averaged channel needs beta > 0 for a normalizable code state".into(),
            ));
        }
        let trig = params.trig();
        let eb = params.beta.exp();
        let tau = (0.5 * (params.beta - trig.c.ln())).tanh();
        let k = trig.s * trig.s / ((trig.c + eb) * (trig.c + eb));
        let mut t = DMatrix::<Complex64>::zeros(4, 4);
        for i in 0..4 {
            t[(i, i)] = Complex64::new(0.0, tau);
        }
        // -k i X⊗I
        for (i, j) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
            t[(i, j)] -= Complex64::new(0.0, k);
        }
        // -k Ω⊗Ω
        for (i, j, v) in [(0, 3, 1.0), (1, 2, -1.0), (2, 1, -1.0), (3, 0, 1.0)] {
            t[(i, j)] -= Complex64::new(k * v, 0.0);
        }
        let siegel = SiegelMatrix::new(t.clone()).map_err(|e| match e {
            Error::Domain(msg) => Error::Internal(format!("pure-loss period matrix left the Siegel space: {msg}")),
            other => other,
        })?;
        Ok(Self {
            params: *params,
            prefactor: 0.25 * (2.0 * params.beta).exp() / (PI * (trig.c + eb) * (trig.c + eb)),
            period: t,
            theta: PreparedTheta::new(&siegel, THETA_TOL, ThetaOptions::default())?,
        })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn period_matrix(&self) -> &DMatrix<Complex64> {
        &self.period
    }

    /// `χ_{aa′}(m)`.
    pub fn element(&self, a: PauliIndex, a_prime: PauliIndex, m: &Syndrome) -> Result<Complex64> {
        let mq = m.frac_q / SQRT_PI;
        let mp = m.frac_p / SQRT_PI;
        let w = |p: PauliIndex, sign: f64| {
            let v = p.vector();
            [0.5 * (v[0] as f64 + sign * mq), 0.5 * (v[1] as f64 + sign * mp)]
        };
        let (wpa, wma) = (w(a, 1.0), w(a, -1.0));
        let (wpb, wmb) = (w(a_prime, 1.0), w(a_prime, -1.0));
        let u_plus = [wpa[0], wpa[1], wpb[0], wpb[1]];
        let u_minus = [wma[0], wma[1], -wmb[0], -wmb[1]];
        // (I⊗Ω) u⁺
        let om = [u_plus[1], -u_plus[0], u_plus[3], -u_plus[2]];
        let v1 = [-om[0], -om[1], -om[2], -om[3]];
        let phase = PI * (0..4).map(|i| u_minus[i] * om[i]).sum::<f64>();
        let z = [Complex64::new(0.0, 0.0); 4];
        let theta = self.theta.eval_scaled(&v1, &u_minus, &z)?;
        Ok(Complex64::from_polar(self.prefactor, phase) * theta.value())
    }

    /// The full 4×4 matrix; the lower triangle is filled by Hermiticity.
    pub fn matrix(&self, m: &Syndrome) -> Result<ProcessMatrix> {
        let mut chi = Matrix4::zeros();
        for (i, &a) in PauliIndex::ALL.iter().enumerate() {
            for (j, &b) in PauliIndex::ALL.iter().enumerate().skip(i) {
                let v = self.element(a, b, m)?;
                chi[(i, j)] = v;
                chi[(j, i)] = v.conj();
            }
            chi[(i, i)].im = 0.0;
        }
        Ok(ProcessMatrix::new(chi, false))
    }

    /// Only the diagonal, which is all a fidelity needs.
    pub fn diagonal(&self, m: &Syndrome) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for a in PauliIndex::ALL {
            out[a.index()] = self.element(a, a, m)?.re;
        }
        Ok(out)
    }
}

/// `χ_{aa′}(m)` of the pure-loss channel.
pub fn chi_pure_loss(
    a: PauliIndex,
    a_prime: PauliIndex,
    m: &Syndrome,
    params: &ChannelParams,
) -> Result<Complex64> {
    PureLossKernel::new(params)?.element(a, a_prime, m)
}


#[cfg(test)]
mod symmetry_tests {
    use super::*;

    // parity fixes both codewords and maps Z†X†(m) to Z†X†(-m); complex
    // conjugation of the real Kraus data flips m_p and only touches phases
    #[test]
    fn diagonal_is_even_in_each_syndrome_component() {
        for &(b, g) in &[(0.1, 0.3), (0.05, 0.7), (0.4, 0.1)] {
            let k = PureLossKernel::new(&ChannelParams::new(b, g).unwrap()).unwrap();
            let (q, p) = (0.37, -0.61);
            let base = k.diagonal(&Syndrome::new(q, p).unwrap()).unwrap();
            for (sq, sp) in [(-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
                let other = k.diagonal(&Syndrome::new(sq * q, sp * p).unwrap()).unwrap();
                for i in 0..4 {
                    assert!((base[i] - other[i]).abs() < 1e-13 * base[0], "{b} {g} {sq} {sp} {i}: {} {}", base[i], other[i]);
                }
            }
            let full = k.matrix(&Syndrome::new(q, p).unwrap()).unwrap();
            let flipped = k.matrix(&Syndrome::new(-q, -p).unwrap()).unwrap();
            assert!((full.chi - flipped.chi).iter().all(|z| z.norm() < 1e-13 * base[0]));
        }
    }
}
