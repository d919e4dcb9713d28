//! Logical qubit channels induced by damping, loss and ideal Steane error
//! correction on square-lattice GKP qubits.
//!
//! Conditional channels are rank one: a Bloch four-vector `r_a` per herald and
//! syndrome gives `χ_{aa′} = r_a r*_{a′}/4`. Averaging over heterodyne
//! outcomes yields a four-dimensional Θ function per matrix element, and
//! averaging over syndromes is done by tensor-product Gauss–Legendre
//! quadrature.

mod average;
mod bloch;
mod pure_loss;

use std::fmt;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gkp::{trig_of_gamma, PauliIndex, Trig};

pub use average::{
    average_syndromes, averaged_conditional, averaged_pure_loss, fidelity_sweep, AveragedChannel, QuadratureSpec,
    SweepRow, SweepTable,
};
pub use bloch::{
    bloch_heterodyne, bloch_photon, damping_only_parameters, heterodyne_parameters,
    HeterodyneKernel, HeterodyneParameters,
};
pub use pure_loss::{chi_pure_loss, PureLossKernel};

/// Mixture weight of `|+H⟩` after error-correcting the vacuum.
pub const P_PLUS_EVEN: f64 = 0.91024;

/// Mixture weight of `|+H⟩` after error-correcting a single photon.
pub const P_PLUS_ODD: f64 = 0.26822;

/// Damping exponent and loss rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub beta: f64,
    pub gamma: f64,
}

impl ChannelParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("damping beta = {beta} must be finite and >= 0")));
        }
        trig_of_gamma(gamma)?;
        if beta == 0.0 && gamma == 0.0 {
            return Err(Error::DegenerateParameters);
        }
        Ok(Self { beta, gamma })
    }

    pub fn trig(&self) -> Trig {
        trig_of_gamma(self.gamma).expect("gamma validated on construction")
    }

    /// `d = β - ln c`.
    pub fn effective_damping(&self) -> f64 {
        self.beta - 0.5 * (1.0 - self.gamma).ln()
    }

    pub fn is_complete_loss(&self) -> bool {
        self.gamma == 1.0
    }
}

/// Components `r_a = Tr[K σ̄_a]` in `I, X, Y, Z` order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochFourVector {
    pub r: [Complex64; 4],
}

impl BlochFourVector {
    pub fn get(&self, a: PauliIndex) -> Complex64 {
        self.r[a.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.r.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// A 4×4 process matrix in the `I, X, Y, Z` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessMatrix {
    pub chi: Matrix4<Complex64>,
    pub normalized: bool,
}

impl ProcessMatrix {
    pub fn new(chi: Matrix4<Complex64>, normalized: bool) -> Self {
        Self { chi, normalized }
    }

    pub fn get(&self, a: PauliIndex, a_prime: PauliIndex) -> Complex64 {
        self.chi[(a.index(), a_prime.index())]
    }

    pub fn trace(&self) -> f64 {
        self.chi.trace().re
    }

    /// Divides by the trace and sets the flag.
    pub fn normalize(&self) -> Result<ProcessMatrix> {
        let tr = self.trace();
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::DegenerateChannel);
        }
        Ok(ProcessMatrix {
            chi: self.chi / Complex64::new(tr, 0.0),
            normalized: true,
        })
    }

    /// `max |χ - χ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.chi - self.chi.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.chi + self.chi.adjoint()) * Complex64::new(0.5, 0.0);
        let ev = h.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `Σ_{a≠a′} |χ_{aa′}|`.
    pub fn off_diagonal_mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    acc += self.chi[(i, j)].norm();
                }
            }
        }
        acc
    }
}

impl fmt::Display for ProcessMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in PauliIndex::ALL {
            let row: Vec<String> = PauliIndex::ALL
                .iter()
                .map(|&b| {
                    let z = self.get(a, b);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "{a}: {}", row.join("  "))?;
        }
        Ok(())
    }
}

/// `χ_{aa′} = r_a r*_{a′} / 4`.
pub fn chi_conditional(r: &BlochFourVector) -> ProcessMatrix {
    let chi = Matrix4::from_fn(|i, j| r.r[i] * r.r[j].conj() * 0.25);
    ProcessMatrix::new(chi, false)
}

/// The replacement channel onto `p₊|+H⟩⟨+H| + (1-p₊)|-H⟩⟨-H|`.
pub fn replacement_channel(p_plus: f64) -> Result<ProcessMatrix> {
    if !(0.0..=1.0).contains(&p_plus) {
        return Err(Error::Domain(format!("mixture weight {p_plus} outside [0, 1]")));
    }
    let c = (2.0 * p_plus - 1.0) / 2f64.sqrt();
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    let zero = re(0.0);
    #[rustfmt::skip]
    let chi = Matrix4::new(
        re(1.0), re(c),   zero,    re(c),
        re(c),   re(1.0), im(-c),  zero,
        zero,    im(c),   re(1.0), im(-c),
        re(c),   zero,    im(c),   re(1.0),
    ) * re(0.25);
    Ok(ProcessMatrix::new(chi, true))
}

/// `(2χ₀₀ + 1)/3` for a trace-normalized channel.
pub fn average_fidelity(chi: &ProcessMatrix) -> Result<f64> {
    let tr = chi.trace();
    if !chi.normalized || (tr - 1.0).abs() > 1e-12 {
        return Err(Error::Unnormalized(tr));
    }
    Ok((2.0 * chi.chi[(0, 0)].re + 1.0) / 3.0)
}

/// A single-qubit state by its Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub bloch: [f64; 3],
}

impl QubitState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !n.is_finite() || n > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("Bloch vector norm {n} exceeds 1")));
        }
        Ok(Self { bloch: [x, y, z] })
    }

    /// The six Pauli eigenstates with labels `+X, -X, +Y, -Y, +Z, -Z`.
    pub fn pauli_eigenstates() -> [(&'static str, QubitState); 6] {
        let s = |x, y, z| QubitState { bloch: [x, y, z] };
        [
            ("+X", s(1.0, 0.0, 0.0)),
            ("-X", s(-1.0, 0.0, 0.0)),
            ("+Y", s(0.0, 1.0, 0.0)),
            ("-Y", s(0.0, -1.0, 0.0)),
            ("+Z", s(0.0, 0.0, 1.0)),
            ("-Z", s(0.0, 0.0, -1.0)),
        ]
    }

    fn density(&self) -> Matrix2<Complex64> {
        let [x, y, z] = self.bloch;
        Matrix2::new(
            Complex64::new(0.5 * (1.0 + z), 0.0),
            Complex64::new(0.5 * x, -0.5 * y),
            Complex64::new(0.5 * x, 0.5 * y),
            Complex64::new(0.5 * (1.0 - z), 0.0),
        )
    }
}

/// Standard Pauli matrices in `I, X, Y, Z` order.
pub fn pauli_matrices() -> [Matrix2<Complex64>; 4] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(one, o, o, one),
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(one, o, o, -one),
    ]
}

/// `ρ ↦ Σ χ_{aa′} σ_a ρ σ_{a′}`, renormalized.
pub fn apply_channel(chi: &ProcessMatrix, state: &QubitState) -> Result<QubitState> {
    let sigma = pauli_matrices();
    let rho = state.density();
    let mut out = Matrix2::zeros();
    for i in 0..4 {
        for j in 0..4 {
            out += sigma[i] * rho * sigma[j] * chi.chi[(i, j)];
        }
    }
    let tr = out.trace().re;
    if !(tr.abs() > 1e-300) {
        return Err(Error::DegenerateChannel);
    }
    out /= Complex64::new(tr, 0.0);
    let coord = |k: usize| (out * sigma[k]).trace().re;
    Ok(QubitState {
        bloch: [coord(1), coord(2), coord(3)],
    })
}
