//! Brute-force logical channels in a truncated Fock basis.
//!
//! Nothing here touches the Θ engine. Codewords are position combs expanded
//! in Hermite functions, the loss mode enters through the Kraus matrices of
//! [`crate::loss`], and the logical Kraus operator is read off as
//!
//! ```text
//! K_L[c][b] = ⟨c̄| Z†(m_p) X†(m_q) L e^{-βn̂} |b̄⟩ = Σ_n e^{-i m_p q_n} φ_b(q_n + m_q),   q_n = (2n + c)√π
//! ```
//!
//! with `φ_b` the position wavefunction of `L e^{-βn̂}|b̄⟩`. Bloch components
//! are `r_a = Tr[K_L σ_a]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{
    average_syndromes, chi_conditional, pauli_matrices, AveragedChannel, BlochFourVector, ChannelParams,
    ProcessMatrix, QuadratureSpec,
};
use crate::error::{Error, Result};
use crate::gkp::{subspace_pauli_terms, DisplacementLabel, PauliIndex, Syndrome, SQRT_PI};
use crate::loss::{
    hermite_functions, kraus_heterodyne, kraus_homodyne, kraus_photon, ln_factorials, FockOperator, HeraldOutcome,
};

const LEAKAGE_TOL: f64 = 1e-10;

/// Fock cutoff for a state damped by `e^{-d n̂}`: amplitudes fall below
/// `e^{-32}` at the top level.
pub fn default_cutoff(damping: f64) -> usize {
    if !(damping > 0.0) {
        return 1200;
    }
    ((32.0 / damping).ceil() as usize).clamp(60, 1200)
}

/// Number of comb peaks on each side needed to cover the classically allowed
/// region of every Hermite function below the cutoff.
pub fn default_lattice_cut(cutoff: usize) -> usize {
    (((2.0 * cutoff as f64 + 1.0).sqrt() + 8.0) / (2.0 * SQRT_PI)).ceil() as usize
}

/// `e^{-βn̂}|b̄⟩` in the Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GKPFockState {
    /// Unit-norm amplitudes.
    pub amplitudes: DVector<Complex64>,
    /// Norm of the comb before normalization.
    pub norm: f64,
    pub beta_used: f64,
    pub lattice_cut: usize,
    pub bit: u8,
}

impl GKPFockState {
    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    /// Amplitudes with the comb normalization restored.
    pub fn unnormalized(&self) -> DVector<Complex64> {
        &self.amplitudes * Complex64::new(self.norm, 0.0)
    }

    /// Norm of the odd-photon-number part.
    pub fn parity_defect(&self) -> f64 {
        self.amplitudes.iter().skip(1).step_by(2).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn overlap(&self, other: &GKPFockState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

fn comb_amplitudes(bit: u8, beta: f64, cutoff: usize, lattice_cut: usize) -> DVector<Complex64> {
    let mut acc = vec![0.0; cutoff];
    let l = lattice_cut as i64;
    for n in -l..=l {
        let q = (2 * n + bit as i64) as f64 * SQRT_PI;
        for (a, psi) in acc.iter_mut().zip(hermite_functions(q, cutoff)) {
            *a += psi;
        }
    }
    DVector::from_iterator(
        cutoff,
        acc.into_iter()
            .enumerate()
            .map(|(k, v)| Complex64::new(v * (-beta * k as f64).exp(), 0.0)),
    )
}

fn leakage(v: &DVector<Complex64>) -> f64 {
    let total = v.norm_squared();
    if total == 0.0 {
        return 0.0;
    }
    v.iter().skip(v.len() / 2).map(|z| z.norm_sqr()).sum::<f64>() / total
}

fn check_leakage(v: &DVector<Complex64>, what: &str) -> Result<()> {
    let leak = leakage(v);
    if leak > LEAKAGE_TOL {
        return Err(Error::Cutoff {
            cutoff: v.len(),
            detail: format!("{what} has weight {leak:.2e} above level {}", v.len() / 2),
        });
    }
    Ok(())
}

/// Damped codeword `|b̄⟩`, `b ∈ {0, 1}`, summed over `|n| ≤ lattice_cut` peaks.
pub fn build_damped_gkp(bit: u8, beta: f64, cutoff: usize, lattice_cut: usize) -> Result<GKPFockState> {
    if bit > 1 {
        return Err(Error::Domain(format!("codeword label {bit} is not 0 or 1")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("damping beta = {beta} must be positive")));
    }
    if cutoff < 2 {
        return Err(Error::Domain("cutoff must be at least 2".into()));
    }
    let raw = comb_amplitudes(bit, beta, cutoff, lattice_cut);
    check_leakage(&raw, "damped codeword")?;
    let norm = raw.norm();
    Ok(GKPFockState {
        amplitudes: raw / Complex64::new(norm, 0.0),
        norm,
        beta_used: beta,
        lattice_cut,
        bit,
    })
}

/// `⟨m|D(α)|n⟩` for `α = x₁ + i x₂` from the associated-Laguerre form
/// `√(n!/m!) α^{m-n} e^{-|α|²/2} L_n^{(m-n)}(|α|²)` for `m ≥ n`, and its mirror
/// with `-α*` below the diagonal.
pub fn displacement_matrix(x: DisplacementLabel, cutoff: usize) -> Result<FockOperator> {
    let alpha = x.alpha();
    let xx = alpha.norm_sqr();
    if xx > 0.5 * cutoff as f64 {
        return Err(Error::Cutoff {
            cutoff,
            detail: format!("displacement |α|² = {xx:.3} needs a larger Fock space"),
        });
    }
    let n = cutoff;
    let mut d = DMatrix::<Complex64>::zeros(n, n);
    if xx == 0.0 {
        d.fill_with_identity();
        return FockOperator::new(d);
    }
    let lf = ln_factorials(n);
    let (r, theta) = alpha.to_polar();
    for k in 0..n {
        // f_j = √(j!/(j+k)!) |α|^k e^{-|α|²/2} L_j^{(k)}(|α|²), on a rescaled mantissa
        let kf = k as f64;
        let mut log_scale = kf * r.ln() - 0.5 * xx - 0.5 * lf[k];
        let (mut prev, mut cur) = (0.0, 1.0);
        let upper = Complex64::from_polar(1.0, kf * theta);
        let lower = Complex64::from_polar(if k % 2 == 0 { 1.0 } else { -1.0 }, -kf * theta);
        for j in 0..(n - k) {
            if j > 0 {
                let jf = (j - 1) as f64;
                let next = ((2.0 * jf + 1.0 + kf - xx) * cur - (jf * (jf + kf)).sqrt() * prev)
                    / ((jf + 1.0) * (jf + kf + 1.0)).sqrt();
                prev = cur;
                cur = next;
                if cur.abs() > 1e150 {
                    prev *= 1e-150;
                    cur *= 1e-150;
                    log_scale += 150.0 * std::f64::consts::LN_10;
                }
            }
            let f = cur * log_scale.exp();
            d[(j + k, j)] = upper * f;
            if k > 0 {
                d[(j, j + k)] = lower * f;
            }
        }
    }
    FockOperator::new(d)
}

fn herald_operator(herald: &HeraldOutcome, gamma: f64, cutoff: usize) -> Result<FockOperator> {
    match *herald {
        HeraldOutcome::PhotonCount(j) => kraus_photon(j, gamma, cutoff),
        HeraldOutcome::Heterodyne(mu) => kraus_heterodyne(mu, gamma, cutoff),
        HeraldOutcome::Homodyne { x, phi } => kraus_homodyne(x, phi, gamma, cutoff),
        HeraldOutcome::None if gamma == 0.0 => Ok(FockOperator::identity(cutoff)),
        HeraldOutcome::None => Err(Error::Domain(
            "unheralded loss has no single Kraus operator; use the pure-loss channel".into(),
        )),
    }
}

/// `g_c[k] = Σ_n e^{-i m_p q_n} ψ_k(q_n + m_q)`, so that `g_c · φ = ⟨c̄|Z†X†|φ⟩`.
fn comb_functional(c: u8, m: &Syndrome, cutoff: usize, lattice_cut: usize) -> DVector<Complex64> {
    let mut g = DVector::<Complex64>::zeros(cutoff);
    let l = lattice_cut as i64;
    for n in -l..=l {
        let q = (2 * n + c as i64) as f64 * SQRT_PI;
        let phase = Complex64::from_polar(1.0, -m.frac_p * q);
        for (gk, psi) in g.iter_mut().zip(hermite_functions(q + m.frac_q, cutoff)) {
            *gk += phase * psi;
        }
    }
    g
}

fn bilinear(g: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    g.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
}

fn bloch_from_logical(k: &Matrix2<Complex64>) -> BlochFourVector {
    let sigma = pauli_matrices();
    let mut r = [Complex64::new(0.0, 0.0); 4];
    for (ra, s) in r.iter_mut().zip(&sigma) {
        *ra = (k * s).trace();
    }
    BlochFourVector { r }
}

/// The damped, heralded codewords `L e^{-βn̂}|b̄⟩` for one `(β, γ, herald)`.
#[derive(Clone, Debug)]
pub struct OracleKernel {
    pub params: ChannelParams,
    pub cutoff: usize,
    pub lattice_cut: usize,
    phi: [DVector<Complex64>; 2],
}

impl OracleKernel {
    /// `cutoff = None` picks [`default_cutoff`] from the combined damping,
    /// or from `β` alone for homodyne heralds, whose Kraus series spreads the
    /// state over more levels.
    pub fn new(herald: &HeraldOutcome, params: &ChannelParams, cutoff: Option<usize>) -> Result<Self> {
        let damping = match herald {
            HeraldOutcome::Homodyne { .. } => params.beta,
            _ => params.effective_damping(),
        };
        let cutoff = cutoff.unwrap_or_else(|| default_cutoff(damping));
        let lattice_cut = default_lattice_cut(cutoff);
        let l = herald_operator(herald, params.gamma, cutoff)?;
        let mut phi = [DVector::zeros(cutoff), DVector::zeros(cutoff)];
        for (bit, slot) in phi.iter_mut().enumerate() {
            let comb = comb_amplitudes(bit as u8, params.beta, cutoff, lattice_cut);
            *slot = &l.matrix * comb;
            check_leakage(slot, "heralded codeword")?;
        }
        Ok(Self {
            params: *params,
            cutoff,
            lattice_cut,
            phi,
        })
    }

    pub fn logical_kraus(&self, m: &Syndrome) -> Matrix2<Complex64> {
        logical_kraus(&self.phi, m, self.lattice_cut)
    }

    pub fn bloch_vector(&self, m: &Syndrome) -> BlochFourVector {
        bloch_from_logical(&self.logical_kraus(m))
    }

    /// Largest odd-photon-number weight in the heralded codewords.
    pub fn parity_defect(&self) -> f64 {
        self.phi
            .iter()
            .map(|v| {
                let odd: f64 = v.iter().skip(1).step_by(2).map(|z| z.norm_sqr()).sum();
                (odd / v.norm_squared().max(f64::MIN_POSITIVE)).sqrt()
            })
            .fold(0.0, f64::max)
    }
}

fn logical_kraus(phi: &[DVector<Complex64>; 2], m: &Syndrome, lattice_cut: usize) -> Matrix2<Complex64> {
    let cutoff = phi[0].len();
    let g = [comb_functional(0, m, cutoff, lattice_cut), comb_functional(1, m, cutoff, lattice_cut)];
    Matrix2::from_fn(|c, b| bilinear(&g[c], &phi[b]))
}

/// `Tr[K σ̄_a]` by explicit Fock-space construction.
pub fn oracle_bloch(
    a: PauliIndex,
    herald: &HeraldOutcome,
    m: &Syndrome,
    params: &ChannelParams,
    cutoff: usize,
) -> Result<Complex64> {
    Ok(OracleKernel::new(herald, params, Some(cutoff))?.bloch_vector(m).get(a))
}

/// Same quantity through truncated displacement matrices:
/// `r_a = (1/√π) Σ_n e^{iπnᵀΩa} Tr[D((2n+a)√(π/2)) Z†X† L e^{-βn̂}]`.
/// Only practical when damping is strong enough for a small lattice sum.
pub fn oracle_bloch_displacement(
    a: PauliIndex,
    herald: &HeraldOutcome,
    m: &Syndrome,
    params: &ChannelParams,
    cutoff: usize,
    lattice_cut: usize,
) -> Result<Complex64> {
    let l = herald_operator(herald, params.gamma, cutoff)?.matrix;
    let damping = DMatrix::from_diagonal(&DVector::from_fn(cutoff, |k, _| {
        Complex64::new((-params.beta * k as f64).exp(), 0.0)
    }));
    let x_dag = displacement_matrix(DisplacementLabel::new(-m.frac_q / 2f64.sqrt(), 0.0), cutoff)?.matrix;
    let z_dag = displacement_matrix(DisplacementLabel::new(0.0, -m.frac_p / 2f64.sqrt()), cutoff)?.matrix;
    let body = z_dag * x_dag * l * damping;
    let mut acc = Complex64::new(0.0, 0.0);
    for term in subspace_pauli_terms(a, lattice_cut) {
        let d = displacement_matrix(term.label, cutoff)?.matrix;
        // Tr[D B] = Σ_ij D_ij B_ji
        let tr: Complex64 = d.iter().zip(body.transpose().iter()).map(|(x, y)| x * y).sum();
        acc += tr * (term.weight * term.phase as f64);
    }
    Ok(acc)
}

/// Photon-number-resolved heralded codewords, one branch per lost photon
/// number, whose rank-one channels add up to the pure-loss channel.
#[derive(Clone, Debug)]
pub struct OraclePureLoss {
    pub params: ChannelParams,
    pub cutoff: usize,
    pub lattice_cut: usize,
    branches: Vec<[DVector<Complex64>; 2]>,
}

impl OraclePureLoss {
    /// `cutoff = None` sizes the space by `β` alone: every input level
    /// feeds the lower output levels through some loss branch.
    pub fn new(params: &ChannelParams, cutoff: Option<usize>) -> Result<Self> {
        if params.beta == 0.0 {
            return Err(Error::Domain("the pure-loss oracle needs beta > 0".into()));
        }
        let cutoff = cutoff.unwrap_or_else(|| default_cutoff(params.beta));
        let lattice_cut = default_lattice_cut(cutoff);
        let combs = [
            comb_amplitudes(0, params.beta, cutoff, lattice_cut),
            comb_amplitudes(1, params.beta, cutoff, lattice_cut),
        ];
        let total: f64 = combs.iter().map(|v| v.norm_squared()).sum();
        let mut branches = Vec::new();
        let mut leaked = 0.0;
        let mut kept = 0.0;
        for j in 0..cutoff {
            let l = kraus_photon(j, params.gamma, cutoff)?.matrix;
            let pair = [&l * &combs[0], &l * &combs[1]];
            let weight: f64 = pair.iter().map(|v| v.norm_squared()).sum();
            if j > 0 && weight < 1e-32 * total {
                continue;
            }
            kept += weight;
            leaked += pair.iter().map(|v| leakage(v) * v.norm_squared()).sum::<f64>();
            branches.push(pair);
        }
        if leaked > LEAKAGE_TOL * kept {
            return Err(Error::Cutoff {
                cutoff,
                detail: format!("lossy codewords have weight {:.2e} above level {}", leaked / kept, cutoff / 2),
            });
        }
        Ok(Self {
            params: *params,
            cutoff,
            lattice_cut,
            branches,
        })
    }

    /// `¼ Σ_j r^{(j)} r^{(j)†}` at one syndrome.
    pub fn chi(&self, m: &Syndrome) -> ProcessMatrix {
        let g = [
            comb_functional(0, m, self.cutoff, self.lattice_cut),
            comb_functional(1, m, self.cutoff, self.lattice_cut),
        ];
        let mut chi = Matrix4::zeros();
        for phi in &self.branches {
            let k = Matrix2::from_fn(|c, b| bilinear(&g[c], &phi[b]));
            chi += chi_conditional(&bloch_from_logical(&k)).chi;
        }
        ProcessMatrix::new(chi, false)
    }
}

/// Pure-loss `χ(m)` summed over photon-counting branches.
pub fn oracle_chi_pure_loss(m: &Syndrome, params: &ChannelParams, cutoff: usize) -> Result<ProcessMatrix> {
    Ok(OraclePureLoss::new(params, Some(cutoff))?.chi(m))
}

/// Syndrome-averaged pure-loss channel from the oracle.
pub fn oracle_averaged_pure_loss(
    params: &ChannelParams,
    quad: QuadratureSpec,
    cutoff: Option<usize>,
) -> Result<AveragedChannel> {
    let oracle = OraclePureLoss::new(params, cutoff)?;
    average_syndromes(&|m| Ok(oracle.chi(m).chi), quad)
}

/// Syndrome-averaged rank-one channel of a single herald outcome.
pub fn oracle_averaged_conditional(
    herald: &HeraldOutcome,
    params: &ChannelParams,
    quad: QuadratureSpec,
    cutoff: Option<usize>,
) -> Result<AveragedChannel> {
    let kernel = OracleKernel::new(herald, params, cutoff)?;
    average_syndromes(&|m| Ok(chi_conditional(&kernel.bloch_vector(m)).chi), quad)
}

/// Logical state left after error-correcting a fixed oscillator state,
/// resolved on the Hadamard eigenbasis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ECMixture {
    /// Weight on the `+1` eigenstate of `(X + Z)/√2`.
    pub p_plus: f64,
    pub p_minus: f64,
    /// Largest Hadamard-basis coherence left in the averaged state.
    pub coherence: f64,
    pub est_error: Option<f64>,
    pub warning: Option<String>,
}

fn hadamard_weights(rho: &Matrix2<Complex64>) -> (f64, f64, f64) {
    let (cp, sp) = ((PI / 8.0).cos(), (PI / 8.0).sin());
    let plus = nalgebra::Vector2::new(Complex64::new(cp, 0.0), Complex64::new(sp, 0.0));
    let minus = nalgebra::Vector2::new(Complex64::new(-sp, 0.0), Complex64::new(cp, 0.0));
    let w = |u: &nalgebra::Vector2<Complex64>, v: &nalgebra::Vector2<Complex64>| u.dotc(&(rho * v));
    (w(&plus, &plus).re, w(&minus, &minus).re, w(&plus, &minus).norm())
}

fn ec_density(fock: &DVector<Complex64>, order: usize, lattice_cut: usize) -> Result<Matrix2<Complex64>> {
    let cutoff = fock.len();
    let nodes = QuadratureSpec::nodes(order)?;
    let mut rho = Matrix2::zeros();
    for (m, w) in &nodes {
        let v = nalgebra::Vector2::new(
            bilinear(&comb_functional(0, m, cutoff, lattice_cut), fock),
            bilinear(&comb_functional(1, m, cutoff, lattice_cut), fock),
        );
        rho += v * v.adjoint() * Complex64::new(*w, 0.0);
    }
    let tr = rho.trace().re;
    if !(tr > 0.0) {
        return Err(Error::DegenerateChannel);
    }
    Ok(rho / Complex64::new(tr, 0.0))
}

/// Error-corrects `fock` over the whole syndrome cell and reports the
/// Hadamard-basis mixture.
pub fn oracle_ec_mixture(fock: &DVector<Complex64>, quad: QuadratureSpec) -> Result<ECMixture> {
    check_leakage(fock, "input state")?;
    let lattice_cut = default_lattice_cut(fock.len());
    let rho = ec_density(fock, quad.order, lattice_cut)?;
    let (p_plus, p_minus, coherence) = hadamard_weights(&rho);
    let (est_error, warning) = if quad.check && quad.order >= 2 {
        let (coarse, _, _) = hadamard_weights(&ec_density(fock, quad.order / 2, lattice_cut)?);
        let diff = (coarse - p_plus).abs();
        let warning = (diff > quad.tol).then(|| {
            format!(
                "syndrome quadrature not converged: orders {} and {} give p+ = {coarse:.10} and {p_plus:.10}",
                quad.order / 2,
                quad.order
            )
        });
        (Some(diff), warning)
    } else {
        (None, None)
    };
    Ok(ECMixture {
        p_plus,
        p_minus,
        coherence,
        est_error,
        warning,
    })
}

fn fock_basis_state(n: usize, cutoff: usize) -> Result<DVector<Complex64>> {
    if n >= cutoff {
        return Err(Error::Cutoff {
            cutoff,
            detail: format!("Fock state |{n}⟩ does not fit"),
        });
    }
    let mut v = DVector::zeros(cutoff);
    v[n] = Complex64::new(1.0, 0.0);
    Ok(v)
}

/// `p₊` of the error-corrected vacuum.
pub fn oracle_vacuum_ec_pplus(quad: QuadratureSpec, cutoff: usize) -> Result<f64> {
    Ok(oracle_ec_mixture(&fock_basis_state(0, cutoff)?, quad)?.p_plus)
}

/// `p₊` of the error-corrected single-photon state.
pub fn oracle_single_photon_ec_pplus(quad: QuadratureSpec, cutoff: usize) -> Result<f64> {
    Ok(oracle_ec_mixture(&fock_basis_state(1, cutoff)?, quad)?.p_plus)
}

#[cfg(test)]
mod tests;
