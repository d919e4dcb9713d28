//! Siegel Θ functions with real characteristics.
//!
//! ```text
//! Θ[v₁; v₂](z; τ) = Σ_{n ∈ ℤ^d} exp(2πi [½ (n+v₁)ᵀ τ (n+v₁) + (n+v₁)ᵀ (z+v₂)])
//! ```
//!
//! Sums are truncated to an ellipsoid around the peak term, with the radius
//! fixed by a Gaussian tail bound so that the neglected terms add up to less
//! than `tol` times the largest term. When the smallest eigenvalue of `Im τ`
//! is small the modular "flip" `τ → -τ⁻¹` is applied first, and diagonal
//! period matrices are split into products of one-dimensional sums.
//!
//! The identities exposed here ([`flip_theta`], [`conjugate_theta`],
//! [`stack_theta`], [`gaussian_theta_integral`]) return transformed arguments
//! so that they can be checked numerically against [`eval_theta`].

mod lattice;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use lattice::{estimated_points, truncation_radius, Ellipsoid};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default number of lattice points allowed along any axis.
pub const DEFAULT_MAX_POINTS_PER_AXIS: usize = 10_000;

/// Below this value of `λ_min(Im τ)` the flipped representation is preferred.
pub const DEFAULT_FLIP_THRESHOLD: f64 = 0.05;

/// A complex symmetric matrix with positive-definite imaginary part.
#[derive(Clone, Debug)]
pub struct SiegelMatrix {
    tau: DMatrix<Complex64>,
    // Im τ = Uᵀ U
    im_upper: DMatrix<f64>,
    im_inv_diag: Vec<f64>,
    im_inv: DMatrix<f64>,
    lambda_min: f64,
    lambda_max: f64,
    im_det: f64,
}

impl SiegelMatrix {
    pub fn new(tau: DMatrix<Complex64>) -> Result<Self> {
        let d = tau.nrows();
        if d == 0 || tau.ncols() != d {
            return Err(Error::Domain(format!(
                "period matrix must be square and non-empty, got {}x{}",
                tau.nrows(),
                tau.ncols()
            )));
        }
        if tau.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("period matrix has non-finite entries".into()));
        }
        let scale = tau.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..d {
            for j in (i + 1)..d {
                if (tau[(i, j)] - tau[(j, i)]).norm() > 1e-14 * scale {
                    return Err(Error::Domain(format!(
                        "period matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let im = tau.map(|z| z.im);
        let im = (&im + im.transpose()) * 0.5;
        let eig = SymmetricEigen::new(im.clone());
        let lambda_min = eig.eigenvalues.min();
        let lambda_max = eig.eigenvalues.max();
        if lambda_min <= 0.0 {
            return Err(Error::Domain(format!(
                "imaginary part of the period matrix is not positive definite \
                 (smallest eigenvalue {lambda_min:e})"
            )));
        }
        let chol = im.clone().cholesky().ok_or_else(|| {
            Error::Domain("imaginary part of the period matrix is not positive definite".into())
        })?;
        let im_inv = chol.inverse();
        let im_det = eig.eigenvalues.iter().product();
        let im_upper = chol.l().transpose();
        let im_inv_diag = (0..d).map(|i| im_inv[(i, i)]).collect();
        Ok(Self {
            tau,
            im_upper,
            im_inv_diag,
            im_inv,
            lambda_min,
            lambda_max,
            im_det,
        })
    }

    /// `i·y·I` in `d` dimensions.
    pub fn scaled_identity(d: usize, value: Complex64) -> Result<Self> {
        Self::new(DMatrix::from_diagonal_element(d, d, value))
    }

    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    /// Builds from a matrix that is symmetric up to roundoff by averaging it
    /// with its transpose.
    pub fn symmetrized(tau: DMatrix<Complex64>) -> Result<Self> {
        let sym = (&tau + tau.transpose()) * Complex64::new(0.5, 0.0);
        Self::new(sym)
    }

    pub fn dim(&self) -> usize {
        self.tau.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.tau
    }

    /// Smallest eigenvalue of `Im τ`.
    pub fn imag_min_eigenvalue(&self) -> f64 {
        self.lambda_min
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.tau[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    pub fn inverse(&self) -> Result<DMatrix<Complex64>> {
        let inv = self
            .tau
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("period matrix is singular".into()))?;
        Ok((&inv + inv.transpose()) * Complex64::new(0.5, 0.0))
    }

    /// `½ log det(-iτ)` on the branch continuous from purely imaginary `τ`.
    ///
    /// Every eigenvalue of `-iτ` has positive real part, so the product of
    /// principal square roots of the eigenvalues is the analytic branch.
    fn half_log_det_minus_i_tau(&self) -> Result<Complex64> {
        let m = self.tau.map(|z| -I * z);
        let eigs = Schur::new(m)
            .eigenvalues()
            .ok_or_else(|| Error::Internal("complex Schur form did not converge".into()))?;
        Ok(eigs.iter().map(|l| 0.5 * l.ln()).sum())
    }
}

/// Characteristic vectors `(v₁, v₂)`, stored as reals because syndrome-derived
/// characteristics are irrational.
#[derive(Clone, Debug, PartialEq)]
pub struct Characteristics {
    pub v1: DVector<f64>,
    pub v2: DVector<f64>,
}

impl Characteristics {
    pub fn new(v1: DVector<f64>, v2: DVector<f64>) -> Result<Self> {
        if v1.len() != v2.len() {
            return Err(Error::Domain(format!(
                "characteristics have different lengths {} and {}",
                v1.len(),
                v2.len()
            )));
        }
        Ok(Self { v1, v2 })
    }

    pub fn from_slices(v1: &[f64], v2: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(v1), DVector::from_column_slice(v2))
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            v1: DVector::zeros(d),
            v2: DVector::zeros(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.v1.len()
    }
}

/// A complete Θ evaluation request.
#[derive(Clone, Debug)]
pub struct ThetaArgument {
    pub z: DVector<Complex64>,
    pub tau: SiegelMatrix,
    pub chars: Characteristics,
}

impl ThetaArgument {
    pub fn new(z: DVector<Complex64>, tau: SiegelMatrix, chars: Characteristics) -> Result<Self> {
        let d = tau.dim();
        if z.len() != d || chars.dim() != d {
            return Err(Error::Domain(format!(
                "dimension mismatch: z has {}, tau has {}, characteristics have {}",
                z.len(),
                d,
                chars.dim()
            )));
        }
        Ok(Self { z, tau, chars })
    }

    /// Zero characteristics.
    pub fn plain(z: DVector<Complex64>, tau: SiegelMatrix) -> Result<Self> {
        let d = tau.dim();
        Self::new(z, tau, Characteristics::zeros(d))
    }

    pub fn dim(&self) -> usize {
        self.tau.dim()
    }
}

/// Evaluation knobs.
#[derive(Clone, Copy, Debug)]
pub struct ThetaOptions {
    pub max_points_per_axis: usize,
    /// Consider the flip when `λ_min(Im τ)` is below this; it is taken when
    /// the flipped lattice sum needs fewer points.
    /// `None` disables automatic flipping.
    pub flip_threshold: Option<f64>,
    /// Split diagonal period matrices into products of 1-D sums.
    pub split_diagonal: bool,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        Self {
            max_points_per_axis: DEFAULT_MAX_POINTS_PER_AXIS,
            flip_threshold: Some(DEFAULT_FLIP_THRESHOLD),
            split_diagonal: true,
        }
    }
}

impl ThetaOptions {
    /// Plain lattice summation with no transforms.
    pub fn direct() -> Self {
        Self {
            flip_threshold: None,
            split_diagonal: false,
            ..Self::default()
        }
    }
}

/// A value `mantissa · exp(log_scale)`; keeps huge prefactors and tiny sums
/// apart until the end.
#[derive(Clone, Copy, Debug)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn value(self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    fn mul(self, other: Scaled) -> Scaled {
        Scaled {
            mantissa: self.mantissa * other.mantissa,
            log_scale: self.log_scale + other.log_scale,
        }
    }
}

/// A lattice sum over a fixed period matrix.
#[derive(Clone, Debug)]
struct LatticePlan {
    tau: SiegelMatrix,
    radius: f64,
    max_points_per_axis: usize,
    // e^{2πi τ₀₀}, the second difference along the first axis
    row_curvature: Complex64,
}

impl LatticePlan {
    fn new(tau: SiegelMatrix, tol: f64, max_points_per_axis: usize) -> Self {
        let radius = truncation_radius(tau.dim(), tau.lambda_max, tau.im_det, tol);
        let row_curvature = (Complex64::new(0.0, 2.0 * PI) * tau.tau[(0, 0)]).exp();
        Self {
            tau,
            radius,
            max_points_per_axis,
            row_curvature,
        }
    }

    fn estimated_points(&self) -> f64 {
        estimated_points(self.tau.dim(), self.radius, self.tau.im_det)
    }

    fn sum(&self, v1: &[f64], v2: &[f64], z: &[Complex64]) -> Result<Scaled> {
        let d = self.tau.dim();
        let tau = &self.tau.tau;
        // Peak of |term| sits at x = -Y⁻¹ Im z.
        let w: Vec<f64> = z.iter().map(|zi| zi.im).collect();
        let mut center = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                center[i] -= self.tau.im_inv[(i, j)] * w[j];
            }
        }
        // π cᵀ Y c = -π cᵀ w
        let log_peak = -PI * center.iter().zip(&w).map(|(c, w)| c * w).sum::<f64>();

        let ellipsoid = Ellipsoid {
            upper: &self.tau.im_upper,
            y_inv_diag: &self.tau.im_inv_diag,
            center: &center,
            shift: v1,
            radius_sq: self.radius * self.radius,
            max_points_per_axis: self.max_points_per_axis,
        };
        ellipsoid.check_extent()?;

        let shifted: Vec<Complex64> = z.iter().zip(v2).map(|(zi, vi)| zi + vi).collect();
        let two_pi_i = Complex64::new(0.0, 2.0 * PI);
        let mut acc = NeumaierComplex::default();
        ellipsoid.for_each_row(|x, count| {
            // exponent at the first point of the row and the first-axis
            // gradient (τx)₀ + (z + v₂)₀
            let mut quad = Complex64::new(0.0, 0.0);
            let mut lin = Complex64::new(0.0, 0.0);
            let mut grad = shifted[0];
            for i in 0..d {
                let mut row = tau[(i, i)] * (0.5 * x[i]);
                for j in (i + 1)..d {
                    row += tau[(i, j)] * x[j];
                }
                quad += row * x[i];
                lin += shifted[i] * x[i];
                grad += tau[(0, i)] * x[i];
            }
            let mut term = (two_pi_i * (quad + lin) - log_peak).exp();
            if count == 1 {
                acc.add(term);
                return;
            }
            let mut ratio = (two_pi_i * (grad + 0.5 * tau[(0, 0)])).exp();
            for _ in 0..count {
                acc.add(term);
                term *= ratio;
                ratio *= self.row_curvature;
            }
        });
        Ok(Scaled {
            mantissa: acc.total(),
            log_scale: log_peak,
        })
    }
}

#[derive(Default)]
struct NeumaierComplex {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

impl NeumaierComplex {
    fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

#[derive(Clone, Debug)]
enum Strategy {
    Direct(LatticePlan),
    Flipped {
        plan: LatticePlan,
        tau_inv: DMatrix<Complex64>,
        half_log_det: Complex64,
    },
    Product(Vec<PreparedTheta>),
}

/// A period matrix prepared for many evaluations with varying `z` and
/// characteristics.
#[derive(Clone, Debug)]
pub struct PreparedTheta {
    dim: usize,
    strategy: Strategy,
}

impl PreparedTheta {
    pub fn new(tau: &SiegelMatrix, tol: f64, opts: ThetaOptions) -> Result<Self> {
        if !(tol > 0.0 && tol <= 1e-3) {
            return Err(Error::Domain(format!("tolerance {tol:e} outside (0, 1e-3]")));
        }
        let d = tau.dim();
        if opts.split_diagonal && d > 1 && tau.is_diagonal() {
            let factors = (0..d)
                .map(|i| {
                    let t = SiegelMatrix::diagonal(&[tau.tau[(i, i)]])?;
                    PreparedTheta::new(&t, tol, opts)
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self {
                dim: d,
                strategy: Strategy::Product(factors),
            });
        }
        if let Some(threshold) = opts.flip_threshold {
            if tau.lambda_min < threshold {
                let tau_inv = tau.inverse()?;
                let flipped = SiegelMatrix::symmetrized(-&tau_inv)?;
                let direct = LatticePlan::new(tau.clone(), tol, opts.max_points_per_axis);
                let plan = LatticePlan::new(flipped, tol, opts.max_points_per_axis);
                if plan.estimated_points() < direct.estimated_points() {
                    let half_log_det = -tau.half_log_det_minus_i_tau()?;
                    return Ok(Self {
                        dim: d,
                        strategy: Strategy::Flipped {
                            plan,
                            tau_inv,
                            half_log_det,
                        },
                    });
                }
                return Ok(Self {
                    dim: d,
                    strategy: Strategy::Direct(direct),
                });
            }
        }
        Ok(Self {
            dim: d,
            strategy: Strategy::Direct(LatticePlan::new(tau.clone(), tol, opts.max_points_per_axis)),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether evaluation goes through the flipped representation.
    pub fn is_flipped(&self) -> bool {
        match &self.strategy {
            Strategy::Flipped { .. } => true,
            Strategy::Product(f) => f.iter().any(|p| p.is_flipped()),
            Strategy::Direct(_) => false,
        }
    }

    pub fn eval(&self, chars: &Characteristics, z: &DVector<Complex64>) -> Result<Complex64> {
        Ok(self.eval_scaled(chars.v1.as_slice(), chars.v2.as_slice(), z.as_slice())?.value())
    }

    pub fn eval_scaled(&self, v1: &[f64], v2: &[f64], z: &[Complex64]) -> Result<Scaled> {
        if v1.len() != self.dim || v2.len() != self.dim || z.len() != self.dim {
            return Err(Error::Domain("argument dimension does not match period matrix".into()));
        }
        match &self.strategy {
            Strategy::Direct(plan) => plan.sum(v1, v2, z),
            Strategy::Flipped {
                plan,
                tau_inv,
                half_log_det,
            } => {
                let d = self.dim;
                let mut z_new = vec![Complex64::new(0.0, 0.0); d];
                for i in 0..d {
                    for j in 0..d {
                        z_new[i] += tau_inv[(i, j)] * z[j];
                    }
                }
                // ½ zᵀ(-τ⁻¹)z = -½ zᵀ z_new
                let quad: Complex64 = -0.5 * z.iter().zip(&z_new).map(|(a, b)| a * b).sum::<Complex64>();
                let cross: f64 = v1.iter().zip(v2).map(|(a, b)| a * b).sum();
                let log_pref = half_log_det + Complex64::new(0.0, 2.0 * PI) * (quad + cross);
                let new_v1: Vec<f64> = v2.iter().map(|x| -x).collect();
                let inner = plan.sum(&new_v1, v1, &z_new)?;
                let pref = Scaled {
                    mantissa: Complex64::new(0.0, log_pref.im).exp(),
                    log_scale: log_pref.re,
                };
                Ok(pref.mul(inner))
            }
            Strategy::Product(factors) => {
                let mut acc = Scaled {
                    mantissa: Complex64::new(1.0, 0.0),
                    log_scale: 0.0,
                };
                for (i, f) in factors.iter().enumerate() {
                    acc = acc.mul(f.eval_scaled(&v1[i..=i], &v2[i..=i], &z[i..=i])?);
                }
                Ok(acc)
            }
        }
    }
}

/// Evaluates `Θ[v₁; v₂](z; τ)` with default options.
pub fn eval_theta(arg: &ThetaArgument, tol: f64) -> Result<Complex64> {
    eval_theta_with(arg, tol, ThetaOptions::default())
}

pub fn eval_theta_with(arg: &ThetaArgument, tol: f64, opts: ThetaOptions) -> Result<Complex64> {
    PreparedTheta::new(&arg.tau, tol, opts)?.eval(&arg.chars, &arg.z)
}

/// A transformed argument together with the scalar that restores the
/// original value: `prefactor · Θ(argument) = Θ(original)`.
#[derive(Clone, Debug)]
pub struct FlippedTheta {
    pub argument: ThetaArgument,
    pub prefactor: Complex64,
}

/// The modular transform `τ → -τ⁻¹`, `z → τ⁻¹ z`, `(v₁, v₂) → (-v₂, v₁)`.
pub fn flip_theta(arg: &ThetaArgument) -> Result<FlippedTheta> {
    let tau_inv = arg.tau.inverse()?;
    let tau_new = SiegelMatrix::symmetrized(-&tau_inv)?;
    let z_new = &tau_inv * &arg.z;
    let quad = -0.5 * arg.z.dot(&z_new);
    let cross = arg.chars.v1.dot(&arg.chars.v2);
    let half_log_det = -arg.tau.half_log_det_minus_i_tau()?;
    let prefactor = (half_log_det + Complex64::new(0.0, 2.0 * PI) * (quad + cross)).exp();
    let chars = Characteristics::new(-&arg.chars.v2, arg.chars.v1.clone())?;
    Ok(FlippedTheta {
        argument: ThetaArgument::new(z_new, tau_new, chars)?,
        prefactor,
    })
}

/// `Θ[v₁; v₂](z; τ)* = Θ[v₁; -v₂](-z*; -τ*)`.
pub fn conjugate_theta(arg: &ThetaArgument) -> Result<ThetaArgument> {
    let tau = SiegelMatrix::new(arg.tau.tau.map(|z| -z.conj()))?;
    let z = arg.z.map(|z| -z.conj());
    let chars = Characteristics::new(arg.chars.v1.clone(), -&arg.chars.v2)?;
    ThetaArgument::new(z, tau, chars)
}

/// Block-diagonal stacking: `Θ(A)·Θ(B) = Θ(A ⊕ B)`.
pub fn stack_theta(a: &ThetaArgument, b: &ThetaArgument) -> Result<ThetaArgument> {
    let (da, db) = (a.dim(), b.dim());
    let d = da + db;
    let mut tau = DMatrix::zeros(d, d);
    tau.view_mut((0, 0), (da, da)).copy_from(&a.tau.tau);
    tau.view_mut((da, da), (db, db)).copy_from(&b.tau.tau);
    let cat_r = |x: &DVector<f64>, y: &DVector<f64>| {
        DVector::from_iterator(d, x.iter().chain(y.iter()).copied())
    };
    let z = DVector::from_iterator(d, a.z.iter().chain(b.z.iter()).copied());
    let chars = Characteristics::new(cat_r(&a.chars.v1, &b.chars.v1), cat_r(&a.chars.v2, &b.chars.v2))?;
    ThetaArgument::new(z, SiegelMatrix::new(tau)?, chars)
}

/// Closed form of `∫ dⁿx Θ[chars](A x; τ) exp(-½ xᵀ Σ x + νᵀ x)`:
///
/// ```text
/// √((2π)ⁿ / det Σ) · Θ[chars](A Σ⁻¹ ν; τ + 2πi A Σ⁻¹ Aᵀ) · exp(½ νᵀ Σ⁻¹ ν)
/// ```
///
/// `a` maps `ℝⁿ` into the `d`-dimensional Θ argument (`d × n`), `sigma` is
/// `n × n` with positive-definite real part.
pub fn gaussian_theta_integral(
    chars: &Characteristics,
    tau: &SiegelMatrix,
    a: &DMatrix<Complex64>,
    sigma: &DMatrix<Complex64>,
    nu: &DVector<f64>,
    tol: f64,
) -> Result<Complex64> {
    let n = sigma.nrows();
    let d = tau.dim();
    if sigma.ncols() != n || a.nrows() != d || a.ncols() != n || nu.len() != n || chars.dim() != d {
        return Err(Error::Domain("gaussian_theta_integral: dimension mismatch".into()));
    }
    let re = sigma.map(|z| z.re);
    let re = (&re + re.transpose()) * 0.5;
    if re.cholesky().is_none() {
        return Err(Error::Domain("real part of the Gaussian kernel is not positive definite".into()));
    }
    let sigma_inv = sigma
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("Gaussian kernel matrix is singular".into()))?;
    let nu_c = nu.map(|x| Complex64::new(x, 0.0));
    let z = a * (&sigma_inv * &nu_c);
    let shift = a * &sigma_inv * a.transpose() * Complex64::new(0.0, 2.0 * PI);
    let tau_new = SiegelMatrix::symmetrized(tau.tau.clone() + shift)?;
    let arg = ThetaArgument::new(z, tau_new, chars.clone())?;
    let theta = eval_theta(&arg, tol)?;
    // √det Σ on the branch continuous from the real part.
    let eigs = Schur::new(sigma.clone())
        .eigenvalues()
        .ok_or_else(|| Error::Internal("complex Schur form did not converge".into()))?;
    let half_log_det: Complex64 = eigs.iter().map(|l| 0.5 * l.ln()).sum();
    let gauss = 0.5 * nu_c.dot(&(&sigma_inv * &nu_c));
    let log_norm = 0.5 * n as f64 * (2.0 * PI).ln();
    Ok(theta * (Complex64::new(log_norm, 0.0) - half_log_det + gauss).exp())
}
