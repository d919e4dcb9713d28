//! Syndrome averages over the fundamental cell and fidelity sweeps.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bloch::HeterodyneKernel;
use super::pure_loss::PureLossKernel;
use super::{average_fidelity, chi_conditional, replacement_channel, ChannelParams, ProcessMatrix, P_PLUS_EVEN};
use crate::error::{Error, Result};
use crate::gkp::{Syndrome, SQRT_PI};
use crate::loss::HeraldOutcome;
use crate::quadrature::gauss_legendre;

/// Tensor-product Gauss–Legendre rule over the syndrome cell.
///
/// With `check` set, the integral is also computed at half the order and the
/// difference is reported as the error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub order: usize,
    pub check: bool,
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 32,
            check: true,
            tol: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    pub fn unchecked(order: usize) -> Self {
        Self {
            order,
            check: false,
            ..Self::default()
        }
    }

    /// Nodes and weights on the cell, `m_q` varying slowest.
    pub fn nodes(order: usize) -> Result<Vec<(Syndrome, f64)>> {
        let h = 0.5 * SQRT_PI;
        let rule = gauss_legendre(order)?.scaled(-h, h);
        let mut out = Vec::with_capacity(order * order);
        for (q, wq) in rule.nodes.iter().zip(&rule.weights) {
            for (p, wp) in rule.nodes.iter().zip(&rule.weights) {
                out.push((Syndrome::new(*q, *p)?, wq * wp));
            }
        }
        Ok(out)
    }
}

/// A syndrome-averaged channel.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedChannel {
    pub raw: ProcessMatrix,
    pub normalized: ProcessMatrix,
    pub order: usize,
    /// Largest entrywise change of the normalized matrix between the two
    /// quadrature orders.
    pub est_error: Option<f64>,
    pub warning: Option<String>,
}

/// Reflection symmetry of an integrand, used to skip mirrored nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CellSymmetry {
    None,
    /// `f(-m) = f(m)`.
    Point,
    /// Even in `m_q` and in `m_p` separately.
    Quadrant,
}

#[cfg(test)]
fn integrate<const K: usize>(
    order: usize,
    f: &(dyn Fn(&Syndrome) -> Result<[Complex64; K]> + Sync),
) -> Result<[Complex64; K]> {
    integrate_symmetric(order, CellSymmetry::None, f)
}

fn integrate_symmetric<const K: usize>(
    order: usize,
    symmetry: CellSymmetry,
    f: &(dyn Fn(&Syndrome) -> Result<[Complex64; K]> + Sync),
) -> Result<[Complex64; K]> {
    let mut nodes = QuadratureSpec::nodes(order)?;
    // Gauss–Legendre nodes come in ± pairs and miss zero when the order is even
    if order % 2 == 0 {
        match symmetry {
            CellSymmetry::None => {}
            CellSymmetry::Point => {
                nodes.retain(|(m, _)| m.frac_q > 0.0);
                nodes.iter_mut().for_each(|(_, w)| *w *= 2.0);
            }
            CellSymmetry::Quadrant => {
                nodes.retain(|(m, _)| m.frac_q > 0.0 && m.frac_p > 0.0);
                nodes.iter_mut().for_each(|(_, w)| *w *= 4.0);
            }
        }
    }
    let values: Vec<[Complex64; K]> = nodes
        .par_iter()
        .map(|(m, _)| f(m))
        .collect::<Result<Vec<_>>>()?;
    // sequential reduction keeps the sum order fixed
    let mut acc = [Complex64::new(0.0, 0.0); K];
    for ((_, w), v) in nodes.iter().zip(&values) {
        for k in 0..K {
            acc[k] += v[k] * *w;
        }
    }
    Ok(acc)
}

fn to_matrix(v: &[Complex64; 16]) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| v[4 * i + j])
}

/// Integrates a matrix-valued function of the syndrome over the cell.
pub fn average_syndromes(
    element_fn: &(dyn Fn(&Syndrome) -> Result<Matrix4<Complex64>> + Sync),
    quad: QuadratureSpec,
) -> Result<AveragedChannel> {
    average_syndromes_symmetric(element_fn, quad, CellSymmetry::None)
}

pub(crate) fn average_syndromes_symmetric(
    element_fn: &(dyn Fn(&Syndrome) -> Result<Matrix4<Complex64>> + Sync),
    quad: QuadratureSpec,
    symmetry: CellSymmetry,
) -> Result<AveragedChannel> {
    let flat = |m: &Syndrome| -> Result<[Complex64; 16]> {
        let chi = element_fn(m)?;
        let mut out = [Complex64::new(0.0, 0.0); 16];
        for i in 0..4 {
            for j in 0..4 {
                out[4 * i + j] = chi[(i, j)];
            }
        }
        Ok(out)
    };
    let main = ProcessMatrix::new(to_matrix(&integrate_symmetric(quad.order, symmetry, &flat)?), false);
    let normalized = main.normalize()?;
    let (est_error, warning) = if quad.check && quad.order >= 2 {
        let coarse =
            ProcessMatrix::new(to_matrix(&integrate_symmetric(quad.order / 2, symmetry, &flat)?), false).normalize()?;
        let diff = (normalized.chi - coarse.chi).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let warning = (diff > quad.tol).then(|| {
            format!(
                "syndrome quadrature not converged: orders {} and {} differ by {diff:.3e} (chi_II {:.12} vs {:.12})",
                quad.order / 2,
                quad.order,
                coarse.chi[(0, 0)].re,
                normalized.chi[(0, 0)].re
            )
        });
        (Some(diff), warning)
    } else {
        (None, None)
    };
    Ok(AveragedChannel {
        raw: main,
        normalized,
        order: quad.order,
        est_error,
        warning,
    })
}

/// Syndrome-averaged pure-loss channel. Complete loss gives the replacement
/// channel onto the error-corrected vacuum.
pub fn averaged_pure_loss(params: &ChannelParams, quad: QuadratureSpec) -> Result<AveragedChannel> {
    if params.is_complete_loss() {
        let chi = replacement_channel(P_PLUS_EVEN)?;
        return Ok(AveragedChannel {
            raw: chi,
            normalized: chi,
            order: 0,
            est_error: None,
            warning: None,
        });
    }
    let kernel = PureLossKernel::new(params)?;
    average_syndromes_symmetric(&|m| Ok(kernel.matrix(m)?.chi), quad, CellSymmetry::Point)
}

/// Syndrome average of the rank-one channel heralded by one loss-mode
/// outcome. `HeraldOutcome::None` means the loss mode is discarded, which is
/// the pure-loss channel.
pub fn averaged_conditional(
    params: &ChannelParams,
    herald: &HeraldOutcome,
    quad: QuadratureSpec,
) -> Result<AveragedChannel> {
    match *herald {
        HeraldOutcome::None => averaged_pure_loss(params, quad),
        HeraldOutcome::Heterodyne(mu) => {
            let kernel = HeterodyneKernel::new(params)?;
            average_syndromes(&|m| Ok(chi_conditional(&kernel.heterodyne_vector(mu, m)?).chi), quad)
        }
        HeraldOutcome::PhotonCount(j) => {
            let kernel = HeterodyneKernel::new(params)?;
            average_syndromes(&|m| Ok(chi_conditional(&kernel.photon_vector(j, m)?).chi), quad)
        }
        HeraldOutcome::Homodyne { .. } => Err(Error::Domain(
            "no closed form for homodyne heralding; use the Fock oracle".into(),
        )),
    }
}

/// One `(β, γ)` cell of a fidelity sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub gamma: f64,
    pub infidelity: f64,
    pub est_error: Option<f64>,
    pub warning: Option<String>,
}

/// Sweep results, `γ` outermost, plus the best `β` for every `γ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// `(γ, β*, infidelity at β*)`.
    pub argmin: Vec<(f64, f64, f64)>,
}

impl SweepTable {
    pub fn warnings(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.warning.is_some())
    }

    /// Infidelities of one `γ` column in `β` order.
    pub fn column(&self, gamma: f64) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.gamma == gamma)
            .map(|r| (r.beta, r.infidelity))
            .collect()
    }
}

fn sweep_cell(beta: f64, gamma: f64, quad: QuadratureSpec) -> Result<SweepRow> {
    let params = ChannelParams::new(beta, gamma)?;
    if params.is_complete_loss() {
        let f = average_fidelity(&replacement_channel(P_PLUS_EVEN)?)?;
        return Ok(SweepRow {
            beta,
            gamma,
            infidelity: 1.0 - f,
            est_error: None,
            warning: None,
        });
    }
    let kernel = PureLossKernel::new(&params)?;
    let diag = |m: &Syndrome| -> Result<[Complex64; 4]> {
        let d = kernel.diagonal(m)?;
        Ok(d.map(|x| Complex64::new(x, 0.0)))
    };
    let infidelity = |v: [Complex64; 4]| -> Result<f64> {
        let tr: f64 = v.iter().map(|z| z.re).sum();
        if !(tr > 0.0) {
            return Err(Error::DegenerateChannel);
        }
        // 1 - (2χ₀₀ + 1)/3 on the normalized channel, from the error weights
        Ok(2.0 * (v[1].re + v[2].re + v[3].re) / (3.0 * tr))
    };
    let value = infidelity(integrate_symmetric(quad.order, CellSymmetry::Quadrant, &diag)?)?;
    let (est_error, warning) = if quad.check && quad.order >= 2 {
        let coarse = infidelity(integrate_symmetric(quad.order / 2, CellSymmetry::Quadrant, &diag)?)?;
        let diff = (value - coarse).abs();
        let warning = (diff > quad.tol).then(|| {
            format!(
                "syndrome quadrature not converged at beta={beta}, gamma={gamma}: orders {} and {} give {coarse:.12e} and {value:.12e}",
                quad.order / 2,
                quad.order
            )
        });
        (Some(diff), warning)
    } else {
        (None, None)
    };
    Ok(SweepRow {
        beta,
        gamma,
        infidelity: value,
        est_error,
        warning,
    })
}

/// Average-channel infidelity of the normalized, syndrome-averaged pure-loss
/// channel on a `(β, γ)` grid. Cells run in parallel on the current rayon
/// pool; output order does not depend on scheduling.
pub fn fidelity_sweep(beta_grid: &[f64], gamma_grid: &[f64], quad: QuadratureSpec) -> Result<SweepTable> {
    if beta_grid.is_empty() || gamma_grid.is_empty() {
        return Err(Error::Domain("sweep grids must be non-empty".into()));
    }
    if let Some(g) = gamma_grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::Domain(format!("loss rate {g} outside [0, 1]")));
    }
    let cells: Vec<(f64, f64)> = gamma_grid
        .iter()
        .flat_map(|&g| beta_grid.iter().map(move |&b| (b, g)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(b, g)| sweep_cell(b, g, quad))
        .collect::<Result<Vec<_>>>()?;
    let argmin = gamma_grid
        .iter()
        .map(|&g| {
            let best = rows
                .iter()
                .filter(|r| r.gamma == g)
                .min_by(|x, y| x.infidelity.total_cmp(&y.infidelity))
                .expect("non-empty beta grid");
            (g, best.beta, best.infidelity)
        })
        .collect();
    Ok(SweepTable { rows, argmin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::HeterodyneKernel;
    use crate::gkp::PauliIndex;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrand_gives_cell_area() {
        let c = Complex64::new(0.3, -0.1);
        let out = integrate::<1>(8, &|_| Ok([c])).unwrap();
        assert!((out[0] - c * PI).norm() < 1e-14);
    }

    #[test]
    fn symmetric_reductions_match_full_rule() {
        let f = |m: &Syndrome| -> Result<[Complex64; 1]> {
            Ok([Complex64::new((m.frac_q * m.frac_q).cos() * (-m.frac_p * m.frac_p).exp(), 0.0)])
        };
        let full = integrate(20, &f).unwrap()[0];
        for sym in [CellSymmetry::Point, CellSymmetry::Quadrant] {
            assert!((integrate_symmetric(20, sym, &f).unwrap()[0] - full).norm() < 1e-14);
        }
        // odd orders fall back to the full rule
        let odd = integrate_symmetric(15, CellSymmetry::Quadrant, &f).unwrap()[0];
        assert!((odd - integrate(15, &f).unwrap()[0]).norm() < 1e-15);
    }

    #[test]
    fn damping_only_average_is_near_identity() {
        let params = ChannelParams::new(0.1, 0.0).unwrap();
        let het = HeterodyneKernel::new(&params).unwrap();
        let avg = average_syndromes(
            &|m| {
                let r = het.heterodyne_vector(Complex64::new(0.0, 0.0), m)?;
                Ok(crate::channel::chi_conditional(&r).chi)
            },
            QuadratureSpec::new(32),
        )
        .unwrap();
        let n = avg.normalized;
        assert!(n.hermiticity_defect() < 1e-12);
        assert!(n.min_eigenvalue() > -1e-10);
        assert!((n.trace() - 1.0).abs() < 1e-12);
        assert!(n.chi[(0, 0)].re > 0.9);
        assert!(avg.warning.is_none(), "{:?}", avg.warning);
    }

    #[test]
    fn low_loss_errors_are_x_z_symmetric_with_fewer_y() {
        let params = ChannelParams::new(0.1, 0.1).unwrap();
        let avg = averaged_pure_loss(&params, QuadratureSpec::new(24)).unwrap().normalized;
        let (x, y, z) = (PauliIndex::X, PauliIndex::Y, PauliIndex::Z);
        assert!((avg.get(x, x) - avg.get(z, z)).norm() < 1e-8);
        assert!(avg.get(x, x).re > avg.get(y, y).re);
    }

    #[test]
    fn complete_loss_is_replacement() {
        let params = ChannelParams::new(0.1, 1.0).unwrap();
        let avg = averaged_pure_loss(&params, QuadratureSpec::default()).unwrap();
        assert_eq!(avg.normalized, replacement_channel(P_PLUS_EVEN).unwrap());
    }

    #[test]
    fn sweep_shapes_and_argmin() {
        let t = fidelity_sweep(&[0.1, 0.3], &[0.0, 1.0], QuadratureSpec::unchecked(16)).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert_eq!((t.rows[0].beta, t.rows[0].gamma), (0.1, 0.0));
        assert_eq!((t.rows[1].beta, t.rows[1].gamma), (0.3, 0.0));
        assert!(t.rows[0].infidelity < t.rows[1].infidelity);
        assert_eq!(t.argmin[0].1, 0.1);
        assert!((t.rows[2].infidelity - 0.5).abs() < 1e-15);
        assert!(fidelity_sweep(&[], &[0.1], QuadratureSpec::default()).is_err());
    }
}
