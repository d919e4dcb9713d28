//! Ellipsoid enumeration of shifted integer lattices and the Gaussian tail
//! bound that picks the truncation radius.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Volume of the unit ball in `d` dimensions.
fn unit_ball_volume(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    PI.powf(half) / gamma_fn(half + 1.0)
}

// Γ on half-integers and integers, which is all the ball volume needs.
fn gamma_fn(x: f64) -> f64 {
    if (x - 0.5).abs() < 1e-12 {
        return PI.sqrt();
    }
    if (x - 1.0).abs() < 1e-12 {
        return 1.0;
    }
    (x - 1.0) * gamma_fn(x - 1.0)
}

/// Upper bound on `Σ exp(-π q(x))` over lattice points with `q(x) > r²`, where
/// `q` is the quadratic form of the imaginary part and the sum is normalized to
/// a peak term of one.
///
/// Lattice points are counted shell by shell: each point owns a unit cell that
/// sits inside a metric ball of radius `r + ρ`, with `ρ` the metric half
/// diagonal of the cell.
pub(crate) fn gaussian_tail_bound(dim: usize, lambda_max: f64, det: f64, radius: f64) -> f64 {
    let rho = 0.5 * (dim as f64 * lambda_max).sqrt();
    let scale = unit_ball_volume(dim) / det.sqrt();
    let step = 0.02;
    let mut tail = 0.0;
    let mut r = radius;
    loop {
        let weight = (-PI * r * r).exp();
        if weight < 1e-300 {
            break;
        }
        let outer = (r + step + rho).powi(dim as i32);
        let inner = (r - rho).max(0.0).powi(dim as i32);
        tail += weight * scale * (outer - inner);
        r += step;
    }
    tail
}

/// Smallest radius (on a 0.05 grid) whose tail bound is below `tol`.
pub(crate) fn truncation_radius(dim: usize, lambda_max: f64, det: f64, tol: f64) -> f64 {
    let mut r = (-(tol.ln()) / PI).sqrt().max(0.5);
    while gaussian_tail_bound(dim, lambda_max, det, r) > tol {
        r += 0.05;
    }
    r
}

/// Enumerates `x = n + shift`, `n ∈ ℤ^d`, with `(x - c)ᵀ Y (x - c) ≤ r²`.
///
/// `upper` is the Cholesky factor with `Y = Uᵀ U`; `y_inv_diag` holds the
/// diagonal of `Y⁻¹`, which bounds the extent along each axis.
pub(crate) struct Ellipsoid<'a> {
    pub upper: &'a DMatrix<f64>,
    pub y_inv_diag: &'a [f64],
    pub center: &'a [f64],
    pub shift: &'a [f64],
    pub radius_sq: f64,
    pub max_points_per_axis: usize,
}

impl Ellipsoid<'_> {
    pub(crate) fn check_extent(&self) -> Result<()> {
        for (axis, &yi) in self.y_inv_diag.iter().enumerate() {
            let half_width = (self.radius_sq * yi).sqrt();
            let needed = 2 * half_width.ceil() as usize + 1;
            if needed > self.max_points_per_axis {
                return Err(Error::Convergence {
                    axis,
                    needed,
                    cap: self.max_points_per_axis,
                });
            }
        }
        Ok(())
    }

    /// Calls `visit` once per lattice point inside the ellipsoid, in a fixed
    /// lexicographic order (last axis outermost).
    #[cfg(test)]
    pub(crate) fn for_each(&self, mut visit: impl FnMut(&[f64])) {
        self.for_each_row(|x, count| {
            let mut p = x.to_vec();
            for k in 0..count {
                p[0] = x[0] + k as f64;
                visit(&p);
            }
        });
    }

    /// Calls `visit(x, count)` once per row of consecutive points along the
    /// first axis; `x` is the first point of the row and the row continues
    /// with unit steps in `x[0]`.
    pub(crate) fn for_each_row(&self, mut visit: impl FnMut(&[f64], usize)) {
        let d = self.center.len();
        let mut x = vec![0.0; d];
        // y_j = x_j - c_j for the already-fixed trailing axes
        let mut y = vec![0.0; d];
        self.descend(d, self.radius_sq, &mut x, &mut y, &mut visit);
    }

    fn descend(
        &self,
        level: usize,
        budget: f64,
        x: &mut [f64],
        y: &mut [f64],
        visit: &mut impl FnMut(&[f64], usize),
    ) {
        let i = level - 1;
        let d = x.len();
        let u_ii = self.upper[(i, i)];
        let mut s = 0.0;
        for j in (i + 1)..d {
            s += self.upper[(i, j)] * y[j];
        }
        let half = budget.max(0.0).sqrt();
        // |u_ii y_i + s| <= half
        let lo = (-s - half) / u_ii + self.center[i] - self.shift[i];
        let hi = (-s + half) / u_ii + self.center[i] - self.shift[i];
        let n_lo = lo.ceil() as i64;
        let n_hi = hi.floor() as i64;
        if i == 0 {
            if n_hi >= n_lo {
                x[0] = n_lo as f64 + self.shift[0];
                visit(x, (n_hi - n_lo + 1) as usize);
            }
            return;
        }
        for n in n_lo..=n_hi {
            let xi = n as f64 + self.shift[i];
            let yi = xi - self.center[i];
            let t = u_ii * yi + s;
            let rest = budget - t * t;
            if rest < 0.0 {
                continue;
            }
            x[i] = xi;
            y[i] = yi;
            self.descend(i, rest, x, y, visit);
        }
    }
}

/// Rough number of lattice points in the ellipsoid, padded by half a cell.
pub(crate) fn estimated_points(dim: usize, radius: f64, det: f64) -> f64 {
    unit_ball_volume(dim) * (radius + 0.5).powi(dim as i32) / det.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn tail_bound_dominates_actual_tail_in_one_dimension() {
        // Y = 1: actual tail of Σ e^{-π n²} beyond |n| > r
        for &r in &[1.0, 2.0, 3.0] {
            let actual: f64 = (1..40)
                .map(|n| n as f64)
                .filter(|&n| n > r)
                .map(|n| 2.0 * (-PI * n * n).exp())
                .sum();
            assert!(gaussian_tail_bound(1, 1.0, 1.0, r) >= actual);
        }
    }

    #[test]
    fn enumeration_counts_match_brute_force() {
        let y = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5]);
        let upper = y.clone().cholesky().unwrap().l().transpose();
        let inv = y.clone().try_inverse().unwrap();
        let diag = [inv[(0, 0)], inv[(1, 1)]];
        let center = [0.3, -0.7];
        let shift = [0.25, 0.5];
        let r2 = 6.0;
        let e = Ellipsoid {
            upper: &upper,
            y_inv_diag: &diag,
            center: &center,
            shift: &shift,
            radius_sq: r2,
            max_points_per_axis: 10_000,
        };
        let mut count = 0;
        e.for_each(|_| count += 1);
        let mut brute = 0;
        for a in -20..=20 {
            for b in -20..=20 {
                let x0 = a as f64 + shift[0] - center[0];
                let x1 = b as f64 + shift[1] - center[1];
                let q = y[(0, 0)] * x0 * x0 + 2.0 * y[(0, 1)] * x0 * x1 + y[(1, 1)] * x1 * x1;
                if q <= r2 {
                    brute += 1;
                }
            }
        }
        assert_eq!(count, brute);
    }

    #[test]
    fn extent_cap_is_enforced() {
        let upper = DMatrix::from_element(1, 1, 1e-4);
        let diag = [1e8];
        let e = Ellipsoid {
            upper: &upper,
            y_inv_diag: &diag,
            center: &[0.0],
            shift: &[0.0],
            radius_sq: 9.0,
            max_points_per_axis: 10_000,
        };
        assert!(matches!(e.check_extent(), Err(Error::Convergence { .. })));
    }
}
