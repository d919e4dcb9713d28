//! Square-lattice GKP code algebra: Pauli shift vectors, the symplectic form,
//! standard binning of syndromes and subspace-Pauli expansions.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `√π`, the logical shift length.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Logical Pauli label and its shift vector `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliIndex {
    I,
    X,
    Y,
    Z,
}

impl PauliIndex {
    /// In process-matrix order `I, X, Y, Z`.
    pub const ALL: [PauliIndex; 4] = [PauliIndex::I, PauliIndex::X, PauliIndex::Y, PauliIndex::Z];

    pub fn vector(self) -> [i64; 2] {
        match self {
            PauliIndex::I => [0, 0],
            PauliIndex::X => [1, 0],
            PauliIndex::Y => [1, 1],
            PauliIndex::Z => [0, 1],
        }
    }

    pub fn from_vector(a: [i64; 2]) -> Result<Self> {
        match a {
            [0, 0] => Ok(PauliIndex::I),
            [1, 0] => Ok(PauliIndex::X),
            [1, 1] => Ok(PauliIndex::Y),
            [0, 1] => Ok(PauliIndex::Z),
            _ => Err(Error::Domain(format!("{a:?} is not a Pauli shift vector"))),
        }
    }

    /// Position in `I, X, Y, Z` order.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            PauliIndex::I => "I",
            PauliIndex::X => "X",
            PauliIndex::Y => "Y",
            PauliIndex::Z => "Z",
        }
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for PauliIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" => Ok(PauliIndex::I),
            "X" => Ok(PauliIndex::X),
            "Y" => Ok(PauliIndex::Y),
            "Z" => Ok(PauliIndex::Z),
            other => Err(Error::Domain(format!("unknown Pauli label {other:?}"))),
        }
    }
}

/// The symplectic form `Ω = [[0, 1], [-1, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticForm;

impl SymplecticForm {
    pub const OMEGA: [[i64; 2]; 2] = [[0, 1], [-1, 0]];

    /// `xᵀ Ω y` over the integers.
    pub fn int(x: [i64; 2], y: [i64; 2]) -> i64 {
        x[0] * y[1] - x[1] * y[0]
    }

    pub fn real(x: [f64; 2], y: [f64; 2]) -> f64 {
        x[0] * y[1] - x[1] * y[0]
    }

    /// `Ω v`.
    pub fn apply(v: [f64; 2]) -> [f64; 2] {
        [v[1], -v[0]]
    }
}

/// Splits `m` into the nearest multiple of `√π` and a centered remainder in
/// `[-√π/2, √π/2)`.
pub fn split_modular(m: f64) -> (f64, f64) {
    let k = (m / SQRT_PI + 0.5).floor();
    let integer = SQRT_PI * k;
    let mut frac = m - integer;
    // roundoff can push the remainder just outside the half-open cell
    if frac >= 0.5 * SQRT_PI {
        frac -= SQRT_PI;
    } else if frac < -0.5 * SQRT_PI {
        frac += SQRT_PI;
    }
    (m - frac, frac)
}

/// Fractional syndrome remainders, both in `[-√π/2, √π/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Syndrome {
    pub frac_q: f64,
    pub frac_p: f64,
}

impl Syndrome {
    pub fn new(frac_q: f64, frac_p: f64) -> Result<Self> {
        let half = 0.5 * SQRT_PI;
        for (name, v) in [("q", frac_q), ("p", frac_p)] {
            if !(v >= -half && v < half) {
                return Err(Error::Domain(format!(
                    "syndrome remainder m_{name} = {v} outside [-√π/2, √π/2)"
                )));
            }
        }
        Ok(Self { frac_q, frac_p })
    }

    pub fn zero() -> Self {
        Self { frac_q: 0.0, frac_p: 0.0 }
    }

    /// Standard binning of raw homodyne outcomes.
    pub fn from_outcomes(m_q: f64, m_p: f64) -> Self {
        Self {
            frac_q: split_modular(m_q).1,
            frac_p: split_modular(m_p).1,
        }
    }

    /// Clamps points on the closed cell into the half-open one, so grids that
    /// include the right edge stay valid.
    pub fn from_cell_point(m_q: f64, m_p: f64) -> Result<Self> {
        let half = 0.5 * SQRT_PI;
        let wrap = |v: f64| if v >= half && v <= half * (1.0 + 1e-12) { v - SQRT_PI } else { v };
        Self::new(wrap(m_q), wrap(m_p))
    }

    pub fn as_array(self) -> [f64; 2] {
        [self.frac_q, self.frac_p]
    }

    /// Midpoints of an `n × n` uniform grid over the cell, `m_q` varying
    /// slowest.
    pub fn grid(n: usize) -> Vec<Syndrome> {
        if n == 1 {
            return vec![Syndrome::zero()];
        }
        let h = SQRT_PI / n as f64;
        let coords: Vec<f64> = (0..n).map(|k| -0.5 * SQRT_PI + (k as f64 + 0.5) * h).collect();
        coords
            .iter()
            .flat_map(|&q| coords.iter().map(move |&p| Syndrome { frac_q: q, frac_p: p }))
            .collect()
    }
}

/// A phase-space displacement vector, `D(x) = exp(-i√2 xᵀΩx̂)` with
/// `x̂ = (q, p)`. The Fock amplitude is `α = x₁ + i x₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementLabel {
    pub x: [f64; 2],
}

impl DisplacementLabel {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x: [x1, x2] }
    }

    pub fn alpha(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.x[0], self.x[1])
    }

    /// `D(x) D(x′) = e^{iθ} D(x + x′)`; returns the sum label and `θ`.
    ///
    /// With this operator convention `θ = -xᵀΩx′`.
    pub fn compose(self, other: DisplacementLabel) -> (DisplacementLabel, f64) {
        let sum = DisplacementLabel::new(self.x[0] + other.x[0], self.x[1] + other.x[1]);
        (sum, -SymplecticForm::real(self.x, other.x))
    }
}

/// `e^{iπ nᵀΩa}` in integer arithmetic.
pub fn pauli_phase(n: [i64; 2], a: PauliIndex) -> i8 {
    if SymplecticForm::int(n, a.vector()).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// One term of a truncated subspace-Pauli expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubspaceTerm {
    pub label: DisplacementLabel,
    pub lattice: [i64; 2],
    pub phase: i8,
    pub weight: f64,
}

/// `(1/√π) Σ_{|n|∞ ≤ n_max} e^{iπnᵀΩa} D((2n + a)√(π/2))`, term by term, with
/// `n₁` varying slowest.
pub fn subspace_pauli_terms(a: PauliIndex, n_max: usize) -> Vec<SubspaceTerm> {
    let r = n_max as i64;
    let av = a.vector();
    let unit = (PI / 2.0).sqrt();
    let weight = 1.0 / SQRT_PI;
    let mut out = Vec::with_capacity((2 * n_max + 1).pow(2));
    for n1 in -r..=r {
        for n2 in -r..=r {
            let n = [n1, n2];
            out.push(SubspaceTerm {
                label: DisplacementLabel::new(
                    (2 * n1 + av[0]) as f64 * unit,
                    (2 * n2 + av[1]) as f64 * unit,
                ),
                lattice: n,
                phase: pauli_phase(n, a),
                weight,
            });
        }
    }
    out
}

/// `s = √γ`, `c = √(1-γ)` and `t = s/c`, with `t = ∞` at complete loss.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trig {
    pub s: f64,
    pub c: f64,
    pub t: f64,
}

impl Trig {
    pub fn is_complete_loss(&self) -> bool {
        self.t.is_infinite()
    }
}

pub fn trig_of_gamma(gamma: f64) -> Result<Trig> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("loss rate {gamma} outside [0, 1]")));
    }
    let s = gamma.sqrt();
    let c = (1.0 - gamma).sqrt();
    let t = if gamma == 1.0 { f64::INFINITY } else { s / c };
    Ok(Trig { s, c, t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_vectors_round_trip() {
        for a in PauliIndex::ALL {
            assert_eq!(PauliIndex::from_vector(a.vector()).unwrap(), a);
            assert_eq!(a.label().parse::<PauliIndex>().unwrap(), a);
        }
        assert!(PauliIndex::from_vector([2, 0]).is_err());
    }

    #[test]
    fn omega_is_antisymmetric_and_squares_to_minus_one() {
        let o = SymplecticForm::OMEGA;
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(o[i][j], -o[j][i]);
                let sq: i64 = (0..2).map(|k| o[i][k] * o[k][j]).sum();
                assert_eq!(sq, if i == j { -1 } else { 0 });
            }
        }
    }

    #[test]
    fn split_modular_examples() {
        assert_eq!(split_modular(0.0), (0.0, 0.0));
        let (i, f) = split_modular(SQRT_PI);
        assert!((i - SQRT_PI).abs() < 1e-15 && f.abs() < 1e-15);
        let (i, f) = split_modular(0.6 * SQRT_PI);
        assert!((i - SQRT_PI).abs() < 1e-15);
        assert!((f + 0.4 * SQRT_PI).abs() < 1e-15);
        // left edge belongs to the cell, right edge to the next one
        assert_eq!(split_modular(-0.5 * SQRT_PI).1, -0.5 * SQRT_PI);
        assert!((split_modular(0.5 * SQRT_PI).1 + 0.5 * SQRT_PI).abs() < 1e-15);
    }

    #[test]
    fn split_modular_is_idempotent_and_periodic() {
        for k in 0..200 {
            let frac = -0.5 * SQRT_PI + SQRT_PI * k as f64 / 200.0;
            assert_eq!(split_modular(frac).1, frac);
            let (i, f) = split_modular(frac);
            assert_eq!(i + f, frac);
            for shift in -3i32..=3 {
                let m = frac + shift as f64 * SQRT_PI;
                let (i, f) = split_modular(m);
                // the left edge may round onto the right edge, one period away
                let dist = (f - frac).abs();
                assert!(dist.min((SQRT_PI - dist).abs()) < 1e-14, "k={k} shift={shift}");
                assert!((i + f - m).abs() <= 4.0 * f64::EPSILON * m.abs().max(1.0));
            }
        }
    }

    #[test]
    fn syndrome_cell_bounds() {
        assert!(Syndrome::new(0.5 * SQRT_PI, 0.0).is_err());
        assert!(Syndrome::new(-0.5 * SQRT_PI, 0.0).is_ok());
        assert!(Syndrome::new(f64::NAN, 0.0).is_err());
        let s = Syndrome::from_outcomes(3.0 * SQRT_PI + 0.1, -0.2);
        assert!((s.frac_q - 0.1).abs() < 1e-14 && s.frac_p == -0.2);
        let g = Syndrome::grid(5);
        assert_eq!(g.len(), 25);
        assert!(g.iter().all(|s| Syndrome::new(s.frac_q, s.frac_p).is_ok()));
        assert!(g[12].frac_q.abs() < 1e-15 && g[12].frac_p.abs() < 1e-15);
    }

    #[test]
    fn pauli_phase_examples_and_exchange_symmetry() {
        for a in PauliIndex::ALL {
            assert_eq!(pauli_phase([0, 0], a), 1);
        }
        assert_eq!(pauli_phase([1, 0], PauliIndex::Z), -1);
        assert_eq!(pauli_phase([1, 1], PauliIndex::Y), 1);
        for n1 in -4..=4 {
            for n2 in -4..=4 {
                for a in PauliIndex::ALL {
                    let av = a.vector();
                    // e^{iπnᵀΩa} = e^{iπaᵀΩn} because the exponent only flips sign
                    let swapped = if SymplecticForm::int(av, [n1, n2]).rem_euclid(2) == 0 { 1 } else { -1 };
                    assert_eq!(pauli_phase([n1, n2], a), swapped);
                }
            }
        }
    }

    #[test]
    fn subspace_terms() {
        let t = subspace_pauli_terms(PauliIndex::I, 0);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].label, DisplacementLabel::new(0.0, 0.0));
        assert_eq!(t[0].phase, 1);
        assert!((t[0].weight - 1.0 / SQRT_PI).abs() < 1e-16);

        let t = subspace_pauli_terms(PauliIndex::X, 0);
        assert_eq!(t.len(), 1);
        assert!((t[0].label.x[0] - (PI / 2.0).sqrt()).abs() < 1e-15 && t[0].label.x[1] == 0.0);

        let t = subspace_pauli_terms(PauliIndex::Z, 1);
        assert_eq!(t.len(), 9);
        for term in &t {
            assert_eq!(term.phase, pauli_phase(term.lattice, PauliIndex::Z));
        }
    }

    #[test]
    fn displacement_composition_is_associative() {
        let xs = [
            DisplacementLabel::new(0.3, -1.2),
            DisplacementLabel::new(-0.7, 0.4),
            DisplacementLabel::new(2.1, 0.9),
        ];
        let (ab, p1) = xs[0].compose(xs[1]);
        let (ab_c, p2) = ab.compose(xs[2]);
        let (bc, q1) = xs[1].compose(xs[2]);
        let (a_bc, q2) = xs[0].compose(bc);
        assert!((ab_c.x[0] - a_bc.x[0]).abs() < 1e-14 && (ab_c.x[1] - a_bc.x[1]).abs() < 1e-14);
        assert!(((p1 + p2) - (q1 + q2)).abs() < 1e-14);
    }

    #[test]
    fn trig_values() {
        assert_eq!(trig_of_gamma(0.0).unwrap(), Trig { s: 0.0, c: 1.0, t: 0.0 });
        let t = trig_of_gamma(0.25).unwrap();
        assert!((t.s - 0.5).abs() < 1e-15);
        assert!((t.c - 0.866_025_403_784_438_6).abs() < 1e-15);
        assert!((t.t - 0.577_350_269_189_625_8).abs() < 1e-15);
        let t = trig_of_gamma(1.0).unwrap();
        assert!(t.is_complete_loss() && t.s == 1.0 && t.c == 0.0);
        assert!(trig_of_gamma(1.5).is_err());
    }
}
