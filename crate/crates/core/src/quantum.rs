//! Two-qubit states, spin projectors and Born-rule boxes.
//!
//! Basis order is `|00>, |01>, |10>, |11>` with Alice the left tensor factor.

use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ns::{NsBox, Probs, DEFAULT_TOL};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const UNIT_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Pauli matrices used for one party's observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Paulis {
    pub x: Mat2,
    pub y: Mat2,
    pub z: Mat2,
}

impl Paulis {
    pub fn standard() -> Self {
        let o = c(0.0, 0.0);
        Paulis {
            x: Matrix2::new(o, c(1.0, 0.0), c(1.0, 0.0), o),
            y: Matrix2::new(o, c(0.0, -1.0), c(0.0, 1.0), o),
            z: Matrix2::new(c(1.0, 0.0), o, o, c(-1.0, 0.0)),
        }
    }

    /// Standard matrices with the sign of `sigma_y` reversed.
    pub fn flipped_y() -> Self {
        let s = Self::standard();
        Paulis { y: -s.y, ..s }
    }

    /// `d . sigma`.
    pub fn dot(&self, d: &Vector3<f64>) -> Mat2 {
        self.x * c(d[0], 0.0) + self.y * c(d[1], 0.0) + self.z * c(d[2], 0.0)
    }
}

impl Default for Paulis {
    fn default() -> Self {
        Self::standard()
    }
}

fn check_unit(d: &Vector3<f64>) -> Result<()> {
    let norm = d.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

fn projector_with(p: &Paulis, d: &Vector3<f64>, bit: usize) -> Mat2 {
    let s = if bit & 1 == 0 { 1.0 } else { -1.0 };
    (Mat2::identity() + p.dot(d) * c(s, 0.0)) * c(0.5, 0.0)
}

/// `(I + (-1)^bit d . sigma) / 2`.
pub fn projector(d: &Vector3<f64>, bit: usize) -> Result<Mat2> {
    check_unit(d)?;
    Ok(projector_with(&Paulis::standard(), d, bit))
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct TwoQubitState {
    rho: Mat4,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    rho: [[[f64; 2]; 4]; 4],
}

impl TryFrom<StateJson> for TwoQubitState {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        let rho = Mat4::from_fn(|r, k| c(raw.rho[r][k][0], raw.rho[r][k][1]));
        TwoQubitState::from_density_matrix(rho)
    }
}

impl From<TwoQubitState> for StateJson {
    fn from(s: TwoQubitState) -> Self {
        let mut rho = [[[0.0; 2]; 4]; 4];
        for (r, row) in rho.iter_mut().enumerate() {
            for (k, cell) in row.iter_mut().enumerate() {
                let z = s.rho[(r, k)];
                *cell = [z.re, z.im];
            }
        }
        StateJson { rho }
    }
}

fn unit_interval(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::out_of_range(name, p, 0.0, 1.0));
    }
    Ok(())
}

impl TwoQubitState {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn from_density_matrix(rho: Mat4) -> Result<Self> {
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let skew = (rho - rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if skew > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {skew:e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let herm = (rho + rho.adjoint()) * c(0.5, 0.0);
        let min = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "eigenvalue {min:e} is negative"
            )));
        }
        Ok(TwoQubitState { rho })
    }

    /// `|v><v|` for a nonzero vector `v` (normalised here).
    pub fn from_pure(v: &Vector4<C64>) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState(
                "zero or non-finite state vector".into(),
            ));
        }
        let u = v / c(norm, 0.0);
        Self::from_density_matrix(u * u.adjoint())
    }

    /// `rho_A (x) rho_B`.
    pub fn product(rho_a: &Mat2, rho_b: &Mat2) -> Result<Self> {
        Self::from_density_matrix(rho_a.kronecker(rho_b))
    }

    /// `(|00> + |11>) / sqrt 2`.
    pub fn psi_plus() -> Self {
        let h = c(0.5, 0.0);
        let mut rho = Mat4::zeros();
        for &(r, k) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            rho[(r, k)] = h;
        }
        TwoQubitState { rho }
    }

    /// `cos(theta)|00> + sin(theta)|11>` for `theta` in `[0, pi/4]`.
    pub fn schmidt(theta: f64) -> Result<Self> {
        let hi = std::f64::consts::FRAC_PI_4;
        if !(0.0..=hi + 1e-15).contains(&theta) {
            return Err(Error::out_of_range("theta", theta, 0.0, hi));
        }
        let v = Vector4::new(
            c(theta.cos(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(theta.sin(), 0.0),
        );
        Self::from_pure(&v)
    }

    /// Schmidt state with `s = sin(2 theta)` in `[0, 1]`.
    pub fn schmidt_s(s: f64) -> Result<Self> {
        unit_interval("s", s)?;
        Self::schmidt(s.asin() / 2.0)
    }

    /// `p |psi+><psi+| + (1 - p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        unit_interval("p", p)?;
        let rho = Self::psi_plus().rho * c(p, 0.0) + Mat4::identity() * c((1.0 - p) / 4.0, 0.0);
        Ok(TwoQubitState { rho })
    }

    /// `p |psi+><psi+| + (1 - p) (|00><00| + |11><11|) / 2`.
    pub fn colored(p: f64) -> Result<Self> {
        unit_interval("p", p)?;
        let mut cc = Mat4::zeros();
        cc[(0, 0)] = c(0.5, 0.0);
        cc[(3, 3)] = c(0.5, 0.0);
        let rho = Self::psi_plus().rho * c(p, 0.0) + cc * c(1.0 - p, 0.0);
        Ok(TwoQubitState { rho })
    }

    /// `p rho1 + (1 - p) rho2`.
    pub fn mix(a: &Self, b: &Self, p: f64) -> Result<Self> {
        unit_interval("p", p)?;
        Self::from_density_matrix(a.rho * c(p, 0.0) + b.rho * c(1.0 - p, 0.0))
    }

    pub fn rho(&self) -> &Mat4 {
        &self.rho
    }

    /// `Tr(rho op)`, real part.
    pub fn expectation(&self, op: &Mat4) -> f64 {
        (self.rho * op).trace().re
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.rho)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Partial trace over Bob.
    pub fn reduced_a(&self) -> Mat2 {
        Mat2::from_fn(|r, k| self.rho[(2 * r, 2 * k)] + self.rho[(2 * r + 1, 2 * k + 1)])
    }

    /// Partial trace over Alice.
    pub fn reduced_b(&self) -> Mat2 {
        Mat2::from_fn(|r, k| self.rho[(r, k)] + self.rho[(r + 2, k + 2)])
    }

    /// `<(a . sigma) (x) (b . sigma)>`.
    pub fn correlator(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
        let p = Paulis::standard();
        self.expectation(&p.dot(a).kronecker(&p.dot(b)))
    }
}

/// Bloch directions of the two measurements of each party.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SettingsJson", into = "SettingsJson")]
pub struct MeasurementSettings {
    pub a: [Vector3<f64>; 2],
    pub b: [Vector3<f64>; 2],
}

#[derive(Serialize, Deserialize)]
struct SettingsJson {
    a0: [f64; 3],
    a1: [f64; 3],
    b0: [f64; 3],
    b1: [f64; 3],
}

impl TryFrom<SettingsJson> for MeasurementSettings {
    type Error = Error;

    fn try_from(s: SettingsJson) -> Result<Self> {
        MeasurementSettings::from_arrays([s.a0, s.a1, s.b0, s.b1])
    }
}

impl From<MeasurementSettings> for SettingsJson {
    fn from(s: MeasurementSettings) -> Self {
        let a = |v: &Vector3<f64>| [v[0], v[1], v[2]];
        SettingsJson {
            a0: a(&s.a[0]),
            a1: a(&s.a[1]),
            b0: a(&s.b[0]),
            b1: a(&s.b[1]),
        }
    }
}

impl MeasurementSettings {
    pub fn new(
        a0: Vector3<f64>,
        a1: Vector3<f64>,
        b0: Vector3<f64>,
        b1: Vector3<f64>,
    ) -> Result<Self> {
        for d in [&a0, &a1, &b0, &b1] {
            check_unit(d)?;
        }
        Ok(MeasurementSettings {
            a: [a0, a1],
            b: [b0, b1],
        })
    }

    /// Directions in the order `a0, a1, b0, b1`.
    pub fn from_arrays(d: [[f64; 3]; 4]) -> Result<Self> {
        let v = |x: [f64; 3]| Vector3::new(x[0], x[1], x[2]);
        MeasurementSettings::new(v(d[0]), v(d[1]), v(d[2]), v(d[3]))
    }
}

/// `P(m, n | i, j) = Tr(rho Pi^m_{a_i} (x) Pi^n_{b_j})`.
pub fn born_box(state: &TwoQubitState, settings: &MeasurementSettings) -> Result<NsBox> {
    born_box_with(state, settings, &Paulis::standard(), &Paulis::standard())
}

/// Born-rule box with explicit Pauli matrices for each party.
pub fn born_box_with(
    state: &TwoQubitState,
    settings: &MeasurementSettings,
    alice: &Paulis,
    bob: &Paulis,
) -> Result<NsBox> {
    let mut probs: Probs = [[[[0.0; 2]; 2]; 2]; 2];
    for (i, a) in settings.a.iter().enumerate() {
        for (j, b) in settings.b.iter().enumerate() {
            for m in 0..2 {
                let pa = projector_with(alice, a, m);
                for n in 0..2 {
                    let pb = projector_with(bob, b, n);
                    probs[i][j][m][n] = state.expectation(&pa.kronecker(&pb));
                }
            }
        }
    }
    NsBox::with_tolerance(probs, DEFAULT_TOL)
}
