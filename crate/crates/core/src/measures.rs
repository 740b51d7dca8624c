//! Bell and Mermin functions and the three distance measures built on them.
//!
//! `G` (Bell discord) and `Q` (Mermin discord) minimise a pairing expression over
//! the four strengths `|B_ab|` resp. `|M_ab|`; `T` is the largest deviation of a
//! box's Bell strengths from those of the product of its own marginals.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::ns::{CorrelatorForm, NsBox, DEFAULT_TOL};

fn sign(parity: u8) -> f64 {
    if parity & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Signed Bell-CHSH function `B_{alpha beta gamma}` of a correlator set.
pub fn bell_value(c: &CorrelatorForm, alpha: u8, beta: u8, gamma: u8) -> f64 {
    let e = &c.e;
    sign(gamma) * e[0][0]
        + sign(beta ^ gamma) * e[0][1]
        + sign(alpha ^ gamma) * e[1][0]
        + sign(alpha ^ beta ^ gamma ^ 1) * e[1][1]
}

/// Signed Mermin function `M_{alpha beta gamma}`.
///
/// Each label selects either the cross pair `(A0B1, A1B0)` or the diagonal pair
/// `(A0B0, A1B1)`; `gamma` flips the overall sign so that `M_ab1 = -M_ab0`.
pub fn mermin_value(c: &CorrelatorForm, alpha: u8, beta: u8, gamma: u8) -> f64 {
    let (alpha, beta, gamma) = (alpha & 1, beta & 1, gamma & 1);
    let e = &c.e;
    let cross = sign(gamma) * (sign(beta) * e[0][1] + sign(alpha) * e[1][0]);
    let diag = sign(gamma) * e[0][0] + sign(alpha ^ beta ^ gamma ^ 1) * e[1][1];
    let uses_cross = if alpha == 0 {
        alpha ^ beta == 0
    } else {
        alpha ^ beta == 1
    };
    if uses_cross {
        cross
    } else {
        diag
    }
}

/// `B^prod_{alpha beta}` computed from the marginal expectations.
pub fn product_bell_value(c: &CorrelatorForm, alpha: u8, beta: u8) -> f64 {
    let (a, b) = (&c.a, &c.b);
    (a[0] * b[0]
        + sign(beta) * a[0] * b[1]
        + sign(alpha) * a[1] * b[0]
        + sign(alpha ^ beta ^ 1) * a[1] * b[1])
        .abs()
}

pub fn bell_function(b: &NsBox, alpha: u8, beta: u8, gamma: u8) -> f64 {
    bell_value(&b.correlators(), alpha, beta, gamma)
}

pub fn mermin_function(b: &NsBox, alpha: u8, beta: u8, gamma: u8) -> f64 {
    mermin_value(&b.correlators(), alpha, beta, gamma)
}

pub fn product_bell(b: &NsBox, alpha: u8, beta: u8) -> f64 {
    product_bell_value(&b.correlators(), alpha, beta)
}

fn strengths(f: impl Fn(u8, u8) -> f64) -> [[f64; 2]; 2] {
    [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]]
}

/// `|B_{ab0}|` for all four `(a, b)`.
pub fn bell_strengths(c: &CorrelatorForm) -> [[f64; 2]; 2] {
    strengths(|a, b| bell_value(c, a, b, 0).abs())
}

/// `|M_{ab0}|` for all four `(a, b)`.
pub fn mermin_strengths(c: &CorrelatorForm) -> [[f64; 2]; 2] {
    strengths(|a, b| mermin_value(c, a, b, 0).abs())
}

pub fn product_bell_strengths(c: &CorrelatorForm) -> [[f64; 2]; 2] {
    strengths(|a, b| product_bell_value(c, a, b))
}

/// The three ways of splitting the labels `00, 01, 10, 11` into two pairs.
pub const PAIRINGS: [[(usize, usize); 4]; 3] = [
    [(0, 0), (0, 1), (1, 0), (1, 1)],
    [(0, 0), (1, 0), (0, 1), (1, 1)],
    [(0, 0), (1, 1), (0, 1), (1, 0)],
];

/// `min` over pairings of `||v_w - v_x| - |v_y - v_z||`.
pub fn pairing_discord(v: &[[f64; 2]; 2]) -> f64 {
    PAIRINGS
        .iter()
        .map(|[w, x, y, z]| {
            let first = (v[w.0][w.1] - v[x.0][x.1]).abs();
            let second = (v[y.0][y.1] - v[z.0][z.1]).abs();
            (first - second).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn bell_discord_of(c: &CorrelatorForm) -> f64 {
    pairing_discord(&bell_strengths(c))
}

pub fn mermin_discord_of(c: &CorrelatorForm) -> f64 {
    pairing_discord(&mermin_strengths(c))
}

pub fn t_measure_of(c: &CorrelatorForm) -> f64 {
    let bell = bell_strengths(c);
    let prod = product_bell_strengths(c);
    max_deviation(&bell, &prod)
}

fn max_deviation(bell: &[[f64; 2]; 2], prod: &[[f64; 2]; 2]) -> f64 {
    bell.iter()
        .flatten()
        .zip(prod.iter().flatten())
        .map(|(b, p)| (b - p).abs())
        .fold(0.0, f64::max)
}

/// Bell discord `G`.
pub fn bell_discord(b: &NsBox) -> f64 {
    bell_discord_of(&b.correlators())
}

/// Mermin discord `Q`.
pub fn mermin_discord(b: &NsBox) -> f64 {
    mermin_discord_of(&b.correlators())
}

/// Total-correlation measure `T`.
pub fn t_measure(b: &NsBox) -> f64 {
    t_measure_of(&b.correlators())
}

/// Returns `(c_signed, c)` with `c_signed = t - (g + q)` and `c = |c_signed|`.
pub fn classical_residual(g: f64, q: f64, t: f64) -> (f64, f64) {
    let signed = t - (g + q);
    (signed, signed.abs())
}

/// Inequality flags derived from the Bell and Mermin strengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityFlags {
    pub chsh_violated: bool,
    pub steering_violated: bool,
    pub monogamy_lhs: f64,
}

/// CHSH: `max B_ab > 2 + tol`. Steering: `max M_ab > sqrt(2) + tol`, evaluated on
/// the box alone (no check on the observables' commutator). Monogamy: `G + 2Q`.
pub fn inequality_flags(
    bell: &[[f64; 2]; 2],
    mermin: &[[f64; 2]; 2],
    g: f64,
    q: f64,
    tol: f64,
) -> InequalityFlags {
    let max_b = bell.iter().flatten().copied().fold(0.0, f64::max);
    let max_m = mermin.iter().flatten().copied().fold(0.0, f64::max);
    InequalityFlags {
        chsh_violated: max_b > 2.0 + tol,
        steering_violated: max_m > SQRT_2 + tol,
        monogamy_lhs: g + 2.0 * q,
    }
}

/// Every measure of a single box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub bell: [[f64; 2]; 2],
    pub mermin: [[f64; 2]; 2],
    pub bell_prod: [[f64; 2]; 2],
    pub g: f64,
    pub q: f64,
    pub t: f64,
    pub c_signed: f64,
    pub c: f64,
    pub chsh_violated: bool,
    pub steering_violated: bool,
    pub monogamy_lhs: f64,
}

impl MeasureReport {
    pub fn new(b: &NsBox) -> Self {
        Self::with_tolerance(b, DEFAULT_TOL)
    }

    pub fn with_tolerance(b: &NsBox, tol: f64) -> Self {
        Self::from_correlators(&b.correlators(), tol)
    }

    pub fn from_correlators(c: &CorrelatorForm, tol: f64) -> Self {
        let bell = bell_strengths(c);
        let mermin = mermin_strengths(c);
        let bell_prod = product_bell_strengths(c);
        let g = pairing_discord(&bell);
        let q = pairing_discord(&mermin);
        let t = max_deviation(&bell, &bell_prod);
        let (c_signed, c_abs) = classical_residual(g, q, t);
        let flags = inequality_flags(&bell, &mermin, g, q, tol);
        MeasureReport {
            bell,
            mermin,
            bell_prod,
            g,
            q,
            t,
            c_signed,
            c: c_abs,
            chsh_violated: flags.chsh_violated,
            steering_violated: flags.steering_violated,
            monogamy_lhs: flags.monogamy_lhs,
        }
    }

    pub fn max_bell(&self) -> f64 {
        self.bell.iter().flatten().copied().fold(0.0, f64::max)
    }

    pub fn max_mermin(&self) -> f64 {
        self.mermin.iter().flatten().copied().fold(0.0, f64::max)
    }
}
