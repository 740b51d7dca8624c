//! Two-party, two-input, two-output nonsignaling boxes.
//!
//! A box is stored as `probs[i][j][m][n] = P(a_m, b_n | A_i, B_j)` where `i`, `j`
//! are the inputs of Alice and Bob and `m`, `n` their output bits. Output bit
//! `m` corresponds to the measurement value `(-1)^m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Probability table indexed `[i][j][m][n]`.
pub type Probs = [[[[f64; 2]; 2]; 2]; 2];

/// Default tolerance used when validating boxes.
pub const DEFAULT_TOL: f64 = 1e-9;

fn bit(b: u8) -> usize {
    (b & 1) as usize
}

fn sign(parity: usize) -> f64 {
    if parity & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Iterates over all 16 `(i, j, m, n)` index tuples in row-major order.
pub fn indices() -> impl Iterator<Item = [usize; 4]> {
    (0..16).map(|k| [(k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1])
}

/// A validated nonsignaling box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxJson", into = "BoxJson")]
pub struct NsBox {
    probs: Probs,
}

#[derive(Serialize, Deserialize)]
struct BoxJson {
    probs: Probs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

impl TryFrom<BoxJson> for NsBox {
    type Error = Error;

    fn try_from(raw: BoxJson) -> Result<Self> {
        let tol = raw.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Parse(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        NsBox::with_tolerance(raw.probs, tol)
    }
}

impl From<NsBox> for BoxJson {
    fn from(b: NsBox) -> Self {
        BoxJson {
            probs: b.probs,
            tol: None,
        }
    }
}

impl NsBox {
    /// Validates `probs` with the default tolerance.
    pub fn new(probs: Probs) -> Result<Self> {
        Self::with_tolerance(probs, DEFAULT_TOL)
    }

    /// Validates `probs`: entries in `[-tol, 0)` are clamped to zero (and entries in
    /// `(1, 1 + tol]` to one), then each `(i, j)` block is renormalized.
    pub fn with_tolerance(mut probs: Probs, tol: f64) -> Result<Self> {
        for [i, j, m, n] in indices() {
            let v = probs[i][j][m][n];
            let index = [i, j, m, n];
            if !v.is_finite() {
                return Err(Error::NotABox(Violation::NonFinite { index }));
            }
            if v < -tol {
                return Err(Error::NotABox(Violation::Negative { index, value: v }));
            }
            if v > 1.0 + tol {
                return Err(Error::NotABox(Violation::AboveOne { index, value: v }));
            }
            probs[i][j][m][n] = v.clamp(0.0, 1.0);
        }
        for i in 0..2 {
            for j in 0..2 {
                let sum: f64 = probs[i][j].iter().flatten().sum();
                if (sum - 1.0).abs() > tol {
                    return Err(Error::NotABox(Violation::Normalization {
                        inputs: [i, j],
                        sum,
                    }));
                }
                for m in 0..2 {
                    for n in 0..2 {
                        probs[i][j][m][n] /= sum;
                    }
                }
            }
        }
        for i in 0..2 {
            for m in 0..2 {
                let p0 = probs[i][0][m][0] + probs[i][0][m][1];
                let p1 = probs[i][1][m][0] + probs[i][1][m][1];
                if (p0 - p1).abs() > tol {
                    return Err(Error::NotABox(Violation::SignalingAlice {
                        input: i,
                        output: m,
                        spread: (p0 - p1).abs(),
                    }));
                }
            }
        }
        for j in 0..2 {
            for n in 0..2 {
                let p0 = probs[0][j][0][n] + probs[0][j][1][n];
                let p1 = probs[1][j][0][n] + probs[1][j][1][n];
                if (p0 - p1).abs() > tol {
                    return Err(Error::NotABox(Violation::SignalingBob {
                        input: j,
                        output: n,
                        spread: (p0 - p1).abs(),
                    }));
                }
            }
        }
        Ok(NsBox { probs })
    }

    /// Builds a box from the flat row-major layout `[i][j][m][n]`.
    pub fn from_flat(flat: &[f64; 16]) -> Result<Self> {
        Self::new(probs_from_flat(flat))
    }

    pub fn probs(&self) -> &Probs {
        &self.probs
    }

    pub fn flat(&self) -> [f64; 16] {
        probs_to_flat(&self.probs)
    }

    pub fn p(&self, i: usize, j: usize, m: usize, n: usize) -> f64 {
        self.probs[i][j][m][n]
    }

    /// `P_A(m | i)`.
    pub fn marginal_a(&self, i: usize, m: usize) -> f64 {
        0.5 * (0..2)
            .map(|j| self.probs[i][j][m][0] + self.probs[i][j][m][1])
            .sum::<f64>()
    }

    /// `P_B(n | j)`.
    pub fn marginal_b(&self, j: usize, n: usize) -> f64 {
        0.5 * (0..2)
            .map(|i| self.probs[i][j][0][n] + self.probs[i][j][1][n])
            .sum::<f64>()
    }

    /// Reconstructs the box from its eight correlators.
    ///
    /// Fails with [`Error::NotABox`] when the correlator point lies outside the
    /// box body (some probability below `-tol`).
    pub fn from_correlators(c: &CorrelatorForm) -> Result<Self> {
        for v in c.a.iter().chain(&c.b).chain(c.e.iter().flatten()) {
            if !(-1.0 - DEFAULT_TOL..=1.0 + DEFAULT_TOL).contains(v) {
                return Err(Error::out_of_range("correlator", *v, -1.0, 1.0));
            }
        }
        Self::new(c.to_probs())
    }

    pub fn correlators(&self) -> CorrelatorForm {
        CorrelatorForm::from_probs(&self.probs)
    }

    pub fn white_noise() -> Self {
        NsBox {
            probs: [[[[0.25; 2]; 2]; 2]; 2],
        }
    }

    /// PR box: weight 1/2 on `m ^ n == i*j ^ alpha*i ^ beta*j ^ gamma`.
    pub fn pr(alpha: u8, beta: u8, gamma: u8) -> Self {
        let (a, b, g) = (bit(alpha), bit(beta), bit(gamma));
        let mut probs = [[[[0.0; 2]; 2]; 2]; 2];
        for [i, j, m, n] in indices() {
            if m ^ n == (i & j) ^ (a & i) ^ (b & j) ^ g {
                probs[i][j][m][n] = 0.5;
            }
        }
        NsBox { probs }
    }

    /// Deterministic box: `m = alpha*i ^ beta`, `n = gamma*j ^ epsilon`.
    pub fn deterministic(alpha: u8, beta: u8, gamma: u8, epsilon: u8) -> Self {
        let (a, b, g, e) = (bit(alpha), bit(beta), bit(gamma), bit(epsilon));
        let mut probs = [[[[0.0; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                probs[i][j][(a & i) ^ b][(g & j) ^ e] = 1.0;
            }
        }
        NsBox { probs }
    }

    /// Mermin box. For `beta = 0` the input pairs with `i ^ j = 0` are uniform and
    /// the others carry the PR-type pattern; for `beta = 1` the roles swap.
    pub fn mermin(alpha: u8, beta: u8, gamma: u8) -> Self {
        let (a, b, g) = (bit(alpha), bit(beta), bit(gamma));
        let uniform_parity = b;
        let mut probs = [[[[0.0; 2]; 2]; 2]; 2];
        for [i, j, m, n] in indices() {
            probs[i][j][m][n] = if i ^ j == uniform_parity {
                0.25
            } else if m ^ n == (i & j) ^ (a & i) ^ (b & j) ^ g {
                0.5
            } else {
                0.0
            };
        }
        NsBox { probs }
    }

    pub fn vertex(label: &Vertex) -> Self {
        match *label {
            Vertex::Pr { alpha, beta, gamma } => Self::pr(alpha, beta, gamma),
            Vertex::Deterministic {
                alpha,
                beta,
                gamma,
                epsilon,
            } => Self::deterministic(alpha, beta, gamma, epsilon),
            Vertex::Mermin { alpha, beta, gamma } => Self::mermin(alpha, beta, gamma),
            Vertex::WhiteNoise => Self::white_noise(),
        }
    }

    /// `p * self + (1 - p) * P_N`.
    pub fn with_noise(&self, p: f64) -> Result<Self> {
        Self::mix(&[*self, Self::white_noise()], &[p, 1.0 - p])
    }

    /// Convex combination of `boxes` with `weights`.
    pub fn mix(boxes: &[NsBox], weights: &[f64]) -> Result<Self> {
        if boxes.is_empty() || boxes.len() != weights.len() {
            return Err(Error::BadWeights(format!(
                "{} boxes but {} weights",
                boxes.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights
            .iter()
            .find(|w| !w.is_finite() || **w < -DEFAULT_TOL)
        {
            return Err(Error::BadWeights(format!(
                "negative or non-finite weight {w}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::BadWeights(format!("weights sum to {total}")));
        }
        let mut probs = [[[[0.0; 2]; 2]; 2]; 2];
        for (b, &w) in boxes.iter().zip(weights) {
            for [i, j, m, n] in indices() {
                probs[i][j][m][n] += w.max(0.0) * b.probs[i][j][m][n];
            }
        }
        Self::new(probs)
    }

    pub fn apply_lro(&self, op: &Lro) -> Self {
        NsBox {
            probs: op.apply_to_probs(&self.probs),
        }
    }

    /// True iff `P(m,n|i,j) = P_A(m|i) P_B(n|j)` within `tol` for every entry.
    pub fn is_product(&self, tol: f64) -> bool {
        let prod = self.product_of_marginals();
        self.max_abs_diff(&prod) <= tol
    }

    /// The product box built from this box's own marginals.
    pub fn product_of_marginals(&self) -> Self {
        let mut probs = [[[[0.0; 2]; 2]; 2]; 2];
        for [i, j, m, n] in indices() {
            probs[i][j][m][n] = self.marginal_a(i, m) * self.marginal_b(j, n);
        }
        NsBox { probs }
    }

    pub fn max_abs_diff(&self, other: &NsBox) -> f64 {
        max_abs_diff(&self.probs, &other.probs)
    }
}

pub fn probs_from_flat(flat: &[f64; 16]) -> Probs {
    let mut probs = [[[[0.0; 2]; 2]; 2]; 2];
    for (k, [i, j, m, n]) in indices().enumerate() {
        probs[i][j][m][n] = flat[k];
    }
    probs
}

pub fn probs_to_flat(probs: &Probs) -> [f64; 16] {
    let mut flat = [0.0; 16];
    for (k, [i, j, m, n]) in indices().enumerate() {
        flat[k] = probs[i][j][m][n];
    }
    flat
}

pub fn max_abs_diff(a: &Probs, b: &Probs) -> f64 {
    indices()
        .map(|[i, j, m, n]| (a[i][j][m][n] - b[i][j][m][n]).abs())
        .fold(0.0, f64::max)
}

/// The eight expectation values `<A_i>`, `<B_j>`, `<A_i B_j>`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrelatorForm {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub e: [[f64; 2]; 2],
}

impl CorrelatorForm {
    /// Correlators of an arbitrary (possibly signed) table; marginals are averaged
    /// over the other party's input.
    pub fn from_probs(p: &Probs) -> Self {
        let mut c = CorrelatorForm::default();
        for [i, j, m, n] in indices() {
            let v = p[i][j][m][n];
            c.e[i][j] += sign(m ^ n) * v;
            c.a[i] += 0.5 * sign(m) * v;
            c.b[j] += 0.5 * sign(n) * v;
        }
        c
    }

    pub fn to_probs(&self) -> Probs {
        let mut probs = [[[[0.0; 2]; 2]; 2]; 2];
        for [i, j, m, n] in indices() {
            probs[i][j][m][n] = 0.25
                * (1.0 + sign(m) * self.a[i] + sign(n) * self.b[j] + sign(m ^ n) * self.e[i][j]);
        }
        probs
    }

    pub fn max_abs_diff(&self, other: &CorrelatorForm) -> f64 {
        self.a
            .iter()
            .chain(&self.b)
            .chain(self.e.iter().flatten())
            .zip(
                other
                    .a
                    .iter()
                    .chain(&other.b)
                    .chain(other.e.iter().flatten()),
            )
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Labels of the extremal and reference boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Vertex {
    Pr {
        alpha: u8,
        beta: u8,
        gamma: u8,
    },
    Deterministic {
        alpha: u8,
        beta: u8,
        gamma: u8,
        epsilon: u8,
    },
    Mermin {
        alpha: u8,
        beta: u8,
        gamma: u8,
    },
    WhiteNoise,
}

impl Vertex {
    pub fn all_pr() -> impl Iterator<Item = Vertex> {
        (0..8u8).map(|k| Vertex::Pr {
            alpha: (k >> 2) & 1,
            beta: (k >> 1) & 1,
            gamma: k & 1,
        })
    }

    pub fn all_deterministic() -> impl Iterator<Item = Vertex> {
        (0..16u8).map(|k| Vertex::Deterministic {
            alpha: (k >> 3) & 1,
            beta: (k >> 2) & 1,
            gamma: (k >> 1) & 1,
            epsilon: k & 1,
        })
    }

    pub fn all_mermin() -> impl Iterator<Item = Vertex> {
        (0..8u8).map(|k| Vertex::Mermin {
            alpha: (k >> 2) & 1,
            beta: (k >> 1) & 1,
            gamma: k & 1,
        })
    }
}

/// Relabeling performed by one party: input `i -> i ^ flip_input`, output
/// `m -> m ^ alpha*i ^ beta` (with `i` the input before flipping).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LocalRelabel {
    pub flip_input: bool,
    pub alpha: bool,
    pub beta: bool,
}

impl LocalRelabel {
    fn map(&self, input: usize, output: usize) -> (usize, usize) {
        let i = input;
        let m = output ^ (self.alpha as usize & i) ^ self.beta as usize;
        (i ^ self.flip_input as usize, m)
    }

    /// `other` applied after `self`.
    fn then(&self, other: &LocalRelabel) -> LocalRelabel {
        LocalRelabel {
            flip_input: self.flip_input ^ other.flip_input,
            alpha: self.alpha ^ other.alpha,
            beta: self.beta ^ other.beta ^ (other.alpha & self.flip_input),
        }
    }

    fn inverse(&self) -> LocalRelabel {
        LocalRelabel {
            flip_input: self.flip_input,
            alpha: self.alpha,
            beta: self.beta ^ (self.alpha & self.flip_input),
        }
    }
}

/// Local reversible operation: independent relabelings by each party followed by
/// an optional exchange of the parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Lro {
    pub alice: LocalRelabel,
    pub bob: LocalRelabel,
    pub swap_parties: bool,
}

impl Lro {
    pub fn identity() -> Self {
        Lro::default()
    }

    /// Bit encoding, most significant first:
    /// `(flip_A, alpha_A, beta_A, flip_B, alpha_B, beta_B, swap)`.
    pub fn code(&self) -> u8 {
        let bits = [
            self.alice.flip_input,
            self.alice.alpha,
            self.alice.beta,
            self.bob.flip_input,
            self.bob.alpha,
            self.bob.beta,
            self.swap_parties,
        ];
        bits.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8)
    }

    pub fn from_code(code: u8) -> Self {
        let b = |k: u8| (code >> k) & 1 == 1;
        Lro {
            alice: LocalRelabel {
                flip_input: b(6),
                alpha: b(5),
                beta: b(4),
            },
            bob: LocalRelabel {
                flip_input: b(3),
                alpha: b(2),
                beta: b(1),
            },
            swap_parties: b(0),
        }
    }

    /// All 128 operations in ascending code order.
    pub fn all() -> impl Iterator<Item = Lro> {
        (0..128u8).map(Lro::from_code)
    }

    /// The 64 operations that do not exchange the parties, in ascending code order.
    pub fn local() -> impl Iterator<Item = Lro> {
        (0..64u8).map(|k| Lro::from_code(k << 1))
    }

    /// Image of the index `(i, j, m, n)`.
    pub fn map_index(&self, [i, j, m, n]: [usize; 4]) -> [usize; 4] {
        let (i2, m2) = self.alice.map(i, m);
        let (j2, n2) = self.bob.map(j, n);
        if self.swap_parties {
            [j2, i2, n2, m2]
        } else {
            [i2, j2, m2, n2]
        }
    }

    pub fn apply_to_probs(&self, p: &Probs) -> Probs {
        let mut out = [[[[0.0; 2]; 2]; 2]; 2];
        for idx in indices() {
            let [i2, j2, m2, n2] = self.map_index(idx);
            let [i, j, m, n] = idx;
            out[i2][j2][m2][n2] = p[i][j][m][n];
        }
        out
    }

    /// The operation equivalent to applying `self` and then `next`.
    pub fn then(&self, next: &Lro) -> Lro {
        let (to_alice, to_bob) = if self.swap_parties {
            (next.bob, next.alice)
        } else {
            (next.alice, next.bob)
        };
        Lro {
            alice: self.alice.then(&to_alice),
            bob: self.bob.then(&to_bob),
            swap_parties: self.swap_parties ^ next.swap_parties,
        }
    }

    pub fn inverse(&self) -> Lro {
        if self.swap_parties {
            Lro {
                alice: self.bob.inverse(),
                bob: self.alice.inverse(),
                swap_parties: true,
            }
        } else {
            Lro {
                alice: self.alice.inverse(),
                bob: self.bob.inverse(),
                swap_parties: false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: &CorrelatorForm) -> [f64; 4] {
        [c.e[0][0], c.e[0][1], c.e[1][0], c.e[1][1]]
    }

    #[test]
    fn zero_correlators_give_white_noise() {
        let b = NsBox::from_correlators(&CorrelatorForm::default()).unwrap();
        assert_eq!(b, NsBox::white_noise());
        assert_eq!(
            NsBox::white_noise().correlators(),
            CorrelatorForm::default()
        );
    }

    #[test]
    fn pr_box_correlators() {
        let c = CorrelatorForm {
            a: [0.0; 2],
            b: [0.0; 2],
            e: [[1.0, 1.0], [1.0, -1.0]],
        };
        assert_eq!(NsBox::from_correlators(&c).unwrap(), NsBox::pr(0, 0, 0));
        assert_eq!(NsBox::pr(0, 0, 0).correlators(), c);
    }

    #[test]
    fn deterministic_from_all_plus_one() {
        let c = CorrelatorForm {
            a: [1.0; 2],
            b: [1.0; 2],
            e: [[1.0; 2]; 2],
        };
        let d = NsBox::from_correlators(&c).unwrap();
        assert_eq!(d, NsBox::deterministic(0, 0, 0, 0));
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(d.p(i, j, 0, 0), 1.0);
            }
        }
    }

    #[test]
    fn half_pr_half_noise_correlators() {
        let b = NsBox::mix(&[NsBox::pr(0, 0, 0), NsBox::white_noise()], &[0.5, 0.5]).unwrap();
        assert_eq!(e(&b.correlators()), [0.5, 0.5, 0.5, -0.5]);
        assert_eq!(b.correlators().a, [0.0, 0.0]);
    }

    #[test]
    fn correlator_point_outside_body_is_rejected() {
        // <A0 B0> = 1 with <A0> = -1, <B0> = 1 is impossible.
        let c = CorrelatorForm {
            a: [-1.0, 0.0],
            b: [1.0, 0.0],
            e: [[1.0, 0.0], [0.0, 0.0]],
        };
        assert!(matches!(
            NsBox::from_correlators(&c),
            Err(Error::NotABox(Violation::Negative { .. }))
        ));
    }

    #[test]
    fn mermin_000_is_average_of_two_pr_boxes() {
        // Entry-by-entry comparison against the two PR-box patterns.
        let pr000 = NsBox::pr(0, 0, 0);
        let pr111 = NsBox::pr(1, 1, 1);
        let m = NsBox::mermin(0, 0, 0);
        for [i, j, mm, n] in indices() {
            let avg = 0.5 * (pr000.p(i, j, mm, n) + pr111.p(i, j, mm, n));
            assert_eq!(m.p(i, j, mm, n), avg, "entry {:?}", [i, j, mm, n]);
        }
    }

    #[test]
    fn every_vertex_is_a_valid_box_with_rational_entries() {
        let labels = Vertex::all_pr()
            .chain(Vertex::all_deterministic())
            .chain(Vertex::all_mermin())
            .chain(std::iter::once(Vertex::WhiteNoise));
        for label in labels {
            let b = NsBox::vertex(&label);
            assert_eq!(NsBox::new(*b.probs()).unwrap(), b);
            for v in b.flat() {
                assert!([0.0, 0.25, 0.5, 1.0].contains(&v), "{label:?} has {v}");
            }
        }
    }

    #[test]
    fn uniform_mixture_of_deterministic_boxes_is_white_noise() {
        let boxes: Vec<_> = Vertex::all_deterministic()
            .map(|v| NsBox::vertex(&v))
            .collect();
        // Direct summation over the deterministic patterns.
        let mut counts = [[[[0u32; 2]; 2]; 2]; 2];
        for b in &boxes {
            for [i, j, m, n] in indices() {
                if b.p(i, j, m, n) == 1.0 {
                    counts[i][j][m][n] += 1;
                }
            }
        }
        for [i, j, m, n] in indices() {
            assert_eq!(counts[i][j][m][n], 4);
        }
        let mixed = NsBox::mix(&boxes, &[1.0 / 16.0; 16]).unwrap();
        assert!(mixed.max_abs_diff(&NsBox::white_noise()) < 1e-15);
    }

    #[test]
    fn mix_identity_and_bad_weights() {
        let n = NsBox::white_noise();
        assert_eq!(NsBox::mix(&[n], &[1.0]).unwrap(), n);
        assert!(matches!(
            NsBox::mix(&[n], &[0.5]),
            Err(Error::BadWeights(_))
        ));
        assert!(matches!(
            NsBox::mix(&[n, n], &[1.5, -0.5]),
            Err(Error::BadWeights(_))
        ));
        assert!(matches!(NsBox::mix(&[], &[]), Err(Error::BadWeights(_))));
        assert!(matches!(
            NsBox::mix(&[n], &[0.5, 0.5]),
            Err(Error::BadWeights(_))
        ));
    }

    #[test]
    fn validation_reports_violations() {
        let mut p = *NsBox::white_noise().probs();
        p[0][1][0][0] = 0.5;
        p[0][1][1][1] = 0.0;
        // Normalization holds, Alice's marginal for (i=0, m=0) now depends on j.
        assert!(matches!(
            NsBox::new(p),
            Err(Error::NotABox(Violation::SignalingAlice { .. }))
        ));

        let mut p = *NsBox::white_noise().probs();
        p[1][1][0][0] = 0.3;
        assert!(matches!(
            NsBox::new(p),
            Err(Error::NotABox(Violation::Normalization {
                inputs: [1, 1],
                ..
            }))
        ));

        let mut p = *NsBox::pr(0, 0, 0).probs();
        p[0][0][0][1] = -1e-12;
        let b = NsBox::new(p).unwrap();
        assert_eq!(b.p(0, 0, 0, 1), 0.0);

        p[0][0][0][1] = -1e-3;
        assert!(matches!(
            NsBox::new(p),
            Err(Error::NotABox(Violation::Negative {
                index: [0, 0, 0, 1],
                ..
            }))
        ));
    }

    #[test]
    fn lro_examples() {
        let d = NsBox::deterministic(0, 0, 0, 0);
        assert_eq!(d.apply_lro(&Lro::identity()), d);

        let flip = Lro {
            alice: LocalRelabel {
                beta: true,
                ..Default::default()
            },
            ..Default::default()
        };
        assert_eq!(d.apply_lro(&flip), NsBox::deterministic(0, 1, 0, 0));

        let c = CorrelatorForm {
            a: [1.0, 0.0],
            b: [0.0, 0.0],
            e: [[0.0; 2]; 2],
        };
        let b = NsBox::from_correlators(&c).unwrap();
        let swap = Lro {
            swap_parties: true,
            ..Default::default()
        };
        let sc = b.apply_lro(&swap).correlators();
        assert_eq!(sc.a, [0.0, 0.0]);
        assert_eq!(sc.b, [1.0, 0.0]);
    }

    #[test]
    fn lro_codes_roundtrip() {
        for code in 0..128u8 {
            assert_eq!(Lro::from_code(code).code(), code);
        }
        assert_eq!(Lro::local().count(), 64);
        assert!(Lro::local().all(|g| !g.swap_parties));
    }

    fn permutation(g: &Lro) -> Vec<[usize; 4]> {
        indices().map(|idx| g.map_index(idx)).collect()
    }

    #[test]
    fn lro_group_closure_and_inverses() {
        for g in Lro::all() {
            let id = g.then(&g.inverse());
            assert_eq!(permutation(&id), permutation(&Lro::identity()), "{g:?}");
            assert_eq!(id, Lro::identity());
            for h in Lro::all() {
                // The composed operation acts as the composed permutation.
                let composed = g.then(&h);
                let expect: Vec<_> = indices().map(|idx| h.map_index(g.map_index(idx))).collect();
                assert_eq!(permutation(&composed), expect);
            }
        }
    }

    #[test]
    fn lro_preserves_vertex_families() {
        let prs: Vec<_> = Vertex::all_pr().map(|v| NsBox::vertex(&v)).collect();
        let dets: Vec<_> = Vertex::all_deterministic()
            .map(|v| NsBox::vertex(&v))
            .collect();
        for g in Lro::all() {
            for b in &prs {
                assert!(prs.contains(&b.apply_lro(&g)));
            }
            for b in &dets {
                assert!(dets.contains(&b.apply_lro(&g)));
            }
        }
    }

    #[test]
    fn product_check() {
        assert!(NsBox::white_noise().is_product(1e-12));
        assert!(NsBox::deterministic(0, 0, 0, 0).is_product(1e-12));
        assert!(NsBox::deterministic(1, 0, 1, 1).is_product(1e-12));
        assert!(!NsBox::pr(0, 0, 0).is_product(1e-6));
    }

    #[test]
    fn json_roundtrip_revalidates() {
        let b = NsBox::mermin(1, 0, 1);
        let s = serde_json::to_string(&b).unwrap();
        let back: NsBox = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);

        let bad = r#"{"probs": [[[[1,0],[0,0]],[[1,0],[0,0]]],[[[1,0],[0,0]],[[0,0],[0,0.5]]]]}"#;
        assert!(serde_json::from_str::<NsBox>(bad).is_err());
        let loose = r#"{"probs": [[[[0.5,0],[0,0.5]],[[0.5,0],[0,0.5]]],[[[0.5,0],[0,0.5]],[[0,0.5],[0.5,0.001]]]], "tol": 0.01}"#;
        assert!(serde_json::from_str::<NsBox>(loose).is_ok());
    }
}
