//! Seeded random boxes, states and settings for property checks.

use nalgebra::{Vector2, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::ns::{Lro, NsBox, Vertex};
use crate::quantum::{born_box, Mat2, MeasurementSettings, TwoQubitState, C64};

/// Deterministic sampler; equal seeds give equal streams on every platform.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.gen()
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    /// Uniform point on the unit sphere.
    pub fn direction(&mut self) -> Vector3<f64> {
        loop {
            let v = Vector3::new(self.normal(), self.normal(), self.normal());
            let n = v.norm();
            if n > 1e-6 {
                return v / n;
            }
        }
    }

    pub fn settings(&mut self) -> MeasurementSettings {
        let (a0, a1, b0, b1) = (
            self.direction(),
            self.direction(),
            self.direction(),
            self.direction(),
        );
        MeasurementSettings::new(a0, a1, b0, b1).expect("normalised directions")
    }

    /// Pure state from a normalised complex Gaussian 4-vector.
    pub fn pure_state(&mut self) -> TwoQubitState {
        loop {
            let v = Vector4::from_fn(|_, _| self.complex_normal());
            if let Ok(s) = TwoQubitState::from_pure(&v) {
                return s;
            }
        }
    }

    /// Convex mixture of two random pure states with a uniform weight.
    pub fn mixed_state(&mut self) -> TwoQubitState {
        let a = self.pure_state();
        let b = self.pure_state();
        let p = self.unit();
        TwoQubitState::mix(&a, &b, p).expect("mixture of valid states")
    }

    /// Pure or mixed with equal probability.
    pub fn state(&mut self) -> TwoQubitState {
        if self.rng.gen_bool(0.5) {
            self.pure_state()
        } else {
            self.mixed_state()
        }
    }

    /// Single-qubit density matrix: mixture of two random pure states.
    pub fn qubit_state(&mut self) -> Mat2 {
        let mut pure = || loop {
            let v = Vector2::new(self.complex_normal(), self.complex_normal());
            let n = v.norm();
            if n > 1e-6 {
                let u = v / C64::new(n, 0.0);
                return u * u.adjoint();
            }
        };
        let (a, b) = (pure(), pure());
        let p = self.unit();
        a * C64::new(p, 0.0) + b * C64::new(1.0 - p, 0.0)
    }

    pub fn product_state(&mut self) -> TwoQubitState {
        let a = self.qubit_state();
        let b = self.qubit_state();
        TwoQubitState::product(&a, &b).expect("product of qubit states")
    }

    /// Born-rule box of a random state under random settings.
    pub fn quantum_box(&mut self) -> NsBox {
        let s = self.state();
        let set = self.settings();
        born_box(&s, &set).expect("quantum boxes are valid")
    }

    /// Mixture of one to four of the 24 extremal boxes (8 PR, 16 deterministic)
    /// with exponentially distributed weights.
    pub fn ns_box(&mut self) -> NsBox {
        let vertices: Vec<Vertex> = Vertex::all_pr()
            .chain(Vertex::all_deterministic())
            .collect();
        let k = self.rng.gen_range(1..=4);
        let mut boxes = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        for _ in 0..k {
            boxes.push(NsBox::vertex(
                &vertices[self.rng.gen_range(0..vertices.len())],
            ));
            let w: f64 = self.rng.sample(Exp1);
            weights.push(w);
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        NsBox::mix(&boxes, &weights).expect("normalised weights")
    }

    /// Uniform element of the 128-element relabeling group.
    pub fn lro(&mut self) -> Lro {
        Lro::from_code(self.rng.gen_range(0..128))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        for _ in 0..20 {
            assert_eq!(a.ns_box(), b.ns_box());
            assert_eq!(a.quantum_box(), b.quantum_box());
            assert_eq!(a.lro(), b.lro());
        }
        assert_ne!(Sampler::new(1).ns_box(), Sampler::new(2).ns_box());
    }

    #[test]
    fn samples_are_valid() {
        let mut s = Sampler::new(3);
        for _ in 0..200 {
            assert!((s.direction().norm() - 1.0).abs() < 1e-12);
            let st = s.state();
            assert!(st.eigenvalues().iter().all(|e| *e > -1e-10));
            let q = s.qubit_state();
            assert!((q.trace().re - 1.0).abs() < 1e-12);
            assert!(s.product_state().purity() <= 1.0 + 1e-12);
        }
    }
}
