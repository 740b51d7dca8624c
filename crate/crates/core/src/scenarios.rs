//! Named state/settings families with closed-form values for their measures.
//!
//! Each scenario maps a parameter to a two-qubit state and four measurement
//! directions, and lists the values the Born-rule box is expected to produce.
//! Schmidt families are parameterised by `s = sin 2theta` with `c = cos 2theta`.

use std::f64::consts::SQRT_2;
use std::io::Write;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::{canonical_split, local_content};
use crate::error::{Error, Result};
use crate::measures::MeasureReport;
use crate::ns::{NsBox, DEFAULT_TOL};
use crate::numfmt::fmt_sig;
use crate::quantum::{born_box, born_box_with, MeasurementSettings, Paulis, TwoQubitState};

/// A single reported quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Field {
    /// `|B_ab|`.
    B(u8, u8),
    /// `|M_ab|`.
    M(u8, u8),
    G,
    Q,
    T,
    CSigned,
    C,
}

impl Field {
    pub fn name(&self) -> String {
        match self {
            Field::B(a, b) => format!("B{a}{b}"),
            Field::M(a, b) => format!("M{a}{b}"),
            Field::G => "G".into(),
            Field::Q => "Q".into(),
            Field::T => "T".into(),
            Field::CSigned => "C_signed".into(),
            Field::C => "C".into(),
        }
    }

    pub fn value(&self, r: &MeasureReport) -> f64 {
        match *self {
            Field::B(a, b) => r.bell[a as usize][b as usize],
            Field::M(a, b) => r.mermin[a as usize][b as usize],
            Field::G => r.g,
            Field::Q => r.q,
            Field::T => r.t,
            Field::CSigned => r.c_signed,
            Field::C => r.c,
        }
    }
}

pub type Generated = (TwoQubitState, MeasurementSettings);

/// A parameterised family together with its closed forms.
#[derive(Clone, Copy)]
pub struct ScenarioSpec {
    pub name: &'static str,
    pub param_name: &'static str,
    pub range: (f64, f64),
    pub notes: &'static str,
    generator: fn(f64) -> Result<Generated>,
    expected: fn(f64) -> Vec<(Field, f64)>,
    weights: Option<fn(f64) -> (f64, f64)>,
}

impl std::fmt::Debug for ScenarioSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScenarioSpec")
            .field("name", &self.name)
            .field("param_name", &self.param_name)
            .field("range", &self.range)
            .finish()
    }
}

impl ScenarioSpec {
    fn check_param(&self, param: f64) -> Result<()> {
        let (lo, hi) = self.range;
        if !(param >= lo - 1e-12 && param <= hi + 1e-12) {
            return Err(Error::out_of_range(self.param_name, param, lo, hi));
        }
        Ok(())
    }

    pub fn generate(&self, param: f64) -> Result<Generated> {
        self.check_param(param)?;
        (self.generator)(param.clamp(self.range.0, self.range.1))
    }

    pub fn born_box(&self, param: f64) -> Result<NsBox> {
        let (state, settings) = self.generate(param)?;
        born_box(&state, &settings)
    }

    /// Born-rule box computed with explicit Pauli matrices for each party.
    pub fn born_box_with(&self, param: f64, alice: &Paulis, bob: &Paulis) -> Result<NsBox> {
        let (state, settings) = self.generate(param)?;
        born_box_with(&state, &settings, alice, bob)
    }

    /// Closed-form values of the fields this family pins down.
    pub fn expected(&self, param: f64) -> Result<Vec<(Field, f64)>> {
        self.check_param(param)?;
        Ok((self.expected)(param.clamp(self.range.0, self.range.1)))
    }

    /// Closed-form `(G', Q')` weights of the canonical decomposition, when known.
    pub fn weights(&self, param: f64) -> Result<Option<(f64, f64)>> {
        self.check_param(param)?;
        Ok(self
            .weights
            .map(|w| w(param.clamp(self.range.0, self.range.1))))
    }

    pub fn has_weights(&self) -> bool {
        self.weights.is_some()
    }

    /// `n` evenly spaced parameters including both endpoints.
    pub fn grid(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 {
            return Err(Error::out_of_range("points", n as f64, 2.0, f64::INFINITY));
        }
        let (lo, hi) = self.range;
        Ok((0..n)
            .map(|k| {
                if k == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect())
    }
}

/// Computed report for one scenario point, with its expected fields.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioRun {
    pub scenario: &'static str,
    pub param: f64,
    pub report: MeasureReport,
    pub expected: Vec<ExpectedValue>,
    pub max_abs_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectedValue {
    pub field: String,
    pub expected: f64,
    pub computed: f64,
    pub deviation: f64,
}

pub fn run_scenario(spec: &ScenarioSpec, param: f64) -> Result<ScenarioRun> {
    run_scenario_with_tolerance(spec, param, DEFAULT_TOL)
}

pub fn run_scenario_with_tolerance(
    spec: &ScenarioSpec,
    param: f64,
    tol: f64,
) -> Result<ScenarioRun> {
    evaluate(spec, param, &spec.born_box(param)?, tol)
}

/// Compares an already computed box for `spec` at `param` with the closed forms.
pub fn evaluate(spec: &ScenarioSpec, param: f64, b: &NsBox, tol: f64) -> Result<ScenarioRun> {
    let report = MeasureReport::with_tolerance(b, tol);
    let expected: Vec<ExpectedValue> = spec
        .expected(param)?
        .into_iter()
        .map(|(f, v)| {
            let computed = f.value(&report);
            ExpectedValue {
                field: f.name(),
                expected: v,
                computed,
                deviation: (computed - v).abs(),
            }
        })
        .collect();
    let max_abs_deviation = expected.iter().map(|e| e.deviation).fold(0.0, f64::max);
    Ok(ScenarioRun {
        scenario: spec.name,
        param,
        report,
        expected,
        max_abs_deviation,
    })
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub report: MeasureReport,
    pub local_content: f64,
    /// Weight of the PR part of the canonical split.
    pub g_prime: f64,
    /// Weight of the Mermin part of the canonical split.
    pub q_prime: f64,
    /// `sqrt2 * g_prime`, the nonlocal fraction as quoted for the
    /// maximally entangled family.
    pub sqrt2_g_prime: f64,
    pub max_abs_deviation: f64,
}

/// Evaluates `spec` on an `n_points` grid; rows come back in ascending
/// parameter order.
pub fn sweep(spec: &ScenarioSpec, n_points: usize, tol: f64) -> Result<Vec<SweepRow>> {
    spec.grid(n_points)?
        .into_par_iter()
        .map(|param| {
            let b = spec.born_box(param)?;
            let run = evaluate(spec, param, &b, tol)?;
            let lc = local_content(&b)?;
            let split = canonical_split(&b);
            Ok(SweepRow {
                param,
                report: run.report,
                local_content: lc.objective,
                g_prime: split.pr_weight,
                q_prime: split.mermin_weight,
                sqrt2_g_prime: SQRT_2 * split.pr_weight,
                max_abs_deviation: run.max_abs_deviation,
            })
        })
        .collect()
}

pub const SWEEP_COLUMNS: [&str; 21] = [
    "param",
    "B00",
    "B01",
    "B10",
    "B11",
    "M00",
    "M01",
    "M10",
    "M11",
    "G",
    "Q",
    "T",
    "C_signed",
    "C",
    "chsh_violated",
    "steering_violated",
    "local_content",
    "G_prime",
    "Q_prime",
    "sqrt2_G_prime",
    "max_abs_deviation",
];

impl SweepRow {
    pub fn cells(&self) -> Vec<String> {
        let r = &self.report;
        let mut out = vec![fmt_sig(self.param)];
        out.extend(r.bell.iter().flatten().map(|v| fmt_sig(*v)));
        out.extend(r.mermin.iter().flatten().map(|v| fmt_sig(*v)));
        out.extend([r.g, r.q, r.t, r.c_signed, r.c].iter().map(|v| fmt_sig(*v)));
        out.push(r.chsh_violated.to_string());
        out.push(r.steering_violated.to_string());
        out.push(fmt_sig(self.local_content));
        out.extend(
            [self.g_prime, self.q_prime, self.sqrt2_g_prime]
                .iter()
                .map(|v| fmt_sig(*v)),
        );
        out.push(fmt_sig(self.max_abs_deviation));
        out
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for row in rows {
        w.write_record(row.cells())?;
    }
    w.flush()?;
    Ok(())
}

/// A closed form with two branches meeting at `boundary`; `left` applies for
/// parameters up to and including the boundary.
#[derive(Clone, Copy)]
pub struct Piecewise {
    pub scenario: &'static str,
    pub field: Field,
    pub boundary: f64,
    pub left: fn(f64) -> f64,
    pub right: fn(f64) -> f64,
}

impl Piecewise {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.boundary {
            (self.left)(x)
        } else {
            (self.right)(x)
        }
    }
}

fn cs(s: f64) -> f64 {
    (1.0 - s * s).max(0.0).sqrt()
}

const S_MID: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Every two-branch closed form used by the registry.
pub fn piecewise_forms() -> Vec<Piecewise> {
    vec![
        Piecewise {
            scenario: "schmidt-bell-mermin",
            field: Field::T,
            boundary: S_MID,
            left: |s| 2.0 * SQRT_2 * cs(s) * s,
            right: |s| 2.0 * SQRT_2 * s * s,
        },
        Piecewise {
            scenario: "schmidt-bell-mermin",
            field: Field::Q,
            boundary: S_MID,
            left: |s| 2.0 * SQRT_2 * s * s,
            right: |s| 2.0 * SQRT_2 * cs(s) * s,
        },
        Piecewise {
            scenario: "schmidt-bell-mermin-xz",
            field: Field::T,
            boundary: S_MID,
            left: |s| SQRT_2 * cs(s) * s * (1.0 + s),
            right: |s| SQRT_2 * s * s * (1.0 + s),
        },
        Piecewise {
            scenario: "schmidt-bell-mermin-xz",
            field: Field::C,
            boundary: S_MID,
            left: |s| SQRT_2 * cs(s) * s * (1.0 - s),
            right: |s| SQRT_2 * s * s * (1.0 - s),
        },
        Piecewise {
            scenario: "werner-bell-mermin",
            field: Field::Q,
            boundary: 0.5,
            left: |p| 2.0 * p * (2.0 * p).sqrt(),
            right: |p| 2.0 * p * (2.0 * (1.0 - p)).sqrt(),
        },
        Piecewise {
            scenario: "werner-bell-mermin",
            field: Field::T,
            boundary: 0.5,
            left: |p| 2.0 * p * (2.0 * (1.0 - p)).sqrt(),
            right: |p| 2.0 * p * (2.0 * p).sqrt(),
        },
        Piecewise {
            scenario: "colored-bell-mermin",
            field: Field::Q,
            boundary: 0.5,
            left: |p| 2.0 * p * (2.0 * p).sqrt(),
            right: |p| 2.0 * p * (2.0 * (1.0 - p)).sqrt(),
        },
        Piecewise {
            scenario: "colored-bell-mermin",
            field: Field::T,
            boundary: 0.5,
            left: |p| (1.0 + p) * (2.0 * (1.0 - p)).sqrt(),
            right: |p| (1.0 + p) * (2.0 * p).sqrt(),
        },
        Piecewise {
            scenario: "colored-bell-mermin",
            field: Field::C,
            boundary: 0.5,
            left: |p| (1.0 - p) * (2.0 * (1.0 - p)).sqrt(),
            right: |p| (1.0 - p) * (2.0 * p).sqrt(),
        },
    ]
}

fn pw(scenario: &str, field: Field, x: f64) -> f64 {
    piecewise_forms()
        .into_iter()
        .find(|f| f.scenario == scenario && f.field == field)
        .map(|f| f.eval(x))
        .expect("registered piecewise form")
}

fn x() -> Vector3<f64> {
    Vector3::x()
}
fn y() -> Vector3<f64> {
    Vector3::y()
}
fn z() -> Vector3<f64> {
    Vector3::z()
}

fn settings(a: [Vector3<f64>; 2], b: [Vector3<f64>; 2]) -> Result<MeasurementSettings> {
    MeasurementSettings::new(a[0], a[1], b[0], b[1])
}

/// `(cos t, sin t)` with `cos t = 1 / sqrt(1 + q^2)`.
fn tilt(q: f64) -> (f64, f64) {
    let n = (1.0 + q * q).sqrt();
    (1.0 / n, q / n)
}

fn bell_settings() -> Result<MeasurementSettings> {
    settings([x(), y()], [(x() - y()) / SQRT_2, (x() + y()) / SQRT_2])
}

fn mermin_settings() -> Result<MeasurementSettings> {
    settings([x(), -y()], [y(), x()])
}

fn tilted_bell_settings(q: f64) -> Result<MeasurementSettings> {
    let (ct, st) = tilt(q);
    settings([z(), x()], [ct * z() + st * x(), ct * z() - st * x()])
}

fn diag_xz() -> [Vector3<f64>; 2] {
    [(z() + x()) / SQRT_2, (z() - x()) / SQRT_2]
}

fn g_bell_mermin(s: f64, c: f64) -> f64 {
    2.0 * SQRT_2 * s * (s - c).abs()
}

fn zero_c() -> [(Field, f64); 2] {
    [(Field::CSigned, 0.0), (Field::C, 0.0)]
}

/// The sixteen registered families.
pub fn registry() -> Vec<ScenarioSpec> {
    vec![
        ScenarioSpec {
            name: "max-entangled",
            param_name: "p",
            range: (0.5, 1.0),
            notes: "psi+ with Bob's directions rotated in the x-y plane; PR part sqrt(1-p), Mermin part sqrt(p)-sqrt(1-p)",
            generator: |p| {
                let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
                Ok((
                    TwoQubitState::psi_plus(),
                    settings([x(), y()], [a * x() - b * y(), b * x() + a * y()])?,
                ))
            },
            expected: |p| {
                let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
                let mut v = vec![
                    (Field::B(0, 0), 2.0 * (a + b)),
                    (Field::M(1, 1), 2.0 * a),
                    (Field::G, 4.0 * b),
                    (Field::Q, 2.0 * (a - b)),
                    (Field::T, 2.0 * (a + b)),
                ];
                v.extend(zero_c());
                v
            },
            weights: Some(|p| ((1.0 - p).sqrt(), p.sqrt() - (1.0 - p).sqrt())),
        },
        ScenarioSpec {
            name: "schmidt-noisy-pr",
            param_name: "s",
            range: (0.0, 1.0),
            notes: "Schmidt state, Tsirelson settings in the x-y plane: noisy PR box",
            generator: |s| Ok((TwoQubitState::schmidt_s(s)?, bell_settings()?)),
            expected: |s| {
                let mut v = vec![
                    (Field::B(0, 0), 2.0 * SQRT_2 * s),
                    (Field::G, 2.0 * SQRT_2 * s),
                    (Field::Q, 0.0),
                    (Field::T, 2.0 * SQRT_2 * s),
                ];
                v.extend(zero_c());
                v
            },
            weights: Some(|s| (s / SQRT_2, 0.0)),
        },
        ScenarioSpec {
            name: "schmidt-pr-settings",
            param_name: "s",
            range: (0.0, 1.0),
            notes: "Schmidt state, Alice z/x, Bob tilted by cos t = 1/sqrt(1+s^2)",
            generator: |s| Ok((TwoQubitState::schmidt_s(s)?, tilted_bell_settings(s)?)),
            expected: |s| {
                let n = (1.0 + s * s).sqrt();
                let mut v = vec![
                    (Field::B(0, 0), 2.0 * n),
                    (Field::G, 4.0 * s * s / n),
                    (Field::Q, 0.0),
                    (Field::T, 4.0 * s * s / n),
                ];
                v.extend(zero_c());
                v
            },
            weights: Some(|s| (s * s / (1.0 + s * s).sqrt(), 0.0)),
        },
        ScenarioSpec {
            name: "schmidt-z-settings",
            param_name: "s",
            range: (0.0, 1.0),
            notes: "Schmidt state, Alice z/x, Bob (z+x)/sqrt2 and (z-x)/sqrt2",
            generator: |s| {
                Ok((
                    TwoQubitState::schmidt_s(s)?,
                    settings([z(), x()], diag_xz())?,
                ))
            },
            expected: |s| {
                vec![
                    (Field::B(0, 0), SQRT_2 * (1.0 + s)),
                    (Field::G, 2.0 * SQRT_2 * s),
                    (Field::Q, 0.0),
                    (Field::T, SQRT_2 * s * (1.0 + s)),
                    (Field::CSigned, -SQRT_2 * s * (1.0 - s)),
                    (Field::C, SQRT_2 * s * (1.0 - s)),
                ]
            },
            weights: Some(|s| (s / SQRT_2, 0.0)),
        },
        ScenarioSpec {
            name: "schmidt-mermin",
            param_name: "s",
            range: (0.0, 1.0),
            notes: "Schmidt state, Mermin settings x/-y against y/x: noisy Mermin box",
            generator: |s| Ok((TwoQubitState::schmidt_s(s)?, mermin_settings()?)),
            expected: |s| {
                let mut v = vec![
                    (Field::M(0, 0), 2.0 * s),
                    (Field::G, 0.0),
                    (Field::Q, 2.0 * s),
                    (Field::T, 2.0 * s),
                ];
                v.extend(zero_c());
                v
            },
            weights: Some(|s| (0.0, s)),
        },
        ScenarioSpec {
            name: "schmidt-mermin-tilted",
            param_name: "s",
            range: (0.0, 1.0),
            notes: "Schmidt state, Alice (z+-x)/sqrt2, Bob tilted by cos t = 1/sqrt(1+s^2)",
            generator: |s| {
                let (ct, st) = tilt(s);
                Ok((
                    TwoQubitState::schmidt_s(s)?,
                    settings(diag_xz(), [ct * z() - st * x(), ct * z() + st * x()])?,
                ))
            },
            expected: |s| {
                let n = (1.0 + s * s).sqrt();
                let mut v = vec![
                    (Field::M(0, 0), SQRT_2 * n),
                    (Field::G, 0.0),
                    (Field::Q, 2.0 * SQRT_2 * s * s / n),
                    (Field::T, 2.0 * SQRT_2 * s * s / n),
                ];
                v.extend(zero_c());
                v
            },
            weights: Some(|s| (0.0, SQRT_2 * s * s / (1.0 + s * s).sqrt())),
        },
        ScenarioSpec {
            name: "schmidt-mermin-corr",
            param_name: "s",
            range: (0.0, 1.0),
            notes: "Schmidt state, Alice (z+-x)/sqrt2, Bob (z-+x)/sqrt2",
            generator: |s| {
                let [a0, a1] = diag_xz();
                Ok((
                    TwoQubitState::schmidt_s(s)?,
                    settings([a0, a1], [a1, a0])?,
                ))
            },
            expected: |s| {
                vec![
                    (Field::M(0, 0), 1.0 + s),
                    (Field::G, 0.0),
                    (Field::Q, 2.0 * s),
                    (Field::T, s * (1.0 + s)),
                    (Field::CSigned, -s * (1.0 - s)),
                    (Field::C, s * (1.0 - s)),
                ]
            },
            weights: Some(|s| (0.0, s)),
        },
        ScenarioSpec {
            name: "schmidt-bell-mermin",
            param_name: "s",
            range: (0.0, 1.0),
            notes: "Schmidt state, Alice (s x + c y, c x - s y), Bob (x+-y)/sqrt2; branches meet at s = c",
            generator: |s| {
                let c = cs(s);
                Ok((
                    TwoQubitState::schmidt_s(s)?,
                    settings(
                        [s * x() + c * y(), c * x() - s * y()],
                        [(x() + y()) / SQRT_2, (x() - y()) / SQRT_2],
                    )?,
                ))
            },
            expected: |s| {
                let mut v = vec![
                    (Field::G, g_bell_mermin(s, cs(s))),
                    (Field::Q, pw("schmidt-bell-mermin", Field::Q, s)),
                    (Field::T, pw("schmidt-bell-mermin", Field::T, s)),
                ];
                v.extend(zero_c());
                v
            },
            weights: Some(|s| {
                let c = cs(s);
                (s * (s - c).abs() / SQRT_2, SQRT_2 * s * c.min(s))
            }),
        },
        ScenarioSpec {
            name: "schmidt-bell-mermin-xz",
            param_name: "s",
            range: (0.0, 1.0),
            notes: "Schmidt state, Alice (c x + s z, s x - c z), Bob (x+z)/sqrt2 and (z-x)/sqrt2; branches meet at s = c",
            generator: |s| {
                let c = cs(s);
                Ok((
                    TwoQubitState::schmidt_s(s)?,
                    settings(
                        [c * x() + s * z(), s * x() - c * z()],
                        [(x() + z()) / SQRT_2, (z() - x()) / SQRT_2],
                    )?,
                ))
            },
            expected: |s| {
                let c = cs(s);
                let cc = pw("schmidt-bell-mermin-xz", Field::C, s);
                vec![
                    (Field::G, g_bell_mermin(s, c)),
                    (Field::Q, 2.0 * SQRT_2 * s * c.min(s)),
                    (Field::T, pw("schmidt-bell-mermin-xz", Field::T, s)),
                    (Field::CSigned, -cc),
                    (Field::C, cc),
                ]
            },
            weights: None,
        },
        ScenarioSpec {
            name: "werner-bell",
            param_name: "p",
            range: (0.0, 1.0),
            notes: "Werner state, Tsirelson settings in the x-y plane",
            generator: |p| Ok((TwoQubitState::werner(p)?, bell_settings()?)),
            expected: |p| {
                let mut v = vec![
                    (Field::G, 2.0 * SQRT_2 * p),
                    (Field::Q, 0.0),
                    (Field::T, 2.0 * SQRT_2 * p),
                ];
                v.extend(zero_c());
                v
            },
            weights: None,
        },
        ScenarioSpec {
            name: "werner-mermin",
            param_name: "p",
            range: (0.0, 1.0),
            notes: "Werner state, Mermin settings x/-y against y/x",
            generator: |p| Ok((TwoQubitState::werner(p)?, mermin_settings()?)),
            expected: |p| {
                let mut v = vec![
                    (Field::G, 0.0),
                    (Field::Q, 2.0 * p),
                    (Field::T, 2.0 * p),
                ];
                v.extend(zero_c());
                v
            },
            weights: None,
        },
        ScenarioSpec {
            name: "werner-bell-mermin",
            param_name: "p",
            range: (0.0, 1.0),
            notes: "Werner state, Alice (sqrt(p) x + sqrt(1-p) y, sqrt(1-p) x - sqrt(p) y), Bob (x+-y)/sqrt2; branches meet at p = 1/2",
            generator: |p| {
                let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
                Ok((
                    TwoQubitState::werner(p)?,
                    settings(
                        [a * x() + b * y(), b * x() - a * y()],
                        [(x() + y()) / SQRT_2, (x() - y()) / SQRT_2],
                    )?,
                ))
            },
            expected: |p| {
                let mut v = vec![
                    (Field::G, 2.0 * SQRT_2 * p * (p.sqrt() - (1.0 - p).sqrt()).abs()),
                    (Field::Q, pw("werner-bell-mermin", Field::Q, p)),
                    (Field::T, pw("werner-bell-mermin", Field::T, p)),
                ];
                v.extend(zero_c());
                v
            },
            weights: Some(|p| {
                let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
                (p * (a - b).abs() / SQRT_2, SQRT_2 * p * a.min(b))
            }),
        },
        ScenarioSpec {
            name: "colored-bell-iso",
            param_name: "p",
            range: (0.0, 1.0),
            notes: "psi+ mixed with classically correlated noise, Tsirelson settings in the x-y plane",
            generator: |p| Ok((TwoQubitState::colored(p)?, bell_settings()?)),
            expected: |p| {
                let mut v = vec![
                    (Field::G, 2.0 * SQRT_2 * p),
                    (Field::Q, 0.0),
                    (Field::T, 2.0 * SQRT_2 * p),
                ];
                v.extend(zero_c());
                v
            },
            weights: None,
        },
        ScenarioSpec {
            name: "colored-bell-tilted",
            param_name: "p",
            range: (0.0, 1.0),
            notes: "colored noise state, Alice z/x, Bob tilted by cos t = 1/sqrt(1+p^2)",
            generator: |p| Ok((TwoQubitState::colored(p)?, tilted_bell_settings(p)?)),
            expected: |p| {
                let n = (1.0 + p * p).sqrt();
                let cc = 2.0 * (1.0 - p * p) / n;
                vec![
                    (Field::B(0, 0), 2.0 * n),
                    (Field::G, 4.0 * p * p / n),
                    (Field::Q, 0.0),
                    (Field::T, 2.0 * n),
                    (Field::CSigned, cc),
                    (Field::C, cc),
                ]
            },
            weights: None,
        },
        ScenarioSpec {
            name: "colored-mermin",
            param_name: "p",
            range: (0.0, 1.0),
            notes: "colored noise state, Alice (z+-x)/sqrt2, Bob tilted by cos t = 1/sqrt(1+p^2); the Mermin strength appears at label 01",
            generator: |p| {
                let (ct, st) = tilt(p);
                Ok((
                    TwoQubitState::colored(p)?,
                    settings(diag_xz(), [ct * z() + st * x(), ct * z() - st * x()])?,
                ))
            },
            expected: |p| {
                let n = (1.0 + p * p).sqrt();
                let cc = SQRT_2 * (1.0 - p * p) / n;
                vec![
                    (Field::M(0, 1), SQRT_2 * n),
                    (Field::G, 0.0),
                    (Field::Q, 2.0 * SQRT_2 * p * p / n),
                    (Field::T, SQRT_2 * n),
                    (Field::CSigned, cc),
                    (Field::C, cc),
                ]
            },
            weights: None,
        },
        ScenarioSpec {
            name: "colored-bell-mermin",
            param_name: "p",
            range: (0.0, 1.0),
            notes: "colored noise state, Alice (sqrt(p) z + sqrt(1-p) x, sqrt(1-p) z - sqrt(p) x), Bob (z+-x)/sqrt2; branches meet at p = 1/2",
            generator: |p| {
                let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
                Ok((
                    TwoQubitState::colored(p)?,
                    settings([a * z() + b * x(), b * z() - a * x()], diag_xz())?,
                ))
            },
            expected: |p| {
                let cc = pw("colored-bell-mermin", Field::C, p);
                vec![
                    (Field::G, 2.0 * SQRT_2 * p * (p.sqrt() - (1.0 - p).sqrt()).abs()),
                    (Field::Q, pw("colored-bell-mermin", Field::Q, p)),
                    (Field::T, pw("colored-bell-mermin", Field::T, p)),
                    (Field::CSigned, cc),
                    (Field::C, cc),
                ]
            },
            weights: None,
        },
    ]
}

pub fn names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name).collect()
}

pub fn find(name: &str) -> Result<ScenarioSpec> {
    registry()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario {
            name: name.to_string(),
            valid: names().join(", "),
        })
}
