//! JSON input accepted by the command-line tool and the C interface: either a
//! box `{"probs": ..., "tol": ...}` or a quantum source `{"state": ..., "settings": ...}`.

use nalgebra::Vector3;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ns::{NsBox, Probs};
use crate::quantum::{born_box, Mat4, MeasurementSettings, TwoQubitState, C64};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    probs: Probs,
    #[serde(default)]
    tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    rho: [[[f64; 2]; 4]; 4],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSettings {
    a0: [f64; 3],
    a1: [f64; 3],
    b0: [f64; 3],
    b1: [f64; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    state: RawState,
    settings: RawSettings,
}

fn schema<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

impl RawState {
    fn validate(self) -> Result<TwoQubitState> {
        let rho = Mat4::from_fn(|r, k| C64::new(self.rho[r][k][0], self.rho[r][k][1]));
        TwoQubitState::from_density_matrix(rho)
    }
}

impl RawSettings {
    fn validate(self) -> Result<MeasurementSettings> {
        let d = |x: [f64; 3]| Vector3::new(x[0], x[1], x[2]);
        MeasurementSettings::new(d(self.a0), d(self.a1), d(self.b0), d(self.b1))
    }
}

/// Parses and validates a `{"rho": ...}` document.
pub fn parse_state(text: &str) -> Result<TwoQubitState> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    schema::<RawState>(v, "state")?.validate()
}

/// Parses and validates a `{"a0": .., "a1": .., "b0": .., "b1": ..}` document.
pub fn parse_settings(text: &str) -> Result<MeasurementSettings> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    schema::<RawSettings>(v, "settings")?.validate()
}

/// Parses a box or state+settings document. Schema problems give
/// [`Error::Parse`]; physically invalid content gives the validation error.
/// `tol` applies to boxes that carry no tolerance of their own.
pub fn parse_box(text: &str, tol: f64) -> Result<NsBox> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let Value::Object(map) = &v else {
        return Err(Error::Parse("expected a JSON object".into()));
    };
    if map.contains_key("probs") {
        let raw: RawBox = schema(v, "box")?;
        let tol = raw.tol.unwrap_or(tol);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Parse(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        NsBox::with_tolerance(raw.probs, tol)
    } else if map.contains_key("state") || map.contains_key("settings") {
        let raw: RawSource = schema(v, "state/settings")?;
        let state = raw.state.validate()?;
        let settings = raw.settings.validate()?;
        born_box(&state, &settings)
    } else {
        Err(Error::Parse(
            "expected an object with `probs` or with `state` and `settings`".into(),
        ))
    }
}
