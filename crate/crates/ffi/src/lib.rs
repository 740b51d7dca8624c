//! C interface to `nsbox`.
//!
//! Boxes and states live behind opaque handles that the caller frees with
//! [`ns_box_free`] and [`ns_state_free`]. Every fallible call returns an
//! [`NsStatus`]; on failure [`ns_last_error`] describes what went wrong on the
//! calling thread. Probability tables are 16 doubles in `p[i][j][m][n]` order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use nsbox::decompose::{self, Decomposition, LpResult, Tag};
use nsbox::error::{exit, Error};
use nsbox::input::parse_box;
use nsbox::measures::MeasureReport;
use nsbox::ns::{probs_from_flat, NsBox, Vertex};
use nsbox::quantum::{born_box, Mat4, MeasurementSettings, TwoQubitState, C64};
use nsbox::scenarios;

/// Result codes; the values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsStatus {
    NsOk = 0,
    NsFailed = 1,
    NsParse = 2,
    NsInvariant = 3,
    NsUnknownName = 4,
    NsSolver = 5,
    NsNullPointer = 6,
    NsPanic = 7,
}

impl From<&Error> for NsStatus {
    fn from(e: &Error) -> Self {
        match e.exit_code() {
            exit::PARSE => NsStatus::NsParse,
            exit::INVARIANT => NsStatus::NsInvariant,
            exit::UNKNOWN_NAME => NsStatus::NsUnknownName,
            exit::SOLVER => NsStatus::NsSolver,
            _ => NsStatus::NsFailed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsVertexKind {
    NsVertexPr = 0,
    NsVertexDeterministic = 1,
    NsVertexMermin = 2,
    NsVertexWhiteNoise = 3,
}

/// Opaque box handle.
pub struct NsBoxHandle(NsBox);

/// Opaque two-qubit state handle.
pub struct NsStateHandle(TwoQubitState);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NsMeasures {
    pub bell: [[f64; 2]; 2],
    pub mermin: [[f64; 2]; 2],
    pub bell_prod: [[f64; 2]; 2],
    pub g: f64,
    pub q: f64,
    pub t: f64,
    pub c_signed: f64,
    pub c: f64,
    pub monogamy_lhs: f64,
    pub chsh_violated: bool,
    pub steering_violated: bool,
}

impl From<&MeasureReport> for NsMeasures {
    fn from(r: &MeasureReport) -> Self {
        NsMeasures {
            bell: r.bell,
            mermin: r.mermin,
            bell_prod: r.bell_prod,
            g: r.g,
            q: r.q,
            t: r.t,
            c_signed: r.c_signed,
            c: r.c,
            monogamy_lhs: r.monogamy_lhs,
            chsh_violated: r.chsh_violated,
            steering_violated: r.steering_violated,
        }
    }
}

/// Linear-program result. `weights[8a + 4b + 2g + e]` is the weight of the
/// deterministic box with labels `(a, b, g, e)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NsLpResult {
    pub feasible: bool,
    pub objective: f64,
    pub weights: [f64; 16],
    pub iterations: u32,
}

impl From<&LpResult> for NsLpResult {
    fn from(r: &LpResult) -> Self {
        NsLpResult {
            feasible: r.feasible,
            objective: r.objective,
            weights: r.weights,
            iterations: r.iterations.min(u32::MAX as usize) as u32,
        }
    }
}

/// Canonical decomposition. Components with zero weight are all zero.
/// `mermin_gamma` is -1 when there is no Mermin part.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NsDecomposition {
    pub pr_weight: f64,
    pub mermin_weight: f64,
    pub residual_weight: f64,
    pub pr: [f64; 16],
    pub mermin: [f64; 16],
    pub residual: [f64; 16],
    pub orientation: u8,
    pub mermin_gamma: i8,
    pub degenerate: bool,
}

impl From<&Decomposition> for NsDecomposition {
    fn from(d: &Decomposition) -> Self {
        let comp = |tag| {
            d.component(tag)
                .map(|b: &NsBox| b.flat())
                .unwrap_or([0.0; 16])
        };
        let residual_tag = if d.component(Tag::LocalResidual).is_some() {
            Tag::LocalResidual
        } else {
            Tag::NoisePart
        };
        NsDecomposition {
            pr_weight: d.weight(Tag::PRPart),
            mermin_weight: d.weight(Tag::MerminPart),
            residual_weight: d.weight(residual_tag),
            pr: comp(Tag::PRPart),
            mermin: comp(Tag::MerminPart),
            residual: comp(residual_tag),
            orientation: d.orientation.code(),
            mermin_gamma: d.mermin_gamma.map_or(-1, |g| g as i8),
            degenerate: d.degenerate,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

/// Runs `f`, records its error message and converts panics to `NsPanic`.
fn guard(f: impl FnOnce() -> Result<(), NsStatus>) -> NsStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NsStatus::NsOk,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            NsStatus::NsPanic
        }
    }
}

fn fail(e: Error) -> NsStatus {
    set_error(e.to_string());
    NsStatus::from(&e)
}

fn null(what: &str) -> NsStatus {
    set_error(format!("null pointer: {what}"));
    NsStatus::NsNullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, NsStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), NsStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn read16(p: *const f64, what: &str) -> Result<[f64; 16], NsStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    let mut a = [0.0; 16];
    ptr::copy_nonoverlapping(p, a.as_mut_ptr(), 16);
    Ok(a)
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, NsStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        NsStatus::NsParse
    })
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ns_version() -> *const c_char {
    static V: OnceLock<CString> = OnceLock::new();
    V.get_or_init(|| CString::new(env!("CARGO_PKG_VERSION")).unwrap())
        .as_ptr()
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ns_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Validates 16 probabilities within `tol` and stores a new handle in `out`.
///
/// # Safety
/// `probs` must point to 16 readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_box_from_probs(
    probs: *const f64,
    tol: f64,
    out: *mut *mut NsBoxHandle,
) -> NsStatus {
    guard(|| {
        let flat = read16(probs, "probs")?;
        let b = NsBox::with_tolerance(probs_from_flat(&flat), tol).map_err(fail)?;
        write_out(out, boxed(NsBoxHandle(b)))
    })
}

/// Parses box JSON (`{"probs": ...}` or `{"state": ..., "settings": ...}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_box_from_json(
    json: *const c_char,
    tol: f64,
    out: *mut *mut NsBoxHandle,
) -> NsStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let b = parse_box(text, tol).map_err(fail)?;
        write_out(out, boxed(NsBoxHandle(b)))
    })
}

/// Extremal box or white noise. Unused label bits are ignored.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_box_vertex(
    kind: NsVertexKind,
    alpha: u8,
    beta: u8,
    gamma: u8,
    epsilon: u8,
    out: *mut *mut NsBoxHandle,
) -> NsStatus {
    guard(|| {
        if [alpha, beta, gamma, epsilon].iter().any(|b| *b > 1) {
            set_error("label bits must be 0 or 1");
            return Err(NsStatus::NsParse);
        }
        let v = match kind {
            NsVertexKind::NsVertexPr => Vertex::Pr { alpha, beta, gamma },
            NsVertexKind::NsVertexDeterministic => Vertex::Deterministic {
                alpha,
                beta,
                gamma,
                epsilon,
            },
            NsVertexKind::NsVertexMermin => Vertex::Mermin { alpha, beta, gamma },
            NsVertexKind::NsVertexWhiteNoise => Vertex::WhiteNoise,
        };
        write_out(out, boxed(NsBoxHandle(NsBox::vertex(&v))))
    })
}

/// Convex mixture of `n` boxes.
///
/// # Safety
/// `boxes` and `weights` must each point to `n` readable elements, every
/// element of `boxes` must be a live handle, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_box_mix(
    boxes: *const *const NsBoxHandle,
    weights: *const f64,
    n: usize,
    out: *mut *mut NsBoxHandle,
) -> NsStatus {
    guard(|| {
        if n == 0 {
            return Err(fail(Error::BadWeights("no boxes to mix".into())));
        }
        if boxes.is_null() {
            return Err(null("boxes"));
        }
        if weights.is_null() {
            return Err(null("weights"));
        }
        let handles = std::slice::from_raw_parts(boxes, n);
        let w = std::slice::from_raw_parts(weights, n);
        let mut list = Vec::with_capacity(n);
        for h in handles {
            list.push(deref(*h, "boxes[k]")?.0);
        }
        let b = NsBox::mix(&list, w).map_err(fail)?;
        write_out(out, boxed(NsBoxHandle(b)))
    })
}

/// Copies the 16 probabilities into `out`.
///
/// # Safety
/// `b` must be a live handle and `out` must point to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ns_box_probs(b: *const NsBoxHandle, out: *mut f64) -> NsStatus {
    guard(|| {
        let b = deref(b, "box")?;
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(b.0.flat().as_ptr(), out, 16);
        Ok(())
    })
}

/// Frees a box handle. Null is ignored.
///
/// # Safety
/// `b` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_box_free(b: *mut NsBoxHandle) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Bell and Mermin strengths, discords and inequality flags.
///
/// # Safety
/// `b` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_measure(
    b: *const NsBoxHandle,
    tol: f64,
    out: *mut NsMeasures,
) -> NsStatus {
    guard(|| {
        let b = deref(b, "box")?;
        write_out(
            out,
            NsMeasures::from(&MeasureReport::with_tolerance(&b.0, tol)),
        )
    })
}

/// Largest weight of a local component.
///
/// # Safety
/// `b` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_local_content(b: *const NsBoxHandle, out: *mut NsLpResult) -> NsStatus {
    guard(|| {
        let b = deref(b, "box")?;
        let r = decompose::local_content(&b.0).map_err(fail)?;
        write_out(out, NsLpResult::from(&r))
    })
}

/// Membership in the local polytope.
///
/// # Safety
/// `b` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_local_membership(
    b: *const NsBoxHandle,
    out: *mut NsLpResult,
) -> NsStatus {
    guard(|| {
        let b = deref(b, "box")?;
        let r = decompose::local_membership(&b.0).map_err(fail)?;
        write_out(out, NsLpResult::from(&r))
    })
}

/// PR part, Mermin part and local remainder.
///
/// # Safety
/// `b` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_full_canonical(
    b: *const NsBoxHandle,
    out: *mut NsDecomposition,
) -> NsStatus {
    guard(|| {
        let b = deref(b, "box")?;
        let d = decompose::full_canonical(&b.0).map_err(fail)?;
        write_out(out, NsDecomposition::from(&d))
    })
}

/// PR part and local remainder.
///
/// # Safety
/// `b` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_bell_canonical(
    b: *const NsBoxHandle,
    out: *mut NsDecomposition,
) -> NsStatus {
    guard(|| {
        let b = deref(b, "box")?;
        let d = decompose::bell_canonical(&b.0).map_err(fail)?;
        write_out(out, NsDecomposition::from(&d))
    })
}

/// Density matrix from row-major real and imaginary parts (16 doubles each).
///
/// # Safety
/// `re` and `im` must point to 16 readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_state_from_density(
    re: *const f64,
    im: *const f64,
    out: *mut *mut NsStateHandle,
) -> NsStatus {
    guard(|| {
        let (re, im) = (read16(re, "re")?, read16(im, "im")?);
        let rho = Mat4::from_fn(|r, c| C64::new(re[4 * r + c], im[4 * r + c]));
        let s = TwoQubitState::from_density_matrix(rho).map_err(fail)?;
        write_out(out, boxed(NsStateHandle(s)))
    })
}

/// `(|01> + |10>) / sqrt2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_state_psi_plus(out: *mut *mut NsStateHandle) -> NsStatus {
    guard(|| write_out(out, boxed(NsStateHandle(TwoQubitState::psi_plus()))))
}

/// Schmidt state with `s = sin 2 theta` in `[0, 1]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_state_schmidt(s: f64, out: *mut *mut NsStateHandle) -> NsStatus {
    guard(|| {
        let st = TwoQubitState::schmidt_s(s).map_err(fail)?;
        write_out(out, boxed(NsStateHandle(st)))
    })
}

/// Werner state with visibility `p` in `[0, 1]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_state_werner(p: f64, out: *mut *mut NsStateHandle) -> NsStatus {
    guard(|| {
        let st = TwoQubitState::werner(p).map_err(fail)?;
        write_out(out, boxed(NsStateHandle(st)))
    })
}

/// Colored-noise state with weight `p` in `[0, 1]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_state_colored(p: f64, out: *mut *mut NsStateHandle) -> NsStatus {
    guard(|| {
        let st = TwoQubitState::colored(p).map_err(fail)?;
        write_out(out, boxed(NsStateHandle(st)))
    })
}

/// Frees a state handle. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_state_free(s: *mut NsStateHandle) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Born-rule box. `directions` holds 12 doubles: the unit vectors `a0, a1,
/// b0, b1` as `(x, y, z)` triples.
///
/// # Safety
/// `state` must be a live handle, `directions` must point to 12 readable
/// doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_born_box(
    state: *const NsStateHandle,
    directions: *const f64,
    out: *mut *mut NsBoxHandle,
) -> NsStatus {
    guard(|| {
        let st = deref(state, "state")?;
        if directions.is_null() {
            return Err(null("directions"));
        }
        let d = std::slice::from_raw_parts(directions, 12);
        let v = |k: usize| [d[3 * k], d[3 * k + 1], d[3 * k + 2]];
        let set = MeasurementSettings::from_arrays([v(0), v(1), v(2), v(3)]).map_err(fail)?;
        let b = born_box(&st.0, &set).map_err(fail)?;
        write_out(out, boxed(NsBoxHandle(b)))
    })
}

fn scenario_names() -> &'static [CString] {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    NAMES.get_or_init(|| {
        scenarios::names()
            .into_iter()
            .map(|n| CString::new(n).unwrap())
            .collect()
    })
}

/// Number of registered scenarios.
#[no_mangle]
pub extern "C" fn ns_scenario_count() -> usize {
    scenario_names().len()
}

/// Name of scenario `index` as a static string, or null when out of range.
#[no_mangle]
pub extern "C" fn ns_scenario_name(index: usize) -> *const c_char {
    scenario_names()
        .get(index)
        .map_or(ptr::null(), |n| n.as_ptr())
}

/// Box of scenario `name` at parameter `param`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ns_scenario_box(
    name: *const c_char,
    param: f64,
    out: *mut *mut NsBoxHandle,
) -> NsStatus {
    guard(|| {
        let spec = scenarios::find(read_str(name, "name")?).map_err(fail)?;
        let b = spec.born_box(param).map_err(fail)?;
        write_out(out, boxed(NsBoxHandle(b)))
    })
}
