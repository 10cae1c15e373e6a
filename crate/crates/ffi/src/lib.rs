//! C ABI over `vhodge`.
//!
//! Objects are opaque heap handles created by `vh_*_new`/`vh_*_from_*` and
//! released with the matching `vh_*_free`. Every fallible function returns a
//! [`VhStatus`]; on failure the message is available from
//! [`vh_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vhodge::assembly::{BoundaryCondition, Discretization};
use vhodge::extalg::verify_identities;
use vhodge::hodge::harmonic_basis;
use vhodge::mesh::{
    generate, parse_off, realize_field, DiscreteField, FieldSpec, SimplicialComplex,
};
use vhodge::spectra::eigen;
use vhodge::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NumericalFailure = 4,
    /// The computation ran but a mathematical check did not pass.
    CheckFailed = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VhBoundary {
    Closed = 0,
    Normal = 1,
    Tangential = 2,
}

impl From<VhBoundary> for BoundaryCondition {
    fn from(b: VhBoundary) -> Self {
        match b {
            VhBoundary::Closed => BoundaryCondition::Closed,
            VhBoundary::Normal => BoundaryCondition::Normal,
            VhBoundary::Tangential => BoundaryCondition::Tangential,
        }
    }
}

/// Opaque triangle mesh.
pub struct VhMesh {
    complex: SimplicialComplex,
}

/// Opaque per-triangle vector field bound to the mesh it was realized on.
pub struct VhField {
    field: DiscreteField,
}

/// Opaque eigenvalue list.
pub struct VhSpectrum {
    eigenvalues: Vec<f64>,
    max_residual: f64,
    zero_multiplicity: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> VhStatus {
    match e {
        Error::Parse { .. } | Error::UnsupportedFaceArity { .. } | Error::Json(_) => {
            VhStatus::ParseError
        }
        e if e.is_input_error() => VhStatus::InvalidArgument,
        _ => VhStatus::NumericalFailure,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<VhStatus, (VhStatus, String)>) -> VhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            VhStatus::Panic
        }
    }
}

fn lib<T>(r: vhodge::Result<T>) -> Result<T, (VhStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (VhStatus, String) {
    (VhStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (VhStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        (
            VhStatus::InvalidArgument,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (VhStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<VhStatus, (VhStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(VhStatus::Ok)
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Built-in mesh by name, e.g. `"torus"`, `"annulus:3x24"`, `"sphere:2"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vh_mesh_builtin(name: *const c_char, out: *mut *mut VhMesh) -> VhStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let complex = lib(generate::builtin(name))?;
        put(out, VhMesh { complex })
    })
}

/// Mesh parsed from OFF text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vh_mesh_from_off(text: *const c_char, out: *mut *mut VhMesh) -> VhStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let complex = lib(parse_off(text))?;
        put(out, VhMesh { complex })
    })
}

/// Vertex, edge and triangle counts.
///
/// # Safety
/// `mesh` must come from a `vh_mesh_*` constructor; `counts` must point to
/// three writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn vh_mesh_counts(mesh: *const VhMesh, counts: *mut usize) -> VhStatus {
    guard(|| {
        let m = handle(mesh, "mesh")?;
        if counts.is_null() {
            return Err(null("counts"));
        }
        let c = &m.complex;
        for (i, n) in [c.num_vertices(), c.num_edges(), c.num_triangles()]
            .into_iter()
            .enumerate()
        {
            *counts.add(i) = n;
        }
        Ok(VhStatus::Ok)
    })
}

/// # Safety
/// `mesh` must be null or come from a `vh_mesh_*` constructor, and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vh_mesh_free(mesh: *mut VhMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Field on `mesh` from a JSON description (`{"kind": "random", "seed": 1}`,
/// `{"kind": "constant", "vector": [1, 0, 0]}`, ...).
///
/// # Safety
/// `mesh` must be a live handle, `json` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn vh_field_from_json(
    mesh: *const VhMesh,
    json: *const c_char,
    out: *mut *mut VhField,
) -> VhStatus {
    guard(|| {
        let m = handle(mesh, "mesh")?;
        let json = str_arg(json, "json")?;
        let spec: FieldSpec = lib(serde_json::from_str(json).map_err(Error::from))?;
        let field = lib(realize_field(&m.complex, &spec))?;
        put(out, VhField { field })
    })
}

/// # Safety
/// `field` must be null or a live handle, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vh_field_free(field: *mut VhField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Runs the pointwise identity suite; writes the largest relative residual.
/// Returns `CheckFailed` if it exceeds `1e-10`.
///
/// # Safety
/// `max_rel` must be null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vh_verify_algebra(
    dim: usize,
    trials: usize,
    seed: u64,
    max_rel: *mut f64,
) -> VhStatus {
    guard(|| {
        let report = lib(verify_identities(dim, trials, seed))?;
        let r = report.max_rel();
        if !max_rel.is_null() {
            *max_rel = r;
        }
        let failed = report.failures(1e-10);
        if failed.is_empty() {
            Ok(VhStatus::Ok)
        } else {
            let names: Vec<&str> = failed.iter().map(|(n, _)| *n).collect();
            Err((
                VhStatus::CheckFailed,
                format!("identity failure: {} (seed {seed})", names.join(", ")),
            ))
        }
    })
}

fn field_for<'a>(
    m: &VhMesh,
    f: Option<&'a VhField>,
) -> Result<std::borrow::Cow<'a, DiscreteField>, (VhStatus, String)> {
    match f {
        Some(f) if f.field.len() != m.complex.num_triangles() => Err((
            VhStatus::InvalidArgument,
            "field was realized on a different mesh".into(),
        )),
        Some(f) => Ok(std::borrow::Cow::Borrowed(&f.field)),
        None => Ok(std::borrow::Cow::Owned(DiscreteField::zero(&m.complex))),
    }
}

/// Harmonic dimensions for degrees 0, 1, 2 under `bc`. A null `field` means
/// `v = 0`. On a mesh without boundary every condition reduces to closed.
///
/// # Safety
/// Handles must be live; `dims` must point to three writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn vh_betti(
    mesh: *const VhMesh,
    field: *const VhField,
    bc: VhBoundary,
    dims: *mut usize,
) -> VhStatus {
    guard(|| {
        let m = handle(mesh, "mesh")?;
        if dims.is_null() {
            return Err(null("dims"));
        }
        let f = field_for(m, field.as_ref())?;
        let disc = lib(Discretization::new(&m.complex, &f))?;
        let bc = BoundaryCondition::from(bc).resolve(m.complex.has_boundary());
        for k in 0..3 {
            let b = lib(disc.operators(k, bc).and_then(|ops| harmonic_basis(&ops)))?;
            *dims.add(k) = b.dimension;
        }
        Ok(VhStatus::Ok)
    })
}

/// Lowest `count` eigenvalues of the degree-`k` v-Hodge Laplacian.
///
/// # Safety
/// Handles must be live (`field` may be null); `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vh_spectrum(
    mesh: *const VhMesh,
    field: *const VhField,
    k: usize,
    bc: VhBoundary,
    count: usize,
    out: *mut *mut VhSpectrum,
) -> VhStatus {
    guard(|| {
        let m = handle(mesh, "mesh")?;
        if k > 2 {
            return Err((VhStatus::InvalidArgument, format!("degree {k} exceeds 2")));
        }
        let f = field_for(m, field.as_ref())?;
        let disc = lib(Discretization::new(&m.complex, &f))?;
        let bc = BoundaryCondition::from(bc).resolve(m.complex.has_boundary());
        let s = lib(disc.operators(k, bc).and_then(|ops| eigen(&ops, count)))?;
        put(
            out,
            VhSpectrum {
                eigenvalues: s.eigenvalues,
                max_residual: s.max_residual,
                zero_multiplicity: s.zero_multiplicity,
            },
        )
    })
}

/// Number of eigenvalues held by `spectrum` (0 for null).
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vh_spectrum_len(spectrum: *const VhSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| s.eigenvalues.len())
}

/// Pointer to the ascending eigenvalues, valid while `spectrum` lives.
///
/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vh_spectrum_values(spectrum: *const VhSpectrum) -> *const f64 {
    spectrum
        .as_ref()
        .map_or(ptr::null(), |s| s.eigenvalues.as_ptr())
}

/// Largest relative eigenpair residual and the number of zero eigenvalues.
///
/// # Safety
/// `spectrum` must be a live handle; outputs may be null.
#[no_mangle]
pub unsafe extern "C" fn vh_spectrum_stats(
    spectrum: *const VhSpectrum,
    max_residual: *mut f64,
    zero_multiplicity: *mut usize,
) -> VhStatus {
    guard(|| {
        let s = handle(spectrum, "spectrum")?;
        if !max_residual.is_null() {
            *max_residual = s.max_residual;
        }
        if !zero_multiplicity.is_null() {
            *zero_multiplicity = s.zero_multiplicity;
        }
        Ok(VhStatus::Ok)
    })
}

/// # Safety
/// `spectrum` must be null or a live handle, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vh_spectrum_free(spectrum: *mut VhSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}
