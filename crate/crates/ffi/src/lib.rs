//! C ABI over `modvar`.
//!
//! A model is created with [`modvar_model_new`], queried through the
//! evaluation functions and released with [`modvar_model_free`]. Every
//! fallible call returns a [`ModvarStatus`] and writes its result through an
//! out-pointer; on failure the message is kept per thread and can be read
//! with [`modvar_last_error_message`]. Panics never cross the boundary.

use modvar::cl::{cl_bohmian_position, cl_density, cl_local_modular, cl_modular_closed, cl_modular_quadrature};
use modvar::model::{make_superposition, BathParams, PhysicalConstants, SuperpositionSpec};
use modvar::schrodinger::{bohmian_position, local_modular_pointwise, modular_signal, superposed_amplitude};
use modvar::two_particle::common_bath_parts;
use modvar::window::{overlap_window, WindowModel};
use modvar::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModvarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    Numerical = 4,
    Config = 5,
    Internal = 6,
    Panic = 7,
    BufferTooSmall = 8,
}

/// Which dynamics an evaluation uses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModvarFramework {
    Schrodinger = 0,
    CaldeiraLeggett = 1,
    /// One particle of a pair sharing a bath; only valid for windows and
    /// the reduced modular value.
    CommonBath = 2,
}

/// Opaque model: constants, the two-packet state and the bath.
pub struct ModvarModel {
    constants: PhysicalConstants,
    spec: SuperpositionSpec,
    bath: BathParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ModvarStatus {
    match e {
        Error::Parameter { .. } => ModvarStatus::InvalidParameter,
        Error::Domain(_) => ModvarStatus::Domain,
        Error::Numerical { .. } => ModvarStatus::Numerical,
        Error::Config(_) => ModvarStatus::Config,
        Error::Internal(_) => ModvarStatus::Internal,
    }
}

/// Run `body`, translating errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), (ModvarStatus, String)>>(body: F) -> ModvarStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ModvarStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {what}"));
            ModvarStatus::Panic
        }
    }
}

fn lift<T>(r: modvar::Result<T>) -> Result<T, (ModvarStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (ModvarStatus, String) {
    (ModvarStatus::NullPointer, format!("`{name}` is null"))
}

/// # Safety
/// `model` must be null or a live pointer from [`modvar_model_new`].
unsafe fn model_ref<'a>(model: *const ModvarModel) -> Result<&'a ModvarModel, (ModvarStatus, String)> {
    model.as_ref().ok_or_else(|| null("model"))
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (ModvarStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

/// Build a model. Pass `gamma = temperature = 0` for unitary dynamics.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn modvar_model_new(
    mass: f64,
    hbar: f64,
    boltzmann: f64,
    gravity: f64,
    separation: f64,
    sigma0: f64,
    kick: f64,
    alpha: f64,
    gamma: f64,
    temperature: f64,
    out: *mut *mut ModvarModel,
) -> ModvarStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let constants = lift(PhysicalConstants::new(mass, hbar, boltzmann, gravity))?;
        let spec = lift(make_superposition(separation, sigma0, kick, alpha, &constants))?;
        let bath = lift(BathParams::new(&constants, gamma, temperature))?;
        let model = Box::new(ModvarModel { constants, spec, bath });
        write(out, Box::into_raw(model))
    })
}

/// Reference parameters (`m = ħ = k_B = 1`, `g = -3`, `L = 50`, `σ0 = 1`,
/// `k = 0.1`) with the given phase and bath.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn modvar_model_new_reference(
    alpha: f64,
    gamma: f64,
    temperature: f64,
    out: *mut *mut ModvarModel,
) -> ModvarStatus {
    modvar_model_new(1.0, 1.0, 1.0, -3.0, 50.0, 1.0, 0.1, alpha, gamma, temperature, out)
}

/// Release a model. Null is ignored.
///
/// # Safety
/// `model` must be null or come from a constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn modvar_model_free(model: *mut ModvarModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Global modular value `⟨cos(p̂L/ħ)⟩` at time `t`.
///
/// # Safety
/// `model` must be a live model and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn modvar_modular_value(
    model: *const ModvarModel,
    framework: ModvarFramework,
    t: f64,
    out: *mut f64,
) -> ModvarStatus {
    guard(|| {
        let m = model_ref(model)?;
        let v = match framework {
            ModvarFramework::Schrodinger => modular_signal(&m.spec, &m.constants, t),
            ModvarFramework::CaldeiraLeggett => cl_modular_closed(&m.spec, &m.bath, &m.constants, t).value,
            ModvarFramework::CommonBath => common_bath_parts(&m.spec, &m.bath, &m.constants, t).value(),
        };
        write(out, v)
    })
}

/// The damped modular value by direct quadrature of the density matrix,
/// as an independent check of [`modvar_modular_value`].
///
/// # Safety
/// `model` must be a live model and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn modvar_modular_quadrature(model: *const ModvarModel, t: f64, out: *mut f64) -> ModvarStatus {
    guard(|| {
        let m = model_ref(model)?;
        let q = lift(cl_modular_quadrature(
            &m.spec,
            &m.bath,
            &m.constants,
            t,
            m.spec.separation(),
        ))?;
        write(out, q.value().re)
    })
}

/// Latest time at which the packets' supports stay disjoint.
///
/// # Safety
/// `model` must be a live model and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn modvar_overlap_window(
    model: *const ModvarModel,
    framework: ModvarFramework,
    support_factor: f64,
    out: *mut f64,
) -> ModvarStatus {
    guard(|| {
        let m = model_ref(model)?;
        let wm = match framework {
            ModvarFramework::Schrodinger => WindowModel::Schrodinger,
            ModvarFramework::CaldeiraLeggett => WindowModel::CaldeiraLeggett(m.bath),
            ModvarFramework::CommonBath => WindowModel::CommonBath(m.bath),
        };
        let w = lift(overlap_window(&wm, &m.spec, &m.constants, support_factor))?;
        write(out, w.t_max)
    })
}

fn single_particle(framework: ModvarFramework) -> Result<bool, (ModvarStatus, String)> {
    match framework {
        ModvarFramework::Schrodinger => Ok(false),
        ModvarFramework::CaldeiraLeggett => Ok(true),
        ModvarFramework::CommonBath => Err((
            ModvarStatus::InvalidParameter,
            "the shared-bath framework has no single-particle density".into(),
        )),
    }
}

/// Probability density at `(x, t)`.
///
/// # Safety
/// `model` must be a live model and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn modvar_density(
    model: *const ModvarModel,
    framework: ModvarFramework,
    x: f64,
    t: f64,
    out: *mut f64,
) -> ModvarStatus {
    guard(|| {
        let m = model_ref(model)?;
        let v = if single_particle(framework)? {
            cl_density(&m.spec, &m.bath, &m.constants, x, t)
        } else {
            superposed_amplitude(&m.spec, &m.constants, x, t).norm_sqr()
        };
        write(out, v)
    })
}

/// Position at `t` of the left-packet Bohmian trajectory starting at `x0`.
///
/// # Safety
/// `model` must be a live model and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn modvar_bohmian_position(
    model: *const ModvarModel,
    framework: ModvarFramework,
    x0: f64,
    t: f64,
    out: *mut f64,
) -> ModvarStatus {
    guard(|| {
        let m = model_ref(model)?;
        let p = m.spec.left();
        let v = if single_particle(framework)? {
            cl_bohmian_position(p, &m.bath, &m.constants, x0, t)
        } else {
            bohmian_position(p, &m.constants, x0, t)
        };
        write(out, v)
    })
}

/// Local modular value at `(x, t)`; fails with `Domain` where the density
/// underflows.
///
/// # Safety
/// `model` must be a live model and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn modvar_local_modular(
    model: *const ModvarModel,
    framework: ModvarFramework,
    x: f64,
    t: f64,
    out: *mut f64,
) -> ModvarStatus {
    guard(|| {
        let m = model_ref(model)?;
        let v = if single_particle(framework)? {
            lift(cl_local_modular(&m.spec, &m.bath, &m.constants, x, t))?
        } else {
            lift(local_modular_pointwise(&m.spec, &m.constants, x, t))?
        };
        write(out, v)
    })
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminating NUL; 0 when there is none.
#[no_mangle]
pub extern "C" fn modvar_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, |s| s.as_bytes().len()))
}

/// Copy the last error message, NUL-terminated, into `buf`.
///
/// # Safety
/// `buf` must be valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn modvar_last_error_message(buf: *mut c_char, len: usize) -> ModvarStatus {
    if buf.is_null() {
        return ModvarStatus::NullPointer;
    }
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_ref().map_or(&[0u8][..], |s| s.as_bytes_with_nul());
        if bytes.len() > len {
            return ModvarStatus::BufferTooSmall;
        }
        std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, bytes.len());
        ModvarStatus::Ok
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn modvar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
