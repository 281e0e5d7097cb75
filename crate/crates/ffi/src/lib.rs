//! C ABI over `sqrtnot-noise`.
//!
//! Matrices and sweeps are handed out as opaque heap handles that must be
//! released with the matching `*_free` function. Every fallible call returns a
//! [`SqrtnotStatus`] and writes results through out-pointers; out-pointers are
//! left untouched on failure. Leads are passed as `SQRTNOT_LEAD_*` indices.

use std::ffi::c_char;
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use num_complex::Complex64;
use sqrtnot_noise::oracle::{mc_partition_noise, PartitionTrial};
use sqrtnot_noise::smatrix::{build_sqrt_not, norm_diagnostics, unitarity_deviation};
use sqrtnot_noise::sweep::{sweep_kappa, KappaRange, SweepRecord};
use sqrtnot_noise::transport::{
    gate_fidelity, noise_prefactor, output_probabilities, shot_noise_auto, shot_noise_cross,
    BiasConfig,
};
use sqrtnot_noise::{Error, GateParameter, Lead, ScatteringMatrix};

pub const SQRTNOT_LEAD_A: u32 = 0;
pub const SQRTNOT_LEAD_B: u32 = 1;
pub const SQRTNOT_LEAD_C: u32 = 2;
pub const SQRTNOT_LEAD_D: u32 = 3;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtnotStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    NonFiniteEntry = 3,
    InvalidLead = 4,
    InvalidMeasurement = 5,
    InvalidTarget = 6,
    InvalidBias = 7,
    UndefinedLimit = 8,
    InvalidRange = 9,
    InvalidTrial = 10,
    IndexOutOfRange = 11,
    Panic = 12,
}

impl From<&Error> for SqrtnotStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) => SqrtnotStatus::InvalidParameter,
            Error::NonFiniteEntry { .. } => SqrtnotStatus::NonFiniteEntry,
            Error::InvalidTarget(_) => SqrtnotStatus::InvalidTarget,
            Error::InvalidMeasurement(_) => SqrtnotStatus::InvalidMeasurement,
            Error::InvalidBias(_) => SqrtnotStatus::InvalidBias,
            Error::UndefinedLimit => SqrtnotStatus::UndefinedLimit,
            Error::InvalidRange { .. } => SqrtnotStatus::InvalidRange,
            Error::InvalidTrial(_) => SqrtnotStatus::InvalidTrial,
            Error::UnknownLead(_) => SqrtnotStatus::InvalidLead,
        }
    }
}

/// Opaque 4x4 scattering matrix.
pub struct SqrtnotMatrix {
    inner: ScatteringMatrix,
}

/// Opaque list of sweep records.
pub struct SqrtnotSweep {
    records: Vec<SweepRecord>,
}

/// One row of a sweep; noise values are in prefactor units.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtnotRecord {
    pub kappa: f64,
    pub probabilities: [f64; 4],
    pub fidelity: f64,
    pub s_dd: f64,
    pub s_cd: f64,
    pub unitarity_dev: f64,
    pub norm_error: f64,
}

impl From<&SweepRecord> for SqrtnotRecord {
    fn from(r: &SweepRecord) -> Self {
        SqrtnotRecord {
            kappa: r.kappa,
            probabilities: r.probabilities,
            fidelity: r.fidelity,
            s_dd: r.s_dd,
            s_cd: r.s_cd,
            unitarity_dev: r.unitarity_dev,
            norm_error: r.norm_error,
        }
    }
}

fn guard<F: FnOnce() -> Result<(), SqrtnotStatus> + UnwindSafe>(f: F) -> SqrtnotStatus {
    match catch_unwind(f) {
        Ok(Ok(())) => SqrtnotStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => SqrtnotStatus::Panic,
    }
}

fn lead(index: u32) -> Result<Lead, SqrtnotStatus> {
    Lead::from_index(index as usize).ok_or(SqrtnotStatus::InvalidLead)
}

fn status(e: Error) -> SqrtnotStatus {
    SqrtnotStatus::from(&e)
}

unsafe fn matrix<'a>(m: *const SqrtnotMatrix) -> Result<&'a ScatteringMatrix, SqrtnotStatus> {
    m.as_ref().map(|m| &m.inner).ok_or(SqrtnotStatus::NullPointer)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), SqrtnotStatus> {
    if out.is_null() {
        return Err(SqrtnotStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

fn boxed_matrix(inner: ScatteringMatrix) -> *mut SqrtnotMatrix {
    Box::into_raw(Box::new(SqrtnotMatrix { inner }))
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn sqrtnot_status_message(status: SqrtnotStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        SqrtnotStatus::Ok => b"ok\0",
        SqrtnotStatus::NullPointer => b"null pointer argument\0",
        SqrtnotStatus::InvalidParameter => b"gate parameter is not finite\0",
        SqrtnotStatus::NonFiniteEntry => b"matrix entry is not finite\0",
        SqrtnotStatus::InvalidLead => b"lead index outside 0..=3\0",
        SqrtnotStatus::InvalidMeasurement => b"invalid lead combination for this measurement\0",
        SqrtnotStatus::InvalidTarget => b"target state is not normalized\0",
        SqrtnotStatus::InvalidBias => b"invalid bias voltage or temperature\0",
        SqrtnotStatus::UndefinedLimit => b"prefactor undefined at zero bias and zero temperature\0",
        SqrtnotStatus::InvalidRange => b"invalid kappa range or point count\0",
        SqrtnotStatus::InvalidTrial => b"invalid Monte-Carlo trial\0",
        SqrtnotStatus::IndexOutOfRange => b"index out of range\0",
        SqrtnotStatus::Panic => b"internal panic\0",
    };
    msg.as_ptr().cast()
}

/// Version string of the library, NUL-terminated and static.
#[no_mangle]
pub extern "C" fn sqrtnot_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the sqrt(NOT) matrix for `kappa`.
///
/// # Safety
/// `out` must be valid for writing one pointer. The handle written there must
/// be released with [`sqrtnot_matrix_free`].
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_matrix_build(kappa: f64, out: *mut *mut SqrtnotMatrix) -> SqrtnotStatus {
    guard(|| {
        if out.is_null() {
            return Err(SqrtnotStatus::NullPointer);
        }
        let s = GateParameter::new(kappa).map(build_sqrt_not).map_err(status)?;
        write(out, boxed_matrix(s))
    })
}

/// Builds a matrix from 16 real and 16 imaginary parts in row-major order
/// (row = outgoing lead, column = incoming lead). `imag` may be NULL for a real matrix.
///
/// # Safety
/// `real` (and `imag` when non-NULL) must point to 16 readable doubles; `out`
/// must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_matrix_from_parts(
    real: *const f64,
    imag: *const f64,
    out: *mut *mut SqrtnotMatrix,
) -> SqrtnotStatus {
    guard(|| {
        if real.is_null() || out.is_null() {
            return Err(SqrtnotStatus::NullPointer);
        }
        let re = std::slice::from_raw_parts(real, 16);
        let im = if imag.is_null() {
            None
        } else {
            Some(std::slice::from_raw_parts(imag, 16))
        };
        let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, z) in entries.iter_mut().flatten().enumerate() {
            *z = Complex64::new(re[i], im.map_or(0.0, |im| im[i]));
        }
        let s = ScatteringMatrix::new(entries).map_err(status)?;
        write(out, boxed_matrix(s))
    })
}

/// Releases a matrix handle. NULL is ignored.
///
/// # Safety
/// `m` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_matrix_free(m: *mut SqrtnotMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Reads entry (outgoing `row`, incoming `col`).
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_matrix_entry(
    m: *const SqrtnotMatrix,
    row: u32,
    col: u32,
    re: *mut f64,
    im: *mut f64,
) -> SqrtnotStatus {
    guard(|| {
        let s = matrix(m)?;
        let z = s.get(lead(row)?, lead(col)?);
        if re.is_null() || im.is_null() {
            return Err(SqrtnotStatus::NullPointer);
        }
        write(re, z.re)?;
        write(im, z.im)
    })
}

/// Largest entry of `|S^dagger S - I|`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_unitarity_deviation(m: *const SqrtnotMatrix, out: *mut f64) -> SqrtnotStatus {
    guard(|| write(out, unitarity_deviation(matrix(m)?)))
}

/// Row and column probability-conservation errors.
///
/// # Safety
/// `m` must be a live handle; both out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_norm_diagnostics(
    m: *const SqrtnotMatrix,
    row_error: *mut f64,
    col_error: *mut f64,
) -> SqrtnotStatus {
    guard(|| {
        let d = norm_diagnostics(matrix(m)?);
        if row_error.is_null() || col_error.is_null() {
            return Err(SqrtnotStatus::NullPointer);
        }
        write(row_error, d.row_norm_error)?;
        write(col_error, d.col_norm_error)
    })
}

/// Exit probabilities of the four leads for a unit input in `input`.
///
/// # Safety
/// `m` must be a live handle; `out` must point to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_output_probabilities(
    m: *const SqrtnotMatrix,
    input: u32,
    out: *mut f64,
) -> SqrtnotStatus {
    guard(|| {
        let p = output_probabilities(matrix(m)?, lead(input)?);
        if out.is_null() {
            return Err(SqrtnotStatus::NullPointer);
        }
        ptr::copy_nonoverlapping(p.as_ptr(), out, 4);
        Ok(())
    })
}

/// Fidelity of the output column for `input` against `(0, 0, 1/sqrt2, 1/sqrt2)`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_fidelity(m: *const SqrtnotMatrix, input: u32, out: *mut f64) -> SqrtnotStatus {
    guard(|| write(out, gate_fidelity(matrix(m)?, lead(input)?)))
}

/// Auto noise in `lead_index` for a bias on `input`, in prefactor units.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_shot_noise_auto(
    m: *const SqrtnotMatrix,
    lead_index: u32,
    input: u32,
    out: *mut f64,
) -> SqrtnotStatus {
    guard(|| {
        let n = shot_noise_auto(matrix(m)?, lead(lead_index)?, lead(input)?).map_err(status)?;
        write(out, n.value_prefactor_units)
    })
}

/// Cross noise between two leads for a bias on `input`, in prefactor units.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_shot_noise_cross(
    m: *const SqrtnotMatrix,
    first: u32,
    second: u32,
    input: u32,
    out: *mut f64,
) -> SqrtnotStatus {
    guard(|| {
        let n = shot_noise_cross(matrix(m)?, lead(first)?, lead(second)?, lead(input)?)
            .map_err(status)?;
        write(out, n.value_prefactor_units)
    })
}

/// `(e^3 V / h) coth(e V / 2 k_B T)` in A^2/Hz.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_noise_prefactor(
    bias_voltage: f64,
    temperature: f64,
    out: *mut f64,
) -> SqrtnotStatus {
    guard(|| {
        let bias = BiasConfig::new(bias_voltage, temperature, Lead::A).map_err(status)?;
        write(out, noise_prefactor(&bias).map_err(status)?)
    })
}

/// Sweeps kappa over `points` uniformly spaced values in `[kappa_min, kappa_max]`.
///
/// # Safety
/// `out` must be valid for writing one pointer; release the handle with
/// [`sqrtnot_sweep_free`].
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_sweep_new(
    kappa_min: f64,
    kappa_max: f64,
    points: usize,
    input: u32,
    out: *mut *mut SqrtnotSweep,
) -> SqrtnotStatus {
    guard(|| {
        if out.is_null() {
            return Err(SqrtnotStatus::NullPointer);
        }
        let range = KappaRange::new(kappa_min, kappa_max).map_err(status)?;
        let records = sweep_kappa(range, points, lead(input)?).map_err(status)?;
        write(out, Box::into_raw(Box::new(SqrtnotSweep { records })))
    })
}

/// Number of records in a sweep; 0 for NULL.
///
/// # Safety
/// `sweep` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_sweep_len(sweep: *const SqrtnotSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.records.len())
}

/// Copies record `index` into `out`.
///
/// # Safety
/// `sweep` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_sweep_record(
    sweep: *const SqrtnotSweep,
    index: usize,
    out: *mut SqrtnotRecord,
) -> SqrtnotStatus {
    guard(|| {
        let s = sweep.as_ref().ok_or(SqrtnotStatus::NullPointer)?;
        let r = s.records.get(index).ok_or(SqrtnotStatus::IndexOutOfRange)?;
        write(out, SqrtnotRecord::from(r))
    })
}

/// Releases a sweep handle. NULL is ignored.
///
/// # Safety
/// `sweep` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_sweep_free(sweep: *mut SqrtnotSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Monte-Carlo partition noise of `electrons` electrons transmitted with
/// probability `transmission`.
///
/// # Safety
/// `variance` and `standard_error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqrtnot_mc_partition_noise(
    transmission: f64,
    electrons: u64,
    seed: u64,
    variance: *mut f64,
    standard_error: *mut f64,
) -> SqrtnotStatus {
    guard(|| {
        if variance.is_null() || standard_error.is_null() {
            return Err(SqrtnotStatus::NullPointer);
        }
        let trial = PartitionTrial::new(transmission, electrons, seed).map_err(status)?;
        let e = mc_partition_noise(&trial);
        write(variance, e.value)?;
        write(standard_error, e.standard_error)
    })
}
