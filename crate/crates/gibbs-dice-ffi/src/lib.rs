//! C ABI for the gibbs-dice library.
//!
//! Conventions: every fallible function returns a [`GdStatus`] code and
//! writes its result through out-pointers; `GD_STATUS_OK` is zero. Datasets
//! and bootstrap results are opaque handles created and released by the
//! `gd_*_free` functions. A thread-local message for the most recent error is
//! available via [`gd_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use gibbs_dice::datasets::{self, DieData, ExperimentRecord};
use gibbs_dice::{
    bootstrap_constant_beta, chi_square_full, chi_square_xxy, cuboid_energies, fit_beta,
    fit_beta_global, general_energies, gibbs_probabilities, simpson_probabilities, BootstrapConfig,
    BootstrapResult, CuboidSpec, EnergyNormalization, EnergyVector, FitOptions, FitResult,
    GeneralDieSpec, TossCounts,
};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdStatus {
    Ok = 0,
    InvalidGeometry = 1,
    InvalidParameter = 2,
    DimensionMismatch = 3,
    EmptyData = 4,
    DegenerateCell = 5,
    UnknownDataset = 6,
    ParseError = 7,
    NullPointer = 8,
    InvalidUtf8 = 9,
}

/// Energy normalization for cuboid geometries.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdNormalization {
    HalfDiagonal = 0,
    GeometricMean = 1,
}

impl From<GdNormalization> for EnergyNormalization {
    fn from(n: GdNormalization) -> Self {
        match n {
            GdNormalization::HalfDiagonal => EnergyNormalization::HalfDiagonal,
            GdNormalization::GeometricMean => EnergyNormalization::GeometricMean,
        }
    }
}

/// Kind of die a dataset describes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdDatasetKind {
    Cuboid = 0,
    GeneralDie = 1,
    XxyFamily = 2,
}

/// Maximum-likelihood fit outcome.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GdFitResult {
    pub beta_hat: f64,
    pub neg_log_likelihood: f64,
    pub iterations: u32,
    pub converged: bool,
    pub at_upper_bound: bool,
}

impl From<FitResult> for GdFitResult {
    fn from(f: FitResult) -> Self {
        Self {
            beta_hat: f.beta_hat,
            neg_log_likelihood: f.neg_log_likelihood,
            iterations: f.iterations,
            converged: f.converged,
            at_upper_bound: f.at_upper_bound,
        }
    }
}

/// Opaque dataset handle.
pub struct GdDataset {
    record: ExperimentRecord,
}

/// Opaque bootstrap result handle.
pub struct GdBootstrapResult {
    result: BootstrapResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(e: &gibbs_dice::Error) -> GdStatus {
    use gibbs_dice::Error::*;
    match e {
        InvalidGeometry(_) => GdStatus::InvalidGeometry,
        InvalidParameter(_) => GdStatus::InvalidParameter,
        DimensionMismatch(_) => GdStatus::DimensionMismatch,
        EmptyData(_) => GdStatus::EmptyData,
        DegenerateCell(_) => GdStatus::DegenerateCell,
        UnknownDataset { .. } => GdStatus::UnknownDataset,
        Parse { .. } => GdStatus::ParseError,
    }
}

fn fail(e: gibbs_dice::Error) -> GdStatus {
    let status = status_of(&e);
    set_last_error(&e.to_string());
    status
}

fn fail_null(what: &str) -> GdStatus {
    set_last_error(&format!("null pointer: {what}"));
    GdStatus::NullPointer
}

/// Message for the most recent error on this thread. The pointer stays valid
/// until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn gd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], GdStatus> {
    if ptr.is_null() {
        return Err(fail_null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn str_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, GdStatus> {
    if ptr.is_null() {
        return Err(fail_null(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error(&format!("{what} is not valid UTF-8"));
        GdStatus::InvalidUtf8
    })
}

/// Per-face energies of a homogeneous cuboid, face order 1..=6.
///
/// # Safety
/// `out_energies` must point to at least 6 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gd_cuboid_energies(
    s1: f64,
    s2: f64,
    s3: f64,
    norm: GdNormalization,
    out_energies: *mut f64,
) -> GdStatus {
    if out_energies.is_null() {
        return fail_null("out_energies");
    }
    let result = CuboidSpec::new(s1, s2, s3).and_then(|spec| cuboid_energies(&spec, norm.into()));
    match result {
        Ok(e) => {
            std::ptr::copy_nonoverlapping(e.as_slice().as_ptr(), out_energies, 6);
            GdStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Energies of a general die: `E_i = h_i / scale`.
///
/// # Safety
/// `heights` must point to `k` readable doubles and `out_energies` to `k`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gd_general_energies(
    heights: *const f64,
    k: usize,
    scale: f64,
    out_energies: *mut f64,
) -> GdStatus {
    let heights = match slice_arg(heights, k, "heights") {
        Ok(h) => h,
        Err(s) => return s,
    };
    if out_energies.is_null() {
        return fail_null("out_energies");
    }
    match GeneralDieSpec::new(heights.to_vec(), scale) {
        Ok(spec) => {
            let e = general_energies(&spec);
            std::ptr::copy_nonoverlapping(e.as_slice().as_ptr(), out_energies, k);
            GdStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Gibbs probabilities `p_i = exp(-beta E_i)/Z(beta)`.
///
/// # Safety
/// `energies` must point to `k` readable doubles and `out_probs` to `k`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gd_gibbs_probabilities(
    energies: *const f64,
    k: usize,
    beta: f64,
    out_probs: *mut f64,
) -> GdStatus {
    let energies = match slice_arg(energies, k, "energies") {
        Ok(e) => e,
        Err(s) => return s,
    };
    if out_probs.is_null() {
        return fail_null("out_probs");
    }
    let result = EnergyVector::new(energies.to_vec()).and_then(|e| gibbs_probabilities(&e, beta));
    match result {
        Ok(p) => {
            std::ptr::copy_nonoverlapping(p.as_slice().as_ptr(), out_probs, k);
            GdStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Solid-angle (Simpson) face probabilities of a cuboid, face order 1..=6.
///
/// # Safety
/// `out_probs` must point to at least 6 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gd_simpson_probabilities(
    s1: f64,
    s2: f64,
    s3: f64,
    out_probs: *mut f64,
) -> GdStatus {
    if out_probs.is_null() {
        return fail_null("out_probs");
    }
    let result = CuboidSpec::new(s1, s2, s3).and_then(|spec| simpson_probabilities(&spec));
    match result {
        Ok(p) => {
            std::ptr::copy_nonoverlapping(p.as_slice().as_ptr(), out_probs, 6);
            GdStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Probability of the xx-state of an xxy-cuboid (geometric-mean energies).
///
/// # Safety
/// `out_pxx` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn gd_xxy_pxx(sx: f64, sy: f64, beta: f64, out_pxx: *mut f64) -> GdStatus {
    if out_pxx.is_null() {
        return fail_null("out_pxx");
    }
    match gibbs_dice::xxy_pxx(sx, sy, beta) {
        Ok(p) => {
            *out_pxx = p;
            GdStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Maximum-likelihood fit of beta for one die from per-state energies and
/// counts.
///
/// # Safety
/// `energies` and `counts` must point to `k` readable elements each;
/// `out_fit` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_fit_beta(
    energies: *const f64,
    counts: *const u64,
    k: usize,
    out_fit: *mut GdFitResult,
) -> GdStatus {
    let energies = match slice_arg(energies, k, "energies") {
        Ok(e) => e,
        Err(s) => return s,
    };
    let counts = match slice_arg(counts, k, "counts") {
        Ok(c) => c,
        Err(s) => return s,
    };
    if out_fit.is_null() {
        return fail_null("out_fit");
    }
    let result = EnergyVector::new(energies.to_vec()).and_then(|e| {
        let c = TossCounts::new(counts.to_vec())?;
        fit_beta(&e, &c, &FitOptions::default())
    });
    match result {
        Ok(f) => {
            *out_fit = f.into();
            GdStatus::Ok
        }
        Err(e) => fail(e),
    }
}

// ---------------------------------------------------------------- datasets

fn dataset_out(record: ExperimentRecord, out: *mut *mut GdDataset) -> GdStatus {
    let handle = Box::new(GdDataset { record });
    unsafe { *out = Box::into_raw(handle) };
    GdStatus::Ok
}

/// Load a bundled dataset by name (control-I, control-II, budden,
/// heilbronner, ushape-I, ushape-II).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out_dataset` must be writable.
/// A returned handle must be released with [`gd_dataset_free`].
#[no_mangle]
pub unsafe extern "C" fn gd_dataset_load_builtin(
    name: *const c_char,
    out_dataset: *mut *mut GdDataset,
) -> GdStatus {
    let name = match str_arg(name, "name") {
        Ok(n) => n,
        Err(s) => return s,
    };
    if out_dataset.is_null() {
        return fail_null("out_dataset");
    }
    match datasets::load_builtin(name) {
        Ok(record) => dataset_out(record, out_dataset),
        Err(e) => fail(e),
    }
}

/// Parse an experiment file from text (same format as the bundled files).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_dataset` must be writable.
/// A returned handle must be released with [`gd_dataset_free`].
#[no_mangle]
pub unsafe extern "C" fn gd_dataset_parse(
    text: *const c_char,
    out_dataset: *mut *mut GdDataset,
) -> GdStatus {
    let text = match str_arg(text, "text") {
        Ok(t) => t,
        Err(s) => return s,
    };
    if out_dataset.is_null() {
        return fail_null("out_dataset");
    }
    match datasets::parse_experiment(text) {
        Ok(record) => dataset_out(record, out_dataset),
        Err(e) => fail(e),
    }
}

/// Release a dataset handle. A null pointer is ignored.
///
/// # Safety
/// `dataset` must have been returned by a `gd_dataset_*` constructor and not
/// freed before.
#[no_mangle]
pub unsafe extern "C" fn gd_dataset_free(dataset: *mut GdDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Kind of die the dataset describes.
///
/// # Safety
/// `dataset` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gd_dataset_kind(dataset: *const GdDataset) -> GdDatasetKind {
    match &(*dataset).record.data {
        DieData::Cuboid { .. } => GdDatasetKind::Cuboid,
        DieData::General { .. } => GdDatasetKind::GeneralDie,
        DieData::XxyFamily(_) => GdDatasetKind::XxyFamily,
    }
}

/// Number of xxy rows, or of resting states for single-die datasets.
///
/// # Safety
/// `dataset` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gd_dataset_len(dataset: *const GdDataset) -> usize {
    match &(*dataset).record.data {
        DieData::Cuboid { counts, .. } | DieData::General { counts, .. } => counts.len(),
        DieData::XxyFamily(rows) => rows.len(),
    }
}

fn dataset_fit(record: &ExperimentRecord) -> gibbs_dice::Result<FitResult> {
    match &record.data {
        DieData::XxyFamily(rows) => fit_beta_global(rows, &FitOptions::default()),
        DieData::Cuboid { spec, counts } => {
            let energies = cuboid_energies(spec, EnergyNormalization::HalfDiagonal)?;
            fit_beta(&energies, counts, &FitOptions::default())
        }
        DieData::General { spec, counts } => {
            fit_beta(&general_energies(spec), counts, &FitOptions::default())
        }
    }
}

/// Maximum-likelihood fit of beta under the dataset's own normalization
/// convention (half-diagonal for cuboids, bundled scale for general dice,
/// geometric mean for xxy families).
///
/// # Safety
/// `dataset` must be a live handle; `out_fit` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_dataset_fit(
    dataset: *const GdDataset,
    out_fit: *mut GdFitResult,
) -> GdStatus {
    if dataset.is_null() {
        return fail_null("dataset");
    }
    if out_fit.is_null() {
        return fail_null("out_fit");
    }
    match dataset_fit(&(*dataset).record) {
        Ok(f) => {
            *out_fit = f.into();
            GdStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Pearson chi-square of the dataset against the Gibbs model at `beta`,
/// together with the cell count `m` of the chi2/m rule.
///
/// # Safety
/// `dataset` must be a live handle; `out_chi2` and `out_m` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_dataset_chi_square(
    dataset: *const GdDataset,
    beta: f64,
    out_chi2: *mut f64,
    out_m: *mut usize,
) -> GdStatus {
    if dataset.is_null() {
        return fail_null("dataset");
    }
    if out_chi2.is_null() || out_m.is_null() {
        return fail_null("out_chi2/out_m");
    }
    let record = &(*dataset).record;
    let result = match &record.data {
        DieData::XxyFamily(rows) => chi_square_xxy(rows, beta),
        DieData::Cuboid { spec, counts } => {
            cuboid_energies(spec, EnergyNormalization::HalfDiagonal)
                .and_then(|e| gibbs_probabilities(&e, beta))
                .and_then(|p| chi_square_full(counts, &p))
        }
        DieData::General { spec, counts } => gibbs_probabilities(&general_energies(spec), beta)
            .and_then(|p| chi_square_full(counts, &p)),
    };
    match result {
        Ok(gof) => {
            *out_chi2 = gof.chi2;
            *out_m = gof.m;
            GdStatus::Ok
        }
        Err(e) => fail(e),
    }
}

// ---------------------------------------------------------------- bootstrap

/// Run the parametric bootstrap on an xxy dataset. Pass a negative `beta0`
/// to use the maximum-likelihood fit. The returned handle must be released
/// with [`gd_bootstrap_free`].
///
/// # Safety
/// `dataset` must be a live xxy handle; `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_bootstrap_run(
    dataset: *const GdDataset,
    epsilon: f64,
    iterations: u32,
    master_seed: u64,
    beta0: f64,
    out_result: *mut *mut GdBootstrapResult,
) -> GdStatus {
    if dataset.is_null() {
        return fail_null("dataset");
    }
    if out_result.is_null() {
        return fail_null("out_result");
    }
    let record = &(*dataset).record;
    let rows = match &record.data {
        DieData::XxyFamily(rows) => rows,
        _ => {
            set_last_error("the bootstrap test applies to xxy family datasets");
            return GdStatus::InvalidParameter;
        }
    };
    let beta0 = if beta0 < 0.0 {
        match fit_beta_global(rows, &FitOptions::default()) {
            Ok(f) => f.beta_hat,
            Err(e) => return fail(e),
        }
    } else {
        beta0
    };
    let cfg = BootstrapConfig {
        iterations,
        ..BootstrapConfig::new(epsilon, beta0, master_seed)
    };
    match bootstrap_constant_beta(rows, &cfg) {
        Ok(result) => {
            *out_result = Box::into_raw(Box::new(GdBootstrapResult { result }));
            GdStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gd_bootstrap_p_value(result: *const GdBootstrapResult) -> f64 {
    (*result).result.p_value
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gd_bootstrap_chi2_observed(result: *const GdBootstrapResult) -> f64 {
    (*result).result.chi2_observed
}

/// Number of simulated chi-square values.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gd_bootstrap_len(result: *const GdBootstrapResult) -> usize {
    (*result).result.chi2_simulated.len()
}

/// Copy the simulated chi-square sample (iteration order) into `buffer`.
///
/// # Safety
/// `result` must be a live handle and `buffer` must point to `len` writable
/// doubles, with `len` at least [`gd_bootstrap_len`].
#[no_mangle]
pub unsafe extern "C" fn gd_bootstrap_chi2_sample(
    result: *const GdBootstrapResult,
    buffer: *mut f64,
    len: usize,
) -> GdStatus {
    if result.is_null() {
        return fail_null("result");
    }
    if buffer.is_null() {
        return fail_null("buffer");
    }
    let sample = &(*result).result.chi2_simulated;
    if len < sample.len() {
        set_last_error(&format!("buffer holds {len} values, need {}", sample.len()));
        return GdStatus::InvalidParameter;
    }
    std::ptr::copy_nonoverlapping(sample.as_ptr(), buffer, sample.len());
    GdStatus::Ok
}

/// Release a bootstrap result handle. A null pointer is ignored.
///
/// # Safety
/// `result` must have been returned by [`gd_bootstrap_run`] and not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn gd_bootstrap_free(result: *mut GdBootstrapResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
