//! C interface to the `ispa` transcription library.
//!
//! Every fallible call returns an [`IspaStatus`]; on failure a description
//! is available from [`ispa_last_error_message`] on the same thread. Objects
//! cross the boundary as opaque handles that must be released with their
//! matching `_free` function. Strings returned through `char **` outputs are
//! owned by the caller and released with [`ispa_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ispa::acoustic::{self, AcousticConfig};
use ispa::audio::{self, Waveform};
use ispa::dsp::FeatureSequence;
use ispa::feature::{self, Codebook, Variant};
use ispa::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IspaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    Parse = 5,
    DimMismatch = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IspaVariant {
    Raw = 0,
    Seg = 1,
    Phn = 2,
}

impl From<IspaVariant> for Variant {
    fn from(v: IspaVariant) -> Self {
        match v {
            IspaVariant::Raw => Variant::Raw,
            IspaVariant::Seg => Variant::Seg,
            IspaVariant::Phn => Variant::Phn,
        }
    }
}

/// Mono audio buffer.
pub struct IspaWaveform {
    inner: Waveform,
}

/// Trained codebook, optionally with phone labels.
pub struct IspaCodebook {
    inner: Codebook,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> IspaStatus {
    match err {
        Error::Io { .. } => IspaStatus::Io,
        Error::Wav { .. }
        | Error::UnsupportedEncoding(_)
        | Error::BadMagic(_)
        | Error::VersionMismatch { .. }
        | Error::Truncated { .. }
        | Error::NonUniformHop { .. }
        | Error::MissingColumn(_)
        | Error::Csv(_)
        | Error::Json(_)
        | Error::InvalidCodebook(_) => IspaStatus::Format,
        Error::Parse(_) => IspaStatus::Parse,
        Error::DimMismatch { .. } => IspaStatus::DimMismatch,
        _ => IspaStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic for [`ispa_last_error_message`].
fn guard(f: impl FnOnce() -> Result<(), IspaStatus>) -> IspaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IspaStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic");
            IspaStatus::Panic
        }
    }
}

fn fail(err: Error) -> IspaStatus {
    set_last_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> IspaStatus {
    set_last_error(format!("{what} is null"));
    IspaStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, IspaStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_last_error(format!("{what} is not valid UTF-8"));
        IspaStatus::InvalidArgument
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), IspaStatus> {
    let c = CString::new(s).map_err(|_| {
        set_last_error("output contains a NUL byte");
        IspaStatus::InvalidArgument
    })?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ispa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ispa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ispa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Copies `n` samples into a new waveform.
///
/// # Safety
/// `samples` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ispa_waveform_new(
    samples: *const f64,
    n: usize,
    sample_rate: u32,
    out: *mut *mut IspaWaveform,
) -> IspaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if samples.is_null() && n > 0 {
            return Err(null("samples"));
        }
        let data = if n == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(samples, n).to_vec()
        };
        let inner = Waveform::new(data, sample_rate).map_err(fail)?;
        *out = Box::into_raw(Box::new(IspaWaveform { inner }));
        Ok(())
    })
}

/// Reads a WAV file (channels are averaged).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ispa_waveform_load(path: *const c_char, out: *mut *mut IspaWaveform) -> IspaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = audio::load_audio(str_arg(path, "path")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(IspaWaveform { inner }));
        Ok(())
    })
}

/// Writes a 16-bit WAV file.
///
/// # Safety
/// `w` must be a live waveform handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ispa_waveform_save(w: *const IspaWaveform, path: *const c_char) -> IspaStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("waveform"))?;
        audio::write_wav(str_arg(path, "path")?, &w.inner).map_err(fail)
    })
}

/// # Safety
/// `w` must be a live waveform handle.
#[no_mangle]
pub unsafe extern "C" fn ispa_waveform_len(w: *const IspaWaveform) -> usize {
    w.as_ref().map_or(0, |w| w.inner.len())
}

/// # Safety
/// `w` must be a live waveform handle.
#[no_mangle]
pub unsafe extern "C" fn ispa_waveform_sample_rate(w: *const IspaWaveform) -> u32 {
    w.as_ref().map_or(0, |w| w.inner.sample_rate())
}

/// Borrowed view of the samples, valid while the handle lives.
///
/// # Safety
/// `w` must be a live waveform handle.
#[no_mangle]
pub unsafe extern "C" fn ispa_waveform_samples(w: *const IspaWaveform) -> *const f64 {
    w.as_ref().map_or(ptr::null(), |w| w.inner.samples().as_ptr())
}

/// # Safety
/// `w` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ispa_waveform_free(w: *mut IspaWaveform) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Loads a codebook JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ispa_codebook_load(path: *const c_char, out: *mut *mut IspaCodebook) -> IspaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Codebook::load(str_arg(path, "path")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(IspaCodebook { inner }));
        Ok(())
    })
}

/// Parses a codebook from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ispa_codebook_from_json(json: *const c_char, out: *mut *mut IspaCodebook) -> IspaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Codebook::from_json(str_arg(json, "json")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(IspaCodebook { inner }));
        Ok(())
    })
}

/// # Safety
/// `cb` must be a live codebook handle.
#[no_mangle]
pub unsafe extern "C" fn ispa_codebook_k(cb: *const IspaCodebook) -> usize {
    cb.as_ref().map_or(0, |c| c.inner.k())
}

/// # Safety
/// `cb` must be a live codebook handle.
#[no_mangle]
pub unsafe extern "C" fn ispa_codebook_dim(cb: *const IspaCodebook) -> usize {
    cb.as_ref().map_or(0, |c| c.inner.dim())
}

/// # Safety
/// `cb` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ispa_codebook_free(cb: *mut IspaCodebook) {
    if !cb.is_null() {
        drop(Box::from_raw(cb));
    }
}

/// Acoustic transcription with default settings; `lambda <= 0` keeps the
/// default penalty. Writes space-separated tokens to `*out_text`.
///
/// # Safety
/// `w` must be a live waveform handle; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ispa_transcribe_a(
    w: *const IspaWaveform,
    lambda: f64,
    out_text: *mut *mut c_char,
) -> IspaStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("waveform"))?;
        if out_text.is_null() {
            return Err(null("out_text"));
        }
        let mut config = AcousticConfig::default();
        if lambda > 0.0 {
            config.lambda = lambda;
        }
        let tokens = acoustic::transcribe_a(&w.inner, &config).map_err(fail)?;
        write_string(out_text, acoustic::encode_tokens(&tokens))
    })
}

/// Feature transcription of audio through the built-in MFCC front end.
/// `lambda <= 0` keeps the default penalty.
///
/// # Safety
/// `w` and `cb` must be live handles; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ispa_transcribe_f(
    w: *const IspaWaveform,
    cb: *const IspaCodebook,
    variant: IspaVariant,
    lambda: f64,
    out_text: *mut *mut c_char,
) -> IspaStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("waveform"))?;
        let cb = cb.as_ref().ok_or_else(|| null("codebook"))?;
        if out_text.is_null() {
            return Err(null("out_text"));
        }
        let lambda = if lambda > 0.0 { lambda } else { feature::DEFAULT_LAMBDA };
        let tokens = feature::transcribe_audio_f(&w.inner, &cb.inner, variant.into(), lambda).map_err(fail)?;
        write_string(out_text, tokens.join(" "))
    })
}

/// Feature transcription of precomputed row-major features
/// (`n_frames * dim` doubles).
///
/// # Safety
/// `data` must point to `n_frames * dim` readable doubles; `cb` must be a
/// live handle; `out_text` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ispa_transcribe_features_f(
    data: *const f64,
    n_frames: usize,
    dim: usize,
    hop_seconds: f64,
    cb: *const IspaCodebook,
    variant: IspaVariant,
    lambda: f64,
    out_text: *mut *mut c_char,
) -> IspaStatus {
    guard(|| {
        let cb = cb.as_ref().ok_or_else(|| null("codebook"))?;
        if out_text.is_null() {
            return Err(null("out_text"));
        }
        let len = n_frames.checked_mul(dim).ok_or_else(|| {
            set_last_error("n_frames * dim overflows");
            IspaStatus::InvalidArgument
        })?;
        if data.is_null() && len > 0 {
            return Err(null("data"));
        }
        let values = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(data, len).to_vec()
        };
        let features = FeatureSequence::new(hop_seconds, 0.0, dim, values).map_err(fail)?;
        let lambda = if lambda > 0.0 { lambda } else { feature::DEFAULT_LAMBDA };
        let tokens = feature::transcribe_f(&features, &cb.inner, variant.into(), lambda).map_err(fail)?;
        write_string(out_text, tokens.join(" "))
    })
}

/// Renders acoustic token text as pure tones.
///
/// # Safety
/// `tokens` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ispa_synthesize(
    tokens: *const c_char,
    sample_rate: u32,
    out: *mut *mut IspaWaveform,
) -> IspaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let parsed = acoustic::parse_tokens(str_arg(tokens, "tokens")?).map_err(|e| fail(e.into()))?;
        let inner = acoustic::synthesize(&parsed, sample_rate).map_err(fail)?;
        *out = Box::into_raw(Box::new(IspaWaveform { inner }));
        Ok(())
    })
}

/// Minimum-cost one-to-one matching on a row-major `rows x cols` matrix.
/// `row_to_col` receives `rows` entries: the matched column or -1.
///
/// # Safety
/// `cost` must point to `rows * cols` readable doubles, `row_to_col` to
/// `rows` writable entries; `total` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn ispa_solve_assignment(
    cost: *const f64,
    rows: usize,
    cols: usize,
    row_to_col: *mut isize,
    total: *mut f64,
) -> IspaStatus {
    guard(|| {
        let len = rows.checked_mul(cols).ok_or_else(|| {
            set_last_error("rows * cols overflows");
            IspaStatus::InvalidArgument
        })?;
        if len > 0 && cost.is_null() {
            return Err(null("cost"));
        }
        if rows > 0 && row_to_col.is_null() {
            return Err(null("row_to_col"));
        }
        let matrix: Vec<Vec<f64>> = if len == 0 {
            vec![Vec::new(); rows]
        } else {
            std::slice::from_raw_parts(cost, len)
                .chunks(cols)
                .map(<[f64]>::to_vec)
                .collect()
        };
        let a = feature::solve_assignment(&matrix).map_err(fail)?;
        for (i, c) in a.row_to_col.iter().enumerate() {
            *row_to_col.add(i) = c.map_or(-1, |c| c as isize);
        }
        if !total.is_null() {
            *total = a.total;
        }
        Ok(())
    })
}
