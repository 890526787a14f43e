//! File formats.
//!
//! All files are `f64`. JSON objects use these field names:
//!
//! * model: `{"nodes": [θ_j], "multiplicities": [ℓ_j], "coefficients": [[{"re", "im"}, …], …]}`
//!   with `z_j = e^{iθ_j}` and `coefficients[j][ℓ] = c_{ℓ,j}`;
//! * signal: `{"d", "jumps": [x_j], "magnitudes": [[a_{0,j}, …, a_{d,j}], …],
//!   "psi": {"coefficients": [{"re", "im"}, …], "decay_bound"}}` where the
//!   Ψ coefficients are `ĉ_n(Ψ)` for `n = 0..=deg`;
//! * samples: `{"offset", "stride", "count", "noise_level", "values": [{"re", "im"}, …]}`;
//! * reconstruction: `{"d", "bandwidth", "localized_bandwidth", "stride",
//!   "jumps", "magnitudes", "coarse_jumps", "reports": [{"method", "iterations", "residual", "flags"}]}`.
//!
//! Coefficient windows are plain text, one `k re im` line per `k = -M..=M`.
//! Floats are written in shortest round-trip form, so every format is
//! lossless for `f64`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{PronyError, Result};
use crate::fourier::{CoefficientWindow, ReconstructionResult};
use crate::model::{PiecewiseSignal, PronyModel, SampleSet, SamplingScheme, TrigSeries};
use crate::scalar::arg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for ComplexRecord {
    fn from(c: Complex<f64>) -> Self {
        ComplexRecord { re: c.re, im: c.im }
    }
}

impl From<ComplexRecord> for Complex<f64> {
    fn from(c: ComplexRecord) -> Self {
        Complex::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRecord {
    pub nodes: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub coefficients: Vec<Vec<ComplexRecord>>,
}

impl ModelRecord {
    pub fn from_model(model: &PronyModel<f64>) -> Self {
        ModelRecord {
            nodes: model.nodes().iter().map(|&z| arg(z)).collect(),
            multiplicities: model.multiplicities(),
            coefficients: model.coefficients().iter().map(|c| c.iter().map(|&v| v.into()).collect()).collect(),
        }
    }

    pub fn to_model(&self) -> Result<PronyModel<f64>> {
        if self.multiplicities.len() != self.nodes.len()
            || self.coefficients.iter().zip(&self.multiplicities).any(|(c, &l)| c.len() != l)
        {
            return Err(PronyError::Parse("multiplicities disagree with the coefficient lists".into()));
        }
        let coefficients = self.coefficients.iter().map(|c| c.iter().map(|&v| v.into()).collect()).collect();
        PronyModel::from_args(&self.nodes, coefficients)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiRecord {
    pub coefficients: Vec<ComplexRecord>,
    pub decay_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalRecord {
    pub d: usize,
    pub jumps: Vec<f64>,
    pub magnitudes: Vec<Vec<f64>>,
    pub psi: PsiRecord,
}

impl SignalRecord {
    pub fn from_signal(signal: &PiecewiseSignal<f64>) -> Self {
        SignalRecord {
            d: signal.smoothness(),
            jumps: signal.jumps().to_vec(),
            magnitudes: signal.magnitudes().to_vec(),
            psi: PsiRecord {
                coefficients: signal.psi().coefficients().iter().map(|&c| c.into()).collect(),
                decay_bound: signal.psi_decay_bound(),
            },
        }
    }

    pub fn to_signal(&self) -> Result<PiecewiseSignal<f64>> {
        let psi = TrigSeries::new(self.psi.coefficients.iter().map(|&c| c.into()).collect());
        PiecewiseSignal::new(self.d, self.jumps.clone(), self.magnitudes.clone(), psi, self.psi.decay_bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplesRecord {
    pub offset: usize,
    pub stride: usize,
    pub count: usize,
    pub noise_level: f64,
    pub values: Vec<ComplexRecord>,
}

impl SamplesRecord {
    pub fn from_samples(samples: &SampleSet<f64>) -> Self {
        let s = samples.scheme();
        SamplesRecord {
            offset: s.offset(),
            stride: s.stride(),
            count: s.count(),
            noise_level: samples.noise_level(),
            values: samples.values().iter().map(|&c| c.into()).collect(),
        }
    }

    pub fn to_samples(&self) -> Result<SampleSet<f64>> {
        let scheme = SamplingScheme::new(self.offset, self.stride, self.count)?;
        SampleSet::new(scheme, self.values.iter().map(|&c| c.into()).collect(), self.noise_level)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub method: String,
    pub iterations: usize,
    pub residual: f64,
    pub flags: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionRecord {
    pub d: usize,
    pub bandwidth: usize,
    pub localized_bandwidth: usize,
    pub stride: usize,
    pub jumps: Vec<f64>,
    pub magnitudes: Vec<Vec<f64>>,
    pub coarse_jumps: Vec<f64>,
    pub reports: Vec<ReportRecord>,
}

impl ReconstructionRecord {
    pub fn from_result(r: &ReconstructionResult<f64>) -> Self {
        ReconstructionRecord {
            d: r.smoothness,
            bandwidth: r.bandwidth,
            localized_bandwidth: r.localized_bandwidth,
            stride: r.stride,
            jumps: r.jumps.clone(),
            magnitudes: r.magnitudes.clone(),
            coarse_jumps: r.coarse_jumps.clone(),
            reports: r
                .reports
                .iter()
                .map(|rep| ReportRecord {
                    method: rep.method_tag(),
                    iterations: rep.iterations,
                    residual: rep.residual,
                    flags: rep.flags_tag(),
                })
                .collect(),
        }
    }
}

pub fn model_to_json(model: &PronyModel<f64>) -> String {
    to_json(&ModelRecord::from_model(model))
}

pub fn model_from_json(text: &str) -> Result<PronyModel<f64>> {
    serde_json::from_str::<ModelRecord>(text)?.to_model()
}

pub fn signal_to_json(signal: &PiecewiseSignal<f64>) -> String {
    to_json(&SignalRecord::from_signal(signal))
}

pub fn signal_from_json(text: &str) -> Result<PiecewiseSignal<f64>> {
    serde_json::from_str::<SignalRecord>(text)?.to_signal()
}

pub fn samples_to_json(samples: &SampleSet<f64>) -> String {
    to_json(&SamplesRecord::from_samples(samples))
}

pub fn samples_from_json(text: &str) -> Result<SampleSet<f64>> {
    serde_json::from_str::<SamplesRecord>(text)?.to_samples()
}

pub fn reconstruction_to_json(result: &ReconstructionResult<f64>) -> String {
    to_json(&ReconstructionRecord::from_result(result))
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

/// `k re im` lines for `k = -M..=M`.
pub fn window_to_text(window: &CoefficientWindow<f64>) -> String {
    let m = window.bandwidth() as i64;
    let mut out = String::new();
    for k in -m..=m {
        let c = window.coefficient(k);
        writeln!(out, "{k} {:?} {:?}", c.re, c.im).expect("write to string");
    }
    out
}

/// Parses a window written by [`window_to_text`]. Blank lines and lines
/// starting with `#` are ignored; indices must run from `-M` to `M`.
/// The window is marked real when it is conjugate-symmetric.
pub fn window_from_text(text: &str) -> Result<CoefficientWindow<f64>> {
    let mut coeffs = Vec::new();
    let mut expected: Option<i64> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| PronyError::Parse(format!("line {}: {what}", lineno + 1));
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad("expected `k re im`"));
        }
        let k: i64 = fields[0].parse().map_err(|_| bad("bad index"))?;
        let re: f64 = fields[1].parse().map_err(|_| bad("bad real part"))?;
        let im: f64 = fields[2].parse().map_err(|_| bad("bad imaginary part"))?;
        match expected {
            None if k > 0 => return Err(bad("first index must be -M")),
            Some(e) if k != e => return Err(bad("indices must be consecutive")),
            _ => {}
        }
        expected = Some(k + 1);
        coeffs.push(Complex::new(re, im));
    }
    let first = match (expected, coeffs.len()) {
        (Some(next), n) => next - n as i64,
        _ => return Err(PronyError::Parse("empty window".into())),
    };
    if first + coeffs.len() as i64 - 1 != -first {
        return Err(PronyError::Parse("indices must run from -M to M".into()));
    }
    match CoefficientWindow::new(coeffs.clone(), true) {
        Ok(w) => Ok(w),
        Err(_) => CoefficientWindow::new(coeffs, false),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| PronyError::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| PronyError::Io(format!("{}: {e}", path.display())))
}
