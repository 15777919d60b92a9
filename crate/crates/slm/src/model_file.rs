//! `.slm` model files: versioned JSON holding the hyperparameters, the intercept
//! fit and the full training set (prediction smooths against it).
//!
//! Every float is written with 17 significant digits, so a save → load → save cycle
//! reproduces the text byte for byte.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use slm_core::logistic::LogisticFit;
use slm_core::solver::SolverOptions;
use slm_core::{MixedDataset, MixedObservation, SlmModel};

use crate::error::DataError;
use crate::ingest::Encoding;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EtaRepr {
    a0: f64,
    a: Vec<f64>,
    lambda: f64,
    converged: bool,
    final_gap: f64,
    iterations: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverRepr {
    tol: f64,
    max_iter: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservationRepr {
    z: Vec<f64>,
    u: Vec<u8>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainRepr {
    p: usize,
    d: usize,
    class1: Vec<ObservationRepr>,
    class2: Vec<ObservationRepr>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr {
    format_version: u64,
    theta: f64,
    lambda_beta: f64,
    eta: EtaRepr,
    solver: SolverRepr,
    train: TrainRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    encoding: Option<Encoding>,
}

/// Pretty JSON with fixed 17-significant-digit floats.
struct FixedDigits(PrettyFormatter<'static>);

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn observations(obs: &[MixedObservation]) -> Vec<ObservationRepr> {
    obs.iter()
        .map(|o| ObservationRepr {
            z: o.z.clone(),
            u: o.u.clone(),
        })
        .collect()
}

/// Serializes `model` (its direction cache is not saved) and the optional encoding.
pub fn save_model(model: &SlmModel, encoding: Option<&Encoding>) -> String {
    let fit = model.eta_fit();
    let train = model.train();
    let repr = ModelRepr {
        format_version: FORMAT_VERSION,
        theta: model.theta(),
        lambda_beta: model.lambda_beta(),
        eta: EtaRepr {
            a0: fit.a0,
            a: fit.a.clone(),
            lambda: fit.lambda,
            converged: fit.converged,
            final_gap: fit.final_gap,
            iterations: fit.iterations,
        },
        solver: SolverRepr {
            tol: model.solver_options().tol,
            max_iter: model.solver_options().max_iter,
        },
        train: TrainRepr {
            p: train.p(),
            d: train.d(),
            class1: observations(train.class1()),
            class2: observations(train.class2()),
        },
        encoding: encoding.cloned(),
    };
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits(PrettyFormatter::new()));
    repr.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON output is UTF-8")
}

/// Parses a model file; the version is checked before anything else.
pub fn load_model(text: &str) -> Result<(SlmModel, Option<Encoding>), DataError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| DataError::ModelFile(e.to_string()))?;
    let version = value
        .get("format_version")
        .ok_or_else(|| DataError::ModelFile("missing field `format_version`".into()))?
        .as_u64()
        .ok_or_else(|| DataError::ModelFile("`format_version` must be a nonnegative integer".into()))?;
    if version != FORMAT_VERSION {
        return Err(DataError::Version {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let repr: ModelRepr = serde_json::from_str(text).map_err(|e| DataError::ModelFile(e.to_string()))?;
    let to_obs = |v: Vec<ObservationRepr>| {
        v.into_iter()
            .map(|o| MixedObservation::new(o.z, o.u))
            .collect::<Result<Vec<_>, _>>()
    };
    let train = MixedDataset::with_dims(
        to_obs(repr.train.class1)?,
        to_obs(repr.train.class2)?,
        repr.train.p,
        repr.train.d,
    )?;
    if let Some(enc) = &repr.encoding {
        if enc.p() != train.p() || enc.d() != train.d() {
            return Err(DataError::ModelFile(
                "encoding does not match the training widths".into(),
            ));
        }
    }
    let eta = LogisticFit {
        a0: repr.eta.a0,
        a: repr.eta.a,
        lambda: repr.eta.lambda,
        converged: repr.eta.converged,
        final_gap: repr.eta.final_gap,
        iterations: repr.eta.iterations,
    };
    let model = SlmModel::new(train, repr.theta, repr.lambda_beta, eta)?.with_solver_options(SolverOptions {
        tol: repr.solver.tol,
        max_iter: repr.solver.max_iter,
        warm_start: None,
    });
    Ok((model, repr.encoding))
}
