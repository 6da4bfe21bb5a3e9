//! CSV and JSON formats: sampled functions as `x,re,im` rows (the `im`
//! column optional on input), spectral functions as
//! `{"params":{"alpha","beta"},"lambdas","re","im"}`.

use std::io::{Read, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{SampledFunction, SpectralFunction};
use crate::error::{Error, Result};
use crate::params::JacobiParams;

#[derive(Debug, Deserialize)]
struct Row {
    x: f64,
    re: f64,
    #[serde(default)]
    im: Option<f64>,
}

/// Reads grid data; the result is cubic-on-grid and zero outside it.
pub fn read_sampled_csv<R: Read>(reader: R) -> Result<SampledFunction<f64>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(reader);
    let headers = rd.headers()?.clone();
    if headers.get(0) != Some("x") || headers.get(1) != Some("re") {
        return Err(Error::Format(format!("expected header x,re[,im], got {:?}", headers)));
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for row in rd.deserialize::<Row>() {
        let row = row?;
        xs.push(row.x);
        vs.push(Complex::new(row.re, row.im.unwrap_or(0.0)));
    }
    SampledFunction::from_samples(xs, vs)
}

/// Writes `x,re,im` rows at the function's grid.
pub fn write_sampled_csv<W: Write>(writer: W, f: &SampledFunction<f64>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(writer);
    wr.write_record(["x", "re", "im"])?;
    for (x, v) in f.grid().iter().zip(f.values()) {
        wr.write_record([x.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

/// Serialized form of a [`SpectralFunction`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralFunctionDto {
    pub params: JacobiParams<f64>,
    pub lambdas: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&SpectralFunction<f64>> for SpectralFunctionDto {
    fn from(g: &SpectralFunction<f64>) -> Self {
        Self {
            params: *g.params(),
            lambdas: g.lambdas().to_vec(),
            re: g.values().iter().map(|v| v.re).collect(),
            im: g.values().iter().map(|v| v.im).collect(),
        }
    }
}

impl TryFrom<SpectralFunctionDto> for SpectralFunction<f64> {
    type Error = Error;

    fn try_from(d: SpectralFunctionDto) -> Result<Self> {
        if d.re.len() != d.lambdas.len() || d.im.len() != d.lambdas.len() {
            return Err(Error::Format("lambdas, re and im must have equal lengths".into()));
        }
        let values = d.re.iter().zip(&d.im).map(|(&r, &i)| Complex::new(r, i)).collect();
        SpectralFunction::new(d.params, d.lambdas, values)
    }
}

pub fn read_spectral_json<R: Read>(reader: R) -> Result<SpectralFunction<f64>> {
    let dto: SpectralFunctionDto = serde_json::from_reader(reader)?;
    dto.try_into()
}

pub fn write_spectral_json<W: Write>(writer: W, g: &SpectralFunction<f64>) -> Result<()> {
    serde_json::to_writer_pretty(writer, &SpectralFunctionDto::from(g))?;
    Ok(())
}
