use std::path::Path;

use nalgebra::DVector;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mesh::{generate, parse_obj, parse_off, FieldSpec, SimplicialComplex};

/// Loads `builtin:<name>` or an OFF/OBJ file.
pub fn load_mesh(spec: &str) -> Result<SimplicialComplex> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return generate::builtin(name);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::InvalidArgument(format!("cannot read mesh '{spec}': {e}")))?;
    let ext = Path::new(spec)
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("obj") => parse_obj(&text),
        _ => parse_off(&text),
    }
}

fn numbers(args: &str) -> Result<Vec<f64>> {
    args.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!("invalid number '{s}' in field preset"))
            })
        })
        .collect()
}

/// Parses a field description: inline JSON, a JSON file, or a preset
/// (`zero`, `random[:seed]`, `constant:a,b[,c]`, `rotational[:rate]`,
/// `radial[:rate]`). `random` without a seed uses `seed`.
pub fn parse_field(spec: &str, seed: u64) -> Result<FieldSpec> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        return Ok(serde_json::from_str(spec)?);
    }
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| Error::InvalidArgument(format!("cannot read field '{spec}': {e}")))?;
        return Ok(serde_json::from_str(&text)?);
    }
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let rate = || -> Result<f64> {
        if args.is_empty() {
            Ok(1.0)
        } else {
            Ok(numbers(args)?[0])
        }
    };
    match name {
        "zero" => Ok(FieldSpec::Zero),
        "random" => {
            let seed = if args.is_empty() {
                seed
            } else {
                args.parse()
                    .map_err(|_| Error::InvalidArgument(format!("invalid seed '{args}'")))?
            };
            Ok(FieldSpec::Random {
                seed,
                amplitude: 1.0,
            })
        }
        "constant" => Ok(FieldSpec::Constant {
            vector: numbers(args)?,
        }),
        "rotational" | "tangent" => Ok(FieldSpec::Rotational {
            center: vec![0.0; 3],
            axis: vec![0.0, 0.0, 1.0],
            rate: rate()?,
        }),
        "radial" => Ok(FieldSpec::Radial {
            center: vec![0.0; 3],
            rate: rate()?,
        }),
        _ => Err(Error::InvalidArgument(format!("unknown field '{spec}'"))),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FormFile {
    Values(Vec<f64>),
    Object { values: Vec<f64> },
}

/// Reads a cochain from a JSON array or `{"values": [...]}`.
pub fn load_form(path: &str, expected: usize) -> Result<DVector<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read form '{path}': {e}")))?;
    let values = match serde_json::from_str::<FormFile>(&text) {
        Ok(FormFile::Values(v)) | Ok(FormFile::Object { values: v }) => v,
        Err(e) => {
            return Err(Error::InvalidArgument(format!(
                "malformed form JSON in '{path}': {e}"
            )))
        }
    };
    if values.len() != expected {
        return Err(Error::SizeMismatch {
            what: "form",
            expected,
            got: values.len(),
        });
    }
    Ok(DVector::from_vec(values))
}
