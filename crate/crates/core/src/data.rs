//! Plain-text datasets and the two bundled reliability samples.

use crate::error::{Error, Result};
use crate::fitting::Sample;

const INSULATING_FLUID: &str = include_str!("../../../fixtures/insulating_fluid_34kv.txt");
const AIR_CONDITIONING: &str = include_str!("../../../fixtures/air_conditioning.txt");

/// Parses one value per line.
///
/// Blank lines and lines starting with `#` are skipped. CSV input is accepted:
/// only the first field of each line is read, and the first content line may
/// be a non-numeric header.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_content = false;
    let mut bad = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split(',').next().unwrap_or("").trim().trim_matches('"');
        let first = !seen_content;
        seen_content = true;
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                if v <= 0.0 {
                    bad.push(format!("{v} (line {})", idx + 1));
                }
                values.push(v);
            }
            _ if first && looks_like_header(field) => {}
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected a finite number, found '{field}'"),
                })
            }
        }
    }
    if values.is_empty() {
        return Err(Error::domain("dataset contains no values"));
    }
    if !bad.is_empty() {
        return Err(Error::domain(format!(
            "dataset values must be positive; offending: {}",
            bad.join(", ")
        )));
    }
    Ok(values)
}

fn looks_like_header(field: &str) -> bool {
    field.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && !matches!(field.to_ascii_lowercase().as_str(), "nan" | "inf" | "infinity")
}

pub fn parse_sample(text: &str, label: impl Into<String>) -> Result<Sample> {
    Sample::new(parse_values(text)?, label)
}

/// Times to breakdown (minutes) of an insulating fluid at 34 kV; n = 19.
pub fn insulating_fluid() -> Sample {
    parse_sample(INSULATING_FLUID, "insulating_fluid_34kv").expect("bundled fixture parses")
}

/// Failure times (hours) of an aircraft air-conditioning system; n = 30.
pub fn air_conditioning() -> Sample {
    parse_sample(AIR_CONDITIONING, "air_conditioning").expect("bundled fixture parses")
}
