//! Value grids given as `x` or `a:b:steps`, with `pi` accepted in numbers.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::CliError;

/// Parses `1.5`, `pi`, `pi/4`, `2pi`, `3*pi/2`.
pub fn parse_number(text: &str) -> Result<f64, CliError> {
    let t = text.trim().to_ascii_lowercase();
    let bad = || CliError::Usage(format!("cannot parse number '{text}'"));
    let Some(pos) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let coeff = t[..pos].trim_end_matches('*');
    let coeff = if coeff.is_empty() {
        1.0
    } else if coeff == "-" {
        -1.0
    } else {
        coeff.parse::<f64>().map_err(|_| bad())?
    };
    let rest = &t[pos + 2..];
    let denom = match rest.strip_prefix('/') {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(coeff * PI / denom)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl FromStr for Grid {
    type Err = CliError;

    /// `steps` points from `a` to `b` inclusive; `steps = 1` gives `[a]`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [x] => Ok(Grid(vec![parse_number(x)?])),
            [a, b, steps] => {
                let (a, b) = (parse_number(a)?, parse_number(b)?);
                let steps: usize = steps
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad step count in grid '{s}'")))?;
                if steps == 0 {
                    return Err(CliError::Usage(format!("grid '{s}' is empty")));
                }
                if steps == 1 {
                    return Ok(Grid(vec![a]));
                }
                let h = (b - a) / (steps - 1) as f64;
                Ok(Grid(
                    (0..steps)
                        .map(|i| if i == steps - 1 { b } else { a + h * i as f64 })
                        .collect(),
                ))
            }
            _ => Err(CliError::Usage(format!(
                "grid '{s}' must be a number or a:b:steps"
            ))),
        }
    }
}
