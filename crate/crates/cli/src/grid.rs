//! `start:stop:step` grids: points `start + k * step` for `k = 0, 1, ...`
//! while below `stop + step / 2`, so `stop` itself is included when the step
//! lands on it. A bare number is a one-point grid.

use crate::error::CliError;

/// Points are rounded to 12 decimals so that `0.1 + 2 * 0.02` prints as `0.14`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Invalid(format!("grid spec {spec:?}: {s:?} is not a number")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [one] => Ok(vec![num(one)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err(CliError::Invalid(format!("grid spec {spec:?}: step must be positive")));
            }
            if start > stop {
                return Err(CliError::Invalid(format!("grid spec {spec:?}: start exceeds stop")));
            }
            let count = ((stop - start) / step + 0.5).floor() as usize + 1;
            if count > 100_000 {
                return Err(CliError::Invalid(format!("grid spec {spec:?}: {count} points is too many")));
            }
            Ok((0..count)
                .map(|k| start + k as f64 * step)
                .filter(|&v| v < stop + step / 2.0)
                .map(|v| (v * 1e12).round() / 1e12)
                .collect())
        }
        _ => Err(CliError::Invalid(format!("grid spec {spec:?} is not start:stop:step"))),
    }
}

/// Comma-separated positive integers.
pub fn parse_list(spec: &str) -> Result<Vec<usize>, CliError> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| CliError::Invalid(format!("{s:?} in {spec:?} is not a positive integer")))
        })
        .collect()
}
