//! Parameter grids: `start:stop:step` ranges and comma-separated lists.

use std::fmt;
use std::str::FromStr;

const ENDPOINT_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, PartialEq)]
pub struct GridError(String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridError {}

fn number(s: &str) -> Result<f64, GridError> {
    let x: f64 = s.trim().parse().map_err(|_| GridError(format!("`{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(GridError(format!("`{s}` is not finite")));
    }
    Ok(x)
}

fn range(spec: &str, out: &mut Vec<f64>) -> Result<(), GridError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(GridError(format!("`{spec}` should be start:stop:step")));
    };
    let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
    if step <= 0.0 {
        return Err(GridError(format!("step in `{spec}` must be positive")));
    }
    if stop < start {
        return Err(GridError(format!("`{spec}` is empty")));
    }
    let n = ((stop - start) / step + ENDPOINT_SLACK).floor() as usize;
    out.extend((0..=n).map(|i| start + i as f64 * step));
    // Land exactly on the endpoint when the step divides the interval.
    if let Some(last) = out.last_mut() {
        if (*last - stop).abs() <= ENDPOINT_SLACK * stop.abs().max(1.0) {
            *last = stop;
        }
    }
    Ok(())
}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for item in s.split(',') {
            if item.contains(':') {
                range(item, &mut out)?;
            } else {
                out.push(number(item)?);
            }
        }
        if out.is_empty() {
            return Err(GridError("empty grid".into()));
        }
        Ok(Grid(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_ranges() {
        let g: Grid = "0:1:0.1".parse().unwrap();
        assert_eq!(g.values().len(), 11);
        assert_eq!(*g.values().last().unwrap(), 1.0);
        let g: Grid = "0:1:0.3".parse().unwrap();
        assert_eq!(g.values().len(), 4);
    }

    #[test]
    fn lists_and_mixtures() {
        let g: Grid = "10,50,200".parse().unwrap();
        assert_eq!(g.values(), &[10.0, 50.0, 200.0]);
        let g: Grid = "0:1:0.5,3".parse().unwrap();
        assert_eq!(g.values(), &[0.0, 0.5, 1.0, 3.0]);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "a", "1:0:0.1", "0:1:0", "0:1", "nan", "1,,2"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }
}
