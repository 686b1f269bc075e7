//! `x,value` CSV signals: one row per node, uniform spacing.

use std::io::{Read, Write};

use super::{DiscreteSignal, Grid, SignalError};

/// Relative tolerance on the spacing between consecutive `x` values.
pub const SPACING_RTOL: f64 = 1e-9;

pub fn read_signal_csv<R: Read>(reader: R) -> Result<DiscreteSignal, SignalError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
        return Err(SignalError::Csv {
            line: 1,
            msg: format!("expected header `x,value`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec?;
        if rec.len() != 2 {
            return Err(SignalError::Csv {
                line,
                msg: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| SignalError::Csv {
                    line,
                    msg: format!("not a finite decimal number: {s:?}"),
                })
        };
        xs.push(parse(&rec[0])?);
        vs.push(parse(&rec[1])?);
    }
    if xs.len() < 3 {
        return Err(SignalError::Csv {
            line: xs.len() + 1,
            msg: "need at least 3 nodes".into(),
        });
    }
    let n = xs.len() - 1;
    let (a, b) = (xs[0], xs[n]);
    let h = (b - a) / n as f64;
    for (i, w) in xs.windows(2).enumerate() {
        let line = i + 3;
        if w[1] <= w[0] {
            return Err(SignalError::Csv {
                line,
                msg: format!("x not strictly increasing: {} after {}", w[1], w[0]),
            });
        }
        if ((w[1] - w[0]) - h).abs() > SPACING_RTOL * h.abs() {
            return Err(SignalError::Csv {
                line,
                msg: format!("non-uniform spacing {} (expected {})", w[1] - w[0], h),
            });
        }
    }
    let grid = Grid::new(a, b, n)?;
    DiscreteSignal::new(grid, vs)
}

/// Writes shortest round-trip decimal representations, so reading the file
/// back reproduces every value bit for bit.
pub fn write_signal_csv<W: Write>(mut w: W, s: &DiscreteSignal) -> Result<(), SignalError> {
    writeln!(w, "x,value")?;
    for (x, v) in s.grid().nodes().zip(s.values()) {
        writeln!(w, "{x},{v}")?;
    }
    w.flush()?;
    Ok(())
}
