use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    Linear,
    #[default]
    MonotoneCubic,
}

/// A CDF known at finitely many abscissae.
///
/// A leading `(0, 0)` node is implied when the first abscissa is positive.
/// Beyond the last node the CDF stays at its final value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
    // Hermite slopes; only populated for monotone-cubic interpolation.
    slopes: Vec<f64>,
    interpolation: Interpolation,
}

impl TabulatedCdf {
    pub fn new(points: &[(f64, f64)], interpolation: Interpolation) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidTable {
                row: points.len(),
                reason: "at least two points are required".into(),
            });
        }
        let mut xs = Vec::with_capacity(points.len() + 1);
        let mut fs = Vec::with_capacity(points.len() + 1);
        for (row, &(x, f)) in points.iter().enumerate() {
            if !x.is_finite() || !f.is_finite() {
                return Err(Error::InvalidTable {
                    row,
                    reason: format!("non-finite value ({x}, {f})"),
                });
            }
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidTable {
                    row,
                    reason: format!("F = {f} is outside [0, 1]"),
                });
            }
            if row == 0 && x < 0.0 {
                return Err(Error::InvalidTable {
                    row,
                    reason: format!("support starts at 0 but x = {x}"),
                });
            }
            if let (Some(&px), Some(&pf)) = (xs.last(), fs.last()) {
                if x <= px {
                    return Err(Error::InvalidTable {
                        row,
                        reason: format!("x must be strictly increasing ({px} then {x})"),
                    });
                }
                if f < pf {
                    return Err(Error::InvalidTable {
                        row,
                        reason: format!("F must be nondecreasing ({pf} then {f})"),
                    });
                }
            }
            xs.push(x);
            fs.push(f);
        }
        if xs[0] > 0.0 {
            xs.insert(0, 0.0);
            fs.insert(0, 0.0);
        }
        let slopes = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::MonotoneCubic => fritsch_carlson_slopes(&xs, &fs),
        };
        Ok(Self {
            xs,
            fs,
            slopes,
            interpolation,
        })
    }

    /// Parses a two-column CSV with header `x,F`.
    pub fn from_csv<R: Read>(reader: R, interpolation: Interpolation) -> Result<Self> {
        let points = read_two_column_csv(reader, ("x", "F"))?;
        Self::new(&points, interpolation)
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.fs.iter().copied())
    }

    pub fn last_x(&self) -> f64 {
        *self.xs.last().expect("at least two nodes")
    }

    pub fn final_value(&self) -> f64 {
        *self.fs.last().expect("at least two nodes")
    }

    fn segment(&self, x: f64) -> usize {
        // index i with xs[i] <= x < xs[i+1]
        self.xs.partition_point(|&v| v <= x).saturating_sub(1).min(self.xs.len() - 2)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= self.last_x() {
            return self.final_value();
        }
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (f0, f1) = (self.fs[i], self.fs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let v = match self.interpolation {
            Interpolation::Linear => f0 + (f1 - f0) * t,
            Interpolation::MonotoneCubic => {
                let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
                let t2 = t * t;
                let t3 = t2 * t;
                (2.0 * t3 - 3.0 * t2 + 1.0) * f0
                    + (t3 - 2.0 * t2 + t) * h * m0
                    + (-2.0 * t3 + 3.0 * t2) * f1
                    + (t3 - t2) * h * m1
            }
        };
        v.clamp(f0.min(f1), f0.max(f1))
    }

    pub fn tail(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// Derivative of the interpolant (right derivative at nodes).
    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 || x >= self.last_x() {
            return 0.0;
        }
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (f0, f1) = (self.fs[i], self.fs[i + 1]);
        let h = x1 - x0;
        match self.interpolation {
            Interpolation::Linear => (f1 - f0) / h,
            Interpolation::MonotoneCubic => {
                let t = (x - x0) / h;
                let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
                let t2 = t * t;
                let d = (6.0 * t2 - 6.0 * t) * (f0 - f1) / h
                    + (3.0 * t2 - 4.0 * t + 1.0) * m0
                    + (3.0 * t2 - 2.0 * t) * m1;
                d.max(0.0)
            }
        }
    }
}

fn fritsch_carlson_slopes(xs: &[f64], fs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let secants: Vec<f64> = (0..n - 1)
        .map(|i| (fs[i + 1] - fs[i]) / (xs[i + 1] - xs[i]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = secants[0];
    m[n - 1] = secants[n - 2];
    for i in 1..n - 1 {
        m[i] = if secants[i - 1] * secants[i] <= 0.0 {
            0.0
        } else {
            0.5 * (secants[i - 1] + secants[i])
        };
    }
    for i in 0..n - 1 {
        let d = secants[i];
        if d == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / d;
        let b = m[i + 1] / d;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * d;
            m[i + 1] = tau * b * d;
        }
    }
    m
}

/// Reads a strict two-column numeric CSV with the given header names.
pub fn read_two_column_csv<R: Read>(reader: R, header: (&str, &str)) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.len() != 2 || &headers[0] != header.0 || &headers[1] != header.1 {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{},{}`, found `{}`",
                header.0,
                header.1,
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| Error::Parse {
                line,
                message: format!("not a number: {s:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite value {s:?}"),
                });
            }
            Ok(v)
        };
        out.push((parse(&record[0])?, parse(&record[1])?));
    }
    Ok(out)
}
