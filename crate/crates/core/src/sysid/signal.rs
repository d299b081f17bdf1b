use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

pub const SIGNAL_CSV_HEADER: &str = "t_s,value";
/// Two-channel identification record.
pub const IO_CSV_HEADER: &str = "t_s,input,output";

/// Uniformly sampled signal starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl Signal {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("sample step must be positive, got {dt}")));
        }
        Ok(Self { dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { dt: self.dt, values: self.values.iter().map(|v| a * v).collect() }
    }

    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.len().max(1) as f64).sqrt()
    }

    /// `max |v|`.
    pub fn full_scale(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{SIGNAL_CSV_HEADER}\n");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{},{}\n", self.time(i), v));
        }
        s
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let cols = read_columns(text, SIGNAL_CSV_HEADER)?;
        Self::new(uniform_step(&cols[0])?, cols[1].clone())
    }
}

/// Input and output sharing one time column.
pub fn io_to_csv(input: &Signal, output: &Signal) -> String {
    let mut s = format!("{IO_CSV_HEADER}\n");
    for (i, (u, y)) in input.values.iter().zip(&output.values).enumerate() {
        s.push_str(&format!("{},{},{}\n", input.time(i), u, y));
    }
    s
}

pub fn io_from_csv_str(text: &str) -> Result<(Signal, Signal)> {
    let cols = read_columns(text, IO_CSV_HEADER)?;
    let dt = uniform_step(&cols[0])?;
    Ok((Signal::new(dt, cols[1].clone())?, Signal::new(dt, cols[2].clone())?))
}

fn read_columns(text: &str, header: &str) -> Result<Vec<Vec<f64>>> {
    let width = header.split(',').count();
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let got = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if got != header {
        return Err(Error::Parse { line: 1, msg: format!("header is `{got}`, expected `{header}`") });
    }
    let mut cols = vec![Vec::new(); width];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != width {
            return Err(Error::Parse { line, msg: format!("expected {width} fields, got {}", rec.len()) });
        }
        for (k, f) in rec.iter().enumerate() {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("`{f}` is not a number") })?;
            if !v.is_finite() {
                return Err(Error::Parse { line, msg: format!("`{f}` is not finite") });
            }
            cols[k].push(v);
        }
    }
    Ok(cols)
}

fn uniform_step(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: t.len() });
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Grid("time column is not increasing".into()));
    }
    let first = t[1] - t[0];
    for (i, w) in t.windows(2).enumerate() {
        if ((w[1] - w[0]) - first).abs() > 1e-6 * first.abs() {
            // row i + 1 is data line i + 3 counting the header
            return Err(Error::Grid(format!("line {}: time step is not uniform", i + 3)));
        }
    }
    Ok(dt)
}

/// Adds zero-mean Gaussian noise with standard deviation `sigma`.
pub fn add_white_noise(signal: &Signal, sigma: f64, seed: u64) -> Result<Signal> {
    let n = Normal::new(0.0, sigma).map_err(|e| Error::Domain(format!("noise sigma {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Signal::new(signal.dt, signal.values.iter().map(|v| v + n.sample(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let s = Signal::new(0.001, vec![0.0, 1.5, -2.0]).unwrap();
        let back = Signal::from_csv_str(&s.to_csv()).unwrap();
        assert_eq!(back.values, s.values);
        assert!((back.dt - 0.001).abs() < 1e-15);
    }

    #[test]
    fn nonuniform_time_names_the_line() {
        let e = Signal::from_csv_str("t_s,value\n0,1\n0.001,2\n0.003,3\n").unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
    }

    #[test]
    fn noise_is_seeded() {
        let s = Signal::new(0.001, vec![0.0; 100]).unwrap();
        assert_eq!(add_white_noise(&s, 0.1, 3).unwrap(), add_white_noise(&s, 0.1, 3).unwrap());
        assert_ne!(add_white_noise(&s, 0.1, 3).unwrap(), add_white_noise(&s, 0.1, 4).unwrap());
    }
}
