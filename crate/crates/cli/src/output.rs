use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use gkp_channel::channel::{AveragedChannel, ProcessMatrix};
use num_complex::Complex64;
use serde::Serialize;

pub const CHANNEL_SCHEMA: &str = "gkplc-channel/1";
pub const WARNINGS_SCHEMA: &str = "gkplc-sweep-warnings/1";

/// Round-trip safe: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Entry {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadratureInfo {
    /// Gauss–Legendre points per axis; 0 when no syndrome average was taken.
    pub order: usize,
    pub est_error: Option<f64>,
}

/// Document written by `averaged`, `pure-loss` and `subtract`.
#[derive(Clone, Debug, Serialize)]
pub struct ChannelReport {
    pub schema: &'static str,
    pub beta: f64,
    pub gamma: f64,
    pub herald: String,
    /// `syndromes`, `outcomes` or `both`.
    pub average: &'static str,
    pub syndrome: Option<[f64; 2]>,
    pub method: &'static str,
    pub normalized: bool,
    pub trace_raw: f64,
    pub chi: [[Entry; 4]; 4],
    pub quadrature: QuadratureInfo,
    pub warning: Option<String>,
}

pub fn entries(chi: &ProcessMatrix) -> [[Entry; 4]; 4] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let z = chi.chi[(i, j)];
            Entry { re: z.re, im: z.im }
        })
    })
}

pub fn flat(chi: &ProcessMatrix) -> [Complex64; 16] {
    std::array::from_fn(|k| chi.chi[(k / 4, k % 4)])
}

/// Raw and normalized forms of a channel with its quadrature data.
pub struct Computed {
    pub raw: ProcessMatrix,
    pub normalized: ProcessMatrix,
    pub order: usize,
    pub est_error: Option<f64>,
    pub warning: Option<String>,
}

impl From<AveragedChannel> for Computed {
    fn from(a: AveragedChannel) -> Self {
        Self {
            raw: a.raw,
            normalized: a.normalized,
            order: a.order,
            est_error: a.est_error,
            warning: a.warning,
        }
    }
}

/// A file, or stdout when the path is absent or `-`.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => Ok(Box::new(BufWriter::new(File::create(p)?))),
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> io::Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    std::fs::write(path, text)
}

/// `dir/stem_suffix.ext` next to `path`.
pub fn companion(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn companions_sit_beside_the_main_file() {
        let p = Path::new("/tmp/out/sweep.csv");
        assert_eq!(companion(p, "argmin", "csv"), Path::new("/tmp/out/sweep_argmin.csv"));
        assert_eq!(companion(p, "warnings", "json"), Path::new("/tmp/out/sweep_warnings.json"));
    }
}
