//! Approximation-ratio and throughput measurements over prefix fractions.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lz::lz_parse;
use crate::relz::{relz_parse, RelzConfig};
use crate::text::Text;

pub const CSV_HEADER: &str = "input,n,ell_frac,z,zhat,ratio,sec_per_mib";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub input: String,
    pub n: usize,
    pub ell_frac: f64,
    pub z: usize,
    pub zhat: usize,
    pub ratio: f64,
    pub sec_per_mib: f64,
}

/// Runs ReLZ once per fraction with `ell = round(frac * n)` and compares
/// against exact LZ.
pub fn bench_text(input: &str, text: &Text, fractions: &[f64]) -> Result<Vec<BenchRow>> {
    if let Some(f) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::usage(format!("prefix fraction {f} outside [0, 1]")));
    }
    let n = text.len();
    let z = lz_parse(text).len();
    let mib = n as f64 / (1u64 << 20) as f64;
    fractions
        .iter()
        .map(|&ell_frac| {
            let ell = (ell_frac * n as f64).round() as usize;
            let t0 = Instant::now();
            let zhat = relz_parse(text, &RelzConfig::with_ell(ell))?.parsing.len();
            let secs = t0.elapsed().as_secs_f64();
            Ok(BenchRow {
                input: input.to_owned(),
                n,
                ell_frac,
                z,
                zhat,
                ratio: if z == 0 { 1.0 } else { zhat as f64 / z as f64 },
                sec_per_mib: if n == 0 { 0.0 } else { secs / mib },
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:.6},{:.6}",
            csv_field(&r.input),
            r.n,
            r.ell_frac,
            r.z,
            r.zhat,
            r.ratio,
            r.sec_per_mib
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
