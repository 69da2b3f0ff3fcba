//! Report files: canonical JSON and a spectrum CSV.

use std::path::{Path, PathBuf};

use twistcohom::BettiReport;

use crate::CliError;

/// Overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "TWISTCOHOM_OUT_DIR";

pub const CSV_HEADER: [&str; 4] = ["mode", "degree", "index", "eigenvalue"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// One row per spectrum entry; modes are written as space separated integers
/// and left empty for operators diagonalized as a whole.
pub fn spectrum_csv(report: &BettiReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for e in &report.spectra {
        let mode = e
            .mode
            .as_ref()
            .map(|m| m.iter().map(i32::to_string).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        w.write_record([
            mode,
            e.degree.to_string(),
            e.index.to_string(),
            e.eigenvalue.to_string(),
        ])
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

pub fn render(report: &BettiReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(report.to_canonical_json() + "\n"),
        Format::Csv => spectrum_csv(report),
    }
}

/// Writes `<dir>/<stem>.json` or `.csv` and returns the path.
pub fn emit(report: &BettiReport, format: Format, dir: &Path, stem: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let path = dir.join(format!("{stem}.{ext}"));
    std::fs::write(&path, render(report, format)?)?;
    Ok(path)
}

/// The environment variable wins over the configured directory.
pub fn output_dir(configured: &Path) -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| configured.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;
    use twistcohom::SpectrumEntry;

    #[test]
    fn empty_spectrum_is_header_only() {
        let r = BettiReport::new("simplicial", vec![1, 0, 1], 1e-8);
        assert_eq!(spectrum_csv(&r).unwrap(), "mode,degree,index,eigenvalue\n");
    }

    #[test]
    fn rows_follow_entries() {
        let mut r = BettiReport::new("torus", vec![1, 2, 1], 1e-8);
        r.spectra.push(SpectrumEntry {
            mode: Some(vec![-1, 0]),
            degree: 1,
            index: 0,
            eigenvalue: 0.25,
        });
        r.spectra.push(SpectrumEntry {
            mode: None,
            degree: 0,
            index: 3,
            eigenvalue: 1e-20,
        });
        let text = spectrum_csv(&r).unwrap();
        assert_eq!(text.lines().nth(1), Some("-1 0,1,0,0.25"));
        assert_eq!(text.lines().nth(2), Some(",0,3,0.00000000000000000001"));
    }
}
