//! Bundled analytic profiles and CSV profile files.

use std::path::Path;

use horofourier_core::kernels::KTypeIndex;
use horofourier_core::transforms::{family_profile, RadialProfile, SpectralProfile};
use num_complex::Complex64;

use crate::error::CliError;

/// `sech{2a}_n{n}` names the family member `tanh^{|n|} t · sech^{2a} t` of type `n`.
pub fn bundled(name: &str) -> Result<RadialProfile, CliError> {
    let parsed = name.strip_prefix("sech").and_then(|rest| {
        let (power, n) = rest.split_once("_n")?;
        let power: u32 = power.parse().ok()?;
        let n: i32 = n.parse().ok()?;
        (3..=40).contains(&power).then_some((f64::from(power) / 2.0, n))
    });
    let Some((a, n)) = parsed else {
        return Err(CliError::Usage(format!(
            "unknown profile '{name}' (expected sech<2a>_n<n>, e.g. {})",
            bundled_names().join(", ")
        )));
    };
    Ok(family_profile(n, a)?)
}

pub fn bundled_names() -> Vec<String> {
    let mut names = Vec::new();
    for power in [4, 6] {
        for n in 0..=3 {
            names.push(format!("sech{power}_n{n}"));
        }
    }
    names
}

/// Header metadata (`# key = value` lines) plus the CSV body.
struct CsvFile {
    meta: Vec<(String, String)>,
    rows: Vec<Vec<f64>>,
}

fn malformed(path: &Path, what: impl std::fmt::Display) -> CliError {
    CliError::Invariant(format!("malformed input {}: {what}", path.display()))
}

fn read_csv(path: &Path, required: &[&str]) -> Result<CsvFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| malformed(path, e))?;
    let mut meta = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.trim_start().strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| malformed(path, e))?.clone();
    let columns: Vec<usize> = required
        .iter()
        .map(|c| {
            header
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| malformed(path, format!("missing column '{c}'")))
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| malformed(path, e))?;
        let row = columns
            .iter()
            .map(|&c| {
                let field = rec.get(c).unwrap_or("");
                field
                    .parse::<f64>()
                    .map_err(|_| malformed(path, format!("row {}: '{field}' is not a number", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(malformed(path, "no data rows"));
    }
    Ok(CsvFile { meta, rows })
}

impl CsvFile {
    fn meta<T: std::str::FromStr>(&self, key: &str, path: &Path) -> Result<Option<T>, CliError> {
        match self.meta.iter().find(|(k, _)| k == key) {
            None => Ok(None),
            Some((_, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| malformed(path, format!("metadata '{key} = {v}' does not parse"))),
        }
    }
}

/// Radial profile from a CSV with columns `t, value_re, value_im`. The type
/// `n` and decay rate `kappa` come from `# n = ...` and `# kappa = ...`
/// lines unless given explicitly.
pub fn read_radial(path: &Path, n: Option<i32>, kappa: Option<f64>) -> Result<RadialProfile, CliError> {
    let file = read_csv(path, &["t", "value_re", "value_im"])?;
    let n = match n {
        Some(n) => n,
        None => file.meta("n", path)?.unwrap_or(0),
    };
    let kappa = match kappa {
        Some(k) => k,
        None => file
            .meta("kappa", path)?
            .ok_or_else(|| malformed(path, "decay rate missing (add '# kappa = ...' or pass --kappa)"))?,
    };
    let samples = file.rows.iter().map(|r| (r[0], Complex64::new(r[1], r[2]))).collect();
    RadialProfile::from_samples(KTypeIndex::new(n), kappa, samples).map_err(|e| match e {
        horofourier_core::Error::Invariant(m) => CliError::Invariant(format!("{}: {m}", path.display())),
        other => other.into(),
    })
}

/// Spectral samples from a CSV with columns `lambda_re, lambda_im, h_re, h_im`
/// on the nodes of `rule` (as written by `transform forward`).
pub fn read_spectral(
    path: &Path,
    n: Option<i32>,
    rule: &horofourier_core::quadrature::QuadratureRule,
    epsilon: f64,
) -> Result<SpectralProfile, CliError> {
    let file = read_csv(path, &["lambda_re", "lambda_im", "h_re", "h_im"])?;
    let n = match n {
        Some(n) => n,
        None => file.meta("n", path)?.unwrap_or(0),
    };
    if file.rows.len() != rule.len()
        || file
            .rows
            .iter()
            .zip(rule.nodes())
            .any(|(r, &l)| (r[0] - l).abs() > 1e-12 * l.abs().max(1.0) || r[1] != 0.0)
    {
        return Err(malformed(
            path,
            format!("spectral samples must lie on the {} real λ nodes of the configured grid", rule.len()),
        ));
    }
    let values = file.rows.iter().map(|r| Complex64::new(r[2], r[3])).collect();
    SpectralProfile::from_samples(
        KTypeIndex::new(n),
        epsilon,
        rule.nodes().to_vec(),
        Some(rule.weights().to_vec()),
        values,
    )
    .map_err(|e| match e {
        horofourier_core::Error::Invariant(m) => CliError::Invariant(format!("{}: {m}", path.display())),
        other => other.into(),
    })
}
