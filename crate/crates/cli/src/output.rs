use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// `x` with 17 significant digits in C `%.16e` form (`1.0000000000000000e+00`).
pub fn fmt_e(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.16e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// CSV sink: a file under the output directory, or stdout.
pub struct Table {
    writer: csv::Writer<Box<dyn Write>>,
    path: Option<PathBuf>,
}

impl Table {
    pub fn create(out: Option<&Path>, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let (sink, path): (Box<dyn Write>, _) = match out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(name);
                (Box::new(io::BufWriter::new(File::create(&path)?)), Some(path))
            }
            None => (Box::new(io::stdout()), None),
        };
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(sink);
        writer.write_record(header)?;
        Ok(Self { writer, path })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    /// Flushes and returns the file written, if any.
    pub fn finish(mut self) -> Result<Option<PathBuf>, CliError> {
        self.writer.flush()?;
        Ok(self.path)
    }
}
