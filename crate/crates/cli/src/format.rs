use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Decimal rendering rounded to 12 significant digits, shortest form,
/// never in exponent notation. Non-finite values render empty.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return String::new();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("own output parses");
    let s = format!("{rounded}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// CSV file writer with LF line endings.
pub struct CsvOut {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        let inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(file));
        let mut out = Self { path: path.to_owned(), inner };
        out.row(header)?;
        Ok(out)
    }

    pub fn row<I, T>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.inner
            .write_record(fields)
            .map_err(|source| CliError::Csv { path: self.path.clone(), source })
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.inner
            .flush()
            .map_err(|source| CliError::Io { path: self.path.clone(), source })?;
        Ok(self.path)
    }
}
