//! Result files. CSV files open with a `# config_digest=… seed=…` comment
//! line; JSON reports carry the same two values as top-level fields.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub struct Sink {
    dir: PathBuf,
    digest: String,
    seed: u64,
    written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config_digest: &'a str,
    seed: u64,
    #[serde(flatten)]
    report: &'a T,
}

/// Shortest round-trip form, in exponent notation for very small or large
/// magnitudes.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Empty for missing values.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

impl Sink {
    pub fn new(dir: &Path, digest: String, seed: u64) -> Self {
        Sink {
            dir: dir.to_path_buf(),
            digest,
            seed,
            written: Vec::new(),
        }
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn create(&mut self, name: &str) -> Result<fs::File, CliError> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        let file = fs::File::create(&path)?;
        self.written.push(path);
        Ok(file)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut buf = Vec::new();
        writeln!(buf, "# config_digest={} seed={}", self.digest, self.seed)?;
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            w.write_record(header)?;
            for row in rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        self.create(&format!("{name}.csv"))?.write_all(&buf)?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<(), CliError> {
        let env = Envelope {
            config_digest: &self.digest,
            seed: self.seed,
            report,
        };
        let mut text = serde_json::to_string_pretty(&env)?;
        text.push('\n');
        self.create(&format!("{name}.json"))?.write_all(text.as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_comment_header_and_lf() {
        let dir = tempfile::tempdir().unwrap();
        let mut sink = Sink::new(dir.path(), "abc".into(), 7);
        sink.csv("t", &["a", "b"], &[vec![num(0.5), "x,y".into()]]).unwrap();
        let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "# config_digest=abc seed=7\na,b\n0.5,\"x,y\"\n");
        assert_eq!(num(7.5e-15), "7.5e-15");
        assert_eq!(num(1.0), "1.0");
    }

    #[test]
    fn json_envelope() {
        #[derive(Serialize)]
        struct R {
            value: f64,
        }
        let dir = tempfile::tempdir().unwrap();
        let mut sink = Sink::new(dir.path(), "abc".into(), 7);
        sink.json("r", &R { value: 1.5 }).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
        assert_eq!(v["config_digest"], "abc");
        assert_eq!(v["seed"], 7);
        assert_eq!(v["value"], 1.5);
    }
}
