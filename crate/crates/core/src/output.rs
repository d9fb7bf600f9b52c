//! CSV output: a `#` provenance line (version, config hash, seed), then a
//! header row and one record per row. UTF-8, LF line endings.

use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunHeader {
    pub experiment: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl RunHeader {
    pub fn new(experiment: &str, resolved_config: &str, seed: u64) -> Self {
        Self {
            experiment: experiment.to_string(),
            config_sha256: sha256_hex(resolved_config.as_bytes()),
            seed,
        }
    }

    pub fn comment_line(&self) -> String {
        format!(
            "# pr-markov {} experiment={} config_sha256={} seed={}\n",
            VERSION, self.experiment, self.config_sha256, self.seed
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_csv<W: Write, S: Serialize>(mut out: W, header: &RunHeader, rows: &[S]) -> Result<()> {
    out.write_all(header.comment_line().as_bytes())?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<S: Serialize>(header: &RunHeader, rows: &[S]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, header, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        n: usize,
        gap: f64,
        note: Option<f64>,
    }

    #[test]
    fn layout() {
        let h = RunHeader::new("gap-sweep", "n = 3", 7);
        let s = csv_string(&h, &[Row { n: 3, gap: 0.5, note: None }]).unwrap();
        let lines: Vec<&str> = s.split('\n').collect();
        assert!(lines[0].starts_with("# pr-markov "));
        assert!(lines[0].contains("seed=7"));
        assert_eq!(lines[1], "n,gap,note");
        assert_eq!(lines[2], "3,0.5,");
        assert!(!s.contains('\r'));
        assert_eq!(h.config_sha256.len(), 64);
    }
}
