use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use orbitcount::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn io(e: std::io::Error, p: &Path) -> Error {
    Error::Input(format!("{}: {e}", p.display()))
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().unwrap().to_string_lossy()
    ));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| io(e, &tmp))?;
        f.write_all(bytes).map_err(|e| io(e, &tmp))?;
        f.sync_all().map_err(|e| io(e, &tmp))?;
    }
    fs::rename(&tmp, path).map_err(|e| io(e, path))
}

#[derive(Serialize)]
struct Header<'a> {
    config_hash: &'a str,
    command: &'a str,
    orbitcount: &'a str,
    cli: &'a str,
}

pub struct Sink {
    pub dir: PathBuf,
    pub config_hash: String,
    pub command: String,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: PathBuf, config_hash: String, command: &str) -> Sink {
        Sink {
            dir,
            config_hash,
            command: command.into(),
            written: Vec::new(),
        }
    }

    fn header(&self) -> Header<'_> {
        Header {
            config_hash: &self.config_hash,
            command: &self.command,
            orbitcount: VERSION,
            cli: VERSION,
        }
    }

    /// `{ "header": …, "data": … }`, pretty printed.
    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            header: Header<'a>,
            data: &'a T,
        }
        let text = serde_json::to_string_pretty(&Doc {
            header: self.header(),
            data,
        })
        .map_err(|e| Error::Numeric(format!("serialization: {e}")))?;
        self.raw(name, format!("{text}\n").as_bytes())
    }

    /// CSV with `#` header lines.
    pub fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let h = self.header();
        let mut s = format!(
            "# config_hash={} command={} orbitcount={} cli={}\n{}\n",
            h.config_hash,
            h.command,
            h.orbitcount,
            h.cli,
            columns.join(",")
        );
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        self.raw(name, s.as_bytes())
    }

    pub fn raw(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.dir.join(name);
        write_atomic(&p, bytes)?;
        self.written.push(p);
        Ok(())
    }
}

/// Shortest round-trip formatting for CSV cells.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
