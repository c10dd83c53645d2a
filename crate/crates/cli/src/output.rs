//! Serialization helpers: 17-significant-digit floats, atomic file writes,
//! and the column documentation collected into `schema.json`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Number, Value};

/// `x` with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A JSON number carrying the same 17 digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let n: Number = serde_json::from_str(&fmt_f64(x)).expect("formatted float is a JSON number");
    Value::Number(n)
}

pub fn complex(z: Complex64) -> Value {
    json!({"re": num(z.re), "im": num(z.im)})
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub struct Csv {
    header: Vec<String>,
    body: String,
}

impl Csv {
    pub fn new(header: Vec<String>) -> Self {
        Csv {
            header,
            body: String::new(),
        }
    }

    pub fn row(&mut self, cells: &[f64]) {
        debug_assert_eq!(cells.len(), self.header.len());
        let line: Vec<String> = cells.iter().map(|&x| fmt_f64(x)).collect();
        self.body.push_str(&line.join(","));
        self.body.push('\n');
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = self.header.join(",");
        text.push('\n');
        text.push_str(&self.body);
        write_atomic(path, text.as_bytes())
    }
}

/// Tracks what has been written so far and documents it.
#[derive(Default)]
pub struct Artifacts {
    dir: PathBuf,
    docs: BTreeMap<String, Value>,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Artifacts {
            dir: dir.into(),
            ..Default::default()
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn csv(
        &mut self,
        name: &str,
        csv: &Csv,
        describe: impl Fn(&str) -> String,
    ) -> std::io::Result<()> {
        let path = self.dir.join(name);
        csv.write(&path)?;
        let columns: Vec<Value> = csv
            .header()
            .iter()
            .map(|c| json!({"name": c, "description": describe(c)}))
            .collect();
        self.docs
            .insert(name.into(), json!({"format": "csv", "columns": columns}));
        self.written.push(path);
        Ok(())
    }

    pub fn json(
        &mut self,
        name: &str,
        value: &Value,
        fields: &[(&str, &str)],
    ) -> std::io::Result<()> {
        let path = self.dir.join(name);
        write_json(&path, value)?;
        let fields: BTreeMap<&str, &str> = fields.iter().copied().collect();
        self.docs
            .insert(name.into(), json!({"format": "json", "fields": fields}));
        self.written.push(path);
        Ok(())
    }

    /// `schema.json`, if anything was written.
    pub fn finish(&mut self) -> std::io::Result<()> {
        if self.docs.is_empty() {
            return Ok(());
        }
        let schema = json!({
            "float_format": "decimal with 17 significant digits; non-finite values are null in JSON",
            "files": self.docs,
        });
        let path = self.dir.join("schema.json");
        write_json(&path, &schema)?;
        self.written.push(path);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            0.0,
        ] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
            assert_eq!(num(x).as_f64().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), Value::Null);
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(
            serde_json::to_string(&num(0.5)).unwrap(),
            "5.0000000000000000e-1"
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
