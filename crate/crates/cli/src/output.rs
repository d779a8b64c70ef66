//! Artifact writing: reproducibility header, CSV rows, JSON lines.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

/// `x` with 17 significant digits, in plain decimal notation when the
/// exponent is moderate. Parses back to the same `f64`.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..17).contains(&exp) {
        format!("{x:.*}", (16 - exp) as usize)
    } else {
        sci
    }
}

pub fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(";")
}

pub struct Out {
    w: Box<dyn Write>,
}

impl Out {
    pub fn open(path: Option<&Path>) -> io::Result<Out> {
        let w: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Out { w })
    }

    /// `#` lines naming the version, the command, every parameter and the
    /// thread count.
    pub fn header<P: Serialize>(&mut self, command: &str, params: &P, threads: usize) -> io::Result<()> {
        writeln!(self.w, "# oppenheim {} {command}", env!("CARGO_PKG_VERSION"))?;
        writeln!(self.w, "# params: {}", serde_json::to_string(params).map_err(io::Error::other)?)?;
        writeln!(self.w, "# threads: {threads}")
    }

    pub fn comment(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.w, "# {text}")
    }

    pub fn csv(&mut self, columns: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let mut c = csv::Writer::from_writer(&mut self.w);
        c.write_record(columns)?;
        for r in rows {
            c.write_record(r)?;
        }
        c.flush()
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> io::Result<()> {
        writeln!(self.w, "{}", serde_json::to_string(value).map_err(io::Error::other)?)
    }

    pub fn raw(&mut self, text: &str) -> io::Result<()> {
        self.w.write_all(text.as_bytes())
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.w.flush()
    }
}
