use std::collections::BTreeSet;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::suite::VerificationReport;

use super::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Plotdata,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "plotdata" => Ok(Format::Plotdata),
            other => Err(Error::Parse(format!("unknown report format \"{other}\""))),
        }
    }
}

/// Pretty JSON with every float at 17 significant digits.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportDocument<R> {
    version: String,
    reports: R,
}

fn nonempty(reports: &[VerificationReport]) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::Validation("no reports to emit".into()));
    }
    Ok(())
}

pub fn emit_json(reports: &[VerificationReport]) -> Result<String> {
    nonempty(reports)?;
    let doc = ReportDocument { version: SCHEMA_VERSION.to_string(), reports };
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    doc.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

/// Reads a document written by [`emit_json`].
pub fn parse_report_document(text: &str) -> Result<Vec<VerificationReport>> {
    let doc: ReportDocument<Vec<VerificationReport>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    if doc.version != SCHEMA_VERSION {
        return Err(Error::Validation(format!("unsupported report version \"{}\"", doc.version)));
    }
    Ok(doc.reports)
}

fn status_name(r: &VerificationReport) -> String {
    serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

pub fn emit_csv(reports: &[VerificationReport]) -> Result<String> {
    nonempty(reports)?;
    let io_err = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theorem_id", "scenario", "lhs", "rhs", "margin", "pass", "status"]).map_err(io_err)?;
    for r in reports {
        w.write_record([
            r.theorem_id.clone(),
            r.scenario.clone(),
            format!("{:.8e}", r.lhs),
            format!("{:.8e}", r.rhs),
            format!("{:.8e}", r.margin),
            r.pass.to_string(),
            status_name(r),
        ])
        .map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn file_stem(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// One (file name, contents) pair per report carrying a series.
pub fn emit_plotdata(reports: &[VerificationReport]) -> Result<Vec<(String, String)>> {
    nonempty(reports)?;
    let mut used = BTreeSet::new();
    let mut out = Vec::new();
    for r in reports {
        let Some(series) = &r.series else { continue };
        let base = format!("{}_{}", file_stem(&r.theorem_id), file_stem(&r.scenario));
        let mut name = format!("{base}.dat");
        let mut i = 1;
        while !used.insert(name.clone()) {
            i += 1;
            name = format!("{base}_{i}.dat");
        }
        let mut text = format!("# theorem: {}\n# scenario: {}\n# {} lhs rhs\n", r.theorem_id, r.scenario, series.x_label);
        for [x, l, h] in &series.rows {
            text.push_str(&format!("{x:.16e} {l:.16e} {h:.16e}\n"));
        }
        out.push((name, text));
    }
    Ok(out)
}

/// Writes reports into `dir` and returns the paths written.
pub fn write_reports(reports: &[VerificationReport], format: Format, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = match format {
        Format::Json => vec![("reports.json".to_string(), emit_json(reports)?)],
        Format::Csv => vec![("reports.csv".to_string(), emit_csv(reports)?)],
        Format::Plotdata => emit_plotdata(reports)?,
    };
    let mut paths = Vec::new();
    for (name, text) in files {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        paths.push(p);
    }
    Ok(paths)
}
