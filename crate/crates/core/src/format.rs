//! On-disk formats.
//!
//! Matrices are plain text: a `u v` header line, then `u` lines of `v`
//! whitespace-separated Gaussian-rational tokens. Sets, colorings,
//! certificates and reports are JSON with numbers in textual form.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussInt, GaussRational};
use crate::linalg::{IprCertificate, MatrixQi, VectorQi, VectorZi};
use crate::search::{Coloring, ColoringRule, ImageCertificate};
use crate::window::{GaussSet, Point, SetRule, Window};

fn columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let tail = &rest[start..];
        let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
        let col = line[..offset + start].chars().count() + 1;
        let tok = &tail[..len];
        offset += start + len;
        rest = &tail[len..];
        Some((col, tok))
    })
}

fn dimension(tok: Option<(usize, &str)>, line: usize, what: &str) -> Result<usize> {
    let (col, tok) = tok.ok_or_else(|| Error::Parse {
        line,
        column: 1,
        message: format!("header must be `u v`, missing {what}"),
    })?;
    tok.parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Parse {
            line,
            column: col,
            message: format!("{what} must be a positive integer, found `{tok}`"),
        })
}

pub fn parse_matrix(text: &str) -> Result<MatrixQi> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        message: "empty matrix file".into(),
    })?;
    let mut toks = columns(header);
    let u = dimension(toks.next(), hline, "row count u")?;
    let v = dimension(toks.next(), hline, "column count v")?;
    if let Some((col, tok)) = toks.next() {
        return Err(Error::Parse {
            line: hline,
            column: col,
            message: format!("unexpected `{tok}` after header"),
        });
    }
    let mut rows = Vec::with_capacity(u);
    let mut last = hline;
    for (lineno, line) in lines {
        if rows.len() == u {
            return Err(Error::Parse {
                line: lineno,
                column: 1,
                message: format!("more than {u} rows"),
            });
        }
        let row = columns(line)
            .map(|(col, tok)| tok.parse::<GaussRational>().map_err(|e| e.at(lineno, col)))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != v {
            return Err(Error::Parse {
                line: lineno,
                column: 1,
                message: format!("expected {v} entries, found {}", row.len()),
            });
        }
        rows.push(row);
        last = lineno;
    }
    if rows.len() < u {
        return Err(Error::Parse {
            line: last + 1,
            column: 1,
            message: format!("expected {u} rows, found {}", rows.len()),
        });
    }
    MatrixQi::from_rows(rows)
}

pub fn format_matrix(a: &MatrixQi) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for r in 0..a.rows() {
        let row: Vec<String> = a.row(r).iter().map(ToString::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parse JSON, reporting syntax and schema errors with line and column.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line().max(1),
        column: e.column().max(1),
        message: e.to_string(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn yes() -> bool {
    true
}

/// A window as written in files; the radius may come from the command line.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    #[serde(default = "yes")]
    pub include_zero: bool,
}

impl WindowSpec {
    /// `radius` overrides the file's radius.
    pub fn resolve(&self, radius: Option<u32>) -> Result<Window> {
        let r = radius
            .or(self.radius)
            .ok_or_else(|| Error::Invalid("window radius missing: set it in the file or pass --radius".into()))?;
        Window::new(r, self.include_zero)
    }
}

fn points_of(window: Window, points: &[GaussInt]) -> Result<Vec<Point>> {
    points
        .iter()
        .map(|z| {
            z.to_xy()
                .filter(|&p| window.contains(p))
                .ok_or_else(|| Error::Invalid(format!("point {z} lies outside the window")))
        })
        .collect()
}

/// `{"window": {...}, "points": [...]}` or `{"window": {...}, "rule": {...}}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFile {
    pub window: WindowSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<GaussInt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<SetRule>,
}

impl SetFile {
    pub fn parse(text: &str) -> Result<Self> {
        from_json(text)
    }

    pub fn build(&self, radius: Option<u32>, seed: u64) -> Result<GaussSet> {
        let window = self.window.resolve(radius)?;
        match (&self.points, &self.rule) {
            (Some(points), None) => GaussSet::from_points(window, points_of(window, points)?),
            (None, Some(rule)) => GaussSet::from_rule(window, rule, seed),
            _ => Err(Error::Invalid("a set file needs exactly one of `points` or `rule`".into())),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorEntry {
    pub point: GaussInt,
    pub color: u32,
}

/// `{"window": {...}, "colors": k, "rule": {...}}` or the same with an
/// `assignment` list covering every window point.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoringFile {
    pub window: WindowSpec,
    pub colors: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<ColoringRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<ColorEntry>>,
}

impl ColoringFile {
    pub fn parse(text: &str) -> Result<Self> {
        from_json(text)
    }

    /// The same file with the radius fixed, for embedding in certificates.
    pub fn resolved(&self, radius: Option<u32>) -> Result<Self> {
        let w = self.window.resolve(radius)?;
        Ok(ColoringFile {
            window: WindowSpec {
                radius: Some(w.radius() as u32),
                include_zero: w.include_zero(),
            },
            ..self.clone()
        })
    }

    pub fn build(&self, radius: Option<u32>, seed: u64) -> Result<Coloring> {
        let window = self.window.resolve(radius)?;
        match (&self.rule, &self.assignment) {
            (Some(rule), None) => Coloring::from_rule(window, self.colors, rule, seed),
            (None, Some(entries)) => {
                let pts = points_of(window, &entries.iter().map(|e| e.point.clone()).collect::<Vec<_>>())?;
                let pairs: Vec<(Point, u32)> = pts.into_iter().zip(entries.iter().map(|e| e.color)).collect();
                Coloring::from_assignment(window, self.colors, &pairs)
            }
            _ => Err(Error::Invalid(
                "a coloring file needs exactly one of `rule` or `assignment`".into(),
            )),
        }
    }
}

/// Output of `certify`: the matrix, the branch and its vector.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IprCertificateFile {
    pub kind: String,
    pub matrix: MatrixQi,
    pub vector: Vec<GaussRational>,
    pub verified: bool,
}

impl IprCertificateFile {
    pub fn new(matrix: &MatrixQi, cert: &IprCertificate, verified: bool) -> Self {
        let vector = match cert {
            IprCertificate::Solution(s) => s.iter().cloned().collect(),
            IprCertificate::Obstruction(u) => u.iter().cloned().map(GaussRational::from).collect(),
        };
        IprCertificateFile {
            kind: cert.kind().to_string(),
            matrix: matrix.clone(),
            vector,
            verified,
        }
    }

    pub fn certificate(&self) -> Result<IprCertificate> {
        match self.kind.as_str() {
            "solution" => Ok(IprCertificate::Solution(VectorQi::new(self.vector.clone())?)),
            "obstruction" => {
                let ints = self
                    .vector
                    .iter()
                    .map(|e| {
                        e.to_gauss_int()
                            .ok_or_else(|| Error::Invalid(format!("obstruction entry {e} is not integral")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(IprCertificate::Obstruction(VectorZi::new(ints)?))
            }
            other => Err(Error::Invalid(format!("unknown certificate kind `{other}`"))),
        }
    }
}

/// Output of `search`: inputs echoed so the file verifies on its own.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchReportFile {
    pub scope: String,
    pub matrix: MatrixQi,
    pub coloring: ColoringFile,
    pub seed: u64,
    pub search_radius: u32,
    /// `found`, `no-monochromatic` or `exhausted`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scanned: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_window: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ImageCertificate>,
    pub verified: bool,
}
