//! The curve-file schema and CSV report emission: the stable on-disk
//! contract of the tool.
//!
//! Curve files are JSON with an explicit `dim` field:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "curves": [
//!     { "id": "seg0", "multiplicity": 1,
//!       "vertices": [[0.0, 0.0], [3.0, 0.0]] }
//!   ]
//! }
//! ```
//!
//! Floats serialize as the shortest decimal that round-trips the binary
//! value, so `serialize(parse(f))` parses back to an identical collection.
//! CSV reports carry a `# schema:` header line naming the report kind and
//! version; the column set is fixed per kind.

use crate::collection_metric::CurveCollection;
use crate::geometry::{Point, Polyline};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub id: String,
    #[serde(default = "default_multiplicity")]
    pub multiplicity: u32,
    pub vertices: Vec<Vec<f64>>,
}

fn default_multiplicity() -> u32 {
    1
}

/// On-disk form of a curve collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub dim: usize,
    pub curves: Vec<CurveRecord>,
}

impl CurveFile {
    /// Validate the schema invariants: positive dim, matching vertex
    /// lengths, positive multiplicities, no trivial curves.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Schema("dim must be at least 1".into()));
        }
        for rec in &self.curves {
            if rec.multiplicity == 0 {
                return Err(Error::Schema(format!(
                    "curve `{}` has multiplicity 0",
                    rec.id
                )));
            }
            for v in &rec.vertices {
                if v.len() != self.dim {
                    return Err(Error::Schema(format!(
                        "curve `{}` has a vertex of dimension {}, expected {}",
                        rec.id,
                        v.len(),
                        self.dim
                    )));
                }
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Schema(format!(
                        "curve `{}` has a non-finite coordinate",
                        rec.id
                    )));
                }
            }
            let poly = Polyline::new(
                rec.vertices
                    .iter()
                    .map(|v| Point::new(v.clone()))
                    .collect::<Result<Vec<_>>>()?,
            );
            match poly {
                Ok(p) if !p.is_trivial() => {}
                _ => return Err(Error::TrivialPath { id: rec.id.clone() }),
            }
        }
        Ok(())
    }

    pub fn to_collection(&self) -> Result<CurveCollection> {
        self.validate()?;
        let curves = self
            .curves
            .iter()
            .map(|rec| {
                let poly = Polyline::new(
                    rec.vertices
                        .iter()
                        .map(|v| Point::new(v.clone()))
                        .collect::<Result<Vec<_>>>()?,
                )?;
                Ok((poly, rec.multiplicity))
            })
            .collect::<Result<Vec<_>>>()?;
        CurveCollection::from_curves(curves)
    }

    pub fn from_collection(coll: &CurveCollection, id_prefix: &str) -> Self {
        let dim = coll.iter().next().map_or(0, |(c, _)| c.dim());
        let curves = coll
            .iter()
            .enumerate()
            .map(|(i, (c, m))| CurveRecord {
                id: format!("{id_prefix}{i}"),
                multiplicity: *m,
                vertices: c.vertices().iter().map(|v| v.coords().to_vec()).collect(),
            })
            .collect();
        CurveFile { dim: dim.max(1), curves }
    }
}

/// Parse and validate a curve file.
pub fn parse_curve_file(bytes: &[u8]) -> Result<CurveFile> {
    let file: CurveFile = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.validate()?;
    Ok(file)
}

/// Serialize a curve file with deterministic field order and shortest
/// round-trip floats.
pub fn serialize_curve_file(file: &CurveFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("curve files always serialize");
    s.push('\n');
    s
}

/// Incremental CSV report writer with a schema-version header.
pub struct CsvReport {
    out: String,
}

impl CsvReport {
    pub fn new(schema: &str, columns: &[&str]) -> Self {
        let mut out = String::new();
        out.push_str(&format!("# schema: {schema}\n"));
        out.push_str(&columns.join(","));
        out.push('\n');
        CsvReport { out }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.out.push_str(&fields.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Shortest round-trip decimal form of a float (what `{}` prints), kept as
/// a named helper so report code reads uniformly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Points serialize in reports as semicolon-joined coordinates.
pub fn fmt_point(p: &Point) -> String {
    p.coords()
        .iter()
        .map(|c| fmt_f64(*c))
        .collect::<Vec<_>>()
        .join(";")
}
