//! CSV ingestion.
//!
//! Effort datasets carry a `ucp,effort` header. Project descriptors use one
//! row per project:
//!
//! ```text
//! name,actors_simple,actors_average,actors_complex,use_case_transactions,T1,...,T13,F1,...,F8
//! billing,2,1,1,3;6;9,3,4,2,5,1,2,3,0,4,2,5,1,3,4,3,3,5,2,1,2,0
//! ```
//!
//! `use_case_transactions` lists the transaction count of each use case,
//! separated by `;`. Columns may appear in any order.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::selection::{LabeledDataset, Record};
use crate::kernels::FeatureVector;
use crate::ucp::{ActorClass, EnvironmentalRatings, ProjectDescriptor, TechnicalRatings, MAX_RATING};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn record_error(path: &Path, line: u64, reason: impl Into<String>) -> Error {
    Error::Record {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub fn load_effort_dataset(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    parse_effort_csv(&read(path)?, path)
}

/// Parses effort CSV text; `origin` only labels error messages.
pub fn parse_effort_csv(text: &str, origin: &Path) -> Result<LabeledDataset> {
    let mut rdr = reader(text);
    let headers = rdr
        .headers()
        .map_err(|e| record_error(origin, 1, e.to_string()))?
        .clone();
    let names: Vec<String> = headers.iter().map(str::to_ascii_lowercase).collect();
    if names != ["ucp", "effort"] {
        return Err(record_error(
            origin,
            1,
            format!("expected header `ucp,effort`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            record_error(origin, line, e.to_string())
        })?;
        let line = line_of(&row);
        let field = |i: usize, name: &str| -> Result<f64> {
            let raw = row.get(i).unwrap_or("");
            let v: f64 = raw
                .parse()
                .map_err(|_| record_error(origin, line, format!("{name} `{raw}` is not a number")))?;
            if !v.is_finite() {
                return Err(record_error(origin, line, format!("{name} must be finite")));
            }
            Ok(v)
        };
        let ucp = field(0, "ucp")?;
        let effort = field(1, "effort")?;
        if effort <= 0.0 {
            return Err(record_error(
                origin,
                line,
                format!("effort must be positive, got {effort}"),
            ));
        }
        records.push(Record {
            feature: FeatureVector::scalar(ucp)?,
            effort,
        });
    }
    if records.is_empty() {
        return Err(Error::invalid(format!("{}: no data rows", origin.display())));
    }
    Ok(LabeledDataset::new(records))
}

/// Writes `(ucp, effort)` rows at full precision.
pub fn write_effort_csv(data: &LabeledDataset) -> String {
    let mut out = String::from("ucp,effort\n");
    for r in &data.records {
        out.push_str(&format!("{},{}\n", r.feature.as_slice()[0], r.effort));
    }
    out
}

pub fn load_projects(path: impl AsRef<Path>) -> Result<Vec<ProjectDescriptor>> {
    let path = path.as_ref();
    parse_projects_csv(&read(path)?, path)
}

struct Columns {
    name: usize,
    actors: [usize; 3],
    transactions: usize,
    technical: [usize; 13],
    environmental: [usize; 8],
}

fn locate(origin: &Path, headers: &csv::StringRecord) -> Result<Columns> {
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| record_error(origin, 1, format!("missing column `{name}`")))
    };
    let mut technical = [0; 13];
    for (i, slot) in technical.iter_mut().enumerate() {
        *slot = find(&format!("T{}", i + 1))?;
    }
    let mut environmental = [0; 8];
    for (i, slot) in environmental.iter_mut().enumerate() {
        *slot = find(&format!("F{}", i + 1))?;
    }
    Ok(Columns {
        name: find("name")?,
        actors: [
            find("actors_simple")?,
            find("actors_average")?,
            find("actors_complex")?,
        ],
        transactions: find("use_case_transactions")?,
        technical,
        environmental,
    })
}

pub fn parse_projects_csv(text: &str, origin: &Path) -> Result<Vec<ProjectDescriptor>> {
    let mut rdr = reader(text);
    let headers = rdr
        .headers()
        .map_err(|e| record_error(origin, 1, e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Err(Error::invalid(format!("{}: empty project file", origin.display())));
    }
    let cols = locate(origin, &headers)?;
    let mut projects = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            record_error(origin, line, e.to_string())
        })?;
        let line = line_of(&row);
        let get = |i: usize| row.get(i).unwrap_or("");
        let count = |i: usize| -> Result<u32> {
            get(i).parse().map_err(|_| {
                record_error(
                    origin,
                    line,
                    format!("column `{}`: `{}` is not a non-negative integer", &headers[i], get(i)),
                )
            })
        };
        let rating = |i: usize| -> Result<u8> {
            let raw = get(i);
            match raw.parse::<u8>() {
                Ok(v) if v <= MAX_RATING => Ok(v),
                _ => Err(record_error(
                    origin,
                    line,
                    format!("{} rating `{raw}` must be an integer in 0..={MAX_RATING}", &headers[i]),
                )),
            }
        };

        let mut actors = Vec::new();
        for (class, &col) in [ActorClass::Simple, ActorClass::Average, ActorClass::Complex]
            .iter()
            .zip(&cols.actors)
        {
            actors.extend(std::iter::repeat(*class).take(count(col)? as usize));
        }
        let use_cases = get(cols.transactions)
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u32>().map_err(|_| {
                    record_error(origin, line, format!("use case transaction count `{s}` is invalid"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if actors.is_empty() {
            return Err(record_error(origin, line, "project has no actors"));
        }
        if use_cases.is_empty() {
            return Err(record_error(origin, line, "project has no use cases"));
        }
        let t = cols.technical.iter().map(|&c| rating(c)).collect::<Result<Vec<_>>>()?;
        let f = cols.environmental.iter().map(|&c| rating(c)).collect::<Result<Vec<_>>>()?;
        projects.push(ProjectDescriptor {
            name: get(cols.name).to_string(),
            actors,
            use_cases,
            technical: TechnicalRatings::new(&t)?,
            environmental: EnvironmentalRatings::new(&f)?,
        });
    }
    if projects.is_empty() {
        return Err(Error::invalid(format!("{}: no projects", origin.display())));
    }
    Ok(projects)
}
