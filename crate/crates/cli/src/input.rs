//! CSV ingestion for the frontier diagnostic.

use frontier_tails::frontier::Dataset;

use crate::failure::{CliResult, Failure};

pub struct Columns<'a> {
    pub response: &'a str,
    pub design: &'a [String],
    pub group: Option<&'a str>,
}

fn find(headers: &csv::StringRecord, name: &str) -> CliResult<usize> {
    headers.iter().position(|h| h == name).ok_or_else(|| {
        let known: Vec<&str> = headers.iter().collect();
        Failure::data(format!("column {name:?} not found (header has {known:?})"))
    })
}

/// Reads the response, an intercept plus the design columns, and optional
/// group labels from CSV text with a header row.
pub fn read_dataset(text: &[u8], cols: &Columns) -> CliResult<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text);
    let headers = reader
        .headers()
        .map_err(|e| Failure::data(format!("reading CSV header: {e}")))?
        .clone();
    let yi = find(&headers, cols.response)?;
    let xi: Vec<usize> = cols.design.iter().map(|c| find(&headers, c)).collect::<CliResult<_>>()?;
    let gi = cols.group.map(|g| find(&headers, g)).transpose()?;

    let mut y = Vec::new();
    let mut x: Vec<Vec<f64>> = vec![Vec::new(); xi.len()];
    let mut groups = gi.map(|_| Vec::new());
    for (r, record) in reader.records().enumerate() {
        // header is line 1
        let line = r + 2;
        let record = record.map_err(|e| Failure::data(format!("line {line}: {e}")))?;
        let number = |i: usize| -> CliResult<f64> {
            let cell = record.get(i).unwrap_or("");
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Failure::data(format!(
                    "line {line}, column {:?}: {cell:?} is not a finite number",
                    &headers[i]
                ))),
            }
        };
        y.push(number(yi)?);
        for (col, &i) in x.iter_mut().zip(&xi) {
            col.push(number(i)?);
        }
        if let (Some(g), Some(i)) = (groups.as_mut(), gi) {
            g.push(record.get(i).unwrap_or("").to_string());
        }
    }
    Ok(Dataset::with_intercept(y, &x, groups)?)
}
