//! CSV reading and writing for datasets.
//!
//! Input files are comma-separated UTF-8 with a header row. The role spec
//! names the response column(s); listed id columns are dropped and every
//! other column is a numeric feature.

use std::io::{Read, Write};
use std::path::Path;

use hsicinf::{Dataset, Response};
use ndarray::{Array1, Array2};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoleSpec {
    /// One column for regression or classification, several for
    /// multivariate regression.
    pub response: Vec<String>,
    /// Columns to ignore.
    pub ids: Vec<String>,
    /// Number of classes when the response holds labels `1..=classes`.
    pub classes: Option<usize>,
}

pub fn ingest_csv(path: &Path, roles: &RoleSpec) -> CliResult<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    ingest_reader(file, roles)
}

/// Parses a dataset. Row numbers in diagnostics count data rows from 1,
/// so row `r` sits on line `r + 1` of the file.
pub fn ingest_reader<R: Read>(reader: R, roles: &RoleSpec) -> CliResult<Dataset> {
    if roles.response.is_empty() {
        return Err(CliError::Usage("no response column given".into()));
    }
    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("column '{name}' not found in header")))
    };
    let response_cols: Vec<usize> = roles.response.iter().map(|c| find(c)).collect::<CliResult<_>>()?;
    let id_cols: Vec<usize> = roles.ids.iter().map(|c| find(c)).collect::<CliResult<_>>()?;
    if roles.classes.is_some() && response_cols.len() != 1 {
        return Err(CliError::Usage("classification needs exactly one response column".into()));
    }
    let feature_cols: Vec<usize> =
        (0..header.len()).filter(|c| !response_cols.contains(c) && !id_cols.contains(c)).collect();
    if feature_cols.is_empty() {
        return Err(CliError::Data("no feature columns left".into()));
    }

    let mut features = Vec::new();
    let mut responses = Vec::new();
    let mut n = 0;
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != header.len() {
            return Err(CliError::Data(format!("row {row}: expected {} fields, found {}", header.len(), record.len())));
        }
        let cell = |c: usize| -> CliResult<f64> {
            let raw = &record[c];
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Data(format!("row {row}, column '{}': not a number: '{raw}'", header[c])))
        };
        for &c in &feature_cols {
            features.push(cell(c)?);
        }
        for &c in &response_cols {
            responses.push(cell(c)?);
        }
        n += 1;
    }
    if n == 0 {
        return Err(CliError::Data("no data rows".into()));
    }

    let x = Array2::from_shape_vec((n, feature_cols.len()), features).expect("row-major shape");
    let response = match roles.classes {
        Some(classes) => {
            let labels = responses
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if v.fract() == 0.0 && v >= 1.0 && v <= classes as f64 {
                        Ok(v as usize)
                    } else {
                        Err(CliError::Data(format!("row {}: label {v} outside 1..={classes}", i + 1)))
                    }
                })
                .collect::<CliResult<Vec<_>>>()?;
            Response::Categorical { labels, classes }
        }
        None if response_cols.len() == 1 => Response::Univariate(Array1::from(responses)),
        None => Response::Multivariate(
            Array2::from_shape_vec((n, response_cols.len()), responses).expect("row-major shape"),
        ),
    };
    let names = feature_cols.iter().map(|&c| header[c].clone()).collect();
    Ok(Dataset::new(x, response, Some(names))?)
}

/// Response column names used when exporting.
pub fn response_names(response: &Response) -> Vec<String> {
    match response {
        Response::Univariate(_) => vec!["y".into()],
        Response::Multivariate(y) => (1..=y.ncols()).map(|j| format!("y{j}")).collect(),
        Response::Categorical { .. } => vec!["label".into()],
    }
}

/// Writes features then response columns. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_dataset<W: Write>(writer: W, data: &Dataset) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = data.feature_names.clone();
    header.extend(response_names(&data.response));
    w.write_record(&header)?;
    let y = data.response.as_points();
    for (xr, yr) in data.x.rows().into_iter().zip(y.rows()) {
        let fields: Vec<String> = xr.iter().chain(yr.iter()).map(|v| v.to_string()).collect();
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Role spec matching [`write_dataset`]'s layout for `response`.
pub fn export_roles(response: &Response) -> RoleSpec {
    RoleSpec {
        response: response_names(response),
        ids: Vec::new(),
        classes: match response {
            Response::Categorical { classes, .. } => Some(*classes),
            _ => None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roles(resp: &[&str]) -> RoleSpec {
        RoleSpec { response: resp.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    #[test]
    fn toy_csv() {
        let text = "a,b,y\n1,2,3\n4,5,6\n7,8,9\n";
        let d = ingest_reader(text.as_bytes(), &roles(&["y"])).unwrap();
        assert_eq!((d.n(), d.d()), (3, 2));
        assert_eq!(d.feature_names, vec!["a", "b"]);
        assert_eq!(d.response, Response::Univariate(Array1::from(vec![3.0, 6.0, 9.0])));
    }

    #[test]
    fn ids_are_dropped() {
        let text = "id,a,y\n1,2,3\n2,5,6\n";
        let spec = RoleSpec { ids: vec!["id".into()], ..roles(&["y"]) };
        let d = ingest_reader(text.as_bytes(), &spec).unwrap();
        assert_eq!(d.feature_names, vec!["a"]);
    }

    #[test]
    fn ragged_row_is_named() {
        let text = "a,b,y\n1,2,3\n4,5\n";
        let err = ingest_reader(text.as_bytes(), &roles(&["y"])).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn non_numeric_cell_is_located() {
        let text = "a,b,y\n1,x,3\n";
        let err = ingest_reader(text.as_bytes(), &roles(&["y"])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1") && msg.contains("'b'"), "{msg}");
    }

    #[test]
    fn missing_response_column() {
        let err = ingest_reader("a,b\n1,2\n".as_bytes(), &roles(&["y"])).unwrap_err();
        assert!(err.to_string().contains("'y'"));
    }

    #[test]
    fn labels_checked() {
        let spec = RoleSpec { classes: Some(2), ..roles(&["y"]) };
        assert!(ingest_reader("a,y\n1,1\n2,2\n".as_bytes(), &spec).is_ok());
        assert!(ingest_reader("a,y\n1,1\n2,3\n".as_bytes(), &spec).is_err());
        assert!(ingest_reader("a,y\n1,1\n2,1.5\n".as_bytes(), &spec).is_err());
    }

    #[test]
    fn multivariate_response() {
        let d = ingest_reader("a,y1,y2\n1,2,3\n4,5,6\n".as_bytes(), &roles(&["y1", "y2"])).unwrap();
        assert_eq!(d.response.width(), 2);
    }
}
