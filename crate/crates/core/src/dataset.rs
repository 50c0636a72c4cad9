use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{HsicError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Univariate(Array1<f64>),
    Multivariate(Array2<f64>),
    /// Labels in `1..=classes`.
    Categorical {
        labels: Vec<usize>,
        classes: usize,
    },
}

impl Response {
    pub fn len(&self) -> usize {
        match self {
            Response::Univariate(y) => y.len(),
            Response::Multivariate(y) => y.nrows(),
            Response::Categorical { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Response as kernel input points, one row per sample. Labels become a
    /// single column of integer values.
    pub fn as_points(&self) -> Array2<f64> {
        match self {
            Response::Univariate(y) => y.clone().insert_axis(Axis(1)),
            Response::Multivariate(y) => y.clone(),
            Response::Categorical { labels, .. } => Array2::from_shape_fn((labels.len(), 1), |(i, _)| labels[i] as f64),
        }
    }

    pub fn select(&self, rows: &[usize]) -> Response {
        match self {
            Response::Univariate(y) => Response::Univariate(y.select(Axis(0), rows)),
            Response::Multivariate(y) => Response::Multivariate(y.select(Axis(0), rows)),
            Response::Categorical { labels, classes } => {
                Response::Categorical { labels: rows.iter().map(|&i| labels[i]).collect(), classes: *classes }
            }
        }
    }

    pub fn width(&self) -> usize {
        match self {
            Response::Multivariate(y) => y.ncols(),
            _ => 1,
        }
    }
}

/// Feature matrix (rows = samples) with its response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub response: Response,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(x: Array2<f64>, response: Response, feature_names: Option<Vec<String>>) -> Result<Self> {
        if response.len() != x.nrows() {
            return Err(HsicError::ResponseLength { expected: x.nrows(), found: response.len() });
        }
        if let Response::Categorical { labels, classes } = &response {
            if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > *classes) {
                return Err(HsicError::LabelOutOfRange { label: bad as i64, classes: *classes });
            }
        }
        let feature_names = match feature_names {
            Some(names) if names.len() != x.ncols() => {
                return Err(HsicError::DimensionMismatch { expected: x.ncols(), found: names.len() })
            }
            Some(names) => names,
            None => (1..=x.ncols()).map(|i| format!("x{i}")).collect(),
        };
        Ok(Dataset { x, response, feature_names })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select(Axis(0), rows),
            response: self.response.select(rows),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.x.view()
    }
}
