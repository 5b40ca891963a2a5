//! Least-squares helpfulness regression.
//!
//! The fit goes through a Householder QR of the design matrix. When the
//! design is rank deficient (e.g. a feature that never varies in the training
//! data) it falls back to ridge regression on the normal equations with a
//! tiny penalty on the feature weights, which drives the unidentifiable
//! weights to zero and leaves the intercept to absorb constant columns.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::features::{feature_names, CommentFeatures, FEATURE_DIM, FEATURE_LAYOUT_VERSION};
use super::Category;
use crate::{Error, Result};

pub const RIDGE_LAMBDA: f64 = 1e-6;

/// Relative size of the smallest R diagonal below which the design is treated as singular.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// In-sample coefficient of determination; `None` when the target is constant.
    pub r_squared: Option<f64>,
    pub ridge: bool,
}

impl OlsFit {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }
}

/// Least squares with an intercept. Needs at least `dim + 1` rows.
pub fn fit_ols(rows: &[Vec<f64>], targets: &[f64]) -> Result<OlsFit> {
    let n = rows.len();
    if n != targets.len() {
        return Err(Error::Training(format!("{n} feature rows but {} targets", targets.len())));
    }
    let dim = rows.first().map_or(0, Vec::len);
    if n < dim + 1 || n == 0 {
        return Err(Error::Training(format!(
            "need at least {} examples for {dim} features, got {n}",
            dim + 1
        )));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != dim) {
        return Err(Error::Training(format!("row {i} has {} features, expected {dim}", rows[i].len())));
    }
    if rows.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::Training("non-finite value in training data".into()));
    }

    let mean_y = targets.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = targets.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    if ss_tot == 0.0 {
        return Ok(OlsFit {
            weights: vec![0.0; dim],
            intercept: mean_y,
            r_squared: None,
            ridge: false,
        });
    }

    // intercept is the last column
    let x = DMatrix::from_fn(n, dim + 1, |i, j| if j == dim { 1.0 } else { rows[i][j] });
    let y = DVector::from_column_slice(targets);

    let qr = x.clone().qr();
    let r = qr.r();
    let diag_max = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diag_min = r.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let full_rank = diag_max > 0.0 && diag_min > RANK_TOLERANCE * diag_max;

    let (beta, ridge) = match full_rank
        .then(|| r.solve_upper_triangular(&(qr.q().transpose() * &y)))
        .flatten()
    {
        Some(beta) => (beta, false),
        None => {
            let mut gram = x.transpose() * &x;
            // the intercept stays unpenalized
            for i in 0..dim {
                gram[(i, i)] += RIDGE_LAMBDA;
            }
            let rhs = x.transpose() * &y;
            let beta = gram
                .cholesky()
                .ok_or_else(|| Error::Training("ridge system is not positive definite".into()))?
                .solve(&rhs);
            (beta, true)
        }
    };

    let residuals = &y - &x * &beta;
    let ss_res = residuals.norm_squared();
    Ok(OlsFit {
        weights: beta.as_slice()[..dim].to_vec(),
        intercept: beta[dim],
        r_squared: Some(1.0 - ss_res / ss_tot),
        ridge,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelpfulnessModel {
    pub schema_version: u32,
    pub category: Category,
    pub layout_version: String,
    pub feature_names: Vec<String>,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub training: HelpfulnessTraining,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelpfulnessTraining {
    pub examples: usize,
    pub r_squared: Option<f64>,
    pub ridge_fallback: bool,
}

impl HelpfulnessModel {
    pub const SCHEMA_VERSION: u32 = 1;

    /// A model predicting `intercept` for every comment.
    pub fn constant(category: Category, intercept: f64) -> Self {
        Self {
            schema_version: Self::SCHEMA_VERSION,
            category,
            layout_version: FEATURE_LAYOUT_VERSION.into(),
            feature_names: feature_names(),
            weights: vec![0.0; FEATURE_DIM],
            intercept,
            training: HelpfulnessTraining {
                examples: 0,
                r_squared: None,
                ridge_fallback: false,
            },
        }
    }
}

/// Fits one category's helpfulness regression over imputed feature vectors.
pub fn train_helpfulness(labeled: &[(CommentFeatures, f64)], category: Category) -> Result<HelpfulnessModel> {
    let rows: Vec<Vec<f64>> = labeled.iter().map(|(f, _)| f.to_vector()).collect();
    let targets: Vec<f64> = labeled.iter().map(|(_, y)| *y).collect();
    if rows.len() < FEATURE_DIM + 1 {
        return Err(Error::Training(format!(
            "{category}: need at least {} labeled comments, got {}",
            FEATURE_DIM + 1,
            rows.len()
        )));
    }
    let fit = fit_ols(&rows, &targets)?;
    Ok(HelpfulnessModel {
        schema_version: HelpfulnessModel::SCHEMA_VERSION,
        category,
        layout_version: FEATURE_LAYOUT_VERSION.into(),
        feature_names: feature_names(),
        weights: fit.weights,
        intercept: fit.intercept,
        training: HelpfulnessTraining {
            examples: rows.len(),
            r_squared: fit.r_squared,
            ridge_fallback: fit.ridge,
        },
    })
}

pub fn score_helpfulness(model: &HelpfulnessModel, features: &CommentFeatures) -> Result<f64> {
    if model.layout_version != FEATURE_LAYOUT_VERSION || model.weights.len() != FEATURE_DIM {
        return Err(Error::LayoutMismatch {
            model: format!("{} ({} weights)", model.layout_version, model.weights.len()),
            features: format!("{FEATURE_LAYOUT_VERSION} ({FEATURE_DIM} features)"),
        });
    }
    let x = features.to_vector();
    Ok(model.intercept + model.weights.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>())
}
