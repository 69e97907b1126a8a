//! Closed-form coefficient and data expressions such as
//! `1 + 0.1*cos(2*pi*x)`.
//!
//! Recognised variables are `x` (position in `[0, L)`), `L` (box length)
//! and `pi`; `PI`, `π` and `E` are built-in constants.
//!
//! Unary minus binds tighter than `^`: `-x^2` is `(-x)^2`. Write a Gaussian
//! as `exp(-((x - L/2)^2))`.

use std::f64::consts::PI;

use exmex::prelude::*;
use thiserror::Error;

use crate::error::SpectralError;
use crate::spectral::SpectralField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("cannot parse expression `{text}`: {message}")]
    Parse { text: String, message: String },
    #[error("unknown variable `{name}` in `{text}` (use x, L or pi)")]
    UnknownVariable { text: String, name: String },
    #[error("expression `{text}` is not finite at x = {x}")]
    NonFinite { text: String, x: f64 },
    #[error(transparent)]
    Grid(#[from] SpectralError),
}

#[derive(Debug, Clone)]
pub struct Expression {
    text: String,
    flat: FlatEx<f64>,
}

enum Var {
    X,
    Length,
    Pi,
}

impl Expression {
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        let flat = exmex::parse::<f64>(text).map_err(|e| ExprError::Parse {
            text: text.to_string(),
            message: e.to_string(),
        })?;
        for name in flat.var_names() {
            if !matches!(name.as_str(), "x" | "L" | "pi") {
                return Err(ExprError::UnknownVariable {
                    text: text.to_string(),
                    name: name.clone(),
                });
            }
        }
        Ok(Self {
            text: text.to_string(),
            flat,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    fn vars(&self) -> Vec<Var> {
        self.flat
            .var_names()
            .iter()
            .map(|n| match n.as_str() {
                "x" => Var::X,
                "L" => Var::Length,
                _ => Var::Pi,
            })
            .collect()
    }

    pub fn eval(&self, x: f64, length: f64) -> Result<f64, ExprError> {
        let args: Vec<f64> = self
            .vars()
            .iter()
            .map(|v| match v {
                Var::X => x,
                Var::Length => length,
                Var::Pi => PI,
            })
            .collect();
        let v = self.flat.eval(&args).map_err(|e| ExprError::Parse {
            text: self.text.clone(),
            message: e.to_string(),
        })?;
        if !v.is_finite() {
            return Err(ExprError::NonFinite {
                text: self.text.clone(),
                x,
            });
        }
        Ok(v)
    }

    /// Sample on the `n`-point grid of a box of length `length`.
    pub fn sample(&self, n: usize, length: f64) -> Result<SpectralField, ExprError> {
        let h = length / n as f64;
        let values = (0..n)
            .map(|j| self.eval(j as f64 * h, length))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SpectralField::analyze_on(&values, length)?)
    }
}
