//! Row-major dense tensor.

use crate::error::{Error, Result};

/// N-dimensional array of `f64` in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; len],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "tensor",
                expected: format!("{expected} values for shape {shape:?}"),
                actual: format!("{}", data.len()),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { what: "tensor data" });
        }
        Ok(Self {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Interprets the tensor as a batched image stack `[N, C, H, W]`.
    pub fn dims4(&self) -> Result<(usize, usize, usize, usize)> {
        match self.shape[..] {
            [n, c, h, w] => Ok((n, c, h, w)),
            _ => Err(Error::DimensionMismatch {
                context: "tensor rank",
                expected: "4 dimensions".into(),
                actual: format!("{:?}", self.shape),
            }),
        }
    }

    /// Interprets the tensor as a batched feature matrix `[N, F]`.
    pub fn dims2(&self) -> Result<(usize, usize)> {
        match self.shape[..] {
            [n, f] => Ok((n, f)),
            _ => Err(Error::DimensionMismatch {
                context: "tensor rank",
                expected: "2 dimensions".into(),
                actual: format!("{:?}", self.shape),
            }),
        }
    }

    /// Reshapes without copying; the element count must match.
    pub fn reshaped(mut self, shape: &[usize]) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != self.data.len() {
            return Err(Error::DimensionMismatch {
                context: "reshape",
                expected: format!("{expected} values for shape {shape:?}"),
                actual: format!("{}", self.data.len()),
            });
        }
        self.shape = shape.to_vec();
        Ok(self)
    }
}
