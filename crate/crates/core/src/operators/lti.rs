//! Zero-order-hold discretization of continuous-time state-space models.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Dense row-major matrix as it appears in operator JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        let m = Self { rows, cols, data };
        m.validate()?;
        Ok(m)
    }

    pub fn scalar(v: f64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![v],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix declared {}x{} but has {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        if self.data.iter().any(|v| !v.is_finite()) {
            return domain("matrix entries must be finite");
        }
        Ok(())
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

/// Discrete recurrence `x⁺ = Ad x + Bd u`, `y = C x + D u`.
#[derive(Debug, Clone)]
pub struct DiscreteLti {
    pub ad: DMatrix<f64>,
    pub bd: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl DiscreteLti {
    pub fn states(&self) -> usize {
        self.ad.nrows()
    }

    pub(crate) fn output(&self, x: &DVector<f64>, u: &[f64]) -> Vec<f64> {
        let u = DVector::from_column_slice(u);
        let y = &self.c * x + &self.d * u;
        y.as_slice().to_vec()
    }

    pub(crate) fn advance(&self, x: &mut DVector<f64>, u: &[f64]) {
        if self.states() == 0 {
            return;
        }
        let u = DVector::from_column_slice(u);
        *x = &self.ad * &*x + &self.bd * u;
    }
}

/// Checks the shapes of a square (inputs = outputs) state-space model and
/// returns `(states, io_dimension)`.
pub fn check_shapes(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<(usize, usize)> {
    for m in [a, b, c, d] {
        m.validate()?;
    }
    let n = a.rows;
    let m = d.rows;
    let shape_err = |what: &str| {
        Err(Error::DimensionMismatch(format!(
            "{what}: A {}x{}, B {}x{}, C {}x{}, D {}x{}",
            a.rows, a.cols, b.rows, b.cols, c.rows, c.cols, d.rows, d.cols
        )))
    };
    if a.cols != n {
        return shape_err("A must be square");
    }
    if m == 0 || d.cols != m {
        return shape_err("D must be square and nonempty (square systems only)");
    }
    if b.rows != n || b.cols != m {
        return shape_err("B must be states x inputs");
    }
    if c.rows != m || c.cols != n {
        return shape_err("C must be outputs x states");
    }
    Ok((n, m))
}

/// ZOH discretization via the exponential of the augmented block
/// `[[A, B], [0, 0]]·dt`.
pub fn discretize_lti(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix, dt: f64) -> Result<DiscreteLti> {
    if !(dt > 0.0 && dt.is_finite()) {
        return domain(format!("dt must be positive, got {dt}"));
    }
    let (n, m) = check_shapes(a, b, c, d)?;
    let (ad, bd) = if n == 0 {
        (DMatrix::zeros(0, 0), DMatrix::zeros(0, m))
    } else {
        let mut aug = DMatrix::<f64>::zeros(n + m, n + m);
        aug.view_mut((0, 0), (n, n)).copy_from(&(a.to_dmatrix() * dt));
        aug.view_mut((0, n), (n, m)).copy_from(&(b.to_dmatrix() * dt));
        let e = aug.exp();
        if e.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(
                "matrix exponential did not converge to finite values".into(),
            ));
        }
        (
            e.view((0, 0), (n, n)).into_owned(),
            e.view((0, n), (n, m)).into_owned(),
        )
    };
    Ok(DiscreteLti {
        ad,
        bd,
        c: c.to_dmatrix(),
        d: d.to_dmatrix(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_lag_matches_closed_form() {
        let dt = 1e-3;
        let sys = discretize_lti(
            &Matrix::scalar(-1.0),
            &Matrix::scalar(1.0),
            &Matrix::scalar(1.0),
            &Matrix::scalar(0.0),
            dt,
        )
        .unwrap();
        let a = (-dt).exp();
        assert!((sys.ad[(0, 0)] - a).abs() < 1e-15);
        assert!((sys.bd[(0, 0)] - (1.0 - a)).abs() < 1e-15);
    }

    #[test]
    fn double_integrator_blocks() {
        // A = [[0,1],[0,0]], B = [0;1]: Ad = [[1,dt],[0,1]], Bd = [dt²/2; dt].
        let dt = 0.1;
        let sys = discretize_lti(
            &Matrix::new(2, 2, vec![0.0, 1.0, 0.0, 0.0]).unwrap(),
            &Matrix::new(2, 1, vec![0.0, 1.0]).unwrap(),
            &Matrix::new(1, 2, vec![1.0, 0.0]).unwrap(),
            &Matrix::scalar(0.0),
            dt,
        )
        .unwrap();
        assert!((sys.ad[(0, 1)] - dt).abs() < 1e-14);
        assert!((sys.bd[(0, 0)] - dt * dt / 2.0).abs() < 1e-14);
        assert!((sys.bd[(1, 0)] - dt).abs() < 1e-14);
    }

    #[test]
    fn shape_errors() {
        let bad = discretize_lti(
            &Matrix::new(1, 2, vec![0.0, 0.0]).unwrap(),
            &Matrix::scalar(1.0),
            &Matrix::scalar(1.0),
            &Matrix::scalar(0.0),
            0.1,
        );
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
        assert!(Matrix::new(2, 2, vec![1.0]).is_err());
        let neg_dt = discretize_lti(
            &Matrix::scalar(-1.0),
            &Matrix::scalar(1.0),
            &Matrix::scalar(1.0),
            &Matrix::scalar(0.0),
            -0.1,
        );
        assert!(matches!(neg_dt, Err(Error::Domain(_))));
    }
}
