// Copyright 2026 The slitport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StateError;

/// Tolerance for the unitarity check performed when an operator is flagged
/// unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Dense complex operator acting on an ordered list of named registers.
///
/// The matrix index over the targets follows the same convention as
/// [`CompositeState`](super::CompositeState): the last target varies fastest.
#[derive(Clone, Debug)]
pub struct OperatorMatrix
{
    targets: Vec<String>,
    dims: Vec<usize>,
    matrix: DMatrix<Complex64>,
    unitary: bool,
}

impl OperatorMatrix
{
    pub fn new<S: AsRef<str>>(targets: &[S], dims: &[usize], matrix: DMatrix<Complex64>,
        unitary: bool) -> Result<Self, StateError>
    {
        if targets.len() != dims.len() || targets.is_empty()
        {
            return Err(StateError::RegisterMismatch(
                format!("{} target names for {} dimensions", targets.len(), dims.len())));
        }
        let total: usize = dims.iter().product();
        if matrix.nrows() != total || matrix.ncols() != total
        {
            return Err(StateError::DimensionMismatch {
                expected: total,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let op = OperatorMatrix {
            targets: targets.iter().map(|s| s.as_ref().to_owned()).collect(),
            dims: dims.to_vec(),
            matrix,
            unitary,
        };
        if unitary
        {
            let err = op.unitarity_error();
            if !(err < UNITARITY_TOLERANCE)
            {
                return Err(StateError::NotUnitary(err));
            }
        }
        Ok(op)
    }

    /// Rebind the operator to other register names, keeping the matrix.
    pub fn on<S: AsRef<str>>(mut self, targets: &[S]) -> Result<Self, StateError>
    {
        if targets.len() != self.targets.len()
        {
            return Err(StateError::RegisterMismatch(format!(
                "operator acts on {} registers, {} names given", self.targets.len(), targets.len())));
        }
        self.targets = targets.iter().map(|s| s.as_ref().to_owned()).collect();
        Ok(self)
    }

    pub fn targets(&self) -> &[String]
    {
        &self.targets
    }

    pub fn dims(&self) -> &[usize]
    {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<Complex64>
    {
        &self.matrix
    }

    pub fn is_unitary(&self) -> bool
    {
        self.unitary
    }

    /// `max |(M†M - I)_ij|`.
    pub fn unitarity_error(&self) -> f64
    {
        let n = self.matrix.nrows();
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0f64;
        for j in 0..n
        {
            for i in 0..n
            {
                let mut v = prod[(i, j)];
                if i == j
                {
                    v -= Complex64::new(1.0, 0.0);
                }
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// Sparse row view: for every row the list of `(column, value)` pairs with
    /// nonzero value.
    pub(crate) fn sparse_rows(&self) -> Vec<Vec<(usize, Complex64)>>
    {
        let n = self.matrix.nrows();
        (0..n).map(|r| {
            (0..n).filter_map(|c| {
                let v = self.matrix[(r, c)];
                if v.re == 0.0 && v.im == 0.0 { None } else { Some((c, v)) }
            }).collect()
        }).collect()
    }
}

#[cfg(test)]
mod tests
{
    use super::*;

    #[test]
    fn shape_is_checked()
    {
        let m = DMatrix::<Complex64>::identity(3, 3);
        assert!(OperatorMatrix::new(&["x"], &[2], m.clone(), true).is_err());
        assert!(OperatorMatrix::new(&["x"], &[3], m, true).is_ok());
    }

    #[test]
    fn unitary_flag_rejects_non_unitary()
    {
        let m = DMatrix::<Complex64>::from_element(2, 2, Complex64::new(0.5, 0.0));
        match OperatorMatrix::new(&["x"], &[2], m.clone(), true)
        {
            Err(StateError::NotUnitary(e)) => assert!(e > 0.1),
            other => panic!("unexpected {:?}", other),
        }
        assert!(OperatorMatrix::new(&["x"], &[2], m, false).is_ok());
    }

    #[test]
    fn rebinding_checks_arity()
    {
        let m = DMatrix::<Complex64>::identity(6, 6);
        let op = OperatorMatrix::new(&["int", "mode"], &[3, 2], m, true).unwrap();
        assert!(op.clone().on(&["only"]).is_err());
        let op = op.on(&["A1.internal", "C1"]).unwrap();
        assert_eq!(op.targets(), &["A1.internal".to_string(), "C1".to_string()]);
    }
}
