use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ModeId, C64};
use crate::error::{Error, Result};

/// Unitarity tolerance on max |U†U − I|.
pub const UNITARITY_TOL: f64 = 1e-12;

/// An m×m unitary acting on an ordered list of modes.
///
/// Column `i` is the image of `a†_{modes[i]}`.
#[derive(Clone, Debug)]
pub struct ModeUnitary {
    modes: Vec<ModeId>,
    matrix: DMatrix<C64>,
    index: HashMap<ModeId, usize>,
}

impl ModeUnitary {
    pub fn new(modes: Vec<ModeId>, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != modes.len() || matrix.ncols() != modes.len() {
            return Err(Error::Config(format!(
                "unitary is {}x{} but lists {} modes",
                matrix.nrows(),
                matrix.ncols(),
                modes.len()
            )));
        }
        let mut index = HashMap::with_capacity(modes.len());
        for (i, m) in modes.iter().enumerate() {
            if index.insert(*m, i).is_some() {
                return Err(Error::DuplicateMode(*m));
            }
        }
        let deviation = unitarity_deviation(&matrix);
        if !(deviation < UNITARITY_TOL) {
            return Err(Error::NonUnitaryMatrix { deviation });
        }
        Ok(ModeUnitary {
            modes,
            matrix,
            index,
        })
    }

    pub fn identity(modes: Vec<ModeId>) -> Self {
        let n = modes.len();
        Self::new(modes, DMatrix::identity(n, n)).expect("identity is unitary")
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn index_of(&self, mode: &ModeId) -> Option<usize> {
        self.index.get(mode).copied()
    }

    /// Amplitude for a†_from to become a†_to.
    pub fn element(&self, to: &ModeId, from: &ModeId) -> C64 {
        match (self.index_of(to), self.index_of(from)) {
            (Some(j), Some(i)) => self.matrix[(j, i)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// `later ∘ self` on the same mode list (matrix product `later · self`).
    pub fn then(&self, later: &ModeUnitary) -> Result<ModeUnitary> {
        if later.modes != self.modes {
            return Err(Error::Config(
                "composed unitaries must share their mode list".into(),
            ));
        }
        ModeUnitary::new(self.modes.clone(), &later.matrix * &self.matrix)
    }

    /// Nonzero entries of each column as (row, value).
    pub(crate) fn sparse_columns(&self) -> Vec<Vec<(usize, C64)>> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .filter_map(|j| {
                        let v = self.matrix[(j, i)];
                        (v != Complex64::new(0.0, 0.0)).then_some((j, v))
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn unitarity_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let prod = m.adjoint() * m;
    let id = DMatrix::<C64>::identity(n, n);
    (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
