use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FockKet, ModeUnitary, C64};
use crate::error::{Error, Result};

/// Matrix permanent by Ryser's inclusion-exclusion formula with Gray-code
/// subset updates, O(2^n n).
pub fn permanent(m: &DMatrix<C64>) -> C64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "permanent of a non-square matrix");
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1..(1u64 << n) {
        let next = k ^ (k >> 1);
        let flipped = (next ^ gray).trailing_zeros() as usize;
        let added = next & (1 << flipped) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += m[(i, flipped)];
            } else {
                *s -= m[(i, flipped)];
            }
        }
        gray = next;
        let prod: C64 = row_sums.iter().product();
        if next.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// ⟨output| U |input⟩ computed as perm(U_sub) / √(Π n_in! Π n_out!),
/// where `U_sub[r][c] = U[out_c, in_r]` with rows and columns repeated by
/// occupation.
pub fn amplitude_by_permanent(input: &FockKet, output: &FockKet, u: &ModeUnitary) -> Result<C64> {
    let (n_in, n_out) = (input.total_photons(), output.total_photons());
    if n_in != n_out {
        return Err(Error::PhotonNumberMismatch {
            input: n_in,
            output: n_out,
        });
    }
    let expand = |ket: &FockKet| -> Result<Vec<usize>> {
        let mut idx = Vec::with_capacity(ket.total_photons());
        for &(mode, n) in ket.occupations() {
            let i = u.index_of(&mode).ok_or(Error::UnknownMode(mode))?;
            idx.extend(std::iter::repeat_n(i, n as usize));
        }
        Ok(idx)
    };
    let rows = expand(input)?;
    let cols = expand(output)?;
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
        u.matrix()[(cols[c], rows[r])]
    });
    let norm = (input.factorial_product() * output.factorial_product()).sqrt();
    Ok(permanent(&sub) / norm)
}
