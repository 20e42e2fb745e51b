use rug::Float;

use super::{BigReal, NumericsError, Precision};

/// Solves min ‖A c − y‖₂ by Householder QR.
///
/// `rows[i]` is the i-th row of A. Rank deficiency (a pivot below 2^{-bits/2}
/// of the column norm) is reported as a singular system.
pub fn least_squares(rows: &[Vec<BigReal>], y: &[BigReal], prec: Precision) -> Result<Vec<BigReal>, NumericsError> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if n == 0 || m < n || y.len() != m || rows.iter().any(|r| r.len() != n) {
        return Err(NumericsError::SingularSystem { rows: m, cols: n });
    }
    let wp = prec.bits() + 32;
    let mut a: Vec<Vec<Float>> = rows.iter().map(|r| r.iter().map(|v| Float::with_val(wp, v)).collect()).collect();
    let mut b: Vec<Float> = y.iter().map(|v| Float::with_val(wp, v)).collect();
    let tiny = Float::with_val(wp, Float::i_exp(1, -(prec.bits() as i32) / 2));

    for k in 0..n {
        let mut norm_sq = Float::new(wp);
        for row in a.iter().skip(k) {
            norm_sq += Float::with_val(wp, row[k].square_ref());
        }
        let norm = norm_sq.sqrt();
        let col_scale =
            a.iter()
                .map(|r| Float::with_val(wp, r[k].abs_ref()))
                .fold(Float::new(wp), |acc, v| if v > acc { v } else { acc });
        if norm.is_zero() || norm < Float::with_val(wp, &tiny * &col_scale) {
            return Err(NumericsError::SingularSystem { rows: m, cols: n });
        }
        let alpha = if a[k][k].is_sign_negative() { norm } else { -norm };
        // v = x − α e_1, stored in place in column k.
        a[k][k] -= &alpha;
        let mut v_sq = Float::new(wp);
        for row in a.iter().skip(k) {
            v_sq += Float::with_val(wp, row[k].square_ref());
        }
        for j in (k + 1)..n {
            let mut dot = Float::new(wp);
            for row in a.iter().skip(k) {
                dot += Float::with_val(wp, &row[k] * &row[j]);
            }
            let f = Float::with_val(wp, &dot * 2u32) / &v_sq;
            for row in a.iter_mut().skip(k) {
                let t = Float::with_val(wp, &f * &row[k]);
                row[j] -= t;
            }
        }
        let mut dot = Float::new(wp);
        for (row, bi) in a.iter().zip(b.iter()).skip(k) {
            dot += Float::with_val(wp, &row[k] * bi);
        }
        let f = Float::with_val(wp, &dot * 2u32) / &v_sq;
        for (row, bi) in a.iter().zip(b.iter_mut()).skip(k) {
            *bi -= Float::with_val(wp, &f * &row[k]);
        }
        a[k][k] = alpha;
    }

    let mut c = vec![Float::new(wp); n];
    for k in (0..n).rev() {
        let mut acc = b[k].clone();
        for j in (k + 1)..n {
            acc -= Float::with_val(wp, &a[k][j] * &c[j]);
        }
        c[k] = acc / &a[k][k];
    }
    Ok(c.into_iter().map(|v| Float::with_val(prec.bits(), v)).collect())
}
