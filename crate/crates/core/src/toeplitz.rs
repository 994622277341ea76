//! Direct Toeplitz determinants, the reference oracle for every recurrence.

use crate::ctx::PrecisionContext;
use crate::error::{Error, Result};
use crate::weight::MomentTable;
use crate::xc::XComplex;
use rayon::prelude::*;

/// A determinant together with an exact-singularity flag.
#[derive(Clone, Debug)]
pub struct Determinant {
    pub value: XComplex,
    pub singular: bool,
}

/// Gaussian elimination with full pivoting on a square matrix.
pub fn det_full_pivot(mut a: Vec<Vec<XComplex>>, prec: u32) -> Determinant {
    let n = a.len();
    let mut det = XComplex::one(prec);
    for col in 0..n {
        let (mut pr, mut pc, mut best) = (col, col, -1.0f64);
        for (i, row) in a.iter().enumerate().skip(col) {
            for (j, v) in row.iter().enumerate().skip(col) {
                let m = v.abs_f64();
                if m > best {
                    best = m;
                    pr = i;
                    pc = j;
                }
            }
        }
        if a[pr][pc].is_zero() {
            return Determinant { value: XComplex::zero(prec), singular: true };
        }
        if pr != col {
            a.swap(pr, col);
            det = -det;
        }
        if pc != col {
            for row in a.iter_mut() {
                row.swap(pc, col);
            }
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        let inv = piv.recip();
        let (top, rest) = a.split_at_mut(col + 1);
        let prow = &top[col];
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] * &inv;
            for j in col + 1..n {
                let d = &f * &prow[j];
                row[j] -= &d;
            }
        }
    }
    Determinant { value: det, singular: false }
}

/// I_N^{(eps)} = det[w_{j-k-eps}], j, k = 0..N-1; I_0 = 1.
pub fn toeplitz_det(eps: i64, n: usize, table: &MomentTable, ctx: &PrecisionContext) -> Result<Determinant> {
    let prec = ctx.prec();
    if n == 0 {
        return Ok(Determinant { value: XComplex::one(prec), singular: false });
    }
    let mut m = Vec::with_capacity(n);
    for j in 0..n as i64 {
        let mut row = Vec::with_capacity(n);
        for k in 0..n as i64 {
            row.push(table.get(j - k - eps)?.with_prec(prec));
        }
        m.push(row);
    }
    Ok(det_full_pivot(m, prec))
}

/// (r_N, rbar_N) = (-1)^N (I_N^{(1)}, I_N^{(-1)}) / I_N^{(0)}.
pub fn reflection_from_dets(n: usize, table: &MomentTable, ctx: &PrecisionContext) -> Result<(XComplex, XComplex)> {
    let d0 = toeplitz_det(0, n, table, ctx)?;
    if d0.singular || d0.value.is_zero() {
        return Err(Error::ZeroPivot(format!("I_{n} vanishes")));
    }
    let dp = toeplitz_det(1, n, table, ctx)?.value;
    let dm = toeplitz_det(-1, n, table, ctx)?.value;
    let sign = if n % 2 == 0 { 1i64 } else { -1 };
    Ok((&dp / &d0.value * sign, &dm / &d0.value * sign))
}

/// Reflection coefficients and I_N for N = 0..=n_max, all by determinants.
#[derive(Clone, Debug)]
pub struct OracleSequence {
    pub r: Vec<XComplex>,
    pub rbar: Vec<XComplex>,
    pub tau: Vec<XComplex>,
}

pub fn oracle_sequence(n_max: usize, table: &MomentTable, ctx: &PrecisionContext) -> Result<OracleSequence> {
    let rows: Vec<Result<(XComplex, XComplex, XComplex)>> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let d0 = toeplitz_det(0, n, table, ctx)?;
            if d0.singular || d0.value.is_zero() {
                return Err(Error::ZeroPivot(format!("I_{n} vanishes")));
            }
            let dp = toeplitz_det(1, n, table, ctx)?.value;
            let dm = toeplitz_det(-1, n, table, ctx)?.value;
            let sign = if n % 2 == 0 { 1i64 } else { -1 };
            Ok((&dp / &d0.value * sign, &dm / &d0.value * sign, d0.value))
        })
        .collect();
    let mut out = OracleSequence { r: vec![], rbar: vec![], tau: vec![] };
    for row in rows {
        let (a, b, c) = row?;
        out.r.push(a);
        out.rbar.push(b);
        out.tau.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        let p = 200;
        let m = |v: &[[i64; 3]; 3]| v.iter().map(|r| r.iter().map(|&x| XComplex::int(p, x)).collect()).collect();
        let d = det_full_pivot(m(&[[2, -1, 0], [-1, 2, -1], [0, -1, 2]]), p);
        assert!(d.value.abs_diff(&XComplex::int(p, 4)) < 1e-50);
        let s = det_full_pivot(m(&[[1, 2, 3], [2, 4, 6], [0, 0, 1]]), p);
        assert!(s.singular || s.value.abs_f64() < 1e-50);
        let z = det_full_pivot(m(&[[0, 1, 0], [1, 0, 0], [0, 0, 1]]), p);
        assert!(z.value.abs_diff(&XComplex::int(p, -1)) < 1e-50);
    }
}
