//! Sylvester resultants.
//!
//! Convention: `res(f, g) = det Syl(f, g) = lc(f)^deg(g) * prod g(alpha)` over
//! the roots `alpha` of `f`, so `res(z - a, g) = g(a)`.

use super::field::FqElement;
use super::int::PadicError;
use super::ring::Coeff;
use super::unram::UnramifiedRingElement;
use super::Poly;

/// The `(m + n) x (m + n)` Sylvester matrix, rows for `f` first, highest
/// coefficient leftmost.
pub fn sylvester<C: Coeff>(f: &Poly<C>, g: &Poly<C>) -> Vec<Vec<C>> {
    let m = f.deg();
    let n = g.deg();
    let zero = f.coeffs()[0].zero_like();
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (src, shifts) in [(f, n), (g, m)] {
        let top: Vec<C> = src.coeffs().iter().rev().cloned().collect();
        for s in 0..shifts {
            let mut row = vec![zero.clone(); size];
            for (j, c) in top.iter().enumerate() {
                row[s + j] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// Resultant over a finite field by Gaussian elimination.
pub fn resultant_fq(f: &Poly<FqElement>, g: &Poly<FqElement>) -> FqElement {
    let field = f.coeffs()[0].field().clone();
    if f.is_zero() || g.is_zero() {
        return field.zero();
    }
    if f.deg() + g.deg() == 0 {
        return field.one();
    }
    let mut a = sylvester(f, g);
    let size = a.len();
    let mut det = field.one();
    for col in 0..size {
        let Some(piv) = (col..size).find(|&r| !a[r][col].is_zero()) else {
            return field.zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = det.negate();
        }
        let inv = a[col][col].inv().expect("nonzero pivot");
        det = det.times(&a[col][col]);
        for r in col + 1..size {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].times(&inv);
            for c in col..size {
                let sub = factor.times(&a[col][c]);
                a[r][c] = a[r][c].minus(&sub);
            }
        }
    }
    det
}

/// Determinant over `O_K'`, pivoting on the entry of least valuation so that
/// each elimination step only divides by a unit times a power of `p`.
pub fn determinant_padic(mut a: Vec<Vec<UnramifiedRingElement>>) -> Result<UnramifiedRingElement, PadicError> {
    let size = a.len();
    if size == 0 {
        return Err(PadicError::BelowPrecision { precision: 0 });
    }
    let mut det = a[0][0].one_like();
    for col in 0..size {
        let mut best: Option<(usize, u32)> = None;
        let mut all_zero = true;
        for (r, row) in a.iter().enumerate().skip(col) {
            match row[col].valuation() {
                Ok(super::Valuation::Finite(v)) => {
                    all_zero = false;
                    if best.is_none_or(|b| v < b.1) {
                        best = Some((r, v));
                    }
                }
                Ok(super::Valuation::Infinite) => {}
                // Undetermined entries are fatal only if no pivot is found.
                Err(_) => all_zero = false,
            }
        }
        let Some((piv, v)) = best else {
            if all_zero {
                return Ok(det.zero_like());
            }
            return Err(PadicError::BelowPrecision { precision: a[col][col].precision() });
        };
        if piv != col {
            a.swap(piv, col);
            det = det.negate();
        }
        det = det.times(&a[col][col]);
        let unit_inv = a[col][col].div_p_pow(v)?.inv()?;
        for r in col + 1..size {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].div_p_pow(v)?.times(&unit_inv);
            for c in col..size {
                let sub = factor.times(&a[col][c]);
                a[r][c] = a[r][c].minus(&sub);
            }
        }
    }
    Ok(det)
}

pub fn resultant_padic(
    f: &Poly<UnramifiedRingElement>,
    g: &Poly<UnramifiedRingElement>,
) -> Result<UnramifiedRingElement, PadicError> {
    if f.deg() + g.deg() == 0 {
        return Ok(f.coeffs()[0].one_like());
    }
    determinant_padic(sylvester(f, g))
}
