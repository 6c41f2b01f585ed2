//! Newton polygons of polynomials over `O_K'`.

use num_integer::Integer;
use num_rational::Ratio;

use super::fqpoly::FqPoly;
use super::int::{PadicError, ValuationBound};
use super::ring::Coeff;
use super::unram::UnramifiedRingElement;
use super::Poly;

/// One edge of the lower hull of `(i, val c_i)`.
///
/// `slope` is the valuation of each root belonging to the edge, so it is the
/// negative of the geometric slope. The edge runs from `start` to
/// `start + length` in the exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub slope: Ratio<i64>,
    pub length: usize,
    pub start: usize,
    pub start_height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Ordered by increasing slope.
    pub segments: Vec<Segment>,
    /// Multiplicity of the root `0`.
    pub zero_order: usize,
}

impl NewtonPolygon {
    pub fn of(f: &Poly<UnramifiedRingElement>) -> Result<Self, PadicError> {
        let bounds: Vec<ValuationBound> = f.coeffs().iter().map(|c| c.valuation_bound()).collect();
        Self::from_bounds(&bounds)
    }

    /// Builds the polygon from per-coefficient valuation data. Exactly zero
    /// coefficients are skipped; a coefficient known only to be divisible by
    /// `p^n` is an error whenever it could touch or undercut the hull.
    pub fn from_bounds(bounds: &[ValuationBound]) -> Result<Self, PadicError> {
        let mut points: Vec<(usize, u32)> = Vec::new();
        let mut vague: Vec<(usize, u32)> = Vec::new();
        for (i, b) in bounds.iter().enumerate() {
            match *b {
                ValuationBound::Exact(v) => points.push((i, v)),
                ValuationBound::AtLeast(n) => vague.push((i, n)),
                ValuationBound::Infinite => {}
            }
        }
        let Some(&(first, _)) = points.first() else {
            return Err(PadicError::BelowPrecision {
                precision: vague.iter().map(|x| x.1).min().unwrap_or(0),
            });
        };
        if let Some(&(_, n)) = vague.iter().find(|x| x.0 < first) {
            return Err(PadicError::BelowPrecision { precision: n });
        }
        let mut hull: Vec<(usize, u32)> = Vec::new();
        for &pt in &points {
            while hull.len() >= 2 {
                let (x1, y1) = hull[hull.len() - 2];
                let (x2, y2) = hull[hull.len() - 1];
                // Drop the middle point when it lies on or above the chord.
                let cross = (x2 as i64 - x1 as i64) * (pt.1 as i64 - y1 as i64)
                    - (y2 as i64 - y1 as i64) * (pt.0 as i64 - x1 as i64);
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let last = hull.last().expect("nonempty").0;
        for &(i, n) in &vague {
            if i > last {
                return Err(PadicError::BelowPrecision { precision: n });
            }
            let seg = hull.windows(2).find(|w| w[0].0 <= i && i <= w[1].0).expect("inside the hull range");
            let (x1, y1) = seg[0];
            let (x2, y2) = seg[1];
            // n <= height of the hull at i, compared without division.
            let lhs = n as i64 * (x2 - x1) as i64;
            let rhs = y1 as i64 * (x2 - x1) as i64 + (y2 as i64 - y1 as i64) * (i - x1) as i64;
            if lhs <= rhs {
                return Err(PadicError::BelowPrecision { precision: n });
            }
        }
        let mut segments: Vec<Segment> = hull
            .windows(2)
            .map(|w| {
                let (x1, y1) = w[0];
                let (x2, y2) = w[1];
                Segment {
                    slope: Ratio::new(y1 as i64 - y2 as i64, (x2 - x1) as i64),
                    length: x2 - x1,
                    start: x1,
                    start_height: y1,
                }
            })
            .collect();
        segments.reverse();
        Ok(NewtonPolygon { segments, zero_order: first })
    }

    pub fn total_length(&self) -> usize {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Slopes repeated by multiplicity, increasing.
    pub fn root_valuations(&self) -> Vec<Ratio<i64>> {
        self.segments.iter().flat_map(|s| std::iter::repeat_n(s.slope, s.length)).collect()
    }
}

/// Residual polynomial of `f` along `seg`: with `slope = a/b` in lowest
/// terms, its roots are the residues of `alpha^b / p^a` for the roots
/// `alpha` of `f` on that edge.
pub fn residual_polynomial(f: &Poly<UnramifiedRingElement>, seg: &Segment) -> Result<FqPoly, PadicError> {
    let a = *seg.slope.numer();
    let b = *seg.slope.denom();
    let deg = seg.length / b as usize;
    let mut coeffs = Vec::with_capacity(deg + 1);
    for k in 0..=deg {
        let idx = seg.start + k * b as usize;
        let line = seg.start_height as i64 - k as i64 * a;
        let c = &f.coeffs()[idx];
        let on_line = matches!(c.valuation_bound(), ValuationBound::Exact(v) if v as i64 == line);
        coeffs.push(if on_line {
            c.div_p_pow(line as u32)?.residue()
        } else {
            c.residue().zero_like()
        });
    }
    Ok(Poly::new(coeffs))
}

/// Inverse of `a` modulo `b`, for coprime `a` and `b >= 1`.
pub fn inverse_mod(a: i64, b: i64) -> i64 {
    if b == 1 {
        return 0;
    }
    let g = a.extended_gcd(&b);
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{FqField, RingHandle, UnramifiedRing};
    use std::sync::Arc;

    fn poly(ring: &Arc<crate::padic::UnramifiedRing>, c: &[i64]) -> Poly<UnramifiedRingElement> {
        Poly::new(c.iter().map(|&x| ring.from_int(x)).collect())
    }

    fn slopes(np: &NewtonPolygon) -> Vec<(Ratio<i64>, usize)> {
        np.segments.iter().map(|s| (s.slope, s.length)).collect()
    }

    #[test]
    fn eisenstein_binomial() {
        let ring = UnramifiedRing::new(&FqField::new(5, 1).unwrap(), 10);
        let np = NewtonPolygon::of(&poly(&ring, &[-5, 0, 0, 1])).unwrap();
        assert_eq!(slopes(&np), vec![(Ratio::new(1, 3), 3)]);
        let np = NewtonPolygon::of(&poly(&ring, &[-50, 0, 1])).unwrap();
        assert_eq!(slopes(&np), vec![(Ratio::from_integer(1), 2)]);
        let r = residual_polynomial(&poly(&ring, &[-50, 0, 1]), &np.segments[0]).unwrap();
        assert_eq!(r.prime_coeffs(), vec![3, 0, 1]);
    }

    #[test]
    fn mixed_hull() {
        // (z - 1)(z^2 - 5) = z^3 - z^2 - 5z + 5
        let ring = UnramifiedRing::new(&FqField::new(5, 1).unwrap(), 10);
        let np = NewtonPolygon::of(&poly(&ring, &[5, -5, -1, 1])).unwrap();
        assert_eq!(slopes(&np), vec![(Ratio::from_integer(0), 1), (Ratio::new(1, 2), 2)]);
        let np = NewtonPolygon::of(&poly(&ring, &[0, 0, 5, 1])).unwrap();
        assert_eq!(np.zero_order, 2);
        assert_eq!(np.total_length() + np.zero_order, 3);
    }

    #[test]
    fn vague_coefficient_is_reported() {
        let ring = UnramifiedRing::new(&FqField::new(5, 1).unwrap(), 3);
        // 125 reads as zero at precision 3 but is not known to be zero.
        let c = ring.from_int(125).mul_p_pow(0);
        let mut coeffs = vec![c.times(&ring.from_int(1)), ring.zero(), ring.one()];
        assert!(coeffs[0].valuation().is_err());
        assert!(NewtonPolygon::of(&Poly::new(coeffs.clone())).is_err());
        coeffs[0] = ring.zero();
        assert_eq!(NewtonPolygon::of(&Poly::new(coeffs)).unwrap().zero_order, 2);
    }
}
