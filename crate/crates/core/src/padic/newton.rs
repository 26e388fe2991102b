//! Newton polygons of det(1 - tM)-type series with partially known
//! coefficients.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::poly::PadicPoly;
use crate::error::{Error, Result};

pub type Slope = Ratio<i64>;

/// What is known about one coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffInfo {
    Known(i64),
    AtLeast(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub slope: Slope,
    pub mult: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    /// Extreme points of the lower hull, strictly increasing in abscissa.
    pub vertices: Vec<(usize, i64)>,
    pub segments: Vec<Segment>,
    /// Every slope strictly below this bound is proven; `None` means the
    /// whole polygon is proven.
    pub provable_below: Option<Slope>,
}

impl NewtonPolygon {
    /// Multiset of slopes, one entry per multiplicity.
    pub fn slope_list(&self) -> Vec<Slope> {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat(s.slope).take(s.mult))
            .collect()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.segments.iter().map(|s| s.mult).sum()
    }

    /// Segments with slope strictly below `bound`.
    pub fn below(&self, bound: Slope) -> Vec<Segment> {
        self.segments.iter().filter(|s| s.slope < bound).cloned().collect()
    }
}

/// Lower convex hull of points sorted by abscissa. Collinear points are
/// dropped so that consecutive slopes strictly increase.
pub fn lower_hull(points: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &pt in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point when it is on or above the chord
            let lhs = (y2 - y1) as i128 * (pt.0 - x1) as i128;
            let rhs = (pt.1 - y1) as i128 * (x2 - x1) as i128;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

fn segments_of(vertices: &[(usize, i64)]) -> Vec<Segment> {
    vertices
        .windows(2)
        .map(|w| Segment {
            slope: Ratio::new(w[1].1 - w[0].1, (w[1].0 - w[0].0) as i64),
            mult: w[1].0 - w[0].0,
        })
        .collect()
}

/// Largest bound below which an unknown coefficient at `i` with valuation
/// at least `b` cannot change the slopes of the hull.
fn point_limit(vertices: &[(usize, i64)], segs: &[Segment], i: usize, b: i64) -> Option<Slope> {
    for (r, &(x, v)) in vertices.iter().enumerate() {
        if i <= x {
            return None;
        }
        let c = Ratio::new(b - v, (i - x) as i64);
        match segs.get(r) {
            Some(next) if c >= next.slope => continue,
            _ => return Some(c),
        }
    }
    None
}

fn min_opt(a: Option<Slope>, b: Option<Slope>) -> Option<Slope> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Newton polygon of coefficients with known valuations, where unknown
/// coefficients only bound the provable slope range. `tail`, when given,
/// is a lower bound for the valuation of every coefficient past the list;
/// it must be convex with unbounded increments.
pub fn polygon_from_info(info: &[CoeffInfo], tail: Option<&dyn Fn(usize) -> i64>) -> Result<NewtonPolygon> {
    match info.first() {
        None => return Err(Error::Newton("empty coefficient list".into())),
        Some(CoeffInfo::Known(0)) => {}
        Some(_) => return Err(Error::Newton("constant coefficient is not a unit".into())),
    }
    let points: Vec<(usize, i64)> = info
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match c {
            CoeffInfo::Known(v) => Some((i, *v)),
            CoeffInfo::AtLeast(_) => None,
        })
        .collect();
    let vertices = lower_hull(&points);
    let segments = segments_of(&vertices);

    let mut bound: Option<Slope> = None;
    for (i, c) in info.iter().enumerate() {
        if let CoeffInfo::AtLeast(b) = c {
            if *b == i64::MAX {
                continue;
            }
            bound = min_opt(bound, point_limit(&vertices, &segments, i, *b));
        }
    }
    if let Some(g) = tail {
        let start = info.len();
        let last_slope = segments.last().map(|s| s.slope);
        let mut prev = g(start.saturating_sub(1).max(0));
        for i in start..start + 20_000 {
            let b = g(i);
            bound = min_opt(bound, point_limit(&vertices, &segments, i, b));
            let step = Ratio::from_integer(b - prev);
            prev = b;
            let past_bound = bound.map_or(false, |s| step > s);
            let past_hull = last_slope.map_or(true, |s| step > s);
            if i > start && past_bound && past_hull {
                break;
            }
        }
    }
    Ok(NewtonPolygon { vertices, segments, provable_below: bound })
}

pub fn coeff_info(f: &PadicPoly) -> Vec<CoeffInfo> {
    f.coeffs
        .iter()
        .map(|c| match c.valuation() {
            Some(v) => CoeffInfo::Known(v),
            None => CoeffInfo::AtLeast(c.valuation_floor()),
        })
        .collect()
}

/// Newton polygon of a polynomial with p-adic coefficients; c_0 must be a
/// unit.
pub fn newton_polygon(f: &PadicPoly) -> Result<NewtonPolygon> {
    if f.is_empty() {
        return Err(Error::Newton("empty polynomial".into()));
    }
    polygon_from_info(&coeff_info(f), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slopes(p: u64, c: &[i64]) -> Vec<(Slope, usize)> {
        let f = PadicPoly::from_i64s(p, c, 30).unwrap();
        newton_polygon(&f).unwrap().segments.into_iter().map(|s| (s.slope, s.mult)).collect()
    }

    #[test]
    fn two_slopes() {
        assert_eq!(slopes(3, &[1, -1, 3]), vec![(Ratio::from(0), 1), (Ratio::from(1), 1)]);
    }

    #[test]
    fn known_factorization() {
        // (1-t)(1-5t)(1-25t)
        assert_eq!(
            slopes(5, &[1, -31, 155, -125]),
            vec![(Ratio::from(0), 1), (Ratio::from(1), 1), (Ratio::from(2), 1)]
        );
    }

    #[test]
    fn constant_has_no_slopes() {
        assert!(slopes(3, &[1]).is_empty());
    }

    #[test]
    fn collinear_points_merge() {
        // valuations 0,1,2,3 are collinear
        assert_eq!(slopes(3, &[1, 3, 9, 27]), vec![(Ratio::from(1), 3)]);
    }

    #[test]
    fn errors() {
        assert!(newton_polygon(&PadicPoly { coeffs: vec![] }).is_err());
        assert!(newton_polygon(&PadicPoly::from_i64s(3, &[3, 1], 30).unwrap()).is_err());
    }

    #[test]
    fn zero_flag_bounds_the_range() {
        use CoeffInfo::*;
        // known (0,0),(1,1); coefficient 2 known only to be >= 5
        let np = polygon_from_info(&[Known(0), Known(1), AtLeast(5)], None).unwrap();
        assert_eq!(np.segments.len(), 1);
        assert_eq!(np.provable_below, Some(Ratio::from(4)));
        // a bound below the hull caps the range before the first slope
        let np = polygon_from_info(&[Known(0), AtLeast(0), Known(4)], None).unwrap();
        assert_eq!(np.provable_below, Some(Ratio::from(0)));
    }

    #[test]
    fn fractional_slope() {
        assert_eq!(slopes(3, &[1, 0, 3]), vec![(Ratio::new(1, 2), 2)]);
    }
}
