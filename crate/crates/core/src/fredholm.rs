//! Characteristic series det(1 - tU) of truncated compact operators,
//! their certification, slope tables, and the classicality comparison.
//!
//! Stored U_p matrices have rows of degree i with valuation >= i. A
//! principal m-minor of the untruncated operator that meets a row beyond
//! the cutoff D therefore has valuation >= D + 1 + lambda(m - 1), where
//! lambda(r) is the sum of the r smallest row degrees. This caps the
//! absolute precision of each coefficient rigorously; the scan over
//! several cutoffs is a consistency check on top.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::automorphic::{BlockMatrix, BrandtMatrix, Convention};
use crate::error::{Error, Result};
use crate::linalg::{fredholm_coefficients, Matrix};
use crate::padic::modular::Zmod;
use crate::padic::newton::{polygon_from_info, CoeffInfo, NewtonPolygon, Slope};
use crate::padic::{PadicPoly, PadicScalar};
use crate::ring::{ResidueAlgebra, SeriesRing};
use crate::weight::{tail_floor, TorusCharacter};

/// v(c_m) >= lambda_b(m) + m * shift for the untruncated operator, where
/// lambda_b(m) = sum_{i < m} floor(i / b) and b is the number of basis
/// vectors per degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailBound {
    pub blocks: usize,
    pub shift: i64,
}

impl TailBound {
    pub fn lambda(&self, m: usize) -> i64 {
        let b = self.blocks.max(1);
        (0..m).map(|i| (i / b) as i64).sum()
    }

    pub fn at(&self, m: usize) -> i64 {
        self.lambda(m) + m as i64 * self.shift
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FredholmSeries {
    pub p: u64,
    /// c_0 .. c_T; c_0 = 1.
    pub coeffs: Vec<PadicScalar>,
    pub degree_cutoff: Option<usize>,
    /// Coefficient m was unchanged under a larger cutoff.
    pub stable: Vec<bool>,
    pub tail: Option<TailBound>,
}

impl FredholmSeries {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn t_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn to_poly(&self) -> Result<PadicPoly> {
        PadicPoly::new(self.coeffs.clone())
    }

    pub fn coeff_info(&self) -> Vec<CoeffInfo> {
        self.coeffs
            .iter()
            .map(|c| match c.valuation() {
                Some(v) => CoeffInfo::Known(v),
                None => CoeffInfo::AtLeast(c.valuation_floor()),
            })
            .collect()
    }

    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        let info = self.coeff_info();
        match self.tail {
            Some(t) => polygon_from_info(&info, Some(&move |m| t.at(m))),
            None => polygon_from_info(&info, None),
        }
    }

    /// Minimum over the first `terms` coefficients of v(a_m - b_m),
    /// limited by the precision of both; `None` when identical exactly.
    pub fn agreement(&self, other: &FredholmSeries, terms: usize) -> Option<i64> {
        let n = terms.min(self.len()).min(other.len());
        (0..n)
            .map(|m| self.coeffs[m].distance_valuation(&other.coeffs[m]))
            .filter(|&v| v != i64::MAX)
            .min()
    }

    /// Largest m such that c_0..c_m are all stable.
    pub fn trusted_degree(&self) -> usize {
        self.stable.iter().take_while(|&&s| s).count().saturating_sub(1)
    }
}

/// det(1 - tM) for a matrix of p-adic scalars, without divisions: the
/// matrix is rescaled to integral residues and the characteristic
/// polynomial is computed by the Berkowitz recurrence.
pub fn charpoly_division_free(m: &Matrix<PadicScalar>, p: u64) -> Result<PadicPoly> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension("characteristic polynomial of a non-square matrix".into()));
    }
    let n = m.rows();
    let v0 = m.entries().iter().map(|x| x.valuation_floor()).min().unwrap_or(0);
    let v0 = if v0 == i64::MAX { 0 } else { v0 };
    let abs = m.entries().iter().map(|x| x.abs_precision()).min().unwrap_or(i64::MAX);
    if abs == i64::MAX {
        // every entry is exactly zero
        let mut c = vec![PadicScalar::from_i64(p, 1, 1)?];
        c.extend((0..n).map(|_| PadicScalar::exact_zero(p)));
        return PadicPoly::new(c);
    }
    let digits = (abs - v0).max(0) as u32;
    let ctx = Zmod::new(p, digits)?;
    let mut flat = Vec::with_capacity(n * n);
    for x in m.entries() {
        let x = x.shift(-v0);
        flat.push(if x.is_zero() { 0 } else { x.to_residue(&ctx)? });
    }
    let mm = Matrix::from_fn(n, n, |i, j| flat[i * n + j]);
    let c = fredholm_coefficients(&ctx, &mm, n);
    let coeffs = c
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            if k == 0 {
                PadicScalar::from_i64(p, 1, digits.max(1))
            } else {
                Ok(PadicScalar::from_scaled_residue(&ctx, r, k as i64 * v0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PadicPoly::new(coeffs)
}

fn check_decay(b: &BlockMatrix<u128>, ctx: &Zmod) -> Result<()> {
    let m = &b.matrix;
    for r in 0..m.rows() {
        let d = b.row_degree(r) as u32;
        if let Some(v) = m.row(r).iter().filter_map(|&x| ctx.valuation(x)).min() {
            if v < d.min(ctx.digits()) {
                return Err(Error::Certification(format!(
                    "row {r} of degree {d} has an entry of valuation {v}: the operator is not compact in this basis"
                )));
            }
        }
    }
    Ok(())
}

/// det(1 - tB) through t^T, with rigorous truncation caps. B must be a
/// square compact (U_p-type) block matrix.
pub fn fredholm_series(b: &BlockMatrix<u128>, t: usize) -> Result<FredholmSeries> {
    let ctx = Zmod::new(b.p, b.precision)?;
    let n = b.matrix.rows();
    if n != b.matrix.cols() || b.degrees.target != b.degrees.source {
        return Err(Error::Dimension("Fredholm series of a non-square block matrix".into()));
    }
    check_decay(b, &ctx)?;
    let len = b.degrees.target + 1;
    let blocks = n / len;
    let tail = TailBound { blocks, shift: b.shift };
    let raw = fredholm_coefficients(&ctx, &b.matrix, t);
    let d = b.degrees.target as i64;
    let coeffs = raw
        .iter()
        .enumerate()
        .map(|(m, &r)| {
            if m == 0 {
                return Ok(PadicScalar::from_i64(b.p, 1, b.precision.max(1))?);
            }
            let x = PadicScalar::from_residue(&ctx, r);
            let cap = if m > n { i64::MAX } else { d + 1 + tail.lambda(m - 1) };
            let x = if m <= n { x.cap_abs(cap) } else { x };
            Ok(x.shift(m as i64 * b.shift))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FredholmSeries {
        p: b.p,
        stable: vec![false; coeffs.len()],
        coeffs,
        degree_cutoff: Some(b.degrees.target),
        tail: Some(tail),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub series: FredholmSeries,
    pub cutoffs: Vec<usize>,
    /// Agreement valuation between consecutive cutoffs.
    pub agreements: Vec<Option<i64>>,
    pub trusted_degree: usize,
}

/// Recompute the series along ascending cutoffs. Coefficient m is stable
/// when the last two cutoffs agree to the precision both claim. Two runs
/// that disagree inside their claimed precision indicate a bug or too
/// little working precision and are reported as an error.
pub fn stabilization_scan(
    build: impl Fn(usize) -> Result<FredholmSeries>,
    cutoffs: &[usize],
    t: usize,
) -> Result<ScanResult> {
    if cutoffs.len() < 3 {
        return Err(Error::Config("stabilization scan needs at least three cutoffs".into()));
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("cutoffs must be strictly increasing".into()));
    }
    let runs = cutoffs.iter().map(|&d| build(d)).collect::<Result<Vec<_>>>()?;
    let mut agreements = Vec::new();
    for w in runs.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for m in 0..=t.min(a.t_degree()).min(b.t_degree()) {
            let (x, y) = (&a.coeffs[m], &b.coeffs[m]);
            let claimed = x.abs_precision().min(y.abs_precision());
            let dist = x.distance_valuation(y);
            if dist < claimed {
                return Err(Error::Certification(format!(
                    "non-monotone agreement at t^{m}: runs differ at valuation {dist} inside claimed precision {claimed}"
                )));
            }
        }
        agreements.push(a.agreement(b, t + 1));
    }
    let (prev, last) = (&runs[runs.len() - 2], &runs[runs.len() - 1]);
    let mut series = last.clone();
    series.coeffs.truncate(t + 1);
    series.stable = (0..series.coeffs.len())
        .map(|m| {
            let x = &prev.coeffs[m];
            let y = &series.coeffs[m];
            m == 0 || (y.valuation().is_some() && x.distance_valuation(y) >= x.abs_precision().min(y.abs_precision()))
        })
        .collect();
    let trusted_degree = series.trusted_degree();
    Ok(ScanResult { series, cutoffs: cutoffs.to_vec(), agreements, trusted_degree })
}

fn fmt_slope(s: &Slope) -> String {
    if s.is_integer() {
        format!("{}/1", s.numer())
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

fn parse_slope(s: &str) -> std::result::Result<Slope, String> {
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let a: i64 = a.trim().parse().map_err(|_| format!("bad slope `{s}`"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad slope `{s}`"))?;
    if b == 0 {
        return Err(format!("bad slope `{s}`"));
    }
    Ok(Ratio::new(a, b))
}

mod slope_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &Slope, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&fmt_slope(s))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Slope, D::Error> {
        let s = String::deserialize(de)?;
        parse_slope(&s).map_err(serde::de::Error::custom)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(s: &Option<Slope>, ser: S) -> std::result::Result<S::Ok, S::Error> {
            match s {
                Some(x) => ser.serialize_str(&fmt_slope(x)),
                None => ser.serialize_str("inf"),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Option<Slope>, D::Error> {
            let s = String::deserialize(de)?;
            if s == "inf" {
                return Ok(None);
            }
            parse_slope(&s).map(Some).map_err(serde::de::Error::custom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeEntry {
    #[serde(with = "slope_serde")]
    pub slope: Slope,
    pub mult: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeTable {
    pub slopes: Vec<SlopeEntry>,
    /// Every slope strictly below this is proven, including slopes that
    /// coefficients beyond the computed range could create ("inf" when
    /// the table is complete).
    #[serde(with = "slope_serde::opt")]
    pub certified_up_to_slope: Option<Slope>,
    pub convention: String,
}

impl SlopeTable {
    /// Reported segments: both endpoints are coefficients of determined
    /// valuation and no coefficient of undetermined valuation in between
    /// could lie below the chord.
    pub fn from_polygon(poly: &NewtonPolygon, info: &[CoeffInfo], convention: Convention) -> Self {
        let mut slopes = Vec::new();
        for w in poly.vertices.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            let chord = |x: usize| Ratio::new(y0 * (x1 - x) as i64 + y1 * (x - x0) as i64, (x1 - x0) as i64);
            let blocked = (x0 + 1..x1).any(|x| match info[x] {
                CoeffInfo::AtLeast(b) => b != i64::MAX && Ratio::from_integer(b) < chord(x),
                CoeffInfo::Known(_) => false,
            });
            if blocked {
                break;
            }
            slopes.push(SlopeEntry { slope: Ratio::new(y1 - y0, (x1 - x0) as i64), mult: x1 - x0 });
        }
        SlopeTable { slopes, certified_up_to_slope: poly.provable_below, convention: convention.tag().into() }
    }

    pub fn from_series(series: &FredholmSeries, convention: Convention) -> Result<Self> {
        let poly = series.newton_polygon()?;
        Ok(Self::from_polygon(&poly, &series.coeff_info(), convention))
    }

    /// Exact table of a Brandt matrix.
    pub fn from_brandt(b: &BrandtMatrix, p: u64, convention: Convention) -> Result<Self> {
        let mut poly = b.newton_polygon(p)?;
        if convention == Convention::Normalized && b.operator == crate::quaternion::Operator::Up {
            for s in &mut poly.segments {
                s.slope -= 1;
            }
        }
        let slopes = poly.segments.iter().map(|s| SlopeEntry { slope: s.slope, mult: s.mult }).collect();
        Ok(SlopeTable { slopes, certified_up_to_slope: None, convention: convention.tag().into() })
    }

    pub fn multiset(&self) -> Vec<Slope> {
        self.slopes.iter().flat_map(|e| std::iter::repeat(e.slope).take(e.mult)).collect()
    }

    /// Entries strictly below `bound`.
    pub fn below(&self, bound: Slope) -> Vec<SlopeEntry> {
        self.slopes.iter().filter(|e| e.slope < bound).cloned().collect()
    }

    pub fn count_below(&self, bound: Slope) -> usize {
        self.below(bound).iter().map(|e| e.mult).sum()
    }

    /// True when the table says something about every slope below
    /// `bound`: either it is proven there or a reported slope reaches it.
    pub fn covers(&self, bound: Slope) -> bool {
        self.certified_up_to_slope.map_or(true, |c| c >= bound) || self.slopes.iter().any(|e| e.slope >= bound)
    }

    pub fn is_proven_below(&self, bound: Slope) -> bool {
        self.certified_up_to_slope.map_or(true, |c| c >= bound)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("slope,mult\n");
        for e in &self.slopes {
            out.push_str(&format!("{},{}\n", fmt_slope(&e.slope), e.mult));
        }
        out
    }
}

impl fmt::Display for SlopeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.slopes.iter().map(|e| format!("{}^{}", fmt_slope(&e.slope), e.mult)).collect();
        write!(f, "[{}]", parts.join(", "))?;
        match self.certified_up_to_slope {
            Some(c) => write!(f, " proven below {}", fmt_slope(&c)),
            None => write!(f, " complete"),
        }
    }
}

/// (n + 1) * f for eta = diag(1, p^f) at a weight with algebraic part
/// (n1, n2), n = n1 - n2.
pub fn small_slope_bound(weight: &TorusCharacter, f: u32) -> Result<Slope> {
    let n = weight.dominant_n()?;
    Ok(Ratio::from_integer((n as i64 + 1) * f as i64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    #[serde(with = "slope_serde")]
    pub slope: Slope,
    pub overconvergent: usize,
    pub classical: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalityReport {
    #[serde(with = "slope_serde")]
    pub bound: Slope,
    pub verdict: Verdict,
    pub discrepancies: Vec<Discrepancy>,
    /// Both tables are proven (not only reported) below the bound.
    pub rigorous: bool,
}

/// Compare the slope multisets strictly below `bound`.
pub fn classicality_compare(oc: &SlopeTable, classical: &SlopeTable, bound: Slope) -> Result<ClassicalityReport> {
    for (name, t) in [("overconvergent", oc), ("classical", classical)] {
        if !t.covers(bound) {
            return Err(Error::Certification(format!(
                "{name} slope table does not reach the bound {}",
                fmt_slope(&bound)
            )));
        }
    }
    let mut keys: Vec<Slope> = oc.below(bound).iter().chain(classical.below(bound).iter()).map(|e| e.slope).collect();
    keys.sort();
    keys.dedup();
    let mult = |t: &SlopeTable, s: Slope| t.slopes.iter().filter(|e| e.slope == s).map(|e| e.mult).sum::<usize>();
    let discrepancies: Vec<Discrepancy> = keys
        .into_iter()
        .filter_map(|s| {
            let (a, b) = (mult(oc, s), mult(classical, s));
            (a != b).then_some(Discrepancy { slope: s, overconvergent: a, classical: b })
        })
        .collect();
    Ok(ClassicalityReport {
        bound,
        verdict: if discrepancies.is_empty() { Verdict::Pass } else { Verdict::Fail },
        discrepancies,
        rigorous: oc.is_proven_below(bound) && classical.is_proven_below(bound),
    })
}

/// P(s, t) = det(1 - t U) over (Z/p^N)[s]/(s^(S+1)): `coeffs[m][l]` is the
/// coefficient of s^l t^m, in the stored scaling (true value p^(m shift)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySeries {
    pub p: u64,
    pub precision: u32,
    pub s_order: usize,
    pub degree_cutoff: usize,
    pub tail: TailBound,
    pub coeffs: Vec<Vec<u128>>,
}

/// Bivariate series of a block matrix with entries in the s-series ring.
pub fn family_series(b: &BlockMatrix<Vec<u128>>, ring: &SeriesRing, t: usize) -> Result<FamilySeries> {
    let ctx = *ring.base();
    let n = b.matrix.rows();
    if n != b.matrix.cols() || b.degrees.target != b.degrees.source {
        return Err(Error::Dimension("family series of a non-square block matrix".into()));
    }
    for r in 0..n {
        let d = b.row_degree(r) as u32;
        let v = b.matrix.row(r).iter().flatten().filter_map(|&x| ctx.valuation(x)).min();
        if v.map_or(false, |v| v < d.min(ctx.digits())) {
            return Err(Error::Certification(format!("family row {r} of degree {d} does not decay")));
        }
    }
    let len = b.degrees.target + 1;
    let coeffs = fredholm_coefficients(ring, &b.matrix, t);
    Ok(FamilySeries {
        p: b.p,
        precision: ctx.digits(),
        s_order: ring.order,
        degree_cutoff: b.degrees.target,
        tail: TailBound { blocks: n / len, shift: b.shift },
        coeffs,
    })
}

impl FamilySeries {
    pub fn ctx(&self) -> Zmod {
        Zmod::new(self.p, self.precision).expect("valid")
    }

    /// Precision lost by dropping s^l for l > S when evaluating at s0:
    /// each s^l coefficient has valuation >= l - v(l!), so the dropped
    /// part has valuation >= min_{l > S} l (1 + v(s0)) - v(l!).
    pub fn truncation_floor(&self, s0: i128) -> i64 {
        if s0 == 0 {
            return i64::MAX;
        }
        let e = crate::padic::modular::val_i128(s0, self.p).unwrap_or(0) as u64;
        tail_floor(self.p, 1 + e, self.s_order as u64 + 1)
    }

    /// P(s0, t) with honest precision.
    pub fn specialize(&self, s0: i128) -> Result<FredholmSeries> {
        let ctx = self.ctx();
        let ring = SeriesRing::new(ctx, self.s_order);
        let x = ctx.from_i128(s0);
        let floor = self.truncation_floor(s0);
        let n_trunc = self.degree_cutoff as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| {
                if m == 0 {
                    return PadicScalar::from_i64(self.p, 1, self.precision.max(1));
                }
                let v = ring.eval(c, x);
                let cap = floor.min(n_trunc + 1 + self.tail.lambda(m - 1));
                Ok(PadicScalar::from_residue(&ctx, v).cap_abs(cap).shift(m as i64 * self.tail.shift))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FredholmSeries {
            p: self.p,
            stable: vec![false; coeffs.len()],
            coeffs,
            degree_cutoff: Some(self.degree_cutoff),
            tail: Some(self.tail),
        })
    }

    /// The s-degree actually used: largest l with a nonzero coefficient.
    pub fn s_degree(&self) -> usize {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(l, _)| l))
            .max()
            .unwrap_or(0)
    }

    /// d/ds P at s = 0, as a series in t (stored scaling).
    pub fn derivative_at_zero(&self) -> Vec<u128> {
        self.coeffs.iter().map(|c| c.get(1).copied().unwrap_or(0)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ctx = self.ctx();
        let rows: Vec<Vec<String>> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| {
                c.iter()
                    .map(|&x| PadicScalar::from_scaled_residue(&ctx, x, m as i64 * self.tail.shift).to_string())
                    .collect()
            })
            .collect();
        serde_json::json!({
            "p": self.p,
            "precision": self.precision,
            "s_order": self.s_order,
            "coefficients": rows,
        })
    }
}

/// Agreement valuation of the series of one operator computed on two
/// radii; `None` when they agree to all claimed precision.
pub fn link_invariance(a: &FredholmSeries, b: &FredholmSeries, t: usize) -> Option<i64> {
    let n = (t + 1).min(a.len()).min(b.len());
    let mut worst: Option<i64> = None;
    for m in 0..n {
        let (x, y) = (&a.coeffs[m], &b.coeffs[m]);
        let d = x.distance_valuation(y);
        let claimed = x.abs_precision().min(y.abs_precision());
        let v = d.min(claimed);
        if v == i64::MAX {
            continue;
        }
        worst = Some(worst.map_or(v, |w: i64| w.min(v)));
    }
    worst
}

/// Number of slopes strictly below the bound, or an error if the table
/// does not reach it.
pub fn count_small_slopes(table: &SlopeTable, bound: Slope) -> Result<usize> {
    if !table.covers(bound) {
        return Err(Error::Certification("slope table does not reach the small-slope bound".into()));
    }
    Ok(table.count_below(bound))
}
