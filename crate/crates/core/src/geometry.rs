//! Halfspace polytopes and the set operations the reachability algorithms
//! consume: support functions, containment, scaling, intersection, emptiness,
//! bounding boxes, and facet redundancy removal.
//!
//! Everything is backed by LP through [`crate::milp::lp_solve`]. A polyhedron
//! may be empty or unbounded; operations that need more check it explicitly
//! and unboundedness is always a distinguished flag, never a sentinel value.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::milp::{lp_solve, Direction, MilpError, MilpModel, Sense, SolveStatus};

/// Default absolute tolerance for containment tests on support values, one
/// order above the LP solver tolerance.
pub const CONTAINMENT_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("polyhedron is empty")]
    EmptySet,
    #[error("polyhedron is unbounded in direction {0:?}")]
    Unbounded(Vec<f64>),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("matrix rows ({rows}) do not match rhs length ({rhs})")]
    ShapeMismatch { rows: usize, rhs: usize },
    #[error("non-finite entry in polyhedron data")]
    NonFinite,
    #[error("template has a zero row at index {0}")]
    ZeroTemplateRow(usize),
    #[error("box bounds are inverted at component {0}")]
    InvertedBox(usize),
    #[error("lp failure: {0}")]
    Lp(#[from] MilpError),
}

/// Support function value: finite supremum or unbounded flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportValue {
    Finite(f64),
    Unbounded,
}

impl SupportValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            SupportValue::Finite(v) => Some(v),
            SupportValue::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, SupportValue::Unbounded)
    }
}

/// Polyhedron in halfspace representation `{x | A x <= b}`.
///
/// Serializes as `{"A": [[row], ...], "b": [...]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolyhedron {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct HPolyhedronDto {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl serde::Serialize for HPolyhedron {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dto = HPolyhedronDto {
            a: (0..self.a.nrows())
                .map(|i| self.a.row(i).iter().copied().collect())
                .collect(),
            b: self.b.iter().copied().collect(),
        };
        dto.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for HPolyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = HPolyhedronDto::deserialize(deserializer)?;
        let rows = dto.a.len();
        let cols = dto.a.first().map_or(0, |r| r.len());
        if dto.a.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("ragged facet matrix"));
        }
        let a = DMatrix::from_fn(rows, cols, |i, j| dto.a[i][j]);
        let b = DVector::from_vec(dto.b);
        HPolyhedron::new(a, b).map_err(serde::de::Error::custom)
    }
}

impl HPolyhedron {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self, GeomError> {
        if a.nrows() != b.len() {
            return Err(GeomError::ShapeMismatch {
                rows: a.nrows(),
                rhs: b.len(),
            });
        }
        if a.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        Ok(Self { a, b })
    }

    /// Facet normal matrix (one row per facet).
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Facet offsets.
    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn num_facets(&self) -> usize {
        self.a.nrows()
    }

    /// Membership within an absolute tolerance on each facet.
    pub fn contains_point(&self, x: &DVector<f64>, tol: f64) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        let residual = &self.a * x - &self.b;
        residual.iter().all(|&r| r <= tol)
    }

    /// Signed worst-case facet violation of a point (negative inside).
    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        (&self.a * x - &self.b)
            .iter()
            .fold(f64::NEG_INFINITY, |m, &r| m.max(r))
    }
}

/// Axis-aligned box `lo <= x <= hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Box {
    lo: DVector<f64>,
    hi: DVector<f64>,
}

impl Box {
    pub fn new(lo: DVector<f64>, hi: DVector<f64>) -> Result<Self, GeomError> {
        if lo.len() != hi.len() {
            return Err(GeomError::DimensionMismatch(lo.len(), hi.len()));
        }
        for i in 0..lo.len() {
            if !(lo[i] <= hi[i]) || !lo[i].is_finite() || !hi[i].is_finite() {
                return Err(GeomError::InvertedBox(i));
            }
        }
        Ok(Self { lo, hi })
    }

    /// Symmetric box `|x_i| <= r`.
    pub fn centered(dim: usize, r: f64) -> Self {
        Self {
            lo: DVector::from_element(dim, -r),
            hi: DVector::from_element(dim, r),
        }
    }

    pub fn lo(&self) -> &DVector<f64> {
        &self.lo
    }

    pub fn hi(&self) -> &DVector<f64> {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        (0..self.dim()).all(|i| x[i] >= self.lo[i] - tol && x[i] <= self.hi[i] + tol)
    }

    /// Componentwise hull of two boxes.
    pub fn hull(&self, other: &Box) -> Box {
        Box {
            lo: self.lo.zip_map(&other.lo, f64::min),
            hi: self.hi.zip_map(&other.hi, f64::max),
        }
    }

    /// Lossless conversion to 2n facets `[I; -I] x <= [hi; -lo]`.
    pub fn to_polyhedron(&self) -> HPolyhedron {
        let n = self.dim();
        let mut a = DMatrix::zeros(2 * n, n);
        let mut b = DVector::zeros(2 * n);
        for i in 0..n {
            a[(i, i)] = 1.0;
            b[i] = self.hi[i];
            a[(n + i, i)] = -1.0;
            b[n + i] = -self.lo[i];
        }
        HPolyhedron { a, b }
    }

    /// Largest absolute coordinate over the box.
    pub fn max_abs(&self) -> f64 {
        self.lo
            .iter()
            .chain(self.hi.iter())
            .fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}

/// Template direction matrix for over-approximations; one direction per row.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateDirections {
    rows: DMatrix<f64>,
}

impl serde::Serialize for TemplateDirections {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..self.rows.nrows())
            .map(|i| self.rows.row(i).iter().copied().collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for TemplateDirections {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged template matrix"));
        }
        let m = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
        TemplateDirections::new(m).map_err(serde::de::Error::custom)
    }
}

impl TemplateDirections {
    pub fn new(rows: DMatrix<f64>) -> Result<Self, GeomError> {
        for i in 0..rows.nrows() {
            if rows.row(i).iter().all(|&v| v == 0.0) {
                return Err(GeomError::ZeroTemplateRow(i));
            }
        }
        if rows.nrows() < rows.ncols() + 1 {
            log::warn!(
                "template has {} directions in dimension {}; at least n+1 are needed to bound a set",
                rows.nrows(),
                rows.ncols()
            );
        }
        Ok(Self { rows })
    }

    /// The eight directions at 45-degree increments in the plane.
    pub fn octagon() -> Self {
        let mut rows = DMatrix::zeros(8, 2);
        for i in 0..8 {
            let angle = std::f64::consts::FRAC_PI_4 * i as f64;
            rows[(i, 0)] = angle.cos();
            rows[(i, 1)] = angle.sin();
        }
        Self { rows }
    }

    /// Axis-aligned box template `[I; -I]` in dimension `n`.
    pub fn axis_box(n: usize) -> Self {
        let mut rows = DMatrix::zeros(2 * n, n);
        for i in 0..n {
            rows[(i, i)] = 1.0;
            rows[(n + i, i)] = -1.0;
        }
        Self { rows }
    }

    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn direction(&self, i: usize) -> DVector<f64> {
        self.rows.row(i).transpose()
    }
}

fn facet_lp(p: &HPolyhedron) -> (MilpModel, Vec<usize>) {
    let n = p.dim();
    let mut model = MilpModel::new();
    let xs: Vec<usize> = (0..n).map(|i| model.add_free(format!("x{i}"))).collect();
    for i in 0..p.num_facets() {
        let terms: Vec<(usize, f64)> = (0..n)
            .filter(|&j| p.a[(i, j)] != 0.0)
            .map(|j| (xs[j], p.a[(i, j)]))
            .collect();
        model.add_constraint(terms, Sense::Le, p.b[i]);
    }
    (model, xs)
}

/// Support function `sup {v . x | x in P}` by linear programming.
///
/// Returns the unbounded flag when the LP is unbounded and `EmptySet` when
/// `P` is infeasible.
pub fn support(p: &HPolyhedron, v: &DVector<f64>) -> Result<SupportValue, GeomError> {
    if v.len() != p.dim() {
        return Err(GeomError::DimensionMismatch(v.len(), p.dim()));
    }
    let (mut model, xs) = facet_lp(p);
    let obj: Vec<(usize, f64)> = (0..p.dim())
        .filter(|&j| v[j] != 0.0)
        .map(|j| (xs[j], v[j]))
        .collect();
    model.set_objective(obj, Direction::Maximize);
    let r = lp_solve(&model)?;
    match r.status {
        SolveStatus::Optimal => Ok(SupportValue::Finite(r.objective_value)),
        SolveStatus::Unbounded => Ok(SupportValue::Unbounded),
        SolveStatus::Infeasible => Err(GeomError::EmptySet),
        other => Err(GeomError::Lp(MilpError::NumericalFailure(format!(
            "unexpected LP status {other:?}"
        )))),
    }
}

/// `B ⊆ A` within `tol`: every facet of `A` bounds the support of `B`.
pub fn contains(a: &HPolyhedron, b: &HPolyhedron, tol: f64) -> Result<bool, GeomError> {
    if a.dim() != b.dim() {
        return Err(GeomError::DimensionMismatch(a.dim(), b.dim()));
    }
    for i in 0..a.num_facets() {
        let v = a.a.row(i).transpose();
        match support(b, &v)? {
            SupportValue::Finite(s) => {
                if s > a.b[i] + tol {
                    return Ok(false);
                }
            }
            SupportValue::Unbounded => return Ok(false),
        }
    }
    Ok(true)
}

/// Set scaling `{s x | x in A}` for `s > 0`, realized as `(A, s b)`.
pub fn scale(a: &HPolyhedron, s: f64) -> Result<HPolyhedron, GeomError> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(GeomError::NonPositiveScale(s));
    }
    Ok(HPolyhedron {
        a: a.a.clone(),
        b: &a.b * s,
    })
}

/// Facet stack of `A` and `B`; no redundancy reduction is applied.
pub fn intersect(a: &HPolyhedron, b: &HPolyhedron) -> Result<HPolyhedron, GeomError> {
    if a.dim() != b.dim() {
        return Err(GeomError::DimensionMismatch(a.dim(), b.dim()));
    }
    let mut rows = DMatrix::zeros(a.num_facets() + b.num_facets(), a.dim());
    rows.view_mut((0, 0), (a.num_facets(), a.dim()))
        .copy_from(&a.a);
    rows.view_mut((a.num_facets(), 0), (b.num_facets(), b.dim()))
        .copy_from(&b.a);
    let mut rhs = DVector::zeros(a.num_facets() + b.num_facets());
    rhs.rows_mut(0, a.num_facets()).copy_from(&a.b);
    rhs.rows_mut(a.num_facets(), b.num_facets()).copy_from(&b.b);
    Ok(HPolyhedron { a: rows, b: rhs })
}

/// Phase-1 LP feasibility probe.
pub fn is_empty(p: &HPolyhedron) -> Result<bool, GeomError> {
    if p.num_facets() == 0 {
        return Ok(false);
    }
    let (mut model, _) = facet_lp(p);
    model.set_objective(Vec::new(), Direction::Maximize);
    let r = lp_solve(&model)?;
    Ok(r.status == SolveStatus::Infeasible)
}

/// Componentwise extrema via `2n` support LPs. Requires `A` non-empty and
/// bounded.
pub fn bounding_box(p: &HPolyhedron) -> Result<Box, GeomError> {
    let n = p.dim();
    let mut lo = DVector::zeros(n);
    let mut hi = DVector::zeros(n);
    for i in 0..n {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        hi[i] = match support(p, &v)? {
            SupportValue::Finite(s) => s,
            SupportValue::Unbounded => {
                return Err(GeomError::Unbounded(v.iter().copied().collect()))
            }
        };
        v[i] = -1.0;
        lo[i] = match support(p, &v)? {
            SupportValue::Finite(s) => -s,
            SupportValue::Unbounded => {
                return Err(GeomError::Unbounded(v.iter().copied().collect()))
            }
        };
    }
    Box::new(lo, hi)
}

/// Drops facets that are implied by the remaining ones; each dropped facet is
/// verified non-binding by one LP. The set is unchanged.
pub fn remove_redundancy(p: &HPolyhedron) -> Result<HPolyhedron, GeomError> {
    if is_empty(p)? {
        return Err(GeomError::EmptySet);
    }
    let m = p.num_facets();
    let n = p.dim();
    let mut keep = vec![true; m];

    for i in 0..m {
        // Maximize facet i over the others, with facet i relaxed by 1 so the
        // probe LP stays bounded in the objective direction.
        let mut model = MilpModel::new();
        let xs: Vec<usize> = (0..n).map(|j| model.add_free(format!("x{j}"))).collect();
        for k in 0..m {
            if k == i || !keep[k] {
                continue;
            }
            let terms: Vec<(usize, f64)> = (0..n)
                .filter(|&j| p.a[(k, j)] != 0.0)
                .map(|j| (xs[j], p.a[(k, j)]))
                .collect();
            model.add_constraint(terms, Sense::Le, p.b[k]);
        }
        let row_terms: Vec<(usize, f64)> = (0..n)
            .filter(|&j| p.a[(i, j)] != 0.0)
            .map(|j| (xs[j], p.a[(i, j)]))
            .collect();
        model.add_constraint(row_terms.clone(), Sense::Le, p.b[i] + 1.0);
        model.set_objective(row_terms, Direction::Maximize);
        let r = lp_solve(&model)?;
        if r.status == SolveStatus::Optimal && r.objective_value <= p.b[i] + 1e-9 {
            keep[i] = false;
        }
    }

    let kept: Vec<usize> = (0..m).filter(|&i| keep[i]).collect();
    let mut a = DMatrix::zeros(kept.len(), n);
    let mut b = DVector::zeros(kept.len());
    for (r, &i) in kept.iter().enumerate() {
        a.row_mut(r).copy_from(&p.a.row(i));
        b[r] = p.b[i];
    }
    Ok(HPolyhedron { a, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector};

    fn unit_box2() -> HPolyhedron {
        Box::centered(2, 1.0).to_polyhedron()
    }

    fn interval(lo: f64, hi: f64) -> HPolyhedron {
        HPolyhedron::new(dmatrix![1.0; -1.0], dvector![hi, -lo]).unwrap()
    }

    fn triangle() -> HPolyhedron {
        // x1 >= 0, x2 >= 0, x1 + x2 <= 1
        HPolyhedron::new(
            dmatrix![-1.0, 0.0; 0.0, -1.0; 1.0, 1.0],
            dvector![0.0, 0.0, 1.0],
        )
        .unwrap()
    }

    fn sup(p: &HPolyhedron, v: &[f64]) -> f64 {
        support(p, &DVector::from_row_slice(v))
            .unwrap()
            .finite()
            .unwrap()
    }

    #[test]
    fn support_unit_box() {
        assert_relative_eq!(sup(&unit_box2(), &[1.0, 0.0]), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn support_scalar_interval() {
        assert_relative_eq!(sup(&interval(-0.6, 0.6), &[1.0]), 0.6, epsilon = 1e-9);
    }

    #[test]
    fn support_triangle_matches_vertex_enumeration() {
        // Oracle: the triangle's vertices are (0,0), (1,0), (0,1).
        let v = dvector![1.0, 1.0];
        let expect = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
            .iter()
            .map(|&(x, y)| v[0] * x + v[1] * y)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_relative_eq!(sup(&triangle(), &[1.0, 1.0]), expect, epsilon = 1e-9);
    }

    #[test]
    fn support_empty_errors() {
        let p = HPolyhedron::new(dmatrix![1.0; -1.0], dvector![-1.0, -2.0]).unwrap();
        assert!(matches!(
            support(&p, &dvector![1.0]),
            Err(GeomError::EmptySet)
        ));
    }

    #[test]
    fn support_unbounded_flag() {
        let p = HPolyhedron::new(dmatrix![-1.0], dvector![0.0]).unwrap();
        assert!(support(&p, &dvector![1.0]).unwrap().is_unbounded());
    }

    #[test]
    fn contains_intervals() {
        let a = interval(-1.0, 1.0);
        let b = interval(-0.5, 0.5);
        assert!(contains(&a, &b, CONTAINMENT_TOL).unwrap());
        assert!(!contains(&b, &a, CONTAINMENT_TOL).unwrap());
    }

    #[test]
    fn contains_scaled_sum_interval() {
        // 0.5 * [-0.2, 0.2] + [-0.1, 0.1] = [-0.2, 0.2]
        let a = interval(-0.2, 0.2);
        let b = interval(-(0.5 * 0.2 + 0.1), 0.5 * 0.2 + 0.1);
        assert!(contains(&a, &b, CONTAINMENT_TOL).unwrap());
        assert!(contains(&b, &a, CONTAINMENT_TOL).unwrap());
    }

    #[test]
    fn scale_identity_and_shrink() {
        let a = interval(-1.0, 1.0);
        let id = scale(&a, 1.0).unwrap();
        assert_relative_eq!(sup(&id, &[1.0]), 1.0, epsilon = 1e-12);
        let s = scale(&interval(-0.6, 0.6), 1.0 / 1.01).unwrap();
        assert_relative_eq!(sup(&s, &[1.0]), 0.6 / 1.01, epsilon = 1e-12);
        assert_relative_eq!(sup(&s, &[-1.0]), 0.6 / 1.01, epsilon = 1e-12);
    }

    #[test]
    fn scale_triangle_by_two() {
        let t2 = scale(&triangle(), 2.0).unwrap();
        assert_relative_eq!(sup(&t2, &[1.0, 1.0]), 2.0, epsilon = 1e-9);
        assert_relative_eq!(sup(&t2, &[1.0, 0.0]), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn scale_rejects_nonpositive() {
        assert!(matches!(
            scale(&triangle(), 0.0),
            Err(GeomError::NonPositiveScale(_))
        ));
        assert!(matches!(
            scale(&triangle(), -2.0),
            Err(GeomError::NonPositiveScale(_))
        ));
    }

    #[test]
    fn intersect_intervals() {
        let c = intersect(&interval(-2.0, 2.0), &interval(-1.0, 3.0)).unwrap();
        assert_relative_eq!(sup(&c, &[1.0]), 2.0, epsilon = 1e-9);
        assert_relative_eq!(sup(&c, &[-1.0]), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn intersect_box_halfspace() {
        let hs = HPolyhedron::new(dmatrix![1.0, 0.0], dvector![0.0]).unwrap();
        let c = intersect(&unit_box2(), &hs).unwrap();
        assert_relative_eq!(sup(&c, &[1.0, 0.0]), 0.0, epsilon = 1e-9);
        assert_relative_eq!(sup(&c, &[-1.0, 0.0]), 1.0, epsilon = 1e-9);
        assert_relative_eq!(sup(&c, &[0.0, 1.0]), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn is_empty_cases() {
        let e = HPolyhedron::new(dmatrix![1.0; -1.0], dvector![-1.0, -2.0]).unwrap();
        assert!(is_empty(&e).unwrap());
        assert!(!is_empty(&unit_box2()).unwrap());
        let cone = HPolyhedron::new(
            dmatrix![1.0, 1.0; -1.0, 0.0; 0.0, -1.0],
            dvector![0.0, 0.0, 0.0],
        )
        .unwrap();
        assert!(!is_empty(&cone).unwrap());
    }

    #[test]
    fn bounding_box_triangle() {
        let bb = bounding_box(&triangle()).unwrap();
        assert_relative_eq!(bb.lo()[0], 0.0, epsilon = 1e-9);
        assert_relative_eq!(bb.lo()[1], 0.0, epsilon = 1e-9);
        assert_relative_eq!(bb.hi()[0], 1.0, epsilon = 1e-9);
        assert_relative_eq!(bb.hi()[1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn bounding_box_rotated_square() {
        // |x1+x2| <= 1, |x1-x2| <= 1 has vertices (+-1, 0), (0, +-1).
        let p = HPolyhedron::new(
            dmatrix![1.0, 1.0; -1.0, -1.0; 1.0, -1.0; -1.0, 1.0],
            dvector![1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        let bb = bounding_box(&p).unwrap();
        for i in 0..2 {
            assert_relative_eq!(bb.lo()[i], -1.0, epsilon = 1e-9);
            assert_relative_eq!(bb.hi()[i], 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn bounding_box_unbounded_errors() {
        let p = HPolyhedron::new(dmatrix![-1.0, 0.0; 0.0, -1.0], dvector![0.0, 0.0]).unwrap();
        assert!(matches!(bounding_box(&p), Err(GeomError::Unbounded(_))));
    }

    #[test]
    fn redundancy_basic() {
        let p = HPolyhedron::new(dmatrix![1.0; 1.0; -1.0], dvector![1.0, 2.0, 0.0]).unwrap();
        let r = remove_redundancy(&p).unwrap();
        assert_eq!(r.num_facets(), 2);
        assert_relative_eq!(sup(&r, &[1.0]), 1.0, epsilon = 1e-9);
        assert_relative_eq!(sup(&r, &[-1.0]), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn redundancy_duplicate_facet() {
        let ub = unit_box2();
        let dup = intersect(
            &ub,
            &HPolyhedron::new(dmatrix![1.0, 0.0], dvector![1.0]).unwrap(),
        )
        .unwrap();
        let r = remove_redundancy(&dup).unwrap();
        assert_eq!(r.num_facets(), 4);
        assert!(contains(&r, &ub, 1e-9).unwrap());
        assert!(contains(&ub, &r, 1e-9).unwrap());
    }

    #[test]
    fn redundancy_scalar_f1() {
        // Facet stack 0.6 and 1.0 on each side reduces to [-0.6, 0.6].
        let p = HPolyhedron::new(dmatrix![1.0; -1.0; 1.0; -1.0], dvector![0.6, 0.6, 1.0, 1.0])
            .unwrap();
        let r = remove_redundancy(&p).unwrap();
        assert_eq!(r.num_facets(), 2);
        assert_relative_eq!(sup(&r, &[1.0]), 0.6, epsilon = 1e-9);
        assert_relative_eq!(sup(&r, &[-1.0]), 0.6, epsilon = 1e-9);
    }

    #[test]
    fn template_builders() {
        let oct = TemplateDirections::octagon();
        assert_eq!(oct.len(), 8);
        for i in 0..8 {
            assert_relative_eq!(oct.direction(i).norm(), 1.0, epsilon = 1e-12);
        }
        let bx = TemplateDirections::axis_box(3);
        assert_eq!(bx.len(), 6);
        assert!(TemplateDirections::new(DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn box_roundtrip_polyhedron() {
        let b = Box::new(dvector![-0.25, 1.0], dvector![0.5, 2.0]).unwrap();
        let p = b.to_polyhedron();
        assert_eq!(p.num_facets(), 4);
        let bb = bounding_box(&p).unwrap();
        assert_relative_eq!(bb.lo()[0], -0.25, epsilon = 1e-9);
        assert_relative_eq!(bb.hi()[1], 2.0, epsilon = 1e-9);
    }
}
