//! Axis-aligned boxes, lattice enumeration, finite box unions and Følner
//! sequences in `R^d` / `Z^d`.
//!
//! Lattice sums always use the half-open convention `(lo, hi]`, so pasting
//! adjacent boxes never counts a lattice point twice. Closed boxes only show
//! up on the continuous side, where the boundary has measure zero.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the number of lattice points a single box may enumerate.
pub const MAX_LATTICE_POINTS: u64 = 1 << 48;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("box too large to enumerate ({0} lattice points or more)")]
    TooLarge(u64),
    #[error("non-finite box coordinate")]
    NonFinite,
    #[error("Følner sequence is not defined at index {0}")]
    MissingIndex(usize),
    #[error("region at index {0} has zero measure")]
    NullRegion(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Closure {
    /// `(lo, hi]` along every axis.
    #[default]
    HalfOpenLoExclusive,
    /// `[lo, hi]` along every axis.
    Closed,
}

/// An axis-aligned box in `R^d`.
///
/// Empty boxes (some `hi_i <= lo_i`) are allowed and have zero measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    #[serde(default)]
    closure: Closure,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, closure: Closure) -> Result<Self, GeometryError> {
        if lo.is_empty() {
            return Err(GeometryError::ZeroDimension);
        }
        if lo.len() != hi.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().chain(hi.iter()).any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self { lo, hi, closure })
    }

    pub fn half_open(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, GeometryError> {
        Self::new(lo, hi, Closure::HalfOpenLoExclusive)
    }

    pub fn closed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, GeometryError> {
        Self::new(lo, hi, Closure::Closed)
    }

    /// The box `(0, b]`.
    pub fn from_origin(b: &[f64]) -> Result<Self, GeometryError> {
        Self::half_open(vec![0.0; b.len()], b.to_vec())
    }

    /// The cube `(0, side]^d`.
    pub fn cube(dim: usize, side: f64) -> Result<Self, GeometryError> {
        Self::half_open(vec![0.0; dim], vec![side; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn with_closure(mut self, closure: Closure) -> Self {
        self.closure = closure;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| b <= a)
    }

    /// Edge lengths, clamped at zero.
    pub fn edges(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a).max(0.0))
            .collect()
    }

    /// `(w, l)`: the volume and the shortest edge. Both are zero for an empty box.
    pub fn measures(&self) -> (f64, f64) {
        if self.is_empty() {
            return (0.0, 0.0);
        }
        let edges = self.edges();
        let w = edges.iter().product();
        let l = edges.iter().copied().fold(f64::INFINITY, f64::min);
        (w, l)
    }

    pub fn volume(&self) -> f64 {
        self.measures().0
    }

    pub fn min_edge(&self) -> f64 {
        self.measures().1
    }

    pub fn translate(&self, y: &[f64]) -> Result<Self, GeometryError> {
        self.check_dim(y.len())?;
        Ok(Self {
            lo: self.lo.iter().zip(y).map(|(a, s)| a + s).collect(),
            hi: self.hi.iter().zip(y).map(|(b, s)| b + s).collect(),
            closure: self.closure,
        })
    }

    /// Reflects the axes whose sign is [`Sign::Minus`]: `[lo, hi]` becomes `[-hi, -lo]`.
    pub fn mirror(&self, signs: &[Sign]) -> Result<Self, GeometryError> {
        self.check_dim(signs.len())?;
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for (i, s) in signs.iter().enumerate() {
            if *s == Sign::Minus {
                lo[i] = -self.hi[i];
                hi[i] = -self.lo[i];
            }
        }
        Ok(Self {
            lo,
            hi,
            closure: self.closure,
        })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self.closure {
            Closure::HalfOpenLoExclusive => x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| *a < *v && *v <= *b),
            Closure::Closed => x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| *a <= *v && *v <= *b),
        }
    }

    /// Integer points of the box, honoring its closure convention.
    pub fn lattice_points(&self) -> Result<LatticeRange, GeometryError> {
        let mut first = Vec::with_capacity(self.dim());
        let mut counts = Vec::with_capacity(self.dim());
        let mut total: u64 = 1;
        for (a, b) in self.lo.iter().zip(&self.hi) {
            let (start, end) = match self.closure {
                Closure::HalfOpenLoExclusive => (a.floor() + 1.0, b.floor()),
                Closure::Closed => (a.ceil(), b.floor()),
            };
            if end < start {
                return Ok(LatticeRange::empty(self.dim()));
            }
            let count = end - start + 1.0;
            if count >= MAX_LATTICE_POINTS as f64 || start.abs() >= 9.0e15 || end.abs() >= 9.0e15
            {
                return Err(GeometryError::TooLarge(MAX_LATTICE_POINTS));
            }
            let count = count as u64;
            total = total
                .checked_mul(count)
                .filter(|t| *t <= MAX_LATTICE_POINTS)
                .ok_or(GeometryError::TooLarge(MAX_LATTICE_POINTS))?;
            first.push(start as i64);
            counts.push(count);
        }
        Ok(LatticeRange {
            first,
            counts,
            total,
        })
    }

    fn check_dim(&self, got: usize) -> Result<(), GeometryError> {
        if got != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}

/// A rectangular block of lattice points, indexed in row-major order
/// (last axis fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeRange {
    first: Vec<i64>,
    counts: Vec<u64>,
    total: u64,
}

impl LatticeRange {
    fn empty(dim: usize) -> Self {
        Self {
            first: vec![0; dim],
            counts: vec![0; dim],
            total: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn first(&self) -> &[i64] {
        &self.first
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Writes the point with the given linear index into `out`.
    pub fn point(&self, mut index: u64, out: &mut [i64]) {
        for axis in (0..self.dim()).rev() {
            let c = self.counts[axis];
            out[axis] = self.first[axis] + (index % c) as i64;
            index /= c;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.total).map(move |i| {
            let mut p = vec![0; self.dim()];
            self.point(i, &mut p);
            p
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// All `2^d` sign patterns, `Plus` first.
pub fn sign_patterns(dim: usize) -> Vec<Vec<Sign>> {
    (0..1usize << dim)
        .map(|mask| {
            (0..dim)
                .map(|i| {
                    if mask >> (dim - 1 - i) & 1 == 1 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    }
                })
                .collect()
        })
        .collect()
}

/// A finite union of axis-aligned boxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    boxes: Vec<AxisBox>,
}

impl From<AxisBox> for Region {
    fn from(b: AxisBox) -> Self {
        Self { boxes: vec![b] }
    }
}

impl Region {
    pub fn new(boxes: Vec<AxisBox>) -> Result<Self, GeometryError> {
        let dim = boxes.first().map(AxisBox::dim).ok_or(GeometryError::ZeroDimension)?;
        if let Some(b) = boxes.iter().find(|b| b.dim() != dim) {
            return Err(GeometryError::DimensionMismatch {
                expected: dim,
                got: b.dim(),
            });
        }
        Ok(Self { boxes })
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].dim()
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn translate(&self, y: &[f64]) -> Result<Self, GeometryError> {
        let boxes = self
            .boxes
            .iter()
            .map(|b| b.translate(y))
            .collect::<Result<_, _>>()?;
        Ok(Self { boxes })
    }

    pub fn mirror(&self, signs: &[Sign]) -> Result<Self, GeometryError> {
        let boxes = self
            .boxes
            .iter()
            .map(|b| b.mirror(signs))
            .collect::<Result<_, _>>()?;
        Ok(Self { boxes })
    }

    /// Smallest box containing the region.
    pub fn bounding_box(&self) -> AxisBox {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for b in &self.boxes {
            for i in 0..d {
                lo[i] = lo[i].min(b.lo[i]);
                hi[i] = hi[i].max(b.hi[i]);
            }
        }
        AxisBox {
            lo,
            hi,
            closure: self.boxes[0].closure,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains(x))
    }

    /// Lebesgue measure of the union.
    pub fn measure(&self) -> f64 {
        if let [single] = self.boxes.as_slice() {
            return single.volume();
        }
        sweep(&[self], |inside| inside[0]).0
    }

    /// `w(self △ other)`.
    pub fn symmetric_difference_measure(&self, other: &Region) -> Result<f64, GeometryError> {
        if self.dim() != other.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(sweep(&[self, other], |inside| inside[0] != inside[1]).0)
    }

    /// Splits the union into pairwise disjoint boxes (sharing at most faces).
    ///
    /// The pieces carry the closure of the first box, so for half-open boxes
    /// every lattice point of the union lands in exactly one piece.
    pub fn disjoint_boxes(&self) -> Vec<AxisBox> {
        if let [single] = self.boxes.as_slice() {
            return vec![single.clone()];
        }
        let closure = self.boxes[0].closure;
        let mut cells = sweep(&[self], |inside| inside[0]).1;
        for c in &mut cells {
            c.closure = closure;
        }
        cells
    }
}

/// Coordinate sweep over the grid spanned by all box faces. Returns the total
/// measure and the list of cells selected by `keep`, which receives one
/// membership flag per region.
fn sweep(regions: &[&Region], keep: impl Fn(&[bool]) -> bool) -> (f64, Vec<AxisBox>) {
    let d = regions[0].dim();
    let mut coords: Vec<Vec<f64>> = vec![Vec::new(); d];
    for r in regions {
        for b in r.boxes.iter().filter(|b| !b.is_empty()) {
            for i in 0..d {
                coords[i].push(b.lo[i]);
                coords[i].push(b.hi[i]);
            }
        }
    }
    for c in &mut coords {
        c.sort_by(f64::total_cmp);
        c.dedup();
    }
    if coords.iter().any(|c| c.len() < 2) {
        return (0.0, Vec::new());
    }
    let cells_per_axis: Vec<usize> = coords.iter().map(|c| c.len() - 1).collect();
    let total: usize = cells_per_axis.iter().product();
    let mut idx = vec![0usize; d];
    let mut mid = vec![0.0; d];
    let mut inside = vec![false; regions.len()];
    let mut measure = 0.0;
    let mut cells = Vec::new();
    for mut linear in 0..total {
        for axis in (0..d).rev() {
            idx[axis] = linear % cells_per_axis[axis];
            linear /= cells_per_axis[axis];
        }
        for i in 0..d {
            mid[i] = 0.5 * (coords[i][idx[i]] + coords[i][idx[i] + 1]);
        }
        for (flag, r) in inside.iter_mut().zip(regions) {
            *flag = r.boxes.iter().any(|b| {
                (0..d).all(|i| b.lo[i] < mid[i] && mid[i] < b.hi[i])
            });
        }
        if keep(&inside) {
            let lo: Vec<f64> = (0..d).map(|i| coords[i][idx[i]]).collect();
            let hi: Vec<f64> = (0..d).map(|i| coords[i][idx[i] + 1]).collect();
            measure += lo.iter().zip(&hi).map(|(a, b)| b - a).product::<f64>();
            cells.push(AxisBox {
                lo,
                hi,
                closure: Closure::Closed,
            });
        }
    }
    (measure, cells)
}

/// How a Følner sequence produces its `N`-th region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FolnerKind {
    /// `Φ_N = [0, N·side]^d`.
    GrowingBoxes { side: f64 },
    /// `Φ_N = [a_N, a_N + side·N^len_power]^d` with `a_N = drift·N^drift_power`.
    ShiftedBoxes {
        side: f64,
        len_power: f64,
        drift: f64,
        drift_power: f64,
    },
    /// Explicit regions; `Φ_N` is entry `N - 1`.
    Custom { regions: Vec<Region> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FolnerSequence {
    dim: usize,
    kind: FolnerKind,
    #[serde(skip)]
    measures: Vec<f64>,
}

impl FolnerSequence {
    pub fn new(dim: usize, kind: FolnerKind) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        let mut measures = Vec::new();
        if let FolnerKind::Custom { regions } = &kind {
            for (i, r) in regions.iter().enumerate() {
                if r.dim() != dim {
                    return Err(GeometryError::DimensionMismatch {
                        expected: dim,
                        got: r.dim(),
                    });
                }
                let w = r.measure();
                if w <= 0.0 {
                    return Err(GeometryError::NullRegion(i + 1));
                }
                measures.push(w);
            }
        }
        Ok(Self {
            dim,
            kind,
            measures,
        })
    }

    pub fn growing_boxes(dim: usize, side: f64) -> Result<Self, GeometryError> {
        Self::new(dim, FolnerKind::GrowingBoxes { side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FolnerKind {
        &self.kind
    }

    /// `Φ_N` for `N >= 1`.
    pub fn region(&self, n: usize) -> Result<Region, GeometryError> {
        if n == 0 {
            return Err(GeometryError::MissingIndex(0));
        }
        let nf = n as f64;
        match &self.kind {
            FolnerKind::GrowingBoxes { side } => {
                Ok(AxisBox::cube(self.dim, nf * side)?.with_closure(Closure::Closed).into())
            }
            FolnerKind::ShiftedBoxes {
                side,
                len_power,
                drift,
                drift_power,
            } => {
                let a = drift * nf.powf(*drift_power);
                let len = side * nf.powf(*len_power);
                Ok(AxisBox::closed(vec![a; self.dim], vec![a + len; self.dim])?.into())
            }
            FolnerKind::Custom { regions } => regions
                .get(n - 1)
                .cloned()
                .ok_or(GeometryError::MissingIndex(n)),
        }
    }

    pub fn len(&self) -> Option<usize> {
        match &self.kind {
            FolnerKind::Custom { regions } => Some(regions.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `w(Φ_N)`.
    pub fn measure(&self, n: usize) -> Result<f64, GeometryError> {
        match &self.kind {
            FolnerKind::Custom { .. } => self
                .measures
                .get(n.wrapping_sub(1))
                .copied()
                .or_else(|| self.region(n).ok().map(|r| r.measure()))
                .ok_or(GeometryError::MissingIndex(n)),
            _ => Ok(self.region(n)?.measure()),
        }
    }
}

/// `w(Φ_N △ (Φ_N + y)) / w(Φ_N)`.
pub fn folner_defect(f: &FolnerSequence, n: usize, y: &[f64]) -> Result<f64, GeometryError> {
    let region = f.region(n)?;
    let w = f.measure(n)?;
    if w <= 0.0 {
        return Err(GeometryError::NullRegion(n));
    }
    let shifted = region.translate(y)?;
    Ok(region.symmetric_difference_measure(&shifted)? / w)
}

/// Averaging scheme kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeKind {
    StandardCesaro,
    UniformCesaro,
    TwoSidedStandard,
    TwoSidedUniform,
    Folner { sequence: FolnerSequence },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    kind: SchemeKind,
    dim: usize,
}

impl Scheme {
    pub fn new(kind: SchemeKind, dim: usize) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        if let SchemeKind::Folner { sequence } = &kind {
            if sequence.dim() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    got: sequence.dim(),
                });
            }
        }
        Ok(Self { kind, dim })
    }

    pub fn standard(dim: usize) -> Self {
        Self::new(SchemeKind::StandardCesaro, dim).expect("dimension must be positive")
    }

    pub fn uniform(dim: usize) -> Self {
        Self::new(SchemeKind::UniformCesaro, dim).expect("dimension must be positive")
    }

    pub fn folner(sequence: FolnerSequence) -> Self {
        let dim = sequence.dim();
        Self::new(SchemeKind::Folner { sequence }, dim).expect("validated sequence")
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_two_sided(&self) -> bool {
        matches!(
            self.kind,
            SchemeKind::TwoSidedStandard | SchemeKind::TwoSidedUniform
        )
    }

    pub fn is_uniform(&self) -> bool {
        matches!(
            self.kind,
            SchemeKind::UniformCesaro | SchemeKind::TwoSidedUniform | SchemeKind::Folner { .. }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_measures_examples() {
        let b = AxisBox::closed(vec![0.0, 0.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(b.measures(), (6.0, 2.0));
        let b = AxisBox::closed(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(b.measures(), (0.0, 0.0));
        let b = AxisBox::closed(vec![-1.0, -1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(b.measures(), (6.0, 2.0));
    }

    #[test]
    fn inverted_box_is_empty() {
        let b = AxisBox::half_open(vec![3.0, 0.0], vec![1.0, 5.0]).unwrap();
        assert!(b.is_empty());
        assert_eq!(b.measures(), (0.0, 0.0));
        assert!(b.lattice_points().unwrap().is_empty());
    }

    #[test]
    fn lattice_points_examples() {
        let b = AxisBox::half_open(vec![0.0], vec![3.0]).unwrap();
        let pts: Vec<_> = b.lattice_points().unwrap().iter().collect();
        assert_eq!(pts, vec![vec![1], vec![2], vec![3]]);

        let b = AxisBox::half_open(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap();
        let pts: Vec<_> = b.lattice_points().unwrap().iter().collect();
        assert_eq!(pts, vec![vec![1, 1], vec![2, 1]]);

        let b = AxisBox::half_open(vec![2.5], vec![2.9]).unwrap();
        assert_eq!(b.lattice_points().unwrap().len(), 0);
    }

    #[test]
    fn closed_lattice_includes_both_ends() {
        let b = AxisBox::closed(vec![-1.0], vec![2.0]).unwrap();
        let pts: Vec<_> = b.lattice_points().unwrap().iter().collect();
        assert_eq!(pts, vec![vec![-1], vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn oversized_box_is_rejected() {
        let b = AxisBox::half_open(vec![0.0; 4], vec![1.0e5; 4]).unwrap();
        assert!(matches!(b.lattice_points(), Err(GeometryError::TooLarge(_))));
    }

    #[test]
    fn non_finite_coordinates_are_rejected() {
        assert_eq!(
            AxisBox::half_open(vec![0.0], vec![f64::INFINITY]),
            Err(GeometryError::NonFinite)
        );
    }

    #[test]
    fn folner_defect_examples() {
        let f = FolnerSequence::growing_boxes(1, 1.0).unwrap();
        assert!((folner_defect(&f, 100, &[1.0]).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(folner_defect(&f, 100, &[0.0]).unwrap(), 0.0);
        let f = FolnerSequence::growing_boxes(2, 1.0).unwrap();
        assert!((folner_defect(&f, 50, &[1.0, 0.0]).unwrap() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn union_measure_counts_overlap_once() {
        let a = AxisBox::closed(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
        let b = AxisBox::closed(vec![1.0, 1.0], vec![3.0, 3.0]).unwrap();
        let r = Region::new(vec![a, b]).unwrap();
        assert!((r.measure() - 7.0).abs() < 1e-12);
        let pieces = r.disjoint_boxes();
        let total: f64 = pieces.iter().map(AxisBox::volume).sum();
        assert!((total - 7.0).abs() < 1e-12);
    }

    #[test]
    fn custom_folner_rejects_null_regions() {
        let empty = Region::from(AxisBox::closed(vec![0.0], vec![0.0]).unwrap());
        let err = FolnerSequence::new(1, FolnerKind::Custom { regions: vec![empty] });
        assert_eq!(err.unwrap_err(), GeometryError::NullRegion(1));
    }

    #[test]
    fn sign_patterns_cover_orthants() {
        let s = sign_patterns(2);
        assert_eq!(s.len(), 4);
        assert_eq!(s[0], vec![Sign::Plus, Sign::Plus]);
        assert_eq!(s[3], vec![Sign::Minus, Sign::Minus]);
    }

    #[test]
    fn mirrored_half_open_boxes_tile_the_lattice() {
        let b = AxisBox::from_origin(&[3.0, 2.0]).unwrap();
        let mut count = 0;
        for s in sign_patterns(2) {
            count += b.mirror(&s).unwrap().lattice_points().unwrap().len();
        }
        // (-3, 3] x (-2, 2] has 6 * 4 points
        assert_eq!(count, 24);
    }
}
