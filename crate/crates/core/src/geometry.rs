//! Geometry of the definition domain: envelopes of characteristic families,
//! loci of parabolic degeneration and coverage masks with gap detection.

use crate::cauchy::{ImplicitSolution, Invariant};
use crate::inverse::{covers, slope_at, CharacteristicFamily, Family, FamilyForm, InverseError, TracedFamily};
use crate::numerics::{scan_roots, Bracket, Tolerance};
use crate::plane::{BBox, Direction, Point, Support};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// Subdivisions of the free variable scanned for envelope points.
pub const ENVELOPE_SUBDIVISIONS: usize = 256;
/// Bisection steps used to refine degeneration points on grid edges.
const EDGE_BISECTIONS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// Points where `∂φ/∂c = 0`.
    Discriminant,
    /// A straight line along which both families become tangent.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub point: Point,
    /// Parameter of the family curve touching the envelope here, when known.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub family: Option<Invariant>,
    pub kind: EnvelopeKind,
    pub points: Vec<EnvelopePoint>,
}

/// Discriminant envelope of a family in explicit form: for each `c`, the
/// free-variable values where `∂φ/∂c` vanishes. Candidates whose
/// derivative exceeds `tol` after refinement (poles) are discarded.
pub fn envelope_discriminant(
    fam: &CharacteristicFamily,
    c_grid: &[f64],
    tol: &Tolerance,
) -> Result<Envelope, InverseError> {
    if fam.form() == FamilyForm::PolarImplicit {
        return Err(InverseError::InvalidFamily(
            "discriminant envelopes need an explicit family".into(),
        ));
    }
    let range = fam
        .spec()
        .free_range
        .ok_or_else(|| InverseError::InvalidFamily("free_range is required for envelopes".into()))?;
    let grid = range.subdivide(ENVELOPE_SUBDIVISIONS);
    let seed = fam.c_slot();
    let dc = |s: f64, c: f64| fam.eval_dual(&[s], c, seed).map(|(_, d)| d);
    let points = c_grid
        .par_iter()
        .map(|&c| {
            scan_roots(|s| dc(s, c), &grid, tol)
                .into_iter()
                .filter(|&s| dc(s, c).is_some_and(|d| d.abs() <= tol.abs_tol.max(1e-8)))
                .filter_map(|s| {
                    let v = fam.eval(&[s], c).ok()?;
                    let point = match fam.form() {
                        FamilyForm::YOfX => Point::new(s, v),
                        _ => Point::new(v, s),
                    };
                    Some(EnvelopePoint { point, c: Some(c) })
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    Ok(Envelope {
        family: Some(fam.spec().invariant),
        kind: EnvelopeKind::Discriminant,
        points,
    })
}

/// Envelope of a family traced from a forward solution: for each `c`, the
/// heights in `y_range` where `∂x/∂c` vanishes.
pub fn envelope_traced(
    fam: &TracedFamily<'_>,
    c_grid: &[f64],
    y_range: Bracket,
    tol: &Tolerance,
) -> Envelope {
    let grid = y_range.subdivide(ENVELOPE_SUBDIVISIONS);
    let points = c_grid
        .par_iter()
        .map(|&c| {
            scan_roots(|y| fam.dx_dc(c, y).ok(), &grid, tol)
                .into_iter()
                .filter(|&y| fam.dx_dc(c, y).is_ok_and(|d| d.abs() <= tol.abs_tol.max(1e-8)))
                .filter_map(|y| {
                    let x = fam.x_at(c, y).ok()?;
                    Some(EnvelopePoint {
                        point: Point::new(x, y),
                        c: Some(c),
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    Envelope {
        family: Some(fam.invariant_tag()),
        kind: EnvelopeKind::Discriminant,
        points,
    }
}

/// A point of the degeneration locus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub point: Point,
    /// Normalized cross product of the two directions at the point.
    pub cross: f64,
    /// On the window boundary, possibly an artefact of a line at infinity.
    pub asymptotic_suspect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationLocus {
    pub bbox: BBox,
    pub nx: usize,
    pub ny: usize,
    pub points: Vec<LocusPoint>,
    /// Cells `(i, j)` touching a locus point, sorted row-major.
    pub cells: Vec<(usize, usize)>,
}

/// Normalized cross product of the two directions at `p`.
fn cross_at<F1, F2>(s1: &F1, s2: &F2, p: Point) -> Option<f64>
where
    F1: Fn(Point) -> Option<Direction>,
    F2: Fn(Point) -> Option<Direction>,
{
    let (d1, d2) = (s1(p)?, s2(p)?);
    let v = d1.normalized_cross(&d2);
    v.is_finite().then_some(v)
}

fn lerp(p: Point, q: Point, t: f64) -> Point {
    Point::new(p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t)
}

/// Refines a degeneration point on the edge `p → q`.
fn refine_edge(
    f: &impl Fn(Point) -> Option<f64>,
    p: Point,
    q: Point,
    vp: Option<f64>,
    vq: Option<f64>,
) -> Option<(Point, f64)> {
    let (mut lo, mut hi) = (0.0, 1.0);
    match (vp, vq) {
        (Some(a), Some(b)) => {
            // sign change: bisect to the zero
            let sa = a.signum();
            let mut best = if a.abs() < b.abs() { (p, a) } else { (q, b) };
            for _ in 0..EDGE_BISECTIONS {
                let t = 0.5 * (lo + hi);
                let m = lerp(p, q, t);
                match f(m) {
                    Some(v) => {
                        if v.abs() < best.1.abs() {
                            best = (m, v);
                        }
                        if v.signum() == sa {
                            lo = t;
                        } else {
                            hi = t;
                        }
                    }
                    None => return None,
                }
            }
            Some(best)
        }
        (Some(_), None) | (None, Some(_)) => {
            // walk to the edge of the region where the directions exist
            let defined_at_lo = vp.is_some();
            let mut last = if defined_at_lo { (p, vp?) } else { (q, vq?) };
            for _ in 0..EDGE_BISECTIONS {
                let t = 0.5 * (lo + hi);
                let m = lerp(p, q, t);
                match f(m) {
                    Some(v) => {
                        last = (m, v);
                        if defined_at_lo {
                            lo = t;
                        } else {
                            hi = t;
                        }
                    }
                    None => {
                        if defined_at_lo {
                            hi = t;
                        } else {
                            lo = t;
                        }
                    }
                }
            }
            Some(last)
        }
        (None, None) => None,
    }
}

/// Points where the two direction fields are parallel within `tol`.
///
/// The normalized cross product is sampled at the `(nx+1)·(ny+1)` grid
/// nodes. Nodes where it is already below `tol` are kept; every grid edge
/// with a sign change is bisected to the zero, and every edge leaving the
/// region where both fields exist is bisected to that region's boundary.
/// Refined points are kept when their cross product is below `tol`.
pub fn degeneration_locus<F1, F2>(s1: F1, s2: F2, bbox: BBox, nx: usize, ny: usize, tol: f64) -> DegenerationLocus
where
    F1: Fn(Point) -> Option<Direction> + Sync,
    F2: Fn(Point) -> Option<Direction> + Sync,
{
    let nx = nx.max(1);
    let ny = ny.max(1);
    let node = |i: usize, j: usize| {
        Point::new(
            bbox.x_min + bbox.width() * i as f64 / nx as f64,
            bbox.y_min + bbox.height() * j as f64 / ny as f64,
        )
    };
    let f = |p: Point| cross_at(&s1, &s2, p);
    let values: Vec<Option<f64>> = (0..(nx + 1) * (ny + 1))
        .into_par_iter()
        .map(|k| f(node(k % (nx + 1), k / (nx + 1))))
        .collect();
    let value = |i: usize, j: usize| values[j * (nx + 1) + i];

    // (point, cross, cells touched)
    let mut found: Vec<(Point, f64, Vec<(usize, usize)>)> = Vec::new();
    let cells_around_node = |i: usize, j: usize| {
        let mut v = Vec::new();
        for ci in i.saturating_sub(1)..=i.min(nx - 1) {
            for cj in j.saturating_sub(1)..=j.min(ny - 1) {
                v.push((ci, cj));
            }
        }
        v
    };
    for j in 0..=ny {
        for i in 0..=nx {
            if let Some(v) = value(i, j) {
                if v.abs() <= tol {
                    found.push((node(i, j), v, cells_around_node(i, j)));
                }
            }
        }
    }

    let near_zero = |v: Option<f64>| v.is_some_and(|v| v.abs() <= tol);
    let needs_refinement = |a: Option<f64>, b: Option<f64>| match (a, b) {
        _ if near_zero(a) || near_zero(b) => false,
        (Some(x), Some(y)) => x.signum() != y.signum(),
        (Some(_), None) | (None, Some(_)) => true,
        (None, None) => false,
    };
    // edges as (start node, end node, adjacent cells)
    let mut edges = Vec::new();
    for j in 0..=ny {
        for i in 0..nx {
            if needs_refinement(value(i, j), value(i + 1, j)) {
                let mut cells = Vec::new();
                if j > 0 {
                    cells.push((i, j - 1));
                }
                if j < ny {
                    cells.push((i, j));
                }
                edges.push(((i, j), (i + 1, j), cells));
            }
        }
    }
    for j in 0..ny {
        for i in 0..=nx {
            if needs_refinement(value(i, j), value(i, j + 1)) {
                let mut cells = Vec::new();
                if i > 0 {
                    cells.push((i - 1, j));
                }
                if i < nx {
                    cells.push((i, j));
                }
                edges.push(((i, j), (i, j + 1), cells));
            }
        }
    }
    let refined: Vec<Option<(Point, f64)>> = edges
        .par_iter()
        .map(|&((i0, j0), (i1, j1), _)| {
            refine_edge(&f, node(i0, j0), node(i1, j1), value(i0, j0), value(i1, j1))
                .filter(|(_, v)| v.abs() <= tol)
        })
        .collect();
    for (r, (_, _, cells)) in refined.into_iter().zip(edges) {
        if let Some((p, v)) = r {
            found.push((p, v, cells));
        }
    }

    let edge_tol = 1e-12 * (bbox.width() + bbox.height());
    let on_boundary = |p: Point| {
        (p.x - bbox.x_min).abs() <= edge_tol
            || (p.x - bbox.x_max).abs() <= edge_tol
            || (p.y - bbox.y_min).abs() <= edge_tol
            || (p.y - bbox.y_max).abs() <= edge_tol
    };
    let mut cells = BTreeSet::new();
    let mut points = Vec::with_capacity(found.len());
    for (p, v, cs) in found {
        cells.extend(cs.into_iter().map(|(i, j)| (j, i)));
        points.push(LocusPoint {
            point: p,
            cross: v,
            asymptotic_suspect: on_boundary(p),
        });
    }
    points.sort_by(|a, b| {
        a.point
            .y
            .total_cmp(&b.point.y)
            .then(a.point.x.total_cmp(&b.point.x))
    });
    DegenerationLocus {
        bbox,
        nx,
        ny,
        points,
        cells: cells.into_iter().map(|(j, i)| (i, j)).collect(),
    }
}

/// Direction field of a family: the tangent of the curve through each point.
pub fn family_field(fam: &dyn Family) -> impl Fn(Point) -> Option<Direction> + Sync + '_ {
    move |p| slope_at(fam, p).ok().map(|(_, d)| d)
}

/// Both characteristic direction fields of a forward solution.
pub fn solution_fields(
    sol: &ImplicitSolution,
) -> (
    impl Fn(Point) -> Option<Direction> + Sync + '_,
    impl Fn(Point) -> Option<Direction> + Sync + '_,
) {
    (
        move |p: Point| sol.characteristic_directions(p.x, p.y).ok().map(|d| d.0),
        move |p: Point| sol.characteristic_directions(p.x, p.y).ok().map(|d| d.1),
    )
}

/// Straight-line pieces of a degeneration locus, reported as boundary
/// envelopes. Locus cells are grouped into 8-connected components; a
/// component whose points deviate from their principal axis by at most one
/// cell diagonal becomes one envelope.
pub fn boundary_envelopes(locus: &DegenerationLocus) -> Vec<Envelope> {
    let cw = locus.bbox.width() / locus.nx as f64;
    let ch = locus.bbox.height() / locus.ny as f64;
    let diag = cw.hypot(ch);
    let cell_of = |p: Point| {
        let i = (((p.x - locus.bbox.x_min) / cw).floor().max(0.0) as usize).min(locus.nx - 1);
        let j = (((p.y - locus.bbox.y_min) / ch).floor().max(0.0) as usize).min(locus.ny - 1);
        (i, j)
    };
    let cells: BTreeSet<(usize, usize)> = locus.cells.iter().copied().collect();
    let mut label = std::collections::BTreeMap::new();
    let mut next = 0;
    for &start in &cells {
        if label.contains_key(&start) {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        label.insert(start, next);
        while let Some((i, j)) = queue.pop_front() {
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let n = ((i as i64 + di) as usize, (j as i64 + dj) as usize);
                    if cells.contains(&n) && !label.contains_key(&n) {
                        label.insert(n, next);
                        queue.push_back(n);
                    }
                }
            }
        }
        next += 1;
    }
    let mut groups: Vec<Vec<Point>> = vec![Vec::new(); next];
    for lp in &locus.points {
        if let Some(&k) = label.get(&cell_of(lp.point)) {
            groups[k].push(lp.point);
        }
    }
    groups
        .into_iter()
        .filter(|g| g.len() >= 3)
        .filter_map(|g| {
            let n = g.len() as f64;
            let (mx, my) = g.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x / n, sy + p.y / n));
            let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
            for p in &g {
                sxx += (p.x - mx) * (p.x - mx);
                sxy += (p.x - mx) * (p.y - my);
                syy += (p.y - my) * (p.y - my);
            }
            let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
            let (s, c) = angle.sin_cos();
            let offset = |p: &Point| -(p.x - mx) * s + (p.y - my) * c;
            let along = |p: &Point| (p.x - mx) * c + (p.y - my) * s;
            if g.iter().any(|p| offset(p).abs() > diag) {
                return None;
            }
            let mut g = g;
            g.sort_by(|a, b| along(a).total_cmp(&along(b)));
            Some(Envelope {
                family: None,
                kind: EnvelopeKind::Boundary,
                points: g.into_iter().map(|point| EnvelopePoint { point, c: None }).collect(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    /// Both families pass through the cell centre.
    Covered,
    /// The cell contains part of the data support.
    Support,
    /// Uncovered and connected to the window boundary.
    ExteriorUncovered,
    /// Uncovered and enclosed.
    Gap,
}

impl CellClass {
    pub fn name(self) -> &'static str {
        match self {
            CellClass::Covered => "covered",
            CellClass::Support => "support",
            CellClass::ExteriorUncovered => "exterior_uncovered",
            CellClass::Gap => "gap",
        }
    }
}

/// Cell classification over a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainGrid {
    pub bbox: BBox,
    pub nx: usize,
    pub ny: usize,
    /// Row-major: cell `(i, j)` is at `j * nx + i`.
    pub cells: Vec<CellClass>,
    pub support_trace: Vec<Point>,
}

impl DomainGrid {
    pub fn cell_width(&self) -> f64 {
        self.bbox.width() / self.nx as f64
    }

    pub fn cell_height(&self) -> f64 {
        self.bbox.height() / self.ny as f64
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.bbox.x_min + (i as f64 + 0.5) * self.cell_width(),
            self.bbox.y_min + (j as f64 + 0.5) * self.cell_height(),
        )
    }

    pub fn class(&self, i: usize, j: usize) -> CellClass {
        self.cells[j * self.nx + i]
    }

    /// Cell containing `p`, if inside the window.
    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        if !self.bbox.contains(p) {
            return None;
        }
        let i = ((p.x - self.bbox.x_min) / self.cell_width()).floor() as usize;
        let j = ((p.y - self.bbox.y_min) / self.cell_height()).floor() as usize;
        Some((i.min(self.nx - 1), j.min(self.ny - 1)))
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|&&c| c == class).count()
    }
}

/// Cells crossed by the support, 4-connected so the trace is a wall for
/// the flood fill.
fn rasterize_support(grid: &DomainGrid, support: &Support) -> (Vec<Point>, BTreeSet<(usize, usize)>) {
    let step = 0.25 * grid.cell_width().min(grid.cell_height());
    let trace = support.sample(step);
    let mut cells = BTreeSet::new();
    let mut prev: Option<(usize, usize)> = None;
    for p in &trace {
        let cur = grid.cell_of(*p);
        if let (Some((pi, pj)), Some((ci, cj))) = (prev, cur) {
            if pi != ci && pj != cj {
                cells.insert((ci, pj));
            }
        }
        if let Some(c) = cur {
            cells.insert(c);
        }
        prev = cur;
    }
    (trace, cells)
}

/// Classifies the cells of a `nx × ny` grid over `bbox`.
///
/// A cell is covered when curves of both families pass through its centre.
/// Cells crossed by the support form their own class. Remaining cells are
/// exterior when 4-connected to the window boundary through uncovered
/// cells, and gaps otherwise.
pub fn coverage_mask(
    fam1: &dyn Family,
    fam2: &dyn Family,
    support: &Support,
    bbox: BBox,
    nx: usize,
    ny: usize,
) -> DomainGrid {
    let (nx, ny) = (nx.max(1), ny.max(1));
    let mut grid = DomainGrid {
        bbox,
        nx,
        ny,
        cells: Vec::new(),
        support_trace: Vec::new(),
    };
    let covered: Vec<bool> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let p = grid.cell_center(k % nx, k / nx);
            covers(fam1, p) && covers(fam2, p)
        })
        .collect();
    let (trace, support_cells) = rasterize_support(&grid, support);
    grid.support_trace = trace;
    grid.cells = covered
        .iter()
        .map(|&c| if c { CellClass::Covered } else { CellClass::Gap })
        .collect();
    for &(i, j) in &support_cells {
        grid.cells[j * nx + i] = CellClass::Support;
    }

    let mut queue = VecDeque::new();
    let mut seed = |i: usize, j: usize, cells: &mut Vec<CellClass>| {
        let k = j * nx + i;
        if cells[k] == CellClass::Gap {
            cells[k] = CellClass::ExteriorUncovered;
            queue.push_back((i, j));
        }
    };
    for i in 0..nx {
        seed(i, 0, &mut grid.cells);
        seed(i, ny - 1, &mut grid.cells);
    }
    for j in 0..ny {
        seed(0, j, &mut grid.cells);
        seed(nx - 1, j, &mut grid.cells);
    }
    while let Some((i, j)) = queue.pop_front() {
        let mut visit = |i: usize, j: usize| {
            let k = j * nx + i;
            if grid.cells[k] == CellClass::Gap {
                grid.cells[k] = CellClass::ExteriorUncovered;
                queue.push_back((i, j));
            }
        };
        if i > 0 {
            visit(i - 1, j);
        }
        if i + 1 < nx {
            visit(i + 1, j);
        }
        if j > 0 {
            visit(i, j - 1);
        }
        if j + 1 < ny {
            visit(i, j + 1);
        }
    }
    grid
}

/// A 4-connected component of gap cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapComponent {
    pub cells: Vec<(usize, usize)>,
    pub area: f64,
    pub bbox: BBox,
}

/// Gap components sorted by area, largest first.
pub fn find_gaps(grid: &DomainGrid) -> Vec<GapComponent> {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut seen = vec![false; nx * ny];
    let mut out = Vec::new();
    let cell_area = grid.cell_width() * grid.cell_height();
    for start in 0..nx * ny {
        if seen[start] || grid.cells[start] != CellClass::Gap {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut cells = Vec::new();
        while let Some(k) = queue.pop_front() {
            let (i, j) = (k % nx, k / nx);
            cells.push((i, j));
            let mut nbrs = Vec::with_capacity(4);
            if i > 0 {
                nbrs.push(k - 1);
            }
            if i + 1 < nx {
                nbrs.push(k + 1);
            }
            if j > 0 {
                nbrs.push(k - nx);
            }
            if j + 1 < ny {
                nbrs.push(k + nx);
            }
            for n in nbrs {
                if !seen[n] && grid.cells[n] == CellClass::Gap {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        cells.sort_by_key(|&(i, j)| (j, i));
        let (mut i0, mut i1, mut j0, mut j1) = (usize::MAX, 0, usize::MAX, 0);
        for &(i, j) in &cells {
            i0 = i0.min(i);
            i1 = i1.max(i);
            j0 = j0.min(j);
            j1 = j1.max(j);
        }
        let (cw, ch) = (grid.cell_width(), grid.cell_height());
        let bbox = BBox {
            x_min: grid.bbox.x_min + i0 as f64 * cw,
            x_max: grid.bbox.x_min + (i1 + 1) as f64 * cw,
            y_min: grid.bbox.y_min + j0 as f64 * ch,
            y_max: grid.bbox.y_min + (j1 + 1) as f64 * ch,
        };
        out.push(GapComponent {
            area: cells.len() as f64 * cell_area,
            cells,
            bbox,
        });
    }
    out.sort_by(|a, b| b.cells.len().cmp(&a.cells.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expression;
    use crate::inverse::FamilySpec;

    fn lines(slope: &str, inv: Invariant) -> CharacteristicFamily {
        FamilySpec::new(
            FamilyForm::YOfX,
            Expression::parse(slope).unwrap(),
            inv,
            Bracket::new(-20.0, 20.0).unwrap(),
        )
        .build()
        .unwrap()
    }

    #[test]
    fn straight_lines_cover_everything() {
        let f1 = lines("c - x", Invariant::First);
        let f2 = lines("c + x", Invariant::Second);
        let bbox = BBox::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let grid = coverage_mask(&f1, &f2, &Support::Line { lo: -0.5, hi: 0.5 }, bbox, 20, 20);
        assert_eq!(grid.count(CellClass::Gap), 0);
        assert_eq!(grid.count(CellClass::ExteriorUncovered), 0);
        assert!(find_gaps(&grid).is_empty());
    }

    #[test]
    fn single_enclosed_cell_is_a_gap() {
        let bbox = BBox::new(0.0, 3.0, 0.0, 3.0).unwrap();
        let mut cells = vec![CellClass::Covered; 9];
        cells[4] = CellClass::Gap;
        let grid = DomainGrid {
            bbox,
            nx: 3,
            ny: 3,
            cells,
            support_trace: vec![],
        };
        let gaps = find_gaps(&grid);
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].cells, vec![(1, 1)]);
        assert!((gaps[0].area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn translate_family_has_no_discriminant_envelope() {
        let mut spec = lines("c - x", Invariant::First).spec().clone();
        spec.free_range = Some(Bracket::new(-1.0, 1.0).unwrap());
        let f = spec.build().unwrap();
        let env = envelope_discriminant(&f, &[-1.0, 0.0, 1.0], &Tolerance::default()).unwrap();
        assert!(env.points.is_empty());
    }

    #[test]
    fn parallel_fields_have_no_locus() {
        let bbox = BBox::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let locus = degeneration_locus(
            |_| Direction::new(1.0, 1.0),
            |_| Direction::new(1.0, -1.0),
            bbox,
            10,
            10,
            1e-6,
        );
        assert!(locus.points.is_empty());
    }

    #[test]
    fn locus_of_rotating_field() {
        // second field turns through the first along x = 0.3
        let bbox = BBox::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let locus = degeneration_locus(
            |_| Direction::new(1.0, 0.0),
            |p: Point| Direction::new(1.0, p.x - 0.3),
            bbox,
            16,
            16,
            1e-9,
        );
        assert!(!locus.points.is_empty());
        for lp in &locus.points {
            assert!((lp.point.x - 0.3).abs() < 1e-9);
        }
        let env = boundary_envelopes(&locus);
        assert_eq!(env.len(), 1);
        assert_eq!(env[0].kind, EnvelopeKind::Boundary);
    }
}
