//! The double-comb domain: the open unit square minus vertical slits
//! `u = 1/n`, with even-index slits rising from the bottom edge to
//! `v = 3/4` and odd-index slits hanging from the top edge to `v = 1/4`.
//!
//! `split_check` verifies the two-component picture: the oscillating
//! polyline together with an exit arc to the right edge divides the domain
//! into two components, one seeing all high-index even slits and the other
//! all high-index odd slits. Verification is by exact supercover
//! rasterization and 4-connected flood fill of the free cells, with
//! stability under grid doubling as the anti-leak control.
//!
//! Raster walls are at least one cell thick, so in corridors only a few
//! cells wide they can pinch off free pockets that stay connected in the
//! continuous domain. Every free cell lies strictly on one side of the
//! separating curve (its closed square misses the wall's supercover), so
//! raster components are merged by side: the reported components are the
//! side classes, and a raster component touching both sides is a genuine
//! leak through the barrier, never a pocket.

use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CombError {
    #[error("slit index {0} out of range (slits start at 2)")]
    IndexOutOfRange(usize),
    #[error("domain must hold at least 2 slits, got {0}")]
    TooFewSlits(usize),
    #[error("polyline vertex {0} is not interior to the domain")]
    VertexOutsideDomain(usize),
    #[error("polyline segment {0} intersects a slit or leaves the square")]
    SlitCollision(usize),
    #[error("gamma prefix length {k_max} needs slits up to index {needed}, domain holds up to {present}")]
    PrefixTooLong {
        k_max: usize,
        needed: usize,
        present: usize,
    },
    #[error("arcs must share exactly their initial vertex")]
    ArcsDontShareStart,
    #[error("exit arc must end on the square boundary away from the left side")]
    ExitNotAtBoundary,
    #[error("empty polyline")]
    EmptyArc,
    #[error("raster too coarse: grid {0} below 8")]
    GridTooCoarse(usize),
    #[error("degenerate raster: component counts {0} and {1} at successive grid doublings")]
    DegenerateRaster(usize, usize),
}

/// A point of the closed unit square, coordinates `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub u: f64,
    pub v: f64,
}

impl Point {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }
}

/// A closed planar segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

/// The comb domain truncated to slits `l_2 .. l_{n_slits + 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombDomain {
    n_slits: usize,
}

impl CombDomain {
    pub fn new(n_slits: usize) -> Result<Self, CombError> {
        if n_slits < 2 {
            return Err(CombError::TooFewSlits(n_slits));
        }
        Ok(Self { n_slits })
    }

    pub fn n_slits(&self) -> usize {
        self.n_slits
    }

    /// Present slit indices, `2 ..= n_slits + 1`.
    pub fn slit_indices(&self) -> impl Iterator<Item = usize> {
        2..=self.n_slits + 1
    }

    pub fn max_index(&self) -> usize {
        self.n_slits + 1
    }

    pub fn slits(&self) -> Vec<Segment> {
        self.slit_indices().map(|n| slit(n).unwrap()).collect()
    }
}

/// The slit `l_n`: vertical segment at `u = 1/n`; even `n` spans
/// `v` in `[0, 3/4]`, odd `n` spans `[1/4, 1]`.
pub fn slit(n: usize) -> Result<Segment, CombError> {
    if n < 2 {
        return Err(CombError::IndexOutOfRange(n));
    }
    let u = 1.0 / n as f64;
    let (v0, v1) = if n % 2 == 0 { (0.0, 0.75) } else { (0.25, 1.0) };
    Ok(Segment {
        a: Point::new(u, v0),
        b: Point::new(u, v1),
    })
}

fn dist_point_to_vertical(p: Point, s: &Segment) -> f64 {
    // slits are vertical: s.a.u == s.b.u
    let du = p.u - s.a.u;
    let (v0, v1) = (s.a.v.min(s.b.v), s.a.v.max(s.b.v));
    let dv = if p.v < v0 {
        v0 - p.v
    } else if p.v > v1 {
        p.v - v1
    } else {
        0.0
    };
    (du * du + dv * dv).sqrt()
}

/// True iff `w` is strictly inside the open square and more than
/// `clearance` away from every present slit.
pub fn contains(domain: &CombDomain, w: Point, clearance: f64) -> bool {
    if !(w.u > 0.0 && w.u < 1.0 && w.v > 0.0 && w.v < 1.0) {
        return false;
    }
    domain
        .slits()
        .iter()
        .all(|s| dist_point_to_vertical(w, s) > clearance)
}

/// A polyline whose vertices are interior to the domain except possibly
/// the final one, and whose segments cross no slit.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyArc {
    vertices: Vec<Point>,
}

impl PolyArc {
    pub fn new(domain: &CombDomain, vertices: Vec<Point>) -> Result<Self, CombError> {
        if vertices.is_empty() {
            return Err(CombError::EmptyArc);
        }
        let last = vertices.len() - 1;
        for (i, p) in vertices.iter().enumerate() {
            let inside_closed = p.u >= 0.0 && p.u <= 1.0 && p.v >= 0.0 && p.v <= 1.0;
            if !inside_closed {
                return Err(CombError::VertexOutsideDomain(i));
            }
            if i != last && !contains(domain, *p, 0.0) {
                return Err(CombError::VertexOutsideDomain(i));
            }
        }
        let slits = domain.slits();
        for i in 0..last {
            let seg = Segment {
                a: vertices[i],
                b: vertices[i + 1],
            };
            if slits.iter().any(|s| segments_intersect(&seg, s)) {
                return Err(CombError::SlitCollision(i));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn first(&self) -> Point {
        self.vertices[0]
    }

    pub fn last(&self) -> Point {
        *self.vertices.last().unwrap()
    }

    fn segments(&self) -> Vec<Segment> {
        self.vertices
            .windows(2)
            .map(|w| Segment { a: w[0], b: w[1] })
            .collect()
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.u >= a.u.min(b.u)
        && p.u <= a.u.max(b.u)
        && p.v >= a.v.min(b.v)
        && p.v <= a.v.max(b.v)
}

/// Closed segment intersection (touching counts).
fn segments_intersect(s: &Segment, t: &Segment) -> bool {
    let d1 = orient(t.a, t.b, s.a);
    let d2 = orient(t.a, t.b, s.b);
    let d3 = orient(s.a, s.b, t.a);
    let d4 = orient(s.a, s.b, t.b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(t.a, t.b, s.a))
        || (d2 == 0.0 && on_segment(t.a, t.b, s.b))
        || (d3 == 0.0 && on_segment(s.a, s.b, t.a))
        || (d4 == 0.0 && on_segment(s.a, s.b, t.b))
}

/// The oscillating polyline prefix: vertices
/// `M_k = (1/(k+1), 7/8 if k odd else 1/8)`, `k = 1 ..= k_max`. Each
/// vertex sits above an even slit or below an odd slit, so the weave
/// crosses nothing; this is verified, not assumed.
pub fn gamma_polyline(domain: &CombDomain, k_max: usize) -> Result<PolyArc, CombError> {
    if k_max < 1 {
        return Err(CombError::EmptyArc);
    }
    if k_max + 1 > domain.max_index() {
        return Err(CombError::PrefixTooLong {
            k_max,
            needed: k_max + 1,
            present: domain.max_index(),
        });
    }
    let vertices = (1..=k_max)
        .map(|k| {
            let v = if k % 2 == 1 { 0.875 } else { 0.125 };
            Point::new(1.0 / (k + 1) as f64, v)
        })
        .collect();
    PolyArc::new(domain, vertices)
}

/// Raster split report for one grid resolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub components: usize,
    /// Component id (1-based, in flood-fill discovery order of the first
    /// raster component on that barrier side) to the sorted slit indices
    /// adjacent to it (free cell within one cell-width).
    pub adjacency: BTreeMap<usize, Vec<usize>>,
    pub grid: usize,
    /// Component covering every present even index at or above the
    /// recorded threshold, if any: `(component id, threshold)`.
    pub even_component: Option<(usize, usize)>,
    /// Same for odd indices.
    pub odd_component: Option<(usize, usize)>,
    pub pass: bool,
}

const GAMMA_HIGH: f64 = 0.875;
const GAMMA_LOW: f64 = 0.125;

/// The axis-aligned closure of the truncated separating curve: the weave
/// is continued past every remaining slit (above even, below odd) and then
/// run horizontally into the left side. A finite open-ended prefix does
/// not separate anything; the closure stands in for the infinitely
/// continued arc whose cluster set is the left side.
fn closure_tail(domain: &CombDomain, from: Point) -> Vec<Point> {
    let mut tail = Vec::new();
    let mut v = from.v;
    for n in domain.slit_indices() {
        let u = 1.0 / n as f64;
        if u < from.u - 1e-12 {
            v = if n % 2 == 0 { GAMMA_HIGH } else { GAMMA_LOW };
            tail.push(Point::new(u, v));
        }
    }
    tail.push(Point::new(0.0, v));
    tail
}

fn on_square_boundary(p: Point) -> bool {
    p.u == 0.0 || p.u == 1.0 || p.v == 0.0 || p.v == 1.0
}

/// Closed segment vs closed axis-aligned rectangle intersection
/// (Liang-Barsky with closed inequalities), the primitive behind the
/// exact supercover.
fn segment_touches_rect(s: &Segment, x0: f64, x1: f64, y0: f64, y1: f64) -> bool {
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let axes = [(s.a.u, s.b.u - s.a.u, x0, x1), (s.a.v, s.b.v - s.a.v, y0, y1)];
    for &(p0, d, lo, hi) in &axes {
        if d == 0.0 {
            if p0 < lo || p0 > hi {
                return false;
            }
        } else {
            let (ta, tb) = {
                let ta = (lo - p0) / d;
                let tb = (hi - p0) / d;
                if ta <= tb {
                    (ta, tb)
                } else {
                    (tb, ta)
                }
            };
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Mark every grid cell whose closed square the segment touches
/// (supercover: a segment through a cell corner blocks all four cells, so
/// no diagonal leak is possible).
fn rasterize_segment(s: &Segment, grid: usize, blocked: &mut [bool]) {
    let n = grid as f64;
    let clamp = |x: i64| x.clamp(0, grid as i64 - 1) as usize;
    let ix0 = clamp(((s.a.u.min(s.b.u)) * n).floor() as i64 - 1);
    let ix1 = clamp(((s.a.u.max(s.b.u)) * n).ceil() as i64 + 1);
    let iy0 = clamp(((s.a.v.min(s.b.v)) * n).floor() as i64 - 1);
    let iy1 = clamp(((s.a.v.max(s.b.v)) * n).ceil() as i64 + 1);
    for ix in ix0..=ix1 {
        for iy in iy0..=iy1 {
            if segment_touches_rect(
                s,
                ix as f64 / n,
                (ix + 1) as f64 / n,
                iy as f64 / n,
                (iy + 1) as f64 / n,
            ) {
                blocked[iy * grid + ix] = true;
            }
        }
    }
}

/// Cells within one cell-width of a segment: its supercover dilated by one
/// Chebyshev ring.
fn near_cells(s: &Segment, grid: usize) -> Vec<usize> {
    let mut core = vec![false; grid * grid];
    rasterize_segment(s, grid, &mut core);
    let mut out = Vec::new();
    for iy in 0..grid {
        for ix in 0..grid {
            if core[iy * grid + ix] {
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                        if jx >= 0 && jy >= 0 && (jx as usize) < grid && (jy as usize) < grid {
                            out.push(jy as usize * grid + jx as usize);
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Heights at which the vertical line at `u` crosses the barrier, sorted.
/// Half-open `[min_u, max_u)` spans count shared vertices exactly once. A
/// point is below the barrier iff an odd number of crossings lie above it:
/// the barrier runs from the right side of the square into the left side,
/// so odd parity means the top edge is unreachable without crossing it.
fn barrier_crossings(u: f64, barrier: &[Segment]) -> Vec<f64> {
    let mut vs = Vec::new();
    for s in barrier {
        let (lo, hi) = if s.a.u <= s.b.u { (s.a, s.b) } else { (s.b, s.a) };
        if u >= lo.u && u < hi.u {
            let t = (u - lo.u) / (hi.u - lo.u);
            vs.push(lo.v + t * (hi.v - lo.v));
        }
    }
    vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vs
}

/// Smallest present index whose suffix (all present indices of the given
/// parity at or above it) is entirely contained in `adjacent`.
fn suffix_threshold(present: &[usize], adjacent: &[usize]) -> Option<usize> {
    let mut covered_from = None;
    for &i in present.iter().rev() {
        if adjacent.binary_search(&i).is_ok() {
            covered_from = Some(i);
        } else {
            break;
        }
    }
    covered_from
}

/// Rasterized verification of the two-component split.
///
/// `gamma` is the oscillating prefix, `gamma1` the exit arc from the shared
/// initial vertex to the square boundary. The truncated prefix is closed
/// into the left side by [`closure_tail`] before rasterizing; the report
/// passes iff the free cells form exactly two components (raster
/// components merged by barrier side; see the module docs), one adjacent
/// to every present even slit above a finite threshold and the other to
/// every present odd slit above a finite threshold.
pub fn split_check(
    domain: &CombDomain,
    gamma: &PolyArc,
    gamma1: &PolyArc,
    grid: usize,
) -> Result<SplitReport, CombError> {
    if grid < 8 {
        return Err(CombError::GridTooCoarse(grid));
    }
    if gamma.first() != gamma1.first() {
        return Err(CombError::ArcsDontShareStart);
    }
    let exit = gamma1.last();
    if !on_square_boundary(exit) || exit.u == 0.0 {
        return Err(CombError::ExitNotAtBoundary);
    }

    // assemble the barrier: gamma1, gamma, and the closure tail
    let mut barrier: Vec<Segment> = Vec::new();
    barrier.extend(gamma1.segments());
    barrier.extend(gamma.segments());
    let tail = closure_tail(domain, gamma.last());
    let mut prev = gamma.last();
    let slits = domain.slits();
    for (i, &p) in tail.iter().enumerate() {
        let seg = Segment { a: prev, b: p };
        if slits.iter().any(|s| segments_intersect(&seg, s)) {
            return Err(CombError::SlitCollision(gamma.vertices().len() - 1 + i));
        }
        barrier.push(seg);
        prev = p;
    }

    let mut blocked = vec![false; grid * grid];
    for s in &slits {
        rasterize_segment(s, grid, &mut blocked);
    }
    for s in &barrier {
        rasterize_segment(s, grid, &mut blocked);
    }

    // 4-connected flood fill of free cells
    let mut comp = vec![0u32; grid * grid];
    let mut components = 0usize;
    let mut stack: Vec<usize> = Vec::new();
    for start in 0..grid * grid {
        if blocked[start] || comp[start] != 0 {
            continue;
        }
        components += 1;
        let id = components as u32;
        comp[start] = id;
        stack.push(start);
        while let Some(c) = stack.pop() {
            let (ix, iy) = (c % grid, c / grid);
            let mut push = |j: usize| {
                if !blocked[j] && comp[j] == 0 {
                    comp[j] = id;
                    stack.push(j);
                }
            };
            if ix > 0 {
                push(c - 1);
            }
            if ix + 1 < grid {
                push(c + 1);
            }
            if iy > 0 {
                push(c - grid);
            }
            if iy + 1 < grid {
                push(c + grid);
            }
        }
    }

    // classify every raster component by barrier side of its cells'
    // centers; a free cell's closed square misses the wall supercover, so
    // its center is strictly on one side. Same-side components are merged
    // (thick raster walls pinch off pockets that the continuous domain
    // keeps connected); a component with cells on both sides is a genuine
    // leak through the barrier and collapses the sides into one class.
    let scale = grid as f64;
    let mut below_seen = vec![false; components + 1];
    let mut above_seen = vec![false; components + 1];
    for ix in 0..grid {
        let crossings = barrier_crossings((ix as f64 + 0.5) / scale, &barrier);
        for iy in 0..grid {
            let id = comp[iy * grid + ix] as usize;
            if id == 0 {
                continue;
            }
            let v = (iy as f64 + 0.5) / scale;
            let above_count = crossings.len() - crossings.partition_point(|&c| c <= v);
            if above_count % 2 == 1 {
                below_seen[id] = true;
            } else {
                above_seen[id] = true;
            }
        }
    }
    let leak = (1..=components).any(|id| below_seen[id] && above_seen[id]);
    // group ids in raster discovery order (deterministic)
    let mut side_group = [0usize; 2]; // [below, above]
    let mut group_count = 0usize;
    let mut group_of = vec![0usize; components + 1];
    for id in 1..=components {
        let side = if leak || below_seen[id] { 0 } else { 1 };
        if side_group[side] == 0 {
            group_count += 1;
            side_group[side] = group_count;
        }
        group_of[id] = side_group[side];
    }
    let components = group_count;

    // slit adjacency per merged component
    let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for id in 1..=components {
        adjacency.insert(id, Vec::new());
    }
    for n in domain.slit_indices() {
        let s = slit(n)?;
        let mut seen: Vec<usize> = Vec::new();
        for cell in near_cells(&s, grid) {
            if comp[cell] != 0 {
                seen.push(group_of[comp[cell] as usize]);
            }
        }
        seen.sort_unstable();
        seen.dedup();
        for id in seen {
            adjacency.get_mut(&id).unwrap().push(n);
        }
    }

    let evens: Vec<usize> = domain.slit_indices().filter(|n| n % 2 == 0).collect();
    let odds: Vec<usize> = domain.slit_indices().filter(|n| n % 2 == 1).collect();
    let mut even_component = None;
    let mut odd_component = None;
    if components == 2 {
        for id in 1..=2usize {
            let adj = &adjacency[&id];
            if even_component.is_none() {
                if let Some(t) = suffix_threshold(&evens, adj) {
                    even_component = Some((id, t));
                    continue;
                }
            }
            if odd_component.is_none() {
                if let Some(t) = suffix_threshold(&odds, adj) {
                    odd_component = Some((id, t));
                }
            }
        }
    }
    let pass = components == 2
        && matches!(
            (even_component, odd_component),
            (Some((a, _)), Some((b, _))) if a != b
        );
    Ok(SplitReport {
        components,
        adjacency,
        grid,
        even_component,
        odd_component,
        pass,
    })
}

/// Run [`split_check`] at `grid` and `2 * grid`; the verdict is stable iff
/// both pass with matching component counts and even/odd assignments. Two
/// successive non-two-component rasters are reported as degenerate.
pub fn split_check_stable(
    domain: &CombDomain,
    gamma: &PolyArc,
    gamma1: &PolyArc,
    grid: usize,
) -> Result<(SplitReport, SplitReport, bool), CombError> {
    let base = split_check(domain, gamma, gamma1, grid)?;
    let doubled = split_check(domain, gamma, gamma1, grid * 2)?;
    if base.components != 2 && doubled.components != 2 {
        return Err(CombError::DegenerateRaster(base.components, doubled.components));
    }
    let stable = base.pass
        && doubled.pass
        && base.components == doubled.components
        && base.even_component.map(|(id, _)| id) == doubled.even_component.map(|(id, _)| id)
        && base.odd_component.map(|(id, _)| id) == doubled.odd_component.map(|(id, _)| id);
    Ok((base, doubled, stable))
}
