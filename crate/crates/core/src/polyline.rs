//! Planar polyline queries: self-intersection counting, crossings and closest
//! approach of two polylines and the (capped) Hausdorff distance. Crossing
//! searches prune segment pairs with a uniform hash grid, distance queries
//! use an R-tree of segments.

use std::collections::HashMap;

use rstar::primitives::Line;
use rstar::RTree;

pub type Point = [f64; 2];

#[inline]
fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Intersection point of segments `ab` and `cd` if they cross properly.
/// Touching at an endpoint or collinear overlap is not a crossing.
pub fn proper_crossing(a: Point, b: Point, c: Point, d: Point) -> Option<Point> {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        let t = o3 / (o3 - o4);
        Some([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
    } else {
        None
    }
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) };
    let (qx, qy) = (a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
    (qx * qx + qy * qy).sqrt()
}

type Cell = (i64, i64);

struct SegmentGrid {
    cell: f64,
    cells: HashMap<Cell, Vec<u32>>,
}

impl SegmentGrid {
    /// Registers the segments starting at points not rejected by `skip`.
    fn new(pts: &[Point], min_cell: f64, skip: &impl Fn(Point) -> bool) -> Self {
        let cell = longest_segment(pts, skip).max(min_cell).max(1e-12);
        let mut cells: HashMap<Cell, Vec<u32>> = HashMap::new();
        for (i, w) in pts.windows(2).enumerate().filter(|(_, w)| !skip(w[0])) {
            let (lo, hi) = Self::range(cell, w[0], w[1]);
            for cx in lo.0..=hi.0 {
                for cy in lo.1..=hi.1 {
                    cells.entry((cx, cy)).or_default().push(i as u32);
                }
            }
        }
        Self { cell, cells }
    }

    fn key(cell: f64, p: Point) -> Cell {
        ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64)
    }

    fn range(cell: f64, a: Point, b: Point) -> (Cell, Cell) {
        let lo = [a[0].min(b[0]), a[1].min(b[1])];
        let hi = [a[0].max(b[0]), a[1].max(b[1])];
        (Self::key(cell, lo), Self::key(cell, hi))
    }

    /// Segments registered in any cell within `reach` cells of `p`.
    fn near(&self, p: Point, reach: i64) -> impl Iterator<Item = u32> + '_ {
        let (cx, cy) = Self::key(self.cell, p);
        (cx - reach..=cx + reach)
            .flat_map(move |x| (cy - reach..=cy + reach).map(move |y| (x, y)))
            .filter_map(|k| self.cells.get(&k))
            .flat_map(|v| v.iter().copied())
    }
}

fn longest_segment(pts: &[Point], skip: &impl Fn(Point) -> bool) -> f64 {
    pts.windows(2).filter(|w| !skip(w[0])).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).fold(0.0, f64::max)
}

/// A crossing between segments `i` and `j` (`i < j`) of a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub i: usize,
    pub j: usize,
    pub point: Point,
}

/// Proper crossings between non-adjacent segments, stopping once `cap`
/// crossings have been found. Ordered by `(i, j)` when not saturated.
pub fn self_crossings(pts: &[Point], cap: usize) -> Vec<Crossing> {
    if pts.len() < 4 || cap == 0 {
        return Vec::new();
    }
    let grid = SegmentGrid::new(pts, 0.0, &|_| false);
    let mut keys: Vec<&Cell> = grid.cells.keys().collect();
    keys.sort_unstable();
    let mut out = Vec::new();
    for key in keys {
        let segs = &grid.cells[key];
        for (a, &i) in segs.iter().enumerate() {
            for &j in &segs[a + 1..] {
                let (i, j) = (i.min(j) as usize, i.max(j) as usize);
                if j == i + 1 {
                    continue;
                }
                if let Some(pt) = proper_crossing(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                    // Count each crossing only in the cell that contains it.
                    if SegmentGrid::key(grid.cell, pt) == *key {
                        out.push(Crossing { i, j, point: pt });
                        if out.len() >= cap {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|c| (c.i, c.j));
    out
}

/// Proper crossings between a segment `i` of `a` and a segment `j` of `b`,
/// stopping once `cap` have been found. Ordered by `(i, j)`. Segments
/// starting at a point for which `skip` returns true are ignored.
pub fn mutual_crossings(a: &[Point], b: &[Point], cap: usize, skip: impl Fn(Point) -> bool) -> Vec<Crossing> {
    if a.len() < 2 || b.len() < 2 || cap == 0 {
        return Vec::new();
    }
    let grid = SegmentGrid::new(b, longest_segment(a, &skip), &skip);
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for (i, w) in a.windows(2).enumerate() {
        if skip(w[0]) {
            continue;
        }
        seen.clear();
        seen.extend(grid.near(w[0], 1));
        seen.sort_unstable();
        seen.dedup();
        for &j in &seen {
            let j = j as usize;
            if let Some(point) = proper_crossing(w[0], w[1], b[j], b[j + 1]) {
                out.push(Crossing { i, j, point });
                if out.len() >= cap {
                    return out;
                }
            }
        }
    }
    out
}

pub fn count_self_intersections(pts: &[Point], cap: usize) -> usize {
    self_crossings(pts, cap).len()
}

fn segment_tree(pts: &[Point], skip: &impl Fn(Point) -> bool) -> RTree<Line<Point>> {
    RTree::bulk_load(pts.windows(2).filter(|w| !skip(w[0])).map(|w| Line::new(w[0], w[1])).collect())
}

/// Distance from `p` to the nearest segment, if one lies within `cap`.
fn distance_to(tree: &RTree<Line<Point>>, p: Point, cap: f64) -> Option<f64> {
    tree.nearest_neighbor_iter_with_distance_2(p).next().filter(|&(_, d2)| d2 < cap * cap).map(|(_, d2)| d2.sqrt())
}

fn point_distance(p: Point, q: &[Point], keep: impl Fn(usize) -> bool) -> Option<f64> {
    q.iter().enumerate().filter(|&(k, _)| keep(k)).map(|(_, r)| (p[0] - r[0]).hypot(p[1] - r[1])).reduce(f64::min)
}

/// Minimum distance between two polylines, capped at `radius`: any value
/// `>= radius` is returned as `radius`. Points for which `skip` returns true
/// are ignored (together with the segments starting at them).
pub fn closest_approach(a: &[Point], b: &[Point], radius: f64, skip: impl Fn(Point) -> bool) -> f64 {
    let mut best = radius;
    for (p, q) in [(a, b), (b, a)] {
        if q.len() < 2 {
            for &pt in p.iter().filter(|&&pt| !skip(pt)) {
                if let Some(d) = point_distance(pt, q, |k| !skip(q[k])) {
                    best = best.min(d);
                }
            }
            continue;
        }
        let tree = segment_tree(q, &skip);
        for &pt in p.iter().filter(|&&pt| !skip(pt)) {
            if let Some(d) = distance_to(&tree, pt, best) {
                best = best.min(d);
            }
        }
    }
    // Crossing segments have distance zero without either endpoint being close.
    if a.len() >= 2 && b.len() >= 2 {
        let cell = longest_segment(a, &skip).max(longest_segment(b, &skip));
        let grid = SegmentGrid::new(b, cell, &skip);
        for w in a.windows(2) {
            if skip(w[0]) {
                continue;
            }
            for k in grid.near(w[0], 1) {
                let k = k as usize;
                if proper_crossing(w[0], w[1], b[k], b[k + 1]).is_some() {
                    return 0.0;
                }
            }
        }
    }
    best
}

/// Directed distance from each point of `a` to the polyline `b`, maximised
/// over `a`; capped at `radius`.
fn directed_hausdorff(a: &[Point], b: &[Point], radius: f64) -> f64 {
    let worst = if b.len() < 2 {
        a.iter().filter_map(|&p| point_distance(p, b, |_| true)).fold(0.0, f64::max)
    } else {
        let tree = segment_tree(b, &|_| false);
        a.iter().map(|&p| distance_to(&tree, p, radius).unwrap_or(radius)).fold(0.0, f64::max)
    };
    worst.min(radius)
}

/// Symmetric Hausdorff distance between polylines, capped at `radius`.
pub fn hausdorff(a: &[Point], b: &[Point], radius: f64) -> f64 {
    directed_hausdorff(a, b, radius).max(directed_hausdorff(b, a, radius))
}
