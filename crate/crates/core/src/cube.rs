//! The cube of resolutions: circles at each vertex, merge/split edges, monotone paths.
//!
//! A vertex is a `u64` bitmask; bit `c` set means crossing `c` takes its 1-smoothing.

use thiserror::Error;

use crate::diagram::{ArcId, PlanarDiagram};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CubeError {
    #[error("crossing {0} is already 1-smoothed")]
    AlreadyOneSmoothed(usize),
    #[error("vertices are not comparable")]
    NotComparable,
    #[error("{k} changed crossings exceed the path cap {cap}")]
    PathCap { k: usize, cap: usize },
    #[error("crossing index {0} out of range")]
    CrossingOutOfRange(usize),
}

pub const DEFAULT_PATH_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub u: u64,
    /// Labels on each circle, sorted; the marked circle comes first, the rest by smallest label.
    pub circles: Vec<Vec<u32>>,
    pub marked_index: usize,
    pub weight: usize,
    /// Circle index of each label (index 0 unused).
    arc_circle: Vec<usize>,
}

impl Resolution {
    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }

    pub fn circle_of(&self, arc: u32) -> usize {
        self.arc_circle[arc as usize]
    }
}

fn find(parent: &mut [u32], x: u32) -> u32 {
    let mut r = x;
    while parent[r as usize] != r {
        r = parent[r as usize];
    }
    let mut y = x;
    while parent[y as usize] != r {
        let next = parent[y as usize];
        parent[y as usize] = r;
        y = next;
    }
    r
}

/// Smoothing pairs of a PD tuple: 0 joins `(a,b),(c,d)`; 1 joins `(a,d),(b,c)`.
pub fn smoothing_pairs(x: &[u32; 4], one: bool) -> [(u32, u32); 2] {
    if one {
        [(x[0], x[3]), (x[1], x[2])]
    } else {
        [(x[0], x[1]), (x[2], x[3])]
    }
}

pub fn resolve(d: &PlanarDiagram, u: u64) -> Resolution {
    let labels = d.arc_count() + d.unknotted_extras();
    let mut parent: Vec<u32> = (0..=labels as u32).collect();
    for (c, x) in d.crossings().iter().enumerate() {
        for (a, b) in smoothing_pairs(x, u >> c & 1 == 1) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra as usize] = rb;
        }
    }
    let bp_root = find(&mut parent, d.basepoint().0);
    let mut by_root: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
    for a in 1..=labels as u32 {
        let r = find(&mut parent, a);
        by_root.entry(r).or_default().push(a);
    }
    let marked = by_root.remove(&bp_root).expect("basepoint lies on a circle");
    let mut rest: Vec<Vec<u32>> = by_root.into_values().collect();
    rest.sort_by_key(|c| c[0]);
    let mut circles = vec![marked];
    circles.extend(rest);
    let mut arc_circle = vec![usize::MAX; labels + 1];
    for (i, c) in circles.iter().enumerate() {
        for &a in c {
            arc_circle[a as usize] = i;
        }
    }
    Resolution { u, circles, marked_index: 0, weight: u.count_ones() as usize, arc_circle }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Merge,
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCobordism {
    pub from: Resolution,
    pub to: Resolution,
    pub crossing: usize,
    pub kind: EdgeKind,
    /// Merge: the two source circles. Split: the single source circle.
    pub sources: Vec<usize>,
    /// Merge: the merged circle. Split: the two children, ordered by index.
    pub targets: Vec<usize>,
    /// Index in `to` of every source circle not involved in the saddle.
    pub passive: Vec<(usize, usize)>,
}

pub fn classify_edge(d: &PlanarDiagram, u: u64, crossing: usize) -> Result<EdgeCobordism, CubeError> {
    if crossing >= d.crossing_count() {
        return Err(CubeError::CrossingOutOfRange(crossing));
    }
    if u >> crossing & 1 == 1 {
        return Err(CubeError::AlreadyOneSmoothed(crossing));
    }
    let from = resolve(d, u);
    let to = resolve(d, u | 1 << crossing);
    Ok(edge_between(from, to, d.crossings()[crossing], crossing))
}

/// The saddle relating two resolutions that differ at `crossing`.
pub fn edge_between(from: Resolution, to: Resolution, x: [u32; 4], crossing: usize) -> EdgeCobordism {
    let [(a, b), (c, _)] = smoothing_pairs(&x, false);
    let (s1, s2) = (from.circle_of(a), from.circle_of(c));
    let (kind, sources, targets) = if s1 != s2 {
        let mut s = vec![s1, s2];
        s.sort_unstable();
        (EdgeKind::Merge, s, vec![to.circle_of(a)])
    } else {
        let mut t = vec![to.circle_of(a), to.circle_of(b)];
        t.sort_unstable();
        debug_assert_ne!(t[0], t[1]);
        (EdgeKind::Split, vec![s1], t)
    };
    let passive = (0..from.circle_count())
        .filter(|i| !sources.contains(i))
        .map(|i| (i, to.circle_of(from.circles[i][0])))
        .collect();
    EdgeCobordism { from, to, crossing, kind, sources, targets, passive }
}

/// Lexicographic flip order from `u` to `v`.
pub fn monotone_path(u: u64, v: u64) -> Result<Vec<usize>, CubeError> {
    if u & !v != 0 || u == v {
        return Err(CubeError::NotComparable);
    }
    let diff = v & !u;
    Ok((0..64).filter(|&c| diff >> c & 1 == 1).collect())
}

/// Every flip order from `u` to `v`, in lexicographic order.
pub fn all_monotone_paths(u: u64, v: u64, cap: usize) -> Result<Vec<Vec<usize>>, CubeError> {
    let base = monotone_path(u, v)?;
    if base.len() > cap {
        return Err(CubeError::PathCap { k: base.len(), cap });
    }
    let mut out = Vec::new();
    permute(&base, &mut Vec::new(), &mut vec![false; base.len()], &mut out);
    Ok(out)
}

fn permute(items: &[usize], current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
    if current.len() == items.len() {
        out.push(current.clone());
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            current.push(items[i]);
            permute(items, current, used, out);
            current.pop();
            used[i] = false;
        }
    }
}

/// Convenience for callers holding an `ArcId`.
pub fn marked_circle_contains(r: &Resolution, arc: ArcId) -> bool {
    r.circle_of(arc.0) == r.marked_index
}
