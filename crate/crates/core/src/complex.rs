//! The Khovanov filtered complex: generators graded by `(h, q)`, edge maps, and the composite
//! diagonal maps `∂_{u,v}` for every comparable vertex pair.
//!
//! Generators are indexed globally in (weight, vertex, local monomial) order, so each weight
//! class is a contiguous range and the filtration `F_p = ⊕_{i ≥ p} C_i` is a suffix.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cube::{edge_between, monotone_path, resolve, CubeError, EdgeCobordism, EdgeKind, Resolution};
use crate::diagram::PlanarDiagram;
use crate::gf2::{GF2Matrix, GF2Vector};
use crate::par::{map_range, ExecMode};
use crate::tqft::{hfl_generator_matrix, Generator, GeneratorWord, SaddleMap, TqftError};

pub const DEFAULT_MAX_GENERATORS: u64 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("complex needs at least {generators} generators, above the cap of {cap}")]
    TooLarge { generators: u64, cap: u64 },
    #[error("too many crossings ({0}) for the vertex encoding")]
    TooManyCrossings(usize),
    #[error(transparent)]
    Cube(#[from] CubeError),
    #[error(transparent)]
    Tqft(#[from] TqftError),
    #[error("path {path:?} is not a flip order from {u:#b} to {v:#b}")]
    BadPath { u: u64, v: u64, path: Vec<usize> },
    #[error("generator-word realization is only defined for the reduced theory")]
    ReducedOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Reduced,
    Unreduced,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Reduced => "reduced",
            Flavor::Unreduced => "unreduced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathChoice {
    Lexicographic,
    /// Each diagonal composed along an independent random flip order.
    Random(u64),
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    pub max_generators: u64,
    pub mode: ExecMode,
    pub path: PathChoice,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { max_generators: DEFAULT_MAX_GENERATORS, mode: ExecMode::Parallel, path: PathChoice::Lexicographic }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KhGenerator {
    pub vertex: u64,
    /// Unreduced: `v-` mask over circles. Reduced: `B` mask over unmarked circles.
    pub monomial: u64,
    pub h: i32,
    pub q: i32,
}

/// The generators of one quantum degree with the full differential restricted to them.
#[derive(Debug, Clone)]
pub struct QBlock {
    pub q: i32,
    /// Global generator indices, increasing (so weights are non-decreasing).
    pub generators: Vec<usize>,
    /// Weight of each local generator.
    pub weights: Vec<usize>,
    /// Sorted local target indices of `∂` for each local generator.
    pub columns: Vec<Vec<u32>>,
}

impl QBlock {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Local index range of weight `w`.
    pub fn weight_range(&self, w: usize) -> std::ops::Range<usize> {
        let start = self.weights.partition_point(|&x| x < w);
        let end = self.weights.partition_point(|&x| x <= w);
        start..end
    }
}

#[derive(Debug, Clone)]
pub struct Complex {
    flavor: Flavor,
    crossings: usize,
    n_plus: usize,
    n_minus: usize,
    vertex_offset: Vec<usize>,
    vertex_dim: Vec<usize>,
    generators: Vec<KhGenerator>,
    /// `columns[x]`: sorted global targets of `∂x` (all filtration jumps).
    columns: Vec<Vec<u32>>,
}

fn local_dim(flavor: Flavor, circles: usize) -> usize {
    match flavor {
        Flavor::Unreduced => 1 << circles,
        Flavor::Reduced => 1 << (circles - 1),
    }
}

/// Edge map on local monomials.
fn image_into(map: &SaddleMap, flavor: Flavor, mono: u64, out: &mut Vec<u64>) {
    match flavor {
        Flavor::Unreduced => map.image(mono, out),
        Flavor::Reduced => map.image_reduced(mono, out),
    }
}

/// Applies an edge to a local map given by columns.
fn push_forward(cols: &[GF2Vector], map: &SaddleMap, flavor: Flavor, target_dim: usize) -> Vec<GF2Vector> {
    let mut buf = Vec::with_capacity(2);
    cols.iter()
        .map(|c| {
            let mut out = GF2Vector::zeros(target_dim);
            for m in c.ones() {
                buf.clear();
                image_into(map, flavor, m as u64, &mut buf);
                for &t in &buf {
                    out.toggle(t as usize);
                }
            }
            out
        })
        .collect()
}

fn identity_columns(dim: usize) -> Vec<GF2Vector> {
    (0..dim).map(|i| GF2Vector::unit(dim, i)).collect()
}

fn columns_to_matrix(rows: usize, cols: &[GF2Vector]) -> GF2Matrix {
    GF2Matrix::from_columns(rows, cols).expect("column lengths match")
}

struct Cube {
    resolutions: Vec<Resolution>,
    /// `edges[v * n + c]` for `v` with bit `c` clear.
    edges: Vec<Option<SaddleMap>>,
}

fn build_cube(d: &PlanarDiagram, mode: ExecMode) -> Cube {
    let n = d.crossing_count();
    let resolutions: Vec<Resolution> = map_range(mode, 1 << n, |u| resolve(d, u as u64));
    let edges = map_range(mode, (1usize << n) * n.max(1), |idx| {
        if n == 0 {
            return None;
        }
        let (u, c) = (idx / n, idx % n);
        if u >> c & 1 == 1 {
            return None;
        }
        let e = edge_between(resolutions[u].clone(), resolutions[u | 1 << c].clone(), d.crossings()[c], c);
        Some(SaddleMap::new(&e))
    });
    Cube { resolutions, edges }
}

impl Cube {
    fn edge(&self, n: usize, v: u64, c: usize) -> &SaddleMap {
        self.edges[v as usize * n + c].as_ref().expect("edge exists")
    }
}

/// Lower bound on the generator count, cheap enough to evaluate before enumeration.
fn check_size(d: &PlanarDiagram, flavor: Flavor, cap: u64) -> Result<(), ComplexError> {
    let n = d.crossing_count();
    if n >= 40 {
        return Err(ComplexError::TooManyCrossings(n));
    }
    let least = match flavor {
        Flavor::Reduced => 1u64 << n,
        Flavor::Unreduced => 2u64 << n,
    };
    if least > cap {
        return Err(ComplexError::TooLarge { generators: least, cap });
    }
    Ok(())
}

impl Complex {
    pub fn build(d: &PlanarDiagram, flavor: Flavor) -> Result<Complex, ComplexError> {
        Self::build_with(d, flavor, BuildOptions::default())
    }

    pub fn build_with(d: &PlanarDiagram, flavor: Flavor, opts: BuildOptions) -> Result<Complex, ComplexError> {
        check_size(d, flavor, opts.max_generators)?;
        let n = d.crossing_count();
        let mode = opts.mode.effective();
        let cube = build_cube(d, mode);
        let vertex_dim: Vec<usize> = cube.resolutions.iter().map(|r| local_dim(flavor, r.circle_count())).collect();
        let total: u64 = vertex_dim.iter().map(|&x| x as u64).sum();
        if total > opts.max_generators {
            return Err(ComplexError::TooLarge { generators: total, cap: opts.max_generators });
        }

        let mut order: Vec<u64> = (0..1u64 << n).collect();
        order.sort_by_key(|&u| (u.count_ones(), u));
        let mut vertex_offset = vec![0usize; 1 << n];
        let mut generators = Vec::with_capacity(total as usize);
        let (n_plus, n_minus) = (d.n_plus() as i32, d.n_minus() as i32);
        for &u in &order {
            vertex_offset[u as usize] = generators.len();
            let r = &cube.resolutions[u as usize];
            let k = r.circle_count() as i32;
            let w = u.count_ones() as i32;
            for m in 0..vertex_dim[u as usize] as u64 {
                let deg = k - 2 * m.count_ones() as i32;
                let shift = if flavor == Flavor::Reduced { -1 } else { 0 };
                generators.push(KhGenerator { vertex: u, monomial: m, h: w - n_minus, q: deg + w + n_plus - 2 * n_minus + shift });
            }
        }

        let per_vertex: Vec<Vec<Vec<u32>>> = map_range(mode, 1 << n, |u| {
            vertex_columns(&cube, n, u as u64, flavor, &vertex_dim, &vertex_offset, opts.path)
        });
        let mut columns = vec![Vec::new(); generators.len()];
        for (u, cols) in per_vertex.into_iter().enumerate() {
            for (j, c) in cols.into_iter().enumerate() {
                columns[vertex_offset[u] + j] = c;
            }
        }
        Ok(Complex { flavor, crossings: n, n_plus: n_plus as usize, n_minus: n_minus as usize, vertex_offset, vertex_dim, generators, columns })
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn generators(&self) -> &[KhGenerator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn weight(&self, x: usize) -> usize {
        self.generators[x].vertex.count_ones() as usize
    }

    /// Sorted global targets of `∂x`.
    pub fn column(&self, x: usize) -> &[u32] {
        &self.columns[x]
    }

    /// Chain-group dimension of each weight class `0..=n`.
    pub fn chain_dims_by_weight(&self) -> Vec<usize> {
        let mut dims = vec![0; self.crossings + 1];
        for g in &self.generators {
            dims[g.vertex.count_ones() as usize] += 1;
        }
        dims
    }

    pub fn vertex_range(&self, u: u64) -> std::ops::Range<usize> {
        let start = self.vertex_offset[u as usize];
        start..start + self.vertex_dim[u as usize]
    }

    /// Global index range of weight class `w`.
    pub fn weight_range(&self, w: usize) -> std::ops::Range<usize> {
        let start = self.generators.partition_point(|g| (g.vertex.count_ones() as usize) < w);
        let end = self.generators.partition_point(|g| (g.vertex.count_ones() as usize) <= w);
        start..end
    }

    /// `∂_k` from weight `i` to weight `i + k`, on the weight-class orderings.
    pub fn component(&self, k: usize, i: usize) -> GF2Matrix {
        let src = self.weight_range(i);
        let dst = if i + k <= self.crossings { self.weight_range(i + k) } else { 0..0 };
        let cols: Vec<GF2Vector> = src
            .map(|x| {
                GF2Vector::from_support(
                    dst.len(),
                    self.columns[x]
                        .iter()
                        .map(|&t| t as usize)
                        .filter(|t| dst.contains(t))
                        .map(|t| t - dst.start),
                )
            })
            .collect();
        columns_to_matrix(dst.len(), &cols)
    }

    /// The block `∂_{u,v}` between canonical vertex bases.
    pub fn vertex_block(&self, u: u64, v: u64) -> GF2Matrix {
        let (src, dst) = (self.vertex_range(u), self.vertex_range(v));
        let cols: Vec<GF2Vector> = src
            .map(|x| {
                GF2Vector::from_support(
                    dst.len(),
                    self.columns[x].iter().map(|&t| t as usize).filter(|t| dst.contains(t)).map(|t| t - dst.start),
                )
            })
            .collect();
        columns_to_matrix(dst.len(), &cols)
    }

    /// Every entry joins generators of equal `q` and strictly larger weight.
    pub fn check_q_homogeneity(&self) -> bool {
        self.columns.iter().enumerate().all(|(x, col)| {
            col.iter().all(|&t| {
                let (a, b) = (&self.generators[x], &self.generators[t as usize]);
                a.q == b.q && b.vertex.count_ones() > a.vertex.count_ones() && a.vertex & !b.vertex == 0
            })
        })
    }

    /// Number of generators `x` with `∂∂x ≠ 0`.
    pub fn d_squared_violations(&self) -> usize {
        let mut scratch: HashMap<u32, bool> = HashMap::new();
        self.columns
            .iter()
            .filter(|col| {
                scratch.clear();
                for &y in col.iter() {
                    for &z in &self.columns[y as usize] {
                        let e = scratch.entry(z).or_insert(false);
                        *e = !*e;
                    }
                }
                scratch.values().any(|&b| b)
            })
            .count()
    }

    pub fn verify_d_squared(&self) -> bool {
        self.d_squared_violations() == 0
    }

    /// `(∂_1 + … + ∂_i)² = 0`, for the truncated differentials.
    pub fn truncation_squares_to_zero(&self, i: usize) -> bool {
        let w = |x: usize| self.weight(x);
        let mut scratch: HashMap<u32, bool> = HashMap::new();
        (0..self.len()).all(|x| {
            scratch.clear();
            for &y in self.columns[x].iter().filter(|&&y| w(y as usize) - w(x) <= i) {
                for &z in self.columns[y as usize].iter().filter(|&&z| w(z as usize) - w(y as usize) <= i) {
                    let e = scratch.entry(z).or_insert(false);
                    *e = !*e;
                }
            }
            !scratch.values().any(|&b| b)
        })
    }

    /// A copy with one differential entry flipped, for negative controls.
    pub fn with_toggled_entry(&self, source: usize, target: usize) -> Complex {
        let mut c = self.clone();
        let col = &mut c.columns[source];
        match col.binary_search(&(target as u32)) {
            Ok(i) => {
                col.remove(i);
            }
            Err(i) => col.insert(i, target as u32),
        }
        c
    }

    /// Distinct quantum degrees, increasing.
    pub fn q_values(&self) -> Vec<i32> {
        let mut qs: Vec<i32> = self.generators.iter().map(|g| g.q).collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    /// All quantum blocks, in increasing `q`.
    pub fn q_blocks(&self) -> Vec<QBlock> {
        let mut groups: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (x, g) in self.generators.iter().enumerate() {
            groups.entry(g.q).or_default().push(x);
        }
        let mut local = vec![u32::MAX; self.len()];
        groups
            .into_iter()
            .map(|(q, gens)| {
                for (i, &x) in gens.iter().enumerate() {
                    local[x] = i as u32;
                }
                let columns = gens
                    .iter()
                    .map(|&x| {
                        let mut c: Vec<u32> = self.columns[x].iter().map(|&t| local[t as usize]).collect();
                        debug_assert!(c.iter().all(|&t| t != u32::MAX), "differential leaves its q-block");
                        c.retain(|&t| t != u32::MAX);
                        c
                    })
                    .collect();
                let weights = gens.iter().map(|&x| self.weight(x)).collect();
                QBlock { q, generators: gens, weights, columns }
            })
            .collect()
    }
}

/// Columns (global targets) for every generator of vertex `u`.
fn vertex_columns(
    cube: &Cube,
    n: usize,
    u: u64,
    flavor: Flavor,
    vertex_dim: &[usize],
    vertex_offset: &[usize],
    path: PathChoice,
) -> Vec<Vec<u32>> {
    let du = vertex_dim[u as usize];
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); du];
    let comp = !u & ((1u64 << n) - 1);
    let mut emit = |v: u64, cols: &[GF2Vector]| {
        let off = vertex_offset[v as usize] as u32;
        for (j, c) in cols.iter().enumerate() {
            out[j].extend(c.ones().map(|t| off + t as u32));
        }
    };
    match path {
        PathChoice::Lexicographic => {
            let mut memo: HashMap<u64, Vec<GF2Vector>> = HashMap::new();
            memo.insert(0, identity_columns(du));
            let mut s = comp & comp.wrapping_neg();
            while s != 0 {
                let high = 63 - s.leading_zeros() as usize;
                let prev = s & !(1 << high);
                let v = u | s;
                let cols = push_forward(&memo[&prev], cube.edge(n, u | prev, high), flavor, vertex_dim[v as usize]);
                emit(v, &cols);
                memo.insert(s, cols);
                s = s.wrapping_sub(comp) & comp;
            }
        }
        PathChoice::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ u.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut s = comp & comp.wrapping_neg();
            while s != 0 {
                let v = u | s;
                let mut flips = monotone_path(u, v).expect("comparable");
                flips.shuffle(&mut rng);
                let cols = compose_along(cube, n, u, &flips, flavor, vertex_dim);
                emit(v, &cols);
                s = s.wrapping_sub(comp) & comp;
            }
        }
    }
    for c in &mut out {
        c.sort_unstable();
    }
    out
}

fn compose_along(cube: &Cube, n: usize, u: u64, flips: &[usize], flavor: Flavor, vertex_dim: &[usize]) -> Vec<GF2Vector> {
    let mut cols = identity_columns(vertex_dim[u as usize]);
    let mut at = u;
    for &c in flips {
        let next = at | 1 << c;
        cols = push_forward(&cols, cube.edge(n, at, c), flavor, vertex_dim[next as usize]);
        at = next;
    }
    cols
}

/// Composite cobordism map from vertex `u` to `v`, along `path` or the lexicographic order.
pub fn diagonal_map(d: &PlanarDiagram, u: u64, v: u64, flavor: Flavor, path: Option<&[usize]>) -> Result<GF2Matrix, ComplexError> {
    let lex = monotone_path(u, v)?;
    let flips: Vec<usize> = match path {
        None => lex,
        Some(p) => {
            let mut sorted = p.to_vec();
            sorted.sort_unstable();
            if sorted != lex {
                return Err(ComplexError::BadPath { u, v, path: p.to_vec() });
            }
            p.to_vec()
        }
    };
    let mut at = u;
    let mut dim = local_dim(flavor, resolve(d, u).circle_count());
    let mut cols = identity_columns(dim);
    for &c in &flips {
        let next = at | 1 << c;
        let e = edge_between(resolve(d, at), resolve(d, next), d.crossings()[c], c);
        dim = local_dim(flavor, e.to.circle_count());
        cols = push_forward(&cols, &SaddleMap::new(&e), flavor, dim);
        at = next;
    }
    Ok(columns_to_matrix(dim, &cols))
}

/// Matrix of a single edge on canonical local bases.
pub fn edge_matrix(e: &EdgeCobordism, flavor: Flavor) -> GF2Matrix {
    let map = SaddleMap::new(e);
    let (src, dst) = (local_dim(flavor, e.from.circle_count()), local_dim(flavor, e.to.circle_count()));
    columns_to_matrix(dst, &push_forward(&identity_columns(src), &map, flavor, dst))
}

/// Adjacent swaps turning the arrangement `from` into `to`; entries are positions (0-based),
/// and position 0 is never moved.
fn swaps_between(from: &[usize], to: &[usize]) -> Vec<usize> {
    let mut cur = from.to_vec();
    let mut swaps = Vec::new();
    for j in 1..to.len() {
        let mut p = cur.iter().position(|&c| c == to[j]).expect("same elements");
        while p > j {
            cur.swap(p - 1, p);
            swaps.push(p - 1);
            p -= 1;
        }
    }
    swaps
}

/// Realizes a reduced edge as swaps, one saddle generator, and swaps, on canonical bases.
pub fn edge_as_generator_word(e: &EdgeCobordism, flavor: Flavor) -> Result<GeneratorWord, ComplexError> {
    if flavor != Flavor::Reduced {
        return Err(ComplexError::ReducedOnly);
    }
    let n = e.from.circle_count();
    let identity: Vec<usize> = (0..n).collect();
    let involved: Vec<usize> = e.sources.iter().copied().filter(|&s| s != 0).collect();
    let mut arrangement = vec![0];
    arrangement.extend(&involved);
    arrangement.extend((1..n).filter(|i| !involved.contains(i)));
    let mut gens: Vec<Generator> = swaps_between(&identity, &arrangement)
        .into_iter()
        .map(|p| Generator::Swap { i: p + 1, n })
        .collect();

    let to_of = |s: usize| e.passive.iter().find(|&&(a, _)| a == s).map(|&(_, b)| b).expect("passive circle");
    let marked_involved = e.sources.contains(&0);
    let mut after: Vec<usize>;
    let rest;
    match (e.kind, marked_involved) {
        (EdgeKind::Merge, true) => {
            gens.push(Generator::Lambda { n });
            after = vec![e.targets[0]];
            rest = 2;
        }
        (EdgeKind::Merge, false) => {
            gens.push(Generator::ILambda { n });
            after = vec![to_of(0), e.targets[0]];
            rest = 3;
        }
        (EdgeKind::Split, true) => {
            gens.push(Generator::V { n });
            let other = if e.targets[0] == 0 { e.targets[1] } else { e.targets[0] };
            after = vec![0, other];
            rest = 1;
        }
        (EdgeKind::Split, false) => {
            gens.push(Generator::IV { n });
            after = vec![to_of(0), e.targets[0], e.targets[1]];
            rest = 2;
        }
    }
    after.extend(arrangement[rest..].iter().map(|&s| to_of(s)));
    let m = e.to.circle_count();
    let target: Vec<usize> = (0..m).collect();
    gens.extend(swaps_between(&after, &target).into_iter().map(|p| Generator::Swap { i: p + 1, n: m }));
    Ok(GeneratorWord::new(n, gens)?)
}

/// Evaluates an edge's generator word with the link-Floer matrices.
pub fn edge_word_matrix(e: &EdgeCobordism) -> Result<GF2Matrix, ComplexError> {
    Ok(edge_as_generator_word(e, Flavor::Reduced)?.evaluate_with(&hfl_generator_matrix)?)
}
