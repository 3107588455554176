//! Pages of the spectral sequence of the filtration `F_p = ⊕_{i ≥ p} C_i`, computed per
//! quantum degree.
//!
//! Indexing: `d_r` raises weight by `r`, `E^1` is the chain groups and `E^2` is the homology
//! of `∂_1`. For an `n`-crossing diagram `E^{n+1} = E^∞`.
//!
//! With `Z^r_p = {x ∈ F_p : ∂x ∈ F_{p+r}}` one has
//! `E^r_p ≅ π_p Z^r_p / π_p ∂ Z^{r-1}_{p-r+1}`, where `π_p` projects onto `C_p`. Both spaces
//! only see the weights `p..p+r-1` of their elements, so the code tracks the truncations
//! `K_r(p)` of `Z^r_p` to that window:
//! `K_1(p) = C_p` and `K_{r+1}(p) = {x ∈ K_r(p) : (∂x)_{p+r} = 0} ⊕ C_{p+r}`.

use std::collections::BTreeMap;

use crate::complex::{BuildOptions, Complex, ComplexError, Flavor, QBlock};
use crate::diagram::{ArcId, PlanarDiagram};
use crate::gf2::{quotient_dim, relations, span_dim, GF2Matrix, GF2Vector};
use crate::par::{map_slice, ExecMode};

/// One page: dimensions and outgoing `d_r` ranks keyed by `(h, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageTable {
    pub r: usize,
    pub dims: BTreeMap<(i32, i32), usize>,
    pub dr_ranks: BTreeMap<(i32, i32), usize>,
}

impl PageTable {
    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    /// Nonzero dimensions only, for comparisons that ignore empty bidegrees.
    pub fn support(&self) -> BTreeMap<(i32, i32), usize> {
        self.dims.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k, v)).collect()
    }

    pub fn euler_by_q(&self) -> BTreeMap<i32, i64> {
        let mut out = BTreeMap::new();
        for (&(h, q), &d) in &self.dims {
            *out.entry(q).or_insert(0) += if h.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) };
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub flavor: Flavor,
    pub crossings: usize,
    /// `pages[i]` is `E^{i+1}`; the last entry is `E^∞`.
    pub pages: Vec<PageTable>,
    pub collapse_page: usize,
    pub total_homology: BTreeMap<i32, usize>,
    /// Rank bookkeeping held: both ends of every `d_r` agree, descent identities hold and
    /// every boundary space lies inside its cycle space.
    pub consistent: bool,
}

impl SpectralResult {
    /// `E^r`; pages past the last computed one equal `E^∞`.
    pub fn page(&self, r: usize) -> PageTable {
        assert!(r >= 1, "pages start at 1");
        let mut p = self.pages[(r - 1).min(self.pages.len() - 1)].clone();
        p.r = r;
        p
    }

    pub fn e_infinity(&self) -> &PageTable {
        self.pages.last().expect("at least one page")
    }

    /// Pages `r > 2` that differ from `E^2`, i.e. nonzero higher differentials.
    pub fn noncollapse(&self) -> bool {
        self.collapse_page > 2
    }
}

/// Per-q-block window computations.
struct BlockPages {
    q: i32,
    /// `dims[r - 1][p]` for `r = 1..=n+1`.
    dims: Vec<Vec<usize>>,
    /// `out[r - 1][p]`: rank of `d_r` leaving weight `p`.
    out: Vec<Vec<usize>>,
    consistent: bool,
    total: usize,
}

fn block_image(block: &QBlock, x: &GF2Vector) -> GF2Vector {
    let mut out = GF2Vector::zeros(block.len());
    for j in x.ones() {
        for &t in &block.columns[j] {
            out.toggle(t as usize);
        }
    }
    out
}

fn slice_to(v: &GF2Vector, range: &std::ops::Range<usize>) -> GF2Vector {
    v.slice(range.start, range.len())
}

fn block_pages(block: &QBlock, n: usize) -> BlockPages {
    let len = block.len();
    let ranges: Vec<std::ops::Range<usize>> = (0..=n + 1).map(|w| block.weight_range(w)).collect();
    let range = |w: usize| if w <= n { ranges[w].clone() } else { len..len };
    let last = n + 1;
    // proj[r][p]: basis of π_p K_r(p) on the weight-p slice; a_cols[r][p]: (∂x)_{p+r} for x in K_r(p).
    let mut proj: Vec<Vec<Vec<GF2Vector>>> = vec![vec![Vec::new(); n + 1]; last + 2];
    let mut a_cols: Vec<Vec<Vec<GF2Vector>>> = vec![vec![Vec::new(); n + 1]; last + 2];
    let mut rank_pi = vec![vec![0usize; n + 1]; last + 2];
    let mut rank_a = vec![vec![0usize; n + 1]; last + 2];
    let mut consistent = true;

    for p in 0..=n {
        let mut k: Vec<GF2Vector> = range(p).map(|i| GF2Vector::unit(len, i)).collect();
        for r in 1..=last + 1 {
            let rp = range(p);
            proj[r][p] = k.iter().map(|x| slice_to(x, &rp)).collect();
            rank_pi[r][p] = span_dim(rp.len(), &proj[r][p]);
            let target = range(p + r);
            let images: Vec<GF2Vector> = k.iter().map(|x| slice_to(&block_image(block, x), &target)).collect();
            rank_a[r][p] = span_dim(target.len(), &images);
            let kernel = relations(target.len(), &images);
            let mut next: Vec<GF2Vector> = kernel
                .iter()
                .map(|combo| {
                    let mut v = GF2Vector::zeros(len);
                    for i in combo.ones() {
                        v.add_assign(&k[i]);
                    }
                    v
                })
                .collect();
            a_cols[r][p] = images;
            next.extend(target.clone().map(|i| GF2Vector::unit(len, i)));
            k = next;
        }
    }

    let mut dims = vec![vec![0usize; n + 1]; last];
    for r in 1..=last {
        for p in 0..=n {
            // F_{p'} is the whole complex for p' < 0, so the boundary window starts at weight 0 at the latest.
            let start = p.saturating_sub(r - 1);
            let boundary: Vec<GF2Vector> = if r >= 2 && p > 0 { a_cols[p - start][start].clone() } else { Vec::new() };
            dims[r - 1][p] = match quotient_dim(&proj[r][p], &boundary) {
                Ok(d) => d,
                Err(_) => {
                    consistent = false;
                    0
                }
            };
        }
    }

    let mut out = vec![vec![0usize; n + 1]; last];
    for r in 1..=last {
        for p in 0..=n {
            let leaving = rank_pi[r][p] - rank_pi[r + 1][p];
            out[r - 1][p] = leaving;
            let arriving_at_target = if p + r <= n {
                let prev = if r >= 2 { rank_a[r - 1][p + 1] } else { 0 };
                rank_a[r][p].checked_sub(prev)
            } else {
                Some(0)
            };
            if arriving_at_target != Some(leaving) {
                consistent = false;
            }
        }
    }
    for r in 1..last {
        for p in 0..=n {
            let arriving = if p >= r { out[r - 1][p - r] } else { 0 };
            if dims[r][p] + out[r - 1][p] + arriving != dims[r - 1][p] {
                consistent = false;
            }
        }
    }

    let cols: Vec<GF2Vector> = (0..len)
        .map(|j| GF2Vector::from_support(len, block.columns[j].iter().map(|&t| t as usize)))
        .collect();
    let total = len - 2 * span_dim(len, &cols);
    BlockPages { q: block.q, dims, out, consistent, total }
}

/// All pages of a built complex.
pub fn analyze(c: &Complex, mode: ExecMode) -> SpectralResult {
    let n = c.crossing_count();
    let blocks = c.q_blocks();
    let per_q = map_slice(mode.effective(), &blocks, |b| block_pages(b, n));
    let shift = c.n_minus() as i32;
    let pages: Vec<PageTable> = (1..=n + 1)
        .map(|r| {
            let mut dims = BTreeMap::new();
            let mut dr_ranks = BTreeMap::new();
            for bp in &per_q {
                for p in 0..=n {
                    let key = (p as i32 - shift, bp.q);
                    dims.insert(key, bp.dims[r - 1][p]);
                    dr_ranks.insert(key, bp.out[r - 1][p]);
                }
            }
            PageTable { r, dims, dr_ranks }
        })
        .collect();
    let last = pages.last().expect("n + 1 >= 1 pages");
    let collapse_page = (2..=n + 1).find(|&r| pages[r - 1].dims == last.dims).unwrap_or(2);
    let total_homology = per_q.iter().map(|b| (b.q, b.total)).collect();
    let consistent = per_q.iter().all(|b| b.consistent);
    SpectralResult { flavor: c.flavor(), crossings: n, pages, collapse_page, total_homology, consistent }
}

pub fn compute(d: &PlanarDiagram, flavor: Flavor, opts: BuildOptions) -> Result<SpectralResult, ComplexError> {
    let c = Complex::build_with(d, flavor, opts)?;
    Ok(analyze(&c, opts.mode))
}

/// `E^r` of a complex.
pub fn page(c: &Complex, r: usize) -> PageTable {
    analyze(c, ExecMode::Parallel).page(r)
}

pub fn collapse_page(c: &Complex) -> usize {
    analyze(c, ExecMode::Parallel).collapse_page
}

/// Homology of the full differential per quantum degree.
pub fn total_homology(c: &Complex) -> BTreeMap<i32, usize> {
    analyze(c, ExecMode::Parallel).total_homology
}

/// Homology of `∂_1` alone, per `(h, q)`, from ranks of the weight-to-weight blocks.
pub fn khovanov_oracle(c: &Complex) -> PageTable {
    let n = c.crossing_count();
    let mut dims = BTreeMap::new();
    for block in c.q_blocks() {
        let mut rank_out = vec![0usize; n + 2];
        for p in 0..=n {
            let (src, dst) = (block.weight_range(p), block.weight_range(p + 1));
            let rows: Vec<Vec<u8>> = dst
                .clone()
                .map(|t| src.clone().map(|s| block.columns[s].contains(&(t as u32)) as u8).collect())
                .collect();
            let refs: Vec<&[u8]> = rows.iter().map(|r| r.as_slice()).collect();
            rank_out[p] = if refs.is_empty() || src.is_empty() { 0 } else { GF2Matrix::from_dense(&refs).rank() };
        }
        for p in 0..=n {
            let incoming = if p > 0 { rank_out[p - 1] } else { 0 };
            let dim = block.weight_range(p).len() - rank_out[p] - incoming;
            dims.insert((p as i32 - c.n_minus() as i32, block.q), dim);
        }
    }
    PageTable { r: 2, dims, dr_ranks: BTreeMap::new() }
}

/// First difference between two page tables, as `(r, (h, q), left, right)`.
pub type PageDifference = (usize, (i32, i32), usize, usize);

/// Equal iff every page from `E^2` on has the same nonzero dimensions.
pub fn compare_pages(a: &SpectralResult, b: &SpectralResult) -> Result<(), PageDifference> {
    let last = a.pages.len().max(b.pages.len()).max(2);
    for r in 2..=last {
        let (pa, pb) = (a.page(r).support(), b.page(r).support());
        if pa != pb {
            let keys: std::collections::BTreeSet<(i32, i32)> = pa.keys().chain(pb.keys()).copied().collect();
            for k in keys {
                let (x, y) = (pa.get(&k).copied().unwrap_or(0), pb.get(&k).copied().unwrap_or(0));
                if x != y {
                    return Err((r, k, x, y));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub arcs: Vec<ArcId>,
    /// First basepoint whose pages differ from the first arc's, with the difference.
    pub mismatch: Option<(ArcId, PageDifference)>,
}

impl SweepReport {
    pub fn equal(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Reduced pages for every basepoint on the marked component.
pub fn basepoint_sweep(d: &PlanarDiagram, opts: BuildOptions) -> Result<SweepReport, ComplexError> {
    let comp = d.component_of(d.basepoint()).expect("basepoint is valid");
    let arcs = d.component_arcs(comp);
    let mut reference: Option<SpectralResult> = None;
    for &arc in &arcs {
        let moved = d.with_basepoint(arc).expect("arc on the diagram");
        let res = compute(&moved, Flavor::Reduced, opts)?;
        match &reference {
            None => reference = Some(res),
            Some(first) => {
                if let Err(diff) = compare_pages(first, &res) {
                    return Ok(SweepReport { arcs, mismatch: Some((arc, diff)) });
                }
            }
        }
    }
    Ok(SweepReport { arcs, mismatch: None })
}

/// Whether `(∂_1 + … + ∂_i)² = 0`, for `i = 1..=n`.
pub fn truncation_squares(c: &Complex) -> Vec<bool> {
    (1..=c.crossing_count()).map(|i| c.truncation_squares_to_zero(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;

    const TREFOIL: &str = "PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]";
    const FIGURE_EIGHT: &str = "PD[X(4,2,5,1),X(8,6,1,5),X(6,3,7,4),X(2,7,3,8)]";

    fn run(pd: &str, flavor: Flavor) -> (Complex, SpectralResult) {
        let c = Complex::build(&parse_pd(pd).unwrap(), flavor).unwrap();
        let s = analyze(&c, ExecMode::Parallel);
        (c, s)
    }

    #[test]
    fn unknot() {
        let (c, s) = run("U", Flavor::Reduced);
        assert_eq!(khovanov_oracle(&c).support(), BTreeMap::from([((0, 0), 1)]));
        assert_eq!(s.collapse_page, 2);
        assert_eq!(s.total_homology, BTreeMap::from([(0, 1)]));
        assert!(s.consistent);
    }

    #[test]
    fn trefoil_and_figure_eight() {
        for (pd, total) in [(TREFOIL, 3), (FIGURE_EIGHT, 5)] {
            let (c, s) = run(pd, Flavor::Reduced);
            assert!(s.consistent);
            assert_eq!(s.page(2).total(), total);
            assert_eq!(s.page(2).dims, khovanov_oracle(&c).dims);
            assert_eq!(s.collapse_page, 2);
            assert_eq!(s.total_homology.values().sum::<usize>(), s.e_infinity().total());
        }
    }

    #[test]
    fn left_trefoil_bigrading() {
        let (_, s) = run(TREFOIL, Flavor::Reduced);
        // Mirror of the right-handed reduced table {(0,2),(2,6),(3,8)}.
        assert_eq!(s.page(2).support(), BTreeMap::from([((-3, -8), 1), ((-2, -6), 1), ((0, -2), 1)]));
        let (_, u) = run(TREFOIL, Flavor::Unreduced);
        assert_eq!(u.page(2).total(), 6);
    }

    #[test]
    fn first_page_is_chain_groups() {
        let (c, s) = run(FIGURE_EIGHT, Flavor::Unreduced);
        let e1 = s.page(1);
        let mut chain: BTreeMap<(i32, i32), usize> = BTreeMap::new();
        for g in c.generators() {
            *chain.entry((g.h, g.q)).or_default() += 1;
        }
        assert_eq!(e1.support(), chain);
        assert_eq!(s.page(9).dims, s.e_infinity().dims);
        let chi: Vec<_> = s.pages.iter().map(|p| p.euler_by_q()).collect();
        assert!(chi.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn comparisons() {
        let (_, a) = run(TREFOIL, Flavor::Reduced);
        let (_, b) = run(FIGURE_EIGHT, Flavor::Reduced);
        assert!(compare_pages(&a, &a).is_ok());
        assert!(compare_pages(&a, &b).is_err());
        let kinked = parse_pd(TREFOIL).unwrap().reidemeister1(ArcId(1), crate::Sign::Positive).unwrap();
        let k = compute(&kinked, Flavor::Reduced, BuildOptions::default()).unwrap();
        assert!(compare_pages(&a, &k).is_ok());
    }

    #[test]
    fn sweeps() {
        let opts = BuildOptions::default();
        let t = basepoint_sweep(&parse_pd(TREFOIL).unwrap(), opts).unwrap();
        assert_eq!(t.arcs.len(), 6);
        assert!(t.equal());
        assert!(basepoint_sweep(&parse_pd("U").unwrap(), opts).unwrap().equal());
        let hopf = basepoint_sweep(&parse_pd("PD[X(4,1,3,2),X(2,3,1,4)]").unwrap(), opts).unwrap();
        assert_eq!(hopf.arcs.len(), 2);
        assert!(hopf.equal());
    }

    #[test]
    fn truncations_record() {
        let (c, _) = run(TREFOIL, Flavor::Reduced);
        let flags = truncation_squares(&c);
        assert_eq!(flags.len(), 3);
        assert!(flags[0]);
        assert_eq!(flags[2], c.verify_d_squared());
    }
}
