#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use kh_core::complex::{Complex, QBlock};
use kh_core::{parse_pd, PlanarDiagram};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn corpus() -> Vec<(String, PlanarDiagram)> {
    kh_core::diagram::load_corpus(data_path("knots_le9.csv")).expect("corpus loads")
}

/// The corpus plus the crossingless unknot.
pub fn corpus_with_unknot() -> Vec<(String, PlanarDiagram)> {
    let mut c = vec![("0_1".to_string(), PlanarDiagram::unknot())];
    c.extend(corpus());
    c
}

pub struct KhrEntry {
    pub alternating: bool,
    pub table: BTreeMap<(i32, i32), usize>,
}

/// Published reduced mod-2 Khovanov homology, keyed by knot name.
pub fn khr_table() -> BTreeMap<String, KhrEntry> {
    let text = std::fs::read_to_string(data_path("knots_le9_khr_mod2.csv")).unwrap();
    let mut out = BTreeMap::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let mut parts = line.split(',');
        let name = parts.next().unwrap().to_string();
        let alternating = parts.next().unwrap() == "alternating";
        let table = parts
            .next()
            .unwrap()
            .split(';')
            .map(|t| {
                let v: Vec<i32> = t.split(':').map(|x| x.parse().unwrap()).collect();
                ((v[0], v[1]), v[2] as usize)
            })
            .collect();
        out.insert(name, KhrEntry { alternating, table });
    }
    out
}

pub fn mirror_table(t: &BTreeMap<(i32, i32), usize>) -> BTreeMap<(i32, i32), usize> {
    t.iter().map(|(&(h, q), &d)| ((-h, -q), d)).collect()
}

/// Closure of a braid word on `strands` strands; `k > 0` is `σ_k`, `k < 0` its inverse.
pub fn braid_closure(strands: usize, word: &[i32]) -> PlanarDiagram {
    let mut cur: Vec<u32> = (1..=strands as u32).collect();
    let mut next = strands as u32 + 1;
    let mut crossings = Vec::new();
    for &g in word {
        let i = g.unsigned_abs() as usize - 1;
        let (bl, br) = (cur[i], cur[i + 1]);
        let (tl, tr) = (next, next + 1);
        next += 2;
        crossings.push(if g > 0 { [br, tr, tl, bl] } else { [bl, br, tr, tl] });
        cur[i] = tl;
        cur[i + 1] = tr;
    }
    let close: HashMap<u32, u32> = cur.iter().enumerate().map(|(i, &top)| (top, i as u32 + 1)).collect();
    let crossings = crossings.into_iter().map(|x: [u32; 4]| x.map(|a| *close.get(&a).unwrap_or(&a))).collect();
    PlanarDiagram::from_raw(crossings, 0, None).expect("braid closure is a valid diagram")
}

pub fn pd(s: &str) -> PlanarDiagram {
    parse_pd(s).unwrap()
}

pub const LEFT_TREFOIL: &str = "PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]";
pub const RIGHT_TREFOIL: &str = "PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)]";
pub const FIGURE_EIGHT: &str = "PD[X(4,2,5,1),X(8,6,1,5),X(6,3,7,4),X(2,7,3,8)]";
pub const HOPF: &str = "PD[X(4,1,3,2),X(2,3,1,4)]";

/// Rank of a dense 0/1 matrix by Gaussian elimination on byte rows.
pub fn dense_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                for k in 0..cols {
                    rows[r][k] ^= rows[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Direct construction of `(C, ∂_1)` from the PD code with the Frobenius rules, dense
/// elimination for the homology. Nothing from the library's cube or complex is used.
pub fn naive_e2_total(d: &PlanarDiagram, reduced: bool) -> usize {
    let xs = d.crossings();
    let n = xs.len();
    let labels = d.arc_count() + d.unknotted_extras();
    let circles_of = |u: usize| -> Vec<Vec<u32>> {
        let mut owner: Vec<usize> = (0..=labels).collect();
        fn root(o: &mut [usize], mut x: usize) -> usize {
            while o[x] != x {
                x = o[x];
            }
            x
        }
        for (c, x) in xs.iter().enumerate() {
            let pairs = if u >> c & 1 == 1 { [(x[0], x[3]), (x[1], x[2])] } else { [(x[0], x[1]), (x[2], x[3])] };
            for (a, b) in pairs {
                let (ra, rb) = (root(&mut owner, a as usize), root(&mut owner, b as usize));
                owner[ra] = rb;
            }
        }
        let mut groups: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for a in 1..=labels {
            groups.entry(root(&mut owner, a)).or_default().push(a as u32);
        }
        groups.into_values().collect()
    };
    let bp = d.basepoint().0;
    // A state: vertex and the set of circles (as arc lists) carrying v-.
    #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
    struct State {
        u: usize,
        minus: Vec<Vec<u32>>,
    }
    let mut states = Vec::new();
    for u in 0..1usize << n {
        let cs = circles_of(u);
        for mask in 0..1u32 << cs.len() {
            let mut minus: Vec<Vec<u32>> = cs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| c.clone()).collect();
            minus.sort();
            if reduced && minus.iter().any(|c| c.contains(&bp)) {
                continue;
            }
            states.push(State { u, minus });
        }
    }
    let index: HashMap<State, usize> = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut matrix = vec![vec![0u8; states.len()]; states.len()];
    for (j, s) in states.iter().enumerate() {
        let from = circles_of(s.u);
        for c in 0..n {
            if s.u >> c & 1 == 1 {
                continue;
            }
            let v = s.u | 1 << c;
            let to = circles_of(v);
            let is_minus = |circle: &Vec<u32>| s.minus.contains(circle);
            let touched_from: Vec<&Vec<u32>> = from.iter().filter(|f| !to.contains(f)).collect();
            let touched_to: Vec<&Vec<u32>> = to.iter().filter(|t| !from.contains(t)).collect();
            let kept: Vec<Vec<u32>> = s.minus.iter().filter(|m| to.contains(m)).cloned().collect();
            let mut images: Vec<Vec<Vec<u32>>> = Vec::new();
            if touched_from.len() == 2 {
                let minus_count = touched_from.iter().filter(|c| is_minus(c)).count();
                match minus_count {
                    0 => images.push(kept.clone()),
                    1 => {
                        let mut m = kept.clone();
                        m.push(touched_to[0].clone());
                        images.push(m);
                    }
                    _ => {}
                }
            } else {
                let (a, b) = (touched_to[0].clone(), touched_to[1].clone());
                if is_minus(touched_from[0]) {
                    let mut m = kept.clone();
                    m.push(a);
                    m.push(b);
                    images.push(m);
                } else {
                    let mut m1 = kept.clone();
                    m1.push(a);
                    images.push(m1);
                    let mut m2 = kept.clone();
                    m2.push(b);
                    images.push(m2);
                }
            }
            for mut m in images {
                if reduced && m.iter().any(|c| c.contains(&bp)) {
                    continue;
                }
                m.sort();
                let i = index[&State { u: v, minus: m }];
                matrix[i][j] ^= 1;
            }
        }
    }
    states.len() - 2 * dense_rank(matrix)
}

/// Page dimensions per `(weight, q)` from a persistence pairing of the filtered block:
/// a pair of length `l` is visible on `E^r` for `r <= l`; unpaired generators survive.
pub fn persistence_pages(c: &Complex, pages: usize) -> Vec<BTreeMap<(i32, i32), usize>> {
    let mut out = vec![BTreeMap::new(); pages];
    for block in c.q_blocks() {
        let lengths = persistence_lengths(&block);
        for (i, len) in lengths.iter().enumerate() {
            let key = (block.weights[i] as i32 - c.n_minus() as i32, block.q);
            for (r, page) in out.iter_mut().enumerate() {
                let visible = len.is_none_or(|l| r < l);
                *page.entry(key).or_insert(0) += visible as usize;
            }
        }
    }
    out
}

/// Pair length for each generator of the block, `None` when unpaired.
fn persistence_lengths(block: &QBlock) -> Vec<Option<usize>> {
    let n = block.len();
    // Order by decreasing weight so every F_p is a prefix and ∂ points to earlier columns.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(block.weights[i]), i));
    let mut pos = vec![0usize; n];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    let mut columns: Vec<Vec<usize>> = order
        .iter()
        .map(|&i| {
            let mut c: Vec<usize> = block.columns[i].iter().map(|&t| pos[t as usize]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    let mut length = vec![None; n];
    for j in 0..n {
        while let Some(&low) = columns[j].last() {
            match low_owner.get(&low) {
                Some(&k) => {
                    let other = columns[k].clone();
                    let mut merged = Vec::new();
                    let (mut a, mut b) = (0, 0);
                    let cur = &columns[j];
                    while a < cur.len() || b < other.len() {
                        match (cur.get(a), other.get(b)) {
                            (Some(x), Some(y)) if x == y => {
                                a += 1;
                                b += 1;
                            }
                            (Some(x), Some(y)) if x < y => {
                                merged.push(*x);
                                a += 1;
                            }
                            (Some(_), Some(y)) => {
                                merged.push(*y);
                                b += 1;
                            }
                            (Some(x), None) => {
                                merged.push(*x);
                                a += 1;
                            }
                            (None, Some(y)) => {
                                merged.push(*y);
                                b += 1;
                            }
                            (None, None) => unreachable!(),
                        }
                    }
                    columns[j] = merged;
                }
                None => {
                    low_owner.insert(low, j);
                    let (src, dst) = (order[j], order[low]);
                    let l = block.weights[dst] - block.weights[src];
                    length[src] = Some(l);
                    length[dst] = Some(l);
                    break;
                }
            }
        }
    }
    length
}
