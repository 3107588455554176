//! The Khovanov Frobenius algebra `F2[X]/(X^2)`, its marked-circle quotient, the explicit
//! link-Floer generator matrices, and grading shifts of elementary cobordisms.
//!
//! Monomials are bitmasks. Unreduced: bit `i` set means circle `i` carries `v-`.
//! Reduced: bit `j` set means unmarked factor `j + 1` carries `B` (`T` otherwise).
//! Basis vector `k` of a reduced space is the monomial with mask `k`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cube::{EdgeCobordism, EdgeKind};
use crate::gf2::{GF2Matrix, GF2Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TqftError {
    #[error("invalid generator {0}")]
    InvalidGenerator(String),
    #[error("word not composable at position {position}: expects {expected} components, has {found}")]
    NotComposable { position: usize, expected: usize, found: usize },
    #[error("element lives on {found} circles, edge expects {expected}")]
    CircleMismatch { expected: usize, found: usize },
    #[error("unknown elementary cobordism kind {0:?}")]
    UnknownKind(String),
    #[error("matrix error: {0}")]
    Matrix(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    Plus,
    Minus,
}

impl Letter {
    fn bit(self) -> u64 {
        (self == Letter::Minus) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusElement {
    circles: usize,
    terms: BTreeSet<u64>,
}

impl FrobeniusElement {
    pub fn zero(circles: usize) -> Self {
        Self { circles, terms: BTreeSet::new() }
    }

    pub fn monomial(circles: usize, mono: u64) -> Self {
        Self { circles, terms: BTreeSet::from([mono]) }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mono = letters.iter().enumerate().map(|(i, l)| l.bit() << i).sum();
        Self::monomial(letters.len(), mono)
    }

    pub fn circles(&self) -> usize {
        self.circles
    }

    pub fn terms(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn toggle(&mut self, mono: u64) {
        if !self.terms.remove(&mono) {
            self.terms.insert(mono);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for m in other.terms() {
            out.toggle(m);
        }
        out
    }

    /// `#v+ - #v-` of a monomial.
    pub fn degree(circles: usize, mono: u64) -> i32 {
        circles as i32 - 2 * mono.count_ones() as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedElement {
    unmarked: usize,
    terms: BTreeSet<u64>,
}

impl ReducedElement {
    pub fn zero(unmarked: usize) -> Self {
        Self { unmarked, terms: BTreeSet::new() }
    }

    pub fn monomial(unmarked: usize, mono: u64) -> Self {
        Self { unmarked, terms: BTreeSet::from([mono]) }
    }

    pub fn unmarked(&self) -> usize {
        self.unmarked
    }

    pub fn terms(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn toggle(&mut self, mono: u64) {
        if !self.terms.remove(&mono) {
            self.terms.insert(mono);
        }
    }
}

impl fmt::Display for ReducedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let words: Vec<String> = self
            .terms()
            .map(|m| {
                if self.unmarked == 0 {
                    "1".to_string()
                } else {
                    (0..self.unmarked).map(|j| if m >> j & 1 == 1 { 'B' } else { 'T' }).collect()
                }
            })
            .collect();
        write!(f, "{}", words.join("+"))
    }
}

pub fn multiply(x: Letter, y: Letter) -> FrobeniusElement {
    match (x, y) {
        (Letter::Minus, Letter::Minus) => FrobeniusElement::zero(1),
        (Letter::Plus, Letter::Plus) => FrobeniusElement::from_letters(&[Letter::Plus]),
        _ => FrobeniusElement::from_letters(&[Letter::Minus]),
    }
}

pub fn comultiply(x: Letter) -> FrobeniusElement {
    match x {
        Letter::Plus => FrobeniusElement::from_letters(&[Letter::Plus, Letter::Minus])
            .add(&FrobeniusElement::from_letters(&[Letter::Minus, Letter::Plus])),
        Letter::Minus => FrobeniusElement::from_letters(&[Letter::Minus, Letter::Minus]),
    }
}

pub fn counit(x: Letter) -> bool {
    x == Letter::Minus
}

fn bit(m: u64, i: usize) -> u64 {
    m >> i & 1
}

fn remove_bit(m: u64, i: usize) -> u64 {
    let low = m & ((1u64 << i) - 1);
    let high = (m >> (i + 1)) << i;
    low | high
}

fn insert_bit(m: u64, i: usize, b: u64) -> u64 {
    let low = m & ((1u64 << i) - 1);
    let high = (m >> i) << (i + 1);
    low | (b << i) | high
}

/// An edge saddle compiled for repeated evaluation on monomials.
#[derive(Debug, Clone)]
pub struct SaddleMap {
    kind: EdgeKind,
    sources: [usize; 2],
    targets: [usize; 2],
    passive: Vec<(usize, usize)>,
    from_circles: usize,
    to_circles: usize,
}

impl SaddleMap {
    pub fn new(e: &EdgeCobordism) -> Self {
        let pair = |v: &[usize]| [v[0], *v.get(1).unwrap_or(&v[0])];
        Self {
            kind: e.kind,
            sources: pair(&e.sources),
            targets: pair(&e.targets),
            passive: e.passive.clone(),
            from_circles: e.from.circle_count(),
            to_circles: e.to.circle_count(),
        }
    }

    pub fn from_circles(&self) -> usize {
        self.from_circles
    }

    pub fn to_circles(&self) -> usize {
        self.to_circles
    }

    /// Images of an unreduced monomial; at most two terms.
    pub fn image(&self, mono: u64, out: &mut Vec<u64>) {
        let mut rest = 0u64;
        for &(i, j) in &self.passive {
            rest |= bit(mono, i) << j;
        }
        match self.kind {
            EdgeKind::Merge => {
                let (a, b) = (bit(mono, self.sources[0]), bit(mono, self.sources[1]));
                if a & b == 0 {
                    out.push(rest | (a | b) << self.targets[0]);
                }
            }
            EdgeKind::Split => {
                let (t1, t2) = (self.targets[0], self.targets[1]);
                if bit(mono, self.sources[0]) == 1 {
                    out.push(rest | 1 << t1 | 1 << t2);
                } else {
                    out.push(rest | 1 << t2);
                    out.push(rest | 1 << t1);
                }
            }
        }
    }

    /// Images of a reduced monomial: evaluate with `v+` on the marked circle, then drop
    /// terms carrying `v-` there.
    pub fn image_reduced(&self, mono: u64, out: &mut Vec<u64>) {
        let start = out.len();
        self.image(mono << 1, out);
        let mut k = start;
        for i in start..out.len() {
            if out[i] & 1 == 0 {
                out[k] = out[i] >> 1;
                k += 1;
            }
        }
        out.truncate(k);
    }
}

pub fn apply_edge_unreduced(e: &EdgeCobordism, x: &FrobeniusElement) -> Result<FrobeniusElement, TqftError> {
    let map = SaddleMap::new(e);
    if x.circles != map.from_circles {
        return Err(TqftError::CircleMismatch { expected: map.from_circles, found: x.circles });
    }
    let mut out = FrobeniusElement::zero(map.to_circles);
    let mut buf = Vec::new();
    for m in x.terms() {
        buf.clear();
        map.image(m, &mut buf);
        for &t in &buf {
            out.toggle(t);
        }
    }
    Ok(out)
}

pub fn apply_edge_reduced(e: &EdgeCobordism, x: &ReducedElement) -> Result<ReducedElement, TqftError> {
    let map = SaddleMap::new(e);
    if x.unmarked + 1 != map.from_circles {
        return Err(TqftError::CircleMismatch { expected: map.from_circles, found: x.unmarked + 1 });
    }
    let mut out = ReducedElement::zero(map.to_circles - 1);
    let mut buf = Vec::new();
    for m in x.terms() {
        buf.clear();
        map.image_reduced(m, &mut buf);
        for &t in &buf {
            out.toggle(t);
        }
    }
    Ok(out)
}

/// Elementary embedded cobordisms between marked unlinks `U_n` (component 1 marked).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    /// Split of the marked component.
    V { n: usize },
    /// Merge of the marked component with component 2.
    Lambda { n: usize },
    /// Swap of components `i` and `i + 1`.
    Swap { i: usize, n: usize },
    /// Split of component 2.
    IV { n: usize },
    /// Merge of components 2 and 3.
    ILambda { n: usize },
    /// New unmarked component at the end.
    Birth { n: usize },
    /// Capping off the last component.
    Death { n: usize },
}

impl Generator {
    /// Components of the source unlink.
    pub fn source(&self) -> usize {
        match *self {
            Generator::V { n }
            | Generator::Lambda { n }
            | Generator::Swap { n, .. }
            | Generator::IV { n }
            | Generator::ILambda { n }
            | Generator::Birth { n }
            | Generator::Death { n } => n,
        }
    }

    pub fn target(&self) -> usize {
        let n = self.source();
        match self {
            Generator::V { .. } | Generator::IV { .. } | Generator::Birth { .. } => n + 1,
            Generator::Lambda { .. } | Generator::ILambda { .. } | Generator::Death { .. } => n - 1,
            Generator::Swap { .. } => n,
        }
    }

    pub fn validate(&self) -> Result<(), TqftError> {
        let ok = match *self {
            Generator::V { n } | Generator::Birth { n } => n >= 1,
            Generator::Lambda { n } | Generator::IV { n } | Generator::Death { n } => n >= 2,
            Generator::ILambda { n } => n >= 3,
            Generator::Swap { i, n } => i >= 2 && i < n,
        };
        if ok && self.source() < 63 {
            Ok(())
        } else {
            Err(TqftError::InvalidGenerator(self.to_string()))
        }
    }

    pub fn is_saddle(&self) -> bool {
        matches!(self, Generator::V { .. } | Generator::Lambda { .. } | Generator::IV { .. } | Generator::ILambda { .. })
    }

    /// Every valid generator with source size at most `max_n`.
    pub fn all_up_to(max_n: usize) -> Vec<Generator> {
        let mut out = Vec::new();
        for n in 1..=max_n {
            out.push(Generator::V { n });
            out.push(Generator::Lambda { n });
            out.push(Generator::IV { n });
            out.push(Generator::ILambda { n });
            out.push(Generator::Birth { n });
            out.push(Generator::Death { n });
            for i in 2..n {
                out.push(Generator::Swap { i, n });
            }
        }
        out.retain(|g| g.validate().is_ok());
        out
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::V { n } => write!(f, "V_{n}"),
            Generator::Lambda { n } => write!(f, "Lambda_{n}"),
            Generator::Swap { i, n } => write!(f, "X_{i},{n}"),
            Generator::IV { n } => write!(f, "IV_{n}"),
            Generator::ILambda { n } => write!(f, "ILambda_{n}"),
            Generator::Birth { n } => write!(f, "Birth_{n}"),
            Generator::Death { n } => write!(f, "Death_{n}"),
        }
    }
}

fn reduced_dim(n: usize) -> usize {
    1usize << (n - 1)
}

fn matrix_from_images(rows: usize, cols: usize, image: impl Fn(u64) -> Vec<u64>) -> GF2Matrix {
    let columns: Vec<GF2Vector> = (0..cols as u64)
        .map(|x| {
            let mut v = GF2Vector::zeros(rows);
            for y in image(x) {
                v.toggle(y as usize);
            }
            v
        })
        .collect();
    GF2Matrix::from_columns(rows, &columns).expect("column lengths match")
}

/// The link-Floer generator matrices, written directly in the T/B basis.
pub fn hfl_generator_matrix(g: &Generator) -> Result<GF2Matrix, TqftError> {
    g.validate()?;
    let (n, m) = (g.source(), g.target());
    let image = |x: u64| -> Vec<u64> {
        match *g {
            Generator::V { .. } => vec![x << 1 | 1],
            Generator::Lambda { .. } => {
                if x & 1 == 1 {
                    vec![]
                } else {
                    vec![x >> 1]
                }
            }
            Generator::Swap { i, .. } => {
                let (a, b) = (i - 2, i - 1);
                let swapped = x & !(1 << a | 1 << b) | bit(x, a) << b | bit(x, b) << a;
                vec![swapped]
            }
            Generator::IV { .. } => {
                let rest = (x >> 1) << 2;
                if x & 1 == 0 {
                    vec![rest | 0b10, rest | 0b01]
                } else {
                    vec![rest | 0b11]
                }
            }
            Generator::ILambda { .. } => {
                let rest = (x >> 2) << 1;
                match x & 0b11 {
                    0b00 => vec![rest],
                    0b11 => vec![],
                    _ => vec![rest | 1],
                }
            }
            Generator::Birth { .. } => vec![x],
            Generator::Death { n } => {
                let last = n - 2;
                if bit(x, last) == 1 {
                    vec![x & !(1 << last)]
                } else {
                    vec![]
                }
            }
        }
    };
    Ok(matrix_from_images(reduced_dim(m), reduced_dim(n), image))
}

/// Unreduced images of a generator's underlying cobordism, computed from `m`, `Δ`, unit and counit.
fn frobenius_image(g: &Generator, mono: u64) -> Vec<u64> {
    let letter = |m: u64, i: usize| if bit(m, i) == 1 { Letter::Minus } else { Letter::Plus };
    let merge_at = |m: u64, i: usize| -> Vec<u64> {
        let rest = remove_bit(remove_bit(m, i + 1), i);
        multiply(letter(m, i), letter(m, i + 1)).terms().map(|t| insert_bit(rest, i, t)).collect()
    };
    let split_at = |m: u64, i: usize| -> Vec<u64> {
        let rest = remove_bit(m, i);
        comultiply(letter(m, i)).terms().map(|t| insert_bit(insert_bit(rest, i, t & 1), i + 1, t >> 1)).collect()
    };
    match *g {
        Generator::V { .. } => split_at(mono, 0),
        Generator::Lambda { .. } => merge_at(mono, 0),
        Generator::IV { .. } => split_at(mono, 1),
        Generator::ILambda { .. } => merge_at(mono, 1),
        Generator::Swap { i, .. } => {
            let (a, b) = (i - 1, i);
            vec![mono & !(1 << a | 1 << b) | bit(mono, a) << b | bit(mono, b) << a]
        }
        Generator::Birth { n } => vec![insert_bit(mono, n, Letter::Plus.bit())],
        Generator::Death { n } => {
            if counit(letter(mono, n - 1)) {
                vec![remove_bit(mono, n - 1)]
            } else {
                vec![]
            }
        }
    }
}

/// The reduced Khovanov map of a generator, obtained from the Frobenius algebra by the
/// marked-circle quotient.
pub fn reduced_generator_matrix(g: &Generator) -> Result<GF2Matrix, TqftError> {
    g.validate()?;
    let image = |x: u64| -> Vec<u64> {
        frobenius_image(g, x << 1).into_iter().filter(|t| t & 1 == 0).map(|t| t >> 1).collect()
    };
    Ok(matrix_from_images(reduced_dim(g.target()), reduced_dim(g.source()), image))
}

/// Unreduced matrix of a generator's underlying cobordism, on `V^{⊗n}`.
pub fn unreduced_generator_matrix(g: &Generator) -> Result<GF2Matrix, TqftError> {
    g.validate()?;
    let (n, m) = (g.source(), g.target());
    Ok(matrix_from_images(1 << m, 1 << n, |x| frobenius_image(g, x)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorWord {
    pub source: usize,
    /// Applied left to right.
    pub generators: Vec<Generator>,
}

impl GeneratorWord {
    pub fn new(source: usize, generators: Vec<Generator>) -> Result<Self, TqftError> {
        let w = Self { source, generators };
        w.target()?;
        Ok(w)
    }

    pub fn identity(source: usize) -> Self {
        Self { source, generators: Vec::new() }
    }

    pub fn target(&self) -> Result<usize, TqftError> {
        if self.source == 0 {
            return Err(TqftError::InvalidGenerator("unlink sizes start at 1".into()));
        }
        let mut size = self.source;
        for (position, g) in self.generators.iter().enumerate() {
            if g.source() != size {
                return Err(TqftError::NotComposable { position, expected: g.source(), found: size });
            }
            g.validate()?;
            size = g.target();
        }
        Ok(size)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Contiguous subword `generators[start..end]`.
    pub fn subword(&self, start: usize, end: usize) -> GeneratorWord {
        let source = if start == 0 { self.source } else { self.generators[start - 1].target() };
        GeneratorWord { source, generators: self.generators[start..end].to_vec() }
    }

    /// Composite matrix using `matrix_of` for each generator.
    pub fn evaluate_with(&self, matrix_of: &dyn Fn(&Generator) -> Result<GF2Matrix, TqftError>) -> Result<GF2Matrix, TqftError> {
        self.target()?;
        let mut acc = GF2Matrix::identity(reduced_dim(self.source));
        for g in &self.generators {
            let m = matrix_of(g)?;
            acc = m.mul(&acc).map_err(|e| TqftError::Matrix(e.to_string()))?;
        }
        Ok(acc)
    }

    pub fn evaluate_hfl(&self) -> Result<GF2Matrix, TqftError> {
        self.evaluate_with(&hfl_generator_matrix)
    }

    pub fn evaluate_reduced(&self) -> Result<GF2Matrix, TqftError> {
        self.evaluate_with(&reduced_generator_matrix)
    }

    /// Random composable word; component counts stay within `1..=max_size`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_len: usize, max_size: usize) -> GeneratorWord {
        let source = rng.gen_range(1..=max_size);
        let len = rng.gen_range(0..=max_len);
        let mut size = source;
        let mut generators = Vec::with_capacity(len);
        for _ in 0..len {
            let options: Vec<Generator> = Generator::all_up_to(size)
                .into_iter()
                .filter(|g| g.source() == size && g.target() <= max_size)
                .collect();
            let g = options[rng.gen_range(0..options.len())];
            size = g.target();
            generators.push(g);
        }
        GeneratorWord { source, generators }
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "U_{}:[{}]", self.source, parts.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub holds: bool,
    /// Entries `(row, col)` where the two composites differ.
    pub discrepancies: Vec<(usize, usize)>,
    /// Shortest contiguous subword whose composites already differ.
    pub minimal_failing: Option<GeneratorWord>,
}

/// Compares the link-Floer and reduced Khovanov composites along `w`.
pub fn check_triangle(w: &GeneratorWord) -> Result<TriangleReport, TqftError> {
    check_triangle_with(w, &hfl_generator_matrix)
}

/// As [`check_triangle`] with a substitute for the link-Floer generator matrices.
pub fn check_triangle_with(
    w: &GeneratorWord,
    hfl: &dyn Fn(&Generator) -> Result<GF2Matrix, TqftError>,
) -> Result<TriangleReport, TqftError> {
    let left = w.evaluate_with(hfl)?;
    let right = w.evaluate_reduced()?;
    let discrepancies: Vec<(usize, usize)> = (0..left.rows())
        .flat_map(|r| (0..left.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| left.get(r, c) != right.get(r, c))
        .collect();
    if discrepancies.is_empty() {
        return Ok(TriangleReport { holds: true, discrepancies, minimal_failing: None });
    }
    let mut minimal = None;
    'search: for len in 1..=w.len() {
        for start in 0..=w.len() - len {
            let sub = w.subword(start, start + len);
            if sub.evaluate_with(hfl)? != sub.evaluate_reduced()? {
                minimal = Some(sub);
                break 'search;
            }
        }
    }
    Ok(TriangleReport { holds: false, discrepancies, minimal_failing: minimal })
}

/// Elementary decorated cobordism kinds for grading bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementaryKind {
    PosStab,
    NegStab,
    PosDestab,
    NegDestab,
    Birth,
    Death,
    Saddle,
    Isotopy,
}

impl ElementaryKind {
    pub const ALL: [ElementaryKind; 8] = [
        ElementaryKind::PosStab,
        ElementaryKind::NegStab,
        ElementaryKind::PosDestab,
        ElementaryKind::NegDestab,
        ElementaryKind::Birth,
        ElementaryKind::Death,
        ElementaryKind::Saddle,
        ElementaryKind::Isotopy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementaryKind::PosStab => "pos-stab",
            ElementaryKind::NegStab => "neg-stab",
            ElementaryKind::PosDestab => "pos-destab",
            ElementaryKind::NegDestab => "neg-destab",
            ElementaryKind::Birth => "birth",
            ElementaryKind::Death => "death",
            ElementaryKind::Saddle => "saddle",
            ElementaryKind::Isotopy => "isotopy",
        }
    }

    /// Doubled `(alexander, maslov)` shift.
    pub fn doubled_shift(self) -> (i64, i64) {
        match self {
            ElementaryKind::PosStab | ElementaryKind::PosDestab => (1, 1),
            ElementaryKind::NegStab | ElementaryKind::NegDestab => (-1, -1),
            ElementaryKind::Birth | ElementaryKind::Death => (0, 1),
            ElementaryKind::Saddle => (0, -1),
            ElementaryKind::Isotopy => (0, 0),
        }
    }
}

impl FromStr for ElementaryKind {
    type Err = TqftError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        ElementaryKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| TqftError::UnknownKind(t.to_string()))
    }
}

/// Grading shifts as doubled integers, so `alexander2 = 1` means `+1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GradingShift {
    pub alexander2: i64,
    pub maslov2: i64,
    pub delta2: i64,
}

impl GradingShift {
    pub fn new(alexander2: i64, maslov2: i64) -> Self {
        Self { alexander2, maslov2, delta2: alexander2 - maslov2 }
    }

    pub fn compose(self, other: GradingShift) -> GradingShift {
        GradingShift::new(self.alexander2 + other.alexander2, self.maslov2 + other.maslov2)
    }
}

fn half(x: i64) -> String {
    if x % 2 == 0 {
        format!("{}", x / 2)
    } else {
        format!("{x}/2")
    }
}

impl fmt::Display for GradingShift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={} M={} delta={}", half(self.alexander2), half(self.maslov2), half(self.delta2))
    }
}

pub fn grading_shift_word(word: &[ElementaryKind]) -> GradingShift {
    word.iter().fold(GradingShift::default(), |acc, k| {
        let (a, m) = k.doubled_shift();
        acc.compose(GradingShift::new(a, m))
    })
}

pub fn grading_shift_word_str(word: &[&str]) -> Result<GradingShift, TqftError> {
    let kinds = word.iter().map(|s| s.parse()).collect::<Result<Vec<ElementaryKind>, _>>()?;
    Ok(grading_shift_word(&kinds))
}

pub fn grading_shift_surface(chi_f: i64, chi_rplus: i64, chi_rminus: i64) -> GradingShift {
    let dec = chi_rplus - chi_rminus;
    GradingShift::new(dec, chi_f + dec)
}

/// Euler characteristics `(χ(F), χ(R+) − χ(R-))` of the surface assembled from a word, counted
/// per kind: discs add one, saddles remove one, a positive (de)stabilisation moves one unit of
/// decoration into `R+`.
pub fn word_euler_data(word: &[ElementaryKind]) -> (i64, i64) {
    word.iter().fold((0, 0), |(chi, dec), k| match k {
        ElementaryKind::Birth | ElementaryKind::Death => (chi + 1, dec),
        ElementaryKind::Saddle => (chi - 1, dec),
        ElementaryKind::PosStab | ElementaryKind::PosDestab => (chi, dec + 1),
        ElementaryKind::NegStab | ElementaryKind::NegDestab => (chi, dec - 1),
        ElementaryKind::Isotopy => (chi, dec),
    })
}
