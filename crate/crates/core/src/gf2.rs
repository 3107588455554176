//! Bit-packed linear algebra over the two-element field.
//!
//! Vectors pack 64 coordinates per word. Every elimination in this module is
//! expressed through [`EchelonBasis`], an incrementally built basis whose
//! members have pairwise distinct leading coordinates (the lowest set bit).
//! Pivots are therefore chosen as the first nonzero entry in row order and
//! the results are deterministic.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("subspace not contained: span(sub) has {extra} dimension(s) outside span(ambient)")]
    NotContained { extra: usize },
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over F2, stored as a packed bit set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Vector {
    len: usize,
    words: Vec<u64>,
}

impl GF2Vector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    /// Builds a vector from its support; repeated indices cancel.
    pub fn from_support<I: IntoIterator<Item = usize>>(len: usize, support: I) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.toggle(i);
        }
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        Self::from_support(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b & 1 == 1).map(|(i, _)| i))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "index {index} out of range for length {}", self.len);
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "index {index} out of range for length {}", self.len);
        let mask = 1u64 << (index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, index: usize) {
        assert!(index < self.len, "index {index} out of range for length {}", self.len);
        self.words[index / WORD] ^= 1u64 << (index % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// In-place addition (symmetric difference of supports).
    #[inline]
    pub fn add_assign(&mut self, other: &GF2Vector) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn add(&self, other: &GF2Vector) -> GF2Vector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn dot(&self, other: &GF2Vector) -> bool {
        assert_eq!(self.len, other.len, "vector length mismatch");
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
    }

    /// Lowest coordinate carrying a one.
    pub fn leading(&self) -> Option<usize> {
        self.leading_from(0)
    }

    fn leading_from(&self, start: usize) -> Option<usize> {
        let mut w = start / WORD;
        if w >= self.words.len() {
            return None;
        }
        let first = self.words[w] & (!0u64 << (start % WORD));
        if first != 0 {
            return Some(w * WORD + first.trailing_zeros() as usize);
        }
        w += 1;
        while w < self.words.len() {
            if self.words[w] != 0 {
                return Some(w * WORD + self.words[w].trailing_zeros() as usize);
            }
            w += 1;
        }
        None
    }

    /// Iterator over the support in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let tz = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    /// Restriction to the coordinate window `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> GF2Vector {
        assert!(start + len <= self.len);
        GF2Vector::from_support(len, self.ones().filter(|&i| i >= start && i < start + len).map(|i| i - start))
    }
}

impl fmt::Debug for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF2Vector(")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, ")")
    }
}

/// A basis kept in echelon form by leading coordinate.
///
/// Insertion reduces the candidate against the stored vectors; a vector that
/// reduces to zero lies in the span. Optionally each stored vector carries a
/// combination record over the inserted inputs, which is how kernels are
/// recovered.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    vectors: Vec<GF2Vector>,
    combos: Vec<GF2Vector>,
    lead_slot: Vec<u32>,
    track: Option<usize>,
}

const NO_SLOT: u32 = u32::MAX;

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        Self { len, vectors: Vec::new(), combos: Vec::new(), lead_slot: vec![NO_SLOT; len], track: None }
    }

    /// Basis that also records, for every stored vector, which of the (up to
    /// `inputs`) inserted vectors sum to it.
    pub fn tracking(len: usize, inputs: usize) -> Self {
        Self { track: Some(inputs), ..Self::new(len) }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[GF2Vector] {
        &self.vectors
    }

    fn reduce_with(&self, v: &mut GF2Vector, mut combo: Option<&mut GF2Vector>) {
        let mut from = 0;
        while let Some(lead) = v.leading_from(from) {
            let slot = self.lead_slot[lead];
            if slot == NO_SLOT {
                from = lead + 1;
                continue;
            }
            v.add_assign(&self.vectors[slot as usize]);
            if let Some(c) = combo.as_deref_mut() {
                c.add_assign(&self.combos[slot as usize]);
            }
            from = lead + 1;
        }
    }

    /// Fully reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &GF2Vector) -> GF2Vector {
        let mut out = v.clone();
        self.reduce_with(&mut out, None);
        out
    }

    pub fn contains(&self, v: &GF2Vector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts a vector; returns `true` if the rank grew.
    pub fn insert(&mut self, v: &GF2Vector) -> bool {
        self.insert_tracked(v, None).is_none()
    }

    /// Inserts input number `input`. When tracking and the vector is dependent,
    /// returns the kernel relation it produced (a vector over inputs).
    fn insert_tracked(&mut self, v: &GF2Vector, input: Option<usize>) -> Option<GF2Vector> {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let mut reduced = v.clone();
        let mut combo = match (self.track, input) {
            (Some(n), Some(i)) => Some(GF2Vector::unit(n, i)),
            _ => None,
        };
        self.reduce_with(&mut reduced, combo.as_mut());
        match reduced.leading() {
            Some(lead) => {
                self.lead_slot[lead] = self.vectors.len() as u32;
                self.vectors.push(reduced);
                if let Some(c) = combo {
                    self.combos.push(c);
                }
                None
            }
            None => Some(combo.unwrap_or_else(|| GF2Vector::zeros(0))),
        }
    }
}

/// Dimension of the span of a list of vectors of a common length.
pub fn span_dim(len: usize, vectors: &[GF2Vector]) -> usize {
    let mut basis = EchelonBasis::new(len);
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

/// Relations among a list of vectors: a basis of `{c : Σ c_j v_j = 0}`.
pub fn relations(len: usize, vectors: &[GF2Vector]) -> Vec<GF2Vector> {
    let mut basis = EchelonBasis::tracking(len, vectors.len());
    let mut out = Vec::new();
    for (j, v) in vectors.iter().enumerate() {
        if let Some(rel) = basis.insert_tracked(v, Some(j)) {
            out.push(rel);
        }
    }
    out
}

/// A dense matrix over F2 with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<GF2Vector>,
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![GF2Vector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, data: (0..n).map(|i| GF2Vector::unit(n, i)).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<GF2Vector>) -> Result<Self, Gf2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Ok(Self { rows: rows.len(), cols, data: rows })
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[GF2Vector]) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Gf2Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            for i in c.ones() {
                m.data[i].set(j, true);
            }
        }
        Ok(m)
    }

    /// Parses rows of 0/1 values.
    pub fn from_dense(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged dense matrix");
                GF2Vector::from_bits(r)
            })
            .collect();
        Self { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row].get(col)
    }

    pub fn row(&self, row: usize) -> &GF2Vector {
        &self.data[row]
    }

    pub fn column(&self, col: usize) -> GF2Vector {
        GF2Vector::from_support(self.rows, (0..self.rows).filter(|&i| self.data[i].get(col)))
    }

    pub fn columns(&self) -> Vec<GF2Vector> {
        self.transpose().data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(GF2Vector::is_zero)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(GF2Vector::count_ones).sum()
    }

    pub fn transpose(&self) -> GF2Matrix {
        let mut t = GF2Matrix::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    /// Copy of the matrix with one entry flipped.
    pub fn with_toggled(&self, row: usize, col: usize) -> GF2Matrix {
        let mut m = self.clone();
        m.data[row].toggle(col);
        m
    }

    pub fn mul_vec(&self, v: &GF2Vector) -> Result<GF2Vector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok(GF2Vector::from_support(self.rows, (0..self.rows).filter(|&i| self.data[i].dot(v))))
    }

    /// Product `self · other`.
    pub fn mul(&self, other: &GF2Matrix) -> Result<GF2Matrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc = GF2Vector::zeros(other.cols);
                for k in r.ones() {
                    acc.add_assign(&other.data[k]);
                }
                acc
            })
            .collect();
        Ok(GF2Matrix { rows: self.rows, cols: other.cols, data })
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        span_dim(self.cols, &self.data)
    }

    /// Basis of `{v : M·v = 0}`.
    pub fn kernel_basis(&self) -> Vec<GF2Vector> {
        relations(self.rows, &self.columns())
    }

    /// Basis of the column space.
    pub fn image_basis(&self) -> Vec<GF2Vector> {
        let mut basis = EchelonBasis::new(self.rows);
        for c in self.columns() {
            basis.insert(&c);
        }
        basis.vectors
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{} [", self.rows, self.cols)?;
        for r in &self.data {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{}", u8::from(r.get(j)))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn rank(m: &GF2Matrix) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &GF2Matrix) -> Vec<GF2Vector> {
    m.kernel_basis()
}

pub fn image_basis(m: &GF2Matrix) -> Vec<GF2Vector> {
    m.image_basis()
}

/// `dim span(ambient) − dim span(sub)`, refusing when `sub` leaves the ambient span.
pub fn quotient_dim(ambient: &[GF2Vector], sub: &[GF2Vector]) -> Result<usize, Gf2Error> {
    let len = ambient.first().or(sub.first()).map_or(0, GF2Vector::len);
    if let Some(bad) = ambient.iter().chain(sub).find(|v| v.len() != len) {
        return Err(Gf2Error::DimensionMismatch { expected: len, found: bad.len() });
    }
    let mut basis = EchelonBasis::new(len);
    for v in ambient {
        basis.insert(v);
    }
    let ambient_dim = basis.rank();
    let sub_dim = span_dim(len, sub);
    for v in sub {
        basis.insert(v);
    }
    if basis.rank() != ambient_dim {
        return Err(Gf2Error::NotContained { extra: basis.rank() - ambient_dim });
    }
    Ok(ambient_dim - sub_dim)
}
