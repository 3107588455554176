//! Marked, oriented link diagrams in PD-code form.
//!
//! Convention: `X(a,b,c,d)` lists the four arcs counterclockwise starting
//! from the incoming under-strand `a`; the under-strand runs `a → c`. The
//! direction of the over-strand is recovered by tracing components. A
//! crossing is positive when the over-strand passes from the left of the
//! under-strand to its right, seen along the under-strand direction, i.e.
//! when it runs `d → b`.
//!
//! Crossingless unknot components (`U` tokens) carry no arcs of their own in
//! the PD code. They are addressed by the virtual labels
//! `2n + 1, 2n + 2, …` following the `2n` arcs of an `n`-crossing code so a
//! basepoint can sit on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("parse error at position {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("arcs must appear exactly twice: {}", describe_multiplicities(.0))]
    ArcMultiplicity(Vec<(u32, usize)>),
    #[error("arc labels must be exactly 1..={expected}, found label {found}")]
    LabelRange { expected: u32, found: u32 },
    #[error("unorientable trace at crossing {crossing}: strand continuation contradicts the under-strand direction")]
    Unorientable { crossing: usize },
    #[error("diagram is not planar: {faces} faces where {expected} are required")]
    NonPlanar { faces: usize, expected: usize },
    #[error("empty diagram")]
    Empty,
    #[error("invalid arc {0}")]
    InvalidArc(u32),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {source}")]
    Corpus { line: usize, source: Box<DiagramError> },
    #[error("line {line}: duplicate diagram name {name:?}")]
    DuplicateName { name: String, line: usize },
}

fn describe_multiplicities(arcs: &[(u32, usize)]) -> String {
    arcs.iter().map(|(a, n)| format!("arc {a} appears {n} time(s)")).collect::<Vec<_>>().join(", ")
}

/// Arc label in a PD code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArcId(pub u32);

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Crossing sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

/// Orientation data recovered by tracing, valid for arbitrary positive labels.
#[derive(Debug, Clone)]
struct Trace {
    /// `incoming[c][s]`: the strand enters crossing `c` through slot `s`.
    incoming: Vec<[bool; 4]>,
    /// Arc sequences along the orientation, each rotated to start at its smallest label.
    components: Vec<Vec<u32>>,
}

type Slot = (usize, usize);

fn occurrences(crossings: &[[u32; 4]]) -> BTreeMap<u32, Vec<Slot>> {
    let mut occ: BTreeMap<u32, Vec<Slot>> = BTreeMap::new();
    for (c, x) in crossings.iter().enumerate() {
        for (s, &label) in x.iter().enumerate() {
            occ.entry(label).or_default().push((c, s));
        }
    }
    occ
}

fn check_multiplicities(occ: &BTreeMap<u32, Vec<Slot>>) -> Result<(), DiagramError> {
    let bad: Vec<(u32, usize)> = occ.iter().filter(|(_, v)| v.len() != 2).map(|(&a, v)| (a, v.len())).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(DiagramError::ArcMultiplicity(bad))
    }
}

fn other_end(occ: &BTreeMap<u32, Vec<Slot>>, label: u32, here: Slot) -> Slot {
    let ends = &occ[&label];
    if ends[0] == here {
        ends[1]
    } else {
        ends[0]
    }
}

fn trace(crossings: &[[u32; 4]], occ: &BTreeMap<u32, Vec<Slot>>) -> Result<Trace, DiagramError> {
    let n = crossings.len();
    let mut dir: Vec<[Option<bool>; 4]> = vec![[None; 4]; n];
    let mut components = Vec::new();

    let mut assign = |dir: &mut Vec<[Option<bool>; 4]>, (c, s): Slot, incoming: bool| -> Result<bool, DiagramError> {
        if (s == 0 && !incoming) || (s == 2 && incoming) {
            return Err(DiagramError::Unorientable { crossing: c });
        }
        match dir[c][s] {
            Some(d) if d != incoming => Err(DiagramError::Unorientable { crossing: c }),
            Some(_) => Ok(false),
            None => {
                dir[c][s] = Some(incoming);
                Ok(true)
            }
        }
    };

    let walk = |dir: &mut Vec<[Option<bool>; 4]>,
                start: Slot,
                assign: &mut dyn FnMut(&mut Vec<[Option<bool>; 4]>, Slot, bool) -> Result<bool, DiagramError>|
     -> Result<Vec<u32>, DiagramError> {
        let mut arcs = Vec::new();
        let mut at = start;
        assign(dir, at, true)?;
        loop {
            let out = (at.0, (at.1 + 2) % 4);
            assign(dir, out, false)?;
            let label = crossings[out.0][out.1];
            arcs.push(label);
            let next = other_end(occ, label, out);
            if !assign(dir, next, true)? {
                if next != start {
                    return Err(DiagramError::Unorientable { crossing: next.0 });
                }
                break;
            }
            at = next;
        }
        Ok(arcs)
    };

    for c in 0..n {
        if dir[c][0].is_none() {
            components.push(walk(&mut dir, (c, 0), &mut assign)?);
        }
    }
    // Components that only ever pass over: orient so labels increase where possible.
    loop {
        let start = (0..n).flat_map(|c| [(c, 1), (c, 3)]).find(|&(c, s)| dir[c][s].is_none());
        let Some(first) = start else { break };
        let label = crossings[first.0][first.1];
        let other = other_end(occ, label, first);
        let continues_up = |slot: Slot| crossings[slot.0][(slot.1 + 2) % 4] == label + 1;
        let head = if !continues_up(first) && continues_up(other) { other } else { first };
        components.push(walk(&mut dir, head, &mut assign)?);
    }

    for comp in &mut components {
        let pos = comp.iter().enumerate().min_by_key(|(_, &a)| a).map(|(i, _)| i).unwrap_or(0);
        comp.rotate_left(pos);
    }
    components.sort_by_key(|c| c[0]);
    let incoming = dir.iter().map(|d| [0, 1, 2, 3].map(|s| d[s] == Some(true))).collect();
    Ok(Trace { incoming, components })
}

/// Number of faces of the diagram graph, walking each face with its interior on the left.
fn face_walks(crossings: &[[u32; 4]], occ: &BTreeMap<u32, Vec<Slot>>) -> Vec<Vec<Slot>> {
    let n = crossings.len();
    let mut seen = vec![[false; 4]; n];
    let mut faces = Vec::new();
    for c in 0..n {
        for s in 0..4 {
            if seen[c][s] {
                continue;
            }
            let mut face = Vec::new();
            let mut at = (c, s);
            while !seen[at.0][at.1] {
                seen[at.0][at.1] = true;
                face.push(at);
                let depart = (at.0, (at.1 + 3) % 4);
                at = other_end(occ, crossings[depart.0][depart.1], depart);
            }
            faces.push(face);
        }
    }
    faces
}

fn graph_components(crossings: &[[u32; 4]], occ: &BTreeMap<u32, Vec<Slot>>) -> usize {
    let n = crossings.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for ends in occ.values() {
        let (a, b) = (find(&mut parent, ends[0].0), find(&mut parent, ends[1].0));
        parent[a] = b;
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// An arc of a face boundary, walked with the face on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceEdge {
    pub arc: ArcId,
    /// The walk follows the arc's orientation.
    pub along: bool,
}

/// A marked, oriented link diagram.
#[derive(Debug, Clone)]
pub struct PlanarDiagram {
    crossings: Vec<[u32; 4]>,
    unknotted_extras: usize,
    basepoint: ArcId,
    incoming: Vec<[bool; 4]>,
    components: Vec<Vec<u32>>,
    arc_component: Vec<usize>,
}

impl PartialEq for PlanarDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.crossings == other.crossings
            && self.unknotted_extras == other.unknotted_extras
            && self.basepoint == other.basepoint
    }
}

impl Eq for PlanarDiagram {}

impl PlanarDiagram {
    /// Validates a PD code whose arcs are labeled `1..=2n`.
    pub fn new(crossings: Vec<[u32; 4]>, unknotted_extras: usize, basepoint: ArcId) -> Result<Self, DiagramError> {
        if crossings.is_empty() && unknotted_extras == 0 {
            return Err(DiagramError::Empty);
        }
        let occ = occurrences(&crossings);
        check_multiplicities(&occ)?;
        let arc_count = 2 * crossings.len() as u32;
        if let Some((&found, _)) = occ.iter().find(|(&a, _)| a == 0 || a > arc_count) {
            return Err(DiagramError::LabelRange { expected: arc_count, found });
        }
        let traced = trace(&crossings, &occ)?;
        if !crossings.is_empty() {
            let faces = face_walks(&crossings, &occ).len();
            let expected = 2 * graph_components(&crossings, &occ) + crossings.len();
            if faces != expected {
                return Err(DiagramError::NonPlanar { faces, expected });
            }
        }
        let total = arc_count + unknotted_extras as u32;
        if basepoint.0 == 0 || basepoint.0 > total {
            return Err(DiagramError::InvalidArc(basepoint.0));
        }
        let mut arc_component = vec![usize::MAX; total as usize + 1];
        for (i, comp) in traced.components.iter().enumerate() {
            for &a in comp {
                arc_component[a as usize] = i;
            }
        }
        for j in 0..unknotted_extras {
            arc_component[(arc_count as usize) + 1 + j] = traced.components.len() + j;
        }
        Ok(Self {
            crossings,
            unknotted_extras,
            basepoint,
            incoming: traced.incoming,
            components: traced.components,
            arc_component,
        })
    }

    /// Builds a diagram from crossings with arbitrary distinct positive labels,
    /// relabeling arcs consecutively along each component. `basepoint` names an
    /// arc label of the input, or `None` for the default label 1.
    pub fn from_raw(crossings: Vec<[u32; 4]>, unknotted_extras: usize, basepoint: Option<u32>) -> Result<Self, DiagramError> {
        if crossings.is_empty() && unknotted_extras == 0 {
            return Err(DiagramError::Empty);
        }
        let occ = occurrences(&crossings);
        check_multiplicities(&occ)?;
        if occ.contains_key(&0) {
            return Err(DiagramError::LabelRange { expected: 2 * crossings.len() as u32, found: 0 });
        }
        let traced = trace(&crossings, &occ)?;
        let mut relabel = BTreeMap::new();
        let mut next = 1u32;
        for comp in &traced.components {
            for &a in comp {
                relabel.insert(a, next);
                next += 1;
            }
        }
        let relabeled = crossings.iter().map(|x| x.map(|a| relabel[&a])).collect();
        let bp = match basepoint {
            Some(label) => *relabel.get(&label).ok_or(DiagramError::InvalidArc(label))?,
            None => 1,
        };
        Self::new(relabeled, unknotted_extras, ArcId(bp))
    }

    pub fn unknot() -> Self {
        Self::new(Vec::new(), 1, ArcId(1)).expect("unknot is valid")
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Number of PD arcs, `2n`.
    pub fn arc_count(&self) -> usize {
        2 * self.crossings.len()
    }

    pub fn unknotted_extras(&self) -> usize {
        self.unknotted_extras
    }

    /// All addressable labels: PD arcs followed by one virtual label per crossingless component.
    pub fn labels(&self) -> impl Iterator<Item = ArcId> {
        (1..=(self.arc_count() + self.unknotted_extras) as u32).map(ArcId)
    }

    pub fn basepoint(&self) -> ArcId {
        self.basepoint
    }

    pub fn with_basepoint(&self, arc: ArcId) -> Result<Self, DiagramError> {
        Self::new(self.crossings.clone(), self.unknotted_extras, arc)
    }

    pub fn is_virtual(&self, arc: ArcId) -> bool {
        arc.0 as usize > self.arc_count()
    }

    /// Link components: PD components first (arcs along the orientation), then one per `U`.
    pub fn component_count(&self) -> usize {
        self.components.len() + self.unknotted_extras
    }

    pub fn component_of(&self, arc: ArcId) -> Result<usize, DiagramError> {
        match self.arc_component.get(arc.0 as usize) {
            Some(&c) if arc.0 >= 1 && c != usize::MAX => Ok(c),
            _ => Err(DiagramError::InvalidArc(arc.0)),
        }
    }

    /// Arcs of a component in orientation order.
    pub fn component_arcs(&self, component: usize) -> Vec<ArcId> {
        if component < self.components.len() {
            self.components[component].iter().map(|&a| ArcId(a)).collect()
        } else {
            vec![ArcId((self.arc_count() + 1 + component - self.components.len()) as u32)]
        }
    }

    pub fn crossing_signs(&self) -> Vec<Sign> {
        self.incoming.iter().map(|inc| if inc[3] { Sign::Positive } else { Sign::Negative }).collect()
    }

    pub fn n_plus(&self) -> usize {
        self.crossing_signs().iter().filter(|&&s| s == Sign::Positive).count()
    }

    pub fn n_minus(&self) -> usize {
        self.crossing_count() - self.n_plus()
    }

    pub fn writhe(&self) -> i32 {
        self.crossing_signs().iter().map(|s| s.value()).sum()
    }

    /// `(crossing, slot)` where an arc ends (strand enters) and starts.
    fn arc_ends(&self, arc: u32) -> (Slot, Slot) {
        let mut head = None;
        let mut tail = None;
        for (c, x) in self.crossings.iter().enumerate() {
            for s in 0..4 {
                if x[s] == arc {
                    if self.incoming[c][s] {
                        head = Some((c, s));
                    } else {
                        tail = Some((c, s));
                    }
                }
            }
        }
        (head.expect("arc head"), tail.expect("arc tail"))
    }

    /// Alternating: along every component the passes alternate between over and under.
    pub fn is_alternating(&self) -> bool {
        self.components.iter().all(|comp| {
            let passes: Vec<bool> = comp
                .iter()
                .map(|&a| {
                    let (head, _) = self.arc_ends(a);
                    head.1 == 0
                })
                .collect();
            (0..passes.len()).all(|i| passes[i] != passes[(i + 1) % passes.len()])
        })
    }

    /// Faces of the diagram graph, each walked with its interior on the left.
    pub fn faces(&self) -> Vec<Vec<FaceEdge>> {
        let occ = occurrences(&self.crossings);
        face_walks(&self.crossings, &occ)
            .into_iter()
            .map(|face| {
                face.into_iter()
                    .map(|(c, s)| FaceEdge { arc: ArcId(self.crossings[c][s]), along: self.incoming[c][s] })
                    .collect()
            })
            .collect()
    }

    /// Over/under swapped at every crossing; each tuple is re-rooted at its new incoming under-strand.
    pub fn mirror(&self) -> PlanarDiagram {
        let crossings = self
            .crossings
            .iter()
            .zip(&self.incoming)
            .map(|(x, inc)| if inc[1] { [x[1], x[2], x[3], x[0]] } else { [x[3], x[0], x[1], x[2]] })
            .collect();
        Self::new(crossings, self.unknotted_extras, self.basepoint).expect("mirror of a valid diagram is valid")
    }

    fn check_arc(&self, arc: ArcId) -> Result<(), DiagramError> {
        if arc.0 == 0 || arc.0 as usize > self.arc_count() + self.unknotted_extras {
            Err(DiagramError::InvalidArc(arc.0))
        } else {
            Ok(())
        }
    }

    fn max_label(&self) -> u32 {
        (self.arc_count() + self.unknotted_extras) as u32
    }

    /// Where the basepoint lands after removing crossingless component `removed` and
    /// replacing it with a PD strand starting at label `replacement`.
    fn basepoint_after(&self, removed: Option<ArcId>, replacement: u32) -> Marker {
        if !self.is_virtual(self.basepoint) {
            return Marker::Pd(self.basepoint.0);
        }
        if removed == Some(self.basepoint) {
            return Marker::Pd(replacement);
        }
        let index = self.basepoint.0 as usize - self.arc_count() - 1;
        match removed {
            Some(r) if (r.0 as usize - self.arc_count() - 1) < index => Marker::Extra(index - 1),
            _ => Marker::Extra(index),
        }
    }

    /// Adds a kink of the given sign on `arc`. The basepoint stays on the incoming part of the arc.
    pub fn reidemeister1(&self, arc: ArcId, kink: Sign) -> Result<PlanarDiagram, DiagramError> {
        self.check_arc(arc)?;
        let loop_arc = self.max_label() + 1;
        let mut crossings = self.crossings.clone();
        if self.is_virtual(arc) {
            let x = arc.0;
            crossings.push(match kink {
                Sign::Positive => [x, x, loop_arc, loop_arc],
                Sign::Negative => [x, loop_arc, loop_arc, x],
            });
            return Self::finish(crossings, self.unknotted_extras - 1, self.basepoint_after(Some(arc), x));
        }
        let out_arc = self.max_label() + 2;
        let (head, _) = self.arc_ends(arc.0);
        crossings[head.0][head.1] = out_arc;
        crossings.push(match kink {
            Sign::Positive => [arc.0, out_arc, loop_arc, loop_arc],
            Sign::Negative => [arc.0, loop_arc, loop_arc, out_arc],
        });
        Self::finish(crossings, self.unknotted_extras, self.basepoint_after(None, 0))
    }

    fn finish(crossings: Vec<[u32; 4]>, extras: usize, marker: Marker) -> Result<PlanarDiagram, DiagramError> {
        match marker {
            Marker::Pd(label) => Self::from_raw(crossings, extras, Some(label)),
            Marker::Extra(index) => {
                let d = Self::from_raw(crossings, extras, None)?;
                d.with_basepoint(ArcId((d.arc_count() + 1 + index) as u32))
            }
        }
    }

    /// Pushes a finger of `arc_a` over `arc_b` across a face both arcs bound, adding two
    /// crossings of opposite sign. A crossingless component may be poked over itself by
    /// passing its virtual label twice.
    pub fn reidemeister2(&self, arc_a: ArcId, arc_b: ArcId) -> Result<PlanarDiagram, DiagramError> {
        self.check_arc(arc_a)?;
        self.check_arc(arc_b)?;
        let (va, vb) = (self.is_virtual(arc_a), self.is_virtual(arc_b));
        if va || vb {
            if arc_a != arc_b {
                return Err(DiagramError::InvalidMove(
                    "a crossingless component can only be poked over itself".into(),
                ));
            }
            return self.self_poke(arc_a);
        }
        if arc_a == arc_b {
            return Err(DiagramError::InvalidMove("the two poke strands must be distinct arcs".into()));
        }
        let face = self
            .faces()
            .into_iter()
            .find(|f| f.iter().any(|e| e.arc == arc_a) && f.iter().any(|e| e.arc == arc_b))
            .ok_or_else(|| DiagramError::InvalidMove(format!("arcs {arc_a} and {arc_b} share no face")))?;
        let along_a = face.iter().find(|e| e.arc == arc_a).unwrap().along;
        let along_b = face.iter().find(|e| e.arc == arc_b).unwrap().along;

        let top = self.max_label();
        let (a1, a2, a3, b1, b2, b3) = (arc_a.0, top + 1, top + 2, arc_b.0, top + 3, top + 4);
        let mut crossings = self.crossings.clone();
        let (ha, _) = self.arc_ends(a1);
        let (hb, _) = self.arc_ends(b1);
        crossings[ha.0][ha.1] = a3;
        crossings[hb.0][hb.1] = b3;
        crossings.extend(poke_crossings(along_a, along_b, [a1, a2, a3], [b1, b2, b3]));
        Self::finish(crossings, self.unknotted_extras, self.basepoint_after(None, 0))
    }

    fn self_poke(&self, arc: ArcId) -> Result<PlanarDiagram, DiagramError> {
        let top = self.max_label();
        // Split the circle into halves a and b; a's head meets b's tail and vice versa.
        let (a1, a2, b1, b2) = (top + 1, top + 2, top + 3, top + 4);
        let (a3, b3) = (b1, a1);
        let mut crossings = self.crossings.clone();
        crossings.extend(poke_crossings(true, true, [a1, a2, a3], [b1, b2, b3]));
        Self::finish(crossings, self.unknotted_extras - 1, self.basepoint_after(Some(arc), a1))
    }

    /// Applies a move and reports its result.
    pub fn apply(&self, mv: &Move) -> Result<PlanarDiagram, DiagramError> {
        match *mv {
            Move::R1 { arc, kink } => self.reidemeister1(arc, kink),
            Move::R2 { over, under } => self.reidemeister2(over, under),
        }
    }

    /// A uniformly drawn applicable R1 or R2 move.
    pub fn random_move<R: Rng + ?Sized>(&self, rng: &mut R) -> Move {
        let labels: Vec<ArcId> = self.labels().collect();
        if rng.gen_bool(0.5) {
            let arc = *labels.choose(rng).expect("diagram has labels");
            let kink = if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
            return Move::R1 { arc, kink };
        }
        let mut candidates: Vec<(ArcId, ArcId)> = Vec::new();
        for face in self.faces() {
            for x in &face {
                for y in &face {
                    if x.arc != y.arc {
                        candidates.push((x.arc, y.arc));
                    }
                }
            }
        }
        for j in 0..self.unknotted_extras {
            let v = ArcId((self.arc_count() + 1 + j) as u32);
            candidates.push((v, v));
        }
        candidates.sort();
        candidates.dedup();
        let (over, under) = *candidates.choose(rng).expect("a poke is always available");
        Move::R2 { over, under }
    }

    /// Canonical text form; parses back to an identical diagram.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

/// The two crossings created by poking strand `a` over strand `b` inside a shared face.
///
/// Local frame: `b` runs along the x-axis below the face, `a` above it; the finger of `a`
/// dips through `b` at `P = (-1, 0)` and `Q = (1, 0)`.
fn poke_crossings(along_a: bool, along_b: bool, [a1, a2, a3]: [u32; 3], [b1, b2, b3]: [u32; 3]) -> [[u32; 4]; 2] {
    // Walking a face with its interior on the left runs the lower edge in +x and the upper in -x.
    let s: i32 = if along_b { 1 } else { -1 };
    let t: i32 = if along_a { -1 } else { 1 };
    let (p_under, q_under) = if s == 1 { ((b1, b2), (b2, b3)) } else { ((b2, b3), (b1, b2)) };
    let (p_over, p_dir, q_over, q_dir) =
        if t == 1 { ((a1, a2), (0, -1), (a2, a3), (0, 1)) } else { ((a2, a3), (0, 1), (a1, a2), (0, -1)) };
    [local_crossing((s, 0), p_under, p_dir, p_over), local_crossing((s, 0), q_under, q_dir, q_over)]
}

/// PD tuple of a crossing with axis-aligned strand directions.
fn local_crossing(under_dir: (i32, i32), (under_in, under_out): (u32, u32), over_dir: (i32, i32), (over_in, over_out): (u32, u32)) -> [u32; 4] {
    fn quarter((x, y): (i32, i32)) -> usize {
        match (x, y) {
            (1, 0) => 0,
            (0, 1) => 1,
            (-1, 0) => 2,
            (0, -1) => 3,
            _ => unreachable!("axis-aligned direction"),
        }
    }
    let neg = |(x, y): (i32, i32)| (-x, -y);
    let mut positions = [0u32; 4];
    positions[quarter(neg(under_dir))] = under_in;
    positions[quarter(under_dir)] = under_out;
    positions[quarter(neg(over_dir))] = over_in;
    positions[quarter(over_dir)] = over_out;
    let start = quarter(neg(under_dir));
    [0, 1, 2, 3].map(|k| positions[(start + k) % 4])
}

#[derive(Debug, Clone, Copy)]
enum Marker {
    Pd(u32),
    Extra(usize),
}

/// A Reidemeister move that adds crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    R1 { arc: ArcId, kink: Sign },
    R2 { over: ArcId, under: ArcId },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::R1 { arc, kink } => write!(f, "R1:{arc}:{}", if *kink == Sign::Positive { "+" } else { "-" }),
            Move::R2 { over, under } => write!(f, "R2:{over}:{under}"),
        }
    }
}

impl FromStr for Move {
    type Err = DiagramError;

    /// `R1:<arc>:<+|->` or `R2:<arc>:<arc>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DiagramError::InvalidMove(format!("cannot parse move {s:?}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| p.trim().parse::<u32>().map(ArcId).map_err(|_| bad());
        match parts.as_slice() {
            [kind, arc, sign] if kind.eq_ignore_ascii_case("R1") => {
                let kink = match sign.trim() {
                    "+" | "+1" => Sign::Positive,
                    "-" | "-1" => Sign::Negative,
                    _ => return Err(bad()),
                };
                Ok(Move::R1 { arc: num(arc)?, kink })
            }
            [kind, a, b] if kind.eq_ignore_ascii_case("R2") => Ok(Move::R2 { over: num(a)?, under: num(b)? }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for PlanarDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        if !self.crossings.is_empty() {
            let xs: Vec<String> =
                self.crossings.iter().map(|x| format!("X({},{},{},{})", x[0], x[1], x[2], x[3])).collect();
            terms.push(format!("PD[{}]", xs.join(",")));
        }
        terms.extend(std::iter::repeat_n("U".to_string(), self.unknotted_extras));
        write!(f, "{}", terms.join("+"))?;
        if self.basepoint != ArcId(1) {
            write!(f, "@arc={}", self.basepoint)?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    at: usize,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Self { chars: src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(), at: 0, src }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.src.len(), |&(p, _)| p)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, DiagramError> {
        Err(DiagramError::Parse { pos: self.pos(), message: message.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), DiagramError> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected '{c}', found '{found}'")),
                None => self.err(format!("expected '{c}', found end of input")),
            }
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<(), DiagramError> {
        for c in word.chars() {
            self.expect(c)?;
        }
        Ok(())
    }

    fn number(&mut self) -> Result<u32, DiagramError> {
        let start = self.at;
        let mut value: u64 = 0;
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            value = value * 10 + d as u64;
            if value > u32::MAX as u64 {
                return self.err("number too large");
            }
            self.at += 1;
        }
        if self.at == start {
            return self.err("expected a number");
        }
        Ok(value as u32)
    }
}

/// Parses `PD[X(a,b,c,d),…]`, `U` tokens joined by `+`, and an optional `@arc=<k>` suffix.
pub fn parse_pd(text: &str) -> Result<PlanarDiagram, DiagramError> {
    let mut cur = Cursor::new(text);
    let mut crossings: Option<Vec<[u32; 4]>> = None;
    let mut extras = 0usize;
    loop {
        match cur.peek() {
            Some('U') => {
                cur.at += 1;
                extras += 1;
            }
            Some('P') => {
                if crossings.is_some() {
                    return cur.err("only one PD term is allowed");
                }
                cur.expect_word("PD")?;
                cur.expect('[')?;
                let mut xs = Vec::new();
                if !cur.eat(']') {
                    loop {
                        cur.expect('X')?;
                        let close = if cur.eat('(') {
                            ')'
                        } else if cur.eat('[') {
                            ']'
                        } else {
                            return cur.err("expected '(' after X");
                        };
                        let mut x = [0u32; 4];
                        for (k, slot) in x.iter_mut().enumerate() {
                            if k > 0 {
                                cur.expect(',')?;
                            }
                            *slot = cur.number()?;
                        }
                        cur.expect(close)?;
                        xs.push(x);
                        if cur.eat(']') {
                            break;
                        }
                        cur.expect(',')?;
                    }
                }
                crossings = Some(xs);
            }
            Some(c) => return cur.err(format!("expected 'PD[' or 'U', found '{c}'")),
            None => return cur.err("expected 'PD[' or 'U', found end of input"),
        }
        if !cur.eat('+') {
            break;
        }
    }
    let mut basepoint = ArcId(1);
    if cur.eat('@') {
        cur.expect_word("arc")?;
        cur.expect('=')?;
        basepoint = ArcId(cur.number()?);
    }
    if let Some(c) = cur.peek() {
        return cur.err(format!("unexpected trailing '{c}'"));
    }
    PlanarDiagram::new(crossings.unwrap_or_default(), extras, basepoint)
}

impl FromStr for PlanarDiagram {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pd(s)
    }
}

/// Parses corpus text: `name,pdcode` per line, `#` comments, blank lines ignored.
pub fn parse_corpus(text: &str) -> Result<Vec<(String, PlanarDiagram)>, DiagramError> {
    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((name, pd)) = trimmed.split_once(',') else {
            return Err(DiagramError::Corpus {
                line,
                source: Box::new(DiagramError::Parse { pos: 0, message: "expected 'name,pdcode'".into() }),
            });
        };
        let name = name.trim().to_string();
        let diagram = parse_pd(pd).map_err(|e| DiagramError::Corpus { line, source: Box::new(e) })?;
        if !names.insert(name.clone()) {
            return Err(DiagramError::DuplicateName { name, line });
        }
        out.push((name, diagram));
    }
    Ok(out)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<(String, PlanarDiagram)>, DiagramError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| DiagramError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_corpus(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const LEFT_TREFOIL: &str = "PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]";
    const RIGHT_TREFOIL: &str = "PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)]";

    #[test]
    fn parses_trefoil() {
        let d = parse_pd(LEFT_TREFOIL).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.arc_count(), 6);
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.component_arcs(0), (1..=6).map(ArcId).collect::<Vec<_>>());
    }

    #[test]
    fn whitespace_and_brackets() {
        let d = parse_pd(" PD[ X[1,4,2,5], X(3, 6,4,1),X(5,2,6,3) ] ").unwrap();
        assert_eq!(d, parse_pd(LEFT_TREFOIL).unwrap());
    }

    #[test]
    fn multiplicity_error_lists_arcs() {
        let err = parse_pd("PD[X(1,4,2,5),X(3,6,4,7)]").unwrap_err();
        match err {
            DiagramError::ArcMultiplicity(arcs) => {
                let once: Vec<u32> = arcs.iter().filter(|(_, n)| *n == 1).map(|(a, _)| *a).collect();
                assert_eq!(once, vec![1, 2, 3, 5, 6, 7]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_pd("PD[X(1,2,3)]") {
            Err(DiagramError::Parse { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_pd(""), Err(DiagramError::Parse { .. })));
        assert!(matches!(parse_pd("PD[]"), Err(DiagramError::Empty)));
        assert!(matches!(parse_pd("U@arc=2"), Err(DiagramError::InvalidArc(2))));
    }

    #[test]
    fn unknot_token() {
        let d = parse_pd("U").unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.unknotted_extras(), 1);
        assert!(d.crossing_signs().is_empty());
        assert_eq!(d.mirror(), d);
        let two = parse_pd("U + U @arc=2").unwrap();
        assert_eq!(two.component_count(), 2);
        assert_eq!(two.render(), "U+U@arc=2");
    }

    #[test]
    fn trefoil_signs() {
        let right = parse_pd(RIGHT_TREFOIL).unwrap();
        assert_eq!(right.crossing_signs(), vec![Sign::Positive; 3]);
        assert_eq!(right.writhe(), 3);
        assert_eq!(right.mirror().crossing_signs(), vec![Sign::Negative; 3]);
        // The Knot Atlas code is the left-handed trefoil.
        let left = parse_pd(LEFT_TREFOIL).unwrap();
        assert_eq!((left.n_plus(), left.n_minus()), (0, 3));
        assert_eq!(right.mirror().mirror(), right);
    }

    #[test]
    fn kink_diagrams_are_valid() {
        let pos = parse_pd("PD[X(1,1,2,2)]").unwrap();
        assert_eq!(pos.crossing_signs(), vec![Sign::Positive]);
        let neg = parse_pd("PD[X(1,2,2,1)]").unwrap();
        assert_eq!(neg.crossing_signs(), vec![Sign::Negative]);
    }

    #[test]
    fn nonplanar_and_unorientable() {
        assert!(matches!(parse_pd("PD[X(1,2,1,2)]"), Err(DiagramError::NonPlanar { .. })));
        // Arc 2 leaves crossing 1 through its outgoing under-slot and must enter crossing 2
        // through an incoming under-slot, but it sits in the outgoing one there too.
        assert!(matches!(parse_pd("PD[X(1,3,2,4),X(3,1,2,4)]"), Err(DiagramError::Unorientable { .. })));
    }

    #[test]
    fn hopf_link_components() {
        let d = parse_pd("PD[X(4,1,3,2),X(2,3,1,4)]").unwrap();
        assert_eq!(d.component_count(), 2);
        assert_eq!(d.component_of(ArcId(1)).unwrap(), d.component_of(ArcId(2)).unwrap());
        assert_ne!(d.component_of(ArcId(1)).unwrap(), d.component_of(ArcId(3)).unwrap());
    }

    #[test]
    fn r1_examples() {
        let u = PlanarDiagram::unknot();
        let k = u.reidemeister1(ArcId(1), Sign::Positive).unwrap();
        assert_eq!((k.n_plus(), k.n_minus()), (1, 0));
        assert_eq!(k.render(), "PD[X(1,1,2,2)]");
        let t = parse_pd(RIGHT_TREFOIL).unwrap();
        let t4 = t.reidemeister1(ArcId(2), Sign::Negative).unwrap();
        assert_eq!(t4.crossing_count(), 4);
        assert_eq!(t4.writhe(), 2);
        assert!(matches!(t.reidemeister1(ArcId(9), Sign::Positive), Err(DiagramError::InvalidArc(9))));
    }

    #[test]
    fn r2_examples() {
        let u = PlanarDiagram::unknot();
        let p = u.reidemeister2(ArcId(1), ArcId(1)).unwrap();
        assert_eq!((p.n_plus(), p.n_minus()), (1, 1));
        assert_eq!(p.component_count(), 1);
        let t = parse_pd(RIGHT_TREFOIL).unwrap();
        let face = &t.faces()[0];
        let (a, b) = (face[0].arc, face[1].arc);
        let t5 = t.reidemeister2(a, b).unwrap();
        assert_eq!(t5.crossing_count(), 5);
        assert_eq!(t5.writhe(), t.writhe());
        assert!(t.reidemeister2(a, a).is_err());
    }

    #[test]
    fn random_moves_stay_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for start in [RIGHT_TREFOIL, "U", "PD[X(4,1,3,2),X(2,3,1,4)]", "PD[X(1,5,2,4),X(3,1,4,6),X(5,3,6,2)]+U"] {
            let mut d = parse_pd(start).unwrap();
            for _ in 0..6 {
                let mv = d.random_move(&mut rng);
                let next = d.apply(&mv).unwrap_or_else(|e| panic!("{mv} on {d}: {e}"));
                assert_eq!(next.component_count(), d.component_count());
                let added = next.crossing_count() - d.crossing_count();
                let dw = next.writhe() - d.writhe();
                match mv {
                    Move::R1 { kink, .. } => assert_eq!((added, dw), (1, kink.value())),
                    Move::R2 { .. } => assert_eq!((added, dw), (2, 0)),
                }
                assert_eq!(parse_pd(&next.render()).unwrap(), next);
                d = next;
            }
        }
    }

    #[test]
    fn basepoint_follows_component() {
        let d = parse_pd("PD[X(4,1,3,2),X(2,3,1,4)]@arc=3").unwrap();
        let comp = d.component_of(d.basepoint()).unwrap();
        let arcs_before: BTreeSet<u32> = d.component_arcs(comp).iter().map(|a| a.0).collect();
        assert!(arcs_before.contains(&3));
        for mv in [Move::R1 { arc: ArcId(3), kink: Sign::Positive }, Move::R1 { arc: ArcId(1), kink: Sign::Negative }] {
            let e = d.apply(&mv).unwrap();
            let c = e.component_of(e.basepoint()).unwrap();
            // The marked component keeps its crossing count parity with the other component.
            assert_eq!(e.component_count(), 2);
            let len = e.component_arcs(c).len();
            let expected = if mv == (Move::R1 { arc: ArcId(3), kink: Sign::Positive }) { 4 } else { 2 };
            assert_eq!(len, expected);
        }
    }

    #[test]
    fn corpus_parsing() {
        let c = parse_corpus("# comment\n3_1,PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]\n\n").unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].0, "3_1");
        assert!(parse_corpus("").unwrap().is_empty());
        let dup = parse_corpus("a,U\nb,U\na,U\n").unwrap_err();
        assert_eq!(dup, DiagramError::DuplicateName { name: "a".into(), line: 3 });
        assert!(matches!(parse_corpus("a,U\nb,PD[X(1,2\n"), Err(DiagramError::Corpus { line: 2, .. })));
    }

    #[test]
    fn alternating_detection() {
        let t = parse_pd(RIGHT_TREFOIL).unwrap();
        assert!(t.is_alternating());
        // The kink passes under first, so it keeps alternation only after an over-pass.
        let kept = t.labels().filter(|&a| t.reidemeister1(a, Sign::Positive).unwrap().is_alternating()).count();
        assert_eq!(kept, 3);
    }
}
