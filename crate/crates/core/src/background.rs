//! The background: one mutable store holding every interned normalized
//! expression, the derivative equations relating them, and the equivalence
//! classes discovered so far.
//!
//! Expressions are identified by integers. Structurally identical nodes share
//! an identifier, so expression equality is identifier equality. Equations
//! have the form `E = o + x1.E1 + ... + xk.Ek`; their right parts are fixed
//! length identifier rows (`[o, E1, ..., Ek]`), interned in a second table, and
//! equations themselves are interned as `(lhs, rhs)` pairs in a third table.
//!
//! Language equivalence is tracked with a union-find whose roots are the
//! shortest members of their class. The *invariant* of the background is that
//! no two equations share a left part or a right part and that every
//! identifier mentioned by an equation is a representative. Merging two
//! classes can break it; [`Background::normalize_background`] restores it.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::syntax::{AlphabetMap, RawExpr};

/// Default number of expression identifiers.
pub const DEFAULT_CAPACITY: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprId(u32);

impl ExprId {
    pub const ZERO: ExprId = ExprId(0);
    pub const ONE: ExprId = ExprId(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> ExprId {
        ExprId(i as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RhsId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EqId(u32);

/// One interned expression node. Children are identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Zero,
    One,
    Letter(u32),
    Star(ExprId),
    /// Right-spine concatenation: the head is never itself a concatenation.
    Concat(ExprId, ExprId),
    /// At least two members, strictly increasing by identifier.
    Union(Box<[ExprId]>),
    Diff(ExprId, ExprId),
    And(ExprId, ExprId),
    SymDiff(ExprId, ExprId),
}

impl Node {
    pub fn is_extended(&self) -> bool {
        matches!(self, Node::Diff(..) | Node::And(..) | Node::SymDiff(..))
    }

    /// Direct sub-expressions, in order.
    pub fn children(&self) -> Vec<ExprId> {
        match self {
            Node::Zero | Node::One | Node::Letter(_) => Vec::new(),
            Node::Star(c) => vec![*c],
            Node::Concat(a, b) | Node::Diff(a, b) | Node::And(a, b) | Node::SymDiff(a, b) => {
                vec![*a, *b]
            }
            Node::Union(ms) => ms.to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
struct Slot {
    node: Node,
    size: u32,
    nullable: bool,
    /// The node or one of its descendants is a `Diff`, `And` or `SymDiff`.
    extended: bool,
}

/// Used and free identifiers kept in one permutation array: the used ones
/// occupy `dense[..used]`. Membership, allocation and release are O(1).
#[derive(Debug, Clone)]
struct IdPool {
    dense: Vec<u32>,
    pos: Vec<u32>,
    used: usize,
    capacity: usize,
}

impl IdPool {
    fn new(capacity: usize) -> Self {
        IdPool {
            dense: Vec::new(),
            pos: Vec::new(),
            used: 0,
            capacity,
        }
    }

    fn is_used(&self, id: u32) -> bool {
        (id as usize) < self.pos.len() && (self.pos[id as usize] as usize) < self.used
    }

    fn allocate(&mut self) -> Option<u32> {
        if self.used == self.dense.len() {
            if self.dense.len() >= self.capacity {
                return None;
            }
            let id = self.dense.len() as u32;
            self.dense.push(id);
            self.pos.push(id);
        }
        let id = self.dense[self.used];
        self.used += 1;
        Some(id)
    }

    fn release(&mut self, id: u32) {
        debug_assert!(self.is_used(id));
        let p = self.pos[id as usize] as usize;
        let last = self.used - 1;
        let other = self.dense[last];
        self.dense.swap(p, last);
        self.pos[other as usize] = p as u32;
        self.pos[id as usize] = last as u32;
        self.used -= 1;
    }

    fn used_ids(&self) -> &[u32] {
        &self.dense[..self.used]
    }
}

#[derive(Debug, Clone)]
struct RhsEntry {
    cells: Box<[ExprId]>,
    /// Position of this row in `occ[i][cells[i]]`, for `i >= 1`.
    occ_pos: Box<[u32]>,
    eq: EqId,
}

#[derive(Debug, Clone, Copy)]
struct Equation {
    lhs: ExprId,
    rhs: RhsId,
}

/// Counters reported by the statistics harness.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Garbage collections.
    pub gc: u64,
    /// Collections that could not free enough identifiers for the task.
    pub gc_failed: u64,
    /// Class unions performed by `normalize_background`.
    pub merges: u64,
}

/// Outcome of a garbage collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcReport {
    pub reclaimed: usize,
    pub dropped_equations: usize,
}

#[derive(Debug, Clone)]
pub struct Background {
    alphabet: usize,
    slots: Vec<Option<Slot>>,
    ids: IdPool,
    interned: FxHashMap<Node, ExprId>,
    parent: Vec<u32>,
    letters: Vec<ExprId>,

    rhs: Vec<Option<RhsEntry>>,
    rhs_free: Vec<u32>,
    rhs_table: FxHashMap<Box<[ExprId]>, RhsId>,
    eqs: Vec<Option<Equation>>,
    eq_free: Vec<u32>,
    eq_table: FxHashMap<(ExprId, RhsId), EqId>,
    eq_of_lhs: FxHashMap<ExprId, EqId>,
    /// `occ[i][e]`: rows whose cell `i` holds `e` (index 0 unused).
    occ: Vec<FxHashMap<ExprId, Vec<RhsId>>>,

    pending: Vec<(ExprId, ExprId)>,
    counters: Counters,
}

impl Default for Background {
    fn default() -> Self {
        Self::new(DEFAULT_CAPACITY)
    }
}

impl Background {
    /// Creates an empty background holding at most `capacity` expressions.
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(2);
        let mut bg = Background {
            alphabet: 0,
            slots: Vec::new(),
            ids: IdPool::new(capacity),
            interned: FxHashMap::default(),
            parent: Vec::new(),
            letters: Vec::new(),
            rhs: Vec::new(),
            rhs_free: Vec::new(),
            rhs_table: FxHashMap::default(),
            eqs: Vec::new(),
            eq_free: Vec::new(),
            eq_table: FxHashMap::default(),
            eq_of_lhs: FxHashMap::default(),
            occ: vec![FxHashMap::default()],
            pending: Vec::new(),
            counters: Counters::default(),
        };
        let zero = bg.intern(Node::Zero).expect("capacity >= 2");
        let one = bg.intern(Node::One).expect("capacity >= 2");
        debug_assert_eq!((zero, one), (ExprId::ZERO, ExprId::ONE));
        bg
    }

    pub fn capacity(&self) -> usize {
        self.ids.capacity
    }

    /// Number of identifiers currently in use.
    pub fn live_count(&self) -> usize {
        self.ids.used
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    /// Alphabet size `k`; equation rows have `k + 1` cells.
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Grows the alphabet to at least `k` letters. Existing rows get a `0`
    /// cell for every new letter: none of their expressions uses it.
    pub fn ensure_alphabet(&mut self, k: usize) -> Result<()> {
        while self.letters.len() < k {
            let i = self.letters.len() as u32 + 1;
            let id = self.intern(Node::Letter(i))?;
            self.letters.push(id);
        }
        if k <= self.alphabet {
            return Ok(());
        }
        let old = self.alphabet;
        self.alphabet = k;
        self.occ.resize_with(k + 1, FxHashMap::default);
        if self.rhs_table.is_empty() {
            return Ok(());
        }
        self.rhs_table.clear();
        for r in 0..self.rhs.len() {
            let Some(entry) = self.rhs[r].as_mut() else {
                continue;
            };
            let mut cells = entry.cells.to_vec();
            cells.resize(k + 1, ExprId::ZERO);
            let mut pos = entry.occ_pos.to_vec();
            pos.resize(k + 1, 0);
            for (i, slot) in pos.iter_mut().enumerate().skip(old + 1) {
                let list = self.occ[i].entry(ExprId::ZERO).or_default();
                *slot = list.len() as u32;
                list.push(RhsId(r as u32));
            }
            entry.cells = cells.into_boxed_slice();
            entry.occ_pos = pos.into_boxed_slice();
            self.rhs_table.insert(entry.cells.clone(), RhsId(r as u32));
        }
        Ok(())
    }

    // ----------------------------------------------------------------------
    // Nodes

    pub fn is_live(&self, e: ExprId) -> bool {
        self.ids.is_used(e.0) && matches!(self.slots.get(e.index()), Some(Some(_)))
    }

    fn slot(&self, e: ExprId) -> &Slot {
        match self.slots.get(e.index()) {
            Some(Some(s)) => s,
            _ => panic!("stale expression identifier {e:?}"),
        }
    }

    pub fn node(&self, e: ExprId) -> &Node {
        &self.slot(e).node
    }

    /// Symbol count of `e`: leaves, `*`, and one `+` or `.` per gap between
    /// union members or concatenation factors.
    pub fn size(&self, e: ExprId) -> usize {
        self.slot(e).size as usize
    }

    pub fn nullable(&self, e: ExprId) -> bool {
        self.slot(e).nullable
    }

    /// True if `e` contains a difference, intersection or symmetric difference.
    pub fn is_extended(&self, e: ExprId) -> bool {
        self.slot(e).extended
    }

    pub fn letter(&self, i: u32) -> Result<ExprId> {
        (i as usize)
            .checked_sub(1)
            .and_then(|j| self.letters.get(j))
            .copied()
            .ok_or(Error::UnknownLetter(i))
    }

    pub fn letters(&self) -> &[ExprId] {
        &self.letters
    }

    pub fn intern_zero(&self) -> ExprId {
        ExprId::ZERO
    }

    pub fn intern_one(&self) -> ExprId {
        ExprId::ONE
    }

    /// Interns letter `i` (1-based), growing the alphabet if needed.
    pub fn intern_letter(&mut self, i: u32) -> Result<ExprId> {
        if i == 0 {
            return Err(Error::UnknownLetter(0));
        }
        self.ensure_alphabet(i as usize)?;
        self.letter(i)
    }

    /// Looks `node` up in the interning table, allocating a fresh identifier
    /// when it is new. Callers are responsible for normal form.
    pub(crate) fn intern(&mut self, node: Node) -> Result<ExprId> {
        if let Some(&id) = self.interned.get(&node) {
            return Ok(id);
        }
        let (size, nullable, extended) = self.summarize(&node);
        let raw = self.ids.allocate().ok_or(Error::ArenaFull {
            capacity: self.ids.capacity,
        })?;
        let id = ExprId(raw);
        let idx = id.index();
        if self.slots.len() <= idx {
            self.slots.resize_with(idx + 1, || None);
            self.parent.resize(idx + 1, 0);
        }
        self.parent[idx] = raw;
        self.slots[idx] = Some(Slot {
            node: node.clone(),
            size,
            nullable,
            extended,
        });
        self.interned.insert(node, id);
        Ok(id)
    }

    fn summarize(&self, node: &Node) -> (u32, bool, bool) {
        let s = |e: &ExprId| self.slot(*e);
        match node {
            Node::Zero => (1, false, false),
            Node::One => (1, true, false),
            Node::Letter(_) => (1, false, false),
            Node::Star(c) => (s(c).size.saturating_add(1), true, s(c).extended),
            Node::Concat(a, b) => (
                s(a).size.saturating_add(s(b).size).saturating_add(1),
                s(a).nullable && s(b).nullable,
                s(a).extended || s(b).extended,
            ),
            Node::Union(ms) => {
                let size = ms
                    .iter()
                    .fold(ms.len() as u32 - 1, |acc, m| acc.saturating_add(s(m).size));
                (
                    size,
                    ms.iter().any(|m| s(m).nullable),
                    ms.iter().any(|m| s(m).extended),
                )
            }
            Node::Diff(a, b) | Node::And(a, b) | Node::SymDiff(a, b) => {
                let (na, nb) = (s(a).nullable, s(b).nullable);
                let nullable = match node {
                    Node::Diff(..) => na && !nb,
                    Node::And(..) => na && nb,
                    _ => na != nb,
                };
                (s(a).size.saturating_add(s(b).size).saturating_add(1), nullable, true)
            }
        }
    }

    // ----------------------------------------------------------------------
    // Smart constructors

    /// Normalized union: drops 0, flattens nested unions, removes duplicates
    /// and sorts members by identifier.
    pub fn union_of(&mut self, a: ExprId, b: ExprId) -> Result<ExprId> {
        if a == b || b == ExprId::ZERO {
            return Ok(a);
        }
        if a == ExprId::ZERO {
            return Ok(b);
        }
        let ma = self.members(a);
        let mb = self.members(b);
        let mut members = Vec::with_capacity(ma.len() + mb.len());
        let (mut i, mut j) = (0, 0);
        while i < ma.len() && j < mb.len() {
            match ma[i].cmp(&mb[j]) {
                std::cmp::Ordering::Less => {
                    members.push(ma[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    members.push(mb[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    members.push(ma[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        members.extend_from_slice(&ma[i..]);
        members.extend_from_slice(&mb[j..]);
        self.union_from_sorted(members)
    }

    /// Normalized union of any number of expressions.
    pub fn union_many(&mut self, items: &[ExprId]) -> Result<ExprId> {
        match items {
            [] => return Ok(ExprId::ZERO),
            [x] => return Ok(*x),
            [x, y] => return self.union_of(*x, *y),
            _ => {}
        }
        let mut members = Vec::with_capacity(items.len());
        for &e in items {
            match self.node(e) {
                Node::Zero => {}
                Node::Union(ms) => members.extend_from_slice(ms),
                _ => members.push(e),
            }
        }
        members.sort_unstable();
        members.dedup();
        self.union_from_sorted(members)
    }

    fn union_from_sorted(&mut self, members: Vec<ExprId>) -> Result<ExprId> {
        match members.len() {
            0 => Ok(ExprId::ZERO),
            1 => Ok(members[0]),
            _ => self.intern(Node::Union(members.into_boxed_slice())),
        }
    }

    /// Normalized concatenation: 0 annihilates, 1 is neutral, and nested heads
    /// are rotated into a right spine.
    pub fn concat_of(&mut self, a: ExprId, b: ExprId) -> Result<ExprId> {
        if a == ExprId::ZERO || b == ExprId::ZERO {
            return Ok(ExprId::ZERO);
        }
        if a == ExprId::ONE {
            return Ok(b);
        }
        if b == ExprId::ONE {
            return Ok(a);
        }
        if !matches!(self.node(a), Node::Concat(..)) {
            return self.intern(Node::Concat(a, b));
        }
        let factors = self.factors(a);
        let mut acc = b;
        for &f in factors.iter().rev() {
            acc = self.intern(Node::Concat(f, acc))?;
        }
        Ok(acc)
    }

    /// Concatenation of a sequence of expressions.
    pub fn concat_many(&mut self, items: &[ExprId]) -> Result<ExprId> {
        let mut acc = ExprId::ONE;
        for &e in items.iter().rev() {
            acc = self.concat_of(e, acc)?;
        }
        Ok(acc)
    }

    /// Factors along the concatenation spine of `e` (just `[e]` otherwise).
    pub fn factors(&self, mut e: ExprId) -> Vec<ExprId> {
        let mut out = Vec::new();
        while let Node::Concat(h, t) = self.node(e) {
            out.push(*h);
            e = *t;
        }
        out.push(e);
        out
    }

    /// Members of `e` if it is a union, `[e]` otherwise (empty for 0).
    pub fn members(&self, e: ExprId) -> Vec<ExprId> {
        match self.node(e) {
            Node::Zero => Vec::new(),
            Node::Union(ms) => ms.to_vec(),
            _ => vec![e],
        }
    }

    /// Normalized iteration: `0* = 1* = 1` and `(E*)* = E*`.
    pub fn star_of(&mut self, a: ExprId) -> Result<ExprId> {
        match self.node(a) {
            Node::Zero | Node::One => Ok(ExprId::ONE),
            Node::Star(_) => Ok(a),
            _ => self.intern(Node::Star(a)),
        }
    }

    /// `a \ b` with `E\0 = E`, `0\E = 0`, `E\E = 0`.
    pub fn diff_of(&mut self, a: ExprId, b: ExprId) -> Result<ExprId> {
        if a == ExprId::ZERO || a == b {
            return Ok(ExprId::ZERO);
        }
        if b == ExprId::ZERO {
            return Ok(a);
        }
        self.intern(Node::Diff(a, b))
    }

    /// `a & b` with `E&E = E`, `E&0 = 0`; operands are ordered by identifier.
    pub fn and_of(&mut self, a: ExprId, b: ExprId) -> Result<ExprId> {
        if a == ExprId::ZERO || b == ExprId::ZERO {
            return Ok(ExprId::ZERO);
        }
        if a == b {
            return Ok(a);
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.intern(Node::And(a, b))
    }

    /// `a ^ b` with `E^E = 0`, `E^0 = E`; operands are ordered by identifier.
    pub fn symdiff_of(&mut self, a: ExprId, b: ExprId) -> Result<ExprId> {
        if a == b {
            return Ok(ExprId::ZERO);
        }
        if a == ExprId::ZERO {
            return Ok(b);
        }
        if b == ExprId::ZERO {
            return Ok(a);
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.intern(Node::SymDiff(a, b))
    }

    /// Rebuilds a node of the same shape as `e` from new children.
    pub fn rebuild(&mut self, e: ExprId, children: &[ExprId]) -> Result<ExprId> {
        match self.node(e) {
            Node::Zero | Node::One | Node::Letter(_) => Ok(e),
            Node::Star(_) => self.star_of(children[0]),
            Node::Concat(..) => self.concat_of(children[0], children[1]),
            Node::Union(_) => self.union_many(children),
            Node::Diff(..) => self.diff_of(children[0], children[1]),
            Node::And(..) => self.and_of(children[0], children[1]),
            Node::SymDiff(..) => self.symdiff_of(children[0], children[1]),
        }
    }

    /// Interns a raw tree bottom-up through the smart constructors. Letters
    /// are renamed through `map`.
    pub fn normalize_expr(&mut self, raw: &RawExpr, map: &AlphabetMap) -> Result<ExprId> {
        self.ensure_alphabet(map.len())?;
        self.normalize_raw(raw, map)
    }

    fn normalize_raw(&mut self, raw: &RawExpr, map: &AlphabetMap) -> Result<ExprId> {
        Ok(match raw {
            RawExpr::Zero => ExprId::ZERO,
            RawExpr::One => ExprId::ONE,
            RawExpr::Letter(c) => {
                let i = map.index_of(*c).ok_or(Error::UnknownLetter(0))?;
                self.letter(i)?
            }
            RawExpr::Star(e) => {
                let e = self.normalize_raw(e, map)?;
                self.star_of(e)?
            }
            RawExpr::Concat(l, r) => {
                let l = self.normalize_raw(l, map)?;
                let r = self.normalize_raw(r, map)?;
                self.concat_of(l, r)?
            }
            RawExpr::Union(l, r) => {
                let l = self.normalize_raw(l, map)?;
                let r = self.normalize_raw(r, map)?;
                self.union_of(l, r)?
            }
            RawExpr::Diff(l, r) => {
                let l = self.normalize_raw(l, map)?;
                let r = self.normalize_raw(r, map)?;
                self.diff_of(l, r)?
            }
            RawExpr::And(l, r) => {
                let l = self.normalize_raw(l, map)?;
                let r = self.normalize_raw(r, map)?;
                self.and_of(l, r)?
            }
            RawExpr::SymDiff(l, r) => {
                let l = self.normalize_raw(l, map)?;
                let r = self.normalize_raw(r, map)?;
                self.symdiff_of(l, r)?
            }
        })
    }

    /// `(a1 + ... + ak)*` over the whole alphabet.
    pub fn full_language(&mut self) -> Result<ExprId> {
        let letters = self.letters.clone();
        let u = self.union_many(&letters)?;
        self.star_of(u)
    }

    /// Distinct sub-expressions of `e`, including `e`.
    pub fn subexpressions(&self, e: ExprId) -> Vec<ExprId> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut out = Vec::new();
        let mut stack = vec![e];
        while let Some(x) = stack.pop() {
            if !seen.insert(x) {
                continue;
            }
            out.push(x);
            stack.extend(self.node(x).children());
        }
        out
    }

    // ----------------------------------------------------------------------
    // Equivalence classes

    /// Representative of the class of `e`, compressing the path on the way.
    pub fn rep(&mut self, e: ExprId) -> ExprId {
        let mut root = e.0;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = e.0;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        ExprId(root)
    }

    /// Representative without path compression.
    pub fn find(&self, e: ExprId) -> ExprId {
        let mut root = e.0;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        ExprId(root)
    }

    /// Ordering used to elect representatives: plain expressions before
    /// extended ones, then shorter, then older.
    fn election_key(&self, e: ExprId) -> (bool, u32, u32) {
        let s = self.slot(e);
        (s.extended, s.size, e.0)
    }

    /// Records that `a` and `b` denote the same language. Takes effect at
    /// the next [`normalize_background`](Self::normalize_background).
    pub fn merge(&mut self, a: ExprId, b: ExprId) {
        if a == b {
            return;
        }
        let (ra, rb) = (self.rep(a), self.rep(b));
        if ra != rb {
            self.pending.push((ra, rb));
        }
    }

    /// `merge` followed by `normalize_background`.
    pub fn merge_now(&mut self, a: ExprId, b: ExprId) {
        self.merge(a, b);
        self.normalize_background();
    }

    pub fn has_pending_merges(&self) -> bool {
        !self.pending.is_empty()
    }

    // ----------------------------------------------------------------------
    // Equations

    pub fn equation_count(&self) -> usize {
        self.eq_of_lhs.len()
    }

    /// The equation whose left part is `e` itself (not its representative).
    pub fn equation_of(&self, e: ExprId) -> Option<EqId> {
        self.eq_of_lhs.get(&e).copied()
    }

    pub fn equation_lhs(&self, eq: EqId) -> ExprId {
        self.eq_entry(eq).lhs
    }

    pub fn equation_rhs(&self, eq: EqId) -> RhsId {
        self.eq_entry(eq).rhs
    }

    pub fn equation_cells(&self, eq: EqId) -> &[ExprId] {
        self.rhs_cells(self.eq_entry(eq).rhs)
    }

    pub fn rhs_cells(&self, r: RhsId) -> &[ExprId] {
        &self.rhs[r.0 as usize].as_ref().expect("live rhs").cells
    }

    /// Row of the representative of `e`, when it owns an equation.
    pub fn row_of_rep(&mut self, e: ExprId) -> Option<Vec<ExprId>> {
        let r = self.rep(e);
        self.equation_of(r).map(|eq| self.equation_cells(eq).to_vec())
    }

    fn eq_entry(&self, eq: EqId) -> &Equation {
        self.eqs[eq.0 as usize].as_ref().expect("live equation")
    }

    /// All live equations, in identifier order.
    pub fn equations(&self) -> Vec<EqId> {
        self.eqs
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_some())
            .map(|(i, _)| EqId(i as u32))
            .collect()
    }

    /// Adds `lhs = cells[0] + x1.cells[1] + ...`. Cells are replaced by their
    /// representatives. A collision with an existing left or right part is
    /// resolved by normalizing; the returned equation is the one owned by the
    /// representative of `lhs` afterwards.
    pub fn register_equation(&mut self, lhs: ExprId, cells: &[ExprId]) -> Result<EqId> {
        let k = self.alphabet;
        if cells.len() != k + 1 {
            return Err(Error::RowLength {
                got: cells.len(),
                expected: k + 1,
            });
        }
        if cells[0] != ExprId::ZERO && cells[0] != ExprId::ONE {
            return Err(Error::BadConstant);
        }
        self.normalize_background();
        let lhs = self.rep(lhs);
        if self.is_extended(lhs) {
            return Err(Error::ExtendedInEquation);
        }
        let mut row: Vec<ExprId> = Vec::with_capacity(k + 1);
        row.push(cells[0]);
        for &c in &cells[1..] {
            let c = self.rep(c);
            if self.is_extended(c) {
                return Err(Error::ExtendedInEquation);
            }
            row.push(c);
        }

        if let Some(existing) = self.equation_of(lhs) {
            let old = self.equation_cells(existing).to_vec();
            if old == row {
                return Ok(existing);
            }
            assert_eq!(old[0], row[0], "equations of one class disagree on the empty word");
            for (a, b) in old.into_iter().zip(row).skip(1) {
                self.merge(a, b);
            }
        } else if let Some(&r) = self.rhs_table.get(row.as_slice()) {
            let other = self.eq_entry(self.rhs[r.0 as usize].as_ref().unwrap().eq).lhs;
            self.merge(lhs, other);
        } else {
            let eq = self.alloc_eq(lhs);
            let r = self.add_rhs(row.into_boxed_slice(), eq);
            self.eqs[eq.0 as usize].as_mut().unwrap().rhs = r;
            self.eq_table.insert((lhs, r), eq);
            self.eq_of_lhs.insert(lhs, eq);
            return Ok(eq);
        }
        self.normalize_background();
        let lhs = self.rep(lhs);
        Ok(self.equation_of(lhs).expect("class keeps its equation"))
    }

    fn alloc_eq(&mut self, lhs: ExprId) -> EqId {
        let eq = Equation { lhs, rhs: RhsId(u32::MAX) };
        if let Some(i) = self.eq_free.pop() {
            self.eqs[i as usize] = Some(eq);
            EqId(i)
        } else {
            self.eqs.push(Some(eq));
            EqId(self.eqs.len() as u32 - 1)
        }
    }

    fn add_rhs(&mut self, cells: Box<[ExprId]>, eq: EqId) -> RhsId {
        let id = match self.rhs_free.pop() {
            Some(i) => RhsId(i),
            None => {
                self.rhs.push(None);
                RhsId(self.rhs.len() as u32 - 1)
            }
        };
        let mut occ_pos = vec![0u32; cells.len()];
        for i in 1..cells.len() {
            let list = self.occ[i].entry(cells[i]).or_default();
            occ_pos[i] = list.len() as u32;
            list.push(id);
        }
        self.rhs_table.insert(cells.clone(), id);
        self.rhs[id.0 as usize] = Some(RhsEntry {
            cells,
            occ_pos: occ_pos.into_boxed_slice(),
            eq,
        });
        id
    }

    fn remove_rhs(&mut self, r: RhsId) -> RhsEntry {
        let entry = self.rhs[r.0 as usize].take().expect("live rhs");
        for i in 1..entry.cells.len() {
            let key = entry.cells[i];
            let list = self.occ[i].get_mut(&key).expect("occurrence list");
            let p = entry.occ_pos[i] as usize;
            debug_assert_eq!(list[p], r);
            list.swap_remove(p);
            if p < list.len() {
                let moved = list[p];
                self.rhs[moved.0 as usize].as_mut().unwrap().occ_pos[i] = p as u32;
            }
            if list.is_empty() {
                self.occ[i].remove(&key);
            }
        }
        self.rhs_table.remove(&entry.cells);
        self.rhs_free.push(r.0);
        entry
    }

    /// Removes an equation whose right part has already been detached.
    fn drop_equation_entry(&mut self, eq: EqId) {
        let e = self.eqs[eq.0 as usize].take().expect("live equation");
        self.eq_table.remove(&(e.lhs, e.rhs));
        if self.eq_of_lhs.get(&e.lhs) == Some(&eq) {
            self.eq_of_lhs.remove(&e.lhs);
        }
        self.eq_free.push(eq.0);
    }

    fn delete_equation(&mut self, eq: EqId) {
        let rhs = self.eq_entry(eq).rhs;
        self.remove_rhs(rhs);
        self.drop_equation_entry(eq);
    }

    /// Restores the background invariant after merges: unions the pending
    /// classes, renames losers to winners in every equation, and resolves the
    /// left/right part collisions this creates, until nothing is pending.
    pub fn normalize_background(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (ra, rb) = (self.rep(a), self.rep(b));
            if ra == rb {
                continue;
            }
            let (winner, loser) = if self.election_key(ra) <= self.election_key(rb) {
                (ra, rb)
            } else {
                (rb, ra)
            };
            self.parent[loser.index()] = winner.0;
            self.counters.merges += 1;

            let mut affected: Vec<RhsId> = Vec::new();
            for i in 1..self.occ.len() {
                if let Some(list) = self.occ[i].get(&loser) {
                    affected.extend_from_slice(list);
                }
            }
            affected.sort_unstable();
            affected.dedup();
            for r in affected {
                let entry = self.remove_rhs(r);
                let eq = entry.eq;
                let mut cells = entry.cells;
                for c in cells.iter_mut() {
                    if *c == loser {
                        *c = winner;
                    }
                }
                let lhs = self.eq_entry(eq).lhs;
                self.eq_table.remove(&(lhs, r));
                if let Some(&r2) = self.rhs_table.get(&cells) {
                    let other = self.rhs[r2.0 as usize].as_ref().unwrap().eq;
                    let other_lhs = self.eq_entry(other).lhs;
                    self.eqs[eq.0 as usize].as_mut().unwrap().rhs = RhsId(u32::MAX);
                    self.drop_equation_entry(eq);
                    self.pending.push((lhs, other_lhs));
                } else {
                    let r_new = self.add_rhs(cells, eq);
                    self.eqs[eq.0 as usize].as_mut().unwrap().rhs = r_new;
                    self.eq_table.insert((lhs, r_new), eq);
                }
            }

            if let Some(el) = self.eq_of_lhs.remove(&loser) {
                let rl = self.eq_entry(el).rhs;
                if let Some(&ew) = self.eq_of_lhs.get(&winner) {
                    let lost = self.rhs_cells(rl).to_vec();
                    let kept = self.equation_cells(ew).to_vec();
                    assert_eq!(lost[0], kept[0], "merged classes disagree on the empty word");
                    for (x, y) in lost.into_iter().zip(kept).skip(1) {
                        if x != y {
                            self.pending.push((x, y));
                        }
                    }
                    self.delete_equation(el);
                } else {
                    self.eq_table.remove(&(loser, rl));
                    self.eqs[el.0 as usize].as_mut().unwrap().lhs = winner;
                    self.eq_table.insert((winner, rl), el);
                    self.eq_of_lhs.insert(winner, el);
                }
            }
        }
    }

    // ----------------------------------------------------------------------
    // Garbage collection

    /// Frees every identifier not reachable from `roots`, from the letters,
    /// or from a retained equation. All equations are retained.
    pub fn gc(&mut self, roots: &[ExprId]) -> GcReport {
        self.collect(roots, false)
    }

    /// Collection after a failed one: drops every equation that the roots
    /// cannot reach through equation cells, then collects.
    pub fn gc_degraded(&mut self, roots: &[ExprId]) -> GcReport {
        self.counters.gc_failed += 1;
        self.collect(roots, true)
    }

    fn collect(&mut self, roots: &[ExprId], drop_unrooted_equations: bool) -> GcReport {
        self.normalize_background();
        self.counters.gc += 1;

        let used: Vec<u32> = self.ids.used_ids().to_vec();
        for &id in &used {
            let r = self.rep(ExprId(id));
            self.parent[id as usize] = r.0;
        }

        let mut dropped = 0;
        if drop_unrooted_equations {
            let mut keep = rustc_hash::FxHashSet::default();
            let mut stack: Vec<ExprId> = roots.iter().map(|&r| self.find(r)).collect();
            while let Some(x) = stack.pop() {
                if let Some(eq) = self.equation_of(x) {
                    if keep.insert(eq) {
                        stack.extend(self.equation_cells(eq).iter().copied());
                    }
                }
            }
            for eq in self.equations() {
                if !keep.contains(&eq) {
                    self.delete_equation(eq);
                    dropped += 1;
                }
            }
        }

        let mut marked = vec![false; self.slots.len()];
        let mut stack: Vec<ExprId> = Vec::new();
        stack.extend_from_slice(roots);
        stack.push(ExprId::ZERO);
        stack.push(ExprId::ONE);
        stack.extend_from_slice(&self.letters);
        for entry in self.eqs.iter().flatten() {
            stack.push(entry.lhs);
            stack.extend_from_slice(&self.rhs[entry.rhs.0 as usize].as_ref().unwrap().cells);
        }
        while let Some(x) = stack.pop() {
            if !self.is_live(x) || marked[x.index()] {
                continue;
            }
            marked[x.index()] = true;
            stack.push(ExprId(self.parent[x.index()]));
            stack.extend(self.node(x).children());
        }

        let mut reclaimed = 0;
        for id in used {
            if marked[id as usize] {
                continue;
            }
            let slot = self.slots[id as usize].take().expect("used slot");
            self.interned.remove(&slot.node);
            self.parent[id as usize] = id;
            self.ids.release(id);
            reclaimed += 1;
        }
        GcReport {
            reclaimed,
            dropped_equations: dropped,
        }
    }

    // ----------------------------------------------------------------------
    // Diagnostics

    /// Full scan of the background invariant and of every index. Returns a
    /// description of the first violation found.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if !self.pending.is_empty() {
            return Err("pending merges".into());
        }
        let mut lhs_seen = rustc_hash::FxHashSet::default();
        let mut rhs_seen = rustc_hash::FxHashSet::default();
        let mut count = 0;
        for (i, eq) in self.eqs.iter().enumerate() {
            let Some(eq) = eq else { continue };
            count += 1;
            let id = EqId(i as u32);
            if !lhs_seen.insert(eq.lhs) {
                return Err(format!("two equations with left part {:?}", eq.lhs));
            }
            if !rhs_seen.insert(eq.rhs) {
                return Err(format!("two equations with right part {:?}", eq.rhs));
            }
            if self.find(eq.lhs) != eq.lhs {
                return Err(format!("left part {:?} is not a representative", eq.lhs));
            }
            if self.eq_of_lhs.get(&eq.lhs) != Some(&id) {
                return Err(format!("lhs index out of sync for {id:?}"));
            }
            if self.eq_table.get(&(eq.lhs, eq.rhs)) != Some(&id) {
                return Err(format!("equation table out of sync for {id:?}"));
            }
            let Some(entry) = self.rhs[eq.rhs.0 as usize].as_ref() else {
                return Err(format!("{id:?} points to a dead right part"));
            };
            if entry.eq != id {
                return Err(format!("right part {:?} points to another equation", eq.rhs));
            }
            if entry.cells.len() != self.alphabet + 1 {
                return Err(format!("row of {id:?} has the wrong length"));
            }
            if entry.cells[0] != ExprId::ZERO && entry.cells[0] != ExprId::ONE {
                return Err(format!("row of {id:?} has a non-constant first cell"));
            }
            for &c in entry.cells.iter().skip(1) {
                if !self.is_live(c) {
                    return Err(format!("row of {id:?} mentions dead {c:?}"));
                }
                if self.find(c) != c {
                    return Err(format!("row of {id:?} mentions non-representative {c:?}"));
                }
            }
            if self.rhs_table.get(&entry.cells) != Some(&eq.rhs) {
                return Err(format!("rhs table out of sync for {:?}", eq.rhs));
            }
        }
        if count != self.eq_of_lhs.len() || count != self.eq_table.len() {
            return Err("equation indexes have stale entries".into());
        }
        if self.rhs.iter().flatten().count() != count || self.rhs_table.len() != count {
            return Err("orphan right parts".into());
        }
        for (i, per_letter) in self.occ.iter().enumerate().skip(1) {
            for (&e, list) in per_letter {
                for (p, r) in list.iter().enumerate() {
                    let Some(entry) = self.rhs[r.0 as usize].as_ref() else {
                        return Err(format!("occurrence of dead row {r:?}"));
                    };
                    if entry.cells[i] != e || entry.occ_pos[i] as usize != p {
                        return Err(format!("occurrence index wrong for {r:?} at letter {i}"));
                    }
                }
            }
        }
        for (r, entry) in self.rhs.iter().enumerate() {
            let Some(entry) = entry else { continue };
            for i in 1..entry.cells.len() {
                let ok = self.occ[i]
                    .get(&entry.cells[i])
                    .is_some_and(|l| l.get(entry.occ_pos[i] as usize) == Some(&RhsId(r as u32)));
                if !ok {
                    return Err(format!("row {r} missing from occurrence index at letter {i}"));
                }
            }
        }
        for &id in self.ids.used_ids() {
            let e = ExprId(id);
            let Some(slot) = self.slots[id as usize].as_ref() else {
                return Err(format!("used identifier {id} has no node"));
            };
            if self.interned.get(&slot.node) != Some(&e) {
                return Err(format!("interning table out of sync for {id}"));
            }
            let root = self.find(e);
            if self.election_key(root) > self.election_key(e) {
                return Err(format!("{e:?} beats its representative {root:?}"));
            }
        }
        if self.interned.len() != self.ids.used {
            return Err("interning table has stale entries".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn bg2() -> Background {
        let mut bg = Background::new(10_000);
        bg.ensure_alphabet(3).unwrap();
        bg
    }

    fn ex(bg: &mut Background, text: &str) -> ExprId {
        let (raw, _) = parse(text).unwrap();
        // Letters a, b, c map to 1, 2, 3 regardless of occurrence order.
        let map = AlphabetMap::from_letters("abcd".chars().take(bg.alphabet()));
        bg.normalize_expr(&raw, &map).unwrap()
    }

    #[test]
    fn constants_and_letters() {
        let mut bg = bg2();
        assert_ne!(bg.intern_zero(), bg.intern_one());
        let a1 = bg.intern_letter(1).unwrap();
        let a2 = bg.intern_letter(1).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(bg.size(a1), 1);
        assert!(bg.intern_letter(0).is_err());
    }

    #[test]
    fn union_laws() {
        let mut bg = bg2();
        let [a, b, c] = [1, 2, 3].map(|i| bg.letter(i).unwrap());
        assert_eq!(bg.union_of(a, ExprId::ZERO).unwrap(), a);
        assert_eq!(bg.union_of(a, a).unwrap(), a);
        let ba = bg.union_of(b, a).unwrap();
        let x = bg.union_of(ba, c).unwrap();
        let cb = bg.union_of(c, b).unwrap();
        let y = bg.union_of(a, cb).unwrap();
        assert_eq!(x, y);
        match bg.node(x) {
            Node::Union(ms) => assert_eq!(&ms[..], &[a, b, c]),
            n => panic!("{n:?}"),
        }
        assert_eq!(bg.size(x), 5);
        assert_eq!(bg.union_many(&[c, x, b, ExprId::ZERO]).unwrap(), x);
    }

    #[test]
    fn concat_laws() {
        let mut bg = bg2();
        let [a, b, c] = [1, 2, 3].map(|i| bg.letter(i).unwrap());
        assert_eq!(bg.concat_of(a, ExprId::ONE).unwrap(), a);
        assert_eq!(bg.concat_of(ExprId::ZERO, b).unwrap(), ExprId::ZERO);
        let ab = bg.concat_of(a, b).unwrap();
        let left = bg.concat_of(ab, c).unwrap();
        let bc = bg.concat_of(b, c).unwrap();
        let right = bg.concat_of(a, bc).unwrap();
        assert_eq!(left, right);
        assert_eq!(bg.factors(left), vec![a, b, c]);
        assert_ne!(bg.concat_of(b, a).unwrap(), ab);
        assert_eq!(bg.size(left), 5);
    }

    #[test]
    fn star_laws() {
        let mut bg = bg2();
        let a = bg.letter(1).unwrap();
        assert_eq!(bg.star_of(ExprId::ZERO).unwrap(), ExprId::ONE);
        assert_eq!(bg.star_of(ExprId::ONE).unwrap(), ExprId::ONE);
        let s = bg.star_of(a).unwrap();
        assert_eq!(bg.node(s), &Node::Star(a));
        assert_eq!(bg.star_of(s).unwrap(), s);
    }

    #[test]
    fn normalize_identifies_kleene_equal_texts() {
        let mut bg = bg2();
        assert_eq!(ex(&mut bg, "(a + b) + c"), ex(&mut bg, "c + (b + a)"));
        assert_eq!(ex(&mut bg, "1*"), ExprId::ONE);
        assert_eq!(ex(&mut bg, "a\\a"), ExprId::ZERO);
        assert_eq!(ex(&mut bg, "(ab)c"), ex(&mut bg, "a(bc)"));
        assert_eq!(ex(&mut bg, "a + 0 + a1"), ex(&mut bg, "a"));
        assert_eq!(ex(&mut bg, "(a**)*"), ex(&mut bg, "a*"));
        assert_eq!(ex(&mut bg, "a & a"), ex(&mut bg, "a"));
        assert_eq!(ex(&mut bg, "b ^ b"), ExprId::ZERO);
        assert_eq!(ex(&mut bg, "a & 0"), ExprId::ZERO);
        assert_eq!(ex(&mut bg, "a & b"), ex(&mut bg, "b & a"));
        assert_ne!(ex(&mut bg, "a\\b"), ex(&mut bg, "b\\a"));
    }

    #[test]
    fn rep_elects_shortest_then_oldest() {
        let mut bg = bg2();
        let x = ex(&mut bg, "a*");
        let y = ex(&mut bg, "(a + aa)*");
        assert_eq!(bg.rep(y), y);
        bg.merge_now(y, x);
        assert_eq!(bg.rep(y), x);
        let r = bg.rep(y);
        assert_eq!(bg.rep(r), x);

        // Equal sizes: the smaller identifier wins whatever the merge order.
        for swap in [false, true] {
            let mut bg = bg2();
            let p = ex(&mut bg, "ab");
            let q = ex(&mut bg, "ba");
            let (u, v) = if swap { (q, p) } else { (p, q) };
            bg.merge_now(u, v);
            assert_eq!(bg.rep(p), p.min(q));
            assert_eq!(bg.rep(q), p.min(q));
        }

        let mut bg = bg2();
        let e = ex(&mut bg, "a");
        bg.merge(e, e);
        assert!(!bg.has_pending_merges());
    }

    #[test]
    fn extended_never_wins_election() {
        let mut bg = bg2();
        let d = ex(&mut bg, "a \\ b");
        let long = ex(&mut bg, "a + aa0 + (a + a)");
        bg.merge_now(d, long);
        assert_eq!(bg.rep(d), long);
    }

    #[test]
    fn register_equation_interns() {
        let mut bg = Background::new(1000);
        bg.ensure_alphabet(2).unwrap();
        let e = ex(&mut bg, "(a + b)*");
        let eq = bg.register_equation(e, &[ExprId::ONE, e, e]).unwrap();
        let again = bg.register_equation(e, &[ExprId::ONE, e, e]).unwrap();
        assert_eq!(eq, again);
        assert_eq!(bg.equation_count(), 1);
        assert_eq!(bg.equation_cells(eq), &[ExprId::ONE, e, e]);
        bg.check_invariants().unwrap();
        assert_eq!(
            bg.register_equation(e, &[ExprId::ONE, e]),
            Err(Error::RowLength { got: 2, expected: 3 })
        );
        assert_eq!(bg.register_equation(e, &[e, e, e]), Err(Error::BadConstant));
    }

    #[test]
    fn equal_rows_merge_left_parts() {
        let mut bg = Background::new(1000);
        bg.ensure_alphabet(2).unwrap();
        let x = ex(&mut bg, "((a + b)a*)*");
        let y = ex(&mut bg, "(a + b)*");
        bg.register_equation(x, &[ExprId::ONE, x, x]).unwrap();
        // Same shape of row after renaming y's self references to x.
        bg.register_equation(y, &[ExprId::ONE, x, x]).unwrap();
        assert_eq!(bg.rep(x), y);
        assert_eq!(bg.equation_count(), 1);
        let eq = bg.equation_of(y).unwrap();
        assert_eq!(bg.equation_cells(eq), &[ExprId::ONE, y, y]);
        bg.check_invariants().unwrap();
    }

    #[test]
    fn merging_cascades_through_rows() {
        let mut bg = Background::new(1000);
        bg.ensure_alphabet(1).unwrap();
        // p = 1 + a.q, q = 1 + a.p, r = 1 + a.r
        let p = ex(&mut bg, "(aa)*(1 + a)");
        let q = ex(&mut bg, "(1 + a)(aa)*");
        let r = ex(&mut bg, "a*");
        bg.register_equation(p, &[ExprId::ONE, q]).unwrap();
        bg.register_equation(q, &[ExprId::ONE, p]).unwrap();
        bg.register_equation(r, &[ExprId::ONE, r]).unwrap();
        assert_eq!(bg.equation_count(), 3);
        bg.merge_now(p, r);
        // p's row becomes [1, q] for class {p, r}; q's row becomes [1, r].
        // Collisions propagate until one equation is left.
        assert_eq!(bg.rep(q), r);
        assert_eq!(bg.equation_count(), 1);
        bg.check_invariants().unwrap();
    }

    #[test]
    fn gc_reclaims_unrooted() {
        let mut bg = bg2();
        let keep = ex(&mut bg, "(a + b)*c");
        let before = bg.live_count();
        let report = bg.gc(&[keep]);
        assert_eq!(report.reclaimed, 0);
        assert_eq!(bg.live_count(), before);

        let garbage: Vec<ExprId> = (0..10)
            .map(|i| {
                let t = format!("{}(a + b)c*", "ab".repeat(i + 1));
                ex(&mut bg, &t)
            })
            .collect();
        assert!(garbage.iter().all(|&g| bg.is_live(g)));
        let live = bg.live_count();
        let report = bg.gc(&[keep]);
        assert!(report.reclaimed >= 10);
        assert_eq!(bg.live_count(), live - report.reclaimed);
        assert!(bg.is_live(keep));
        assert_eq!(bg.counters().gc, 2);
        bg.check_invariants().unwrap();

        // Freed nodes can be interned again.
        let again = ex(&mut bg, "ab(a + b)c*");
        assert!(bg.is_live(again));
        assert_eq!(bg.size(again), 10);
        bg.check_invariants().unwrap();
    }

    #[test]
    fn gc_keeps_equations_and_degraded_drops_them() {
        let mut bg = Background::new(1000);
        bg.ensure_alphabet(2).unwrap();
        let e = ex(&mut bg, "(a + b)*");
        let f = ex(&mut bg, "a*");
        bg.register_equation(e, &[ExprId::ONE, e, e]).unwrap();
        bg.register_equation(f, &[ExprId::ONE, f, ExprId::ZERO]).unwrap();
        bg.register_equation(ExprId::ZERO, &[ExprId::ZERO; 3]).unwrap();
        bg.gc(&[]);
        assert!(bg.is_live(e) && bg.is_live(f));
        assert_eq!(bg.equation_count(), 3);

        let report = bg.gc_degraded(&[f]);
        assert_eq!(report.dropped_equations, 1);
        assert!(!bg.is_live(e));
        assert!(bg.is_live(f));
        assert_eq!(bg.counters().gc_failed, 1);
        assert_eq!(bg.counters().gc, 2);
        bg.check_invariants().unwrap();
    }

    #[test]
    fn arena_full_is_reported() {
        let mut bg = Background::new(6);
        bg.ensure_alphabet(2).unwrap();
        let (raw, map) = parse("(ab)*(ba)*").unwrap();
        assert!(matches!(
            bg.normalize_expr(&raw, &map),
            Err(Error::ArenaFull { capacity: 6 })
        ));
    }

    #[test]
    fn widening_alphabet_pads_rows() {
        let mut bg = Background::new(1000);
        bg.ensure_alphabet(1).unwrap();
        let a = bg.letter(1).unwrap();
        let s = bg.star_of(a).unwrap();
        bg.register_equation(s, &[ExprId::ONE, s]).unwrap();
        bg.ensure_alphabet(3).unwrap();
        let eq = bg.equation_of(s).unwrap();
        assert_eq!(bg.equation_cells(eq), &[ExprId::ONE, s, ExprId::ZERO, ExprId::ZERO]);
        bg.check_invariants().unwrap();
    }
}
