//! Short expressions from complete equation sets.
//!
//! Equations are read as a linear system whose unknowns are their left
//! parts. A depth-first traversal from the target substitutes successors
//! into each equation; an unknown met again on the current path stays
//! symbolic, and a self-reference `X = A.X + B` is closed with Arden's rule
//! `X = A*.B`. Any unknown may instead be replaced by its representative,
//! which is how the traversal is kept bounded.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::background::{Background, ExprId};
use crate::derivatives::{complete_equations, derivative_row, includes, reachable_equations};
use crate::error::{Error, Result};
use crate::minimize::partition;

/// Visits of unknowns allowed per `solve` call before the remaining ones
/// are replaced by their representatives.
pub const DEFAULT_STEP_BUDGET: usize = 20_000;

/// Inclusion tests tried per unknown when looking for a row split.
const MAX_SPLIT_CANDIDATES: usize = 4;

/// Limits of one traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveBudget {
    /// Longest substitution chain; deeper unknowns use their representative.
    pub max_depth: usize,
    /// Partial solutions larger than this are replaced by the representative.
    pub size_cap: usize,
    pub steps: usize,
}

impl SolveBudget {
    /// Depth of the number of equations, cap of twice the current size.
    pub fn for_system(system: &System, current_size: usize) -> Self {
        SolveBudget {
            max_depth: system.len().max(1),
            size_cap: (2 * current_size).max(8),
            steps: DEFAULT_STEP_BUDGET,
        }
    }
}

/// A closed set of equations `X -> [o_X, X_1, ..., X_k]`.
#[derive(Debug, Clone, Default)]
pub struct System {
    rows: FxHashMap<ExprId, Vec<ExprId>>,
}

impl System {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, lhs: ExprId, row: Vec<ExprId>) {
        self.rows.insert(lhs, row);
    }

    pub fn row(&self, x: ExprId) -> Option<&[ExprId]> {
        self.rows.get(&x).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The complete equation set of a regular expression, as registered in
    /// the background.
    pub fn from_background(bg: &mut Background, e: ExprId) -> Result<Self> {
        complete_equations(bg, e)?;
        let (eqs, _) = reachable_equations(bg, e);
        let mut sys = System::new();
        for eq in eqs {
            sys.insert(bg.equation_lhs(eq), bg.equation_cells(eq).to_vec());
        }
        Ok(sys)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    /// An unknown still on the traversal path.
    Var(ExprId),
    /// A known expression; `Val(1)` holds the constant terms.
    Val(ExprId),
}

/// `Σ coef.key`, keys pairwise distinct.
#[derive(Debug, Clone, Default)]
struct Form {
    terms: Vec<(Key, ExprId)>,
}

impl Form {
    fn value(v: ExprId) -> Self {
        Form {
            terms: if v == ExprId::ZERO {
                Vec::new()
            } else {
                vec![(Key::Val(v), ExprId::ONE)]
            },
        }
    }

    fn add(&mut self, bg: &mut Background, key: Key, coef: ExprId) -> Result<()> {
        if coef == ExprId::ZERO || key == Key::Val(ExprId::ZERO) {
            return Ok(());
        }
        match self.terms.iter_mut().find(|(k, _)| *k == key) {
            Some((_, c)) => *c = bg.union_of(*c, coef)?,
            None => self.terms.push((key, coef)),
        }
        Ok(())
    }

    fn take(&mut self, key: Key) -> Option<ExprId> {
        let i = self.terms.iter().position(|(k, _)| *k == key)?;
        Some(self.terms.remove(i).1)
    }

    fn is_closed(&self) -> bool {
        self.terms.iter().all(|(k, _)| matches!(k, Key::Val(_)))
    }

    fn size(&self, bg: &Background) -> usize {
        let mut n = self.terms.len().saturating_sub(1);
        for &(k, c) in &self.terms {
            let kv = match k {
                Key::Var(v) | Key::Val(v) => v,
            };
            n += bg.size(c) + bg.size(kv) + 1;
        }
        n
    }

    /// The expression denoted by a closed form.
    fn build(&self, bg: &mut Background) -> Result<ExprId> {
        let mut parts = Vec::with_capacity(self.terms.len());
        for &(k, c) in &self.terms {
            let Key::Val(v) = k else {
                unreachable!("building an open form");
            };
            parts.push(bg.concat_of(c, v)?);
        }
        bg.union_many(&parts)
    }
}

struct Traversal<'a> {
    bg: &'a mut Background,
    system: &'a System,
    budget: SolveBudget,
    steps: usize,
    on_path: FxHashSet<ExprId>,
    memo: FxHashMap<ExprId, Form>,
    improvements: Vec<(ExprId, ExprId)>,
}

impl Traversal<'_> {
    /// Replacing `x` by an expression is only possible for plain unknowns:
    /// extended representatives must be eliminated.
    fn actual(&mut self, x: ExprId) -> Option<Form> {
        let r = self.bg.rep(x);
        (!self.bg.is_extended(r)).then(|| Form::value(r))
    }

    fn solve(&mut self, x: ExprId, depth: usize) -> Result<Form> {
        self.solve_from(x, depth, false)
    }

    /// `via_split` is set when `x` was reached through a row split, which
    /// then is not tried again for `x`: a cycle of splits alone would have a
    /// nullable loop coefficient.
    fn solve_from(&mut self, x: ExprId, depth: usize, via_split: bool) -> Result<Form> {
        if x == ExprId::ZERO {
            return Ok(Form::default());
        }
        if let Some(f) = self.memo.get(&x) {
            return Ok(f.clone());
        }
        if self.on_path.contains(&x) {
            return Ok(Form {
                terms: vec![(Key::Var(x), ExprId::ONE)],
            });
        }
        if depth >= self.budget.max_depth || self.steps >= self.budget.steps {
            if let Some(f) = self.actual(x) {
                return Ok(f);
            }
        }
        let Some(row) = self.system.row(x).map(<[ExprId]>::to_vec) else {
            return self.actual(x).ok_or(Error::NoEquation(x));
        };
        self.steps += 1;

        let plain = self.expand(x, &row, depth)?;
        let plain = self.close(x, plain)?;
        let split_with = if via_split || self.steps >= self.budget.steps {
            None
        } else {
            self.split_of(x, &row)?
        };
        let form = match split_with {
            Some(w) => {
                let split = self.expand_split(x, &row, w, depth)?;
                let split = self.close(x, split)?;
                if split.size(self.bg) < plain.size(self.bg) {
                    split
                } else {
                    plain
                }
            }
            _ => plain,
        };
        self.finish(x, form)
    }

    /// Another unknown `w` with `L(w) ⊆ L(x)` sharing at least one letter
    /// cell with `x`, so that `x = w + rest` where `rest` drops the shared
    /// cells. The one sharing most cells wins.
    fn split_of(&mut self, x: ExprId, row: &[ExprId]) -> Result<Option<ExprId>> {
        let mut candidates: Vec<(usize, ExprId)> = Vec::new();
        for (&w, rw) in &self.system.rows {
            if w == x || (rw[0] == ExprId::ONE && row[0] != ExprId::ONE) {
                continue;
            }
            let mut shared = 0;
            let mut fits = true;
            for i in 1..row.len() {
                if rw[i] == ExprId::ZERO {
                    continue;
                }
                if row[i] == ExprId::ZERO {
                    fits = false;
                    break;
                }
                if rw[i] == row[i] {
                    shared += 1;
                }
            }
            if fits && shared > 0 {
                candidates.push((shared, w));
            }
        }
        candidates.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, w) in candidates.into_iter().take(MAX_SPLIT_CANDIDATES) {
            if includes(self.bg, w, x)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    /// Sum of the letter-grouped successors of `cells`, plus 1 when
    /// `nullable`.
    fn expand_cells(
        &mut self,
        nullable: bool,
        cells: &[(usize, ExprId)],
        depth: usize,
        form: &mut Form,
    ) -> Result<()> {
        let mut groups: Vec<(ExprId, Vec<ExprId>)> = Vec::new();
        for &(i, y) in cells {
            if y == ExprId::ZERO {
                continue;
            }
            let letter = self.bg.letter(i as u32)?;
            match groups.iter_mut().find(|(t, _)| *t == y) {
                Some((_, ls)) => ls.push(letter),
                None => groups.push((y, vec![letter])),
            }
        }
        if nullable {
            form.add(self.bg, Key::Val(ExprId::ONE), ExprId::ONE)?;
        }
        for (y, letters) in groups {
            let coef = self.bg.union_many(&letters)?;
            let fy = self.solve(y, depth + 1)?;
            for (k, c) in fy.terms {
                let c = self.bg.concat_of(coef, c)?;
                form.add(self.bg, k, c)?;
            }
        }
        Ok(())
    }

    fn expand(&mut self, x: ExprId, row: &[ExprId], depth: usize) -> Result<Form> {
        let cells: Vec<(usize, ExprId)> = row.iter().copied().enumerate().skip(1).collect();
        let mut form = Form::default();
        self.on_path.insert(x);
        let r = self.expand_cells(row[0] == ExprId::ONE, &cells, depth, &mut form);
        self.on_path.remove(&x);
        r.map(|_| form)
    }

    /// `x = w + Σ letter.cell` over the cells `w` does not share.
    fn expand_split(
        &mut self,
        x: ExprId,
        row: &[ExprId],
        w: ExprId,
        depth: usize,
    ) -> Result<Form> {
        let rw = self.system.rows[&w].clone();
        let cells: Vec<(usize, ExprId)> = (1..row.len())
            .filter(|&i| rw[i] != row[i])
            .map(|i| (i, row[i]))
            .collect();
        let nullable = row[0] == ExprId::ONE && rw[0] != ExprId::ONE;
        let mut form = Form::default();
        self.on_path.insert(x);
        let r = (|| {
            let fw = self.solve_from(w, depth + 1, true)?;
            for (k, c) in fw.terms {
                form.add(self.bg, k, c)?;
            }
            self.expand_cells(nullable, &cells, depth, &mut form)
        })();
        self.on_path.remove(&x);
        r.map(|_| form)
    }

    /// Eliminates the self-reference of `x` from its form.
    fn close(&mut self, x: ExprId, mut form: Form) -> Result<Form> {
        if let Some(loop_coef) = form.take(Key::Var(x)) {
            form = self.arden(loop_coef, form)?;
        }
        Ok(form)
    }

    fn finish(&mut self, x: ExprId, mut form: Form) -> Result<Form> {

        if form.is_closed() {
            let value = form.build(self.bg)?;
            let current = self.bg.rep(x);
            let regular = !self.bg.is_extended(current);
            if regular && self.bg.size(current) <= form.size(self.bg) {
                form = Form::value(current);
            } else if !regular || self.bg.size(value) < self.bg.size(current) {
                self.improvements.push((x, value));
            }
            self.memo.insert(x, form.clone());
        } else if form.size(self.bg) > self.budget.size_cap {
            if let Some(f) = self.actual(x) {
                return Ok(f);
            }
        }
        Ok(form)
    }

    /// Solves `X = loop_coef.X + rest` for `X`.
    fn arden(&mut self, loop_coef: ExprId, rest: Form) -> Result<Form> {
        let star = arden_close(self.bg, loop_coef, ExprId::ONE)?;
        let (closed, open): (Vec<_>, Vec<_>) = rest
            .terms
            .into_iter()
            .partition(|(k, _)| matches!(k, Key::Val(_)));
        let v = Form { terms: closed }.build(self.bg)?;
        let mut out = Form::default();
        if open.is_empty() {
            let x = self.bg.concat_of(star, v)?;
            out.add(self.bg, Key::Val(x), ExprId::ONE)?;
            return Ok(out);
        }
        out.add(self.bg, Key::Val(v), star)?;
        for (k, c) in open {
            let c = self.bg.concat_of(star, c)?;
            out.add(self.bg, k, c)?;
        }
        Ok(out)
    }
}

/// The solution `A*.B` of `X = A.X + B`; `A` must not accept the empty word.
pub fn arden_close(bg: &mut Background, a: ExprId, b: ExprId) -> Result<ExprId> {
    if bg.nullable(a) {
        return Err(Error::NullableCoefficient);
    }
    let s = bg.star_of(a)?;
    bg.concat_of(s, b)
}

/// Solves `system` for `target` and returns the shorter of the solution and
/// the current representative. A strictly shorter solution, and any shorter
/// intermediate solution, is merged into the background.
pub fn solve_system(
    bg: &mut Background,
    system: &System,
    target: ExprId,
    budget: SolveBudget,
) -> Result<ExprId> {
    bg.normalize_background();
    let target = bg.rep(target);
    if system.row(target).is_none() {
        return Err(Error::NoEquation(target));
    }
    let mut t = Traversal {
        bg,
        system,
        budget,
        steps: 0,
        on_path: FxHashSet::default(),
        memo: FxHashMap::default(),
        improvements: Vec::new(),
    };
    let form = t.solve(target, 0)?;
    debug_assert!(form.is_closed());
    let candidate = form.build(t.bg)?;
    let improvements = std::mem::take(&mut t.improvements);
    for (x, v) in improvements {
        bg.merge(x, v);
    }
    bg.merge(target, candidate);
    bg.normalize_background();
    Ok(bg.rep(target))
}

/// Solves the complete equation set of a regular expression.
pub fn solve(bg: &mut Background, target: ExprId) -> Result<ExprId> {
    let system = System::from_background(bg, target)?;
    let current = bg.rep(target);
    let budget = SolveBudget::for_system(&system, bg.size(current));
    solve_system(bg, &system, target, budget)
}

/// Finds a plain regular expression for an extended one: builds its
/// derivative automaton (extended states locally, plain states through the
/// background), minimizes it, solves it and merges the result with `e`.
pub fn eliminate_extended(bg: &mut Background, e: ExprId) -> Result<ExprId> {
    bg.normalize_background();
    let mut local: FxHashMap<ExprId, Vec<ExprId>> = FxHashMap::default();
    let mut pending = vec![bg.rep(e)];
    let system = loop {
        while let Some(x) = pending.pop() {
            let x = bg.rep(x);
            if local.contains_key(&x) {
                continue;
            }
            let row = if bg.is_extended(x) {
                derivative_row(bg, x)?
            } else {
                let eqs = complete_equations(bg, x)?;
                for eq in eqs {
                    let l = bg.equation_lhs(eq);
                    local.insert(l, bg.equation_cells(eq).to_vec());
                }
                continue;
            };
            pending.extend_from_slice(&row[1..]);
            local.insert(x, row);
        }
        // Classes may have merged since rows were recorded.
        let mut sys = System::new();
        for (&x, row) in &local {
            let r = bg.rep(x);
            if sys.row(r).is_some() {
                continue;
            }
            let row = if bg.is_extended(r) {
                row.iter().map(|&c| bg.rep(c)).collect()
            } else {
                match bg.row_of_rep(r) {
                    Some(row) => row,
                    None => {
                        pending.push(r);
                        continue;
                    }
                }
            };
            sys.insert(r, row);
        }
        let mut missing: Vec<ExprId> = sys
            .rows
            .values()
            .flat_map(|row| row[1..].iter().copied())
            .filter(|c| sys.row(*c).is_none())
            .collect();
        missing.sort_unstable();
        missing.dedup();
        if pending.is_empty() && missing.is_empty() {
            break sys;
        }
        for m in missing {
            local.remove(&m);
            pending.push(m);
        }
    };

    let system = minimize_local(bg, system)?;
    let target = bg.rep(e);
    let budget = SolveBudget {
        max_depth: system.len().max(1),
        size_cap: usize::MAX,
        steps: DEFAULT_STEP_BUDGET,
    };
    solve_system(bg, &system, target, budget)?;
    Ok(bg.rep(e))
}

/// Merges language-equal states of a local system and returns the quotient.
fn minimize_local(bg: &mut Background, system: System) -> Result<System> {
    let mut states: Vec<ExprId> = system.rows.keys().copied().collect();
    states.sort_unstable();
    let index: FxHashMap<ExprId, usize> =
        states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let accepting: Vec<bool> = states
        .iter()
        .map(|s| system.rows[s][0] == ExprId::ONE)
        .collect();
    let succ: Vec<Vec<usize>> = states
        .iter()
        .map(|s| system.rows[s][1..].iter().map(|c| index[c]).collect())
        .collect();
    let block = partition(&accepting, &succ);
    let mut first: FxHashMap<usize, ExprId> = FxHashMap::default();
    for (i, &b) in block.iter().enumerate() {
        match first.get(&b) {
            Some(&f) => bg.merge(f, states[i]),
            None => {
                first.insert(b, states[i]);
            }
        }
    }
    bg.normalize_background();
    let mut out = System::new();
    for (&x, row) in &system.rows {
        let r = bg.rep(x);
        if out.row(r).is_some() {
            continue;
        }
        let row = match bg.row_of_rep(r) {
            Some(row) => row,
            None => row.iter().map(|&c| bg.rep(c)).collect(),
        };
        out.insert(r, row);
    }
    Ok(out)
}
