//! Moore's partition refinement over sets of equations.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::background::{Background, EqId, ExprId};
use crate::derivatives::{complete_equations, includes, reachable_equations};
use crate::error::{Error, Result};

/// Coarsest partition of states compatible with `accepting` and stable under
/// the successor function. `succ[i][x]` is the state reached from `i` by
/// letter `x`. Block numbers are assigned in order of first appearance.
pub fn partition(accepting: &[bool], succ: &[Vec<usize>]) -> Vec<usize> {
    let n = accepting.len();
    let mut block: Vec<usize> = accepting.iter().map(|&a| a as usize).collect();
    let mut count = renumber(&mut block);
    loop {
        let mut ids: FxHashMap<Vec<usize>, usize> = FxHashMap::default();
        let mut next = vec![0; n];
        for i in 0..n {
            let mut sig = Vec::with_capacity(succ[i].len() + 1);
            sig.push(block[i]);
            sig.extend(succ[i].iter().map(|&j| block[j]));
            let fresh = ids.len();
            next[i] = *ids.entry(sig).or_insert(fresh);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

fn renumber(block: &mut [usize]) -> usize {
    let mut ids: FxHashMap<usize, usize> = FxHashMap::default();
    for b in block.iter_mut() {
        let fresh = ids.len();
        *b = *ids.entry(*b).or_insert(fresh);
    }
    ids.len()
}

/// Result of a minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MooreOutcome {
    /// Number of language-distinct classes among the equations.
    pub blocks: usize,
    /// Merges queued (states that were not alone in their block).
    pub merges: usize,
}

/// Minimizes a complete set of equations: left parts in one block denote the
/// same language and are merged in the background.
pub fn moore(bg: &mut Background, eqs: &[EqId]) -> Result<MooreOutcome> {
    bg.normalize_background();
    let mut index: FxHashMap<ExprId, usize> = FxHashMap::default();
    let mut lhs = Vec::with_capacity(eqs.len());
    for &eq in eqs {
        let l = bg.equation_lhs(eq);
        if index.insert(l, lhs.len()).is_none() {
            lhs.push(l);
        }
    }
    let mut accepting = Vec::with_capacity(lhs.len());
    let mut succ = Vec::with_capacity(lhs.len());
    for &l in &lhs {
        let eq = bg.equation_of(l).ok_or(Error::NoEquation(l))?;
        let cells = bg.equation_cells(eq);
        accepting.push(cells[0] == ExprId::ONE);
        let mut row = Vec::with_capacity(cells.len() - 1);
        for &c in &cells[1..] {
            row.push(*index.get(&c).ok_or(Error::Incomplete(c))?);
        }
        succ.push(row);
    }
    let block = partition(&accepting, &succ);
    let blocks = block.iter().copied().max().map_or(0, |m| m + 1);
    let mut first: Vec<Option<ExprId>> = vec![None; blocks];
    let mut merges = 0;
    for (i, &b) in block.iter().enumerate() {
        match first[b] {
            None => first[b] = Some(lhs[i]),
            Some(f) => {
                bg.merge(f, lhs[i]);
                merges += 1;
            }
        }
    }
    bg.normalize_background();
    Ok(MooreOutcome { blocks, merges })
}

/// Largest subset of the background's equations that is closed: every
/// cell of every member is the left part of a member.
pub fn closed_equations(bg: &mut Background) -> Vec<EqId> {
    bg.normalize_background();
    let mut alive: FxHashSet<ExprId> = bg
        .equations()
        .into_iter()
        .map(|eq| bg.equation_lhs(eq))
        .collect();
    loop {
        let before = alive.len();
        let dead: Vec<ExprId> = alive
            .iter()
            .copied()
            .filter(|&l| {
                let eq = bg.equation_of(l).expect("equation");
                bg.equation_cells(eq)[1..].iter().any(|c| !alive.contains(c))
            })
            .collect();
        for d in dead {
            alive.remove(&d);
        }
        if alive.len() == before {
            break;
        }
    }
    let mut out: Vec<EqId> = alive
        .into_iter()
        .map(|l| bg.equation_of(l).expect("equation"))
        .collect();
    out.sort_unstable();
    out
}

/// Merges every pair of equation-owning representatives that denote the
/// same language. Equations of incomplete closures are left out.
pub fn separate_all(bg: &mut Background) -> Result<MooreOutcome> {
    let eqs = closed_equations(bg);
    moore(bg, &eqs)
}

/// Decides language equality. A positive answer is recorded in the
/// background so that later queries are answered by comparing
/// representatives.
pub fn equivalent(bg: &mut Background, e1: ExprId, e2: ExprId) -> Result<bool> {
    bg.normalize_background();
    if bg.rep(e1) == bg.rep(e2) {
        return Ok(true);
    }
    if bg.is_extended(bg.find(e1)) || bg.is_extended(bg.find(e2)) {
        let same = includes(bg, e1, e2)? && includes(bg, e2, e1)?;
        if same {
            bg.merge_now(e1, e2);
        }
        return Ok(same);
    }
    complete_equations(bg, e1)?;
    complete_equations(bg, e2)?;
    // The second closure may have renamed equations of the first one.
    let (a, _) = reachable_equations(bg, e1);
    let (b, _) = reachable_equations(bg, e2);
    let mut all = a;
    all.extend(b);
    all.sort_unstable();
    all.dedup();
    moore(bg, &all)?;
    Ok(bg.rep(e1) == bg.rep(e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, AlphabetMap};

    fn setup(k: usize) -> (Background, AlphabetMap) {
        let mut bg = Background::new(100_000);
        bg.ensure_alphabet(k).unwrap();
        (bg, AlphabetMap::from_letters("abc".chars().take(k)))
    }

    fn ex(bg: &mut Background, map: &AlphabetMap, text: &str) -> ExprId {
        let (raw, _) = parse(text).unwrap();
        bg.normalize_expr(&raw, map).unwrap()
    }

    #[test]
    fn partition_refines() {
        // 0 -> 1 -> 2 -> 2, only 2 accepting; 3 behaves like 0.
        let acc = [false, false, true, false];
        let succ = vec![vec![1], vec![2], vec![2], vec![1]];
        let b = partition(&acc, &succ);
        assert_eq!(b[0], b[3]);
        assert_ne!(b[0], b[1]);
        assert_ne!(b[1], b[2]);
    }

    #[test]
    fn conway_example_minimizes_to_one_equation() {
        let (mut bg, map) = setup(2);
        let e = ex(&mut bg, &map, "(ab*a + ba*b)*(1 + ab* + ba*)");
        let eqs = complete_equations(&mut bg, e).unwrap();
        let out = moore(&mut bg, &eqs).unwrap();
        assert_eq!(out.blocks, 1);
        let eq = bg.equation_of(bg.find(e)).unwrap();
        let r = bg.find(e);
        assert_eq!(bg.equation_cells(eq), &[ExprId::ONE, r, r]);
        bg.check_invariants().unwrap();
    }

    #[test]
    fn self_loop_is_already_minimal() {
        let (mut bg, map) = setup(2);
        let e = ex(&mut bg, &map, "(a + b)*");
        let eqs = complete_equations(&mut bg, e).unwrap();
        let out = moore(&mut bg, &eqs).unwrap();
        assert_eq!(out, MooreOutcome { blocks: 1, merges: 0 });
    }

    #[test]
    fn incomplete_set_is_rejected() {
        let (mut bg, map) = setup(2);
        let e = ex(&mut bg, &map, "ab");
        complete_equations(&mut bg, e).unwrap();
        let eq = bg.equation_of(e).unwrap();
        assert!(matches!(moore(&mut bg, &[eq]), Err(Error::Incomplete(_))));
    }

    #[test]
    fn equivalence_queries() {
        let (mut bg, map) = setup(3);
        let l = ex(&mut bg, &map, "c* + c*a(b + c*a)*c*");
        let r = ex(&mut bg, &map, "(c + ab*)*");
        assert!(equivalent(&mut bg, l, r).unwrap());
        assert_eq!(bg.rep(l), r);
        assert!(equivalent(&mut bg, l, l).unwrap());
        let a = ex(&mut bg, &map, "a");
        let b = ex(&mut bg, &map, "b");
        assert!(!equivalent(&mut bg, a, b).unwrap());
        bg.check_invariants().unwrap();
    }

    #[test]
    fn separate_all_is_idempotent() {
        let (mut bg, _) = setup(2);
        assert_eq!(separate_all(&mut bg).unwrap().merges, 0);
        let map = AlphabetMap::from_letters(['a', 'b']);
        for t in ["(a + b)*", "(a*b*)*", "a*(ba*)*", "ab", "a(b + 0)"] {
            let e = ex(&mut bg, &map, t);
            complete_equations(&mut bg, e).unwrap();
        }
        separate_all(&mut bg).unwrap();
        assert_eq!(separate_all(&mut bg).unwrap().merges, 0);
        let x = ex(&mut bg, &map, "(a*b*)*");
        let y = ex(&mut bg, &map, "a*(ba*)*");
        assert_eq!(bg.rep(x), bg.rep(y));
        bg.check_invariants().unwrap();
    }
}
