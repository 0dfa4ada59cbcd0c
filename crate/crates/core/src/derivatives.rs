//! Derivative rows, complete equation sets and the inclusion test.
//!
//! A row for `E` is `[o_E, E_1, ..., E_k]` where `E_i` is the representative
//! of the union of the partial derivatives of `E` by letter `i`. Partial
//! derivatives are accumulated with a suffix: deriving `F` in the context
//! `F.S` pushes `d.S` for every partial derivative `d` of `F`.

use std::collections::VecDeque;

use rustc_hash::FxHashSet;

use crate::background::{Background, EqId, ExprId, Node};
use crate::error::{Error, Result};

/// True iff the empty word belongs to the language of `e`.
pub fn nullable(bg: &Background, e: ExprId) -> bool {
    bg.nullable(e)
}

/// The derivative row of `e`, cells reduced to representatives.
/// Extended expressions are allowed; their rows may hold extended cells.
pub fn derivative_row(bg: &mut Background, e: ExprId) -> Result<Vec<ExprId>> {
    let k = bg.alphabet();
    let mut acc: Vec<Vec<ExprId>> = vec![Vec::new(); k + 1];
    accumulate(bg, e, ExprId::ONE, &mut acc)?;
    let mut row = Vec::with_capacity(k + 1);
    row.push(if bg.nullable(e) { ExprId::ONE } else { ExprId::ZERO });
    for terms in acc.iter_mut().skip(1) {
        for t in terms.iter_mut() {
            *t = bg.rep(*t);
        }
        let u = bg.union_many(terms)?;
        row.push(bg.rep(u));
    }
    Ok(row)
}

fn accumulate(
    bg: &mut Background,
    e: ExprId,
    suffix: ExprId,
    acc: &mut [Vec<ExprId>],
) -> Result<()> {
    match bg.node(e).clone() {
        Node::Zero | Node::One => {}
        Node::Letter(i) => acc[i as usize].push(suffix),
        Node::Union(ms) => {
            for m in ms.iter() {
                accumulate(bg, *m, suffix, acc)?;
            }
        }
        Node::Concat(h, t) => {
            let s = bg.concat_of(t, suffix)?;
            accumulate(bg, h, s, acc)?;
            if bg.nullable(h) {
                accumulate(bg, t, suffix, acc)?;
            }
        }
        Node::Star(f) => {
            let s = bg.concat_of(e, suffix)?;
            accumulate(bg, f, s, acc)?;
        }
        Node::Diff(l, r) | Node::And(l, r) | Node::SymDiff(l, r) => {
            let rl = row_of(bg, l)?;
            let rr = row_of(bg, r)?;
            for i in 1..acc.len() {
                let d = match bg.node(e) {
                    Node::Diff(..) => bg.diff_of(rl[i], rr[i])?,
                    Node::And(..) => bg.and_of(rl[i], rr[i])?,
                    _ => bg.symdiff_of(rl[i], rr[i])?,
                };
                if d != ExprId::ZERO {
                    let t = bg.concat_of(d, suffix)?;
                    acc[i].push(t);
                }
            }
        }
    }
    Ok(())
}

/// Row of the class of `e`: the registered equation of its representative
/// when there is one. Regular rows are computed and registered on demand;
/// extended rows are computed but never registered.
pub fn row_of(bg: &mut Background, e: ExprId) -> Result<Vec<ExprId>> {
    let r = bg.rep(e);
    if let Some(row) = bg.row_of_rep(r) {
        return Ok(row);
    }
    let row = derivative_row(bg, r)?;
    if bg.is_extended(r) {
        return Ok(row);
    }
    let eq = bg.register_equation(r, &row)?;
    Ok(bg.equation_cells(eq).to_vec())
}

/// Equations reachable from `rep(e)`, plus the representatives reached that
/// own no equation yet.
pub fn reachable_equations(bg: &mut Background, e: ExprId) -> (Vec<EqId>, Vec<ExprId>) {
    bg.normalize_background();
    let start = bg.rep(e);
    let mut seen = FxHashSet::default();
    let mut queue = VecDeque::from([start]);
    let mut eqs = Vec::new();
    let mut missing = Vec::new();
    seen.insert(start);
    while let Some(x) = queue.pop_front() {
        let Some(eq) = bg.equation_of(x) else {
            missing.push(x);
            continue;
        };
        eqs.push(eq);
        for &c in &bg.equation_cells(eq)[1..] {
            if seen.insert(c) {
                queue.push_back(c);
            }
        }
    }
    (eqs, missing)
}

/// Computes and registers equations until every expression reachable from
/// `rep(e)` owns one. Returns the complete set. `e` must be regular.
pub fn complete_equations(bg: &mut Background, e: ExprId) -> Result<Vec<EqId>> {
    bg.normalize_background();
    if bg.is_extended(bg.find(e)) {
        return Err(Error::ExtendedInEquation);
    }
    loop {
        let (eqs, missing) = reachable_equations(bg, e);
        if missing.is_empty() {
            return Ok(eqs);
        }
        let mut queue: VecDeque<ExprId> = missing.into();
        let mut seen = FxHashSet::default();
        while let Some(x) = queue.pop_front() {
            let x = bg.rep(x);
            if !seen.insert(x) {
                continue;
            }
            if bg.equation_of(x).is_none() {
                let row = derivative_row(bg, x)?;
                bg.register_equation(x, &row)?;
            }
            let x = bg.rep(x);
            let Some(eq) = bg.equation_of(x) else {
                continue;
            };
            for &c in &bg.equation_cells(eq)[1..] {
                if bg.equation_of(c).is_none() && !seen.contains(&c) {
                    queue.push_back(c);
                }
            }
        }
    }
}

/// Decides `L(e1) ⊆ L(e2)` by exploring pairs of derivatives of `e1` and
/// `e2`, which are the derivatives of `e1 \ e2` without building them.
/// Stops at the first pair where the left side accepts the empty word and
/// the right side does not. Rows of regular expressions met on the way are
/// registered in the background.
pub fn includes(bg: &mut Background, e1: ExprId, e2: ExprId) -> Result<bool> {
    bg.normalize_background();
    let mut seen: FxHashSet<(ExprId, ExprId)> = FxHashSet::default();
    let mut queue = VecDeque::from([(e1, e2)]);
    while let Some((l, r)) = queue.pop_front() {
        let (l, r) = (bg.rep(l), bg.rep(r));
        if l == r || l == ExprId::ZERO {
            continue;
        }
        if bg.nullable(l) && !bg.nullable(r) {
            return Ok(false);
        }
        // A normalized regular expression other than 0 denotes a nonempty
        // language.
        if r == ExprId::ZERO && !bg.is_extended(l) {
            return Ok(false);
        }
        if !seen.insert((l, r)) {
            continue;
        }
        let rl = row_of(bg, l)?;
        let rr = row_of(bg, r)?;
        for i in 1..rl.len() {
            queue.push_back((rl[i], rr[i]));
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, AlphabetMap};

    fn setup(k: usize) -> (Background, AlphabetMap) {
        let mut bg = Background::new(100_000);
        bg.ensure_alphabet(k).unwrap();
        let map = AlphabetMap::from_letters("abcdxy".chars().take(k));
        (bg, map)
    }

    fn ex(bg: &mut Background, map: &AlphabetMap, text: &str) -> ExprId {
        let (raw, _) = parse(text).unwrap();
        bg.normalize_expr(&raw, map).unwrap()
    }

    #[test]
    fn nullability() {
        let (mut bg, map) = setup(2);
        let cases = [
            ("a*", true),
            ("(ab*a + ba*b)*(1 + ab* + ba*)", true),
            ("a\\a", false),
            ("a* \\ b", true),
            ("a* \\ b*", false),
            ("a* ^ b", true),
        ];
        for (text, expected) in cases {
            let e = ex(&mut bg, &map, text);
            assert_eq!(nullable(&bg, e), expected, "{text}");
        }
    }

    #[test]
    fn rows() {
        let (mut bg, map) = setup(2);
        let e = ex(&mut bg, &map, "(a + b)*");
        assert_eq!(derivative_row(&mut bg, e).unwrap(), vec![ExprId::ONE, e, e]);
        let ab = ex(&mut bg, &map, "ab");
        let b = ex(&mut bg, &map, "b");
        assert_eq!(derivative_row(&mut bg, ab).unwrap(), vec![ExprId::ZERO, b, ExprId::ZERO]);
        let d = ex(&mut bg, &map, "(a + b)* \\ a*");
        let row = derivative_row(&mut bg, d).unwrap();
        assert_eq!(row[0], ExprId::ZERO);
        assert_eq!(row[2], e);
    }

    #[test]
    fn conway_example_has_three_states_before_minimizing() {
        let (mut bg, map) = setup(2);
        let e = ex(&mut bg, &map, "(ab*a + ba*b)*(1 + ab* + ba*)");
        let eqs = complete_equations(&mut bg, e).unwrap();
        assert_eq!(eqs.len(), 3);
        bg.check_invariants().unwrap();
    }

    #[test]
    fn complete_sets() {
        let (mut bg, map) = setup(2);
        let e = ex(&mut bg, &map, "(a + b)*");
        let eqs = complete_equations(&mut bg, e).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(bg.equation_cells(eqs[0]), &[ExprId::ONE, e, e]);

        let eqs = complete_equations(&mut bg, ExprId::ZERO).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(bg.equation_cells(eqs[0]), &[ExprId::ZERO; 3]);
    }

    #[test]
    fn appendix_example_collapses_to_one_equation() {
        let (mut bg, map) = setup(2);
        let e = ex(&mut bg, &map, "((a + b)a*)* + (a + b(1 + b)b)aa(1 + a)");
        let eqs = complete_equations(&mut bg, e).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(bg.equation_count(), 1);
        // The short member is a sub-expression, not a derivative: once its
        // own equation is known the classes meet.
        let short = ex(&mut bg, &map, "((a + b)a*)*");
        complete_equations(&mut bg, short).unwrap();
        assert_eq!(bg.rep(e), short);
        assert_eq!(bg.equation_count(), 1);
        bg.check_invariants().unwrap();
    }

    #[test]
    fn inclusion() {
        let (mut bg, map) = setup(2);
        let l = ex(&mut bg, &map, "(a*b)*aaaaaaa*");
        let r = ex(&mut bg, &map, "(a + b)*a(a + b)(a + b)(a + b)(a + b)(a + b)");
        assert!(includes(&mut bg, l, r).unwrap());
        assert!(!includes(&mut bg, r, l).unwrap());
        assert!(includes(&mut bg, l, l).unwrap());
        let a = ex(&mut bg, &map, "a");
        let ab = ex(&mut bg, &map, "a + b");
        assert!(includes(&mut bg, a, ab).unwrap());
        assert!(!includes(&mut bg, ab, a).unwrap());
        assert!(includes(&mut bg, ExprId::ZERO, a).unwrap());
        assert!(!includes(&mut bg, a, ExprId::ZERO).unwrap());
        bg.check_invariants().unwrap();
    }
}
