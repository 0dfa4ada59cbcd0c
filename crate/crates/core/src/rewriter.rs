//! Inclusion-checked rewriting and factorization.
//!
//! Rules only propose candidates; a candidate is accepted when it is
//! strictly shorter and the inclusion test confirms it denotes the same
//! language. Accepted rewrites are merged into the background.

use rustc_hash::FxHashMap;

use crate::background::{Background, ExprId, Node};
use crate::derivatives::includes;
use crate::error::Result;

/// Largest number of covering candidates tried for one union.
pub const MAX_COVER_CANDIDATES: usize = 16;

/// Unions wider than this are not searched for redundant members or
/// factorizations.
const MAX_UNION_WIDTH: usize = 64;

/// Unions wider than this are not searched for members made redundant by
/// their context in a concatenation.
const MAX_CONTEXT_MEMBERS: usize = 8;

/// Rule application with memoization across calls. The memo holds
/// identifiers, so it must be cleared whenever the background collects
/// garbage.
#[derive(Debug, Default)]
pub struct Rewriter {
    simplified: FxHashMap<ExprId, ExprId>,
    factorized: FxHashMap<ExprId, ExprId>,
}

impl Rewriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.simplified.clear();
        self.factorized.clear();
    }

    /// Forgets factorization results only.
    pub fn clear_factorized(&mut self) {
        self.factorized.clear();
    }

    /// Applies the rewriting rules innermost-first until none applies.
    pub fn simplify(&mut self, bg: &mut Background, e: ExprId) -> Result<ExprId> {
        bg.normalize_background();
        let r = bg.rep(e);
        if let Some(&done) = self.simplified.get(&r) {
            return Ok(bg.rep(done));
        }
        if bg.is_extended(r) {
            return Ok(r);
        }
        let children = bg.node(r).children();
        let mut rebuilt = Vec::with_capacity(children.len());
        for &c in &children {
            rebuilt.push(self.simplify(bg, c)?);
        }
        let mut cur = r;
        if rebuilt != children {
            let n = bg.rebuild(r, &rebuilt)?;
            bg.merge_now(r, n);
            cur = bg.rep(r);
        }
        while let Some(next) = rules_at(bg, cur)? {
            bg.merge_now(cur, next);
            let s = self.simplify(bg, next)?;
            cur = bg.rep(s);
        }
        let out = bg.rep(cur);
        self.simplified.insert(r, out);
        self.simplified.insert(out, out);
        Ok(out)
    }

    /// Groups union members on shared leading or trailing factors, inside
    /// out, keeping a grouping only when it shortens the expression.
    pub fn factorize(&mut self, bg: &mut Background, e: ExprId) -> Result<ExprId> {
        bg.normalize_background();
        let r = bg.rep(e);
        if let Some(&done) = self.factorized.get(&r) {
            return Ok(bg.rep(done));
        }
        if bg.is_extended(r) {
            return Ok(r);
        }
        let children = bg.node(r).children();
        let mut rebuilt = Vec::with_capacity(children.len());
        for &c in &children {
            rebuilt.push(self.factorize(bg, c)?);
        }
        let mut cur = if rebuilt != children {
            bg.rebuild(r, &rebuilt)?
        } else {
            r
        };
        if let Node::Union(ms) = bg.node(cur) {
            let ms = ms.to_vec();
            if ms.len() <= MAX_UNION_WIDTH {
                let f = factor_union(bg, ms, 0)?;
                if bg.size(f) < bg.size(cur) {
                    cur = f;
                }
            }
        }
        if cur != r {
            bg.merge_now(r, cur);
        }
        let out = bg.rep(r);
        self.factorized.insert(r, out);
        self.factorized.insert(out, out);
        Ok(out)
    }
}

/// [`Rewriter::simplify`] with a fresh memo.
pub fn simplify_rules(bg: &mut Background, e: ExprId) -> Result<ExprId> {
    Rewriter::new().simplify(bg, e)
}

/// [`Rewriter::factorize`] with a fresh memo.
pub fn factorize(bg: &mut Background, e: ExprId) -> Result<ExprId> {
    Rewriter::new().factorize(bg, e)
}

fn core(bg: &Background, e: ExprId) -> ExprId {
    match bg.node(e) {
        Node::Star(f) => *f,
        _ => e,
    }
}

fn same_language(bg: &mut Background, a: ExprId, b: ExprId) -> Result<bool> {
    Ok(includes(bg, a, b)? && includes(bg, b, a)?)
}

/// First rule that yields a strictly shorter equivalent of `e`.
fn rules_at(bg: &mut Background, e: ExprId) -> Result<Option<ExprId>> {
    match bg.node(e).clone() {
        Node::Union(ms) => {
            if let Some(x) = union_redundancy(bg, &ms)? {
                return Ok(Some(x));
            }
            if let Some(x) = member_weakening(bg, e, &ms)? {
                return Ok(Some(x));
            }
            union_covering(bg, e, &ms)
        }
        Node::Star(f) => {
            if let Some(x) = star_flattening(bg, e, f)? {
                return Ok(Some(x));
            }
            star_redundancy(bg, f)
        }
        Node::Concat(..) => concat_decomposition(bg, e),
        _ => Ok(None),
    }
}

/// Members ordered longest first, so the costliest ones are tried first.
fn by_size_desc(bg: &Background, ms: &[ExprId]) -> Vec<ExprId> {
    let mut v = ms.to_vec();
    v.sort_by_key(|&m| (std::cmp::Reverse(bg.size(m)), m));
    v
}

/// Drops members included in the union of the others.
fn union_redundancy(bg: &mut Background, ms: &[ExprId]) -> Result<Option<ExprId>> {
    if ms.len() > MAX_UNION_WIDTH {
        return Ok(None);
    }
    let mut kept: Vec<ExprId> = ms.to_vec();
    let mut changed = false;
    for m in by_size_desc(bg, ms) {
        let others: Vec<ExprId> = kept.iter().copied().filter(|&x| x != m).collect();
        let rest = bg.union_many(&others)?;
        if includes(bg, m, rest)? {
            kept = others;
            changed = true;
        }
    }
    if !changed {
        return Ok(None);
    }
    Ok(Some(bg.union_many(&kept)?))
}

/// Removes `1` from a factor `(1 + G)` of a member when the words lost are
/// covered by the rest of the union.
fn member_weakening(bg: &mut Background, e: ExprId, ms: &[ExprId]) -> Result<Option<ExprId>> {
    if ms.len() > MAX_UNION_WIDTH {
        return Ok(None);
    }
    for (j, &m) in ms.iter().enumerate() {
        if !matches!(bg.node(m), Node::Concat(..)) {
            continue;
        }
        let fs = bg.factors(m);
        for i in 0..fs.len() {
            let Node::Union(us) = bg.node(fs[i]) else {
                continue;
            };
            if us[0] != ExprId::ONE {
                continue;
            }
            let rest = us[1..].to_vec();
            let mut weak = fs.clone();
            weak[i] = bg.union_many(&rest)?;
            let weak = bg.concat_many(&weak)?;
            let mut members = ms.to_vec();
            members[j] = weak;
            let cand = bg.union_many(&members)?;
            if bg.size(cand) < bg.size(e) && includes(bg, e, cand)? {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

/// Looks for a short expression covering the whole union.
fn union_covering(bg: &mut Background, e: ExprId, ms: &[ExprId]) -> Result<Option<ExprId>> {
    let size = bg.size(e);
    let mut pool: Vec<ExprId> = Vec::new();
    let cores: Vec<ExprId> = ms.iter().map(|&m| core(bg, m)).collect();
    let u = bg.union_many(&cores)?;
    pool.push(bg.star_of(u)?);
    if bg.nullable(e) {
        pool.push(bg.full_language()?);
    }
    for &c in cores.iter().take(MAX_COVER_CANDIDATES - pool.len()) {
        pool.push(bg.star_of(c)?);
    }
    pool.retain(|&c| bg.size(c) < size);
    pool.sort_by_key(|&c| (bg.size(c), c));
    pool.dedup();
    for c in pool {
        if same_language(bg, e, c)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// `(X + Y*)* = (X + Y)*`, `(X + Y*Z*)* = (X + Y + Z)*` and, more generally,
/// a product of nullable factors under a star may be replaced by the union
/// of the factors.
fn star_flattening(bg: &mut Background, e: ExprId, f: ExprId) -> Result<Option<ExprId>> {
    let mut members = Vec::new();
    let mut changed = false;
    for m in bg.members(f) {
        match bg.node(m).clone() {
            Node::Star(g) => {
                members.push(g);
                changed = true;
            }
            Node::Concat(..) if bg.nullable(m) => {
                for g in bg.factors(m) {
                    members.push(core(bg, g));
                }
                changed = true;
            }
            Node::One => changed = true,
            _ => members.push(m),
        }
    }
    if !changed {
        return Ok(None);
    }
    let u = bg.union_many(&members)?;
    let cand = bg.star_of(u)?;
    if bg.size(cand) < bg.size(e) && same_language(bg, e, cand)? {
        return Ok(Some(cand));
    }
    Ok(None)
}

/// Drops members of a starred union that the star of the others covers.
fn star_redundancy(bg: &mut Background, f: ExprId) -> Result<Option<ExprId>> {
    let ms = bg.members(f);
    if ms.len() < 2 || ms.len() > MAX_UNION_WIDTH {
        return Ok(None);
    }
    let mut kept = ms.clone();
    let mut changed = false;
    for m in by_size_desc(bg, &ms) {
        let others: Vec<ExprId> = kept.iter().copied().filter(|&x| x != m).collect();
        let rest = bg.union_many(&others)?;
        let s = bg.star_of(rest)?;
        if includes(bg, m, s)? {
            kept = others;
            changed = true;
        }
    }
    if !changed {
        return Ok(None);
    }
    let u = bg.union_many(&kept)?;
    Ok(Some(bg.star_of(u)?))
}

/// Drops superfluous nullable factors and shortens adjacent pairs.
fn concat_decomposition(bg: &mut Background, e: ExprId) -> Result<Option<ExprId>> {
    let fs = bg.factors(e);
    let size = bg.size(e);
    // Removing a nullable factor can only shrink the language, so one
    // inclusion suffices.
    for i in 0..fs.len() {
        if !bg.nullable(fs[i]) {
            continue;
        }
        let mut rest = fs.clone();
        rest.remove(i);
        let cand = bg.concat_many(&rest)?;
        if includes(bg, e, cand)? {
            return Ok(Some(cand));
        }
    }
    // A union factor, starred or not, may have members that the rest of
    // the concatenation makes redundant. Dropping one only shrinks the
    // language.
    for i in 0..fs.len() {
        let (body, starred) = match bg.node(fs[i]) {
            Node::Star(g) => (*g, true),
            _ => (fs[i], false),
        };
        let ms = bg.members(body);
        if ms.len() < 2 || ms.len() > MAX_CONTEXT_MEMBERS {
            continue;
        }
        for &m in &ms {
            let others: Vec<ExprId> = ms.iter().copied().filter(|&x| x != m).collect();
            let mut f = bg.union_many(&others)?;
            if starred {
                f = bg.star_of(f)?;
            }
            let mut out = fs.clone();
            out[i] = f;
            let cand = bg.concat_many(&out)?;
            if bg.size(cand) < size && includes(bg, e, cand)? {
                return Ok(Some(cand));
            }
        }
    }
    for i in 0..fs.len().saturating_sub(1) {
        let (x, y) = (fs[i], fs[i + 1]);
        let pair = bg.concat_of(x, y)?;
        let mut pool = Vec::new();
        if bg.nullable(x) && bg.nullable(y) {
            let (cx, cy) = (core(bg, x), core(bg, y));
            let u = bg.union_of(cx, cy)?;
            pool.push(bg.star_of(u)?);
        }
        let r = bg.rep(pair);
        if r != pair {
            pool.push(r);
        }
        for cand in pool {
            if bg.size(cand) >= bg.size(pair) || !same_language(bg, pair, cand)? {
                continue;
            }
            let mut out = fs[..i].to_vec();
            out.push(cand);
            out.extend_from_slice(&fs[i + 2..]);
            let whole = bg.concat_many(&out)?;
            if bg.size(whole) < size {
                return Ok(Some(whole));
            }
        }
    }
    Ok(None)
}

/// Best grouping of `members` found greedily. Depth bounds the recursion
/// into grouped remainders.
fn factor_union(bg: &mut Background, members: Vec<ExprId>, depth: usize) -> Result<ExprId> {
    let mut members = members;
    let mut best = bg.union_many(&members)?;
    if depth > 8 {
        return Ok(best);
    }
    loop {
        let mut improved: Option<(ExprId, Vec<ExprId>)> = None;
        for from_tail in [false, true] {
            let mut groups: Vec<(ExprId, Vec<usize>)> = Vec::new();
            for (i, &m) in members.iter().enumerate() {
                let fs = bg.factors(m);
                let key = if from_tail { fs[fs.len() - 1] } else { fs[0] };
                match groups.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, v)) => v.push(i),
                    None => groups.push((key, vec![i])),
                }
            }
            for (key, idx) in groups {
                if idx.len() < 2 {
                    continue;
                }
                let mut rems = Vec::with_capacity(idx.len());
                for &i in &idx {
                    let fs = bg.factors(members[i]);
                    let rem = if from_tail {
                        bg.concat_many(&fs[..fs.len() - 1])?
                    } else {
                        bg.concat_many(&fs[1..])?
                    };
                    rems.push(rem);
                }
                let mut inner = factor_union(bg, rems, depth + 1)?;
                let known = bg.rep(inner);
                if bg.size(known) < bg.size(inner) {
                    inner = known;
                }
                let grouped = if from_tail {
                    bg.concat_of(inner, key)?
                } else {
                    bg.concat_of(key, inner)?
                };
                let mut next: Vec<ExprId> = members
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !idx.contains(i))
                    .map(|(_, &m)| m)
                    .collect();
                next.push(grouped);
                let cand = bg.union_many(&next)?;
                let better = match &improved {
                    Some((b, _)) => bg.size(cand) < bg.size(*b),
                    None => bg.size(cand) < bg.size(best),
                };
                if better {
                    improved = Some((cand, next));
                }
            }
        }
        match improved {
            Some((cand, next)) => {
                best = cand;
                members = next;
            }
            None => return Ok(best),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, print, AlphabetMap};

    fn setup(k: usize) -> (Background, AlphabetMap) {
        let mut bg = Background::new(100_000);
        bg.ensure_alphabet(k).unwrap();
        (bg, AlphabetMap::from_letters("abcd".chars().take(k)))
    }

    fn ex(bg: &mut Background, map: &AlphabetMap, text: &str) -> ExprId {
        let (raw, _) = parse(text).unwrap();
        bg.normalize_expr(&raw, map).unwrap()
    }

    fn simp(text: &str) -> String {
        let (mut bg, map) = setup(3);
        let e = ex(&mut bg, &map, text);
        let r = simplify_rules(&mut bg, e).unwrap();
        bg.check_invariants().unwrap();
        print(r, &bg, &map).unwrap()
    }

    fn size_of_simp(text: &str) -> usize {
        let (mut bg, map) = setup(3);
        let e = ex(&mut bg, &map, text);
        let r = simplify_rules(&mut bg, e).unwrap();
        bg.size(r)
    }

    fn fact(text: &str) -> String {
        let (mut bg, map) = setup(3);
        let e = ex(&mut bg, &map, text);
        let r = factorize(&mut bg, e).unwrap();
        print(r, &bg, &map).unwrap()
    }

    #[test]
    fn union_redundancy_rule() {
        assert_eq!(simp("a + (a + b)*"), "(a + b)*");
        assert_eq!(simp("ab + a(b + c)"), "a(b + c)");
    }

    #[test]
    fn under_star_rules() {
        assert_eq!(simp("(a + aa)*"), "a*");
        assert_eq!(simp("(ab*)*"), "(ab*)*");
        assert_eq!(simp("(a + b*)*"), "(a + b)*");
        assert_eq!(simp("(c + a*b*)*"), "(a + b + c)*");
    }

    #[test]
    fn concat_rules() {
        assert_eq!(simp("a*a*"), "a*");
        assert_eq!(simp("a*(a + b)*"), "(a + b)*");
    }

    #[test]
    fn weakened_members() {
        assert_eq!(simp("a*b + b(1 + a)"), "a*b + ba");
        assert_eq!(size_of_simp("(a*b + b(1 + a))*b"), 11);
    }

    #[test]
    fn members_redundant_in_context() {
        assert_eq!(simp("b*(b + a*)"), "b*a*");
        assert_eq!(simp("a(a + b)*(b + c)*"), "a(a + b)*(b + c)*");
    }

    #[test]
    fn covering() {
        assert_eq!(simp("1 + a + b(a + b)* + a(a + b)*"), "(a + b)*");
    }

    #[test]
    fn factorization() {
        assert_eq!(fact("ab + ac"), "a(b + c)");
        assert_eq!(fact("ac + bc"), "(a + b)c");
        assert_eq!(fact("a + b"), "a + b");
        let (mut bg, map) = setup(4);
        let e = ex(&mut bg, &map, "(aa + b)a*c(ba*c)*(ba*d + d) + (aa + b)a*d");
        let r = factorize(&mut bg, e).unwrap();
        assert!(bg.size(r) < 38);
    }
}
