//! The simplification driver.
//!
//! Every distinct sub-expression of the normalized input is processed once,
//! shortest first, so that by the time an expression is reached its direct
//! sub-expressions already have their best known representatives:
//!
//! 1. pre-simplify: rebuild from the representatives of the children;
//! 2. eliminate `\`, `&` and `^` by solving the derivative automaton;
//! 3. compute a complete equation set;
//! 4. run the configured passes (`r` minimize, `s` rules, `S` solve,
//!    `f` factorize).
//!
//! Unless `n` is given, all equations are minimized together at the end and
//! the result is factorized once more.

use std::fmt;
use std::str::FromStr;

use crate::background::{Background, ExprId, DEFAULT_CAPACITY};
use crate::derivatives::{complete_equations, includes};
use crate::error::{Error, Result};
use crate::minimize::{moore, separate_all};
use crate::rewriter::Rewriter;
use crate::solver::{eliminate_extended, solve_system, SolveBudget, System};
use crate::syntax::{parse, print, AlphabetMap, RawExpr};

/// Which passes run, as a set of algorithm letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PipelineConfig {
    /// `n`: skip the final global minimization and factorization.
    pub no_finale: bool,
    /// `f`
    pub factorize: bool,
    /// `r`
    pub minimize: bool,
    /// `s`
    pub rules: bool,
    /// `S`
    pub solve: bool,
    /// Overrides the solver's depth limit.
    pub solve_depth: Option<usize>,
    /// Overrides the solver's size cap.
    pub solve_cap: Option<usize>,
}

impl PipelineConfig {
    /// Parses a string of algorithm letters such as `"rsS"`. The empty
    /// string is the derivatives-only configuration with the final pass.
    pub fn parse(letters: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for c in letters.chars() {
            match c {
                'n' => cfg.no_finale = true,
                'f' => cfg.factorize = true,
                'r' => cfg.minimize = true,
                's' => cfg.rules = true,
                'S' => cfg.solve = true,
                'a' => return Err(Error::ReservedAlgorithm),
                c => return Err(Error::UnknownAlgorithm(c)),
            }
        }
        Ok(cfg)
    }
}

impl FromStr for PipelineConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PipelineConfig::parse(s)
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (on, c) in [
            (self.no_finale, 'n'),
            (self.factorize, 'f'),
            (self.minimize, 'r'),
            (self.rules, 's'),
            (self.solve, 'S'),
        ] {
            if on {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// Rebuilds `e` from the representatives of its direct sub-expressions.
pub fn pre_simplify(bg: &mut Background, e: ExprId) -> Result<ExprId> {
    let children = bg.node(e).children();
    if children.is_empty() {
        return Ok(e);
    }
    let reps: Vec<ExprId> = children.iter().map(|&c| bg.rep(c)).collect();
    if reps == children {
        return Ok(e);
    }
    bg.rebuild(e, &reps)
}

/// A background plus the passes to run on it. Expressions simplified by
/// one `Simplifier` share everything the background has learned.
#[derive(Debug)]
pub struct Simplifier {
    bg: Background,
    rewriter: Rewriter,
    cfg: PipelineConfig,
}

impl Simplifier {
    pub fn new(cfg: PipelineConfig) -> Self {
        Self::with_capacity(cfg, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(cfg: PipelineConfig, capacity: usize) -> Self {
        Simplifier {
            bg: Background::new(capacity),
            rewriter: Rewriter::new(),
            cfg,
        }
    }

    pub fn config(&self) -> PipelineConfig {
        self.cfg
    }

    pub fn background(&self) -> &Background {
        &self.bg
    }

    pub fn background_mut(&mut self) -> &mut Background {
        &mut self.bg
    }

    /// Parses, simplifies and prints `text` in its own letters.
    pub fn simplify_text(&mut self, text: &str) -> Result<String> {
        let (raw, map) = parse(text)?;
        let e = self.simplify_raw(&raw, &map)?;
        print(e, &self.bg, &map)
    }

    /// Interns `raw`, garbage-collecting once if the arena is full.
    pub fn intern(&mut self, raw: &RawExpr, map: &AlphabetMap) -> Result<ExprId> {
        match self.bg.normalize_expr(raw, map) {
            Err(Error::ArenaFull { .. }) => {
                self.collect(&[]);
                self.bg.normalize_expr(raw, map)
            }
            other => other,
        }
    }

    /// Simplifies `raw` and returns the representative of the result.
    pub fn simplify_raw(&mut self, raw: &RawExpr, map: &AlphabetMap) -> Result<ExprId> {
        let root = self.intern(raw, map)?;
        self.simplify_id(root)
    }

    /// Simplifies an interned expression.
    pub fn simplify_id(&mut self, root: ExprId) -> Result<ExprId> {
        let mut stack: Vec<ExprId> = self
            .bg
            .subexpressions(root)
            .into_iter()
            .filter(|&e| self.bg.size(e) > 1)
            .collect();
        // Shortest on top; the stack pops from the end.
        stack.sort_by_key(|&e| std::cmp::Reverse((self.bg.size(e), e)));

        let mut collected = false;
        let mut degraded = false;
        while let Some(&e) = stack.last() {
            let step = if degraded {
                pre_simplify(&mut self.bg, e).map(|p| self.bg.merge_now(e, p))
            } else {
                self.process(e)
            };
            match step {
                Ok(()) => {
                    stack.pop();
                    collected = false;
                }
                Err(Error::ArenaFull { .. }) => {
                    let mut roots = stack.clone();
                    roots.push(root);
                    if degraded {
                        // Nothing more can be done for this entry.
                        stack.pop();
                    } else if !collected {
                        self.collect(&roots);
                        collected = true;
                    } else {
                        self.rewriter.clear();
                        self.bg.gc_degraded(&roots);
                        degraded = true;
                    }
                }
                Err(err) => return Err(err),
            }
        }

        if !self.cfg.no_finale && !degraded {
            match self.finale(root) {
                Ok(()) | Err(Error::ArenaFull { .. }) => {}
                Err(err) => return Err(err),
            }
        }
        self.bg.normalize_background();
        Ok(self.bg.rep(root))
    }

    fn collect(&mut self, roots: &[ExprId]) {
        self.rewriter.clear();
        self.bg.gc(roots);
    }

    fn process(&mut self, e: ExprId) -> Result<()> {
        let bg = &mut self.bg;
        let p = pre_simplify(bg, e)?;
        if p != e {
            bg.merge_now(e, p);
        }
        let mut x = bg.rep(e);
        if bg.is_extended(x) {
            x = eliminate_extended(bg, x)?;
        }
        let eqs = complete_equations(bg, x)?;
        if self.cfg.minimize {
            moore(bg, &eqs)?;
        }
        if self.cfg.rules {
            let r = bg.rep(x);
            self.rewriter.simplify(bg, r)?;
        }
        if self.cfg.solve {
            let r = bg.rep(x);
            let system = System::from_background(bg, r)?;
            let current = bg.rep(r);
            let mut budget = SolveBudget::for_system(&system, bg.size(current));
            if let Some(d) = self.cfg.solve_depth {
                budget.max_depth = d;
            }
            if let Some(c) = self.cfg.solve_cap {
                budget.size_cap = c;
            }
            solve_system(bg, &system, r, budget)?;
        }
        if self.cfg.factorize {
            let r = bg.rep(x);
            self.rewriter.factorize(bg, r)?;
        }
        Ok(())
    }

    fn finale(&mut self, root: ExprId) -> Result<()> {
        separate_all(&mut self.bg)?;
        // Representatives met earlier may have shortened since.
        self.rewriter.clear_factorized();
        let r = self.bg.rep(root);
        self.rewriter.factorize(&mut self.bg, r)?;
        Ok(())
    }

    /// Parses two expressions over one alphabet.
    fn parse_pair(
        &mut self,
        t1: &str,
        t2: &str,
    ) -> Result<(ExprId, ExprId, AlphabetMap)> {
        let (r1, mut map) = parse(t1)?;
        let (r2, _) = parse(t2)?;
        map.extend_with(&r2);
        let e1 = self.intern(&r1, &map)?;
        let e2 = self.intern(&r2, &map)?;
        Ok((e1, e2, map))
    }

    /// True iff both expressions denote the same language: their symmetric
    /// difference simplifies to `0`.
    pub fn check_equiv(&mut self, t1: &str, t2: &str) -> Result<bool> {
        let (e1, e2, _) = self.parse_pair(t1, t2)?;
        let d = self.bg.symdiff_of(e1, e2)?;
        Ok(self.simplify_id(d)? == ExprId::ZERO)
    }

    /// True iff the language of `t1` is included in that of `t2`.
    pub fn check_include(&mut self, t1: &str, t2: &str) -> Result<bool> {
        let (e1, e2, _) = self.parse_pair(t1, t2)?;
        includes(&mut self.bg, e1, e2)
    }

    /// Simplified text of `t1 \ t2`.
    pub fn check_diff(&mut self, t1: &str, t2: &str) -> Result<String> {
        let (e1, e2, map) = self.parse_pair(t1, t2)?;
        let d = self.bg.diff_of(e1, e2)?;
        let r = self.simplify_id(d)?;
        print(r, &self.bg, &map)
    }
}

/// Simplifies one expression on a fresh background.
pub fn simplify(text: &str, cfg: PipelineConfig) -> Result<String> {
    Simplifier::new(cfg).simplify_text(text)
}
