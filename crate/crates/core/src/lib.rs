//! Regular expression simplification over a shared background.
//!
//! Expressions are interned in normalized form in a [`Background`], which
//! also stores derivative equations and the language-equivalence classes
//! found so far, each represented by its shortest known member. The
//! [`pipeline`] combines derivative computation, minimization, equation
//! solving, inclusion-checked rewriting and factorization to find short
//! equivalent expressions.
//!
//! ```
//! use regsimp::{simplify, PipelineConfig};
//!
//! let cfg = PipelineConfig::parse("rsS").unwrap();
//! let out = simplify("(ab*a + ba*b)*(1 + ab* + ba*)", cfg).unwrap();
//! assert_eq!(out, "(a + b)*");
//! ```

pub mod background;
pub mod derivatives;
pub mod error;
pub mod minimize;
pub mod oracle;
pub mod pipeline;
pub mod randgen;
pub mod rewriter;
pub mod solver;
pub mod stats;
pub mod syntax;

pub use background::{Background, ExprId, DEFAULT_CAPACITY};
pub use error::{Error, ParseError, Result};
pub use pipeline::{simplify, PipelineConfig, Simplifier};
pub use syntax::{parse, print, AlphabetMap, RawExpr};
