//! Synthesis of lasso-precise and approximate implementations from LTL
//! specifications under bounded environments.
//!
//! Given an LTL formula over partitioned input/output propositions, a system
//! size bound `n`, and a lasso bound `k`, the toolkit either synthesizes a
//! transition system of size `n` whose traces satisfy the formula on every
//! input word representable by a lasso of length `k` (via a QBF encoding or
//! exhaustive search), or computes/maximizes the fraction of such input words
//! on which a system satisfies the formula.
//!
//! Letter convention used throughout: a trace letter is a bitmask with the
//! input atoms in the low bits (in declaration order) and the output atoms
//! above them.

pub mod lasso;
pub mod ltl;
pub mod automata;
pub mod specfile;
pub mod tsys;
