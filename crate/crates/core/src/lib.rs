//! Smooth sequences over the odd alphabet {1, 3}.
//!
//! The crate covers the whole computational pipeline around bi-infinite
//! smooth sequences:
//!
//! * [`sequences`]: run decomposition, the run-length derivative on finite
//!   windows, column sequences, integration and left extension.
//! * [`recoding`]: the `{A,B,C,D}` recoding, elementary blocks, the induced
//!   derivative and the alignment counting function.
//! * [`typesub`]: types, the substitutions `phi_0`/`phi_1` (and their
//!   `{alpha,beta}` generalisation), S-adic reconstruction and a canonical
//!   element of every `Y_tau`.
//! * [`freq`]: the contracting homographies, exact letter and pattern
//!   frequencies, minimality, plus Perron and empirical oracles.
//! * [`fractal`]: IFS approximation of the set of attainable frequencies.
//! * [`verify`]: the invariant suite behind `smoothkit verify`.
//!
//! Every finite window is a [`PointedWord`]: a word indexed by an integer
//! interval containing the origin, together with how far its edges are known
//! to be run boundaries.

pub mod error;
pub mod fractal;
pub mod freq;
pub mod par;
pub mod recoding;
pub mod sequences;
pub mod typesub;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use par::Exec;
pub use recoding::{RecSymbol, RecWord};
pub use sequences::{PointedWord13, Symbol13};
pub use typesub::{AlphabetParams, TypeBit, TypeSpec};
pub use word::{Closure, PointedWord};
