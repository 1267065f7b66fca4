//! Decision procedures for the cyclicity of the unramified Iwasawa module of
//! the maximal multiple `Z_p`-extension of an imaginary quadratic field.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function over immutable values; file formats, the analysis pipeline and
//! the command-line surface live in the `iwasawa-cyc` companion crate.
//!
//! Module map:
//!
//! * [`padic`]: truncated arithmetic in `Z_p` and its quadratic extensions,
//!   Newton polygons, Hensel lifting and the splitting type of a
//!   distinguished quadratic.
//! * [`linalg`]: 2x2 matrices over `O_E` and over `Z/p^L`, with a Smith
//!   form for the residue case.
//! * [`lambda_class`]: the rank-2 lattices `M(k)` and `N_x`, their Fitting
//!   ideals, the action of `S` on a generator frame, and inference of `k`
//!   from finite-level class-group data.
//! * [`decision`]: generator counts, the four-case cyclicity test, the
//!   valuation reading for `mu_21`/`mu_22`, the sufficient criterion and
//!   the tower criteria used to locate `L_K ∩ K~`.
//! * [`oracle`]: brute-force verifiers over finite quotients.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod decision;
pub mod lambda_class;
pub mod linalg;
pub mod oracle;
pub mod padic;

pub use decision::{Cyclicity, FiredCase, TowerData, Verdict};
pub use lambda_class::{KInference, ModuleClass};
pub use padic::{ExtField, FieldKind, IwasawaPoly, PadicElem, SplitKind, SplittingData, Valuation};
