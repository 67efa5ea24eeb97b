//! Exact arithmetic in the cyclotomic ring Z[ζ_p], iteration of the
//! unicritical map φ_p(z) = (z − 1)^p + 2 − ζ_p, and machine-checkable
//! certificates that the iterated Galois groups of φ_p are the full iterated
//! wreath products [C_p]^n.
//!
//! The crate is organised bottom-up:
//!
//! - [`prime`]: the validated odd prime `p` and word-sized modular helpers.
//! - [`cyclotomic`]: elements of Z[ζ_p] ([`CycInt`]), ring operations, Galois
//!   conjugation, the absolute norm and the valuation at 𝔭 = (1 − ζ_p).
//! - [`resultant`]: integer polynomial resultants, used by the norm.
//! - [`dynamics`]: φ_p as a polynomial, point and symbolic iteration, and the
//!   structural checks (Eisenstein shape, fixed point, orbit congruence).
//! - [`congruence`]: the norm congruence N(φ_p^n(1)) ≡ 2^p − 1 (mod p²) and the
//!   Wieferich characterisation.
//! - [`factor`]: primality and seeded factoring with honest partial results.
//! - [`certificate`]: per-level witnesses and the `wreath-cert/1` document.

pub mod certificate;
pub mod congruence;
pub mod cyclotomic;
mod decimal;
pub mod dynamics;
pub mod factor;
pub mod prime;
pub mod resultant;

pub use certificate::{
    build_certificate, group_order, level_witness, verify_certificate, LevelRecord,
    LevelStatus, MaximalityCertificate, Verdict,
};
pub use cyclotomic::{ArithmeticError, CycInt, CyclotomicRing, Valuation, MAX_RING_PRIME};
pub use dynamics::{CycPoly, SizeLimits};
pub use factor::{FactorConfig, Factorization};
pub use prime::OddPrime;
