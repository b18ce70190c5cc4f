//! Generalized transvections `h(x, y) = (x + σ⁻¹(y), y)` and
//! `v(x, y) = (x, y + σ(x))` of the plane for an increasing odd homeomorphism
//! `σ`.
//!
//! * [`sigma`]: the maps `σ` and the transvections themselves.
//! * [`regions`]: the four-cell partition and the subtractive and accelerated
//!   Euclidean algorithms.
//! * [`words`]: words in `h`, `v`, coding of orbits and σ-rational lines.
//! * [`cfrac`]: σ-continued fractions and the golden slope.
//! * [`tower`]: exact arithmetic in towers of real quadratic extensions and
//!   the certified orbit of `(−1 + √2, 2)` for `σ(x) = x|x|`.
//! * [`lines`]: curves `y = a·σ(x)` and the line parameter of an infinite word.
//! * [`experiments`]: lattice counts, density coverage and the discreteness
//!   probe.
//! * [`torus`]: the analogous maps on the torus and Birkhoff averages.

pub mod cfrac;
pub mod experiments;
pub mod lines;
pub mod regions;
pub mod sigma;
pub mod torus;
pub mod tower;
pub mod words;
