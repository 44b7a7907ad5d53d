//! Families of real quadratic fields and the quasi-polynomial behaviour of
//! their partial zeta values in `n`.

pub mod engine;
pub mod poly;
pub mod quasi;
pub mod residue;
pub mod spec;

pub use engine::{FamilyContext, FamilyOptions, FamilyReport, FamilyRow, FitResult, OracleStatus, QuasiResult};
pub use poly::Poly;
pub use quasi::{interpolate, Coeff, Form, QuasiPoly};
pub use residue::{a_im, coeffs_closed, gamma_tau, Bracket, ConstTerm, NuSeq, ResidueData, Variant, CORRECT_VARIANT, VARIANTS};
pub use spec::{FamilySpec, Instance, Sample, PRESET_NAMES};
