//! Tools for studying near-extremizers of Young's convolution inequality
//! `<f1 * f2, f3> <= ||f1||_p1 ||f2||_p2 ||f3||_p3` on discrete groups.
//!
//! Groups are `ℤ^d`, free groups and (as a torsion counterexample) cyclic
//! groups, all written additively. Functions are finitely supported maps
//! ([`SparseFunction`]); the modules cover norms and dyadic layers, the
//! trilinear form and its Hölder reduction, uniform-convexity machinery,
//! Hausdorff–Young on the torus, and ascent-based extremizer search.

pub mod error;
pub mod function;
pub mod group;
pub mod hausdorff_young;
pub mod output;
pub mod sample;
pub mod search;
pub mod stability;
pub mod young;

pub use error::{Error, Result};
pub use function::{
    kappa_select, layer_decompose, lorentz_norm, lp_norm, pointwise_power, translate, LorentzMethod, Mode,
    SparseFunction,
};
pub use group::{kemperman_margin, nfold_sumset, sumset, FiniteSubset, GroupDescriptor, GroupElement, Word};
pub use hausdorff_young::{hy_norm, hy_ratio, QuadratureConfig};
pub use search::{
    alternating_ascent, curve_scan, doubling_scan, interval_example, torsion_control, ExperimentRecord, ParamValue,
    SearchConfig,
};
pub use stability::{clarkson_gap, concentration, convexity_partition};
pub use young::{reduce_triple, trilinear_form, young_ratio, ExponentTriple};
