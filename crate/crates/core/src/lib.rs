//! Blueprints, their finite spectra, rank spaces and Weyl extensions of
//! Tits-Weyl models, with sampling oracles over fields and semirings.

pub mod blueprint;
pub mod error;
pub mod field;
pub mod catalog;
pub mod lattice;
pub mod oracle;
pub mod relations;
pub mod semiring;
pub mod spectrum;
pub mod tits;

pub use blueprint::{mk_free, tensor, Entailment, FormalSum, GenSet, Monomial, Presentation, Relation};
pub use error::{Error, Result};
pub use field::{normalize, potential_characteristics, CharSet, Characteristics, NormalFormBlueField};
pub use oracle::{
    builtin_family, compare_with_spectrum, parse_family, realizable_patterns, realizable_patterns_charts,
    verify_witnesses, FieldKind, OracleConfig, ParamFamily, PatternReport, SpectrumComparison,
};
pub use semiring::{
    closure_check, hom_count, identity, is_point, matrix_to_json, multiply, parse_matrix, sample_point, Boolean, Integers, Naturals, PointMatrix, Semiring,
    Tropical, ZMod,
};
pub use spectrum::{
    closed_subscheme, enumerate_primes, enumerate_primes_brute, export_dot, is_prime, residue_field, sobriety_check, sobriety_check_brute, spectrum, FiniteSpace, DEFAULT_CAP,
    PrimePoint, SpectrumPoset,
};
pub use catalog::{
    from_selector,
    Cell, Comultiplication, Expected, GroupModel, GroupTable, IdentitySource, MatrixLayout, RankFilter, SemidirectData,
    TensorTerm,
};
pub use tits::{
    analyze_point, find_isomorphism, induced_weyl_law, model_rank_space, model_rank_space_from, permutation_sign, product_check, pseudo_hopf_points,
    rank_space, rank_space_with, symmetric_group, tits_points, HopfPoint, HopfStatus, ProductReport, RankSpace, RankSpacePoint,
    TitsPoint, TitsPoints, WeylMonoid,
};
