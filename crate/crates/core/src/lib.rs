//! Exact computation on finite lattice presentations of measurable spaces:
//! coverage closure, frame and sublocale calculus, inner measures, and
//! dyadic geometry, all in integer and rational arithmetic.

pub mod dyadic;
pub mod frame;
pub mod gen;
pub mod inner;
pub mod order;
pub mod rat;
pub mod site;
pub mod valuation;

pub use dyadic::{
    shear_bracket, standard_set_site, svc_stage, Dyadic, DyadicCube, DyadicError, ShearBracket,
    ShearSpec, StandardSet, SvcStage,
};
pub use frame::{
    extend_morphism, is_dense_map, FiniteFrame, FrameError, FrameMap, SublocaleClass,
    SublocaleFrame, SublocaleSet,
};
pub use gen::{
    case_rng, random_lattice, random_mu_site, random_standard_set, random_standard_set_dim,
    random_valuation, GenError, Sampled,
};
pub use inner::{
    basis_reextension_check, coin_site, exhaustion, fat_cantor, finite_part_roundtrip, inner_frame,
    inner_frame_capped, is_almost_boolean, is_almost_disconnected, quotient_invariance_check,
    theorem_equivalence_check, theorem_equivalence_check_capped, verify_no_complement,
    AlmostBooleanVerdict, CoinStage, EquivalenceReport, Grading, InnerError, InnerLocaleReport,
    OutcomeSet, RoundtripReport,
};
pub use order::{downset_closure, DownSet, ElemSet, ElementId, FiniteLattice, LatticeError};
pub use rat::{Rat, RatError};
pub use site::{
    all_sheaves, all_sheaves_capped, enumerate_points, enumerate_points_capped, is_cover,
    principal_sheaf, sheafify, Coverage, CoverageSpec, IdealSet, PointFilter, SiteError,
    SitePresentation,
};
pub use valuation::{
    check_valuation, glue_measures, pullback_valuation, pushforward_measure,
    quotient_by_congruence, DownsetValuation, LatticeHom, QuotientResult, Valuation,
    ValuationError,
};
