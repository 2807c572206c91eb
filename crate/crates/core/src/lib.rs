//! Planar piecewise smooth vector fields with Filippov semantics.
//!
//! The crate studies fields glued from two smooth planar fields along a
//! switching manifold, with the sliding vector field on segments where both
//! sides point at the manifold. It provides:
//!
//! - classification of on-manifold points (crossing, sliding, escaping,
//!   tangencies with their visibility) in [`field`];
//! - the canonical chain families (finite `k`, their trigonometric infinite
//!   analogue) and the bean field with its transversal section, in
//!   [`canonical`] and [`poly`];
//! - branching trajectories: closed-form arcs, continuation sets at
//!   junctions, branch enumeration, a generic event-locating integrator,
//!   and symbolic synthesis/itineraries, in [`traj`] and [`bean`];
//! - symbolic dynamics (shift spaces, weighted metrics with rigorous tail
//!   bounds, transition matrices, mixing, periodic counts) in [`symbolic`];
//! - the orbit-space metric, orbit normalization and the numerical
//!   verification of the shift conjugacies in [`orbit`];
//! - topological equivalence of chain-shaped fields by skeleton matching in
//!   [`equiv`];
//! - SVG portraits in [`svg`] and shared run configuration in [`config`].

pub mod bean;
pub mod canonical;
pub mod config;
pub mod equiv;
pub mod expr;
pub mod field;
pub mod geom;
pub mod orbit;
pub mod poly;
pub mod svg;
pub mod symbolic;
pub mod traj;

pub use bean::{
    beat_itinerary, beat_times, loop_duration, metric_d_real, return_map, return_time,
    synthesize, BeanError, RealWindow,
};
pub use canonical::{
    bean_lower, bean_upper, compartments, fold_lattice, invariant_set, make_canonical,
    x_successor, y_successor, CanonicalFamily, Compartment, CompartmentPartition, CurveSide,
    FamilyKind, FoldLattice, InvariantSet, BEAN_TANGENCY,
};
pub use config::{ConfigError, RunConfig};
pub use equiv::{
    chain_field_from_profile, extract_skeleton, sample_profile, sigma_equivalence_check,
    EquivError, EquivalenceReport, InvariantSample, Skeleton,
};
pub use expr::{Expr, ExprError};
pub use field::{
    classify_fold, classify_point, lie_derivative, piecewise_from_json, sliding_field,
    FieldError, FoldClass, HalfPlane, PiecewiseField, RegionClass, SmoothField2D,
    SwitchingFunction, Tolerances, TwoFoldKind, Visibility,
};
pub use geom::Point;
pub use orbit::{
    hausdorff_points, hausdorff_polylines, normalize, rho, verify_conjugacy, ArcLengthMap,
    CheckResult, ConjugacyReport, OrbitClass, OrbitError,
};
pub use poly::{differentiate, Pk};
pub use svg::{portrait_svg, PortraitOptions};
pub use symbolic::{
    is_mixing, metric_d, periodic_count, random_admissible_word, sft_matrix,
    theta_inf_admissible, Alphabet, MetricBound, SymbolWindow, SymbolicError, TransitionMatrix,
};
pub use traj::{
    integrate_generic, integrate_until_x, read_csv, time_one, write_csv, Arc as TrajectoryArc,
    ArcGeom, BranchChoice, BranchTree, Engine, Governing, Junction, TrajError, Trajectory,
};
