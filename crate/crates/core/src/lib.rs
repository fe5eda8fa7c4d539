//! Exact enumeration of lozenge tilings of hexagons with fern intrusions,
//! the product formulas that count them, and verification harnesses that
//! compare the two on parameter grids.
//!
//! - [`lattice`]: regions on the triangular lattice and their builders.
//! - [`poly`]: Laurent polynomials in `q` and unreduced big fractions.
//! - [`oracle`]: formula-free counting (row sweep, backtracking, Kuo checks).
//! - [`formulas`]: hyperfactorial product formulas and weight exponents.
//! - [`schur`]: Schur polynomial evaluations and the axis-dented identity.
//! - [`harness`]: verification suites and the intrusion-position scan.
//! - [`render`]: deterministic SVG pictures of regions and tilings.

pub mod formulas;
pub mod harness;
pub mod lattice;
pub mod oracle;
pub mod poly;
pub mod render;
pub mod schur;

pub use harness::{
    run_suite, scan_intrusion, verify_kuo_and_counts, verify_lemmas, verify_oracle_self,
    verify_q, verify_schur, verify_single_fern, verify_unweighted, HarnessError, PointBank,
    ScanMode, ScanOutcome, ScanRecord, ScanSummary, VerifyReport, SCAN_CSV_HEADER, SUITE_NAMES,
};
pub use render::render_svg;

pub use formulas::{
    d_region_product, hyperfactorial, macmahon_box_product, macmahon_box_shift,
    p_region_product, p_region_product_via_boxes, p_right_lozenges, q_region_product,
    q_region_product_via_boxes, q_right_lozenges, r_region_product, r_right_lozenges, range_sum,
    semihex_product, semihex_wt1_product, volume_shift_p, volume_shift_q, FormulaError, QContext,
    QValue,
};
pub use lattice::{
    boundary_cycles, build_region, remove_forced_lozenges, split_region, Lozenge, LozengeKind,
    Orientation, Region, RegionError, RegionFamily, RegionParams, SplitError, Tiling, TriCoord,
    WeightScheme,
};
pub use oracle::{
    count_tilings, enumerate_tilings, extract_first_tiling, for_each_tiling, kuo_check,
    orientation_census, tiling_weight_exponent, weighted_count, weighted_degree_bound, Census,
    KuoError, KuoReport, KuoVariant, OracleError,
};
pub use poly::QPolynomial;
pub use schur::{
    explore_ratio, lambda_of_set, schur_at_points, schur_principal, verify_schur_identity,
    AxisIdentity, SchurError,
};
