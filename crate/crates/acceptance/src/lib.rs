//! Pinned tolerances for the acceptance target in `tests/acceptance.rs`.

pub mod tol {
    pub const MLF_HALF_VS_ERFC: f64 = 1e-9;
    pub const MLF_MUTUAL: f64 = 1e-8;
    pub const MLF_E1_VS_EXP: f64 = 1e-10;
    pub const MLF_RUNTIME_S: f64 = 5.0;

    pub const OPERATOR_FORM_ABS: f64 = 1e-6;
    pub const OPERATOR_FORM_RUNTIME_S: f64 = 10.0;

    pub const CAPUTO_REL_AMPLITUDE: f64 = 5e-3;
    pub const CAPUTO_ORDER: f64 = 1.5;
    pub const CAPUTO_ORDER_BAND: f64 = 0.2;
    pub const CAPUTO_RUNTIME_S: f64 = 60.0;

    pub const UNITARY_NORM_DRIFT: f64 = 1e-8;
    pub const NONUNITARY_MIN_DEVIATION: f64 = 1e-3;

    pub const COMB_FREE_LIMIT: f64 = 1e-10;
    pub const COMB_GROUP: f64 = 1e-6;
    pub const COMB_PDE_RESIDUAL: f64 = 1e-3;

    pub const POLE_MODULUS_REL: f64 = 1e-6;
    pub const POLES_RUNTIME_S: f64 = 5.0;

    pub const DIVERGENCE_TIME: f64 = 1e-8;
    pub const MOMENT_RATIO_MIN: f64 = 1e3;
    pub const STANDARD_MOMENT_REL: f64 = 1e-10;

    pub const LAPLACE_CONST: f64 = 1e-6;
    pub const LAPLACE_POLY: f64 = 1e-3;
}

/// Criteria whose check is implemented faithfully but cannot be met.
/// The target reports them as FAIL without failing the build.
pub const KNOWN_RED: &[(u8, &str)] = &[(7, "moment_ratio")];
