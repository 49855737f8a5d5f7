use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    /// The rate pair sits exactly on a branch boundary of the closed forms.
    #[error(
        "rate targets sit on the branch boundary {condition} (theta_b = {theta_b}, theta_th = {theta_th}); \
         perturb r_th_f by 1e-9 to pick a side"
    )]
    BoundaryEquality {
        condition: &'static str,
        theta_b: f64,
        theta_th: f64,
    },

    #[error("threshold {0} is undefined for these rate targets")]
    UndefinedThreshold(&'static str),

    #[error("integration interval [{lower}, {upper}] is empty or reversed")]
    EmptyInterval { lower: f64, upper: f64 },

    #[error("integrand pole at y = {pole} lies inside the integration domain starting at {lower}")]
    PoleInDomain { pole: f64, lower: f64 },

    #[error("adaptive quadrature did not reach tolerance (estimate {value}, error {error})")]
    QuadratureNonConvergence { value: f64, error: f64 },

    #[error("term {term} = {value} left [-{slack}, 1 + {slack}]")]
    NumericalHealth {
        term: &'static str,
        value: f64,
        slack: f64,
    },
}
