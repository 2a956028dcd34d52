//! Error type shared by all modules of the library.

/// Convenience alias for results carrying [`Error`].
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of validation, special functions, quadrature, eigenvalue
/// solves, and simulation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A constructor or operation received arguments violating its contract.
    /// The message names the violated constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An argument was NaN or infinite where a finite value is required.
    #[error("non-finite argument to {context}")]
    NonFiniteArgument { context: &'static str },

    /// A result exceeded the representable double-precision range.
    #[error("overflow in {context}")]
    Overflow { context: &'static str },

    /// An integrand evaluated to a non-finite value at a grid node.
    #[error("non-finite integrand value at node {index} (theta = {theta})")]
    NonFiniteSample { index: usize, theta: f64 },

    /// Adaptive refinement hit its cap before reaching tolerance. Carries
    /// the last two iterates for diagnosis.
    #[error("{context} did not converge: last iterates {previous} and {current}")]
    NotConverged {
        context: &'static str,
        previous: f64,
        current: f64,
    },

    /// Root bracketing found no sign change in the search interval.
    #[error("no sign change in [{lo}, {hi}] after {expansions} bracket expansions")]
    BracketingFailure { lo: f64, hi: f64, expansions: usize },

    /// An eigenvalue solve produced no usable eigenvalue.
    #[error("eigenvalue solve failed after {iterations} iterations (last estimate {last})")]
    EigenFailure { iterations: usize, last: f64 },

    /// A simulated path left the finite range.
    #[error("non-finite state at step {step} of path {path}")]
    NonFiniteState { step: u64, path: usize },
}

impl Error {
    /// True when the error reflects invalid input rather than a numerical
    /// failure, so callers can distinguish usage errors from breakdowns.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::NonFiniteArgument { .. }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_classification_separates_input_errors_from_numerical_ones() {
        assert!(Error::InvalidParameter("x".into()).is_usage());
        assert!(Error::NonFiniteArgument { context: "f" }.is_usage());
        assert!(!Error::Overflow { context: "f" }.is_usage());
        assert!(!Error::NonFiniteSample { index: 3, theta: 0.1 }.is_usage());
        assert!(!Error::NotConverged {
            context: "t",
            previous: 1.0,
            current: 2.0
        }
        .is_usage());
    }

    #[test]
    fn messages_name_the_failing_quantity() {
        let err = Error::NonFiniteSample {
            index: 7,
            theta: 0.25,
        };
        let text = err.to_string();
        assert!(
            text.contains("node 7"),
            "error text should carry the node index, got: {text}"
        );
    }
}
