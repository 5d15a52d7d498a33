#pragma once
// Error taxonomy for the whole library. Every failure mode callers are
// expected to branch on gets its own type; all of them derive from Error.

#include <stdexcept>

namespace qgt {

/// Base class of all library exceptions.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- input / graph shape ---------------------------------------------------

/// Malformed file, JSON document or spec object.
struct ParseError : Error { using Error::Error; };
/// Graph fails a structural invariant (see validate()).
struct InvalidGraph : Error { using Error::Error; };
/// Graph is not connected in the sense required by the operation.
struct NotConnected : Error { using Error::Error; };
/// Named fixture does not exist.
struct UnknownFixture : Error { using Error::Error; };

// ---- linear algebra --------------------------------------------------------

/// A pivot of the factorization fell below tolerance.
struct SingularMatrix : Error { using Error::Error; };
/// Iterative eigenvalue kernel failed to converge.
struct NoConvergence : Error { using Error::Error; };
/// Generalized eigenproblem needs a positive definite mass matrix.
struct MassNotPositiveDefinite : Error { using Error::Error; };
/// Bracket endpoints do not straddle a sign change.
struct NoSignChange : Error { using Error::Error; };

// ---- torsion / spectra -----------------------------------------------------

/// The vertex system is singular: no torsion function exists.
struct NoTorsion : Error { using Error::Error; };
/// Quadratic form of the test function is not positive.
struct DegenerateForm : Error { using Error::Error; };
/// Smallest eigenvalue is negative where a nonnegative one was required.
struct NegativeGroundState : Error { using Error::Error; };
/// Mesh refinement would exceed the degree-of-freedom cap.
struct BudgetExceeded : Error { using Error::Error; };
/// Achieved accuracy cannot support the requested verdict.
struct InconclusiveAccuracy : Error { using Error::Error; };

// ---- surgery ---------------------------------------------------------------

/// lengthen() requires a strictly larger length.
struct NotLonger : Error { using Error::Error; };
/// scale() requires a strictly positive factor.
struct NonPositiveScale : Error { using Error::Error; };
/// Operation needs two distinct vertices.
struct SameVertex : Error { using Error::Error; };
/// Operation is defined for delta vertices only.
struct DirichletUnsupported : Error { using Error::Error; };
/// Surgery would disconnect the graph.
struct Disconnects : Error { using Error::Error; };
/// cut() side strengths must sum to the original strength.
struct StrengthMismatch : Error { using Error::Error; };
/// Edge-end bookkeeping of a spec does not match the graph.
struct BadAttachment : Error { using Error::Error; };
/// unfold() targets must be pendant edges at the given vertex.
struct NotPendant : Error { using Error::Error; };

// ---- bounds ----------------------------------------------------------------

/// Inequality hypothesis (sign pattern, nonzero strength, ...) is violated.
struct HypothesisViolated : Error { using Error::Error; };
/// Bound applies to doubly connected (bridgeless) graphs only.
struct NotDoublyConnected : Error { using Error::Error; };

}  // namespace qgt
