#ifndef CUSPEC_ERROR_HPP
#define CUSPEC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cuspec {

enum class ErrorKind {
    DisconnectedGraph,
    NonpositiveMeasure,
    SelfLoop,
    NegativeWeight,
    UnknownVertex,
    NotAnEdge,
    DuplicateVertex,
    DuplicateEdge,
    NotACycle,
    HolonomyMismatch,
    IrrationalFlux,
    EmptyIndexSet,
    BadParameters,
    PotentialGraphMismatch,
    NonHermitian,
    DimensionMismatch,
    NotThroughIProduct,
    TrivialFiberHolonomy,
    NotSplittable,
    WrongWeights,
    ZeroFiberEigenvalue,
    NonregularFiber,
    NoBracket,
    BadTargetFunction,
    ArithmeticOverflow,
    BadDocument,
};

const char* to_string(ErrorKind kind) noexcept;

/// All library failures are reported through this exception; `kind()` names
/// the contract that was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace cuspec

#endif
