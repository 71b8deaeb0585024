#include "cuspec/error.hpp"

namespace cuspec {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
        case ErrorKind::NonpositiveMeasure: return "NonpositiveMeasure";
        case ErrorKind::SelfLoop: return "SelfLoop";
        case ErrorKind::NegativeWeight: return "NegativeWeight";
        case ErrorKind::UnknownVertex: return "UnknownVertex";
        case ErrorKind::NotAnEdge: return "NotAnEdge";
        case ErrorKind::DuplicateVertex: return "DuplicateVertex";
        case ErrorKind::DuplicateEdge: return "DuplicateEdge";
        case ErrorKind::NotACycle: return "NotACycle";
        case ErrorKind::HolonomyMismatch: return "HolonomyMismatch";
        case ErrorKind::IrrationalFlux: return "IrrationalFlux";
        case ErrorKind::EmptyIndexSet: return "EmptyIndexSet";
        case ErrorKind::BadParameters: return "BadParameters";
        case ErrorKind::PotentialGraphMismatch: return "PotentialGraphMismatch";
        case ErrorKind::NonHermitian: return "NonHermitian";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotThroughIProduct: return "NotThroughIProduct";
        case ErrorKind::TrivialFiberHolonomy: return "TrivialFiberHolonomy";
        case ErrorKind::NotSplittable: return "NotSplittable";
        case ErrorKind::WrongWeights: return "WrongWeights";
        case ErrorKind::ZeroFiberEigenvalue: return "ZeroFiberEigenvalue";
        case ErrorKind::NonregularFiber: return "NonregularFiber";
        case ErrorKind::NoBracket: return "NoBracket";
        case ErrorKind::BadTargetFunction: return "BadTargetFunction";
        case ErrorKind::ArithmeticOverflow: return "ArithmeticOverflow";
        case ErrorKind::BadDocument: return "BadDocument";
    }
    return "Unknown";
}

}  // namespace cuspec
