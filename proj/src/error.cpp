#include "frechet/error.hpp"

namespace frechet {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MixedSpacePoints: return "MixedSpacePoints";
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NearSingularHessian: return "NearSingularHessian";
    case ErrorKind::NearSingularCovariance: return "NearSingularCovariance";
    case ErrorKind::CutLocus: return "CutLocus";
    case ErrorKind::NonUniqueProjection: return "NonUniqueProjection";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::InvalidDescriptor: return "InvalidDescriptor";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace frechet
