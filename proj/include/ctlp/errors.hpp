#pragma once

#include <stdexcept>

namespace ctlp {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AsymmetricInput : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InsufficientQuadrature : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct NonFiniteState : Error { using Error::Error; };
struct RiccatiBlowup : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct SingularR : Error { using Error::Error; };
struct TooFewRows : Error { using Error::Error; };
struct Blowup : Error { using Error::Error; };
struct HorizonTooShort : Error { using Error::Error; };
struct BadWindow : Error { using Error::Error; };
struct DivergentCost : Error { using Error::Error; };
struct Misconfiguration : Error { using Error::Error; };

}  // namespace ctlp
