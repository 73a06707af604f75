#pragma once

#include <stdexcept>
#include <string>

namespace wh {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonIntegrableKernel : Error { using Error::Error; };
struct MomentDiverges : Error { using Error::Error; };
struct UnresolvedOscillation : Error { using Error::Error; };
struct CaseMismatch : Error { using Error::Error; };
struct VanishingSymbol : Error { using Error::Error; };
struct UnderResolved : Error { using Error::Error; };
struct IndexMismatch : Error { using Error::Error; };
struct NotInSpace : Error { using Error::Error; };
struct AllModesDropped : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

}  // namespace wh
