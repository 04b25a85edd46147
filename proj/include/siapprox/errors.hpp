#pragma once

#include <stdexcept>
#include <string>

namespace sia {

// Every library failure derives from Error so the CLI can map it to an exit code.
// InputError means the caller handed us something malformed (exit 2); everything
// else is a numerical or mathematical failure (exit 3).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error("InputError", what) {}
};

#define SIA_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

SIA_DEFINE_ERROR(DimensionMismatch)
SIA_DEFINE_ERROR(BaseMismatch)
SIA_DEFINE_ERROR(NonRemovableSingularity)
SIA_DEFINE_ERROR(DegreeExhausted)
SIA_DEFINE_ERROR(NotExact)
SIA_DEFINE_ERROR(DegenerateDirections)
SIA_DEFINE_ERROR(PreconditionFailed)
SIA_DEFINE_ERROR(InconclusiveAtDegree)
SIA_DEFINE_ERROR(NullPencil)
SIA_DEFINE_ERROR(AnnulusDegenerate)
SIA_DEFINE_ERROR(ZeroSolutionOnly)
SIA_DEFINE_ERROR(SingularExtension)
SIA_DEFINE_ERROR(AssumptionViolated)
SIA_DEFINE_ERROR(DegenerateSymbol)

#undef SIA_DEFINE_ERROR

}  // namespace sia
