#pragma once

#include <stdexcept>
#include <string>

namespace helmdef {

enum class ErrorKind {
  AnisotropicSpacing,
  DegenerateDomain,
  TooManyWorkers,
  NotCoarsenable,
  NonPositiveK,
  UncoveredRegion,
  DimensionMismatch,
  MalformedFile,
  NonPositiveVelocity,
  LocationOutsideDomain,
  GridTooLarge,
  StaleHalo,
  ZeroDiagonal,
  IncompatibleFootprints,
  MissingFineContext,
  CompositionMismatch,
  SingularSystem,
  InfeasiblePartition,
  ConfigError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace helmdef
