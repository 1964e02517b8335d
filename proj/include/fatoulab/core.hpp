#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fatoulab {

using Complex = std::complex<double>;
using ComplexList = std::vector<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline const Complex kI{0.0, 1.0};

/// Escape threshold for orbits; anything beyond is treated as having left every compact set.
inline constexpr double kOverflowModulus = 1e150;

// ---------------------------------------------------------------------------
// Errors. Every failure the library reports derives from Error; the kind()
// string is what the CLI prints in its summary line.

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define FATOULAB_ERROR(Name, Base)                                   \
  class Name : public Base {                                         \
   public:                                                           \
    explicit Name(const std::string& what) : Base(what) {}           \
    const char* kind() const noexcept override { return #Name; }     \
  };

/// Bad input: malformed specs, violated preconditions on arguments.
FATOULAB_ERROR(InputError, Error)
FATOULAB_ERROR(ParseError, InputError)
FATOULAB_ERROR(DomainError, InputError)
FATOULAB_ERROR(PoleError, Error)
FATOULAB_ERROR(MeshTooCoarse, Error)
FATOULAB_ERROR(DegenerateError, Error)
FATOULAB_ERROR(NotFixed, InputError)
FATOULAB_ERROR(WrongClass, InputError)
FATOULAB_ERROR(NotSelfMap, InputError)
FATOULAB_ERROR(BranchAmbiguity, Error)
FATOULAB_ERROR(BoundaryZero, Error)
FATOULAB_ERROR(InjectivityViolation, Error)

/// Search/iteration outcomes that are legitimate "no answer within budget" results.
FATOULAB_ERROR(SearchFailure, Error)
FATOULAB_ERROR(NotFound, SearchFailure)
FATOULAB_ERROR(NoConvergence, SearchFailure)
FATOULAB_ERROR(ConvergenceNotObserved, SearchFailure)

#undef FATOULAB_ERROR

/// Orbit left the representable range at a given step.
class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, int step, ComplexList partial = {})
      : Error(what), step_(step), partial_(std::move(partial)) {}
  const char* kind() const noexcept override { return "Overflow"; }
  int step() const noexcept { return step_; }
  const ComplexList& partial() const noexcept { return partial_; }

 private:
  int step_;
  ComplexList partial_;
};

class WeightVanishes : public Error {
 public:
  WeightVanishes(Complex z, int k)
      : Error("weight vanishes on the orbit of " + std::to_string(z.real()) + "+" +
              std::to_string(z.imag()) + "i at step " + std::to_string(k)),
        z_(z),
        k_(k) {}
  const char* kind() const noexcept override { return "WeightVanishes"; }
  Complex point() const noexcept { return z_; }
  int step() const noexcept { return k_; }

 private:
  Complex z_;
  int k_;
};

}  // namespace fatoulab
