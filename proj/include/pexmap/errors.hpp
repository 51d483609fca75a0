#ifndef PEXMAP_ERRORS_HPP
#define PEXMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pexmap {

// Perturbed map leaves the invariant interval (t outside the admissible range).
struct DomainEscape : std::runtime_error {
  explicit DomainEscape(const std::string& msg) : std::runtime_error(msg) {}
};

// Critical orbit passes too close to the critical point.
struct NearCriticalOrbit : std::runtime_error {
  explicit NearCriticalOrbit(const std::string& msg) : std::runtime_error(msg) {}
};

struct CodeNotRealizable : std::runtime_error {
  explicit CodeNotRealizable(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularSystem : std::runtime_error {
  explicit SingularSystem(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnsupportedInput : std::runtime_error {
  explicit UnsupportedInput(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotMarkov : std::runtime_error {
  explicit NotMarkov(const std::string& msg) : std::runtime_error(msg) {}
};

// The weighted total jump does not vanish where the construction requires it.
struct NonzeroJump : std::runtime_error {
  explicit NonzeroJump(const std::string& msg) : std::runtime_error(msg) {}
};

// Resolvent argument fails the zero-mean consistency check.
struct NonZeroMean : std::runtime_error {
  explicit NonZeroMean(const std::string& msg) : std::runtime_error(msg) {}
};

struct ObservableNotC1 : std::runtime_error {
  explicit ObservableNotC1(const std::string& msg) : std::runtime_error(msg) {}
};

struct FitUnstable : std::runtime_error {
  explicit FitUnstable(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResidueNonzero : std::runtime_error {
  explicit ResidueNonzero(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pexmap

#endif
