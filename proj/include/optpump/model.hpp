#ifndef OPTPUMP_MODEL_HPP
#define OPTPUMP_MODEL_HPP

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "optpump/error.hpp"

namespace optpump {

enum class Boundary { Open, Periodic };
enum class Sector { Ground, Excited };

constexpr const char* to_string(Boundary b) noexcept {
  return b == Boundary::Open ? "obc" : "pbc";
}

// Coupling patterns for the Rabi rates Omega_l.
struct UniformCoupling {
  double rabi = 0.0;
};
struct SqrtCoupling {
  double rabi = 0.0;  // Omega_l = sqrt(l) * rabi
};
struct ShiftedInverseSqrtCoupling {
  double rabi0 = 0.0;  // Omega_l = rabi0 + (rabi - rabi0) / sqrt(l)
  double rabi = 0.0;
};
struct CustomCoupling {
  std::vector<double> values;  // values[l-1] = Omega_l
};

using CouplingPattern =
    std::variant<UniformCoupling, SqrtCoupling, ShiftedInverseSqrtCoupling, CustomCoupling>;

/// Evaluates Omega_l of a pattern at rung l (1-based).
inline double coupling_at(const CouplingPattern& pattern, int l) {
  if (l < 1) throw Error(Errc::OutOfRange, "rung index must be >= 1");
  const double ld = static_cast<double>(l);
  struct Visitor {
    int l;
    double ld;
    double operator()(const UniformCoupling& c) const { return c.rabi; }
    double operator()(const SqrtCoupling& c) const { return std::sqrt(ld) * c.rabi; }
    double operator()(const ShiftedInverseSqrtCoupling& c) const {
      return c.rabi0 + (c.rabi - c.rabi0) / std::sqrt(ld);
    }
    double operator()(const CustomCoupling& c) const {
      if (static_cast<std::size_t>(l) > c.values.size())
        throw Error(Errc::OutOfRange, "custom coupling has no entry for rung " + std::to_string(l));
      return c.values[static_cast<std::size_t>(l - 1)];
    }
  };
  return std::visit(Visitor{l, ld}, pattern);
}

/// Raw, unvalidated model description as read from a config document.
struct ModelConfig {
  int l_max = 2;
  std::vector<double> omega{0.0};  // one entry = uniform shorthand, else length l_max-1
  CouplingPattern rabi = UniformCoupling{0.0};
  double gamma0 = 0.0;
  double gamma1 = 1.0;
  double gamma2 = 0.0;
  Boundary boundary = Boundary::Open;
  std::optional<double> wrap_rabi;  // overrides Omega_{l_max} for the PBC wrap link
  bool pbc_wrap_jumps = false;
};

/// Validated ladder with all patterns expanded to explicit lists.
/// Immutable after construction.
class LadderModel {
 public:
  int l_max() const noexcept { return l_max_; }
  int dim() const noexcept { return 2 * l_max_; }

  /// omega()[l-1] = omega_l, l = 1..l_max-1
  const std::vector<double>& omega() const noexcept { return omega_; }
  /// rabi()[l-1] = Omega_l, l = 1..l_max; the last entry is the PBC wrap link.
  const std::vector<double>& rabi() const noexcept { return rabi_; }

  double gamma0() const noexcept { return gamma0_; }
  double gamma1() const noexcept { return gamma1_; }
  double gamma2() const noexcept { return gamma2_; }
  Boundary boundary() const noexcept { return boundary_; }
  bool pbc_wrap_jumps() const noexcept { return pbc_wrap_jumps_; }
  const ModelConfig& config() const noexcept { return config_; }

  /// True when every omega_l is equal and every Omega_l (wrap included) is equal.
  bool translation_invariant() const noexcept {
    for (double w : omega_)
      if (w != omega_.front()) return false;
    for (double r : rabi_)
      if (r != rabi_.front()) return false;
    return true;
  }

  /// Cumulative energy sum_{j<l} omega_j of rung l (zero for l = 1).
  double rung_energy(int l) const {
    double e = 0.0;
    for (int j = 1; j < l; ++j) e += omega_[static_cast<std::size_t>(j - 1)];
    return e;
  }

 private:
  friend LadderModel build_model(const ModelConfig& config);
  LadderModel() = default;

  int l_max_ = 0;
  std::vector<double> omega_;
  std::vector<double> rabi_;
  double gamma0_ = 0.0;
  double gamma1_ = 0.0;
  double gamma2_ = 0.0;
  Boundary boundary_ = Boundary::Open;
  bool pbc_wrap_jumps_ = false;
  ModelConfig config_;
};

inline LadderModel build_model(const ModelConfig& config) {
  if (config.l_max < 2)
    throw Error(Errc::NonPositiveSize, "l_max must be >= 2, got " + std::to_string(config.l_max));
  auto check_rate = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
      throw Error(Errc::NegativeRate, std::string(name) + " must be finite and >= 0");
  };
  check_rate(config.gamma0, "gamma0");
  check_rate(config.gamma1, "gamma1");
  check_rate(config.gamma2, "gamma2");

  LadderModel m;
  m.l_max_ = config.l_max;
  m.gamma0_ = config.gamma0;
  m.gamma1_ = config.gamma1;
  m.gamma2_ = config.gamma2;
  m.boundary_ = config.boundary;
  m.pbc_wrap_jumps_ = config.pbc_wrap_jumps;
  m.config_ = config;

  const auto links = static_cast<std::size_t>(config.l_max - 1);
  if (config.omega.size() == 1) {
    m.omega_.assign(links, config.omega.front());
  } else if (config.omega.size() == links) {
    m.omega_ = config.omega;
  } else {
    throw Error(Errc::LengthMismatch, "omega must have 1 or l_max-1 entries");
  }
  for (double w : m.omega_)
    if (!std::isfinite(w)) throw Error(Errc::InvalidArgument, "omega entries must be finite");

  if (const auto* custom = std::get_if<CustomCoupling>(&config.rabi)) {
    const std::size_t n = custom->values.size();
    if (n != links && n != links + 1)
      throw Error(Errc::LengthMismatch, "custom rabi list must have l_max-1 or l_max entries");
    if (n == links && config.boundary == Boundary::Periodic && !config.wrap_rabi)
      throw Error(Errc::LengthMismatch, "PBC with a custom rabi list needs l_max entries or wrap_rabi");
  }
  m.rabi_.resize(static_cast<std::size_t>(config.l_max));
  for (int l = 1; l < config.l_max; ++l) m.rabi_[static_cast<std::size_t>(l - 1)] = coupling_at(config.rabi, l);
  if (config.wrap_rabi) {
    m.rabi_.back() = *config.wrap_rabi;
  } else {
    const auto* custom = std::get_if<CustomCoupling>(&config.rabi);
    m.rabi_.back() = (custom && custom->values.size() == links) ? 0.0 : coupling_at(config.rabi, config.l_max);
  }
  for (double r : m.rabi_)
    if (!std::isfinite(r) || r < 0.0) throw Error(Errc::NegativeRate, "Rabi rates must be finite and >= 0");
  return m;
}

/// Position of a basis state in the ladder.
struct StateIndex {
  int l = 1;
  Sector sector = Sector::Ground;
  int n = 1;  // flat 1-based index

  friend bool operator==(const StateIndex&, const StateIndex&) = default;
};

/// |g,l> -> n = 2l-1, |e,l> -> n = 2l (1-based).
inline int state_index(int l, Sector sector, int l_max) {
  if (l < 1 || l > l_max) throw Error(Errc::OutOfRange, "rung " + std::to_string(l) + " outside 1..l_max");
  return sector == Sector::Ground ? 2 * l - 1 : 2 * l;
}

inline StateIndex index_state(int n, int l_max) {
  if (n < 1 || n > 2 * l_max) throw Error(Errc::OutOfRange, "state index " + std::to_string(n) + " outside 1..N");
  return StateIndex{(n + 1) / 2, (n % 2 == 1) ? Sector::Ground : Sector::Excited, n};
}

// Zero-based matrix positions of |g,l> and |e,l>.
constexpr int ground(int l) noexcept { return 2 * l - 2; }
constexpr int excited(int l) noexcept { return 2 * l - 1; }

}  // namespace optpump

#endif  // OPTPUMP_MODEL_HPP
