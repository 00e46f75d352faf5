#pragma once

#include <cstdint>

namespace persist {

// Unvalidated rate set as read from a config file or the command line.
struct RawParams {
  double lambda = 0.0;  // susceptible birth rate
  double a = 0.0;       // susceptible -> persistent switch rate
  double b = 0.0;       // persistent -> susceptible switch rate
  double d_n = 0.0;     // susceptible death rate
  double d_r = 0.0;     // persistent death rate
  double p = 0.0;       // per-bacterium kill probability at a mass killing

  bool operator==(const RawParams&) const = default;
};

// Validated model parameters. Only constructible through validate(), so every
// instance has finite nonnegative rates, b > 0 and p in [0,1].
//
// Parameters outside the supercritical regime are accepted and flagged; the
// analytic routines that need supercriticality check it themselves.
class ModelParams {
 public:
  static ModelParams validate(const RawParams& raw);

  double lambda() const noexcept { return raw_.lambda; }
  double a() const noexcept { return raw_.a; }
  double b() const noexcept { return raw_.b; }
  double d_n() const noexcept { return raw_.d_n; }
  double d_r() const noexcept { return raw_.d_r; }
  double p() const noexcept { return raw_.p; }
  const RawParams& raw() const noexcept { return raw_; }

  // (b+d_r)(lambda-d_n) - a*d_r, i.e. -h(0) = -det(A).
  double growth_determinant() const noexcept;

  // growth_determinant() > 0: the unkilled population survives with
  // positive probability.
  bool supercritical() const noexcept { return supercritical_; }

  // a + (1-p) > 0. When false a single mass killing removes every
  // susceptible and persistent cells can never reproduce again.
  bool nontrivial() const noexcept { return nontrivial_; }

  // Same rates, different kill probability.
  ModelParams with_p(double p) const;

  bool operator==(const ModelParams& other) const noexcept { return raw_ == other.raw_; }

 private:
  explicit ModelParams(const RawParams& raw);

  RawParams raw_;
  bool supercritical_ = false;
  bool nontrivial_ = false;
};

inline ModelParams validate(const RawParams& raw) { return ModelParams::validate(raw); }

// True when the process dies out for every kill schedule, including none.
bool spontaneous_extinction(const ModelParams& params) noexcept;

// Susceptible / persistent counts at time t. (0,0) is absorbing.
struct PopulationState {
  std::uint64_t n = 0;
  std::uint64_t r = 0;
  double t = 0.0;

  std::uint64_t total() const noexcept { return n + r; }
  bool extinct() const noexcept { return n == 0 && r == 0; }
  bool operator==(const PopulationState&) const = default;
};

}  // namespace persist
