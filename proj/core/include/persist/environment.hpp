#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "persist/rng.hpp"

namespace persist {

// A single atom of a discrete inter-killing-time law.
struct Atom {
  double time = 0.0;
  double weight = 0.0;
};

inline constexpr double kDefaultMinAtom = 1e-6;
// Tail mass dropped when a countable support is truncated.
inline constexpr double kTailMass = 1e-12;

// One member mu_beta of a family of inter-killing-time laws.
//
//   geometric    mean beta >= 1, support {1,2,...}, success probability 1/beta
//   exponential  mean beta > 0
//   twopoint     the non-monotone-survival example family:
//                  beta in (0,15]: 1/2 at beta/10, 1/2 at 3 max(beta,1)
//                  beta > 15:      1/2 at beta-13.5, 1/2 at beta-12
//   custom       finitely many positive atoms, weights summing to 1
//
// All built-in members are stochastically nondecreasing in beta and sampled
// by inverse transform, so equal uniforms give coupled draws across beta.
class EnvFamily {
 public:
  enum class Kind { Geometric, Exponential, TwoPoint, Custom };

  static EnvFamily geometric(double beta);
  static EnvFamily exponential(double beta);
  static EnvFamily two_point(double beta);
  static EnvFamily custom(std::vector<Atom> atoms, double t_min = kDefaultMinAtom);

  Kind kind() const noexcept { return kind_; }
  double beta() const noexcept { return beta_; }
  std::string name() const;

  // Exact mean of the law.
  double mean() const noexcept;

  // Quantile function Q(u) = inf{t : P(T <= t) >= u}, u in (0,1).
  double quantile(double u) const noexcept;

  double sample(Engine& engine) const noexcept { return quantile(open_uniform(engine)); }

  // Whether the support is countable (geometric, twopoint, custom).
  bool discrete() const noexcept { return kind_ != Kind::Exponential; }

  // Atoms in increasing time order. Geometric support is truncated once the
  // remaining mass drops below kTailMass. Empty for the exponential law.
  std::vector<Atom> atoms() const;

  // Smallest point of the support (0 for the exponential law).
  double min_support() const noexcept;

 private:
  EnvFamily(Kind kind, double beta, std::vector<Atom> atoms)
      : kind_(kind), beta_(beta), atoms_(std::move(atoms)) {}

  Kind kind_;
  double beta_;
  std::vector<Atom> atoms_;  // sorted by time; twopoint and custom only
};

std::vector<double> sample_times(const EnvFamily& family, std::size_t n, Engine& engine);

inline double family_mean(const EnvFamily& family) noexcept { return family.mean(); }

}  // namespace persist
