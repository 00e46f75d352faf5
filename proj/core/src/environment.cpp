#include "persist/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "persist/error.hpp"

namespace persist {

namespace {

void require_beta(double beta, double min, bool inclusive) {
  const bool ok = std::isfinite(beta) && (inclusive ? beta >= min : beta > min);
  if (!ok) {
    throw Error(ErrorCode::InvalidParameter,
                std::string("beta must be finite and ") + (inclusive ? ">= " : "> ") + std::to_string(min),
                "beta");
  }
}

}  // namespace

EnvFamily EnvFamily::geometric(double beta) {
  require_beta(beta, 1.0, true);
  return EnvFamily(Kind::Geometric, beta, {});
}

EnvFamily EnvFamily::exponential(double beta) {
  require_beta(beta, 0.0, false);
  return EnvFamily(Kind::Exponential, beta, {});
}

EnvFamily EnvFamily::two_point(double beta) {
  require_beta(beta, 0.0, false);
  std::vector<Atom> atoms;
  if (beta <= 15.0) {
    atoms = {{beta / 10.0, 0.5}, {3.0 * std::max(beta, 1.0), 0.5}};
  } else {
    atoms = {{beta - 13.5, 0.5}, {beta - 12.0, 0.5}};
  }
  return EnvFamily(Kind::TwoPoint, beta, std::move(atoms));
}

EnvFamily EnvFamily::custom(std::vector<Atom> atoms, double t_min) {
  if (!(t_min > 0.0) || !std::isfinite(t_min)) {
    throw Error(ErrorCode::InvalidParameter, "t_min must be positive", "t_min");
  }
  if (atoms.empty()) throw Error(ErrorCode::InvalidParameter, "custom family needs atoms", "atoms");
  double total = 0.0;
  for (const Atom& atom : atoms) {
    if (!std::isfinite(atom.time) || atom.time < t_min) {
      throw Error(ErrorCode::InvalidParameter, "atom time below t_min or not finite", "atoms");
    }
    if (!std::isfinite(atom.weight) || atom.weight <= 0.0) {
      throw Error(ErrorCode::InvalidParameter, "atom weight must be positive", "atoms");
    }
    total += atom.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidParameter, "atom weights must sum to 1", "atoms");
  }
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.time < y.time; });
  return EnvFamily(Kind::Custom, std::numeric_limits<double>::quiet_NaN(), std::move(atoms));
}

std::string EnvFamily::name() const {
  switch (kind_) {
    case Kind::Geometric: return "geometric";
    case Kind::Exponential: return "exponential";
    case Kind::TwoPoint: return "twopoint";
    case Kind::Custom: return "custom";
  }
  return "?";
}

double EnvFamily::mean() const noexcept {
  if (kind_ == Kind::Geometric || kind_ == Kind::Exponential) return beta_;
  double m = 0.0;
  for (const Atom& atom : atoms_) m += atom.time * atom.weight;
  return m;
}

double EnvFamily::quantile(double u) const noexcept {
  switch (kind_) {
    case Kind::Geometric: {
      // P(T <= k) = 1 - (1 - 1/beta)^k
      const double ratio = std::log1p(-u) / std::log1p(-1.0 / beta_);
      return std::max(1.0, std::ceil(ratio));
    }
    case Kind::Exponential:
      return -beta_ * std::log1p(-u);
    case Kind::TwoPoint:
    case Kind::Custom: {
      double cumulative = 0.0;
      for (const Atom& atom : atoms_) {
        cumulative += atom.weight;
        if (u <= cumulative) return atom.time;
      }
      return atoms_.back().time;
    }
  }
  return 0.0;
}

std::vector<Atom> EnvFamily::atoms() const {
  if (kind_ == Kind::Exponential) return {};
  if (kind_ != Kind::Geometric) return atoms_;
  std::vector<Atom> out;
  const double q = 1.0 / beta_;
  double remaining = 1.0;  // P(T > k)
  for (double k = 1.0; remaining >= kTailMass; k += 1.0) {
    const double w = remaining * q;
    out.push_back({k, w});
    remaining *= 1.0 - q;
    if (q == 1.0) break;
  }
  return out;
}

double EnvFamily::min_support() const noexcept {
  switch (kind_) {
    case Kind::Geometric: return 1.0;
    case Kind::Exponential: return 0.0;
    default: return atoms_.front().time;
  }
}

std::vector<double> sample_times(const EnvFamily& family, std::size_t n, Engine& engine) {
  if (n == 0) throw Error(ErrorCode::InvalidParameter, "sample count must be at least 1", "n");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(family.sample(engine));
  return out;
}

}  // namespace persist
