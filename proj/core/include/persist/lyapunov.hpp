#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

#include "persist/environment.hpp"
#include "persist/model.hpp"
#include "persist/rng.hpp"

namespace persist {

// Two-sided 99% normal quantile used for Lyapunov verdicts.
inline constexpr double kVerdictZ = 2.576;

enum class EnvVerdict { Survive, Extinct, Inconclusive };

std::string_view to_string(EnvVerdict v) noexcept;

struct LyapunovOptions {
  std::size_t epochs = 10000;
  std::size_t replicates = 32;
  // Leading epochs excluded from the growth-rate average; defaults to
  // epochs / 10 when unset.
  std::size_t burn_in = static_cast<std::size_t>(-1);
  // Renormalise the running product every this many epochs.
  std::size_t renorm_every = 1;
  std::uint64_t master_seed = kDefaultSeed;
  std::size_t workers = 0;
};

struct LyapunovEstimate {
  double delta_hat = 0.0;
  double std_err = 0.0;
  std::size_t epochs = 0;
  std::size_t burn_in = 0;
  std::size_t replicates = 0;
  EnvVerdict verdict = EnvVerdict::Inconclusive;
};

// Verdict for an estimate and standard error under the kVerdictZ band.
EnvVerdict lyapunov_verdict(double delta_hat, double std_err) noexcept;

// Top Lyapunov exponent of M(T_n) ... M(T_1), T_i iid from `family`, with
// the max-column-sum norm. Each replicate forms the left product with the
// e^{T x+} factors carried in log space, renormalises it, and reports
// (log||P_n|| - log||P_b||) / (n - b) where b is the burn-in. delta_hat is the
// replicate mean and std_err its standard error, never below a floor of
// 64 ulp(|delta_hat|) so a deterministic environment does not claim exactness
// beyond round-off.
//
// Requires supercritical parameters and a + 1 - p > 0 (DegenerateProduct
// otherwise: the product collapses and the process dies out).
LyapunovEstimate lyapunov(const ModelParams& params, const EnvFamily& family,
                          const LyapunovOptions& options = {});

// E[log r_bar(T)] for p = 1, where the post-kill population is purely
// persistent and the process reduces to a single-type branching process in
// random environment. Sums over the atoms of a discrete family (geometric
// support truncated at kTailMass). Throws NotApplicable for p < 1 or a
// continuous family, DegenerateProduct for a = 0.
double exact_log_mean(const ModelParams& params, const EnvFamily& family);

struct BetaCriticalOptions {
  double lo = 1.0;
  double hi = 100.0;
  double tol = 1e-3;
  LyapunovOptions lyapunov{};
  // Inconclusive Lyapunov verdicts are retried with doubled epochs up to this.
  std::size_t max_epochs = 160000;
  // Use exact_log_mean when p = 1 and the family is discrete.
  bool prefer_exact = true;
};

struct BetaBracket {
  double lo = 0.0;  // verdict(lo) = Extinct
  double hi = 0.0;  // verdict(hi) = Survive
  std::size_t evaluations = 0;
  bool exact = false;    // decided by exact_log_mean
  bool widened = false;  // an inconclusive zone kept hi - lo above tol
};

using FamilyConstructor = std::function<EnvFamily(double beta)>;

// Bracket the critical family parameter beta_c by bisection on the
// extinction/survival verdict. Midpoints are geometric, so ranges spanning
// decades converge evenly. All Lyapunov evaluations reuse the same master
// seed; with inverse-transform sampling this couples environments across beta.
// Throws NoSignChange unless verdict(lo) = Extinct and verdict(hi) = Survive.
BetaBracket beta_critical(const ModelParams& params, const FamilyConstructor& family,
                          const BetaCriticalOptions& options = {});

}  // namespace persist
