#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "persist/model.hpp"

namespace persist {

inline constexpr double kDefaultTimeTolerance = 1e-10;
inline constexpr double kDefaultProbabilityTolerance = 1e-12;
// Upper limit of the doubling search for T_c.
inline constexpr double kMaxCriticalTime = 1e4;

struct CriticalTimeResult {
  double t_c = 0.0;
  double lo = 0.0;  // final bracket, F_{lo,p}(1) > 0 > F_{hi,p}(1)
  double hi = 0.0;
  double residual = 0.0;  // |F_{t_c,p}(1)|
  std::size_t iterations = 0;
};

// Critical period T_c(p): periodic killing with period T drives the
// population extinct almost surely iff T <= T_c(p).
//
// Requires supercritical parameters, p > 0 and a + 1 - p > 0. Throws
// NotSupercritical, TrivialExtinction, or NotFound if the doubling search
// exceeds kMaxCriticalTime.
CriticalTimeResult critical_time(const ModelParams& params, double tol_t = kDefaultTimeTolerance);

// Kill probability p_c(t) above which period-t killing is fatal; p is ignored
// in `params`. Returns nullopt when t >= T_c(1), where every p leaves a
// positive survival probability.
std::optional<double> critical_p(const ModelParams& params, double t,
                                 double tol_p = kDefaultProbabilityTolerance);

enum class Verdict { AlmostSureExtinction, PositiveSurvival };

std::string_view to_string(Verdict v) noexcept;

struct Classification {
  Verdict verdict = Verdict::AlmostSureExtinction;
  double gamma_plus = 0.0;
  double log_gamma_plus = 0.0;
};

// Periodic-killing verdict from the Perron root of M(period). gamma+ == 1 is
// reported as extinction.
Classification classify(const ModelParams& params, double period);

// ---------------------------------------------------------------------------
// Parameter sweeps

enum class SweepVar { Lambda, P, A };

std::string_view to_string(SweepVar v) noexcept;
std::optional<SweepVar> parse_sweep_var(std::string_view name) noexcept;

struct SweepAxis {
  SweepVar var = SweepVar::P;
  std::vector<double> values;
};

// Evenly spaced values from..to inclusive; steps == 1 yields {from}.
std::vector<double> linspace(double from, double to, std::size_t steps);

struct SweepRow {
  std::vector<double> coords;  // one per axis, in axis order
  std::optional<double> t_c;
  double residual = 0.0;
  std::string status;  // "ok" or an ErrorCode name
};

struct SweepTable {
  std::vector<SweepVar> vars;
  std::vector<SweepRow> rows;
};

// Evaluates T_c on the cartesian product of one or two axes; the first axis
// varies slowest. Points that violate the preconditions of critical_time get a
// status instead of a value. Row order does not depend on `workers`.
SweepTable sweep(const RawParams& base, const std::vector<SweepAxis>& axes,
                 double tol_t = kDefaultTimeTolerance, std::size_t workers = 0);

}  // namespace persist
