#include "persist/critical.hpp"

#include <cmath>
#include <functional>

#include "persist/error.hpp"
#include "persist/meanfield.hpp"
#include "persist/parallel.hpp"

namespace persist {

namespace {

constexpr double kSmallestSeed = 1e-300;

// Bisection on a function that is positive at lo and nonpositive at hi.
// Stops at the tolerance or when the bracket cannot shrink further.
std::size_t bisect(const std::function<double(double)>& f, double& lo, double& hi, double tol) {
  std::size_t iterations = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iterations;
  }
  return iterations;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  return v == Verdict::PositiveSurvival ? "PositiveSurvival" : "AlmostSureExtinction";
}

CriticalTimeResult critical_time(const ModelParams& params, double tol_t) {
  if (!(tol_t > 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerance must be positive", "tol");
  const MeanField mf(params);
  if (!params.nontrivial()) {
    throw Error(ErrorCode::TrivialExtinction, "a + 1 - p = 0: every schedule leads to extinction");
  }
  if (params.p() == 0.0) {
    throw Error(ErrorCode::TrivialExtinction, "p = 0: no killing, no finite critical period exists");
  }

  // F_{t,p}(1) > 0 exactly on (0, T_c); the scaled residual has the same sign.
  const std::function<double(double)> residual = [&mf](double t) { return mf.scaled_unit_residual(t); };

  double hi = 1.0;
  while (residual(hi) > 0.0) {
    hi *= 2.0;
    if (hi > kMaxCriticalTime) {
      throw Error(ErrorCode::NotFound, "critical period exceeds the search cap of 1e4");
    }
  }
  double lo = 0.5 * hi;
  while (residual(lo) <= 0.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < kSmallestSeed) throw Error(ErrorCode::NotFound, "no positive lower bracket for T_c");
  }

  CriticalTimeResult out;
  out.iterations = bisect(residual, lo, hi, tol_t);
  out.t_c = 0.5 * (lo + hi);

  // Cross-check against the Perron root; refine to machine resolution if the
  // tolerance alone was not enough.
  auto gamma_ok = [&](double t) { return std::abs(std::expm1(mf.log_gamma_plus(t))) <= 10.0 * tol_t; };
  if (!gamma_ok(out.t_c)) {
    out.iterations += bisect(residual, lo, hi, 0.0);
    out.t_c = 0.5 * (lo + hi);
    if (!gamma_ok(out.t_c)) {
      throw Error(ErrorCode::NotFound, "bisection root does not satisfy gamma+ = 1");
    }
  }
  out.lo = lo;
  out.hi = hi;
  out.residual = std::abs(mf.unit_residual(out.t_c));
  return out;
}

std::optional<double> critical_p(const ModelParams& params, double t, double tol_p) {
  if (!std::isfinite(t) || t <= 0.0) {
    throw Error(ErrorCode::InvalidParameter, "time must be finite and positive", "t");
  }
  if (!(tol_p > 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerance must be positive", "tol");
  if (!params.supercritical()) {
    throw Error(ErrorCode::NotSupercritical, "parameters are not supercritical");
  }
  // F_{t,p}(1) is strictly increasing in p and negative at p = 0.
  const std::function<double(double)> residual = [&](double p) {
    return MeanField(params.with_p(p)).scaled_unit_residual(t);
  };
  if (residual(1.0) <= 0.0) return std::nullopt;

  // Positive residual means extinction, so the bracket is flipped relative to
  // bisect(): search on q = 1 - p.
  double lo = 0.0;  // q = 0  <=> p = 1, residual > 0
  double hi = 1.0;  // q = 1  <=> p = 0, residual <= 0
  bisect([&](double q) { return residual(1.0 - q); }, lo, hi, tol_p);
  return 1.0 - 0.5 * (lo + hi);
}

Classification classify(const ModelParams& params, double period) {
  if (!std::isfinite(period) || period <= 0.0) {
    throw Error(ErrorCode::InvalidParameter, "period must be finite and positive", "period");
  }
  const MeanField mf(params);
  Classification out;
  out.log_gamma_plus = mf.log_gamma_plus(period);
  out.gamma_plus = std::exp(out.log_gamma_plus);
  out.verdict = out.log_gamma_plus > 0.0 ? Verdict::PositiveSurvival : Verdict::AlmostSureExtinction;
  return out;
}

std::string_view to_string(SweepVar v) noexcept {
  switch (v) {
    case SweepVar::Lambda: return "lambda";
    case SweepVar::P: return "p";
    case SweepVar::A: return "a";
  }
  return "?";
}

std::optional<SweepVar> parse_sweep_var(std::string_view name) noexcept {
  if (name == "lambda") return SweepVar::Lambda;
  if (name == "p") return SweepVar::P;
  if (name == "a") return SweepVar::A;
  return std::nullopt;
}

std::vector<double> linspace(double from, double to, std::size_t steps) {
  std::vector<double> out;
  if (steps == 0) return out;
  out.reserve(steps);
  if (steps == 1) {
    out.push_back(from);
    return out;
  }
  const double span = to - from;
  for (std::size_t i = 0; i < steps; ++i) {
    out.push_back(i + 1 == steps ? to : from + span * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return out;
}

SweepTable sweep(const RawParams& base, const std::vector<SweepAxis>& axes, double tol_t,
                 std::size_t workers) {
  if (axes.empty() || axes.size() > 2) {
    throw Error(ErrorCode::InvalidParameter, "a sweep takes one or two axes", "var");
  }
  if (axes.size() == 2 && axes[0].var == axes[1].var) {
    throw Error(ErrorCode::InvalidParameter, "sweep axes must differ", "var2");
  }
  SweepTable table;
  std::size_t count = 1;
  for (const auto& axis : axes) {
    table.vars.push_back(axis.var);
    count *= axis.values.size();
  }
  table.rows.resize(count);
  const std::size_t inner = axes.size() == 2 ? axes[1].values.size() : 1;

  parallel_for(count, workers, [&](std::size_t index) {
    SweepRow& row = table.rows[index];
    RawParams raw = base;
    const std::size_t idx[2] = {index / inner, index % inner};
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const double v = axes[k].values[idx[k]];
      row.coords.push_back(v);
      switch (axes[k].var) {
        case SweepVar::Lambda: raw.lambda = v; break;
        case SweepVar::P: raw.p = v; break;
        case SweepVar::A: raw.a = v; break;
      }
    }
    try {
      const CriticalTimeResult r = critical_time(ModelParams::validate(raw), tol_t);
      row.t_c = r.t_c;
      row.residual = r.residual;
      row.status = "ok";
    } catch (const Error& e) {
      row.status = std::string(to_string(e.code()));
    }
  });
  return table;
}

}  // namespace persist
