#include "persist/lyapunov.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "persist/error.hpp"
#include "persist/meanfield.hpp"
#include "persist/parallel.hpp"

namespace persist {

namespace {

// Neumaier compensated sum. The running log-norm is a difference of two
// large drifts (the e^{T x+} scales and the renormalisations), so plain
// summation loses digits over 1e4+ epochs.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_nondegenerate(const ModelParams& params) {
  if (!params.nontrivial()) {
    throw Error(ErrorCode::DegenerateProduct,
                "a = 0 and p = 1: the moment product collapses (delta = -inf, extinction)");
  }
}

}  // namespace

std::string_view to_string(EnvVerdict v) noexcept {
  switch (v) {
    case EnvVerdict::Survive: return "Survive";
    case EnvVerdict::Extinct: return "Extinct";
    case EnvVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

EnvVerdict lyapunov_verdict(double delta_hat, double std_err) noexcept {
  if (delta_hat - kVerdictZ * std_err > 0.0) return EnvVerdict::Survive;
  if (delta_hat + kVerdictZ * std_err < 0.0) return EnvVerdict::Extinct;
  return EnvVerdict::Inconclusive;
}

LyapunovEstimate lyapunov(const ModelParams& params, const EnvFamily& family, const LyapunovOptions& options) {
  const std::size_t n = options.epochs;
  if (n < 2) throw Error(ErrorCode::InvalidParameter, "need at least 2 epochs", "epochs");
  if (options.replicates < 2) {
    throw Error(ErrorCode::InvalidParameter, "need at least 2 replicates for a standard error", "replicates");
  }
  if (options.renorm_every == 0) {
    throw Error(ErrorCode::InvalidParameter, "renormalisation cadence must be positive", "renorm_every");
  }
  const std::size_t burn = options.burn_in == static_cast<std::size_t>(-1) ? n / 10 : options.burn_in;
  if (burn >= n) throw Error(ErrorCode::InvalidParameter, "burn-in must be below the epoch count", "burn_in");
  const MeanField mf(params);
  require_nondegenerate(params);

  std::vector<double> values(options.replicates);
  parallel_for(options.replicates, options.workers, [&](std::size_t rep) {
    Engine engine = make_engine(options.master_seed, rep);
    Mat2 product = Mat2::identity();
    CompensatedSum log_norm;
    double log_at_burn = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const ScaledMatrix step = mf.scaled_moment(family.sample(engine));
      product = step.m * product;
      log_norm.add(step.log_scale);
      if (i % options.renorm_every == 0 || i == burn || i == n) {
        const double norm = product.column_sum_norm();
        log_norm.add(std::log(norm));
        product = product * (1.0 / norm);
      }
      if (i == burn) log_at_burn = log_norm.value();
    }
    values[rep] = (log_norm.value() - log_at_burn) / static_cast<double>(n - burn);
  });

  CompensatedSum total;
  for (double v : values) total.add(v);
  const double r = static_cast<double>(values.size());
  const double mean = total.value() / r;
  CompensatedSum squares;
  for (double v : values) squares.add((v - mean) * (v - mean));
  const double sampling = std::sqrt(squares.value() / (r - 1.0) / r);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mean));

  LyapunovEstimate out;
  out.delta_hat = mean;
  out.std_err = std::max(sampling, floor);
  out.epochs = n;
  out.burn_in = burn;
  out.replicates = options.replicates;
  out.verdict = lyapunov_verdict(out.delta_hat, out.std_err);
  return out;
}

double exact_log_mean(const ModelParams& params, const EnvFamily& family) {
  if (params.p() != 1.0) {
    throw Error(ErrorCode::NotApplicable, "exact log-mean criterion needs p = 1; use lyapunov", "p");
  }
  if (!family.discrete()) {
    throw Error(ErrorCode::NotApplicable, "exact log-mean criterion needs a discrete family", "family");
  }
  const MeanField mf(params);
  require_nondegenerate(params);
  CompensatedSum sum;
  for (const Atom& atom : family.atoms()) sum.add(atom.weight * mf.log_r_bar(atom.time));
  return sum.value();
}

BetaBracket beta_critical(const ModelParams& params, const FamilyConstructor& family,
                          const BetaCriticalOptions& options) {
  if (!(options.lo > 0.0) || !(options.hi > options.lo) || !std::isfinite(options.hi)) {
    throw Error(ErrorCode::InvalidParameter, "search range must satisfy 0 < lo < hi", "lo");
  }
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "tolerance must be positive", "tol");
  require_nondegenerate(params);

  BetaBracket out;
  auto verdict = [&](double beta) {
    ++out.evaluations;
    const EnvFamily fam = family(beta);
    if (options.prefer_exact && params.p() == 1.0 && fam.discrete()) {
      out.exact = true;
      return exact_log_mean(params, fam) > 0.0 ? EnvVerdict::Survive : EnvVerdict::Extinct;
    }
    LyapunovOptions lo = options.lyapunov;
    for (;;) {
      const LyapunovEstimate est = lyapunov(params, fam, lo);
      if (est.verdict != EnvVerdict::Inconclusive || lo.epochs * 2 > options.max_epochs) return est.verdict;
      lo.epochs *= 2;
      if (lo.burn_in != static_cast<std::size_t>(-1)) lo.burn_in *= 2;
    }
  };
  auto midpoint = [](double a, double b) { return std::sqrt(a * b); };

  double lo = options.lo;
  double hi = options.hi;
  const EnvVerdict v_lo = verdict(lo);
  const EnvVerdict v_hi = verdict(hi);
  if (v_lo != EnvVerdict::Extinct || v_hi != EnvVerdict::Survive) {
    throw Error(ErrorCode::NoSignChange, "verdicts at the range ends are " + std::string(to_string(v_lo)) +
                                             " and " + std::string(to_string(v_hi)) +
                                             "; need Extinct below and Survive above");
  }

  while (hi - lo > options.tol) {
    const double mid = midpoint(lo, hi);
    if (mid <= lo || mid >= hi) break;
    const EnvVerdict v = verdict(mid);
    if (v == EnvVerdict::Extinct) {
      lo = mid;
    } else if (v == EnvVerdict::Survive) {
      hi = mid;
    } else {
      // Inconclusive zone around mid: tighten each side separately.
      double a = lo, b = mid;
      while (b - a > options.tol) {
        const double m = midpoint(a, b);
        if (m <= a || m >= b) break;
        const EnvVerdict vm = verdict(m);
        if (vm == EnvVerdict::Extinct) {
          a = m;
        } else {
          b = m;
          if (vm == EnvVerdict::Survive) hi = m;
        }
      }
      lo = a;
      a = mid;
      b = hi;
      while (b - a > options.tol) {
        const double m = midpoint(a, b);
        if (m <= a || m >= b) break;
        if (verdict(m) == EnvVerdict::Survive) {
          b = m;
        } else {
          a = m;
        }
      }
      hi = b;
      out.widened = hi - lo > options.tol;
      break;
    }
  }
  out.lo = lo;
  out.hi = hi;
  return out;
}

}  // namespace persist
