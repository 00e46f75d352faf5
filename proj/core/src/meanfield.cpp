#include "persist/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "persist/error.hpp"

namespace persist {

namespace {

// Past this exponent e^{t x+} overflows a double.
constexpr double kMaxExponent = 700.0;

void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "time must be finite and nonnegative", "t");
  }
}

}  // namespace

double Mat2::column_sum_norm() const noexcept {
  return std::max(std::abs(m11) + std::abs(m21), std::abs(m12) + std::abs(m22));
}

Mat2 Mat2::operator*(const Mat2& rhs) const noexcept {
  return {m11 * rhs.m11 + m12 * rhs.m21, m11 * rhs.m12 + m12 * rhs.m22,
          m21 * rhs.m11 + m22 * rhs.m21, m21 * rhs.m12 + m22 * rhs.m22};
}

RealRoots stable_quadratic_roots(double sum, double product, double discriminant) noexcept {
  const double root = std::sqrt(std::max(discriminant, 0.0));
  RealRoots out;
  if (sum >= 0.0) {
    out.larger = 0.5 * (sum + root);
    out.smaller = out.larger != 0.0 ? product / out.larger : 0.0;
  } else {
    out.smaller = 0.5 * (sum - root);
    out.larger = product / out.smaller;
  }
  return out;
}

SpectralData spectral(const ModelParams& params) noexcept {
  // A11 = lambda - a - d_n, A22 = -(b + d_r); the discriminant
  // (A11 - A22)^2 + 4ab is a sum of nonnegative terms.
  const double a11 = params.lambda() - params.a() - params.d_n();
  const double a22 = -(params.b() + params.d_r());
  const double sum = a11 + a22;
  const double prod = params.a() * params.d_r() - (params.b() + params.d_r()) * (params.lambda() - params.d_n());
  const double diff = a11 - a22;
  const double disc = diff * diff + 4.0 * params.a() * params.b();
  const RealRoots roots = stable_quadratic_roots(sum, prod, disc);
  return {roots.larger, roots.smaller, sum, prod};
}

double char_poly_h(const ModelParams& params, double x) noexcept {
  const double bd = params.b() + params.d_r();
  return x * x + x * (bd - params.lambda() + params.a() + params.d_n()) -
         (bd * (params.lambda() - params.d_n()) - params.a() * params.d_r());
}

MeanField::MeanField(const ModelParams& params) : params_(params), spectral_(persist::spectral(params)) {
  if (!params.supercritical()) {
    throw Error(ErrorCode::NotSupercritical,
                "parameters are not supercritical: (b+d_r)(lambda-d_n) - a d_r = " +
                    std::to_string(params.growth_determinant()) + " <= 0");
  }
  gap_ = spectral_.x_plus - spectral_.x_minus;
  if (!(gap_ >= kMinSpectralGap)) {
    throw Error(ErrorCode::SpectralGapTooSmall, "eigenvalue gap x+ - x- below 1e-9");
  }
  const double bd = params.b() + params.d_r();
  c_plus_ = std::clamp((bd + spectral_.x_plus) / gap_, 0.0, 1.0);
  c_minus_ = std::clamp(-(bd + spectral_.x_minus) / gap_, 0.0, 1.0);
}

MeanField::Scaled MeanField::scaled_flow(double t) const {
  // e^{-t x+} e^{At}; every entry is a combination of nonnegative terms.
  const double decay = std::exp(-t * gap_);
  const double rise = -std::expm1(-t * gap_);
  return {c_plus_ + c_minus_ * decay, params_.a() / gap_ * rise, params_.b() / gap_ * rise,
          c_minus_ + c_plus_ * decay};
}

FlowMatrix MeanField::flow(double t) const {
  require_time(t);
  if (t == 0.0) return FlowMatrix{};
  const Scaled s = scaled_flow(t);
  const double g = std::exp(t * spectral_.x_plus);
  return {t, s.n_tilde * g, s.r_tilde * g, s.n_bar * g, s.r_bar * g};
}

MomentMatrix MeanField::moment(double t) const {
  require_time(t);
  const double keep = 1.0 - params_.p();
  MomentMatrix out;
  out.t = t;
  out.p = params_.p();
  if (t == 0.0) {
    out.m11 = keep;
    out.gamma_plus = 1.0;
    out.gamma_minus = keep;
    return out;
  }
  const FlowMatrix f = flow(t);
  out.m11 = keep * f.n_tilde;
  out.m12 = keep * f.n_bar;
  out.m21 = f.r_tilde;
  out.m22 = f.r_bar;
  const double diff = out.m11 - out.m22;
  const double disc = diff * diff + 4.0 * out.m12 * out.m21;
  const double det = keep * std::exp(t * spectral_.trace_sum);
  const RealRoots roots = stable_quadratic_roots(out.m11 + out.m22, det, disc);
  out.gamma_plus = roots.larger;
  out.gamma_minus = roots.smaller;
  return out;
}

ScaledMatrix MeanField::scaled_moment(double t) const {
  require_time(t);
  const double keep = 1.0 - params_.p();
  if (t == 0.0) return {0.0, {keep, 0.0, 0.0, 1.0}};
  const Scaled s = scaled_flow(t);
  return {t * spectral_.x_plus, {keep * s.n_tilde, keep * s.n_bar, s.r_tilde, s.r_bar}};
}

double MeanField::char_poly(double t, double x) const {
  require_time(t);
  const MomentMatrix m = moment(t);
  const double det = (1.0 - params_.p()) * std::exp(t * spectral_.trace_sum);
  return x * x - x * (m.m11 + m.m22) + det;
}

double MeanField::unit_residual(double t) const {
  require_time(t);
  if (t * spectral_.x_plus > kMaxExponent) {
    return scaled_unit_residual(t) * std::exp(t * spectral_.x_plus);
  }
  // With n_tilde = 1 + dn, r_bar = 1 + dr and det = (1-p)(1 + de):
  //   F(1) = -(1-p) dn - dr + (1-p) de,
  // using c+ + c- = 1 so each increment is an expm1 combination.
  const double keep = 1.0 - params_.p();
  const double up = std::expm1(t * spectral_.x_plus);
  const double down = std::expm1(t * spectral_.x_minus);
  const double dn = c_plus_ * up + c_minus_ * down;
  const double dr = c_minus_ * up + c_plus_ * down;
  const double de = std::expm1(t * spectral_.trace_sum);
  return -keep * dn - dr + keep * de;
}

double MeanField::scaled_unit_residual(double t) const {
  require_time(t);
  if (t * spectral_.x_plus <= kMaxExponent) {
    return unit_residual(t) * std::exp(-t * spectral_.x_plus);
  }
  const double keep = 1.0 - params_.p();
  const Scaled s = scaled_flow(t);
  return std::exp(-t * spectral_.x_plus) - keep * s.n_tilde - s.r_bar +
         keep * std::exp(t * spectral_.x_minus);
}

double MeanField::log_gamma_plus(double t) const {
  const ScaledMatrix sm = scaled_moment(t);
  const Mat2& m = sm.m;
  const double diff = m.m11 - m.m22;
  const double disc = diff * diff + 4.0 * m.m12 * m.m21;
  const double larger = 0.5 * (m.m11 + m.m22 + std::sqrt(std::max(disc, 0.0)));
  if (larger <= 0.0) return -std::numeric_limits<double>::infinity();
  return sm.log_scale + std::log(larger);
}

double MeanField::log_r_bar(double t) const {
  require_time(t);
  if (t == 0.0) return 0.0;
  return t * spectral_.x_plus + std::log(scaled_flow(t).r_bar);
}

FlowMatrix flow(const ModelParams& params, double t) { return MeanField(params).flow(t); }

MomentMatrix moment_matrix(const ModelParams& params, double t) { return MeanField(params).moment(t); }

double char_poly_F(const ModelParams& params, double t, double x) {
  return MeanField(params).char_poly(t, x);
}

std::array<double, 2> ode_oracle(const ModelParams& params, double t, std::array<double, 2> init,
                                 std::size_t steps) {
  require_time(t);
  if (steps == 0) throw Error(ErrorCode::InvalidParameter, "steps must be at least 1", "steps");
  const double a11 = params.lambda() - params.a() - params.d_n();
  const double a12 = params.b();
  const double a21 = params.a();
  const double a22 = -(params.b() + params.d_r());
  auto rhs = [&](const std::array<double, 2>& y) -> std::array<double, 2> {
    return {a11 * y[0] + a12 * y[1], a21 * y[0] + a22 * y[1]};
  };
  const double h = t / static_cast<double>(steps);
  std::array<double, 2> y = init;
  for (std::size_t i = 0; i < steps; ++i) {
    const auto k1 = rhs(y);
    const auto k2 = rhs({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const auto k3 = rhs({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const auto k4 = rhs({y[0] + h * k3[0], y[1] + h * k3[1]});
    y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
  }
  return y;
}

}  // namespace persist
