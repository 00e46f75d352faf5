#pragma once

#include <array>
#include <cstddef>

#include "persist/model.hpp"

namespace persist {

// Minimum eigenvalue gap x+ - x- accepted by the closed-form flow. Below it
// the closed form degenerates to 0/0 and MeanField refuses to build.
inline constexpr double kMinSpectralGap = 1e-9;

// Dense 2x2 matrix. Column j holds the offspring of an ancestor of type j
// (j = 1 susceptible, j = 2 persistent).
struct Mat2 {
  double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  double trace() const noexcept { return m11 + m22; }
  double determinant() const noexcept { return m11 * m22 - m12 * m21; }
  // max_j sum_i |m_ij|
  double column_sum_norm() const noexcept;

  Mat2 operator*(const Mat2& rhs) const noexcept;
  Mat2 operator*(double s) const noexcept { return {m11 * s, m12 * s, m21 * s, m22 * s}; }
};

// Real roots of x^2 - sum*x + product = 0, larger first. The discriminant is
// passed in so callers can supply a cancellation-free form; the larger
// magnitude root is formed first and the other one recovered from the product.
struct RealRoots {
  double larger = 0.0;
  double smaller = 0.0;
};
RealRoots stable_quadratic_roots(double sum, double product, double discriminant) noexcept;

// Eigenvalues of the mean-field generator
//   A = [[lambda - a - d_n, b], [a, -(b + d_r)]],
// i.e. the roots of h(x) = x^2 + x(b+d_r-lambda+a+d_n) - ((b+d_r)(lambda-d_n) - a d_r).
struct SpectralData {
  double x_plus = 0.0;
  double x_minus = 0.0;
  double trace_sum = 0.0;  // x+ + x-
  double prod = 0.0;       // x+ * x-
};

SpectralData spectral(const ModelParams& params) noexcept;

// h(x) evaluated directly from the rates.
double char_poly_h(const ModelParams& params, double x) noexcept;

// Columns of e^{At}: (n_tilde, r_tilde) starting from one susceptible,
// (n_bar, r_bar) starting from one persistent.
struct FlowMatrix {
  double t = 0.0;
  double n_tilde = 1.0;
  double r_tilde = 0.0;
  double n_bar = 0.0;
  double r_bar = 1.0;

  Mat2 matrix() const noexcept { return {n_tilde, n_bar, r_tilde, r_bar}; }
};

// Expected post-kill survivors, diag(1-p, 1) * e^{At}, with the roots of
// F_{t,p}(x) = x^2 - x*trace + (1-p) e^{t(x+ + x-)}.
struct MomentMatrix {
  double t = 0.0;
  double p = 0.0;
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;
  double gamma_plus = 1.0;
  double gamma_minus = 1.0;

  Mat2 matrix() const noexcept { return {m11, m12, m21, m22}; }
};

// e^{log_scale} * m. Used where e^{t x+} would overflow.
struct ScaledMatrix {
  double log_scale = 0.0;
  Mat2 m = Mat2::identity();
};

// Closed-form mean-field quantities for one parameter set. Construction
// checks supercriticality and the spectral gap once, so repeated evaluation
// (Lyapunov products, root finding) is cheap.
class MeanField {
 public:
  // Throws NotSupercritical or SpectralGapTooSmall.
  explicit MeanField(const ModelParams& params);

  const ModelParams& params() const noexcept { return params_; }
  const SpectralData& spectral() const noexcept { return spectral_; }

  FlowMatrix flow(double t) const;
  MomentMatrix moment(double t) const;

  // Moment matrix with the factor e^{t x+} pulled out.
  ScaledMatrix scaled_moment(double t) const;

  // F_{t,p}(x).
  double char_poly(double t, double x) const;

  // F_{t,p}(1), written in expm1 form so it stays accurate as t -> 0.
  double unit_residual(double t) const;

  // F_{t,p}(1) * e^{-t x+}. Same sign as unit_residual and finite for any t.
  double scaled_unit_residual(double t) const;

  // log of the Perron root of M(t); finite for large t.
  double log_gamma_plus(double t) const;

  // log r_bar(t), the persistent-to-persistent flow entry.
  double log_r_bar(double t) const;

 private:
  struct Scaled {
    double n_tilde, r_tilde, n_bar, r_bar;
  };
  Scaled scaled_flow(double t) const;

  ModelParams params_;
  SpectralData spectral_;
  double gap_ = 0.0;    // x+ - x-
  double c_plus_ = 0.0;  // (b + d_r + x+) / gap, in [0,1]
  double c_minus_ = 0.0; // -(b + d_r + x-) / gap, in [0,1]
};

FlowMatrix flow(const ModelParams& params, double t);
MomentMatrix moment_matrix(const ModelParams& params, double t);
double char_poly_F(const ModelParams& params, double t, double x);

// Classical RK4 on d/dt (n, r) = A (n, r) with `steps` uniform steps. Builds A
// straight from the rates and shares nothing with the closed form, so it can
// serve as an independent check of flow().
std::array<double, 2> ode_oracle(const ModelParams& params, double t, std::array<double, 2> init,
                                 std::size_t steps);

}  // namespace persist
