#include "persist/model.hpp"

#include <cmath>
#include <string>

#include "persist/error.hpp"

namespace persist {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NotSupercritical: return "NotSupercritical";
    case ErrorCode::SpectralGapTooSmall: return "SpectralGapTooSmall";
    case ErrorCode::TrivialExtinction: return "TrivialExtinction";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::AbsorbedState: return "AbsorbedState";
    case ErrorCode::DegenerateProduct: return "DegenerateProduct";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
  }
  return "Unknown";
}

namespace {

void require_rate(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::InvalidParameter, std::string("rate '") + name + "' is not finite", name);
  }
  if (value < 0.0) {
    throw Error(ErrorCode::InvalidParameter, std::string("rate '") + name + "' is negative", name);
  }
}

}  // namespace

ModelParams::ModelParams(const RawParams& raw) : raw_(raw) {
  supercritical_ = growth_determinant() > 0.0;
  nontrivial_ = raw_.a + (1.0 - raw_.p) > 0.0;
}

ModelParams ModelParams::validate(const RawParams& raw) {
  require_rate(raw.lambda, "lambda");
  require_rate(raw.a, "a");
  require_rate(raw.b, "b");
  require_rate(raw.d_n, "dn");
  require_rate(raw.d_r, "dr");
  if (raw.b <= 0.0) {
    throw Error(ErrorCode::InvalidParameter, "rate 'b' must be strictly positive", "b");
  }
  if (!std::isfinite(raw.p) || raw.p < 0.0 || raw.p > 1.0) {
    throw Error(ErrorCode::InvalidParameter, "kill probability 'p' must lie in [0,1]", "p");
  }
  return ModelParams(raw);
}

double ModelParams::growth_determinant() const noexcept {
  return (raw_.b + raw_.d_r) * (raw_.lambda - raw_.d_n) - raw_.a * raw_.d_r;
}

ModelParams ModelParams::with_p(double p) const {
  RawParams raw = raw_;
  raw.p = p;
  return validate(raw);
}

bool spontaneous_extinction(const ModelParams& params) noexcept {
  return !params.supercritical();
}

}  // namespace persist
