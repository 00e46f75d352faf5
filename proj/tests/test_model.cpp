#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "persist/error.hpp"
#include "persist/model.hpp"

using namespace persist;

namespace {

ErrorCode code_of(const RawParams& raw, std::string* field = nullptr) {
  try {
    validate(raw);
  } catch (const Error& e) {
    if (field) *field = e.field();
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::NotFound;
}

}  // namespace

TEST_CASE("validate classifies instead of rejecting") {
  const ModelParams ex = validate(oracle::ex1());
  CHECK(ex.supercritical());
  CHECK(ex.nontrivial());

  const ModelParams tri = validate(oracle::triangular(1.0));
  CHECK(tri.supercritical());
  CHECK_FALSE(tri.nontrivial());

  const ModelParams sub = validate({1, 3, 1, 0, 1, 0.5});
  CHECK_FALSE(sub.supercritical());
  CHECK(sub.growth_determinant() == doctest::Approx(-1.0));
}

TEST_CASE("validate rejects bad fields by name") {
  std::string field;
  CHECK(code_of({-1, 0, 1, 0, 0, 0.5}, &field) == ErrorCode::InvalidParameter);
  CHECK(field == "lambda");
  CHECK(code_of({1, 0, 0, 0, 0, 0.5}, &field) == ErrorCode::InvalidParameter);
  CHECK(field == "b");
  CHECK(code_of({1, 0, 1, -0.1, 0, 0.5}, &field) == ErrorCode::InvalidParameter);
  CHECK(field == "dn");
  CHECK(code_of({1, 0, 1, 0, 0, 1.5}, &field) == ErrorCode::InvalidParameter);
  CHECK(field == "p");
  CHECK(code_of({1, std::numeric_limits<double>::quiet_NaN(), 1, 0, 0, 0.5}, &field) ==
        ErrorCode::InvalidParameter);
  CHECK(field == "a");
  CHECK(code_of({1, 0, 1, 0, std::numeric_limits<double>::infinity(), 0.5}, &field) ==
        ErrorCode::InvalidParameter);
  CHECK(field == "dr");
}

TEST_CASE("p = 0 and p = 1 are admissible") {
  CHECK_NOTHROW(validate(oracle::ex1(0.0)));
  CHECK_NOTHROW(validate(oracle::ex1(1.0)));
}

TEST_CASE("spontaneous extinction") {
  CHECK_FALSE(spontaneous_extinction(validate(oracle::ex1())));
  CHECK(spontaneous_extinction(validate({0, 0, 1, 0, 0, 0})));
  CHECK(spontaneous_extinction(validate({1, 3, 1, 0, 1, 0})));
}

TEST_CASE("property: validate is idempotent") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const RawParams raw{u(g), u(g), u(g) + 0.01, u(g), u(g), u(g) / 3.0};
    const ModelParams once = validate(raw);
    const ModelParams twice = validate(once.raw());
    CHECK(once.raw().lambda == twice.raw().lambda);
    CHECK(once.raw().p == twice.raw().p);
    CHECK(once.supercritical() == twice.supercritical());
    CHECK(once.nontrivial() == twice.nontrivial());
  }
}

TEST_CASE("property: supercritical flag is monotone in each rate") {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const RawParams raw{u(g), u(g), u(g) + 0.01, u(g), u(g), 0.5};
    const bool base = validate(raw).supercritical();
    const double bump = u(g);
    RawParams up = raw;
    up.lambda += bump;
    if (base) CHECK(validate(up).supercritical());
    up = raw;
    up.b += bump;
    if (base) CHECK(validate(up).supercritical());
    for (double RawParams::*field : {&RawParams::a, &RawParams::d_n, &RawParams::d_r}) {
      RawParams more = raw;
      more.*field += bump;
      if (!base) CHECK_FALSE(validate(more).supercritical());
    }
  }
}

TEST_CASE("population state") {
  PopulationState s{0, 0, 1.5};
  CHECK(s.extinct());
  s.r = 2;
  CHECK(s.total() == 2);
  CHECK_FALSE(s.extinct());
}
