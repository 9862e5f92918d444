#include <doctest.h>

#include <cmath>
#include <vector>

#include "crib/core/errors.hpp"
#include "crib/transfer/dop853.hpp"

using namespace crib;

TEST_CASE("rotating phase is reproduced at every sample") {
  const double omega = 37.0;
  OdeRhs rhs = [&](double, std::span<const Complex> y, std::span<Complex> dy) {
    dy[0] = Complex{0.0, -omega} * y[0];
  };
  ComplexVector y{1.0};
  std::vector<double> samples;
  for (int i = 0; i <= 1000; ++i) samples.push_back(2.0 * i / 1000.0);
  double worst = 0.0;
  std::size_t seen = 0;
  IntegratorStats stats;
  IntegratorOptions opt;
  opt.rtol = 1e-11;
  opt.atol = 1e-13;
  integrate_dop853(rhs, 0.0, 2.0, y, samples,
                   [&](double t, std::span<const Complex> v) {
                     ++seen;
                     worst = std::max(worst, std::abs(v[0] - std::exp(Complex{0.0, -omega * t})));
                   },
                   opt, stats);
  CHECK(seen == 1000);  // t = 0 is not reported
  CHECK(worst < 1e-8);
  CHECK(std::abs(y[0] - std::exp(Complex{0.0, -omega * 2.0})) < 1e-9);
  CHECK(stats.accepted > 0);
}

TEST_CASE("linear system with a non-normal coupling") {
  // y0' = y1, y1' = -y0: cosine and sine.
  OdeRhs rhs = [](double, std::span<const Complex> y, std::span<Complex> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  ComplexVector y{1.0, 0.0};
  IntegratorStats stats;
  integrate_dop853(rhs, 0.0, 10.0, y, {}, [](double, std::span<const Complex>) {}, {}, stats);
  CHECK(std::abs(y[0] - std::cos(10.0)) < 1e-8);
  CHECK(std::abs(y[1] + std::sin(10.0)) < 1e-8);
}

TEST_CASE("lands exactly on the end point and reports samples there") {
  OdeRhs rhs = [](double, std::span<const Complex> y, std::span<Complex> dy) { dy[0] = -y[0]; };
  ComplexVector y{1.0};
  std::vector<double> samples{0.5, 1.0, 1.5};
  std::vector<double> got;
  IntegratorStats stats;
  integrate_dop853(rhs, 0.0, 1.0, y, samples, [&](double t, std::span<const Complex>) { got.push_back(t); }, {},
                   stats);
  CHECK(got == std::vector<double>{0.5, 1.0});
}

TEST_CASE("zero-length interval leaves the state alone") {
  OdeRhs rhs = [](double, std::span<const Complex>, std::span<Complex> dy) { dy[0] = 1.0; };
  ComplexVector y{2.0};
  IntegratorStats stats;
  integrate_dop853(rhs, 1.0, 1.0, y, {}, [](double, std::span<const Complex>) {}, {}, stats);
  CHECK(y[0] == Complex(2.0));
  CHECK(stats.evaluations == 0);
}

TEST_CASE("finite-time blow-up is reported with the time") {
  // y' = y^2, y(0) = 1 diverges at t = 1.
  OdeRhs rhs = [](double, std::span<const Complex> y, std::span<Complex> dy) { dy[0] = y[0] * y[0]; };
  ComplexVector y{1.0};
  IntegratorStats stats;
  try {
    integrate_dop853(rhs, 0.0, 2.0, y, {}, [](double, std::span<const Complex>) {}, {}, stats);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CAPTURE(msg);
    CHECK(msg.find("t = ") != std::string::npos);
    const double t_fail = std::stod(msg.substr(msg.find("t = ") + 4));
    CHECK(t_fail == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("rejects a reversed interval") {
  OdeRhs rhs = [](double, std::span<const Complex>, std::span<Complex>) {};
  ComplexVector y{1.0};
  IntegratorStats stats;
  CHECK_THROWS_AS(integrate_dop853(rhs, 1.0, 0.0, y, {}, [](double, std::span<const Complex>) {}, {}, stats),
                  ConfigError);
}
