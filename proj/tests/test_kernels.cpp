#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "gpattr/error.hpp"
#include "gpattr/intensity.hpp"
#include "gpattr/io.hpp"

using namespace gpattr;

namespace {

// Composite Simpson over (0, upper].
double integrate(const Kernel& k, double upper, int n = 200000) {
  const double h = upper / n;
  double s = k.right_limit(0.0) + k(upper);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * k(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("kernels vanish on (-inf, 0] and have unit mass") {
  for (auto shape : {KernelShape::ExpDecay, KernelShape::HalfGaussian}) {
    for (double t0 : {0.5, 3.0, 10.0}) {
      const Kernel k(shape, t0);
      CAPTURE(to_string(shape));
      CHECK(k(0.0) == 0.0);
      CHECK(k(-1.0) == 0.0);
      const double tail = 1.0 - k.cumulative(50.0 * t0);
      CHECK(std::abs(integrate(k, 50.0 * t0) + tail - 1.0) < 1e-6);
      CHECK(std::abs(k.cumulative(1e6 * t0) - 1.0) < 1e-8);
    }
  }
  // Boxcar: the jump at T0 sits on a grid point.
  const Kernel box(KernelShape::Boxcar, 10.0);
  CHECK(box(10.0) == doctest::Approx(0.1));
  CHECK(box(10.0 + 1e-12) == 0.0);
  CHECK(box.right_limit(0.0) == doctest::Approx(0.1));
  CHECK(box.right_limit(10.0) == 0.0);
  CHECK(box.cumulative(10.0) == doctest::Approx(1.0));
  CHECK(box.cumulative(5.0) == doctest::Approx(0.5));
  double mass = 0.0;
  for (int i = 1; i <= 100000; ++i) mass += box(i * 1e-4) * 1e-4;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("kernel shapes match their formulas") {
  CHECK(Kernel(KernelShape::ExpDecay, 10.0)(5.0) == doctest::Approx(std::exp(-0.5) / 10.0));
  const double hg = std::sqrt(2.0 / (M_PI * 4.0)) * std::exp(-9.0 / 8.0);
  CHECK(Kernel(KernelShape::HalfGaussian, 2.0)(3.0) == doctest::Approx(hg));
  CHECK_THROWS_AS(Kernel(KernelShape::ExpDecay, 0.0), InvalidArgument);
  CHECK(parse_kernel_shape("exp_decay") == KernelShape::ExpDecay);
  CHECK(parse_kernel_shape("half_gaussian") == KernelShape::HalfGaussian);
  CHECK_THROWS_AS(parse_kernel_shape("gamma"), InvalidArgument);
}

TEST_CASE("feature values") {
  const auto path = fixtures::figure3_path();
  const KernelTable exp10(3, 2, Kernel(KernelShape::ExpDecay, 10.0));
  CHECK(feature(path, exp10, 0, 0, 7.0) == 1.0);
  CHECK(feature(path, exp10, 0, 1 + 1, 7.0) == doctest::Approx(0.14536490541299).epsilon(1e-12));
  CHECK(feature(path, exp10, 0, 1 + 1, 1.0) == 0.0);  // strictly earlier events only
  CHECK(feature(path, exp10, 0, 1 + 0, 7.0) == 0.0);

  const KernelTable box(2, 1, Kernel(KernelShape::Boxcar, 10.0));
  const Path single{"s", 20.0, {{0.0, 1}}};
  CHECK(feature(single, box, 0, 2, 5.0) == doctest::Approx(0.1));
}

TEST_CASE("Figure-3 conversion intensity") {
  const auto path = fixtures::figure3_path();
  const auto params = fixtures::figure3_params();
  CHECK(intensity(path, params, 0, 7.0) == doctest::Approx(0.01357761815429561).epsilon(1e-12));

  ModelParams flat(3, 2, Kernel(KernelShape::ExpDecay, 10.0));
  flat.mu(0) = 0.3;
  for (double t : {0.0, 1.0, 3.5, 7.0}) CHECK(intensity(path, flat, 0, t) == 0.3);
  CHECK_THROWS_AS(intensity(path, params, 2, 7.0), InvalidArgument);
}

TEST_CASE("intensity is left-continuous and removal never increases it") {
  const auto path = fixtures::figure3_path();
  const auto params = fixtures::figure3_params();
  const double at = intensity(path, params, 0, 6.0);
  const double after = intensity(path, params, 0, 6.0 + 1e-9);
  CHECK(after - at == doctest::Approx(0.02 * 0.1).epsilon(1e-6));
  CHECK(intensity_right_limit(path, params, 0, 6.0) == doctest::Approx(after).epsilon(1e-8));

  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto c = fixtures::random_case(rng);
    const auto p = fixtures::random_path(rng, 10, 5);
    EventMask mask(p.events.size());
    for (auto& m : mask) m = static_cast<std::uint8_t>(rng() & 1);
    for (double t = 0.0; t <= p.horizon; t += 0.7)
      for (TypeIndex e = 0; e < 3; ++e) CHECK(intensity(p, c.params, e, t, mask) <= intensity(p, c.params, e, t));
  }
}

TEST_CASE("compensator integrates the intensity") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    auto c = fixtures::random_case(rng);
    for (auto shape : {KernelShape::ExpDecay, KernelShape::Boxcar, KernelShape::HalfGaussian}) {
      c.params.kernels = KernelTable(5, 3, Kernel(shape, 3.0));
      const auto p = fixtures::random_path(rng, 8, 5);
      const double a = 0.5, b = p.horizon;
      const int n = 400000;
      double riemann = 0.0;
      for (int i = 0; i < n; ++i) riemann += intensity(p, c.params, 1, a + (i + 0.5) * (b - a) / n) * (b - a) / n;
      CHECK(compensator(p, c.params, 1, a, b) == doctest::Approx(riemann).epsilon(1e-5));
    }
  }
}

TEST_CASE("extract_graph uses a strict threshold") {
  ModelParams zero(3, 2, Kernel(KernelShape::ExpDecay, 1.0));
  CHECK(extract_graph(zero).size() == 0);
  zero.alpha(2, 1) = 0.005;
  CHECK(extract_graph(zero, 0.01).size() == 0);
  CHECK(extract_graph(zero).contains(2, 1));
}

TEST_CASE("model JSON resolves names and round-trips") {
  const auto cat = fixtures::figure3_catalog();
  const auto params = fixtures::figure3_params();
  const auto back = model_from_json(model_to_json(params, cat), cat);
  CHECK(back.mu == params.mu);
  CHECK(back.alpha == params.alpha);
  CHECK(back.kernels == params.kernels);

  const auto j = Json::parse(R"({"types": ["disp_imp", "conv", "search_imp"], "targets": ["search_imp", "conv"],
    "mu": [0.5, 0.01], "alpha": [[0.3, 0.01], [0, 0], [0, 0.02]], "kernel": {"shape": "exp", "T0": 10}})");
  const auto named = model_from_json(j, cat);
  CHECK(named.mu(0) == 0.01);
  CHECK(named.mu(1) == 0.5);
  CHECK(named.alpha(2, 1) == 0.3);
  CHECK(named.alpha(2, 0) == 0.01);
  CHECK(named.alpha(1, 0) == 0.02);

  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"mu": [1], "alpha": [], "kernel": {"shape": "exp", "T0": 1}})"), cat),
                  ParseError);
  CHECK_THROWS(model_from_json(Json::parse(R"({"mu": [1, -1], "alpha": [[0,0],[0,0],[0,0]],
    "kernel": {"shape": "exp", "T0": 1}})"), cat));
}
