#include <catch2/catch_amalgamated.hpp>

#include "medsynth/rng.hpp"

using namespace medsynth;

TEST_CASE("stream seeds are stable and frame-independent") {
  CHECK(stream_seed(42, 0) == stream_seed(42, 0));
  CHECK(stream_seed(42, 0) != stream_seed(42, 1));
  CHECK(stream_seed(42, 0) != stream_seed(43, 0));
  CHECK(stream_seed(42, 7, 1) != stream_seed(42, 7, 2));
}

TEST_CASE("rng streams with equal seeds are identical") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("beta(20,20) sample statistics match the closed form") {
  Rng rng(991);
  double sum = 0.0, sum2 = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    double x = rng.beta(20.0, 20.0);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    sum += x;
    sum2 += x * x;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  // Beta(20,20): mean 0.5, sd sqrt(400/(1600*41)) = 0.078087
  CHECK(std::fabs(mean - 0.5) < 0.01);
  CHECK(std::fabs(std::sqrt(var) - 0.078087) < 0.008);
}

TEST_CASE("clamped normal stays inside the bound") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    double x = rng.clamped_normal(1.0, 3.0);
    CHECK(x >= -3.0);
    CHECK(x <= 3.0);
  }
}
