#include <doctest.h>

#include <chrono>
#include <cmath>
#include <thread>

#include "aiot/error.hpp"
#include "aiot/metrics.hpp"
#include "support.hpp"

using namespace aiot;

TEST_CASE("compression_ratio") {
  const auto table6 = compression_ratio(77296, 95);
  CHECK(table6.display() == "814:1");
  CHECK(table6.numerator == 77296);
  CHECK(table6.denominator == 95);
  CHECK(table6.value() == doctest::Approx(813.6421).epsilon(1e-6));
  CHECK(compression_ratio(65536, 22).display() == "2979:1");
  CHECK(compression_ratio(65536, 22).numerator == 32768);
  CHECK(compression_ratio(65536, 22).denominator == 11);
  CHECK(compression_ratio(100, 100).display() == "1:1");
  CHECK(compression_ratio(77296, 96).display() == "805:1");
  CHECK(compression_ratio(5, 2).display() == "3:1");
  CHECK_THROWS_AS(compression_ratio(10, 0), Error);
}

TEST_CASE("rmse") {
  Eigen::RowVector2d a(0, 0), b(3, 4);
  CHECK(rmse(a, b) == doctest::Approx(std::sqrt(12.5)));
  CHECK(rmse(a, a) == 0.0);
  Eigen::Matrix<double, 1, 1> zero(0.0), full(255.0);
  CHECK(rmse(zero, full) == 255.0);
  GrayImage img = GrayImage::Constant(3, 3, 9);
  CHECK(rmse(img, img) == 0.0);
  CHECK_THROWS_AS(rmse(GrayImage(2, 3), GrayImage(3, 2)), Error);
}

TEST_CASE("timed") {
  const double idle = timed([] {});
  CHECK(idle >= 0.0);
  CHECK(idle < 1e-3);
  const double nap = timed([] { std::this_thread::sleep_for(std::chrono::milliseconds(100)); });
  CHECK(nap == doctest::Approx(0.1).epsilon(0.2));
  const auto [value, seconds] = timed([] { return 41 + 1; });
  CHECK(value == 42);
  CHECK(seconds >= 0.0);
}

TEST_CASE("resource sampling") {
  if (!ResourceSampler::supported()) return;
  const auto [unused, idle] = sample_resources([] {
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    return 0;
  });
  REQUIRE(idle.cpu_percent.has_value());
  CHECK(*idle.cpu_percent < 15.0);
  REQUIRE(idle.mem_mb.has_value());
  CHECK(*idle.mem_mb >= 0.0);

  const auto [sink, busy] = sample_resources([] {
    volatile double x = 0;
    const auto end = std::chrono::steady_clock::now() + std::chrono::milliseconds(500);
    while (std::chrono::steady_clock::now() < end) x = x + 1.0;
    return static_cast<double>(x);
  });
  CHECK(sink > 0);
  REQUIRE(busy.cpu_percent.has_value());
  CHECK(*busy.cpu_percent >= 80.0);
  CHECK(*busy.cpu_percent <= 105.0);
  CHECK_FALSE(busy.samples.empty());
}
