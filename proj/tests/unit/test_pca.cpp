#include <doctest.h>

#include "aiot/error.hpp"
#include "aiot/metrics.hpp"
#include "aiot/pca.hpp"
#include "support.hpp"

using namespace aiot;

TEST_CASE("retained_components") {
  CHECK(retained_components(408, 612, 0.5) == 204);
  CHECK(retained_components(10, 7, 1.0) == 7);
  CHECK(retained_components(10, 7, 0.01) == 1);
  CHECK(retained_components(10, 10, 0.25) == 3);
  CHECK_THROWS_AS(retained_components(4, 4, 0.0), Error);
  CHECK_THROWS_AS(retained_components(4, 4, 1.5), Error);
}

TEST_CASE("components are orthonormal and singular values descend") {
  test::Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto img = test::random_image(rng, 5 + rng() % 30, 5 + rng() % 30);
    const auto [basis, block] = fit_project(img, 1.0);
    const Eigen::MatrixXd gram = basis.components * basis.components.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(basis.k(), basis.k())).cwiseAbs().maxCoeff() < 1e-9);
    for (Eigen::Index i = 1; i < basis.singular_values.size(); ++i) {
      CHECK(basis.singular_values(i) <= basis.singular_values(i - 1) + 1e-12);
    }
    CHECK(retained_variance_ratio(basis) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("constant image has zero scores and exact reconstruction") {
  const GrayImage img = GrayImage::Constant(6, 9, 77);
  auto [basis, block] = fit_project(img, 0.5);
  CHECK(basis.degenerate());
  CHECK(block.scores.cwiseAbs().maxCoeff() == 0.0);
  quantize_scores(block);
  CHECK(block.quantized.cwiseAbs().maxCoeff() == 0);
  CHECK(reconstruct(basis, dequantize_scores(block)) == img);
}

TEST_CASE("rank-one data is captured by one component") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 2, 2, 4;
  const auto [basis, block] = fit_project(x, 0.5);
  REQUIRE(basis.k() == 1);
  CHECK((reconstruct_real(basis, block.scores) - x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("full retention reconstructs before quantization") {
  test::Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto img = test::random_image(rng, 3 + rng() % 40, 3 + rng() % 40);
    const auto [basis, block] = fit_project(img, 1.0);
    const Eigen::MatrixXd x = img.cast<double>();
    CHECK(rmse(reconstruct_real(basis, block.scores), x) <= 1e-6);
    CHECK(reconstruct(basis, block.scores) == img);
  }
}

TEST_CASE("reconstruction error does not grow with k") {
  test::Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto img = test::random_image(rng, 12, 16);
    const Eigen::MatrixXd x = img.cast<double>();
    double previous = 1e300;
    for (int k = 1; k <= 12; ++k) {
      const auto [basis, block] = fit_project(x, k / 12.0);
      REQUIRE(basis.k() == k);
      const double e = rmse(reconstruct_real(basis, block.scores), x);
      CHECK(e <= previous + 1e-9);
      previous = e;
    }
  }
}

TEST_CASE("score quantization") {
  ScoreBlock<double> block;
  block.scores.resize(3, 1);
  block.scores << -2.0, 0.5, 3.0;
  quantize_scores(block, 16);
  CHECK(block.quantized(0, 0) == 0);
  CHECK(block.quantized(2, 0) == 65535);
  const auto back = dequantize_scores(block);
  CHECK(back(0, 0) == -2.0);
  CHECK(back(2, 0) == doctest::Approx(3.0));

  block.scores.setConstant(1.25);
  quantize_scores(block, 16);
  CHECK(block.quantized.cwiseAbs().maxCoeff() == 0);
  CHECK((dequantize_scores(block).array() == 1.25).all());

  block.scores(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(quantize_scores(block, 16), Error);
}

TEST_CASE("score quantization error is within half a step") {
  test::Rng rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScoreBlock<double> block;
  block.scores.resize(5000, 1);
  for (Eigen::Index i = 0; i < block.scores.rows(); ++i) block.scores(i, 0) = u(rng);
  block.scores(0, 0) = 0.0;
  block.scores(1, 0) = 1.0;
  quantize_scores(block, 16);
  const double err = (dequantize_scores(block) - block.scores).cwiseAbs().maxCoeff();
  CHECK(err <= 1.0 / (2.0 * 65535.0) + 1e-15);
}

TEST_CASE("zero scores reconstruct the column means") {
  GrayImage img(2, 3);
  img << 10, 20, 31, 30, 40, 50;
  const auto [basis, block] = fit_project(img, 0.5);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, basis.k());
  const auto out = reconstruct(basis, zero);
  for (int r = 0; r < 2; ++r) {
    CHECK(out(r, 0) == 20);
    CHECK(out(r, 1) == 30);
    CHECK(out(r, 2) == 41);
  }
  const Eigen::MatrixXd wrong = Eigen::MatrixXd::Zero(2, basis.k() + 1);
  CHECK_THROWS_AS(reconstruct(basis, wrong), Error);
  CHECK_THROWS_AS(fit_project(GrayImage(GrayImage::Zero(1, 5)), 0.5), Error);
}
