#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "aiot/error.hpp"
#include "aiot/image.hpp"

namespace aiot {

inline constexpr double kDefaultRetainFraction = 0.5;
inline constexpr int kDefaultScoreBits = 16;

/// Number of retained components: ceil(f * min(rows, cols)), at least 1.
inline Eigen::Index retained_components(Eigen::Index rows, Eigen::Index cols, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "retain fraction must be in (0, 1]");
  }
  const auto rank = std::min(rows, cols);
  const auto k = static_cast<Eigen::Index>(std::ceil(fraction * static_cast<double>(rank) - 1e-12));
  return std::clamp<Eigen::Index>(k, 1, rank);
}

template <typename Scalar = double>
struct PcaBasis {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  RowVector mean;           // per-column mean of the data matrix
  Matrix components;        // k x cols, orthonormal rows
  Vector singular_values;   // top k, descending
  Scalar total_energy = 0;  // sum of all squared singular values
  double retain_fraction = kDefaultRetainFraction;

  [[nodiscard]] Eigen::Index k() const noexcept { return components.rows(); }
  [[nodiscard]] Eigen::Index cols() const noexcept { return components.cols(); }
  /// True when every singular value is zero (constant columns).
  [[nodiscard]] bool degenerate() const noexcept { return total_energy == Scalar(0); }
};

template <typename Scalar = double>
struct ScoreBlock {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  using Quantized = Eigen::Matrix<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Matrix scores;  // rows x k
  RowVector min;  // affine range per component
  RowVector max;
  Quantized quantized;
  int bits = kDefaultScoreBits;
};

/// Fraction of total energy captured by the retained components.
template <typename Scalar>
Scalar retained_variance_ratio(const PcaBasis<Scalar>& basis) {
  if (basis.degenerate()) return Scalar(1);
  return basis.singular_values.squaredNorm() / basis.total_energy;
}

/// Column-centres `data`, takes its SVD and keeps the top k right singular
/// vectors. Scores are the centred rows projected onto them.
template <typename Derived>
auto fit_project(const Eigen::MatrixBase<Derived>& data, double fraction) {
  using Scalar = typename Derived::Scalar;
  using Basis = PcaBasis<Scalar>;
  using Matrix = typename Basis::Matrix;
  if (data.rows() < 2 || data.cols() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "PCA needs at least 2 rows and 2 columns");
  }
  const auto k = retained_components(data.rows(), data.cols(), fraction);

  Basis basis;
  basis.retain_fraction = fraction;
  basis.mean = data.colwise().mean();
  const Matrix centred = data.rowwise() - basis.mean;

  Eigen::BDCSVD<Matrix> svd(centred, Eigen::ComputeThinV);
  basis.components = svd.matrixV().leftCols(k).transpose();
  basis.singular_values = svd.singularValues().head(k);
  basis.total_energy = svd.singularValues().squaredNorm();

  ScoreBlock<Scalar> block;
  block.scores = centred * basis.components.transpose();
  return std::pair{std::move(basis), std::move(block)};
}

inline auto fit_project(const GrayImage& img, double fraction = kDefaultRetainFraction) {
  return fit_project(img.cast<double>(), fraction);
}

/// Per-component affine map of the scores onto [0, 2^bits - 1], rounding half
/// up. Components with a single value map to 0.
template <typename Scalar>
void quantize_scores(ScoreBlock<Scalar>& block, int bits = kDefaultScoreBits) {
  if (bits < 1 || bits > 16) throw Error(ErrorCode::InvalidConfig, "score bits must be in [1, 16]");
  if (!block.scores.allFinite()) throw Error(ErrorCode::NonFiniteScore, "PCA scores contain NaN or infinity");
  const Scalar top = static_cast<Scalar>((1u << bits) - 1u);
  block.bits = bits;
  block.min = block.scores.colwise().minCoeff();
  block.max = block.scores.colwise().maxCoeff();
  block.quantized.resize(block.scores.rows(), block.scores.cols());
  for (Eigen::Index j = 0; j < block.scores.cols(); ++j) {
    const Scalar span = block.max(j) - block.min(j);
    for (Eigen::Index i = 0; i < block.scores.rows(); ++i) {
      const Scalar q = span > Scalar(0) ? std::floor((block.scores(i, j) - block.min(j)) / span * top + Scalar(0.5)) : Scalar(0);
      block.quantized(i, j) = static_cast<std::uint16_t>(std::clamp(q, Scalar(0), top));
    }
  }
}

template <typename Scalar>
typename ScoreBlock<Scalar>::Matrix dequantize_scores(const ScoreBlock<Scalar>& block) {
  const Scalar top = static_cast<Scalar>((1u << block.bits) - 1u);
  typename ScoreBlock<Scalar>::Matrix out(block.quantized.rows(), block.quantized.cols());
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const Scalar step = (block.max(j) - block.min(j)) / top;
    out.col(j) = (block.quantized.col(j).template cast<Scalar>().array() * step + block.min(j)).matrix();
  }
  return out;
}

/// scores * components + mean, unrounded.
template <typename Scalar, typename Derived>
typename PcaBasis<Scalar>::Matrix reconstruct_real(const PcaBasis<Scalar>& basis, const Eigen::MatrixBase<Derived>& scores) {
  if (scores.cols() != basis.k()) {
    throw Error(ErrorCode::DimensionMismatch,
                "scores have " + std::to_string(scores.cols()) + " columns, basis has " + std::to_string(basis.k()));
  }
  typename PcaBasis<Scalar>::Matrix out = scores * basis.components;
  out.rowwise() += basis.mean;
  return out;
}

/// Reconstruction rounded to the nearest intensity and clamped to [0, 255].
template <typename Scalar, typename Derived>
GrayImage reconstruct(const PcaBasis<Scalar>& basis, const Eigen::MatrixBase<Derived>& scores) {
  const auto real = reconstruct_real(basis, scores);
  GrayImage img(real.rows(), real.cols());
  for (Eigen::Index i = 0; i < real.rows(); ++i) {
    for (Eigen::Index j = 0; j < real.cols(); ++j) {
      const double v = std::floor(static_cast<double>(real(i, j)) + 0.5);
      img(i, j) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return img;
}

}  // namespace aiot
