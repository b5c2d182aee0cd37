#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mta/matrix.hpp"

namespace mta {

inline constexpr double kDefaultLogitEps = 1e-8;

// Row-softmax parametrization of a noise transition matrix:
// matrix(i, j) = p(noisy = j | clean = i) = softmax(logits row i)_j.
class TransitionState {
 public:
  // Throws ShapeError for non-square logits, InvalidInput for non-finite ones.
  static TransitionState from_logits(DenseMatrix logits);

  std::size_t classes() const noexcept { return logits_.rows(); }
  const DenseMatrix& logits() const noexcept { return logits_; }
  const DenseMatrix& matrix() const noexcept { return matrix_; }

 private:
  TransitionState(DenseMatrix logits, DenseMatrix matrix)
      : logits_(std::move(logits)), matrix_(std::move(matrix)) {}

  DenseMatrix logits_;
  DenseMatrix matrix_;
};

enum class NoiseKind { kSymmetric, kPairs };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kSymmetric;
  double rate = 0.0;
  // (source, target) class pairs; only used for kPairs.
  std::vector<std::pair<int, int>> pairs;
};

std::string to_string(NoiseKind kind);
// Accepts "symmetric" and "pairs" (also "asymmetric", "pairflip").
NoiseKind parse_noise_kind(const std::string& text);
// "0:1,1:2" → {(0,1),(1,2)}.
std::vector<std::pair<int, int>> parse_pairs(const std::string& text);
std::string format_pairs(const std::vector<std::pair<int, int>>& pairs);

// Diagonal 1−eta, off-diagonal eta/(c−1).
DenseMatrix symmetric_matrix(std::size_t classes, double eta);
// Rows listed as pair sources get 1−rate on the diagonal and rate at the
// target; all other rows are identity rows.
DenseMatrix pairflip_matrix(std::size_t classes, double rate,
                            const std::vector<std::pair<int, int>>& pairs);
DenseMatrix noise_matrix(std::size_t classes, const NoiseSpec& spec);

// i → i+1 mod c for every class.
std::vector<std::pair<int, int>> cyclic_pairs(std::size_t classes);
// truck→automobile, bird→airplane, deer→horse, cat→dog on CIFAR-10 indices.
std::vector<std::pair<int, int>> cifar10_pairs();

// logits(i, j) = log(estimate(i, j) + eps).
DenseMatrix logits_from_estimate(const DenseMatrix& estimate, double eps = kDefaultLogitEps);

// Noisy posteriors: row b of the result is Tᵀ · posteriors row b.
DenseMatrix apply(const DenseMatrix& transition, const DenseMatrix& posteriors);

// Chain rule through the row softmax: grad(k, l) = Σ_j dT(k, j)·T(k, j)·([j=l] − T(k, l)).
DenseMatrix grad_wrt_logits(const TransitionState& state, const DenseMatrix& d_loss_d_matrix);

}  // namespace mta
