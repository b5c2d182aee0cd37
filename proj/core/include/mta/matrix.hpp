#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mta {

// Row-major dense matrix of doubles. Vectors are 1×n or n×1 matrices, or
// plain std::vector<double> where no shape is needed.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const DenseMatrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a · bᵀ without materializing the transpose.
DenseMatrix matmul_transposed(const DenseMatrix& a, const DenseMatrix& b);
// aᵀ · b without materializing the transpose.
DenseMatrix transposed_matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);

// y ← y + alpha·x
void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y);
DenseMatrix scaled(const DenseMatrix& a, double alpha);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

// Rows selected by index, in the given order.
DenseMatrix gather_rows(const DenseMatrix& a, std::span<const std::size_t> indices);

double dot(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_norm(const DenseMatrix& a);
// Entrywise absolute sum.
double l1_norm(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

// Throws InvalidInput when some row does not sum to 1 within tol or has a
// negative entry.
void require_row_stochastic(const DenseMatrix& m, double tol, const char* what);
bool is_row_stochastic(const DenseMatrix& m, double tol) noexcept;

}  // namespace mta
