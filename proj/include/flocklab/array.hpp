#pragma once

#include <cstddef>
#include <vector>

namespace flocklab {

/// One d-vector per agent, for n agents. Storage is dimension-major: all
/// agents' component k form one contiguous block, which is the layout the
/// vectorized row kernels consume.
class AgentArray {
 public:
  AgentArray() = default;
  AgentArray(std::size_t agents, std::size_t dim)
      : n_(agents), dim_(dim), data_(agents * dim, 0.0) {}

  std::size_t agents() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::size_t value_count() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t k) { return data_[k * n_ + i]; }
  double operator()(std::size_t i, std::size_t k) const { return data_[k * n_ + i]; }

  /// Contiguous block of component k over all agents.
  double* component(std::size_t k) { return data_.data() + k * n_; }
  const double* component(std::size_t k) const { return data_.data() + k * n_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool all_finite() const;

  void fill(double value);

  friend bool operator==(const AgentArray&, const AgentArray&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// y += a*x over all entries. Shapes must match.
void axpy(double a, const AgentArray& x, AgentArray& y);

/// Dense square matrix, row-major. Used for interaction weights.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double* row(std::size_t i) { return data_.data() + i * n_; }
  const double* row(std::size_t i) const { return data_.data() + i * n_; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace flocklab
