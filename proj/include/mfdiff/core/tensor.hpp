#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "mfdiff/core/error.hpp"

namespace mfdiff {

// Dense row-major array of rank 1..4. Activations inside the score network use
// the layout (batch, height, width, channels); solution fields use (rows, cols)
// or (rows, cols, slices).
template <class Real>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::initializer_list<int> dims) { reshape(dims); }

  static Tensor zeros(std::initializer_list<int> dims) { return Tensor(dims); }

  static Tensor full(std::initializer_list<int> dims, Real value) {
    Tensor t(dims);
    t.fill(value);
    return t;
  }

  void reshape(std::initializer_list<int> dims) {
    rank_ = 0;
    std::size_t n = 1;
    for (int d : dims) {
      if (d <= 0) throw ContractError("Tensor: nonpositive dimension");
      if (rank_ >= 4) throw ContractError("Tensor: rank > 4");
      shape_[rank_++] = d;
      n *= static_cast<std::size_t>(d);
    }
    for (int i = rank_; i < 4; ++i) shape_[i] = 1;
    data_.assign(n, Real(0));
  }

  int rank() const { return rank_; }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  const std::array<int, 4>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Real* data() { return data_.data(); }
  const Real* data() const { return data_.data(); }
  std::vector<Real>& vec() { return data_; }
  const std::vector<Real>& vec() const { return data_; }

  Real& operator[](std::size_t i) { return data_[i]; }
  Real operator[](std::size_t i) const { return data_[i]; }

  // (row, col) on a rank-2 tensor; also used as (sample, feature).
  Real& at2(int i, int j) { return data_[static_cast<std::size_t>(i) * shape_[1] + j]; }
  Real at2(int i, int j) const { return data_[static_cast<std::size_t>(i) * shape_[1] + j]; }

  Real& at3(int i, int j, int k) {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  Real at3(int i, int j, int k) const {
    return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }

  Real& at4(int n, int h, int w, int c) {
    return data_[((static_cast<std::size_t>(n) * shape_[1] + h) * shape_[2] + w) * shape_[3] + c];
  }
  Real at4(int n, int h, int w, int c) const {
    return data_[((static_cast<std::size_t>(n) * shape_[1] + h) * shape_[2] + w) * shape_[3] + c];
  }

  void fill(Real value) { std::fill(data_.begin(), data_.end(), value); }

  bool same_shape(const Tensor& o) const { return rank_ == o.rank_ && shape_ == o.shape_; }

  std::string shape_str() const {
    std::string s = "(";
    for (int i = 0; i < rank_; ++i) {
      if (i) s += ",";
      s += std::to_string(shape_[static_cast<std::size_t>(i)]);
    }
    return s + ")";
  }

  template <class To>
  Tensor<To> cast() const {
    Tensor<To> out;
    out.rank_ = rank_;
    out.shape_ = shape_;
    out.data_.resize(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = static_cast<To>(data_[i]);
    return out;
  }

  bool all_finite() const {
    for (Real v : data_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  template <class>
  friend class Tensor;

 private:
  std::vector<Real> data_;
  std::array<int, 4> shape_{1, 1, 1, 1};
  int rank_ = 0;
};

template <class Real>
void check_same_shape(const Tensor<Real>& a, const Tensor<Real>& b, const char* what) {
  if (!a.same_shape(b))
    throw ContractError(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

// y += alpha * x
template <class Real>
void axpy(Real alpha, const Tensor<Real>& x, Tensor<Real>& y) {
  check_same_shape(x, y, "axpy");
  const Real* xs = x.data();
  Real* ys = y.data();
  for (std::size_t i = 0; i < x.size(); ++i) ys[i] += alpha * xs[i];
}

template <class Real>
Real dot(const Tensor<Real>& a, const Tensor<Real>& b) {
  check_same_shape(a, b, "dot");
  Real acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class Real>
Real frobenius_norm(const Tensor<Real>& a) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * static_cast<double>(a[i]);
  return static_cast<Real>(std::sqrt(acc));
}

}  // namespace mfdiff
