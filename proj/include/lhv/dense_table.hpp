#pragma once

#include <Eigen/Core>

#include <cassert>
#include <initializer_list>
#include <numeric>
#include <utility>
#include <vector>

namespace lhv {

/// Dense N-axis table over a fixed axis-size list, row-major (last axis
/// fastest).  Backed by a flat Eigen array so tables compose with Eigen
/// expressions; iteration in flat order visits cells in lexicographic
/// order of their multi-indices, which is the summation order contract
/// used throughout the library.
template <typename Scalar>
class DenseTable {
 public:
  using Storage = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using Index = Eigen::Index;

  DenseTable() = default;

  explicit DenseTable(std::vector<Index> dims) : dims_(std::move(dims)) {
    strides_.assign(dims_.size(), 1);
    for (int k = static_cast<int>(dims_.size()) - 2; k >= 0; --k) {
      strides_[k] = strides_[k + 1] * dims_[k + 1];
    }
    Index total = 1;
    for (Index d : dims_) total *= d;
    data_ = Storage::Zero(total);
  }

  Index rank() const { return static_cast<Index>(dims_.size()); }
  Index dim(Index axis) const { return dims_[axis]; }
  const std::vector<Index>& dims() const { return dims_; }
  Index size() const { return data_.size(); }

  template <typename... Ix>
  Index flat_index(Ix... idx) const {
    assert(sizeof...(Ix) == dims_.size());
    const Index ix[] = {static_cast<Index>(idx)...};
    Index flat = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      assert(ix[k] >= 0 && ix[k] < dims_[k]);
      flat += ix[k] * strides_[k];
    }
    return flat;
  }

  template <typename... Ix>
  Scalar& operator()(Ix... idx) {
    return data_[flat_index(idx...)];
  }

  template <typename... Ix>
  const Scalar& operator()(Ix... idx) const {
    return data_[flat_index(idx...)];
  }

  Scalar& flat(Index i) { return data_[i]; }
  const Scalar& flat(Index i) const { return data_[i]; }

  Storage& array() { return data_; }
  const Storage& array() const { return data_; }

  /// Multi-index of a flat position, in axis order.
  std::vector<Index> unravel(Index flat) const {
    std::vector<Index> ix(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      ix[k] = flat / strides_[k];
      flat -= ix[k] * strides_[k];
    }
    return ix;
  }

  bool same_dims(const DenseTable& other) const { return dims_ == other.dims_; }

 private:
  std::vector<Index> dims_;
  std::vector<Index> strides_;
  Storage data_;
};

}  // namespace lhv
