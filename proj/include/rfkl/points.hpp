#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rfkl {

/// A set of points in R^n stored row-major in one contiguous buffer.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::vector<double> flat);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  void reserve(std::size_t count) { data_.reserve(count * dim_); }
  void push_back(std::span<const double> x);
  /// Appends a zero row and returns a view of it.
  std::span<double> emplace_back();

  const std::vector<double>& flat() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace rfkl
