#include "rfkl/points.hpp"

#include "rfkl/error.hpp"

namespace rfkl {

PointSet::PointSet(std::size_t dim, std::vector<double> flat)
    : dim_(dim), data_(std::move(flat)) {
  if (dim_ == 0 || data_.size() % dim_ != 0) {
    throw DimensionMismatch("point buffer length is not a multiple of the dimension");
  }
}

void PointSet::push_back(std::span<const double> x) {
  if (x.size() != dim_) throw DimensionMismatch("point has wrong dimension");
  data_.insert(data_.end(), x.begin(), x.end());
}

std::span<double> PointSet::emplace_back() {
  data_.resize(data_.size() + dim_, 0.0);
  return {data_.data() + data_.size() - dim_, dim_};
}

}  // namespace rfkl
