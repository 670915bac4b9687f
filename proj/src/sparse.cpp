#include "offlang/sparse.hpp"

namespace offlang {

double dot(std::span<const double> dense, const SparseVector& x) {
  double sum = 0.0;
  for (const auto& e : x) sum += dense[e.index] * e.value;
  return sum;
}

double squared_norm(const SparseVector& x) {
  double sum = 0.0;
  for (const auto& e : x) sum += e.value * e.value;
  return sum;
}

}  // namespace offlang
