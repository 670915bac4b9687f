#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace offlang {

struct SparseEntry {
  std::uint32_t index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Entries sorted by strictly increasing index; zero values are not stored.
using SparseVector = std::vector<SparseEntry>;

double dot(std::span<const double> dense, const SparseVector& x);
double squared_norm(const SparseVector& x);

/// Row-major sparse design matrix with a fixed column count.
struct SparseMatrix {
  std::size_t cols = 0;
  std::vector<SparseVector> rows;

  std::size_t size() const { return rows.size(); }
};

}  // namespace offlang
