#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace offlang {

/// Fisher-Yates over mt19937_64. std::shuffle is avoided because its output is
/// implementation-defined, and saved models must be identical across builds.
template <typename T>
void seeded_shuffle(std::span<T> items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace offlang
