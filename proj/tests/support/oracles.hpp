#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "commonsense/matrix.hpp"

namespace oracle {

/// Every binary x with M x = r over the candidate columns, by depth-first
/// search on the lowest positive row. Since M is nonnegative, partial sums
/// may never exceed r. Stops once `limit` solutions are known.
class ExhaustiveSolver {
 public:
  ExhaustiveSolver(const commonsense::SupportTable& supports, std::vector<std::int64_t> r, std::size_t limit = 2)
      : sup_(supports), r_(std::move(r)), used_(supports.size(), 0), limit_(limit) {
    by_row_.resize(r_.size());
    for (std::size_t i = 0; i < sup_.size(); ++i)
      for (auto row : sup_[i]) by_row_[row].push_back(static_cast<std::uint32_t>(i));
  }

  std::set<std::vector<std::uint32_t>> solve() {
    for (auto v : r_)
      if (v < 0) return {};
    search();
    return solutions_;
  }

 private:
  void search() {
    if (solutions_.size() >= limit_) return;
    std::size_t row = 0;
    while (row < r_.size() && r_[row] == 0) ++row;
    if (row == r_.size()) {
      auto s = chosen_;
      std::sort(s.begin(), s.end());
      solutions_.insert(s);
      return;
    }
    for (std::uint32_t i : by_row_[row]) {
      if (used_[i]) continue;
      bool fits = true;
      for (auto x : sup_[i]) fits = fits && r_[x] > 0;
      if (!fits) continue;
      for (auto x : sup_[i]) --r_[x];
      used_[i] = 1;
      chosen_.push_back(i);
      search();
      chosen_.pop_back();
      used_[i] = 0;
      for (auto x : sup_[i]) ++r_[x];
    }
  }

  const commonsense::SupportTable& sup_;
  std::vector<std::int64_t> r_;
  std::vector<std::uint8_t> used_;
  std::vector<std::vector<std::uint32_t>> by_row_;
  std::vector<std::uint32_t> chosen_;
  std::set<std::vector<std::uint32_t>> solutions_;
  std::size_t limit_;
};

/// True when the hypergraph with one edge per element (its cell set) has an
/// empty 2-core, i.e. repeatedly removing edges that own a degree-one cell
/// removes every edge.
inline bool hypergraph_peels(const std::vector<std::vector<std::uint32_t>>& edges, std::size_t cells) {
  std::vector<std::vector<std::size_t>> incident(cells);
  std::vector<std::size_t> degree(cells, 0);
  for (std::size_t e = 0; e < edges.size(); ++e)
    for (auto c : edges[e]) {
      incident[c].push_back(e);
      ++degree[c];
    }
  std::vector<std::uint8_t> removed(edges.size(), 0);
  std::size_t left = edges.size();
  bool progress = true;
  while (progress && left > 0) {
    progress = false;
    for (std::size_t c = 0; c < cells; ++c) {
      if (degree[c] != 1) continue;
      for (auto e : incident[c]) {
        if (removed[e]) continue;
        removed[e] = 1;
        --left;
        for (auto c2 : edges[e]) --degree[c2];
        progress = true;
        break;
      }
    }
  }
  return left == 0;
}

/// P(X > k) for X ~ Poisson(mu), summed directly.
inline double poisson_upper_tail(double mu, std::int64_t k) {
  double p = std::exp(-mu), cdf = 0.0;
  for (std::int64_t j = 0; j <= k; ++j) {
    cdf += p;
    p *= mu / static_cast<double>(j + 1);
  }
  return std::max(0.0, 1.0 - cdf);
}

/// Bloom filter false positive rate (1 - e^{-kn/L})^k.
inline double bloom_fpp(double bits, double hashes, double n) {
  return std::pow(1.0 - std::exp(-hashes * n / bits), hashes);
}

}  // namespace oracle
