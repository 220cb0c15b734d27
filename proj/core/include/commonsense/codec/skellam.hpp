#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "commonsense/codec/rans.hpp"

namespace commonsense::codec {

/// Skellam(mu1, mu2) = Poisson(mu1) - Poisson(mu2).
struct SkellamParams {
  double mu1 = 0.0;
  double mu2 = 0.0;

  friend bool operator==(const SkellamParams&, const SkellamParams&) = default;
};

inline constexpr double kSkellamFloor = 1e-6;
/// Largest rate accepted by the coding models; values beyond it go through escapes.
inline constexpr double kMaxModelRate = 1e4;
/// Maximum probability mass left outside the coded alphabet.
inline constexpr double kDefaultTailMass = 1.0 / (1 << 20);

/// Method-of-moments fit: mu1 = (S^2 + mean) / 2, mu2 = (S^2 - mean) / 2,
/// each floored at kSkellamFloor. Throws on an empty input.
SkellamParams skellam_fit(std::span<const std::int64_t> values);

/// Poisson pmf on {0, ..., n-1}, evaluated in log space.
std::vector<double> poisson_pmf(double mu, std::size_t n);

/// Probability table over [min_symbol, min_symbol + pmf.size()).
struct PmfTable {
  std::int64_t min_symbol = 0;
  std::vector<double> pmf;
  double tail_mass = 0.0;  // mass outside the table

  std::int64_t max_symbol() const noexcept { return min_symbol + static_cast<std::int64_t>(pmf.size()) - 1; }
  double at(std::int64_t k) const noexcept {
    return k < min_symbol || k > max_symbol() ? 0.0 : pmf[static_cast<std::size_t>(k - min_symbol)];
  }
};

/// Full pmf by convolution of Poisson pmfs truncated where their tails fall
/// below 1e-18; tail_mass is the mass the truncation lost.
PmfTable skellam_full_pmf(SkellamParams params);

/// Smallest alphabet around the bulk whose outside mass is below `tail_target`.
/// The alphabet is further limited so that it fits the quantizer.
PmfTable skellam_pmf(SkellamParams params, double tail_target = kDefaultTailMass,
                     unsigned quant_bits = kDefaultQuantBits);

/// Quantized coding model for Skellam-distributed symbols.
SymbolModel skellam_model(SkellamParams params, unsigned quant_bits = kDefaultQuantBits);

/// Model for (X mod modulus) with X ~ Skellam(params), alphabet [0, modulus).
SymbolModel folded_model(SkellamParams params, std::int64_t modulus, unsigned quant_bits = kDefaultQuantBits);

/// Shannon entropy of Skellam(params) in bits.
double skellam_entropy_bits(SkellamParams params);

/// Smallest interval [v, w] containing 0 whose outside probability is at most
/// `p_out`, found by greedily extending towards the heavier neighbouring side.
struct Interval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};
Interval skellam_interval(SkellamParams params, double p_out);

}  // namespace commonsense::codec
