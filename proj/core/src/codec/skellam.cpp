#include "commonsense/codec/skellam.hpp"

#include <algorithm>
#include <cmath>

#include "commonsense/error.hpp"

namespace commonsense::codec {

namespace {

std::size_t poisson_support(double mu) {
  if (mu <= 0.0) return 1;
  return static_cast<std::size_t>(std::ceil(mu + 14.0 * std::sqrt(mu) + 40.0));
}

}  // namespace

SkellamParams skellam_fit(std::span<const std::int64_t> values) {
  if (values.empty()) throw Error(Errc::invalid_argument, "cannot fit an empty sample");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (std::int64_t v : values) sum += static_cast<double>(v);
  const double mean = sum / n;
  double ss = 0.0;
  for (std::int64_t v : values) {
    const double d = static_cast<double>(v) - mean;
    ss += d * d;
  }
  const double var = values.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {std::max(kSkellamFloor, (var + mean) / 2.0), std::max(kSkellamFloor, (var - mean) / 2.0)};
}

std::vector<double> poisson_pmf(double mu, std::size_t n) {
  if (mu < 0.0 || !std::isfinite(mu)) throw Error(Errc::invalid_argument, "Poisson rate must be finite and >= 0");
  std::vector<double> p(n, 0.0);
  if (n == 0) return p;
  if (mu == 0.0) {
    p[0] = 1.0;
    return p;
  }
  const double log_mu = std::log(mu);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    p[k] = std::exp(kk * log_mu - mu - std::lgamma(kk + 1.0));
  }
  return p;
}

PmfTable skellam_full_pmf(SkellamParams params) {
  if (params.mu1 < 0.0 || params.mu2 < 0.0) throw Error(Errc::invalid_argument, "Skellam rates must be >= 0");
  const auto p1 = poisson_pmf(params.mu1, poisson_support(params.mu1));
  const auto p2 = poisson_pmf(params.mu2, poisson_support(params.mu2));
  PmfTable t;
  t.min_symbol = -static_cast<std::int64_t>(p2.size() - 1);
  t.pmf.assign(p1.size() + p2.size() - 1, 0.0);
  // pmf(i - j) += p1(i) p2(j), indexed from -(|p2| - 1).
  for (std::size_t j = 0; j < p2.size(); ++j) {
    if (p2[j] == 0.0) continue;
    const std::size_t base = p2.size() - 1 - j;
    for (std::size_t i = 0; i < p1.size(); ++i) t.pmf[base + i] += p1[i] * p2[j];
  }
  double mass = 0.0;
  for (double x : t.pmf) mass += x;
  t.tail_mass = std::max(0.0, 1.0 - mass);
  return t;
}

PmfTable skellam_pmf(SkellamParams params, double tail_target, unsigned quant_bits) {
  PmfTable full = skellam_full_pmf(params);
  const std::size_t max_alphabet = (std::size_t{1} << quant_bits) / 2;
  std::size_t lo = 0;
  std::size_t hi = full.pmf.size();  // exclusive
  double left = 0.0;
  double right = 0.0;
  // Trim the lighter end while the accumulated outside mass stays in budget.
  while (hi - lo > 1) {
    const bool trim_left = full.pmf[lo] <= full.pmf[hi - 1];
    const double next = trim_left ? full.pmf[lo] : full.pmf[hi - 1];
    if (left + right + next + full.tail_mass >= tail_target && hi - lo <= max_alphabet) break;
    if (trim_left) {
      left += full.pmf[lo++];
    } else {
      right += full.pmf[--hi];
    }
  }
  PmfTable t;
  t.min_symbol = full.min_symbol + static_cast<std::int64_t>(lo);
  t.pmf.assign(full.pmf.begin() + static_cast<std::ptrdiff_t>(lo), full.pmf.begin() + static_cast<std::ptrdiff_t>(hi));
  t.tail_mass = left + right + full.tail_mass;
  return t;
}

SymbolModel skellam_model(SkellamParams params, unsigned quant_bits) {
  const PmfTable t = skellam_pmf(params, kDefaultTailMass, quant_bits);
  return SymbolModel::from_pmf(t.min_symbol, t.pmf, t.tail_mass, quant_bits);
}

SymbolModel folded_model(SkellamParams params, std::int64_t modulus, unsigned quant_bits) {
  if (modulus < 1 || static_cast<std::uint64_t>(modulus) + 1 > (std::uint64_t{1} << quant_bits))
    throw Error(Errc::invalid_argument, "modulus does not fit the quantizer");
  const PmfTable full = skellam_full_pmf(params);
  std::vector<double> folded(static_cast<std::size_t>(modulus), 0.0);
  for (std::size_t i = 0; i < full.pmf.size(); ++i) {
    const std::int64_t k = full.min_symbol + static_cast<std::int64_t>(i);
    const std::int64_t r = ((k % modulus) + modulus) % modulus;
    folded[static_cast<std::size_t>(r)] += full.pmf[i];
  }
  return SymbolModel::from_pmf(0, folded, 0.0, quant_bits);
}

double skellam_entropy_bits(SkellamParams params) {
  const PmfTable full = skellam_full_pmf(params);
  double h = 0.0;
  for (double p : full.pmf)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

Interval skellam_interval(SkellamParams params, double p_out) {
  const PmfTable full = skellam_full_pmf(params);
  const std::int64_t zero = -full.min_symbol;
  std::int64_t lo = zero;
  std::int64_t hi = zero;
  const auto n = static_cast<std::int64_t>(full.pmf.size());
  double inside = full.pmf[static_cast<std::size_t>(zero)];
  while (1.0 - inside > p_out && (lo > 0 || hi < n - 1)) {
    const double l = lo > 0 ? full.pmf[static_cast<std::size_t>(lo - 1)] : -1.0;
    const double r = hi < n - 1 ? full.pmf[static_cast<std::size_t>(hi + 1)] : -1.0;
    if (r >= l) {
      inside += r;
      ++hi;
    } else {
      inside += l;
      --lo;
    }
  }
  return {lo - zero, hi - zero};
}

}  // namespace commonsense::codec
