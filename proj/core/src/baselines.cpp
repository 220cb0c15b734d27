#include "commonsense/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "commonsense/error.hpp"
#include "commonsense/hashing.hpp"

namespace commonsense {

double log2_binomial(double n, double k) {
  if (k < 0 || k > n) throw Error(Errc::invalid_argument, "binomial coefficient out of range");
  return (std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) / std::numbers::ln2;
}

double setx_lower_bound(std::int64_t size_a, std::int64_t size_b, std::int64_t a_minus_b, std::int64_t b_minus_a) {
  if (size_a < 0 || size_b < 0 || a_minus_b < 0 || b_minus_a < 0 || a_minus_b > size_a || b_minus_a > size_b ||
      size_a - a_minus_b != size_b - b_minus_a)
    throw Error(Errc::invalid_argument, "inconsistent set cardinalities");
  return log2_binomial(static_cast<double>(size_a), static_cast<double>(a_minus_b)) +
         log2_binomial(static_cast<double>(size_b), static_cast<double>(b_minus_a));
}

double setr_lower_bound(std::int64_t d, unsigned universe_bits) {
  if (d < 1) throw Error(Errc::invalid_argument, "difference must be positive");
  const double dd = static_cast<double>(d);
  return dd * (std::log2(std::numbers::e) + universe_bits - std::log2(dd));
}

double setr_lower_bound_two_sided(std::int64_t a_minus_b, std::int64_t b_minus_a, unsigned universe_bits) {
  if (a_minus_b < 0 || b_minus_a < 0 || a_minus_b + b_minus_a < 1)
    throw Error(Errc::invalid_argument, "difference must be positive");
  double bits = 0.0;
  for (auto side : {a_minus_b, b_minus_a})
    if (side > 0) bits += setr_lower_bound(side, universe_bits);
  return bits;
}

IbltParams IbltParams::for_difference(std::int64_t d, unsigned universe_bits, double hedge, std::uint32_t hash_count,
                                      unsigned fingerprint_bits, std::uint64_t seed) {
  IbltParams p;
  p.cell_count = std::max<std::uint32_t>(hash_count, static_cast<std::uint32_t>(std::ceil(hedge * std::max<std::int64_t>(d, 1))));
  p.hash_count = hash_count;
  p.fingerprint_bits = fingerprint_bits;
  p.universe_bits = universe_bits;
  p.seed = seed;
  return p;
}

void IbltParams::validate() const {
  if (hash_count < 1 || cell_count < hash_count) throw Error(Errc::invalid_argument, "IBLT needs at least hash_count cells");
  if (fingerprint_bits != 32 && fingerprint_bits != 48) throw Error(Errc::invalid_argument, "fingerprint width must be 32 or 48");
  if (universe_bits < 1 || universe_bits > 256) throw Error(Errc::invalid_argument, "universe_bits must be in [1, 256]");
}

IbltTable::IbltTable(const IbltParams& params)
    : params_(params),
      cell_key_(derive_key(params.seed, HashDomain::iblt_cell)),
      fp_key_(derive_key(params.seed, HashDomain::iblt_fingerprint)) {
  params_.validate();
  cells_.resize(params_.cell_count);
}

std::vector<std::uint32_t> IbltTable::cells_of(const ElementId& id) const {
  std::vector<std::uint32_t> out;
  out.reserve(params_.hash_count);
  const std::uint64_t base = keyed_hash(cell_key_, id);
  for (std::uint64_t j = 0; out.size() < params_.hash_count; ++j) {
    const std::uint32_t c = reduce_range(mix64(base + j * 0x9e3779b97f4a7c15ULL), params_.cell_count);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

std::uint64_t IbltTable::fingerprint(const ElementId& id) const noexcept {
  return keyed_hash(fp_key_, id) & ((std::uint64_t{1} << params_.fingerprint_bits) - 1);
}

void IbltTable::toggle(const ElementId& id, int sign) {
  const std::uint64_t fp = fingerprint(id);
  for (std::uint32_t c : cells_of(id)) {
    auto& cell = cells_[c];
    cell.count += sign;
    for (int k = 0; k < 4; ++k) cell.id_sum.limbs[k] ^= id.limbs[k];
    cell.fingerprint_sum ^= fp;
  }
}

bool IbltTable::empty() const noexcept {
  return std::all_of(cells_.begin(), cells_.end(), [](const IbltCell& c) { return c.empty(); });
}

IbltTable iblt_encode(std::span<const ElementId> elements, const IbltParams& params) {
  IbltTable t(params);
  for (const auto& e : elements) t.insert(e);
  return t;
}

IbltTable iblt_subtract(const IbltTable& t1, const IbltTable& t2) {
  const auto& a = t1.params_;
  const auto& b = t2.params_;
  if (a.cell_count != b.cell_count || a.hash_count != b.hash_count || a.fingerprint_bits != b.fingerprint_bits ||
      a.universe_bits != b.universe_bits || a.seed != b.seed)
    throw Error(Errc::spec_mismatch, "IBLT parameters differ");
  IbltTable out = t1;
  for (std::size_t i = 0; i < out.cells_.size(); ++i) {
    auto& c = out.cells_[i];
    const auto& d = t2.cells_[i];
    c.count -= d.count;
    for (int k = 0; k < 4; ++k) c.id_sum.limbs[k] ^= d.id_sum.limbs[k];
    c.fingerprint_sum ^= d.fingerprint_sum;
  }
  return out;
}

IbltPeelResult iblt_peel(IbltTable table) {
  IbltPeelResult res;
  auto pure = [&](std::uint32_t i) {
    const auto& c = table.cells_[i];
    return (c.count == 1 || c.count == -1) && table.fingerprint(c.id_sum) == c.fingerprint_sum;
  };
  std::vector<std::uint32_t> stack;
  for (std::uint32_t i = 0; i < table.cells_.size(); ++i)
    if (pure(i)) stack.push_back(i);
  while (!stack.empty()) {
    const std::uint32_t i = stack.back();
    stack.pop_back();
    if (!pure(i)) continue;
    const ElementId id = table.cells_[i].id_sum;
    const int sign = static_cast<int>(table.cells_[i].count);
    if (id.bit_width() > table.params_.universe_bits) break;
    (sign > 0 ? res.positive : res.negative).push_back(id);
    table.toggle(id, -sign);
    for (std::uint32_t c : table.cells_of(id))
      if (pure(c)) stack.push_back(c);
  }
  res.ok = table.empty();
  std::sort(res.positive.begin(), res.positive.end());
  std::sort(res.negative.begin(), res.negative.end());
  return res;
}

IbltSessionCost iblt_bidirectional(std::span<const ElementId> sender, std::span<const ElementId> receiver,
                                   const IbltParams& params) {
  IbltSessionCost cost;
  const IbltTable ts = iblt_encode(sender, params);
  const IbltTable tr = iblt_encode(receiver, params);
  cost.first_message_bytes = ts.wire_bytes();
  const IbltPeelResult peel = iblt_peel(iblt_subtract(ts, tr));
  const double index_bits = sender.size() > 1 ? std::log2(static_cast<double>(sender.size())) : 1.0;
  cost.second_message_bytes =
      static_cast<std::uint64_t>(std::ceil(static_cast<double>(peel.positive.size()) * index_bits / 8.0));
  if (!peel.ok) return cost;

  auto minus = [](std::span<const ElementId> set, const std::vector<ElementId>& remove) {
    std::vector<ElementId> s(set.begin(), set.end());
    std::sort(s.begin(), s.end());
    std::vector<ElementId> out;
    std::set_difference(s.begin(), s.end(), remove.begin(), remove.end(), std::back_inserter(out));
    return out;
  };
  cost.receiver_intersection = minus(receiver, peel.negative);
  cost.sender_intersection = minus(sender, peel.positive);
  cost.ok = cost.sender_intersection.size() + peel.positive.size() == sender.size() &&
            cost.receiver_intersection.size() + peel.negative.size() == receiver.size();
  return cost;
}

}  // namespace commonsense
