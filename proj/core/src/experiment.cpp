#include "commonsense/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_set>

#include "commonsense/baselines.hpp"
#include "commonsense/error.hpp"
#include "commonsense/hashing.hpp"

namespace commonsense {

namespace {

std::uint64_t trial_seed(std::uint64_t seed, unsigned trial) { return mix64(seed ^ mix64(trial + 0x5eedULL)); }

}  // namespace

Instance gen_instance(const InstanceSpec& spec) {
  if (spec.common < 0 || spec.a_only < 0 || spec.b_only < 0) throw Error(Errc::invalid_argument, "negative cardinality");
  if (spec.universe_bits < 1 || spec.universe_bits > 256) throw Error(Errc::invalid_argument, "universe_bits must be in [1, 256]");
  const std::int64_t total = spec.common + spec.a_only + spec.b_only;
  if (spec.universe_bits < 63 && total > (std::int64_t{1} << spec.universe_bits))
    throw Error(Errc::infeasible, "more elements requested than the universe holds");

  std::mt19937_64 rng(spec.seed);
  const unsigned limbs = (spec.universe_bits + 63) / 64;
  const unsigned top_bits = spec.universe_bits - 64 * (limbs - 1);
  const std::uint64_t top_mask = top_bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << top_bits) - 1;

  std::vector<ElementId> drawn;
  drawn.reserve(static_cast<std::size_t>(total));
  std::unordered_set<ElementId, ElementIdHash> seen;
  seen.reserve(static_cast<std::size_t>(total) * 2);
  while (static_cast<std::int64_t>(drawn.size()) < total) {
    ElementId id;
    for (unsigned k = 0; k < limbs; ++k) id.limbs[k] = rng();
    id.limbs[limbs - 1] &= top_mask;
    if (seen.insert(id).second) drawn.push_back(id);
  }
  Instance inst;
  const auto c = static_cast<std::size_t>(spec.common);
  const auto ao = static_cast<std::size_t>(spec.a_only);
  inst.a.assign(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(c + ao));
  inst.b.assign(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(c));
  inst.b.insert(inst.b.end(), drawn.begin() + static_cast<std::ptrdiff_t>(c + ao), drawn.end());
  return inst;
}

std::vector<ElementId> native_intersection(std::vector<ElementId> a, std::vector<ElementId> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<ElementId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

const char* to_string(ProtocolKind kind) noexcept {
  switch (kind) {
    case ProtocolKind::commonsense_uni: return "commonsense-uni";
    case ProtocolKind::commonsense_bi: return "commonsense-bi";
    case ProtocolKind::iblt: return "iblt";
    case ProtocolKind::bounds: return "bounds";
  }
  return "unknown";
}

ProtocolKind parse_protocol(const std::string& name) {
  for (auto k : {ProtocolKind::commonsense_uni, ProtocolKind::commonsense_bi, ProtocolKind::iblt, ProtocolKind::bounds})
    if (name == to_string(k)) return k;
  throw Error(Errc::invalid_argument, "unknown protocol: " + name);
}

TrialResult run_trial(const GroupConfig& config, unsigned trial) {
  TrialResult r;
  const auto t0 = std::chrono::steady_clock::now();
  InstanceSpec spec = config.instance;
  spec.seed = trial_seed(config.instance.seed, trial);
  const Instance inst = gen_instance(spec);
  SessionConfig session = config.session;
  session.seed = spec.seed ^ 1;
  session.universe_bits = spec.universe_bits;
  const auto truth = native_intersection(inst.a, inst.b);

  switch (config.protocol) {
    case ProtocolKind::commonsense_uni: {
      const auto res = run_unidirectional(inst.a, inst.b, session);
      r.bytes = res.transcript.total_bytes;
      r.rounds = res.transcript.rounds;
      r.outcome = res.transcript.outcome;
      r.exact = is_success(r.outcome) && res.intersection == truth;
      break;
    }
    case ProtocolKind::commonsense_bi: {
      const auto res = run_bidirectional(inst.a, inst.b, session);
      r.bytes = res.transcript.total_bytes;
      r.rounds = res.transcript.rounds;
      r.outcome = res.transcript.outcome;
      r.exact = is_success(r.outcome) && res.alice_intersection == truth && res.bob_intersection == truth;
      break;
    }
    case ProtocolKind::iblt: {
      const std::int64_t d = spec.a_only + spec.b_only;
      const auto params = IbltParams::for_difference(d, spec.universe_bits, config.iblt_hedge, config.iblt_hash_count,
                                                     config.iblt_fingerprint_bits, session.seed);
      const auto res = iblt_bidirectional(inst.a, inst.b, params);
      r.bytes = res.total_bytes();
      r.rounds = 2;
      r.exact = res.ok && res.sender_intersection == truth && res.receiver_intersection == truth;
      r.outcome = r.exact ? Outcome::exact : Outcome::decode_failure;
      break;
    }
    case ProtocolKind::bounds:
      r.exact = true;
      r.outcome = Outcome::exact;
      break;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

GroupResult run_experiment(const GroupConfig& config) {
  GroupResult g;
  g.name = config.name;
  g.protocol = config.protocol;
  const auto& s = config.instance;
  const std::int64_t na = s.common + s.a_only;
  const std::int64_t nb = s.common + s.b_only;
  const std::int64_t d = s.a_only + s.b_only;
  g.setx_bound_bytes = setx_lower_bound(na, nb, s.a_only, s.b_only) / 8.0;
  if (d > 0)
    g.setr_bound_bytes = (s.a_only > 0 && s.b_only > 0 ? setr_lower_bound_two_sided(s.a_only, s.b_only, s.universe_bits)
                                                        : setr_lower_bound(d, s.universe_bits)) /
                         8.0;
  if (config.protocol == ProtocolKind::commonsense_uni || config.protocol == ProtocolKind::commonsense_bi) {
    const bool bi = config.protocol == ProtocolKind::commonsense_bi;
    SessionConfig sc = config.session;
    sc.universe_bits = s.universe_bits;
    const std::int64_t d_in = sc.d_input > 0 ? sc.d_input : d;
    g.rows = resolve_spec(sc, d_in, std::max(na, nb), bi).rows;
    g.alpha = sc.alpha > 0.0 ? sc.alpha : (bi ? kDefaultBidirectionalAlpha : kDefaultUnidirectionalAlpha);
  }
  if (config.protocol == ProtocolKind::bounds) {
    g.trials = 0;
    return g;
  }

  g.trials = config.trials;
  g.per_trial.resize(config.trials);
  std::atomic<unsigned> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (unsigned i = next++; i < config.trials; i = next++) {
      try {
        g.per_trial[i] = run_trial(config, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned workers = std::clamp(config.workers, 1U, std::max(1U, config.trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  if (config.trials == 0) return g;
  g.min_bytes = UINT64_MAX;
  double bytes = 0.0;
  double rounds = 0.0;
  double seconds = 0.0;
  for (const auto& t : g.per_trial) {
    bytes += static_cast<double>(t.bytes);
    rounds += t.rounds;
    seconds += t.seconds;
    g.min_bytes = std::min(g.min_bytes, t.bytes);
    g.max_bytes = std::max(g.max_bytes, t.bytes);
    g.max_rounds = std::max(g.max_rounds, t.rounds);
    if (t.exact) ++g.successes;
  }
  g.mean_bytes = bytes / config.trials;
  g.mean_rounds = rounds / config.trials;
  g.mean_seconds = seconds / config.trials;
  return g;
}

std::string csv_header(bool timing) {
  std::string h =
      "group,protocol,trials,successes,mean_bytes,min_bytes,max_bytes,mean_rounds,max_rounds,alpha,rows,"
      "setx_bound_bytes,setr_bound_bytes";
  if (timing) h += ",mean_seconds";
  return h;
}

std::string csv_row(const GroupResult& g, bool timing) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%u,%u,%.1f,%llu,%llu,%.3f,%u,%.4f,%u,%.1f,%.1f", g.name.c_str(),
                to_string(g.protocol), g.trials, g.successes, g.mean_bytes,
                static_cast<unsigned long long>(g.min_bytes), static_cast<unsigned long long>(g.max_bytes),
                g.mean_rounds, g.max_rounds, g.alpha, g.rows, g.setx_bound_bytes, g.setr_bound_bytes);
  std::string row = buf;
  if (timing) {
    std::snprintf(buf, sizeof buf, ",%.4f", g.mean_seconds);
    row += buf;
  }
  return row;
}

TuneResult tune_alpha(GroupConfig config, double lo, double hi, unsigned steps) {
  if (!(lo > 0.0 && hi > lo)) throw Error(Errc::invalid_argument, "tuning interval must satisfy 0 < lo < hi");
  if (config.protocol != ProtocolKind::commonsense_uni && config.protocol != ProtocolKind::commonsense_bi)
    throw Error(Errc::invalid_argument, "only CommonSense protocols can be tuned");
  config.session.rows = 0;
  TuneResult t;
  config.session.alpha = hi;
  GroupResult best = run_experiment(config);
  t.probes.emplace_back(hi, best.all_exact());
  if (!best.all_exact()) throw Error(Errc::infeasible, "upper alpha is not lossless on every trial");
  for (unsigned s = 0; s < steps; ++s) {
    const double mid = (lo + hi) / 2.0;
    config.session.alpha = mid;
    GroupResult g = run_experiment(config);
    t.probes.emplace_back(mid, g.all_exact());
    if (g.all_exact()) {
      hi = mid;
      best = std::move(g);
    } else {
      lo = mid;
    }
  }
  t.alpha = hi;
  t.at_alpha = std::move(best);
  return t;
}

}  // namespace commonsense
