#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "commonsense/element.hpp"
#include "commonsense/protocol.hpp"

namespace commonsense {

struct InstanceSpec {
  std::int64_t common = 0;  // |A ∩ B|
  std::int64_t a_only = 0;  // |A \ B|
  std::int64_t b_only = 0;  // |B \ A|
  unsigned universe_bits = 64;
  std::uint64_t seed = 0;
};

struct Instance {
  std::vector<ElementId> a;
  std::vector<ElementId> b;
};

/// Draws |A∩B| + |A\B| + |B\A| distinct u-bit ids from a seeded mt19937_64
/// (one 64-bit word per started 64-bit limb), rejecting duplicates, and
/// splits them in draw order. Throws Error(infeasible) when the total
/// exceeds 2^u.
Instance gen_instance(const InstanceSpec& spec);

/// A ∩ B by sorted merge.
std::vector<ElementId> native_intersection(std::vector<ElementId> a, std::vector<ElementId> b);

enum class ProtocolKind { commonsense_uni, commonsense_bi, iblt, bounds };
const char* to_string(ProtocolKind kind) noexcept;
/// Throws Error(invalid_argument) for unknown names.
ProtocolKind parse_protocol(const std::string& name);

struct GroupConfig {
  std::string name = "group";
  InstanceSpec instance;
  SessionConfig session;
  ProtocolKind protocol = ProtocolKind::commonsense_uni;
  unsigned trials = 100;
  unsigned workers = 1;
  bool timing = false;
  double iblt_hedge = 1.36;
  std::uint32_t iblt_hash_count = 4;
  unsigned iblt_fingerprint_bits = 32;
};

struct TrialResult {
  std::uint64_t bytes = 0;
  unsigned rounds = 0;
  bool exact = false;
  double seconds = 0.0;
  Outcome outcome = Outcome::decode_failure;
};

struct GroupResult {
  std::string name;
  ProtocolKind protocol = ProtocolKind::bounds;
  unsigned trials = 0;
  unsigned successes = 0;
  double mean_bytes = 0.0;
  std::uint64_t min_bytes = 0;
  std::uint64_t max_bytes = 0;
  double mean_rounds = 0.0;
  unsigned max_rounds = 0;
  double mean_seconds = 0.0;
  double setx_bound_bytes = 0.0;
  double setr_bound_bytes = 0.0;
  double alpha = 0.0;
  std::uint32_t rows = 0;
  std::vector<TrialResult> per_trial;

  bool all_exact() const noexcept { return successes == trials; }
};

/// Trial i uses instance seed mix(seed, i) and session seed mix(seed, i) ^ 1;
/// trials run on `workers` threads and are merged by index.
TrialResult run_trial(const GroupConfig& config, unsigned trial);
GroupResult run_experiment(const GroupConfig& config);

/// Stable column layout; seconds are only included with timing enabled.
std::string csv_header(bool timing);
std::string csv_row(const GroupResult& result, bool timing);

struct TuneResult {
  double alpha = 0.0;
  GroupResult at_alpha;
  std::vector<std::pair<double, bool>> probes;
};

/// Bisects alpha in [lo, hi] for `steps` steps towards the smallest value with
/// every trial exact. Throws Error(infeasible) if hi itself is not lossless.
TuneResult tune_alpha(GroupConfig config, double lo, double hi, unsigned steps);

}  // namespace commonsense
