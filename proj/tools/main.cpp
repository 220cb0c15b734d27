#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "commonsense/baselines.hpp"
#include "commonsense/error.hpp"
#include "commonsense/experiment.hpp"

using namespace commonsense;

namespace {

struct Options {
  std::string name = "group";
  std::string protocol = "commonsense-uni";
  std::int64_t common = 1000;
  std::int64_t a_only = 0;
  std::int64_t b_only = 10;
  unsigned universe_bits = 64;
  std::uint64_t seed = 1;
  unsigned trials = 100;
  unsigned workers = 1;
  double alpha = 0.0;
  std::uint32_t rows = 0;
  std::uint32_t weight = 0;
  std::int64_t d_input = 0;
  double smf_fpp = 0.01;
  unsigned max_rounds = 10;
  unsigned resolve_round = 4;
  unsigned signature_bits = 64;
  double p_trunc = 1e-3;
  unsigned parity_levels = 1;
  double iblt_hedge = 1.36;
  unsigned fingerprint_bits = 32;
  bool timing = false;
  bool strict = false;
  std::string csv;
  std::string out_dir;
  double lo = 0.3;
  double hi = 2.0;
  unsigned steps = 6;
};

void add_instance(CLI::App* app, Options& o) {
  app->add_option("--common", o.common, "|A ∩ B|");
  app->add_option("--a-only", o.a_only, "|A \\ B|");
  app->add_option("--b-only", o.b_only, "|B \\ A|");
  app->add_option("-u,--universe-bits", o.universe_bits, "universe size exponent u")->check(CLI::Range(1, 256));
  app->add_option("--seed", o.seed, "base seed");
}

void add_session(CLI::App* app, Options& o) {
  app->add_option("--name", o.name, "group label in the CSV");
  app->add_option("--protocol", o.protocol, "commonsense-uni | commonsense-bi | iblt | bounds");
  app->add_option("--trials", o.trials, "number of seeded trials");
  app->add_option("--workers", o.workers, "worker threads");
  app->add_option("--alpha", o.alpha, "row multiplier (0: default)");
  app->add_option("--rows", o.rows, "explicit row count l (overrides alpha)");
  app->add_option("--m", o.weight, "ones per column (0: 7 uni / 5 bi)");
  app->add_option("--d", o.d_input, "SDC given to the protocol (0: exact)");
  app->add_option("--smf-fpp", o.smf_fpp, "membership filter false positive target");
  app->add_option("--max-rounds", o.max_rounds, "round limit");
  app->add_option("--resolve-round", o.resolve_round, "first round with collision resolution");
  app->add_option("--signature-bits", o.signature_bits, "last-inquiry signature width");
  app->add_option("--p-trunc", o.p_trunc, "per-coordinate truncation miss probability");
  app->add_option("--parity-levels", o.parity_levels, "protected quotient bit-planes");
  app->add_option("--iblt-hedge", o.iblt_hedge, "IBLT cells per difference element");
  app->add_option("--fingerprint-bits", o.fingerprint_bits, "IBLT fingerprint width (32 or 48)");
  app->add_flag("--timing", o.timing, "add wall-clock seconds to the CSV");
  app->add_flag("--strict", o.strict, "exit nonzero unless every trial is exact");
  app->add_option("--csv", o.csv, "append CSV rows to this file instead of stdout");
}

GroupConfig make_group(const Options& o) {
  GroupConfig g;
  g.name = o.name;
  g.protocol = parse_protocol(o.protocol);
  g.instance = {o.common, o.a_only, o.b_only, o.universe_bits, o.seed};
  g.session.alpha = o.alpha;
  g.session.rows = o.rows;
  g.session.ones_per_column = o.weight;
  g.session.d_input = o.d_input;
  g.session.smf_fpp = o.smf_fpp;
  g.session.max_rounds = o.max_rounds;
  g.session.resolve_round = o.resolve_round;
  g.session.signature_bits = o.signature_bits;
  g.session.truncation.p_trunc = o.p_trunc;
  g.session.truncation.parity_levels = static_cast<std::uint8_t>(o.parity_levels);
  g.session.universe_bits = o.universe_bits;
  g.trials = o.trials;
  g.workers = o.workers;
  g.timing = o.timing;
  g.iblt_hedge = o.iblt_hedge;
  g.iblt_fingerprint_bits = o.fingerprint_bits;
  return g;
}

void emit(const Options& o, const std::vector<GroupResult>& rows) {
  if (o.csv.empty()) {
    std::cout << csv_header(o.timing) << '\n';
    for (const auto& r : rows) std::cout << csv_row(r, o.timing) << '\n';
    return;
  }
  const bool fresh = !std::ifstream(o.csv).good();
  std::ofstream out(o.csv, std::ios::app);
  if (!out) throw Error(Errc::io_error, "cannot open " + o.csv);
  if (fresh) out << csv_header(o.timing) << '\n';
  for (const auto& r : rows) out << csv_row(r, o.timing) << '\n';
}

void write_set(const std::string& path, const std::vector<ElementId>& set) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot open " + path);
  for (const auto& e : set) out << e.to_hex() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CommonSense set intersection experiments"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "generate one instance");
  add_instance(gen, o);
  gen->add_option("--out-dir", o.out_dir, "write A.txt and B.txt (hex ids) here");

  auto* run = app.add_subcommand("run", "run seeded trials of one protocol");
  add_instance(run, o);
  add_session(run, o);

  auto* tune = app.add_subcommand("tune", "bisect alpha to the smallest lossless value");
  add_instance(tune, o);
  add_session(tune, o);
  tune->add_option("--lo", o.lo, "lower alpha");
  tune->add_option("--hi", o.hi, "upper alpha (must be lossless)");
  tune->add_option("--steps", o.steps, "bisection steps");

  auto* bounds = app.add_subcommand("bounds", "print the SetX and SetR lower bounds");
  add_instance(bounds, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const Instance inst = gen_instance({o.common, o.a_only, o.b_only, o.universe_bits, o.seed});
      const auto common = native_intersection(inst.a, inst.b);
      std::printf("|A|=%zu |B|=%zu |A∩B|=%zu\n", inst.a.size(), inst.b.size(), common.size());
      if (!o.out_dir.empty()) {
        write_set(o.out_dir + "/A.txt", inst.a);
        write_set(o.out_dir + "/B.txt", inst.b);
      }
      return 0;
    }
    if (bounds->parsed()) {
      const std::int64_t na = o.common + o.a_only;
      const std::int64_t nb = o.common + o.b_only;
      const std::int64_t d = o.a_only + o.b_only;
      const double setx = setx_lower_bound(na, nb, o.a_only, o.b_only);
      std::printf("setx_lower_bound_kb=%.1f\n", bits_to_kb(setx));
      if (d > 0) std::printf("setr_lower_bound_kb=%.1f\n", bits_to_kb(setr_lower_bound(d, o.universe_bits)));
      if (o.a_only > 0 && o.b_only > 0)
        std::printf("setr_two_sided_lower_bound_kb=%.1f\n",
                    bits_to_kb(setr_lower_bound_two_sided(o.a_only, o.b_only, o.universe_bits)));
      return 0;
    }
    if (run->parsed()) {
      const GroupResult g = run_experiment(make_group(o));
      emit(o, {g});
      if (o.strict && !g.all_exact()) {
        std::fprintf(stderr, "strict: %u of %u trials exact\n", g.successes, g.trials);
        return 2;
      }
      return 0;
    }
    if (tune->parsed()) {
      const TuneResult t = tune_alpha(make_group(o), o.lo, o.hi, o.steps);
      for (const auto& [alpha, ok] : t.probes) std::fprintf(stderr, "alpha=%.4f lossless=%d\n", alpha, ok ? 1 : 0);
      emit(o, {t.at_alpha});
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
