#include "commonsense/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <unordered_map>

#include "commonsense/byte_io.hpp"
#include "commonsense/error.hpp"
#include "commonsense/hashing.hpp"
#include "commonsense/smf.hpp"

namespace commonsense {

namespace {

constexpr std::uint8_t kDoneOk = 0;
constexpr std::uint8_t kDoneFailed = 1;

std::vector<ElementId> sorted_unique(std::span<const ElementId> in) {
  std::vector<ElementId> v(in.begin(), in.end());
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) throw Error(Errc::invalid_argument, "duplicate set element");
  return v;
}

std::int64_t symmetric_difference_size(const std::vector<ElementId>& a, const std::vector<ElementId>& b) {
  std::int64_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<std::int64_t>(a.size() + b.size()) - 2 * common;
}

Sketch sketch_of(const DecoderState& state, const MatrixSpec& spec) {
  Sketch s = empty_sketch(spec);
  for (std::size_t i = 0; i < state.size(); ++i)
    for (std::uint32_t r : state.support(i)) ++s.values[r];
  s.element_count = static_cast<std::int64_t>(state.size());
  return s;
}

std::size_t smf_share(const wire::Message& m) {
  if (m.type != wire::MessageType::residue) return 0;
  ByteReader r(m.payload);
  r.f64();
  r.f64();
  r.blob();
  return r.remaining();
}

}  // namespace

void SessionConfig::validate() const {
  if (max_rounds < 1) throw Error(Errc::invalid_argument, "max_rounds must be >= 1");
  if (!(smf_fpp > 0.0 && smf_fpp < 1.0)) throw Error(Errc::invalid_argument, "smf_fpp must be in (0, 1)");
  if (signature_bits < 8 || signature_bits > 64 || signature_bits % 8 != 0)
    throw Error(Errc::invalid_argument, "signature_bits must be a multiple of 8 in [8, 64]");
  if (alpha < 0.0 || !std::isfinite(alpha)) throw Error(Errc::invalid_argument, "alpha must be finite and >= 0");
  if (universe_bits < 1 || universe_bits > 256) throw Error(Errc::invalid_argument, "universe_bits must be in [1, 256]");
  if (rows != 0 && ones_per_column != 0 && rows < ones_per_column)
    throw Error(Errc::invalid_argument, "rows must be >= ones_per_column");
}

std::uint32_t default_rows(double alpha, std::int64_t d, std::int64_t larger_set, std::uint32_t weight) {
  const double dd = static_cast<double>(std::max<std::int64_t>(d, 1));
  const double nb = std::max(static_cast<double>(larger_set), dd);
  const double l = std::ceil(alpha * dd * std::log2(std::numbers::e * nb / dd));
  const double floor = 2.0 * weight;
  if (l > 4e9) throw Error(Errc::invalid_argument, "row count exceeds 32 bits");
  return static_cast<std::uint32_t>(std::max(l, floor));
}

MatrixSpec resolve_spec(const SessionConfig& config, std::int64_t d, std::int64_t larger_set, bool bidirectional) {
  config.validate();
  MatrixSpec spec;
  spec.ones_per_column = config.ones_per_column != 0 ? config.ones_per_column
                                                     : (bidirectional ? kBidirectionalWeight : kUnidirectionalWeight);
  const double alpha =
      config.alpha > 0.0 ? config.alpha : (bidirectional ? kDefaultBidirectionalAlpha : kDefaultUnidirectionalAlpha);
  spec.rows = config.rows != 0 ? config.rows : default_rows(alpha, d, larger_set, spec.ones_per_column);
  spec.seed = config.seed;
  spec.universe_bits = config.universe_bits;
  spec.validate();
  return spec;
}

Side choose_initiator(std::int64_t first_unique, std::int64_t second_unique, std::string_view first_id,
                      std::string_view second_id) {
  if (first_unique != second_unique) return first_unique < second_unique ? Side::first : Side::second;
  return first_id <= second_id ? Side::first : Side::second;
}

const char* to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::exact_mp: return "exact_mp";
    case Outcome::exact_ssmp: return "exact_ssmp";
    case Outcome::exact_modular: return "exact_modular";
    case Outcome::exact: return "exact";
    case Outcome::round_limit: return "round_limit";
    case Outcome::decode_failure: return "decode_failure";
    case Outcome::checksum_mismatch: return "checksum_mismatch";
  }
  return "unknown";
}

bool is_success(Outcome outcome) noexcept {
  return outcome == Outcome::exact_mp || outcome == Outcome::exact_ssmp || outcome == Outcome::exact_modular ||
         outcome == Outcome::exact;
}

std::uint64_t set_checksum(std::span<const ElementId> elements, std::uint64_t seed) {
  const std::uint64_t key = derive_key(seed, HashDomain::checksum);
  std::uint64_t sum = 0;
  for (const auto& e : elements) sum += keyed_hash(key, e);
  return sum;
}

std::uint64_t inquiry_signature(const ElementId& id, std::uint64_t seed, unsigned bits) {
  const std::uint64_t h = keyed_hash(derive_key(seed, HashDomain::signature), id);
  return bits >= 64 ? h : h & ((std::uint64_t{1} << bits) - 1);
}

struct Peer::Impl {
  enum class State { ready, awaiting_reply, awaiting_done, finished };

  std::string id;
  Role role;
  bool bidirectional;
  MatrixSpec spec;
  SessionConfig config;
  codec::SketchPrior prior;
  std::vector<ElementId> set;
  HashedColumns columns;
  std::unique_ptr<DecoderState> decoder;

  State state = State::ready;
  Outcome outcome = Outcome::decode_failure;
  unsigned rounds = 0;
  std::optional<std::int64_t> last_l1_in;
  std::vector<std::uint8_t> advertised;
  std::vector<ElementId> pending_inquiry;
  std::vector<RoundStats> stats;
  std::size_t confirmations = 0;
  bool parity_available = true;
  std::size_t parity_corrections = 0;
  std::int64_t modulus = 0;
  unsigned parity_levels = 0;
  std::vector<std::uint32_t> unverified_rows;

  Impl(std::string id_, std::vector<ElementId> set_, const MatrixSpec& spec_, const SessionConfig& config_, Role role_,
       const codec::SketchPrior& prior_, bool bidirectional_)
      : id(std::move(id_)),
        role(role_),
        bidirectional(bidirectional_),
        spec(spec_),
        config(config_),
        prior(prior_),
        set(sorted_unique(set_)),
        columns(spec_) {
    config.validate();
    if (bidirectional || role == Role::responder) {
      decoder = std::make_unique<DecoderState>(columns, set, std::vector<std::int64_t>(spec.rows, 0));
      advertised.assign(set.size(), 0);
    }
  }

  std::size_t iteration_cap() const {
    return config.max_decode_iterations != 0 ? config.max_decode_iterations : 16 * std::size_t{spec.rows} + 1024;
  }

  Sketch own_sketch() const { return decoder ? sketch_of(*decoder, spec) : encode_set(spec, set); }

  unsigned index() const { return role == Role::initiator ? 0U : 1U; }

  RoundStats& record(DecodeOutcome out, std::uint64_t iterations_before, std::int64_t l1_in, bool resolution) {
    RoundStats s;
    s.round = rounds;
    s.peer = index();
    s.outcome = out;
    s.iterations = decoder->iterations() - iterations_before;
    s.residue_l1_in = l1_in;
    s.residue_l1_out = decoder->residue_l1();
    s.recovered = decoder->recovered_count();
    s.tentative = decoder->tentative().size();
    s.resolution = resolution;
    stats.push_back(s);
    return stats.back();
  }

  wire::Message sketch_message() {
    wire::Message m{wire::MessageType::sketch, {}};
    ByteWriter w(m.payload);
    const Sketch sk = own_sketch();
    codec::SketchHeader{spec, sk.element_count}.serialize(w);
    const auto diff = codec::difference_model(prior, spec);
    const auto params = codec::choose_truncation(diff, spec.rows, config.truncation);
    modulus = params.modulus();
    parity_levels = params.bch_t > 0 ? params.parity_levels : 0;
    w.bytes(codec::compress_sketch(sk, params, diff));
    return m;
  }

  wire::Message done_message(std::uint8_t status) {
    wire::Message m{wire::MessageType::done, {}};
    ByteWriter w(m.payload);
    w.u8(status);
    w.u64(status == kDoneOk ? set_checksum(intersection(), spec.seed) : 0);
    return m;
  }

  std::vector<ElementId> intersection() const {
    if (!decoder) return set;
    std::vector<ElementId> out;
    out.reserve(set.size() - decoder->recovered_count());
    for (std::size_t i = 0; i < decoder->size(); ++i)
      if (!decoder->signal(i)) out.push_back(decoder->candidate(i));
    return out;
  }

  // A leftover row is a truncation error the payload cannot reveal: a
  // multiple of K on rows without parity, of K 2^levels on verified rows.
  // The initiator has no failed-block list and treats every row as verified.
  bool modular_explained() const {
    if (modulus < 2) return false;
    const std::int64_t verified_step = modulus << parity_levels;
    const auto r = decoder->residue();
    std::size_t k = 0;
    for (std::uint32_t row = 0; row < r.size(); ++row) {
      if (r[row] == 0) continue;
      while (k < unverified_rows.size() && unverified_rows[k] < row) ++k;
      const bool unverified = k < unverified_rows.size() && unverified_rows[k] == row;
      if (r[row] % (unverified ? modulus : verified_step) != 0) return false;
    }
    return true;
  }

  std::vector<wire::Message> on_sketch(const wire::Message& m) {
    if (role != Role::responder || rounds != 0) throw Error(Errc::protocol_error, "unexpected SKETCH");
    ByteReader r(m.payload);
    const auto header = codec::SketchHeader::deserialize(r);
    const Sketch mine = own_sketch();
    auto rec = codec::recover_sketch(mine, header, std::span<const std::uint8_t>(m.payload).subspan(r.position()));
    parity_available = rec.parity_available;
    parity_corrections = rec.parity_corrections;
    modulus = rec.params.modulus();
    parity_levels = rec.params.bch_t > 0 ? rec.params.parity_levels : 0;
    unverified_rows = std::move(rec.unverified_rows);
    std::vector<std::int64_t> residue(spec.rows);
    for (std::size_t i = 0; i < residue.size(); ++i) residue[i] = mine.values[i] - rec.sketch.values[i];
    decoder->set_residue(std::move(residue));
    rounds = 1;
    if (!bidirectional) {
      decode_unidirectional();
      return {};
    }
    return decode_turn();
  }

  void decode_unidirectional() {
    state = State::finished;
    const std::int64_t l1_in = decoder->residue_l1();
    if (decoder->residue_is_zero()) {
      record(DecodeOutcome::zero_residue, decoder->iterations(), l1_in, false);
      outcome = Outcome::exact_mp;
      return;
    }
    // Without a verified parity plane, start from the L1 pursuit, which is
    // not pulled towards isolated large truncation errors.
    const bool l1_first = !parity_available;
    for (int stage = 0; stage < 4; ++stage) {
      const bool use_l1 = (stage % 2 == 0) == l1_first;
      const std::uint64_t before = decoder->iterations();
      const DecodeOutcome out = use_l1 ? ssmp_decode(*decoder, iteration_cap()) : mp_decode(*decoder, iteration_cap());
      record(out, before, l1_in, false);
      if (decoder->residue_is_zero()) {
        outcome = use_l1 ? Outcome::exact_ssmp : Outcome::exact_mp;
        return;
      }
      if (modular_explained()) {
        outcome = Outcome::exact_modular;
        return;
      }
    }
    outcome = Outcome::decode_failure;
  }

  std::vector<wire::Message> decode_turn() {
    const std::int64_t l1_in = decoder->residue_l1();
    if (decoder->residue_is_zero() || modular_explained()) return finish_turn();
    const bool resolution = rounds >= config.resolve_round || (last_l1_in && l1_in >= *last_l1_in);
    last_l1_in = l1_in;
    decoder->clear_tentative();
    decoder->set_tentative_mode(resolution);
    const std::uint64_t before = decoder->iterations();
    const DecodeOutcome out = mp_decode(*decoder, iteration_cap());
    record(out, before, l1_in, resolution);

    std::vector<std::uint32_t> tentative = decoder->tentative();
    std::sort(tentative.begin(), tentative.end());
    tentative.erase(std::unique(tentative.begin(), tentative.end()), tentative.end());
    pending_inquiry.clear();
    for (std::uint32_t i : tentative)
      if (decoder->signal(i)) pending_inquiry.push_back(decoder->candidate(i));
    decoder->clear_tentative();
    if (pending_inquiry.empty()) return finish_turn();

    wire::Message m{wire::MessageType::last_inquiry, {}};
    ByteWriter w(m.payload);
    w.u32(static_cast<std::uint32_t>(pending_inquiry.size()));
    const unsigned bytes = config.signature_bits / 8;
    for (const auto& e : pending_inquiry) {
      const std::uint64_t sig = inquiry_signature(e, spec.seed, config.signature_bits);
      for (unsigned b = 0; b < bytes; ++b) w.u8(static_cast<std::uint8_t>(sig >> (8 * b)));
    }
    state = State::awaiting_reply;
    return {std::move(m)};
  }

  std::vector<wire::Message> finish_turn() {
    decoder->set_tentative_mode(false);
    if (decoder->residue_is_zero() || modular_explained()) {
      state = State::awaiting_done;
      return {done_message(kDoneOk)};
    }
    if (rounds + 1 > config.max_rounds) {
      state = State::finished;
      outcome = Outcome::round_limit;
      return {done_message(kDoneFailed)};
    }
    ++rounds;
    std::vector<ElementId> delta;
    for (std::size_t i = 0; i < decoder->size(); ++i) {
      if (decoder->signal(i) && !advertised[i]) {
        advertised[i] = 1;
        delta.push_back(decoder->candidate(i));
      }
    }
    wire::Message m{wire::MessageType::residue, {}};
    ByteWriter w(m.payload);
    codec::compress_residue(decoder->residue(), w);
    const std::uint64_t filter_seed = mix64(spec.seed ^ (std::uint64_t{rounds} << 32) ^ index());
    BloomFilter::build(delta, config.smf_fpp, filter_seed).serialize(w);
    state = State::ready;
    return {std::move(m)};
  }

  std::vector<wire::Message> on_residue(const wire::Message& m) {
    if (!bidirectional || state != State::ready || (role == Role::responder && rounds == 0))
      throw Error(Errc::protocol_error, "unexpected RESIDUE");
    if (rounds + 1 > config.max_rounds) throw Error(Errc::protocol_error, "peer exceeded the round limit");
    ++rounds;
    ByteReader r(m.payload);
    auto values = codec::decompress_residue(r, spec.rows);
    const BloomFilter filter = BloomFilter::deserialize(r);
    if (r.remaining() != 0) throw Error(Errc::protocol_error, "trailing bytes in RESIDUE");
    for (auto& v : values) v = -v;
    for (std::size_t i = 0; i < decoder->size(); ++i)
      if (decoder->gate(i) == AdditionGate::open && filter.query(decoder->candidate(i)))
        decoder->set_gate(i, AdditionGate::filtered);
    decoder->set_residue(std::move(values));
    return decode_turn();
  }

  std::vector<wire::Message> on_inquiry(const wire::Message& m) {
    if (!bidirectional || state != State::ready) throw Error(Errc::protocol_error, "unexpected LAST_INQUIRY");
    ByteReader r(m.payload);
    const std::uint32_t count = r.u32();
    const unsigned bytes = config.signature_bits / 8;
    if (r.remaining() != std::size_t{count} * bytes) throw Error(Errc::protocol_error, "malformed LAST_INQUIRY");
    std::vector<std::uint64_t> sigs(count);
    for (auto& s : sigs)
      for (unsigned b = 0; b < bytes; ++b) s |= std::uint64_t{r.u8()} << (8 * b);
    std::vector<std::uint64_t> sorted = sigs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(Errc::signature_collision, "two inquiry signatures are equal; increase signature_bits");
    std::vector<std::uint64_t> mine;
    for (std::size_t i = 0; i < decoder->size(); ++i)
      if (decoder->signal(i)) mine.push_back(inquiry_signature(decoder->candidate(i), spec.seed, config.signature_bits));
    std::sort(mine.begin(), mine.end());

    wire::Message reply{wire::MessageType::inquiry_reply, {}};
    ByteWriter w(reply.payload);
    w.u32(count);
    std::vector<std::uint8_t> bitmap((count + 7) / 8, 0);
    for (std::uint32_t k = 0; k < count; ++k)
      if (std::binary_search(mine.begin(), mine.end(), sigs[k])) bitmap[k / 8] |= static_cast<std::uint8_t>(1U << (k % 8));
    w.bytes(bitmap);
    return {std::move(reply)};
  }

  std::vector<wire::Message> on_reply(const wire::Message& m) {
    if (state != State::awaiting_reply) throw Error(Errc::protocol_error, "unexpected INQUIRY_REPLY");
    ByteReader r(m.payload);
    const std::uint32_t count = r.u32();
    if (count != pending_inquiry.size() || r.remaining() != (std::size_t{count} + 7) / 8)
      throw Error(Errc::protocol_error, "malformed INQUIRY_REPLY");
    const auto bitmap = r.bytes(r.remaining());
    std::vector<ElementId> confirmed;
    for (std::uint32_t k = 0; k < count; ++k)
      if ((bitmap[k / 8] >> (k % 8)) & 1U) confirmed.push_back(pending_inquiry[k]);
    revert(*decoder, confirmed);
    for (const auto& e : confirmed) decoder->set_gate(*decoder->index_of(e), AdditionGate::forbidden);
    confirmations += confirmed.size();
    pending_inquiry.clear();

    decoder->set_tentative_mode(false);
    const std::int64_t l1_in = decoder->residue_l1();
    const std::uint64_t before = decoder->iterations();
    const DecodeOutcome out = mp_decode(*decoder, iteration_cap());
    record(out, before, l1_in, true);
    decoder->clear_tentative();
    return finish_turn();
  }

  std::vector<wire::Message> on_done(const wire::Message& m) {
    if (!bidirectional || (state != State::ready && state != State::awaiting_done))
      throw Error(Errc::protocol_error, "unexpected DONE");
    ByteReader r(m.payload);
    const std::uint8_t status = r.u8();
    const std::uint64_t theirs = r.u64();
    const bool replied = state == State::awaiting_done;
    state = State::finished;
    if (status != kDoneOk) {
      outcome = Outcome::round_limit;
      return {};
    }
    const std::uint64_t ours = set_checksum(intersection(), spec.seed);
    outcome = ours == theirs ? Outcome::exact : Outcome::checksum_mismatch;
    if (replied) return {};
    return {done_message(kDoneOk)};
  }
};

Peer::Peer(std::string id, std::vector<ElementId> set, const MatrixSpec& spec, const SessionConfig& config, Role role,
           const codec::SketchPrior& prior, bool bidirectional)
    : impl_(std::make_unique<Impl>(std::move(id), std::move(set), spec, config, role, prior, bidirectional)) {}
Peer::~Peer() = default;
Peer::Peer(Peer&&) noexcept = default;

std::vector<wire::Message> Peer::start() {
  auto& p = *impl_;
  if (p.role != Role::initiator || p.rounds != 0) throw Error(Errc::protocol_error, "only a fresh initiator can start");
  p.rounds = 1;
  std::vector<wire::Message> out{p.sketch_message()};
  if (!p.bidirectional) {
    p.state = Impl::State::finished;
    p.outcome = Outcome::exact_mp;
  }
  return out;
}

std::vector<wire::Message> Peer::on_message(const wire::Message& message) {
  auto& p = *impl_;
  if (p.state == Impl::State::finished) throw Error(Errc::protocol_error, "message after session end");
  switch (message.type) {
    case wire::MessageType::sketch: return p.on_sketch(message);
    case wire::MessageType::residue: return p.on_residue(message);
    case wire::MessageType::last_inquiry: return p.on_inquiry(message);
    case wire::MessageType::inquiry_reply: return p.on_reply(message);
    case wire::MessageType::done: return p.on_done(message);
  }
  throw Error(Errc::protocol_error, "unknown message type");
}

bool Peer::finished() const noexcept { return impl_->state == Impl::State::finished; }
Outcome Peer::outcome() const noexcept { return impl_->outcome; }
std::vector<ElementId> Peer::intersection() const { return impl_->intersection(); }
std::vector<ElementId> Peer::unique_estimate() const {
  return impl_->decoder ? impl_->decoder->recovered() : std::vector<ElementId>{};
}
const std::string& Peer::id() const noexcept { return impl_->id; }
Peer::Role Peer::role() const noexcept { return impl_->role; }
const std::vector<RoundStats>& Peer::stats() const noexcept { return impl_->stats; }
std::size_t Peer::inquiry_confirmations() const noexcept { return impl_->confirmations; }
bool Peer::parity_available() const noexcept { return impl_->parity_available; }
std::size_t Peer::parity_corrections() const noexcept { return impl_->parity_corrections; }

SessionTranscript drive_session(Peer& initiator, Peer& responder, const SessionProbe& probe) {
  SessionTranscript t;
  auto [end0, end1] = make_loopback_pair();
  MeteredTransport meter0(*end0);
  MeteredTransport meter1(*end1);
  Transport* ends[2] = {&meter0, &meter1};
  Peer* peers[2] = {&initiator, &responder};
  wire::FrameDecoder decoders[2];
  std::deque<unsigned> pending;
  unsigned processed = 0;

  auto emit = [&](unsigned from, std::vector<wire::Message> messages) {
    for (auto& m : messages) {
      MessageRecord rec{from, m.type, m.framed_size(), smf_share(m)};
      t.messages.push_back(rec);
      t.total_bytes += rec.bytes;
      if (m.type == wire::MessageType::sketch || m.type == wire::MessageType::residue) ++t.rounds;
      if (m.type == wire::MessageType::last_inquiry) ++t.inquiries;
      send_message(*ends[from], m);
      pending.push_back(1 - from);
    }
  };
  auto notify = [&] {
    if (!probe) return;
    ProbeEvent ev;
    ev.messages = processed;
    ev.initiator_estimate = initiator.unique_estimate();
    ev.responder_estimate = responder.unique_estimate();
    ev.inquiry_confirmations = initiator.inquiry_confirmations() + responder.inquiry_confirmations();
    probe(ev);
  };

  emit(0, initiator.start());
  notify();
  while (!pending.empty()) {
    const unsigned to = pending.front();
    pending.pop_front();
    const wire::Message m = receive_message(*ends[to], decoders[to]);
    ++processed;
    emit(to, peers[to]->on_message(m));
    notify();
  }
  t.transport_bytes = meter0.bytes_sent() + meter1.bytes_sent();
  if (!initiator.finished() || !responder.finished()) throw Error(Errc::protocol_error, "session stopped early");

  const Outcome a = initiator.outcome();
  const Outcome b = responder.outcome();
  t.outcome = !is_success(b) ? b : (!is_success(a) ? a : b);
  for (const Peer* p : peers) {
    t.decoder_stats.insert(t.decoder_stats.end(), p->stats().begin(), p->stats().end());
    t.inquiry_confirmations += p->inquiry_confirmations();
  }
  std::stable_sort(t.decoder_stats.begin(), t.decoder_stats.end(),
                   [](const RoundStats& x, const RoundStats& y) { return x.round < y.round; });
  t.parity_available = responder.parity_available();
  t.parity_corrections = responder.parity_corrections();
  return t;
}

void run_peer(Peer& peer, Transport& transport) {
  wire::FrameDecoder decoder;
  if (peer.role() == Peer::Role::initiator)
    for (const auto& m : peer.start()) send_message(transport, m);
  while (!peer.finished()) {
    const wire::Message m = receive_message(transport, decoder);
    for (const auto& reply : peer.on_message(m)) send_message(transport, reply);
  }
}

UnidirectionalResult run_unidirectional(std::span<const ElementId> alice_set, std::span<const ElementId> bob_set,
                                        const SessionConfig& config) {
  auto a = sorted_unique(alice_set);
  auto b = sorted_unique(bob_set);
  if (!std::includes(b.begin(), b.end(), a.begin(), a.end()))
    throw Error(Errc::invalid_argument, "unidirectional sessions require alice_set to be a subset of bob_set");
  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());
  const std::int64_t d = config.d_input > 0 ? config.d_input : nb - na;
  const MatrixSpec spec = resolve_spec(config, d, nb, false);
  const codec::SketchPrior prior{na, nb, d};
  Peer alice("alice", std::move(a), spec, config, Peer::Role::initiator, prior, false);
  Peer bob("bob", std::move(b), spec, config, Peer::Role::responder, prior, false);
  UnidirectionalResult res;
  res.transcript = drive_session(alice, bob);
  res.transcript.spec = spec;
  if (is_success(res.transcript.outcome)) res.intersection = bob.intersection();
  return res;
}

BidirectionalResult run_bidirectional(std::span<const ElementId> alice_set, std::span<const ElementId> bob_set,
                                      const SessionConfig& config, const SessionProbe& probe) {
  auto a = sorted_unique(alice_set);
  auto b = sorted_unique(bob_set);
  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());
  const std::int64_t d = config.d_input > 0 ? config.d_input : symmetric_difference_size(a, b);
  const auto [a_only, b_only] = codec::split_difference({na, nb, d});
  const bool alice_first = choose_initiator(a_only, b_only, "alice", "bob") == Side::first;
  const MatrixSpec spec = resolve_spec(config, d, std::max(na, nb), true);
  const codec::SketchPrior prior = alice_first ? codec::SketchPrior{na, nb, d} : codec::SketchPrior{nb, na, d};

  Peer alice("alice", std::move(a), spec, config, alice_first ? Peer::Role::initiator : Peer::Role::responder, prior,
             true);
  Peer bob("bob", std::move(b), spec, config, alice_first ? Peer::Role::responder : Peer::Role::initiator, prior,
           true);
  BidirectionalResult res;
  res.alice_initiated = alice_first;
  res.transcript = alice_first ? drive_session(alice, bob, probe) : drive_session(bob, alice, probe);
  res.transcript.spec = spec;
  res.alice_intersection = alice.intersection();
  res.bob_intersection = bob.intersection();
  return res;
}

std::optional<std::vector<ElementId>> decode_stream_digest(const Sketch& alice_digest, const Sketch& bob_digest,
                                                           std::span<const ElementId> superset) {
  Residue r = residue_between(bob_digest, alice_digest);
  HashedColumns columns(bob_digest.spec);
  DecoderState state(columns, sorted_unique(superset), std::move(r.values));
  const std::size_t cap = 16 * std::size_t{bob_digest.spec.rows} + 1024;
  for (int stage = 0; stage < 4 && !state.residue_is_zero(); ++stage) {
    if (stage % 2 == 0) {
      mp_decode(state, cap);
    } else {
      ssmp_decode(state, cap);
    }
  }
  if (!state.residue_is_zero()) return std::nullopt;
  return state.recovered();
}

}  // namespace commonsense
