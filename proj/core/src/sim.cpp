#include "atom/sim.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace atom {

const char* to_string(Role role) {
  switch (role) {
    case Role::Honest: return "honest";
    case Role::Malicious: return "malicious";
    case Role::Monitor: return "monitor";
  }
  return "?";
}

std::string describe(const Message& message) {
  std::ostringstream os;
  if (const auto* m = std::get_if<Marker>(&message)) {
    os << "marker target=" << m->target << " monitor=" << m->monitor << " value=" << m->value;
  } else {
    const auto& v = std::get<VerifiedMsg>(message);
    os << "verified peers=";
    bool first = true;
    for (NodeId p : v.verified_peers) {
      os << (first ? "" : ",") << p;
      first = false;
    }
  }
  return os.str();
}

std::string_view event_kind(const EventPayload& payload) {
  struct Visitor {
    std::string_view operator()(const MessageDelivery& d) const {
      return std::holds_alternative<Marker>(d.message) ? "deliver_marker" : "deliver_verified";
    }
    std::string_view operator()(const PeevRoundStart&) const { return "peev_start"; }
    std::string_view operator()(const PeevTimeout&) const { return "peev_timeout"; }
    std::string_view operator()(const ChurnTick&) const { return "churn_tick"; }
    std::string_view operator()(const ProbeTick&) const { return "probe_tick"; }
    std::string_view operator()(const SimEnd&) const { return "sim_end"; }
  };
  return std::visit(Visitor{}, payload);
}

void EventQueue::push(Event event) { heap_.push(std::move(event)); }

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_name(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::derive(std::string_view purpose) const { return Rng(splitmix64(seed_ ^ hash_name(purpose))); }

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

std::int64_t sample_poisson(Rng& rng, double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("sample_poisson: mean must be positive");
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

Duration sample_exponential(Rng& rng, Duration mean) {
  if (mean.count() <= 0) throw std::invalid_argument("sample_exponential: mean must be positive");
  const double draw = std::exponential_distribution<double>(1.0 / static_cast<double>(mean.count()))(rng);
  const auto ms = static_cast<std::int64_t>(std::llround(draw));
  return Duration{ms < 1 ? 1 : ms};
}

EventId Engine::schedule(Duration delay, EventPayload payload) {
  if (delay.count() < 0) throw std::invalid_argument("schedule: negative delay");
  const EventId id = next_seq_++;
  queue_.push(Event{now_ + delay, id, std::move(payload)});
  return id;
}

TraceSummary Engine::run_until(SimTime end, const Handler& handler) {
  if (end < now_) throw std::invalid_argument("run_until: end is before the current time");
  while (!queue_.empty() && queue_.top().fire_at <= end) {
    Event event = queue_.pop();
    now_ = event.fire_at;
    ++summary_.events_processed;
    summary_.digest = fnv1a(summary_.digest, static_cast<std::uint64_t>(event.fire_at.count()));
    summary_.digest = fnv1a(summary_.digest, event.seq);
    summary_.digest = fnv1a(summary_.digest, event.payload.index());
    if (trace_ != nullptr) trace_event(event);
    if (handler) handler(event);
  }
  now_ = end;
  summary_.final_time = now_;
  return summary_;
}

void Engine::trace_note(std::string_view kind, std::string_view from, std::string_view to, std::string_view detail) {
  if (trace_ == nullptr) return;
  *trace_ << now_.count() << '\t' << kind << '\t' << from << '\t' << to << '\t' << detail << '\n';
}

void Engine::trace_event(const Event& event) {
  struct Fields {
    std::string from = "-";
    std::string to = "-";
    std::string detail = "-";
  };
  Fields f;
  std::visit(
      [&f](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MessageDelivery>) {
          f.from = std::to_string(p.from.value);
          f.to = std::to_string(p.to.value);
          f.detail = describe(p.message);
        } else if constexpr (std::is_same_v<T, PeevRoundStart>) {
          f.from = std::to_string(p.monitor.value);
          f.to = std::to_string(p.target.value);
        } else if constexpr (std::is_same_v<T, PeevTimeout>) {
          f.from = std::to_string(p.monitor.value);
          f.to = std::to_string(p.target.value);
          f.detail = "round=" + std::to_string(p.round_id);
        }
      },
      event.payload);
  trace_note(event_kind(event.payload), f.from, f.to, f.detail);
}

}  // namespace atom
