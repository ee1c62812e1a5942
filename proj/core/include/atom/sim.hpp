#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "atom/messages.hpp"
#include "atom/types.hpp"

namespace atom {

// Virtual time since the start of the run, in integer milliseconds.
using SimTime = std::chrono::milliseconds;
using Duration = std::chrono::milliseconds;

struct MessageDelivery {
  NodeId from;
  NodeId to;
  Message message;
};
struct PeevRoundStart {
  NodeId monitor;
  NodeId target;
};
struct PeevTimeout {
  NodeId monitor;
  NodeId target;
  std::uint64_t round_id = 0;
};
struct ChurnTick {};
struct ProbeTick {};
struct SimEnd {};

using EventPayload = std::variant<MessageDelivery, PeevRoundStart, PeevTimeout, ChurnTick, ProbeTick, SimEnd>;

std::string_view event_kind(const EventPayload& payload);

using EventId = std::uint64_t;

struct Event {
  SimTime fire_at{0};
  EventId seq = 0;
  EventPayload payload;
};

// Min-queue ordered by (fire_at, seq).
class EventQueue {
 public:
  void push(Event event);
  Event pop();
  [[nodiscard]] const Event& top() const { return heap_.top(); }
  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
};

// 64-bit seeded generator. Sub-streams derived by purpose name are
// independent of each other, so drawing more from one stream never shifts
// another.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed = 0);

  [[nodiscard]] Rng derive(std::string_view purpose) const;
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  // Uniform index in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Poisson(mean) draw. mean must be > 0.
std::int64_t sample_poisson(Rng& rng, double mean);
// Exponential inter-arrival time with the given mean, rounded to whole
// milliseconds and never below 1 ms.
Duration sample_exponential(Rng& rng, Duration mean);

struct TraceSummary {
  std::uint64_t events_processed = 0;
  SimTime final_time{0};
  // FNV-1a over (fire_at, seq, kind) of every processed event.
  std::uint64_t digest = 0xcbf29ce484222325ULL;

  friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

// Single-threaded discrete-event loop. The handler may schedule further
// events; they are processed in the same run if they fall before `end`.
class Engine {
 public:
  using Handler = std::function<void(const Event&)>;

  Engine() = default;

  [[nodiscard]] SimTime now() const { return now_; }
  [[nodiscard]] std::size_t pending() const { return queue_.size(); }

  EventId schedule(Duration delay, EventPayload payload);

  TraceSummary run_until(SimTime end, const Handler& handler);

  // Optional event trace, one tab-separated line per processed event:
  // time_ms, event_kind, from, to, detail.
  void set_trace(std::ostream* out) { trace_ = out; }
  void trace_note(std::string_view kind, std::string_view from, std::string_view to, std::string_view detail);

  [[nodiscard]] const TraceSummary& summary() const { return summary_; }

 private:
  void trace_event(const Event& event);

  EventQueue queue_;
  SimTime now_{0};
  EventId next_seq_ = 0;
  TraceSummary summary_;
  std::ostream* trace_ = nullptr;
};

}  // namespace atom
