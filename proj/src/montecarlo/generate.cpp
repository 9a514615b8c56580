#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include <fmt/core.h>

#include "bpm/error.hpp"
#include "bpm/montecarlo.hpp"

namespace bpm {

namespace {

// Chunks partition the run in time; their layout depends on the duration only,
// so the merged stream is independent of how chunks are scheduled.
constexpr std::int64_t kChunkPs = 10'000'000'000;  // 10 ms

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
  return splitmix64(splitmix64(seed) ^ splitmix64(chunk + 0xD1B54A32D192ED03ull));
}

struct ChunkResult {
  std::vector<TagEvent> events;
  GenerationStats stats;
};

struct Routing {
  double to_signal;   // r
  double to_i1;       // (1 − r)ρ
  std::array<double, 3> detected;  // per-detector probability of a pair photon
};

ChunkResult simulate_chunk(const SourceModel& m, const Routing& routing, std::int64_t begin_ps, std::int64_t end_ps,
                           std::uint64_t seed) {
  ChunkResult out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double length_ps = static_cast<double>(end_ps - begin_ps);
  const double length_s = length_ps * 1e-12;

  const auto jittered = [&](double t_ps, Channel c) {
    const double sigma_ps = m.jitter_sigma_s[index(c)] * 1e12;
    return static_cast<std::int64_t>(std::llround(sigma_ps > 0.0 ? t_ps + sigma_ps * normal(rng) : t_ps));
  };

  std::poisson_distribution<std::uint64_t> pairs_dist(m.pair_rate_Hz * length_s);
  const std::uint64_t pairs = m.pair_rate_Hz > 0.0 ? pairs_dist(rng) : 0;
  out.stats.pairs = pairs;
  for (std::uint64_t p = 0; p < pairs; ++p) {
    const double t_ps = static_cast<double>(begin_ps) + length_ps * uniform(rng);
    for (int photon = 0; photon < 2; ++photon) {
      // One uniform decides both the arm and survival: each arm's interval
      // starts with its detected fraction.
      double u = uniform(rng);
      Channel c;
      if (u < routing.to_signal) {
        ++out.stats.photons_signal_arm;
        c = Channel::S;
      } else {
        ++out.stats.photons_idler_arm;
        u -= routing.to_signal;
        if (u < routing.to_i1) {
          c = Channel::I1;
        } else {
          u -= routing.to_i1;
          c = Channel::I2;
        }
      }
      if (u >= routing.detected[index(c)]) continue;
      ++out.stats.pair_detections[index(c)];
      out.events.push_back({jittered(t_ps, c), c});
    }
  }

  for (Channel c : kChannels) {
    const double rate = m.dark_rate_Hz[index(c)];
    if (rate <= 0.0) continue;
    std::poisson_distribution<std::uint64_t> darks_dist(rate * length_s);
    const std::uint64_t darks = darks_dist(rng);
    out.stats.dark_counts[index(c)] += darks;
    for (std::uint64_t k = 0; k < darks; ++k)
      out.events.push_back(
          {static_cast<std::int64_t>(std::llround(static_cast<double>(begin_ps) + length_ps * uniform(rng))), c});
  }
  return out;
}

void accumulate(GenerationStats& a, const GenerationStats& b) {
  a.pairs += b.pairs;
  a.photons_signal_arm += b.photons_signal_arm;
  a.photons_idler_arm += b.photons_idler_arm;
  for (std::size_t i = 0; i < 3; ++i) {
    a.pair_detections[i] += b.pair_detections[i];
    a.dark_counts[i] += b.dark_counts[i];
  }
}

}  // namespace

std::int64_t seconds_to_ps(double seconds) {
  if (!std::isfinite(seconds) || std::abs(seconds) > 9.0e6)
    throw ArgumentError(fmt::format("time {} s does not fit in integer picoseconds", seconds));
  return static_cast<std::int64_t>(std::llround(seconds * 1e12));
}

double expected_event_count(const SourceModel& model) {
  double rate = 0.0;
  for (Channel c : kChannels)
    rate += 2.0 * model.pair_rate_Hz * model.photon_detection_probability(c) + model.dark_rate_Hz[index(c)];
  return rate * model.duration_s;
}

Simulation generate_tags(const SourceModel& model, const GenerateOptions& options) {
  model.validate();
  const double expected = expected_event_count(model);
  if (expected > static_cast<double>(model.max_events))
    throw ResourceError(fmt::format("simulation would produce about {:.3g} events, above the cap of {}", expected,
                                    model.max_events));

  const std::int64_t duration_ps = seconds_to_ps(model.duration_s);
  const Routing routing{model.pair_splitter_ratio, (1.0 - model.pair_splitter_ratio) * model.splitter_ratio,
                        {model.photon_detection_probability(Channel::S),
                         model.photon_detection_probability(Channel::I1),
                         model.photon_detection_probability(Channel::I2)}};

  const std::size_t chunks = static_cast<std::size_t>((duration_ps + kChunkPs - 1) / kChunkPs);
  std::vector<ChunkResult> results(chunks);
  const auto run = [&](std::size_t k) {
    const std::int64_t begin = static_cast<std::int64_t>(k) * kChunkPs;
    const std::int64_t end = std::min(begin + kChunkPs, duration_ps);
    results[k] = simulate_chunk(model, routing, begin, end, chunk_seed(model.seed, k));
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(chunks, 1)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < chunks; ++k) run(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < chunks;) run(k);
      });
  }

  Simulation sim;
  std::size_t total = 0;
  for (const auto& r : results) total += r.events.size();
  sim.stream.events.reserve(total);
  for (auto& r : results) {
    accumulate(sim.stats, r.stats);
    sim.stream.events.insert(sim.stream.events.end(), r.events.begin(), r.events.end());
    std::vector<TagEvent>().swap(r.events);
  }

  auto& ev = sim.stream.events;
  std::sort(ev.begin(), ev.end());
  const auto in_range = [&](const TagEvent& e) { return e.timestamp_ps >= 0 && e.timestamp_ps <= duration_ps; };
  const auto kept_end = std::stable_partition(ev.begin(), ev.end(), in_range);
  sim.stats.dropped_outside_duration = static_cast<std::uint64_t>(ev.end() - kept_end);
  ev.erase(kept_end, ev.end());

  if (std::any_of(model.dead_time_s.begin(), model.dead_time_s.end(), [](double d) { return d > 0.0; })) {
    std::array<std::int64_t, 3> dead{};
    for (Channel c : kChannels) dead[index(c)] = seconds_to_ps(model.dead_time_s[index(c)]);
    std::array<std::optional<std::int64_t>, 3> last{};
    const auto dead_end = std::remove_if(ev.begin(), ev.end(), [&](const TagEvent& e) {
      auto& l = last[index(e.channel)];
      if (l && e.timestamp_ps - *l < dead[index(e.channel)]) return true;
      l = e.timestamp_ps;
      return false;
    });
    sim.stats.dropped_dead_time = static_cast<std::uint64_t>(ev.end() - dead_end);
    ev.erase(dead_end, ev.end());
  }

  sim.stream.duration_s = model.duration_s;
  sim.stream.provenance = fmt::format("simulated seed={} pair_rate_Hz={:.17g}", model.seed, model.pair_rate_Hz);
  return sim;
}

}  // namespace bpm
