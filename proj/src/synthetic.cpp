#include "elt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "elt/errors.hpp"
#include "elt/parser.hpp"

namespace elt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 frame_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 1)));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

/// Linear segment values[t0..t0+len) from a to b (endpoint at b).
void ramp(std::vector<double>& x, std::int64_t t0, std::int64_t len, double a, double b) {
  for (std::int64_t i = 0; i < len; ++i) {
    const double u = len == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(len - 1);
    x[static_cast<std::size_t>(t0 + i)] = a + (b - a) * u;
  }
}

/// Concave rise from a to b: u + gamma * (u - u^2) blend, slope decreasing.
void concave(std::vector<double>& x, std::int64_t t0, std::int64_t len, double a, double b,
             double gamma) {
  for (std::int64_t i = 0; i < len; ++i) {
    const double u = len == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(len - 1);
    const double shape = ((1.0 + gamma) * u - gamma * u * u);
    x[static_cast<std::size_t>(t0 + i)] = a + (b - a) * shape;
  }
}

}  // namespace

const std::string& synthetic_schema_text() {
  static const std::string text = R"(# Pressure-test events over channels "pressure" and "volume".

event "valid_test" {
  SEQ(
    SYNC(
      prim(channel="pressure", predicate=drop(net=0.3, slope=0.3)),
      prim(channel="volume", predicate=rise)
    ),
    SYNC(
      prim(channel="pressure", predicate=concave_rise(slope=1.5, r2=0.5)),
      prim(channel="volume", predicate=stable)
    )
  )
}

event "lost_seal" {
  SEQ(
    SYNC(
      prim(channel="pressure", predicate=drop(net=0.3, slope=0.3)),
      prim(channel="volume", predicate=rise)
    ),
    SYNC(
      prim(channel="pressure", predicate=fall(slope=0.2, slope_cap=1.5, r2=0.5)),
      prim(channel="volume", predicate=stable)
    )
  )
}
)";
  return text;
}

EventCatalog synthetic_catalog() { return parse_schema(synthetic_schema_text()); }

std::vector<SyntheticFrame> generate_synthetic(const SyntheticConfig& spec) {
  if (spec.n_frames <= 0) raise(Errc::BadConfig, "n_frames must be positive");
  std::vector<SyntheticFrame> out;
  out.reserve(static_cast<std::size_t>(spec.n_frames));

  for (int f = 0; f < spec.n_frames; ++f) {
    auto rng = frame_rng(spec.seed, static_cast<std::uint64_t>(f));

    const double raw_len =
        std::exp(spec.len_log_mean + spec.len_log_std * std::normal_distribution<double>()(rng));
    const std::int64_t T = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::llround(raw_len)),
                                                    spec.min_length, spec.max_length);
    const bool lost = uniform(rng, 0.0, 1.0) < spec.lost_seal_fraction;

    const auto t0 = static_cast<std::int64_t>(std::llround(uniform(rng, 0.18, 0.40) * static_cast<double>(T)));
    const auto len1 = std::max<std::int64_t>(
        24, static_cast<std::int64_t>(std::llround(uniform(rng, 0.05, 0.09) * static_cast<double>(T))));
    const auto len2 = std::max<std::int64_t>(
        64, static_cast<std::int64_t>(std::llround(uniform(rng, 0.26, 0.36) * static_cast<double>(T))));
    const std::int64_t t_end = t0 + len1 + len2;
    const auto release = std::max<std::int64_t>(
        12, static_cast<std::int64_t>(std::llround(0.04 * static_cast<double>(T))));

    const double p0 = uniform(rng, 4000.0, 6000.0);
    const double amp_p = uniform(rng, 900.0, 1600.0);
    const double p1 = p0 - amp_p;
    const double p2 = p0 - uniform(rng, 30.0, 120.0);
    const double leak = uniform(rng, 0.45, 0.65) * amp_p;  // lost-seal bleed-off
    const double gamma = uniform(rng, 0.5, 0.7);
    const double v0 = uniform(rng, 80.0, 140.0);
    const double amp_v = uniform(rng, 25.0, 70.0);
    const double v1 = v0 + amp_v;
    const double drift = uniform(rng, -0.015, 0.015);

    std::vector<double> pressure(static_cast<std::size_t>(T), p0);
    std::vector<double> volume(static_cast<std::size_t>(T), v0);

    // slow baseline drift on pressure before the event
    for (std::int64_t t = 0; t < t0; ++t) {
      pressure[static_cast<std::size_t>(t)] = p0 + drift * static_cast<double>(t - t0);
    }

    // phase 1: sharp fall on pressure + ramp on volume
    ramp(pressure, t0, len1, p0, p1);
    ramp(volume, t0, len1, v0, v1);

    // phase 2 and the post-event release that ends the morphology
    const double p_after = lost ? p1 : p2;
    if (lost) {
      ramp(pressure, t0 + len1, len2, p1, p1 - leak);
      ramp(pressure, t_end, std::min(release, T - t_end), p1 - leak, p0);
      for (std::int64_t t = t_end + release; t < T; ++t) {
        pressure[static_cast<std::size_t>(t)] = p0;
      }
    } else {
      concave(pressure, t0 + len1, len2, p1, p2, gamma);
      for (std::int64_t t = t_end; t < T; ++t) {
        pressure[static_cast<std::size_t>(t)] = p_after + drift * 0.5 * static_cast<double>(t - t_end);
      }
    }
    ramp(volume, t0 + len1, len2, v1, v1);
    ramp(volume, t_end, std::min(release, T - t_end), v1, v0);
    for (std::int64_t t = t_end + release; t < T; ++t) volume[static_cast<std::size_t>(t)] = v0;

    // distractors strictly outside the event span
    const std::int64_t margin = std::max<std::int64_t>(8, T / 50);
    const std::int64_t pre_room = t0 - margin;
    if (pre_room > 40) {
      const std::int64_t width = uniform_int(rng, 3, 6);
      const std::int64_t at = uniform_int(rng, 10, pre_room - width - 1);
      const double height = uniform(rng, 0.25, 0.5) * amp_p * (uniform(rng, 0.0, 1.0) < 0.5 ? 1.0 : -1.0);
      for (std::int64_t i = 0; i < width; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(width - 1);
        pressure[static_cast<std::size_t>(at + i)] += height * (1.0 - std::abs(2.0 * u - 1.0));
      }
    }
    const std::int64_t post_start = t_end + release + margin;
    const std::int64_t post_room = T - post_start;
    if (post_room > 60) {
      const std::int64_t width = std::min<std::int64_t>(post_room - 10, T / 12);
      const std::int64_t at = post_start + uniform_int(rng, 0, post_room - width - 1);
      const double height = uniform(rng, 0.2, 0.4) * amp_v;
      for (std::int64_t i = 0; i < width; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(width - 1);
        volume[static_cast<std::size_t>(at + i)] += height * (1.0 - std::abs(2.0 * u - 1.0));
      }
    }

    // additive noise, scaled to each channel's event amplitude
    if (spec.noise > 0.0) {
      std::normal_distribution<double> gauss;
      for (auto& v : pressure) v += spec.noise * amp_p * gauss(rng);
      for (auto& v : volume) v += spec.noise * amp_v * gauss(rng);
    }

    SyntheticFrame sample{
        SeriesFrame({"pressure", "volume"}, {std::move(pressure), std::move(volume)}),
        {GroundTruthEvent{Interval(t0, t_end), lost ? "lost_seal" : "valid_test"}}};
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<std::vector<Detection>> random_baseline(const std::vector<SeriesFrame>& frames,
                                                    const EventCatalog& catalog,
                                                    std::uint64_t seed) {
  if (catalog.schemas.empty()) raise(Errc::EmptyCatalog, "catalog has no schemas");
  std::vector<std::string> types;
  for (const auto& [event_type, _] : catalog.schemas) types.push_back(event_type);

  std::vector<std::vector<Detection>> out;
  out.reserve(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    auto rng = frame_rng(seed, static_cast<std::uint64_t>(f) + 0x5eedULL);
    const std::int64_t T = frames[f].length();
    const std::int64_t on = uniform_int(rng, 0, T - 2);
    const std::int64_t off = uniform_int(rng, on + 1, T);
    Detection det;
    det.interval = Interval(on, off);
    det.event_type = types[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<std::int64_t>(types.size()) - 1))];
    det.confidence = 0.5;
    out.push_back({std::move(det)});
  }
  return out;
}

}  // namespace elt
