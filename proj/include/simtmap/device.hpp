#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "simtmap/error.hpp"

namespace simtmap {

// Hardware parallelism descriptor. Immutable value type; the compact
// string form is "<c>c<w>w<t>t", e.g. "1c2w4t".
struct DeviceConfig {
  std::int64_t cores = 1;
  std::int64_t warps_per_core = 1;
  std::int64_t threads_per_warp = 1;

  friend bool operator==(const DeviceConfig&, const DeviceConfig&) = default;

  std::string to_string() const {
    return std::to_string(cores) + "c" + std::to_string(warps_per_core) + "w" +
           std::to_string(threads_per_warp) + "t";
  }
};

// Thread masks live in one 64-bit word.
inline constexpr std::int64_t kMaxThreadsPerWarp = 64;

inline void validate(const DeviceConfig& d) {
  if (d.cores < 1) throw UsageError("device: cores must be >= 1, got " + std::to_string(d.cores));
  if (d.warps_per_core < 1)
    throw UsageError("device: warps must be >= 1, got " + std::to_string(d.warps_per_core));
  if (d.threads_per_warp < 1)
    throw UsageError("device: threads must be >= 1, got " + std::to_string(d.threads_per_warp));
  if (d.threads_per_warp > kMaxThreadsPerWarp)
    throw UsageError("device: threads must be <= " + std::to_string(kMaxThreadsPerWarp) +
                     " (mask is one 64-bit word), got " + std::to_string(d.threads_per_warp));
}

inline DeviceConfig make_device(std::int64_t cores, std::int64_t warps, std::int64_t threads) {
  DeviceConfig d{cores, warps, threads};
  validate(d);
  return d;
}

// Parses the "<c>c<w>w<t>t" form.
inline DeviceConfig parse_device(std::string_view text) {
  auto fail = [&]() -> DeviceConfig {
    throw UsageError("device: expected \"<c>c<w>w<t>t\" (e.g. \"1c2w4t\"), got \"" +
                     std::string(text) + "\"");
  };
  const char* p = text.data();
  const char* end = text.data() + text.size();
  std::int64_t fields[3];
  constexpr char seps[3] = {'c', 'w', 't'};
  for (int i = 0; i < 3; ++i) {
    auto [next, ec] = std::from_chars(p, end, fields[i]);
    if (ec != std::errc() || next == end || *next != seps[i]) return fail();
    p = next + 1;
  }
  if (p != end) return fail();
  return make_device(fields[0], fields[1], fields[2]);
}

// hp = cores * warps * threads: the number of work items the device can
// host simultaneously.
inline std::int64_t hardware_parallelism(const DeviceConfig& d) {
  return d.cores * d.warps_per_core * d.threads_per_warp;
}

// A kernel enqueue: gws total iterations, lws iterations looped per
// thread per kernel call.
struct Workload {
  std::int64_t gws = 1;
  std::int64_t lws = 1;

  friend bool operator==(const Workload&, const Workload&) = default;
};

inline void validate(const Workload& w) {
  if (w.gws < 1) throw UsageError("workload: gws must be >= 1, got " + std::to_string(w.gws));
  if (w.lws < 1) throw UsageError("workload: lws must be >= 1, got " + std::to_string(w.lws));
  if (w.lws > w.gws)
    throw UsageError("workload: lws (" + std::to_string(w.lws) + ") must be <= gws (" +
                     std::to_string(w.gws) + ")");
}

inline Workload make_workload(std::int64_t gws, std::int64_t lws) {
  Workload w{gws, lws};
  validate(w);
  return w;
}

// The three mapping regimes of lws vs gws/hp.
enum class MappingScenario {
  kMultipleCalls,            // lws * hp < gws
  kSingleCallFull,           // lws * hp = gws
  kSingleCallUnderutilized,  // lws * hp > gws
};

inline std::string_view to_string(MappingScenario s) {
  switch (s) {
    case MappingScenario::kMultipleCalls: return "multiple-calls";
    case MappingScenario::kSingleCallFull: return "single-call-full";
    case MappingScenario::kSingleCallUnderutilized: return "single-call-underutilized";
  }
  return "?";
}

inline MappingScenario parse_scenario(std::string_view text) {
  if (text == "multiple-calls") return MappingScenario::kMultipleCalls;
  if (text == "single-call-full") return MappingScenario::kSingleCallFull;
  if (text == "single-call-underutilized") return MappingScenario::kSingleCallUnderutilized;
  throw FormatError("unknown scenario name \"" + std::string(text) + "\"");
}

// Exact integer comparison of lws*hp against gws, phrased through
// quotient and remainder so no product can overflow.
inline MappingScenario classify_scenario(const Workload& w, const DeviceConfig& d) {
  validate(w);
  validate(d);
  const std::int64_t hp = hardware_parallelism(d);
  const std::int64_t q = w.gws / hp;
  const std::int64_t r = w.gws % hp;
  if (w.lws < q || (w.lws == q && r > 0)) return MappingScenario::kMultipleCalls;
  if (w.lws == q && r == 0) return MappingScenario::kSingleCallFull;
  return MappingScenario::kSingleCallUnderutilized;
}

}  // namespace simtmap
