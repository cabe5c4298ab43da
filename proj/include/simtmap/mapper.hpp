#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "simtmap/device.hpp"
#include "simtmap/error.hpp"

namespace simtmap {

// One warp's share of a kernel call. Lane i handles iterations
// [first_iteration[i], first_iteration[i] + iterations_per_thread[i]).
// Masked-off lanes carry zero iterations.
struct WarpLaunch {
  std::int32_t core_id = 0;
  std::int32_t warp_id = 0;
  std::int32_t call_index = 0;
  std::uint64_t thread_mask = 0;
  std::vector<std::int64_t> iterations_per_thread;  // size = threads_per_warp
  std::vector<std::int64_t> first_iteration;        // size = threads_per_warp

  friend bool operator==(const WarpLaunch&, const WarpLaunch&) = default;

  std::int64_t max_iterations() const {
    std::int64_t m = 0;
    for (auto n : iterations_per_thread) m = std::max(m, n);
    return m;
  }
};

struct LaunchPlan {
  DeviceConfig device;
  Workload workload;
  std::vector<WarpLaunch> launches;  // sorted by (call, core, warp)
  std::int64_t kernel_calls = 0;

  friend bool operator==(const LaunchPlan&, const LaunchPlan&) = default;
};

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Eq.-style optimal local work size: ceil(gws / hp). When hp >= gws the
// rule resolves to lws = 1. Rounding up keeps the plan at a single
// kernel call; rounding down would force a second, nearly idle call.
inline std::int64_t optimal_lws(std::int64_t gws, std::int64_t hp) {
  if (gws < 1) throw UsageError("optimal_lws: gws must be >= 1");
  if (hp < 1) throw UsageError("optimal_lws: hp must be >= 1");
  return ceil_div(gws, hp);
}

// Number of sequential kernel calls needed to drain gws iterations when
// each call hosts hp threads looping lws times.
inline std::int64_t kernel_call_count(std::int64_t gws, std::int64_t hp, std::int64_t lws) {
  if (gws < 1 || hp < 1 || lws < 1) throw UsageError("kernel_call_count: arguments must be >= 1");
  return ceil_div(gws, hp * lws);
}

// Splits the workload equally across cores (chunk sizes differ by at
// most one, larger chunks on lower core indices), then hands contiguous
// blocks of lws iterations to lanes: threads first, then warps, then the
// next kernel call. The final lane may receive a short block.
inline LaunchPlan distribute(const Workload& w, const DeviceConfig& d) {
  validate(w);
  validate(d);
  const std::int64_t t = d.threads_per_warp;

  LaunchPlan plan;
  plan.device = d;
  plan.workload = w;

  const std::int64_t base = w.gws / d.cores;
  const std::int64_t rem = w.gws % d.cores;
  std::int64_t next_iteration = 0;

  for (std::int64_t core = 0; core < d.cores; ++core) {
    std::int64_t remaining = base + (core < rem ? 1 : 0);
    if (remaining == 0) continue;

    std::int32_t call = 0;
    std::int32_t warp = 0;
    std::int64_t lane = 0;
    WarpLaunch cur{static_cast<std::int32_t>(core), warp, call, 0,
                   std::vector<std::int64_t>(t, 0), std::vector<std::int64_t>(t, 0)};

    while (remaining > 0) {
      const std::int64_t take = std::min(w.lws, remaining);
      cur.iterations_per_thread[lane] = take;
      cur.first_iteration[lane] = next_iteration;
      cur.thread_mask |= std::uint64_t{1} << lane;
      next_iteration += take;
      remaining -= take;

      if (++lane == t) {
        plan.launches.push_back(std::move(cur));
        lane = 0;
        if (++warp == d.warps_per_core) {
          warp = 0;
          ++call;
        }
        cur = WarpLaunch{static_cast<std::int32_t>(core), warp, call, 0,
                         std::vector<std::int64_t>(t, 0), std::vector<std::int64_t>(t, 0)};
      }
    }
    if (cur.thread_mask != 0) plan.launches.push_back(std::move(cur));
  }

  std::sort(plan.launches.begin(), plan.launches.end(), [](const WarpLaunch& a, const WarpLaunch& b) {
    return std::tuple(a.call_index, a.core_id, a.warp_id) <
           std::tuple(b.call_index, b.core_id, b.warp_id);
  });
  for (const auto& l : plan.launches)
    plan.kernel_calls = std::max<std::int64_t>(plan.kernel_calls, l.call_index + 1);
  return plan;
}

inline std::string format_mask(std::uint64_t mask, std::int64_t lanes) {
  if (lanes < 1) lanes = std::max(1, 64 - std::countl_zero(mask | 1));
  std::string s = "0b";
  for (std::int64_t i = lanes - 1; i >= 0; --i) s += (mask >> i) & 1 ? '1' : '0';
  return s;
}

// Line-oriented text form for golden-file tests: one launch per line as
// "call,core,warp,mask,count0,count1,...".
inline void format_plan(const LaunchPlan& plan, std::ostream& out) {
  out << "# simtmap-plan v1\n";
  out << "# device " << plan.device.to_string() << " gws " << plan.workload.gws << " lws "
      << plan.workload.lws << " calls " << plan.kernel_calls << "\n";
  for (const auto& l : plan.launches) {
    out << l.call_index << ',' << l.core_id << ',' << l.warp_id << ','
        << format_mask(l.thread_mask, plan.device.threads_per_warp);
    for (auto n : l.iterations_per_thread) out << ',' << n;
    out << '\n';
  }
}

inline std::string format_plan(const LaunchPlan& plan) {
  std::ostringstream ss;
  format_plan(plan, ss);
  return ss.str();
}

}  // namespace simtmap
