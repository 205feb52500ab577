// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#include "mpi_forge/cbgs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "mpi_forge/random.hpp"

namespace mpi_forge {

FrameRecord make_frame_record(std::string id, std::string grid_path, const OccupancyGrid& grid) {
  FrameRecord r{std::move(id), std::move(grid_path), {}};
  for (Label l : grid.labels())
    if (is_occupied(l)) ++r.voxel_counts[to_id(l)];
  return r;
}

void DatasetIndex::validate() const {
  std::set<std::string_view> ids;
  for (const auto& f : frames) {
    if (!ids.insert(f.id).second) throw ConfigError("duplicate frame id '" + f.id + "'");
    for (auto c : f.voxel_counts)
      if (c < 0) throw ConfigError("frame '" + f.id + "' has a negative class count");
  }
}

ClassCounts class_histogram(const DatasetIndex& index) {
  ClassCounts h{};
  for (const auto& f : index.frames)
    for (int c = 1; c < kNumClasses; ++c) h[c] += f.contains(c) ? 1 : 0;
  return h;
}

namespace {

// Copies per group member for a share of `quota` entries.
std::vector<std::int64_t> apportion(const std::vector<std::size_t>& group, int class_id, std::int64_t quota,
                                    const DatasetIndex& index, GroupWeighting weighting, Rng& rng) {
  const auto n = static_cast<std::int64_t>(group.size());
  std::vector<std::int64_t> copies(group.size(), 0);

  std::vector<double> weight(group.size(), 1.0);
  if (weighting == GroupWeighting::VoxelCount)
    for (std::size_t i = 0; i < group.size(); ++i)
      weight[i] = static_cast<double>(index.frames[group[i]].voxel_counts[class_id]);
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);

  std::vector<double> frac(group.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (weighting == GroupWeighting::Presence) {
      copies[i] = quota / n;
      frac[i] = 0.0;
    } else {
      const double ideal = static_cast<double>(quota) * weight[i] / total;
      copies[i] = static_cast<std::int64_t>(std::floor(ideal));
      frac[i] = ideal - static_cast<double>(copies[i]);
    }
    assigned += copies[i];
  }

  // Remaining entries go to distinct members: largest fraction first, ties
  // in seeded random order.
  std::vector<std::size_t> order(group.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::int64_t k = 0; k < quota - assigned; ++k) ++copies[order[static_cast<std::size_t>(k % n)]];
  return copies;
}

}  // namespace

SamplingPlan build_sampling_plan(const DatasetIndex& index, std::size_t target_len, std::uint64_t seed,
                                 GroupWeighting weighting) {
  index.validate();
  if (index.frames.empty()) throw ConfigError("cannot build a sampling plan for an empty dataset");

  std::vector<std::vector<std::size_t>> groups;
  std::vector<int> group_class;
  for (int c = 1; c < kNumClasses; ++c) {
    std::vector<std::size_t> g;
    for (std::size_t i = 0; i < index.frames.size(); ++i)
      if (index.frames[i].contains(c)) g.push_back(i);
    if (!g.empty()) {
      groups.push_back(std::move(g));
      group_class.push_back(c);
    }
  }

  Rng rng(seed);
  std::vector<std::int64_t> copies(index.frames.size(), 0);
  if (!groups.empty()) {
    const auto n_groups = static_cast<std::int64_t>(groups.size());
    const auto target = static_cast<std::int64_t>(target_len);
    for (std::int64_t g = 0; g < n_groups; ++g) {
      const std::int64_t quota = target / n_groups + (g < target % n_groups ? 1 : 0);
      const auto share = apportion(groups[g], group_class[g], quota, index, weighting, rng);
      for (std::size_t i = 0; i < share.size(); ++i) copies[groups[g][i]] += share[i];
    }
  }

  SamplingPlan plan{seed, {}};
  for (std::size_t i = 0; i < index.frames.size(); ++i)
    for (std::int64_t k = 0; k < std::max<std::int64_t>(copies[i], 1); ++k) plan.entries.push_back(index.frames[i].id);
  shuffle(plan.entries.begin(), plan.entries.end(), rng);
  return plan;
}

namespace {

double exposure_ratio(const ClassCounts& exposure, const ClassCounts& present) {
  std::int64_t lo = INT64_MAX, hi = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (present[c] == 0) continue;
    lo = std::min(lo, exposure[c]);
    hi = std::max(hi, exposure[c]);
  }
  if (hi == 0) return 1.0;
  return static_cast<double>(hi) / static_cast<double>(lo);
}

}  // namespace

BalanceReport balance_report(const SamplingPlan& plan, const DatasetIndex& index) {
  if (plan.entries.empty()) throw ConfigError("balance report needs a nonempty plan");
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (std::size_t i = 0; i < index.frames.size(); ++i) by_id.emplace(index.frames[i].id, i);

  BalanceReport r;
  r.exposure_before = class_histogram(index);
  for (const auto& id : plan.entries) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ConfigError("plan entry '" + id + "' is not in the dataset index");
    const auto& f = index.frames[it->second];
    for (int c = 1; c < kNumClasses; ++c) r.exposure_after[c] += f.contains(c) ? 1 : 0;
  }
  for (int c = 0; c < kNumClasses; ++c) {
    r.frequency_before[c] = static_cast<double>(r.exposure_before[c]) / static_cast<double>(index.frames.size());
    r.frequency_after[c] = static_cast<double>(r.exposure_after[c]) / static_cast<double>(plan.entries.size());
  }
  r.ratio_before = exposure_ratio(r.exposure_before, r.exposure_before);
  r.ratio_after = exposure_ratio(r.exposure_after, r.exposure_before);
  return r;
}

}  // namespace mpi_forge
