#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace obliqua::stats {

struct EmptySample : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// sup-distance between the empirical CDFs of two samples (merge scan)
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Deterministic reduction in sorted path_id order with compensated summation.
SampleSummary mc_estimate(const std::map<std::uint64_t, double>& by_path);

struct RefinementRow {
  double dt = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
};

// Runs `estimator(dt)` (terminal-functional values keyed by path) for each dt.
std::vector<RefinementRow> refinement_study(
    const std::vector<double>& dts,
    const std::function<std::map<std::uint64_t, double>(double)>& estimator);

}  // namespace obliqua::stats
