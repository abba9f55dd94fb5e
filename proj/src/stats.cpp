#include "obliqua/stats.hpp"

#include <algorithm>
#include <cmath>

namespace obliqua::stats {

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EmptySample("ks_statistic needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

SampleSummary mc_estimate(const std::map<std::uint64_t, double>& by_path) {
  SampleSummary s;
  s.n = by_path.size();
  if (s.n == 0) return s;
  // std::map iterates in sorted key order: reduction is order-independent
  double sum = 0.0, comp = 0.0;
  s.min = s.max = by_path.begin()->second;
  for (const auto& [id, v] : by_path) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0, c2 = 0.0;
  for (const auto& [id, v] : by_path) {
    double dv = (v - s.mean) * (v - s.mean);
    double y = dv - c2;
    double t = ss + y;
    c2 = (t - ss) - y;
    ss = t;
  }
  if (s.n > 1)
    s.standard_error =
        std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  return s;
}

std::vector<RefinementRow> refinement_study(
    const std::vector<double>& dts,
    const std::function<std::map<std::uint64_t, double>(double)>& estimator) {
  std::vector<RefinementRow> rows;
  for (double dt : dts) {
    SampleSummary s = mc_estimate(estimator(dt));
    rows.push_back({dt, s.mean, s.standard_error});
  }
  return rows;
}

}  // namespace obliqua::stats
