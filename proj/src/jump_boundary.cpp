#include "obliqua/jump_boundary.hpp"

#include <algorithm>
#include <cmath>

namespace obliqua::jump {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// First boundary contact along [from, to]; from strictly interior.
Vec2 bisect_to_boundary(const geometry::Domain& dom, const Vec2& from,
                        const Vec2& to) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (dom.min_psi(from + (to - from) * mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return from + (to - from) * lo;
}

}  // namespace

Vec2 JumpScenario::sample_kernel(std::uint64_t seed, std::uint64_t path_id,
                                 std::uint64_t visit) const {
  Vec2 target;
  if (const auto* pm = std::get_if<PointMassKernel>(&kernel)) {
    target = pm->target;
  } else {
    const auto& ud = std::get<UniformDiscKernel>(kernel);
    rng::Counter c{seed, path_id, 3};
    double r = ud.radius * std::sqrt(c.uniform(2 * visit));
    double a = kTwoPi * c.uniform(2 * visit + 1);
    target = ud.center + Vec2{r * std::cos(a), r * std::sin(a)};
  }
  if (!domain.in_open(target))
    throw KernelEscape("jump target left the domain");
  return target;
}

ControlledPathRecord simulate_jump_controlled(const JumpScenario& js,
                                              std::uint64_t seed,
                                              std::uint64_t path_id, double S,
                                              double ds) {
  const geometry::Domain& dom = js.domain;
  const double btol = dom.tol().boundary_tol;
  const std::size_t n = static_cast<std::size_t>(std::ceil(S / ds - 1e-12));

  ControlledPathRecord rec;
  rec.ds = ds;
  rec.seed = seed;
  rec.path_id = path_id;
  rec.s.reserve(n + 1);
  rec.y.reserve(n + 1);
  rec.lambda0.reserve(n + 1);
  rec.lambda1.reserve(n + 1);

  rng::Counter gauss{seed, path_id, 0};
  rng::Counter holds{seed, path_id, 2};
  // initial state is the kernel target of visit 0
  Vec2 y = js.sample_kernel(seed, path_id, 0);
  double l0 = 0.0, l1 = 0.0;
  std::uint64_t visit = 1;
  bool holding = false;
  double hold_left = 0.0;
  rec.s.push_back(0.0);
  rec.y.push_back(y);
  rec.lambda0.push_back(l0);
  rec.lambda1.push_back(l1);
  const double sds = std::sqrt(ds);

  for (std::size_t k = 0; k < n; ++k) {
    double s_now = static_cast<double>(k) * ds;
    if (holding) {
      rec.atoms.push_back({s_now, y, Vec2{0.0, 0.0}, ds});
      l1 += ds;
      hold_left -= ds;
      if (hold_left <= 0.0) {
        y = js.sample_kernel(seed, path_id, visit);
        ++visit;
        holding = false;
      }
    } else {
      auto [z1, z2] = gauss.gauss_pair(k);
      Vec2 dW{z1 * sds, z2 * sds};
      Vec2 prop = y + js.coeff.b.eval(y) * ds + js.coeff.sigma.eval(y).apply(dW);
      if (dom.min_psi(prop) <= btol) {
        y = dom.min_psi(prop) < 0.0 ? bisect_to_boundary(dom, y, prop) : prop;
        holding = true;
        hold_left = holds.exponential(visit);
      } else {
        y = prop;
      }
      l0 += ds;
    }
    rec.s.push_back(static_cast<double>(k + 1) * ds);
    rec.y.push_back(y);
    rec.lambda0.push_back(l0);
    rec.lambda1.push_back(l1);
  }
  return rec;
}

PathRecord simulate_jump_constrained(const JumpScenario& js,
                                     std::uint64_t seed,
                                     std::uint64_t path_id, double T,
                                     double dt) {
  const geometry::Domain& dom = js.domain;
  const double btol = dom.tol().boundary_tol;
  const std::size_t n = static_cast<std::size_t>(std::ceil(T / dt - 1e-12));

  PathRecord rec;
  rec.dt = dt;
  rec.seed = seed;
  rec.path_id = path_id;
  rec.gamma.assign(n + 1, Vec2{0.0, 0.0});
  rec.boundary_flag.assign(n + 1, 0);
  rec.dW.assign(n, Vec2{0.0, 0.0});
  rec.lambda.assign(n + 1, 0.0);

  rng::Counter gauss{seed, path_id, 0};
  Vec2 y = js.sample_kernel(seed, path_id, 0);
  std::uint64_t visit = 1;
  bool on_boundary = false;
  rec.t.push_back(0.0);
  rec.x.push_back(y);
  const double sdt = std::sqrt(dt);

  for (std::size_t k = 0; k < n; ++k) {
    if (on_boundary) {
      // instantaneous jump: the boundary instant is followed by a kernel draw
      y = js.sample_kernel(seed, path_id, visit);
      ++visit;
      on_boundary = false;
    } else {
      auto [z1, z2] = gauss.gauss_pair(k);
      Vec2 dW{z1 * sdt, z2 * sdt};
      rec.dW[k] = dW;
      Vec2 prop = y + js.coeff.b.eval(y) * dt + js.coeff.sigma.eval(y).apply(dW);
      if (dom.min_psi(prop) <= btol) {
        y = dom.min_psi(prop) < 0.0 ? bisect_to_boundary(dom, y, prop) : prop;
        on_boundary = true;
      } else {
        y = prop;
      }
    }
    rec.t.push_back(static_cast<double>(k + 1) * dt);
    rec.x.push_back(y);
    rec.boundary_flag[k + 1] = on_boundary ? 1 : 0;
  }
  return rec;
}

std::vector<double> hold_durations(const ControlledPathRecord& cp, double ds) {
  std::vector<double> out;
  std::size_t run = 0;
  double prev_s = -1.0;
  for (const auto& a : cp.atoms) {
    if (run > 0 && a.s - prev_s > 1.5 * ds) {
      out.push_back(static_cast<double>(run) * ds);
      run = 0;
    }
    ++run;
    prev_s = a.s;
  }
  // the trailing group may be censored by the end of the record: drop it
  return out;
}

conditions::CheckReport check_exit_compatibility(const JumpScenario& js,
                                                 const ScalarField& psi_u,
                                                 int samples) {
  conditions::CheckReport rep;
  rep.id = conditions::ConditionId::ExitCompat;

  std::vector<Vec2> pts = js.domain.boundary_sample(0, samples);
  // median nearest-neighbour distance = effective sample spacing
  std::vector<double> nn(pts.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (i != j) nn[i] = std::min(nn[i], (pts[i] - pts[j]).norm());
  std::vector<double> sorted_nn = nn;
  std::nth_element(sorted_nn.begin(), sorted_nn.begin() + sorted_nn.size() / 2,
                   sorted_nn.end());
  double h = sorted_nn[sorted_nn.size() / 2];

  expr::VectorField grad_u = expr::gradient(psi_u);
  std::vector<std::size_t> on_u;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double v = psi_u.eval(pts[i]);
    double gnorm = grad_u.eval(pts[i]).norm();
    bool hit = gnorm > 1e-12 ? std::fabs(v) <= 0.5 * h * gnorm
                             : std::fabs(v) <= 1e-12;
    if (hit) on_u.push_back(i);
  }

  // cluster the hits; a cluster of three or more sampled points is an arc,
  // a transversal crossing yields at most two neighbouring hits
  std::vector<int> cluster(on_u.size(), -1);
  int n_clusters = 0;
  for (std::size_t a = 0; a < on_u.size(); ++a) {
    if (cluster[a] >= 0) continue;
    cluster[a] = n_clusters;
    std::vector<std::size_t> stack{a};
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < on_u.size(); ++b) {
        if (cluster[b] >= 0) continue;
        if ((pts[on_u[cur]] - pts[on_u[b]]).norm() <= 2.5 * h) {
          cluster[b] = n_clusters;
          stack.push_back(b);
        }
      }
    }
    ++n_clusters;
  }
  std::vector<int> cluster_size(n_clusters, 0);
  for (int c : cluster) ++cluster_size[c];
  int max_cluster = 0;
  for (int s : cluster_size) max_cluster = std::max(max_cluster, s);

  rep.metrics["samples"] = static_cast<double>(pts.size());
  rep.metrics["spacing"] = h;
  rep.metrics["points_on_exit_boundary"] = static_cast<double>(on_u.size());
  rep.metrics["estimated_arclength"] = static_cast<double>(on_u.size()) * h;
  rep.metrics["max_cluster"] = static_cast<double>(max_cluster);
  rep.tolerances["arc_cluster_threshold"] = 3.0;

  for (std::size_t a = 0; a < on_u.size() && rep.witnesses.size() < 8; ++a) {
    Vec2 p = pts[on_u[a]];
    Vec2 gu = grad_u.eval(p);
    Vec2 ge = js.domain.unit_normal(0, p);
    double angle = gu.norm() > 1e-12
                       ? std::acos(std::min(1.0, std::fabs(gu.unit().dot(ge))))
                       : 0.0;
    rep.witnesses.push_back({p, angle, "crossing angle (rad)"});
  }

  if (max_cluster >= 3) {
    rep.status = conditions::CheckStatus::Fail;
    rep.detail = "sampled arc of the exit boundary lies on the domain boundary";
  } else {
    rep.status = conditions::CheckStatus::Pass;
    rep.detail = on_u.empty() ? "boundaries disjoint at the sampled resolution"
                              : "isolated transversal crossings only";
  }
  return rep;
}

}  // namespace obliqua::jump
