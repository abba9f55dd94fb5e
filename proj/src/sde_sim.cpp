#include "obliqua/sde_sim.hpp"

#include <algorithm>
#include <cmath>

#include "obliqua/angular.hpp"

namespace obliqua::sim {

namespace {

double angle_of(const Vec2& u) { return std::atan2(u.x2, u.x1); }

// Root of f along increasing eta, f(0) < 0, f eventually positive. Returns
// an eta with f(eta) >= 0, minimal up to bisection resolution.
template <typename F>
std::optional<double> ray_root(F&& f, double guess) {
  double hi = std::max(guess, 1e-16);
  double lo = 0.0;
  bool bracketed = false;
  for (int it = 0; it < 200; ++it) {
    double v = f(hi);
    if (v >= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) return std::nullopt;
  }
  if (!bracketed) return std::nullopt;
  for (int it = 0; it < 90; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-16 * (1.0 + hi)) break;
  }
  return hi;
}

}  // namespace

SimContext::SimContext(const geometry::Domain& domain, Coefficients coeff)
    : domain_(&domain), coeff_(std::move(coeff)) {
  for (const auto& p : domain.pieces()) grads_.push_back(expr::gradient(p.psi));
  for (const auto& dc : domain.declared_corners()) {
    // direction u in G(x0) with u.n^i > 0 and u.n^j > 0: the push that makes
    // corner pushback solvable (exists whenever the direction condition holds)
    std::optional<Vec2> push;
    try {
      Vec2 gi = domain.pieces()[dc.piece_i].g.eval(dc.location).unit();
      Vec2 gj = domain.pieces()[dc.piece_j].g.eval(dc.location).unit();
      geometry::Corner c = domain.classify_corner(dc.location);
      std::vector<angular::Arc> arcs;
      geometry::Sector G = geometry::Sector::spanning({gi, gj});
      arcs = {{G.angle_lo, G.angle_hi}};
      arcs = angular::intersect_open_halfplane(arcs, angle_of(c.normal_i));
      if (c.kind == geometry::CornerKind::ConePoint)
        arcs = angular::intersect_open_halfplane(arcs, angle_of(c.normal_j));
      auto w = angular::widest_midpoint(arcs, true);
      if (w && w->dot(c.normal_i) > 1e-12) push = *w;
    } catch (const std::exception&) {
      push = std::nullopt;
    }
    corner_push_.push_back(push);
  }
}

Vec2 SimContext::grad_psi(int piece, const Vec2& x) const {
  return grads_[piece].eval(x);
}

std::optional<Vec2> SimContext::corner_push(int corner_index) const {
  return corner_push_.at(corner_index);
}

std::optional<int> SimContext::nearest_corner(const Vec2& x, double band) const {
  std::optional<int> best;
  double best_d = band;
  const auto& corners = domain_->declared_corners();
  for (int i = 0; i < static_cast<int>(corners.size()); ++i) {
    double d = (corners[i].location - x).norm();
    if (d <= best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

StepResult euler_reflect_step(const SimContext& ctx, const Vec2& x, double dt,
                              const Vec2& dW, std::uint64_t step_index) {
  const geometry::Domain& dom = ctx.domain();
  Vec2 prop = x + ctx.coeff().b.eval(x) * dt + ctx.coeff().sigma.eval(x).apply(dW);
  if (dom.min_psi(prop) >= 0.0) return {prop, 0.0, std::nullopt};

  Vec2 total{0.0, 0.0};
  for (int iter = 0; iter < ctx.max_push_iters; ++iter) {
    std::vector<int> violated;
    for (int i = 0; i < static_cast<int>(dom.pieces().size()); ++i)
      if (dom.pieces()[i].psi.eval(prop) < 0.0) violated.push_back(i);
    if (violated.empty()) break;

    // alternating single-piece pushes near a corner contract only slowly;
    // after a few rounds settle it with one ray push into the corner cone
    if (iter >= 16) {
      auto corner = ctx.nearest_corner(prop, 0.5);
      std::optional<Vec2> u;
      if (corner) u = ctx.corner_push(*corner);
      if (u) {
        Vec2 dir = *u;
        auto f = [&](double eta) { return dom.min_psi(prop + dir * eta); };
        auto eta = ray_root(f, std::max(-dom.min_psi(prop), 1e-12));
        if (eta) {
          prop = prop + dir * (*eta);
          total = total + dir * (*eta);
          continue;
        }
      }
    }

    if (violated.size() >= 2) {
      auto corner = ctx.nearest_corner(prop, 0.5);
      if (corner) {
        const auto& dc = dom.declared_corners()[*corner];
        int i = dc.piece_i, j = dc.piece_j;
        Vec2 g1 = dom.pieces()[i].g.eval(dc.location).unit();
        Vec2 g2 = dom.pieces()[j].g.eval(dc.location).unit();
        double fi = dom.pieces()[i].psi.eval(prop);
        double fj = dom.pieces()[j].psi.eval(prop);
        Vec2 gi = ctx.grad_psi(i, prop), gj = ctx.grad_psi(j, prop);
        // linearized 2x2 nonnegative push system
        double a11 = gi.dot(g1), a12 = gi.dot(g2);
        double a21 = gj.dot(g1), a22 = gj.dot(g2);
        double det = a11 * a22 - a12 * a21;
        bool applied = false;
        if (std::fabs(det) > 1e-14) {
          double e1 = (-fi * a22 + fj * a12) / det;
          double e2 = (-fj * a11 + fi * a21) / det;
          if (e1 >= -1e-15 && e2 >= -1e-15) {
            e1 = std::max(e1, 0.0);
            e2 = std::max(e2, 0.0);
            Vec2 push = g1 * e1 + g2 * e2;
            prop = prop + push;
            total = total + push;
            applied = true;
          }
        }
        if (applied) continue;
        // second try: one ray along the feasible combined corner direction
        auto u = ctx.corner_push(*corner);
        if (u) {
          Vec2 dir = *u;
          auto f = [&](double eta) {
            Vec2 q = prop + dir * eta;
            return std::min(dom.pieces()[i].psi.eval(q),
                            dom.pieces()[j].psi.eval(q));
          };
          auto eta = ray_root(f, std::max(-std::min(fi, fj), 1e-12));
          if (eta) {
            prop = prop + dir * (*eta);
            total = total + dir * (*eta);
            continue;
          }
        }
        // deep diagonal overshoot: the one-shot corner ray can miss the
        // curved wall; alternating single-piece pushes below still contract
      }
    }

    // single-piece push along g^i, with the direction evaluated at the
    // landing point (fixed-point so that gamma lies in the cone at the state)
    int i = violated[0];
    double worst = dom.pieces()[i].psi.eval(prop);
    for (int v : violated) {
      double val = dom.pieces()[v].psi.eval(prop);
      if (val < worst) {
        worst = val;
        i = v;
      }
    }
    // where the oblique ray misses the curved wall (it can, close to a
    // corner with a steep boundary), settle the step with the corner cone
    auto corner_rescue = [&]() {
      auto corner = ctx.nearest_corner(prop, 0.5);
      std::optional<Vec2> u;
      if (corner) u = ctx.corner_push(*corner);
      if (!u) throw ProjectionFailure(step_index);
      Vec2 dir = *u;
      auto f = [&](double eta) { return dom.min_psi(prop + dir * eta); };
      auto eta = ray_root(f, std::max(-dom.min_psi(prop), 1e-12));
      if (!eta) throw ProjectionFailure(step_index);
      prop = prop + dir * (*eta);
      total = total + dir * (*eta);
    };

    auto p = dom.project_to_piece(i, prop);
    if (!p) {
      corner_rescue();
      continue;
    }
    Vec2 g = dom.pieces()[i].g.eval(*p).unit();
    double eta_final = 0.0;
    Vec2 land = prop;
    bool ray_ok = true;
    for (int fp = 0; fp < 12; ++fp) {
      auto f = [&](double eta) { return dom.pieces()[i].psi.eval(prop + g * eta); };
      double slope = std::max(ctx.grad_psi(i, *p).dot(g), 1e-12);
      auto eta = ray_root(f, -dom.pieces()[i].psi.eval(prop) / slope);
      if (!eta) {
        ray_ok = false;
        break;
      }
      eta_final = *eta;
      land = prop + g * eta_final;
      Vec2 g_new = dom.pieces()[i].g.eval(land).unit();
      if ((g_new - g).norm() < 1e-13) break;
      g = g_new;
    }
    if (!ray_ok) {
      corner_rescue();
      continue;
    }
    prop = land;
    total = total + g * eta_final;
  }

  if (dom.min_psi(prop) < 0.0) throw ProjectionFailure(step_index);
  double dlam = total.norm();
  if (dlam == 0.0) return {prop, 0.0, std::nullopt};
  return {prop, dlam, total.unit()};
}

PathRecord simulate_path(const SimContext& ctx, const Vec2& x0,
                         std::uint64_t seed, std::uint64_t path_id, double T,
                         double dt) {
  const std::size_t n = static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
  PathRecord rec;
  rec.dt = dt;
  rec.seed = seed;
  rec.path_id = path_id;
  rec.t.reserve(n + 1);
  rec.x.reserve(n + 1);
  rec.lambda.reserve(n + 1);
  rec.gamma.assign(n + 1, Vec2{0.0, 0.0});
  rec.boundary_flag.assign(n + 1, 0);
  rec.dW.assign(n, Vec2{0.0, 0.0});

  rng::Counter stream{seed, path_id, 0};
  Vec2 x = x0;
  double lam = 0.0;
  rec.t.push_back(0.0);
  rec.x.push_back(x);
  rec.lambda.push_back(lam);
  const double sdt = std::sqrt(dt);
  for (std::size_t k = 0; k < n; ++k) {
    auto [z1, z2] = stream.gauss_pair(k);
    Vec2 dW{z1 * sdt, z2 * sdt};
    StepResult sr = euler_reflect_step(ctx, x, dt, dW, k);
    x = sr.x_next;
    lam += sr.dlambda;
    rec.dW[k] = dW;
    rec.t.push_back(static_cast<double>(k + 1) * dt);
    rec.x.push_back(x);
    rec.lambda.push_back(lam);
    if (sr.gamma) {
      rec.gamma[k + 1] = *sr.gamma;
      rec.boundary_flag[k + 1] = 1;
    }
  }
  return rec;
}

namespace {

// First boundary contact along the segment [from, to]; from is interior.
Vec2 bisect_to_boundary(const geometry::Domain& dom, const Vec2& from,
                        const Vec2& to) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    Vec2 q = from + (to - from) * mid;
    if (dom.min_psi(q) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return from + (to - from) * lo;
}

}  // namespace

ControlledPathRecord simulate_controlled(const SimContext& ctx, const Vec2& y0,
                                         std::uint64_t seed,
                                         std::uint64_t path_id, double S,
                                         double ds) {
  const geometry::Domain& dom = ctx.domain();
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

  rng::Counter stream{seed, path_id, 0};
  Vec2 y = y0;
  double l0 = 0.0, l1 = 0.0;
  rec.s.push_back(0.0);
  rec.y.push_back(y);
  rec.lambda0.push_back(l0);
  rec.lambda1.push_back(l1);
  const double sds = std::sqrt(ds);

  for (std::size_t k = 0; k < n; ++k) {
    double s_now = static_cast<double>(k) * ds;
    if (dom.min_psi(y) > btol) {
      // interior: diffuse, interior clock runs
      auto [z1, z2] = stream.gauss_pair(k);
      Vec2 dW{z1 * sds, z2 * sds};
      Vec2 prop = y + ctx.coeff().b.eval(y) * ds +
                  ctx.coeff().sigma.eval(y).apply(dW);
      if (dom.min_psi(prop) >= 0.0)
        y = prop;
      else
        y = bisect_to_boundary(dom, y, prop);
      l0 += ds;
    } else {
      // boundary: move along a direction of G(y), boundary clock runs
      std::vector<int> active;
      for (int i = 0; i < static_cast<int>(dom.pieces().size()); ++i)
        if (dom.pieces()[i].psi.eval(y) <= btol) active.push_back(i);
      Vec2 u;
      if (active.size() >= 2) {
        auto corner = ctx.nearest_corner(y, 0.5);
        std::optional<Vec2> cp =
            corner ? ctx.corner_push(*corner) : std::nullopt;
        if (cp) {
          u = *cp;
        } else {
          Vec2 sum{0.0, 0.0};
          for (int i : active) sum = sum + dom.pieces()[i].g.eval(y).unit();
          u = sum.unit();
        }
      } else if (active.size() == 1) {
        u = dom.pieces()[active[0]].g.eval(y).unit();
      } else {
        // outside closure by a hair: push along the nearest piece's direction
        int worst = 0;
        double w = dom.pieces()[0].psi.eval(y);
        for (int i = 1; i < static_cast<int>(dom.pieces().size()); ++i) {
          double v = dom.pieces()[i].psi.eval(y);
          if (v < w) {
            w = v;
            worst = i;
          }
        }
        u = dom.pieces()[worst].g.eval(y).unit();
      }
      rec.atoms.push_back({s_now, y, u, ds});
      y = y + u * ds;
      l1 += ds;
    }
    rec.s.push_back(static_cast<double>(k + 1) * ds);
    rec.y.push_back(y);
    rec.lambda0.push_back(l0);
    rec.lambda1.push_back(l1);
  }
  return rec;
}

PathRecord time_change(const ControlledPathRecord& cp, double dt_out,
                       double horizon) {
  PathRecord rec;
  rec.dt = dt_out;
  rec.seed = cp.seed;
  rec.path_id = cp.path_id;

  const std::size_t n_t =
      static_cast<std::size_t>(std::ceil(horizon / dt_out - 1e-12));
  std::size_t idx = 0;
  std::size_t atom_idx = 0;
  double lam = 0.0;
  for (std::size_t j = 0; j <= n_t; ++j) {
    double tj = static_cast<double>(j) * dt_out;
    // right-continuous generalized inverse: first s with lambda0(s) > t
    while (idx < cp.lambda0.size() && cp.lambda0[idx] <= tj) ++idx;
    if (idx >= cp.lambda0.size()) {
      rec.truncated = true;  // interior clock ran out before the horizon
      break;
    }
    double s_level = cp.s[idx];
    double mass = 0.0;
    Vec2 dir_sum{0.0, 0.0};
    Vec2 last_dir{0.0, 0.0};
    while (atom_idx < cp.atoms.size() && cp.atoms[atom_idx].s < s_level) {
      mass += cp.atoms[atom_idx].mass;
      dir_sum = dir_sum + cp.atoms[atom_idx].direction * cp.atoms[atom_idx].mass;
      last_dir = cp.atoms[atom_idx].direction;
      ++atom_idx;
    }
    lam += mass;
    rec.t.push_back(tj);
    rec.x.push_back(cp.y[idx]);
    rec.lambda.push_back(lam);
    if (mass > 0.0) {
      Vec2 g = dir_sum.norm() > 1e-300 ? dir_sum.unit() : last_dir;
      rec.gamma.push_back(g);
      rec.boundary_flag.push_back(1);
    } else {
      rec.gamma.push_back(Vec2{0.0, 0.0});
      rec.boundary_flag.push_back(0);
    }
    if (j < n_t) rec.dW.push_back(Vec2{0.0, 0.0});
  }
  return rec;
}

StoppedPath stop_at_exit(const PathRecord& p, const RegionPredicate& in_U) {
  StoppedPath sp;
  sp.record = p;
  std::size_t exit = p.x.size();
  for (std::size_t k = 0; k < p.x.size(); ++k) {
    if (!in_U(p.x[k])) {
      exit = k;
      break;
    }
  }
  if (exit == p.x.size()) return sp;  // no exit, +inf sentinel
  sp.exit_index = exit;
  sp.exit_time = p.t[exit];
  for (std::size_t k = exit + 1; k < p.x.size(); ++k) {
    sp.record.x[k] = p.x[exit];
    sp.record.lambda[k] = p.lambda[exit];
    sp.record.gamma[k] = Vec2{0.0, 0.0};
    sp.record.boundary_flag[k] = 0;
    if (k - 1 < sp.record.dW.size()) sp.record.dW[k - 1] = Vec2{0.0, 0.0};
  }
  return sp;
}

StoppedControlledPath stop_at_exit(const ControlledPathRecord& p,
                                   const RegionPredicate& in_U) {
  StoppedControlledPath sp;
  sp.record = p;
  std::size_t exit = p.y.size();
  for (std::size_t k = 0; k < p.y.size(); ++k) {
    if (!in_U(p.y[k])) {
      exit = k;
      break;
    }
  }
  if (exit == p.y.size()) return sp;
  sp.exit_index = exit;
  sp.exit_time = p.s[exit];
  for (std::size_t k = exit + 1; k < p.y.size(); ++k) {
    sp.record.y[k] = p.y[exit];
    sp.record.lambda0[k] = p.lambda0[exit];
    sp.record.lambda1[k] = p.lambda1[exit];
  }
  sp.record.atoms.erase(
      std::remove_if(sp.record.atoms.begin(), sp.record.atoms.end(),
                     [&](const Lambda1Atom& a) { return a.s >= sp.exit_time; }),
      sp.record.atoms.end());
  return sp;
}

PathRecord paste(const StoppedPath& head, const PathRecord& continuation) {
  if (head.exit_time == kNoExit) return head.record;
  const PathRecord& h = head.record;
  const PathRecord& c = continuation;
  if ((c.x.front() - h.x[head.exit_index]).norm() > 1e-12)
    throw SeamMismatch("continuation does not start at the exit state");

  PathRecord out;
  out.dt = h.dt;
  out.seed = h.seed;
  out.path_id = h.path_id;
  double tau = head.exit_time;
  double lam0 = h.lambda[head.exit_index];
  for (std::size_t k = 0; k <= head.exit_index; ++k) {
    out.t.push_back(h.t[k]);
    out.x.push_back(h.x[k]);
    out.lambda.push_back(h.lambda[k]);
    out.gamma.push_back(h.gamma[k]);
    out.boundary_flag.push_back(h.boundary_flag[k]);
    if (k < head.exit_index) out.dW.push_back(h.dW[k]);
  }
  for (std::size_t k = 1; k < c.x.size(); ++k) {
    out.t.push_back(tau + c.t[k]);
    out.x.push_back(c.x[k]);
    out.lambda.push_back(lam0 + c.lambda[k]);
    out.gamma.push_back(c.gamma[k]);
    out.boundary_flag.push_back(c.boundary_flag[k]);
    out.dW.push_back(c.dW[k - 1]);
  }
  return out;
}

PathRecord localized_simulate(const SimContext& ctx, const Vec2& x0,
                              double r0, std::uint64_t seed,
                              std::uint64_t path_id, double T, double dt) {
  const geometry::Domain& dom = ctx.domain();
  const auto& corners = dom.declared_corners();
  for (std::size_t a = 0; a < corners.size(); ++a)
    for (std::size_t b = a + 1; b < corners.size(); ++b)
      if ((corners[a].location - corners[b].location).norm() <= 2.0 * r0)
        throw std::invalid_argument("corner balls of radius r0 are not disjoint");

  // cover element at a state: corner ball when within r0/2 of a corner,
  // remainder otherwise; overlap in [r0/2, r0) avoids chattering
  auto element_of = [&](const Vec2& x) -> int {
    for (int i = 0; i < static_cast<int>(corners.size()); ++i)
      if ((x - corners[i].location).norm() < 0.5 * r0) return i;
    return -1;  // remainder
  };
  auto exited = [&](int element, const Vec2& x) {
    if (element >= 0) return (x - corners[element].location).norm() >= r0;
    for (const auto& c : corners)
      if ((x - c.location).norm() < 0.5 * r0) return true;
    return false;
  };

  const std::size_t n = static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
  PathRecord rec;
  rec.dt = dt;
  rec.seed = seed;
  rec.path_id = path_id;
  rec.gamma.assign(n + 1, Vec2{0.0, 0.0});
  rec.boundary_flag.assign(n + 1, 0);
  rec.dW.assign(n, Vec2{0.0, 0.0});

  Vec2 x = x0;
  double lam = 0.0;
  int element = element_of(x);
  std::uint64_t segment = 0;
  rec.t.push_back(0.0);
  rec.x.push_back(x);
  rec.lambda.push_back(lam);
  const double sdt = std::sqrt(dt);
  for (std::size_t k = 0; k < n; ++k) {
    // paste semantics: every cover exit re-keys the noise stream, so the
    // continuation is driven by an independent substream
    rng::Counter stream{seed, path_id, segment == 0 ? 0 : 1000 + segment};
    auto [z1, z2] = stream.gauss_pair(k);
    Vec2 dW{z1 * sdt, z2 * sdt};
    StepResult sr = euler_reflect_step(ctx, x, dt, dW, k);
    x = sr.x_next;
    lam += sr.dlambda;
    rec.dW[k] = dW;
    rec.t.push_back(static_cast<double>(k + 1) * dt);
    rec.x.push_back(x);
    rec.lambda.push_back(lam);
    if (sr.gamma) {
      rec.gamma[k + 1] = *sr.gamma;
      rec.boundary_flag[k + 1] = 1;
    }
    if (exited(element, x)) {
      ++segment;
      element = element_of(x);
    }
  }
  return rec;
}

PathInvariantReport verify_path_invariants(const SimContext& ctx,
                                           const PathRecord& p,
                                           double psi_slack) {
  PathInvariantReport rep;
  const geometry::Domain& dom = ctx.domain();
  rep.worst_psi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.x.size(); ++k) {
    rep.worst_psi = std::min(rep.worst_psi, dom.min_psi(p.x[k]));
    if (dom.min_psi(p.x[k]) < -psi_slack) rep.in_closure = false;
    if (k > 0) {
      double dl = p.lambda[k] - p.lambda[k - 1];
      if (dl < 0.0) rep.lambda_monotone = false;
      if (dl != 0.0 && !p.boundary_flag[k]) rep.lambda_support = false;
    }
  }
  return rep;
}

}  // namespace obliqua::sim
