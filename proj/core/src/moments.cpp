#include "hecke/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace hecke {

namespace {

RingElement one(const RingContext& ctx) { return RingElement(ctx, Integer(1)); }

RingElement window_end(const RingElement& abs_n, PhiMode mode) {
  if (mode == PhiMode::paper) return abs_n;
  const RingContext& ctx = abs_n.context();
  return one(ctx) + RingElement::lambda(ctx) * abs_n;
}

bool in_window(const RingElement& a, const RingElement& end, PhiMode mode) {
  if (compare(a, one(a.context())) < 0) return false;
  const int c = compare(a, end);
  return mode == PhiMode::paper ? c <= 0 : c < 0;
}

unsigned effective_workers(unsigned workers) { return std::max(1u, workers); }

// Runs body(w) for w in [0, workers) on separate threads and rethrows the
// first exception in worker order.
template <typename Body>
void run_sharded(unsigned workers, Body&& body) {
  if (workers == 1) {
    body(0u);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        body(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_radius(const OrbitSet& s, const Rational& radius, const char* what) {
  if (s.radius() < radius) {
    throw InsufficientRadiusError(std::string(what) + ": orbit radius " + rational_to_string(s.radius()) +
                                  " is below the requested " + rational_to_string(radius));
  }
}

std::vector<OrbitPoint> points_by_norm(const OrbitSet& s) {
  auto pts = s.expand();
  std::stable_sort(pts.begin(), pts.end(),
                   [](const OrbitPoint& a, const OrbitPoint& b) { return a.norm_approx < b.norm_approx; });
  return pts;
}

// Ball test slack for double-precision pruning; exact tests follow.
double prune_slack(double r2) { return 1e-9 * (r2 + 1.0); }

}  // namespace

std::string_view to_string(PhiMode mode) { return mode == PhiMode::paper ? "paper" : "fundamental"; }

PhiMode parse_phi_mode(std::string_view text) {
  if (text == "paper") return PhiMode::paper;
  if (text == "fundamental") return PhiMode::fundamental;
  throw DomainError("unknown phi mode '" + std::string(text) + "'");
}

SvConstant sv_constant(int q) {
  if (q < 3) throw DomainError("c(q) needs q >= 3");
  SvConstant c;
  c.q = q;
  c.pi_squared_coefficient = Rational(q - 2, 2 * q);
  c.pi_squared_coefficient.canonicalize();
  c.value = c.pi_squared_coefficient.get_d() * std::numbers::pi * std::numbers::pi;
  return c;
}

std::vector<RingElement> totient_residues(const RingElement& n, const OrbitSet& s, PhiMode mode) {
  if (n.q() != s.q()) throw DomainError("determinant and orbit set use different q");
  if (n.is_zero()) throw DomainError("phi_q(0) is undefined");
  const RingElement abs_n = abs(n);
  const RingElement end = window_end(abs_n, mode);
  if (!s.covers(end * end + abs_n * abs_n)) {
    throw InsufficientRadiusError("orbit radius " + rational_to_string(s.radius()) + " cannot see the residue window of n=" +
                                  n.to_string());
  }
  std::vector<RingElement> out;
  for (const Vec2& r : s.with_second_coordinate(abs_n)) {
    if (in_window(r.x, end, mode)) out.push_back(r.x);
  }
  std::sort(out.begin(), out.end(), [](const RingElement& a, const RingElement& b) { return compare(a, b) < 0; });
  return out;
}

std::size_t phi_q(const RingElement& n, const OrbitSet& s, PhiMode mode) { return totient_residues(n, s, mode).size(); }

bool n_in_Nq(const RingElement& n, const OrbitSet& s, PhiMode mode) {
  if (n.is_zero()) return false;
  return phi_q(n, s, mode) >= 1;
}

Rational radius_for_totient(const RingContext& ctx, const Rational& bound, PhiMode mode) {
  const double b = bound.get_d();
  const double end = mode == PhiMode::paper ? b : 1.0 + ctx.lambda_approx() * b;
  return Rational(static_cast<long>(std::ceil(std::sqrt(end * end + b * b))) + 1);
}

std::vector<RingElement> enumerate_Nq(const OrbitSet& s, const Rational& bound, PhiMode mode) {
  if (sgn(bound) < 0) throw DomainError("negative N_q bound");
  const RingContext& ctx = s.context();
  // With bound = p / r, the window needs R^2 >= (end^2 + p^2) / r^2; scale by r.
  const Integer p(bound.get_num());
  const Integer r(bound.get_den());
  const RingElement pe(ctx, p), re(ctx, r);
  const RingElement end = mode == PhiMode::paper ? pe : re + RingElement::lambda(ctx) * pe;
  if (!SquaredRadius(s.radius() * bound.get_den()).admits(end * end + pe * pe)) {
    throw InsufficientRadiusError("orbit radius " + rational_to_string(s.radius()) + " cannot decide N_q up to " +
                                  rational_to_string(bound));
  }

  std::vector<RingElement> positive;
  const auto reps = s.representatives();
  std::size_t i = 0;
  while (i < reps.size()) {
    std::size_t k = i;
    while (k < reps.size() && reps[k].y == reps[i].y) ++k;
    const RingElement& y = reps[i].y;
    if (!y.is_zero() && compare(y * r, pe) <= 0) {
      const RingElement yend = window_end(y, mode);
      for (std::size_t t = i; t < k; ++t) {
        if (in_window(reps[t].x, yend, mode)) {
          positive.push_back(y);
          break;
        }
      }
    }
    i = k;
  }
  std::sort(positive.begin(), positive.end(), [](const RingElement& a, const RingElement& b) { return compare(a, b) < 0; });
  std::vector<RingElement> out;
  out.reserve(2 * positive.size());
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) out.push_back(-*it);
  for (const auto& y : positive) out.push_back(y);
  return out;
}

Mat2 complete_to_matrix(const Vec2& v, const OrbitSet& s) {
  if (s.lookup(v) != Membership::member) throw NotAMemberError(v.to_string() + " is not in the orbit set");
  auto g = s.witness(v);
  if (!g) throw DomainError("orbit set was generated without witnesses");
  if (g->determinant() != one(s.context())) throw ConsistencyError("stored witness for " + v.to_string() + " has det != 1");
  return *g;
}

std::pair<RingElement, Integer> fundamental_residue(const RingElement& l, const RingElement& n) {
  if (n.is_zero()) throw DegeneratePairError("residue modulo lambda * 0");
  const RingContext& ctx = l.context();
  const RingElement step = RingElement::lambda(ctx) * abs(n);
  const RingElement lo = one(ctx);
  const RingElement hi = lo + step;
  Integer k = round_quotient(l - lo, step);
  RingElement m = l - step * k;
  while (compare(m, lo) < 0) {
    m += step;
    k -= Integer(1);
  }
  while (compare(m, hi) >= 0) {
    m -= step;
    k += Integer(1);
  }
  return {std::move(m), sign(n) < 0 ? -k : k};
}

CanonicalPair canonicalize_with_witness(const Mat2& g, const Vec2& v2) {
  const Mat2 gi = g.inverse_unimodular();
  const Vec2 u = gi * v2;
  if (u.y.is_zero()) throw DegeneratePairError("pair with zero determinant");
  auto [m, j] = fundamental_residue(u.x, u.y);
  Mat2 h = generator_t_power(g.context(), -j) * gi;
  return {u.y, std::move(m), std::move(h)};
}

CanonicalPair canonicalize_pair(const Vec2& v1, const Vec2& v2, const OrbitSet& s) {
  if (det(v1, v2).is_zero()) throw DegeneratePairError("pair " + v1.to_string() + ", " + v2.to_string() + " is dependent");
  if (s.lookup(v2) != Membership::member) throw NotAMemberError(v2.to_string() + " is not in the orbit set");
  const Mat2 g = complete_to_matrix(v1, s);
  CanonicalPair cp = canonicalize_with_witness(g, v2);
  if (cp.witness * v1 != Vec2::of(s.context(), 1, 0) || cp.witness * v2 != Vec2{cp.m, cp.n}) {
    throw ConsistencyError("canonical witness does not reduce " + v1.to_string() + ", " + v2.to_string());
  }
  return cp;
}

// ---------------------------------------------------------------------------
// Pair counting

PairCounts count_pairs(const OrbitSet& s, const Rational& radius, const PairCountOptions& options) {
  require_radius(s, radius, "count_pairs");
  if (options.refine_m && !s.has_witnesses()) throw DomainError("m refinement needs an orbit set with witnesses");
  const SquaredRadius ball(radius);
  const double r2 = ball.value_approx();
  const double slack = prune_slack(r2);
  const auto pts = points_by_norm(s);
  const unsigned workers = effective_workers(options.workers);

  using NKey = std::pair<RingElement, RingElement>;
  struct NKeyHash {
    std::size_t operator()(const NKey& k) const noexcept { return k.first.hash() * 0x9e3779b97f4a7c15ULL ^ k.second.hash(); }
  };
  struct Local {
    std::unordered_map<RingElement, std::uint64_t, ExactHash> by_n;
    std::unordered_map<NKey, std::uint64_t, NKeyHash> by_nm;
    std::uint64_t dependent = 0;
  };
  std::vector<Local> locals(workers);

  run_sharded(workers, [&](unsigned w) {
    Local& loc = locals[w];
    for (std::size_t i = w; i < pts.size(); i += workers) {
      const OrbitPoint& p = pts[i];
      const double rem = r2 - p.norm_approx + slack;
      if (rem < 0) break;
      for (const OrbitPoint& o : pts) {
        if (o.norm_approx > rem) break;
        if (!ball.admits(p.norm + o.norm)) continue;
        RingElement n = det(p.v, o.v);
        if (n.is_zero()) {
          ++loc.dependent;
          continue;
        }
        if (options.refine_m) {
          // g = (v1 | w), g^-1 v2 = (det(v2, w), det(v1, v2))
          auto [m, j] = fundamental_residue(det(o.v, p.companion), n);
          ++loc.by_nm[{n, std::move(m)}];
        }
        ++loc.by_n[std::move(n)];
      }
    }
  });

  PairCounts out;
  for (auto& loc : locals) {
    out.dependent += loc.dependent;
    for (auto& [n, c] : loc.by_n) out.by_n[n] += c;
    for (auto& [k, c] : loc.by_nm) out.by_nm[k] += c;
  }
  return out;
}

namespace {

// Walks every (v1, v2) with det(v1 v2) = n and |v1|^2 + |v2|^2 <= R_max^2.
// visit(worker, point, v2, residue index, exact total norm).
template <typename Visit>
void visit_determinant_lines(const OrbitSet& s, const std::vector<OrbitPoint>& pts, const SquaredRadius& ball,
                             const RingElement& n, const std::vector<RingElement>& residues, unsigned workers,
                             Visit&& visit) {
  const RingContext& ctx = s.context();
  const double r2max = ball.value_approx();
  const double slack = prune_slack(r2max);
  const RingElement lam_n = RingElement::lambda(ctx) * n;
  const double step = approx(lam_n);
  const double nd = approx(n);
  std::vector<double> res_approx;
  for (const auto& m : residues) res_approx.push_back(approx(m));

  run_sharded(workers, [&](unsigned w) {
    for (std::size_t i = w; i < pts.size(); i += workers) {
      const OrbitPoint& p = pts[i];
      const double a = p.norm_approx;
      const double rho2 = r2max - a + slack;
      if (rho2 < 0) continue;
      const double disc = a * rho2 - nd * nd;
      if (disc < 0) continue;
      // |l v1 + n w|^2 <= rho^2 with det(v1, w) = 1 gives
      // l in center +- sqrt(|v1|^2 rho^2 - n^2) / |v1|^2.
      const double vx = approx(p.v.x), vy = approx(p.v.y);
      const double wx = approx(p.companion.x), wy = approx(p.companion.y);
      const double center = -nd * (vx * wx + vy * wy) / a;
      const double half = std::sqrt(disc) / a;
      for (std::size_t r = 0; r < residues.size(); ++r) {
        double jlo = (center - half - res_approx[r]) / step;
        double jhi = (center + half - res_approx[r]) / step;
        if (jlo > jhi) std::swap(jlo, jhi);
        const auto j0 = static_cast<long long>(std::floor(jlo)) - 1;
        const auto j1 = static_cast<long long>(std::ceil(jhi)) + 1;
        for (long long j = j0; j <= j1; ++j) {
          const RingElement l = residues[r] + lam_n * Integer(j);
          Vec2 v2 = l * p.v + n * p.companion;
          const RingElement total = p.norm + norm_sq(v2);
          if (!ball.admits(total)) continue;
          visit(w, p, std::move(v2), r, total);
        }
      }
    }
  });
}

void check_line_inputs(const OrbitSet& s, const Rational& rmax, const RingElement& n) {
  if (n.is_zero()) throw DomainError("determinant 0 is not an orbit locus");
  if (!s.has_witnesses()) throw DomainError("determinant-line counting needs an orbit set with witnesses");
  require_radius(s, rmax, "determinant-line counting");
}

}  // namespace

DeterminantCounts count_pairs_with_determinant(const OrbitSet& s, std::span<const Rational> radii, const RingElement& n,
                                               unsigned workers) {
  if (radii.empty()) throw DomainError("empty radius sweep");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i - 1] < radii[i])) throw DomainError("radius sweep must be strictly increasing");
  }
  check_line_inputs(s, radii.back(), n);

  DeterminantCounts out{n, {}, {}, {}, {}};
  out.radii.assign(radii.begin(), radii.end());
  out.residues = totient_residues(n, s, PhiMode::fundamental);
  std::vector<SquaredRadius> balls;
  for (const auto& r : radii) balls.emplace_back(r);

  const auto pts = s.expand();
  const std::size_t nr = radii.size(), nm = out.residues.size();
  workers = effective_workers(workers);
  std::vector<std::vector<std::uint64_t>> hits(workers, std::vector<std::uint64_t>(nr * nm, 0));
  visit_determinant_lines(s, pts, balls.back(), n, out.residues, workers,
                          [&](unsigned w, const OrbitPoint&, Vec2&&, std::size_t r, const RingElement& total) {
                            std::size_t lo = 0, hi = nr - 1;
                            while (lo < hi) {
                              const std::size_t mid = (lo + hi) / 2;
                              if (balls[mid].admits(total)) hi = mid;
                              else lo = mid + 1;
                            }
                            ++hits[w][lo * nm + r];
                          });

  out.totals.assign(nr, 0);
  out.by_residue.assign(nr, std::vector<std::uint64_t>(nm, 0));
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t k = 0; k < nm; ++k) {
      std::uint64_t c = r > 0 ? out.by_residue[r - 1][k] : 0;
      for (const auto& h : hits) c += h[r * nm + k];
      out.by_residue[r][k] = c;
      out.totals[r] += c;
    }
  }
  return out;
}

std::vector<std::pair<Vec2, Vec2>> pairs_with_determinant(const OrbitSet& s, const Rational& radius, const RingElement& n,
                                                          unsigned workers) {
  check_line_inputs(s, radius, n);
  const auto residues = totient_residues(n, s, PhiMode::fundamental);
  const auto pts = s.expand();
  workers = effective_workers(workers);
  std::vector<std::vector<std::pair<Vec2, Vec2>>> found(workers);
  visit_determinant_lines(s, pts, SquaredRadius(radius), n, residues, workers,
                          [&](unsigned w, const OrbitPoint& p, Vec2&& v2, std::size_t, const RingElement&) {
                            found[w].emplace_back(p.v, std::move(v2));
                          });
  std::vector<std::pair<Vec2, Vec2>> out;
  for (auto& f : found) std::move(f.begin(), f.end(), std::back_inserter(out));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    Vec2Less less;
    if (less(a.first, b.first)) return true;
    if (less(b.first, a.first)) return false;
    return less(a.second, b.second);
  });
  return out;
}

PairDensityPrediction predicted_pair_density(const RingElement& n, const OrbitSet& s, PhiMode mode) {
  PairDensityPrediction p{abs(n), 0, false, mode, Rational(0), 0.0};
  p.mode = mode;
  p.phi = phi_q(n, s, mode);
  p.in_Nq = p.phi >= 1;
  const int q = s.q();
  p.coefficient = Rational(static_cast<long>(2 * q * p.phi), q - 2);
  p.coefficient.canonicalize();
  p.value = p.in_Nq ? p.coefficient.get_d() / approx(p.abs_n) : 0.0;
  return p;
}

double predicted_orbit_density(const RingElement& n) {
  const int q = n.q();
  return 2.0 * q / ((q - 2) * approx(abs(n)));
}

DensityReport make_density_report(int q, std::string label, const Rational& radius, std::uint64_t count, double predicted) {
  DensityReport r;
  r.q = q;
  r.label = std::move(label);
  r.radius = radius;
  const double rr = radius.get_d();
  r.empirical = static_cast<double>(count) / (rr * rr);
  r.predicted = predicted;
  r.relative_error =
      predicted > 0 ? std::abs(r.empirical - predicted) / predicted : std::numeric_limits<double>::quiet_NaN();
  return r;
}

// ---------------------------------------------------------------------------
// k-tuples

std::string TupleClass::key() const {
  std::ostringstream out;
  auto list = [&](const std::vector<RingElement>& xs) {
    out << '(';
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i].to_string();
    out << ')';
  };
  out << (kind == TupleKind::dependent ? "LD" : "LI");
  if (kind == TupleKind::independent) out << ";j=" << j << ";n=" << n->to_string() << ";m=" << m->to_string();
  out << ";lambda=(";
  for (std::size_t i = 0; i < signs.size(); ++i) out << (i ? "," : "") << signs[i];
  out << ')';
  if (kind == TupleKind::independent) {
    out << ";n*alpha=";
    list(alpha_num);
    out << ";n*beta=";
    list(beta_num);
  }
  return out.str();
}

namespace {

// Membership of v in V_q, consulting reduce_vector past the orbit radius when allowed.
bool member_of(const Vec2& v, const OrbitSet& s, bool reduce_outside) {
  switch (s.lookup(v)) {
    case Membership::member:
      return true;
    case Membership::not_member:
      return false;
    case Membership::outside_radius:
      break;
  }
  if (!reduce_outside) throw NotAMemberError(v.to_string() + " lies outside the orbit radius");
  const Reduction red = reduce_vector(v, std::nullopt, false);
  if (!red.conclusive()) throw ConsistencyError("reduction of " + v.to_string() + " is inconclusive");
  return red.in_orbit();
}

Mat2 witness_of(const Vec2& v, const OrbitSet& s, bool reduce_outside) {
  if (s.lookup(v) == Membership::outside_radius && reduce_outside) {
    const Reduction red = reduce_vector(v);
    if (!red.conclusive() || !red.in_orbit()) throw NotAMemberError(v.to_string() + " is not in V_q");
    return red.witness->inverse_unimodular();
  }
  return complete_to_matrix(v, s);
}

struct Classified {
  TupleClass cls;
  std::uint64_t checks_passed = 0;
  std::uint64_t checks_failed = 0;
};

// canonical(j) returns the normal form of (v_1, v_j). Entry membership is
// skipped when the caller already knows every entry is in s.
template <typename Canonical>
Classified classify_impl(std::span<const Vec2> vs, const OrbitSet& s, bool reduce_outside, bool throw_on_failure,
                         bool check_entries, Canonical&& canonical, bool check_criterion = true) {
  if (vs.empty()) throw DomainError("empty tuple");
  if (check_entries) {
    for (const Vec2& v : vs) {
      if (!member_of(v, s, reduce_outside)) throw NotAMemberError(v.to_string() + " is not in V_q");
    }
  }
  Classified out;
  TupleClass& c = out.cls;
  const Vec2& v1 = vs[0];
  std::size_t j = 0;
  for (std::size_t i = 1; i < vs.size(); ++i) {
    if (!det(v1, vs[i]).is_zero()) {
      j = i;
      break;
    }
  }
  const std::size_t sign_len = j == 0 ? vs.size() : j;
  for (std::size_t i = 0; i < sign_len; ++i) {
    if (vs[i] == v1) c.signs.push_back(1);
    else if (vs[i] == -v1) c.signs.push_back(-1);
    else throw ConsistencyError("colinear orbit vectors " + v1.to_string() + " and " + vs[i].to_string() + " differ by more than a sign");
  }
  if (j == 0) {
    c.kind = TupleKind::dependent;
    return out;
  }

  c.kind = TupleKind::independent;
  c.j = j + 1;
  const Vec2& vj = vs[j];
  const CanonicalPair& cp = canonical(j);
  const RingElement& n = cp.n;
  c.alpha_num.push_back(RingElement(s.context()));
  c.beta_num.push_back(n);
  for (std::size_t i = j + 1; i < vs.size(); ++i) {
    // v_i = (A v_1 + B v_j) / n
    RingElement a = det(vs[i], vj);
    RingElement b = det(v1, vs[i]);
    if (!check_criterion) {
      c.alpha_num.push_back(std::move(a));
      c.beta_num.push_back(std::move(b));
      continue;
    }
    const Vec2 u = cp.witness * vs[i];
    const bool ok = u.x * n == a + cp.m * b && u.y == b && member_of(u, s, true);
    if (ok) {
      ++out.checks_passed;
    } else {
      ++out.checks_failed;
      if (throw_on_failure) {
        throw ConsistencyError("J_{n,m}(alpha, beta) for entry " + std::to_string(i + 1) + " is not in V_q");
      }
    }
    c.alpha_num.push_back(std::move(a));
    c.beta_num.push_back(std::move(b));
  }
  c.n = cp.n;
  c.m = cp.m;
  c.witness = cp.witness;
  return out;
}

void merge_into(TupleCensus& dst, const TupleCensus& src) {
  for (const auto& [k, v] : src.classes) dst.classes[k] += v;
  dst.tuples += src.tuples;
  dst.dependent += src.dependent;
  dst.independent += src.independent;
  dst.criterion_pass += src.criterion_pass;
  dst.criterion_fail += src.criterion_fail;
  dst.round_trip_pass += src.round_trip_pass;
  dst.round_trip_fail += src.round_trip_fail;
}

}  // namespace

TupleClass classify_tuple(std::span<const Vec2> vs, const OrbitSet& s, const ClassifyOptions& options) {
  std::optional<CanonicalPair> cp;
  auto canonical = [&](std::size_t j) -> const CanonicalPair& {
    cp = canonicalize_with_witness(witness_of(vs[0], s, options.reduce_outside_radius), vs[j]);
    return *cp;
  };
  return classify_impl(vs, s, options.reduce_outside_radius, true, true, canonical).cls;
}

TupleCensus tuple_census(const OrbitSet& s, const Rational& radius, std::size_t k, const TupleCensusOptions& options) {
  if (k < 1 || k > 4) throw DomainError("tuple census supports k in 1..4");
  require_radius(s, radius, "tuple_census");
  if (k >= 2 && !s.has_witnesses()) throw DomainError("tuple census needs an orbit set with witnesses");
  const SquaredRadius ball(radius);
  const double r2 = ball.value_approx();
  const double slack = prune_slack(r2);
  const auto pts = points_by_norm(s);
  const unsigned workers = effective_workers(options.workers);
  std::vector<TupleCensus> locals(workers);
  std::atomic<std::uint64_t> visited{0};
  std::atomic<bool> over{false};

  run_sharded(workers, [&](unsigned w) {
    TupleCensus& loc = locals[w];
    std::vector<Vec2> tuple, moved;
    tuple.reserve(k);
    moved.reserve(k);
    std::vector<std::size_t> idx(k);
    // Normal forms of (pts[a], pts[b]) recur across all longer tuples sharing them.
    std::unordered_map<std::uint64_t, CanonicalPair> pair_cache;
    auto canonical = [&](std::size_t j) -> const CanonicalPair& {
      const std::uint64_t key = static_cast<std::uint64_t>(idx[0]) * pts.size() + idx[j];
      auto it = pair_cache.find(key);
      if (it == pair_cache.end()) {
        const OrbitPoint& p = pts[idx[0]];
        it = pair_cache.emplace(key, canonicalize_with_witness(Mat2::from_columns(p.v, p.companion), pts[idx[j]].v)).first;
      }
      return it->second;
    };
    auto leaf = [&](const RingElement& total) {
      if (!ball.admits(total)) return;
      if (visited.fetch_add(1, std::memory_order_relaxed) >= options.budget) {
        over.store(true, std::memory_order_relaxed);
        return;
      }
      tuple.clear();
      for (std::size_t t = 0; t < k; ++t) tuple.push_back(pts[idx[t]].v);
      Classified c = classify_impl(tuple, s, true, false, false, canonical);
      ++loc.tuples;
      ++(c.cls.kind == TupleKind::dependent ? loc.dependent : loc.independent);
      loc.criterion_pass += c.checks_passed;
      loc.criterion_fail += c.checks_failed;
      std::string key = c.cls.key();
      if (options.verify_round_trip) {
        const OrbitPoint& p = pts[idx[0]];
        const Mat2 h = c.cls.witness ? *c.cls.witness : Mat2::from_columns(p.v, p.companion).inverse_unimodular();
        moved.clear();
        for (const Vec2& v : tuple) moved.push_back(h * v);
        std::optional<CanonicalPair> cp;
        auto direct = [&](std::size_t j) -> const CanonicalPair& {
          cp = canonicalize_with_witness(Mat2::identity(s.context()), moved[j]);
          return *cp;
        };
        // The moved entries are h v_i, whose membership the criterion check above already settled.
        const bool same = moved[0] == Vec2::of(s.context(), 1, 0) &&
                          classify_impl(moved, s, true, false, false, direct, false).cls.key() == key;
        ++(same ? loc.round_trip_pass : loc.round_trip_fail);
      }
      ++loc.classes[std::move(key)];
    };
    auto descend = [&](auto&& self, std::size_t depth, double used, const RingElement& total) -> void {
      if (over.load(std::memory_order_relaxed)) return;
      if (depth == k) {
        leaf(total);
        return;
      }
      const double rem = r2 - used + slack;
      const std::size_t start = depth == 0 ? w : 0;
      const std::size_t stride = depth == 0 ? workers : 1;
      for (std::size_t i = start; i < pts.size(); i += stride) {
        if (pts[i].norm_approx > rem) break;
        idx[depth] = i;
        self(self, depth + 1, used + pts[i].norm_approx, total + pts[i].norm);
      }
    };
    descend(descend, 0, 0.0, RingElement(s.context()));
  });

  TupleCensus out;
  out.k = k;
  out.radius = radius;
  for (const auto& loc : locals) merge_into(out, loc);
  if (over.load()) {
    throw TupleBudgetExceeded("tuple census exceeded its budget of " + std::to_string(options.budget) + " tuples after " +
                                  std::to_string(out.tuples) + " classified",
                              std::move(out));
  }
  return out;
}

}  // namespace hecke
