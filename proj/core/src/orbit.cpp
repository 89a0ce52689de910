#include "hecke/orbit.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "hecke/errors.hpp"

namespace hecke {

namespace {

struct Vec2Hash {
  std::size_t operator()(const Vec2& v) const noexcept { return v.hash(); }
};

Vec2 quadrant_rep(const Vec2& v, bool& flip_x, bool& flip_y) {
  flip_x = sign(v.x) < 0;
  flip_y = sign(v.y) < 0;
  return {flip_x ? -v.x : v.x, flip_y ? -v.y : v.y};
}

// Witness (v | w) of a representative carried to the image with the given flips.
// Conjugation by diag(1, -1) maps S to S^-1 and T to T^-1, so mirrored
// witnesses stay in H_q.
Vec2 image_companion(const Vec2& w, bool flip_x, bool flip_y) {
  if (!flip_x && !flip_y) return w;
  if (flip_x && flip_y) return -w;
  if (flip_y) return {-w.x, w.y};
  return {w.x, -w.y};
}

Vec2 image(const Vec2& v, bool flip_x, bool flip_y) {
  return {flip_x ? -v.x : v.x, flip_y ? -v.y : v.y};
}

}  // namespace

OrbitSet::OrbitSet(int q, Rational radius, std::vector<Vec2> representatives, std::vector<Vec2> companions)
    : ctx_(&RingContext::get(q)), radius_(std::move(radius)), bound_(radius_) {
  if (!companions.empty() && companions.size() != representatives.size()) {
    throw DomainError("witness list does not match representative list");
  }
  std::vector<std::size_t> order(representatives.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return Vec2Less{}(representatives[i], representatives[j]); });
  reps_.reserve(order.size());
  for (auto i : order) reps_.push_back(std::move(representatives[i]));
  if (!companions.empty()) {
    companions_.reserve(order.size());
    for (auto i : order) companions_.push_back(std::move(companions[i]));
  }

  std::size_t cap = 16;
  while (cap < 2 * reps_.size() + 1) cap <<= 1;
  slots_.assign(cap, 0);
  const std::size_t mask = cap - 1;
  for (std::size_t i = 0; i < reps_.size(); ++i) {
    std::size_t h = reps_[i].hash() & mask;
    while (slots_[h] != 0) {
      if (reps_[slots_[h] - 1] == reps_[i]) throw ConsistencyError("duplicate orbit element " + reps_[i].to_string());
      h = (h + 1) & mask;
    }
    slots_[h] = static_cast<std::uint32_t>(i + 1);
  }
}

std::size_t OrbitSet::size() const noexcept {
  std::size_t n = 0;
  for (const auto& r : reps_) {
    const bool zx = r.x.is_zero(), zy = r.y.is_zero();
    n += (zx || zy) ? 2 : 4;
  }
  return n;
}

std::optional<std::size_t> OrbitSet::find_representative(const Vec2& rep) const {
  if (&rep.context() != ctx_) return std::nullopt;
  const std::size_t mask = slots_.size() - 1;
  std::size_t h = rep.hash() & mask;
  while (slots_[h] != 0) {
    const std::size_t idx = slots_[h] - 1;
    if (reps_[idx] == rep) return idx;
    h = (h + 1) & mask;
  }
  return std::nullopt;
}

std::span<const Vec2> OrbitSet::with_second_coordinate(const RingElement& y) const {
  ExactLess less;
  auto lo = std::partition_point(reps_.begin(), reps_.end(), [&](const Vec2& r) { return less(r.y, y); });
  auto hi = std::partition_point(lo, reps_.end(), [&](const Vec2& r) { return !less(y, r.y); });
  return {reps_.data() + (lo - reps_.begin()), static_cast<std::size_t>(hi - lo)};
}

Membership OrbitSet::lookup(const Vec2& v) const {
  if (v.q() != q()) throw DomainError("vector of q=" + std::to_string(v.q()) + " looked up in orbit of q=" + std::to_string(q()));
  if (!covers(norm_sq(v))) return Membership::outside_radius;
  bool fx, fy;
  return find_representative(quadrant_rep(v, fx, fy)) ? Membership::member : Membership::not_member;
}

std::optional<Mat2> OrbitSet::witness(const Vec2& v) const {
  if (!has_witnesses() || v.q() != q()) return std::nullopt;
  bool fx, fy;
  const Vec2 rep = quadrant_rep(v, fx, fy);
  const auto idx = find_representative(rep);
  if (!idx) return std::nullopt;
  return Mat2::from_columns(v, image_companion(companions_[*idx], fx, fy));
}

std::vector<OrbitPoint> OrbitSet::expand() const {
  std::vector<OrbitPoint> out;
  out.reserve(size());
  const Vec2 zero{RingElement(*ctx_), RingElement(*ctx_)};
  for (std::size_t i = 0; i < reps_.size(); ++i) {
    const Vec2& r = reps_[i];
    const RingElement n = norm_sq(r);
    const double na = approx(n);
    const bool zx = r.x.is_zero(), zy = r.y.is_zero();
    for (int k = 0; k < 4; ++k) {
      const bool fx = (k & 1) != 0, fy = (k & 2) != 0;
      if ((fx && zx) || (fy && zy)) continue;
      out.push_back({image(r, fx, fy), has_witnesses() ? image_companion(companions_[i], fx, fy) : zero, n, na});
    }
  }
  return out;
}

void OrbitSet::save(std::ostream& out) const {
  out << "q=" << q() << " R=" << rational_to_string(radius_) << "\n";
  for (const auto& p : expand()) {
    out << p.v.x.to_string() << ' ' << p.v.y.to_string();
    if (has_witnesses()) out << ' ' << p.companion.x.to_string() << ' ' << p.companion.y.to_string();
    out << '\n';
  }
}

OrbitSet OrbitSet::load(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DomainError("orbit file is empty");
  int q = 0;
  std::string radius_text;
  {
    std::istringstream hs(header);
    std::string qtok, rtok;
    hs >> qtok >> rtok;
    if (qtok.rfind("q=", 0) != 0 || rtok.rfind("R=", 0) != 0) throw DomainError("bad orbit header '" + header + "'");
    try {
      q = std::stoi(qtok.substr(2));
    } catch (const std::exception&) {
      throw DomainError("bad q in orbit header '" + header + "'");
    }
    radius_text = rtok.substr(2);
  }
  const RingContext& ctx = RingContext::get(q);
  const Rational radius = parse_rational(radius_text);
  const SquaredRadius bound(radius);

  std::vector<Vec2> reps, comps;
  std::vector<Vec2> all;
  std::optional<bool> with_witness;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.size() != 2 && tok.size() != 4) throw DomainError("orbit line " + std::to_string(line_no) + ": expected 2 or 4 fields");
    const bool w = tok.size() == 4;
    if (with_witness && *with_witness != w) throw DomainError("orbit line " + std::to_string(line_no) + ": inconsistent witness columns");
    with_witness = w;
    Vec2 v{RingElement::parse(ctx, tok[0]), RingElement::parse(ctx, tok[1])};
    if (!bound.admits(norm_sq(v))) throw DomainError("orbit line " + std::to_string(line_no) + ": vector outside radius");
    if (w) {
      const Vec2 c{RingElement::parse(ctx, tok[2]), RingElement::parse(ctx, tok[3])};
      if (det(v, c) != RingElement(ctx, Integer(1))) {
        throw DomainError("orbit line " + std::to_string(line_no) + ": witness determinant is not 1");
      }
      if (sign(v.x) >= 0 && sign(v.y) >= 0) comps.push_back(c);
    }
    if (sign(v.x) >= 0 && sign(v.y) >= 0) reps.push_back(v);
    all.push_back(std::move(v));
  }
  OrbitSet s(q, radius, std::move(reps), std::move(comps));
  if (s.size() != all.size()) throw DomainError("orbit file is not closed under the 4-fold symmetry");
  for (const auto& v : all) {
    if (!s.contains(v)) throw DomainError("orbit file is not closed under the 4-fold symmetry");
  }
  return s;
}

// ---------------------------------------------------------------------------

std::vector<Vec2> farey_fan(const Vec2& u, const Vec2& v) {
  const RingContext& ctx = u.context();
  const RingElement lam = RingElement::lambda(ctx);
  std::vector<Vec2> out;
  const int q = ctx.q();
  out.reserve(static_cast<std::size_t>(q - 2));
  Vec2 prev2 = -v;  // a_0
  Vec2 prev1 = u;   // a_1
  for (int i = 2; i <= q - 1; ++i) {
    Vec2 next = lam * prev1 - prev2;
    prev2 = std::move(prev1);
    prev1 = next;
    out.push_back(std::move(next));
  }
  return out;
}

OrbitSet generate_orbit(int q, const Rational& radius, const GenerateOptions& options) {
  if (radius < 1) throw EmptyInteriorError("orbit radius must be >= 1, got " + rational_to_string(radius));
  const RingContext& ctx = RingContext::get(q);
  const SquaredRadius bound(radius);

  std::vector<Vec2> reps;
  std::vector<Vec2> comps;
  const Vec2 e1 = Vec2::of(ctx, 1, 0);
  const Vec2 e2 = Vec2::of(ctx, 0, 1);
  reps.push_back(e1);
  reps.push_back(e2);
  if (options.witnesses) {
    comps.push_back(e2);
    comps.push_back(Vec2::of(ctx, -1, 0));
  }

  // Every fan vector is a combination of its parents with coefficients >= 1,
  // so once a whole fan leaves the disk no descendant can re-enter it.
  std::vector<std::pair<Vec2, Vec2>> stack;
  stack.emplace_back(e1, e2);
  while (!stack.empty()) {
    auto [u, v] = std::move(stack.back());
    stack.pop_back();
    std::vector<Vec2> fan = farey_fan(u, v);
    bool any_inside = false;
    for (std::size_t i = 0; i < fan.size(); ++i) {
      if (!bound.admits(norm_sq(fan[i]))) continue;
      any_inside = true;
      reps.push_back(fan[i]);
      if (options.witnesses) comps.push_back(i + 1 < fan.size() ? fan[i + 1] : v);
    }
    if (!any_inside) continue;
    // Sub-pairs (a_1, a_2), ..., (a_{q-1}, a_q = v).
    stack.emplace_back(fan.back(), v);
    for (std::size_t i = fan.size() - 1; i-- > 0;) stack.emplace_back(fan[i], fan[i + 1]);
    stack.emplace_back(u, fan.front());
  }
  return OrbitSet(q, radius, std::move(reps), std::move(comps));
}

bool is_member(const Vec2& v, const OrbitSet& s) { return s.lookup(v) == Membership::member; }

// ---------------------------------------------------------------------------

bool Reduction::in_orbit() const {
  return conclusive() && t && *t == RingElement(t->context(), Integer(1));
}

Reduction reduce_vector(const Vec2& v, std::optional<std::size_t> step_budget, bool track_witness) {
  if (v.is_zero()) throw DomainError("reduce_vector of the zero vector");
  const RingContext& ctx = v.context();
  const std::size_t budget = step_budget.value_or(64 * (std::max(v.x.max_bit_length(), v.y.max_bit_length()) + 1));
  const RingElement lam = RingElement::lambda(ctx);
  const Mat2 s = generator_s(ctx);

  Reduction r;
  Mat2 h = Mat2::identity(ctx);
  RingElement x = v.x, y = v.y;
  while (!y.is_zero()) {
    if (r.steps >= budget) return r;
    ++r.steps;
    const RingElement ly = lam * y;
    const Integer j = round_quotient(x, ly);
    if (!j.is_zero()) {
      x = x - ly * j;
      if (track_witness) h = generator_t_power(ctx, -j) * h;
    }
    // S (x, y) = (-y, x)
    RingElement nx = -y;
    y = std::move(x);
    x = std::move(nx);
    if (track_witness) h = s * h;
  }
  if (sign(x) < 0) {
    x = -x;
    h = -h;
  }
  r.status = ReductionStatus::success;
  r.t = x;
  if (track_witness) r.witness = h;
  return r;
}

}  // namespace hecke
