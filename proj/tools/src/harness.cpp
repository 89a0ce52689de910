#include "hecke/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hecke/errors.hpp"

namespace hecke::harness {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Cell radius_cell(const Rational& r) {
  if (r.get_den() == 1 && r.get_num().fits_slong_p()) return static_cast<std::int64_t>(r.get_num().get_si());
  return rational_to_string(r);
}

double rel_error(double empirical, double predicted) {
  return predicted > 0 ? std::abs(empirical - predicted) / predicted : std::numeric_limits<double>::quiet_NaN();
}

std::vector<PhiMode> selected_modes(PhiSelection sel) {
  switch (sel) {
    case PhiSelection::paper: return {PhiMode::paper};
    case PhiSelection::fundamental: return {PhiMode::fundamental};
    case PhiSelection::both: return {PhiMode::paper, PhiMode::fundamental};
  }
  return {};
}

Rational largest_radius(const ExperimentConfig& config) {
  if (config.radii.empty()) throw DomainError("this command needs --radius or --radius-sweep");
  return config.radii.back();
}

/// Orbit big enough for totient windows of every |n| <= bound in either mode.
OrbitSet totient_orbit(const ExperimentConfig& config, const Rational& bound) {
  return load_or_generate(config, radius_for_totient(RingContext::get(config.q), bound, PhiMode::fundamental));
}

Rational ceil_bound(const std::vector<RingElement>& ns) {
  double m = 1.0;
  for (const auto& n : ns) m = std::max(m, std::abs(approx(n)));
  return Rational(static_cast<long>(std::ceil(m)) + 1);
}

std::vector<RingElement> resolve_n(const ExperimentConfig& config) {
  const RingContext& ctx = RingContext::get(config.q);
  std::vector<RingElement> out;
  if (config.n_auto) {
    const OrbitSet s = totient_orbit(config, config.n_bound);
    for (auto& n : enumerate_Nq(s, config.n_bound, PhiMode::fundamental)) {
      if (sign(n) > 0) out.push_back(std::move(n));
    }
    return out;
  }
  for (const auto& text : config.n_list) {
    RingElement n = RingElement::parse(ctx, text);
    if (n.is_zero()) throw DomainError("n = 0 has no pairs");
    out.push_back(std::move(n));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const ExperimentConfig& config) {
  if (config.q < 3) throw DomainError("q must be at least 3");
  for (std::size_t i = 0; i < config.radii.size(); ++i) {
    if (sgn(config.radii[i]) <= 0) throw DomainError("radii must be positive");
    if (i > 0 && config.radii[i] <= config.radii[i - 1]) throw DomainError("radius sweep must be strictly increasing");
  }
  if (config.k < 1 || config.k > 4) throw DomainError("k must be in 1..4");
  if (config.workers < 1) throw DomainError("workers must be at least 1");
  if (config.budget < 1) throw DomainError("budget must be positive");
  if (config.n_auto && sgn(config.n_bound) <= 0) throw DomainError("n bound must be positive");
}

std::vector<Rational> parse_radius_list(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& item : split_list(text)) out.push_back(parse_rational(item));
  if (out.empty()) throw DomainError("empty radius list");
  return out;
}

// ---------------------------------------------------------------------------

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ConsistencyError("table row width does not match its header");
  rows.push_back(std::move(row));
}

std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      if (std::isnan(v)) return {};
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", v);
      return buf;
    }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, c);
}

void write_csv(std::ostream& out, const Table& t) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << field(t.columns[i]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << field(format_cell(row[i]));
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& t) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["partial"] = t.partial;
  doc["columns"] = t.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : t.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      ordered_json v;
      std::visit(
          [&](const auto& x) {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, std::monostate>) {
              v = nullptr;
            } else if constexpr (std::is_same_v<X, double>) {
              v = std::isnan(x) ? ordered_json(nullptr) : ordered_json(std::stod(format_cell(x)));
            } else {
              v = x;
            }
          },
          row[i]);
      obj[t.columns[i]] = std::move(v);
    }
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

void write_table(std::ostream& out, const Table& t, Format format) {
  if (format == Format::csv) {
    write_csv(out, t);
  } else {
    write_json(out, t);
  }
}

// ---------------------------------------------------------------------------

std::filesystem::path orbit_cache_path(const std::filesystem::path& dir, int q, const Rational& radius) {
  std::string r = rational_to_string(radius);
  std::replace(r.begin(), r.end(), '/', '_');
  return dir / ("q" + std::to_string(q) + "_R" + r + ".orbit");
}

OrbitSet load_or_generate(const ExperimentConfig& config, const Rational& radius) {
  if (config.cache_dir.empty()) return generate_orbit(config.q, radius);
  const auto path = orbit_cache_path(config.cache_dir, config.q, radius);
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read orbit cache " + path.string());
    try {
      OrbitSet s = OrbitSet::load(in);
      if (s.q() == config.q && s.radius() == radius && s.has_witnesses()) return s;
    } catch (const DomainError&) {
      // A damaged cache entry is rebuilt below.
    }
  }
  OrbitSet s = generate_orbit(config.q, radius);
  std::filesystem::create_directories(config.cache_dir, ec);
  if (ec) throw IoError("cannot create cache directory " + config.cache_dir + ": " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write orbit cache " + tmp.string());
    s.save(out);
    if (!out.flush()) throw IoError("cannot write orbit cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  return s;
}

// ---------------------------------------------------------------------------

Table cmd_gen(const ExperimentConfig& config) {
  validate(config);
  const Rational rmax = largest_radius(config);
  const OrbitSet s = load_or_generate(config, rmax);
  const auto sv = sv_constant(config.q);
  const double inv_c = 1.0 / sv.value;
  const double lam_c = s.context().lambda_approx() / sv.value;

  std::vector<RingElement> norms;
  for (const auto& p : s.expand()) norms.push_back(p.norm);

  Table t;
  t.columns = {"q", "R", "count", "empirical_density", "predicted_density", "rel_error", "lambda_over_c", "rel_error_lambda"};
  for (const auto& r : config.radii) {
    const SquaredRadius ball(r);
    const auto count = static_cast<std::uint64_t>(
        std::count_if(norms.begin(), norms.end(), [&](const RingElement& n) { return ball.admits(n); }));
    const double rr = r.get_d();
    const double density = static_cast<double>(count) / (std::numbers::pi * rr * rr);
    t.add({std::int64_t{config.q}, radius_cell(r), count, density, inv_c, rel_error(density, inv_c), lam_c,
           rel_error(density, lam_c)});
  }
  return t;
}

Table cmd_pairs(const ExperimentConfig& config) {
  validate(config);
  const auto ns = resolve_n(config);
  const auto modes = selected_modes(config.phi);
  const OrbitSet s = load_or_generate(config, largest_radius(config));
  const OrbitSet s_phi = totient_orbit(config, ceil_bound(ns));

  Table t;
  t.columns = {"q", "R", "n", "m", "count", "empirical_density"};
  for (PhiMode mode : modes) {
    const std::string suffix = modes.size() > 1 ? std::string("_") + std::string(to_string(mode)) : "";
    t.columns.push_back("predicted_density" + suffix);
    t.columns.push_back("rel_error" + suffix);
  }

  for (const auto& n : ns) {
    const auto d = count_pairs_with_determinant(s, config.radii, n, config.workers);
    std::vector<double> predicted;
    for (PhiMode mode : modes) predicted.push_back(predicted_pair_density(n, s_phi, mode).value);
    const double per_orbit = predicted_orbit_density(n);
    for (std::size_t r = 0; r < config.radii.size(); ++r) {
      const double rr = config.radii[r].get_d();
      auto row = [&](Cell m, std::uint64_t count, const std::vector<double>& pred) {
        const double density = static_cast<double>(count) / (rr * rr);
        std::vector<Cell> cells{std::int64_t{config.q}, radius_cell(config.radii[r]), n.to_string(), std::move(m), count, density};
        for (double p : pred) {
          cells.emplace_back(p);
          cells.emplace_back(rel_error(density, p));
        }
        t.add(std::move(cells));
      };
      row(std::monostate{}, d.totals[r], predicted);
      if (config.refine_m) {
        for (std::size_t i = 0; i < d.residues.size(); ++i) {
          row(d.residues[i].to_string(), d.by_residue[r][i], std::vector<double>(modes.size(), per_orbit));
        }
      }
    }
  }
  return t;
}

Table cmd_slopes(const ExperimentConfig& config) {
  validate(config);
  const auto ns = resolve_n(config);
  const Rational rmax = largest_radius(config);
  const OrbitSet s = load_or_generate(config, rmax);

  // a/b in [0, 1] iff a and b do not have opposite signs and |a| <= |b|.
  auto unit_slope = [](const Vec2& v) { return !v.y.is_zero() && sign(v.x) * sign(v.y) >= 0 && compare(abs(v.x), abs(v.y)) <= 0; };

  Table t;
  t.columns = {"q", "R", "n", "a", "b", "c", "d", "a_over_b", "c_over_d"};
  for (const auto& n : ns) {
    for (const auto& [v1, v2] : pairs_with_determinant(s, rmax, n, config.workers)) {
      if (!unit_slope(v1) || !unit_slope(v2)) continue;
      t.add({std::int64_t{config.q}, radius_cell(rmax), n.to_string(), v1.x.to_string(), v1.y.to_string(), v2.x.to_string(),
             v2.y.to_string(), approx(v1.x) / approx(v1.y), approx(v2.x) / approx(v2.y)});
    }
  }
  return t;
}

Table cmd_tuples(const ExperimentConfig& config) {
  validate(config);
  const Rational rmax = largest_radius(config);
  const OrbitSet s = load_or_generate(config, rmax);
  TupleCensusOptions opts;
  opts.budget = config.budget;
  opts.workers = config.workers;
  opts.verify_round_trip = true;

  Table t;
  t.columns = {"q", "R", "k", "class", "count"};
  TupleCensus census;
  try {
    census = tuple_census(s, rmax, config.k, opts);
  } catch (const TupleBudgetExceeded& e) {
    census = e.partial();
    t.partial = true;
  }
  const auto k = static_cast<std::int64_t>(config.k);
  for (const auto& [key, count] : census.classes) t.add({std::int64_t{config.q}, radius_cell(rmax), k, key, count});
  auto summary = [&](const std::string& name, std::uint64_t v) {
    t.add({std::int64_t{config.q}, radius_cell(rmax), k, "summary:" + name, v});
  };
  summary("tuples", census.tuples);
  summary("dependent", census.dependent);
  summary("independent", census.independent);
  summary("criterion_pass", census.criterion_pass);
  summary("criterion_fail", census.criterion_fail);
  summary("round_trip_pass", census.round_trip_pass);
  summary("round_trip_fail", census.round_trip_fail);
  summary("partial", t.partial ? 1 : 0);
  return t;
}

Table cmd_phi(const ExperimentConfig& config) {
  validate(config);
  const auto ns = resolve_n(config);
  const OrbitSet s = totient_orbit(config, ceil_bound(ns));
  Table t;
  t.columns = {"q", "n", "mode", "phi", "in_Nq", "residues"};
  for (const auto& n : ns) {
    for (PhiMode mode : selected_modes(config.phi)) {
      const auto res = totient_residues(n, s, mode);
      std::string joined;
      for (std::size_t i = 0; i < res.size(); ++i) joined += (i ? ";" : "") + res[i].to_string();
      t.add({std::int64_t{config.q}, n.to_string(), std::string(to_string(mode)), std::uint64_t{res.size()},
             std::int64_t{res.empty() ? 0 : 1}, joined});
    }
  }
  return t;
}

Table cmd_nq(const ExperimentConfig& config) {
  validate(config);
  const OrbitSet s = totient_orbit(config, config.n_bound);
  Table t;
  t.columns = {"q", "mode", "n", "n_approx", "phi"};
  for (PhiMode mode : selected_modes(config.phi)) {
    for (const auto& n : enumerate_Nq(s, config.n_bound, mode)) {
      t.add({std::int64_t{config.q}, std::string(to_string(mode)), n.to_string(), approx(n),
             std::uint64_t{phi_q(n, s, mode)}});
    }
  }
  return t;
}

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hecke triangle group orbits, totients and pair-density experiments", "hecke"};
  app.set_config("--config", "", "flat key=value file mirroring the long flags; flags override it");
  app.require_subcommand(1, 1);

  int q = 3;
  std::string radius, sweep, n_text = "auto", n_bound = "5", phi = "paper", format = "csv", out_path;
  std::string cache_dir = "hecke-cache";
  std::size_t k = 2;
  unsigned workers = 1;
  std::uint64_t budget = 50'000'000;
  bool refine_m = false;

  app.add_option("--q", q, "Hecke group index (q >= 3)")->capture_default_str();
  auto* r_opt = app.add_option("--radius", radius, "single radius, integer or p/q");
  app.add_option("--radius-sweep", sweep, "comma separated, strictly increasing radii")->excludes(r_opt);
  app.add_option("--n", n_text, "comma separated determinants such as 1,L,1+L, or auto")->capture_default_str();
  app.add_option("--n-bound", n_bound, "bound on |n| for --n auto and the nq command")->capture_default_str();
  app.add_option("--k", k, "tuple length for the tuples command")->capture_default_str();
  app.add_option("--phi-mode", phi, "paper, fundamental or both")
      ->check(CLI::IsMember({"paper", "fundamental", "both"}))
      ->capture_default_str();
  app.add_flag("--refine-m", refine_m, "split pair counts by canonical m");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--out", out_path, "output file (default: standard output)");
  app.add_option("--cache-dir", cache_dir, "orbit cache directory, empty to disable")->capture_default_str();
  app.add_option("--workers", workers, "worker threads for counting")->capture_default_str();
  app.add_option("--budget", budget, "maximum number of tuples the census may visit")->capture_default_str();

  struct Command {
    const char* name;
    const char* help;
    Table (*run)(const ExperimentConfig&);
    long default_radius;  // 0: use the default sweep
  };
  const Command commands[] = {
      {"gen", "generate and cache V_q, report its density", cmd_gen, 0},
      {"pairs", "pair counts by determinant against the predicted density", cmd_pairs, 0},
      {"slopes", "slope pairs (a/b, c/d) of determinant-n pairs", cmd_slopes, 50},
      {"tuples", "k-tuple class census with verification counters", cmd_tuples, 10},
      {"phi", "q-totient and its residues", cmd_phi, 0},
      {"nq", "determinants in N_q up to --n-bound", cmd_nq, 0},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const Command* cmd = nullptr;
  for (const auto& c : commands) {
    if (app.got_subcommand(c.name)) cmd = &c;
  }

  try {
    ExperimentConfig config;
    config.q = q;
    if (!radius.empty()) {
      config.radii = {parse_rational(radius)};
    } else if (!sweep.empty()) {
      config.radii = parse_radius_list(sweep);
    } else if (cmd->default_radius > 0) {
      config.radii = {Rational(cmd->default_radius)};
    } else {
      for (long r : kDefaultSweep) config.radii.emplace_back(r);
    }
    config.k = k;
    if (trim(n_text) == "auto") {
      config.n_auto = true;
    } else {
      config.n_list = split_list(n_text);
      if (config.n_list.empty()) throw DomainError("--n needs at least one value");
    }
    config.n_bound = parse_rational(n_bound);
    config.phi = phi == "both" ? PhiSelection::both : phi == "fundamental" ? PhiSelection::fundamental : PhiSelection::paper;
    config.refine_m = refine_m;
    config.format = format == "json" ? Format::json : Format::csv;
    config.out = out_path;
    config.cache_dir = cache_dir;
    config.workers = workers;
    config.budget = budget;
    validate(config);
    (void)RingContext::get(config.q);

    const Table table = cmd->run(config);
    if (config.out.empty()) {
      write_table(out, table, config.format);
    } else {
      std::ofstream file(config.out);
      if (!file) throw IoError("cannot open output file " + config.out);
      write_table(file, table, config.format);
      if (!file.flush()) throw IoError("cannot write output file " + config.out);
    }
    if (table.partial) {
      err << "hecke: budget exhausted, output is partial\n";
      return 3;
    }
    return 0;
  } catch (const DomainError& e) {
    err << "hecke: " << e.what() << '\n';
    return 2;
  } catch (const NotAMemberError& e) {
    err << "hecke: " << e.what() << '\n';
    return 2;
  } catch (const DegeneratePairError& e) {
    err << "hecke: " << e.what() << '\n';
    return 2;
  } catch (const BudgetExceededError& e) {
    err << "hecke: " << e.what() << '\n';
    return 3;
  } catch (const InsufficientRadiusError& e) {
    err << "hecke: " << e.what() << '\n';
    return 3;
  } catch (const EmptyInteriorError& e) {
    err << "hecke: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "hecke: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hecke::harness
