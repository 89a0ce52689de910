#pragma once

// Experiment driver behind the `hecke` command line tool. Every command
// returns a Table; the CLI layer only parses flags, runs one command and
// writes the table as CSV or JSON.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hecke/moments.hpp"

namespace hecke::harness {

enum class Format { csv, json };
enum class PhiSelection { paper, fundamental, both };

struct ExperimentConfig {
  int q = 3;
  /// One radius, or a strictly increasing sweep.
  std::vector<Rational> radii;
  std::size_t k = 2;
  /// Serialized determinants; empty with n_auto set means "every n in N_q up to n_bound".
  std::vector<std::string> n_list;
  bool n_auto = false;
  Rational n_bound{5};
  PhiSelection phi = PhiSelection::paper;
  bool refine_m = false;
  Format format = Format::csv;
  /// Output file; empty writes to the caller's stream.
  std::string out;
  /// Orbit cache directory; empty disables caching.
  std::string cache_dir;
  unsigned workers = 1;
  std::uint64_t budget = 50'000'000;
};

inline const std::vector<long> kDefaultSweep{25, 50, 100, 200, 400};

/// Throws DomainError on the first violated invariant.
void validate(const ExperimentConfig& config);

/// "25,50,100" or "5/2" style lists.
std::vector<Rational> parse_radius_list(const std::string& text);

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Set when a budget cut the computation short; the rows are then partial.
  bool partial = false;

  void add(std::vector<Cell> row);
};

/// Doubles with 6 significant digits, empty cells for NaN and monostate.
std::string format_cell(const Cell& c);
void write_csv(std::ostream& out, const Table& t);
void write_json(std::ostream& out, const Table& t);
void write_table(std::ostream& out, const Table& t, Format format);

// ---------------------------------------------------------------------------
// Orbit cache

std::filesystem::path orbit_cache_path(const std::filesystem::path& dir, int q, const Rational& radius);

/// Loads q<q>_R<R>.orbit from the cache directory when present, otherwise
/// generates it (with witnesses) and stores it. Without a cache directory it
/// only generates.
OrbitSet load_or_generate(const ExperimentConfig& config, const Rational& radius);

// ---------------------------------------------------------------------------
// Commands

/// Orbit counts at every sweep radius from one orbit of the largest radius,
/// against 1/c(q) and lambda/c(q).
Table cmd_gen(const ExperimentConfig& config);

/// Count_q(R, n) / R^2 against the predicted pair density, per n (and per
/// canonical m with refine_m) across the sweep.
Table cmd_pairs(const ExperimentConfig& config);

/// (a/b, c/d) for determinant-n pairs ((a, b), (c, d)) with both slopes in [0, 1].
Table cmd_slopes(const ExperimentConfig& config);

/// Class-key histogram of the k-tuple census at the largest radius, followed
/// by summary rows with the verification counters.
Table cmd_tuples(const ExperimentConfig& config);

/// phi_q(n) and its residues for every requested n.
Table cmd_phi(const ExperimentConfig& config);

/// N_q up to n_bound with phi_q in the selected windows.
Table cmd_nq(const ExperimentConfig& config);

/// Full command line entry point. Returns the process exit code:
/// 0 success, 1 I/O or unexpected failure, 2 invalid input, 3 budget or radius.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hecke::harness
