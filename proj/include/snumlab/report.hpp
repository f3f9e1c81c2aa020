#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "snumlab/core_params.hpp"

namespace snumlab {

struct DyadicRange {
  int from = 0;  // log2 of the first value
  int to = 0;    // log2 of the last value, inclusive
};

/// Parsed sweep configuration. Every exponent is kept as its source text
/// (parsed exactly when the grid is expanded) so reports echo the input.
struct SweepConfig {
  std::vector<std::vector<int>> gammas;

  struct EmbeddingGrid {
    std::vector<std::string> s1{"0"}, s2{"0"}, p1{"2"}, p2{"2"}, q1{"2"}, q2{"2"};
  } grid;

  struct DiagGrid {
    std::vector<std::string> alpha, beta{"0"}, p1, p2;
  } diag;

  DyadicRange k_grid{6, 14};

  struct Lattice {
    std::int64_t box_radius = 256;
    DyadicRange threshold_log2{2, 12};
    bool write_table = false;
  } lattice;

  struct Equiv {
    std::vector<std::int64_t> box_radius{256};
    int samples = 100;
    int max_level = 2;
    int max_entries = 8;
  } equiv;

  struct Nuclear {
    std::uint64_t terms = 4096;
  } nuclear;

  double tol_alpha = 0.1;
  double tol_beta = 0.3;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Reads a YAML sweep file. Errors carry "path:line:column: field: message".
SweepConfig load_config(const std::filesystem::path& path);
SweepConfig parse_config(const std::string& text, const std::string& origin = "<config>");

enum class OutputFormat { csv, json, all };
OutputFormat parse_format(const std::string& text);

struct RunSummary {
  std::size_t points = 0;
  std::size_t failures = 0;  // grid points that raised an error
  std::vector<std::string> files;
  /// 0 success, 3 every point failed a precondition, 4 some points failed.
  int exit_code = 0;
};

/// Runs one of rates, diag, lattice, nuclear, equiv and writes its reports
/// into out_dir. Output depends only on (command, config, seed).
RunSummary run_command(const std::string& command, const SweepConfig& config,
                       const std::filesystem::path& out_dir, std::uint64_t seed, OutputFormat format);

}  // namespace snumlab
