#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ktlab/danner.hpp"

namespace ktlab {

struct ExperimentConfig {
  std::vector<GraphSpec> graphs;  // each cell overrides the spec's seed with the cell seed
  std::vector<double> deltas;
  int rho = 2;
  std::vector<std::uint64_t> seeds;
  std::uint64_t round_cap = 10'000'000;
  bool audit = false;
  double c_sync = 1.0;
  int c_findany = 3;
  /// Upper bound on worker threads; 0 means hardware concurrency.
  unsigned threads = 0;

  /// Throws ParameterError for out-of-range values.
  void validate() const;
};

/// Checks a finished danner against its structural contract.
struct StructureReport {
  bool components_ok = true;       // H components equal G components
  int max_c2_diameter = 0;
  std::size_t lowdeg_violations = 0;  // outside neighbors of a low-degree cluster without an H-edge into it
  std::size_t intra_merge_edges = 0;
  std::size_t partition_violations = 0;  // nodes not in exactly one of C2 / low-degree / inactive
  bool ok() const {
    return components_ok && max_c2_diameter <= 6 && lowdeg_violations == 0 && intra_merge_edges == 0 &&
           partition_violations == 0;
  }
};

StructureReport check_structure(const Graph& g, const DannerState& st);

/// Largest finite eccentricity over all components (0 for edgeless graphs).
int component_diameter(const Graph& g);

struct RunRecord {
  // config echo
  std::string family;
  std::size_t n_requested = 0;
  double p = 0;
  double delta = 0;
  int rho = 2;
  std::uint64_t seed = 0;
  // graph
  std::size_t n = 0;
  std::size_t m = 0;
  int diameter = 0;
  // costs
  std::uint64_t phase1_rounds = 0, phase1_messages = 0;
  std::uint64_t phase2_rounds = 0, phase2_messages = 0;
  std::uint64_t merge_rounds = 0, merge_messages = 0;
  std::uint64_t merge_eager_rounds = 0;
  std::uint64_t rounds = 0, messages = 0;
  // output
  std::size_t h_edges = 0;
  int h_diameter = 0;
  std::size_t c2_clusters = 0, high_degree = 0, low_degree = 0, inactive = 0;
  std::size_t max_m1 = 0;
  std::size_t max_dump_degree = 0;
  std::size_t fallbacks = 0;
  std::size_t phase2_fallbacks = 0;
  int merge_iterations = 0;
  // structure
  bool components_ok = false;
  int max_c2_diameter = 0;
  std::size_t lowdeg_violations = 0;
  std::size_t intra_merge_edges = 0;
  std::size_t partition_violations = 0;
  // normalized
  double ratio_edges = 0;     // |E(H)| / min{m, n^{1+delta}}
  double ratio_messages = 0;  // messages / (n^{1+delta} ln^2 n)
  double ratio_rounds = 0;    // rounds / (n^{1-2 delta} ln^2 n + D)
  std::string error;          // empty unless the cell failed
};

/// One record per (graph, delta, seed) cell, in that nesting order.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

/// Single cell on a prepared graph.
RunRecord run_cell(const Graph& g, const GraphSpec& spec, const DannerConfig& cfg);

enum class Format : std::uint8_t { Csv, Json };
Format format_from_string(const std::string& s);

void write_records(std::ostream& os, const std::vector<RunRecord>& records, Format f);
/// Throws SchemaError on malformed input.
std::vector<RunRecord> read_records(std::istream& is, Format f);

struct VerifyReport {
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
  std::size_t records = 0;
};

/// Per-record structural checks plus, for Erdos-Renyi cells with m >= n^1.4,
/// the scaling check: per (delta), each mean ratio at the largest n is at
/// most 1.5x the mean ratio at the smallest n.
VerifyReport verify(const std::vector<RunRecord>& records);
/// Plain text, or a JSON object when `json` is set.
void write_report(std::ostream& os, const VerifyReport& r, bool json);

}  // namespace ktlab
