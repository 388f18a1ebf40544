#pragma once

// JSON encodings for specs, reports and sidecars. Non-finite numbers are
// written as null; an unbounded lambda interval carries upper = null plus
// "upper_unbounded": true. Parsers throw ParseError on malformed text and
// InvalidSpec / InvalidInput when the decoded object violates its invariants.

#include "ssc/cluster.hpp"
#include "ssc/geometry.hpp"
#include "ssc/simulate.hpp"
#include "ssc/solver.hpp"
#include "ssc/theory.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ssc::json {

std::string to_json(const sim::ModelSpec& spec);
sim::ModelSpec parse_model_spec(const std::string& text);

/// {"n": .., "dims": [..], "bases": [[[row0], [row1], ...], ...]}
std::string to_json(const SubspaceEnsemble& ensemble);
SubspaceEnsemble parse_ensemble(const std::string& text);

std::string to_json(const geometry::GeometryReport& report);
geometry::GeometryReport parse_geometry_report(const std::string& text);

std::string to_json(const theory::LambdaRange& range);
theory::LambdaRange parse_lambda_range(const std::string& text);

/// Everything `diagnose` reports for one data set.
struct Diagnosis {
  geometry::GeometryReport geometry;
  std::optional<theory::DeterministicConditions> deterministic;
  std::optional<theory::RandomNoiseConditions> random_noise;
  std::optional<theory::FullyRandomConditions> fully_random;
  std::optional<theory::SemirandomAdvisory> semirandom;
  /// Reason a theorem block is absent (e.g. missing clean data).
  std::vector<std::string> notes;
};

std::string to_json(const Diagnosis& diagnosis);
Diagnosis parse_diagnosis(const std::string& text);

/// solve.json sidecar.
struct SolveSummary {
  double lambda = 0.0;
  std::string mode;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
  std::size_t trivial_columns = 0;
  bool trivial = false;
  std::size_t polished_columns = 0;
  double kkt_residual = 0.0;
};

std::string to_json(const SolveSummary& summary);
SolveSummary parse_solve_summary(const std::string& text);

struct ClusterReport {
  cluster::ClusterResult result;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

std::string to_json(const ClusterReport& report);
ClusterReport parse_cluster_report(const std::string& text);

}  // namespace ssc::json
