#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ixsim/agents.hpp"
#include "ixsim/env.hpp"

namespace ixsim {

/// Success-rate percentage per the benchmark definition. Throws
/// std::domain_error when total is zero.
double success_rate(int successes, int total);

struct Metrics {
  int successes = 0;
  int collisions = 0;
  int timeouts = 0;
  double success_time_sum = 0.0;  // seconds over successful episodes only

  int total() const { return successes + collisions + timeouts; }
  double success_rate_pct() const { return success_rate(successes, total()); }
  /// Undefined (empty) when no episode succeeded.
  std::optional<double> avg_time() const;
  void add(Outcome outcome, double duration);
  void merge(const Metrics& other);
};

/// One deterministic-grid episode.
struct CellOutcome {
  FunctionalId scenario = FunctionalId::A;
  double speed_kmh = 0.0;
  double gap_m = 0.0;
  uint64_t seed = 0;
  Outcome outcome = Outcome::Running;
  double duration = 0.0;
  double total_reward = 0.0;
};

/// One stochastic-test episode.
struct EpisodeRecord {
  Turn task = Turn::Left;
  int episode = 0;
  uint64_t seed = 0;
  Outcome outcome = Outcome::Running;
  double duration = 0.0;
  double total_reward = 0.0;
};

struct ReportRow {
  std::string id;  // functional scenario or task name
  Metrics metrics;
};

struct TestReport {
  enum class Kind { Deterministic, Stochastic };
  Kind kind = Kind::Deterministic;
  std::string agent_label;
  std::string config_snapshot;  // resolved key=value text
  std::vector<uint64_t> seeds;
  std::vector<ReportRow> rows;
  std::vector<CellOutcome> cells;        // deterministic runs
  std::vector<EpisodeRecord> episodes;   // stochastic runs
};

struct EvalSettings {
  SimConfig sim;
  RewardConfig reward;
  ScenarioDefaults defaults;
  Dims ego_dims;
  std::string config_snapshot;
};

/// One episode per concrete scenario per seed over the full (V, d) grid of
/// each requested functional scenario.
TestReport run_deterministic(const IntersectionMap& map, const EvalSettings& settings,
                             Agent& agent, const std::vector<FunctionalId>& scenarios,
                             const std::vector<uint64_t>& seeds);

/// n episodes per ego task with autopilot traffic; episode seeds derive
/// from the base seed.
TestReport run_stochastic(const IntersectionMap& map, const EvalSettings& settings, Agent& agent,
                          const StochasticConfig& config, const std::vector<Turn>& tasks, int n,
                          uint64_t seed);

/// Merge per-scenario rows into the task grouping used for rule-based
/// reporting: (A,B) -> left, (C) -> right, (D,E) -> straight.
std::vector<ReportRow> group_rows_by_task(const TestReport& report);

/// Writes report.csv, report_by_task.csv (deterministic), cells.csv or
/// episodes.csv, and summary.json under `dir`.
void emit_report(const TestReport& report, const std::string& dir);

/// Re-read a per-cell file; used to verify the round trip.
std::vector<CellOutcome> load_cells_csv(const std::string& path);
Metrics metrics_from_cells(const std::vector<CellOutcome>& cells, FunctionalId scenario);

}  // namespace ixsim
