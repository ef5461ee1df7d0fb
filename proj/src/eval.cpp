#include "ixsim/eval.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <stdexcept>

#include <json.hpp>

namespace ixsim {

double success_rate(int successes, int total) {
  if (total < 1) throw std::domain_error("success_rate: total must be >= 1");
  return static_cast<double>(successes) / static_cast<double>(total) * 100.0;
}

std::optional<double> Metrics::avg_time() const {
  if (successes == 0) return std::nullopt;
  return success_time_sum / successes;
}

void Metrics::add(Outcome outcome, double duration) {
  switch (outcome) {
    case Outcome::Success:
      ++successes;
      success_time_sum += duration;
      break;
    case Outcome::Collision:
      ++collisions;
      break;
    case Outcome::Timeout:
      ++timeouts;
      break;
    case Outcome::Running:
      throw std::invalid_argument("Metrics::add: episode still running");
  }
}

void Metrics::merge(const Metrics& other) {
  successes += other.successes;
  collisions += other.collisions;
  timeouts += other.timeouts;
  success_time_sum += other.success_time_sum;
}

namespace {

EpisodeResult run_episode(Env& env, Agent& agent, uint64_t seed) {
  env.reset(seed);
  while (!env.done()) {
    env.step(agent.act(env));
  }
  return env.result();
}

}  // namespace

TestReport run_deterministic(const IntersectionMap& map, const EvalSettings& settings,
                             Agent& agent, const std::vector<FunctionalId>& scenarios,
                             const std::vector<uint64_t>& seeds) {
  TestReport report;
  report.kind = TestReport::Kind::Deterministic;
  report.agent_label = agent.label();
  report.config_snapshot = settings.config_snapshot;
  report.seeds = seeds;

  for (const FunctionalId id : scenarios) {
    LogicalScenario logical;
    logical.functional = functional(id);
    logical.speed_kmh = settings.defaults.speed_kmh;
    logical.gap_m = settings.defaults.gap_m;
    logical.step = settings.defaults.grid_step;

    Metrics metrics;
    for (const ConcreteScenario& cell : enumerate_grid(logical)) {
      Env env(map, ScenarioInstance{cell}, settings.sim, settings.reward, settings.defaults,
              settings.ego_dims);
      for (const uint64_t seed : seeds) {
        const EpisodeResult r = run_episode(env, agent, seed);
        metrics.add(r.outcome, r.duration);
        report.cells.push_back(CellOutcome{id, cell.speed_kmh, cell.gap_m, seed, r.outcome,
                                           r.duration, r.total_reward});
      }
    }
    report.rows.push_back(ReportRow{to_string(id), metrics});
  }
  return report;
}

TestReport run_stochastic(const IntersectionMap& map, const EvalSettings& settings, Agent& agent,
                          const StochasticConfig& config, const std::vector<Turn>& tasks, int n,
                          uint64_t seed) {
  if (n < 1) throw std::invalid_argument("run_stochastic: episode count must be >= 1");
  TestReport report;
  report.kind = TestReport::Kind::Stochastic;
  report.agent_label = agent.label();
  report.config_snapshot = settings.config_snapshot;
  report.seeds = {seed};

  for (const Turn task : tasks) {
    StochasticConfig task_config = config;
    task_config.ego_task = Movement{kEgoArm, task};
    Env env(map, ScenarioInstance{task_config}, settings.sim, settings.reward,
            settings.defaults, settings.ego_dims);
    Metrics metrics;
    for (int ep = 0; ep < n; ++ep) {
      const uint64_t ep_seed =
          mix_seed(seed, (static_cast<uint64_t>(task) << 32) + static_cast<uint64_t>(ep));
      const EpisodeResult r = run_episode(env, agent, ep_seed);
      metrics.add(r.outcome, r.duration);
      report.episodes.push_back(
          EpisodeRecord{task, ep, ep_seed, r.outcome, r.duration, r.total_reward});
    }
    report.rows.push_back(ReportRow{to_string(task), metrics});
  }
  return report;
}

std::vector<ReportRow> group_rows_by_task(const TestReport& report) {
  std::vector<ReportRow> grouped;
  auto push_group = [&](const std::string& name, std::initializer_list<const char*> ids) {
    ReportRow row;
    row.id = name;
    bool any = false;
    for (const char* id : ids) {
      for (const auto& r : report.rows) {
        if (r.id == id) {
          row.metrics.merge(r.metrics);
          any = true;
        }
      }
    }
    if (any) grouped.push_back(row);
  };
  push_group("left", {"A", "B"});
  push_group("right", {"C"});
  push_group("straight", {"D", "E"});
  return grouped;
}

namespace {

void write_rows_csv(const std::vector<ReportRow>& rows, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write report file: " + path);
  std::fprintf(f, "scenario_id,episodes,successes,collisions,timeouts,success_rate_pct,avg_time_s\n");
  for (const auto& row : rows) {
    std::fprintf(f, "%s,%d,%d,%d,%d,%.6f,", row.id.c_str(), row.metrics.total(),
                 row.metrics.successes, row.metrics.collisions, row.metrics.timeouts,
                 row.metrics.success_rate_pct());
    if (const auto avg = row.metrics.avg_time()) {
      std::fprintf(f, "%.6f\n", *avg);
    } else {
      std::fprintf(f, "\n");  // undefined marker: empty field
    }
  }
  std::fclose(f);
}

uint64_t fnv1a(const std::string& text) {
  uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void emit_report(const TestReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + dir);

  write_rows_csv(report.rows, dir + "/report.csv");
  if (report.kind == TestReport::Kind::Deterministic) {
    write_rows_csv(group_rows_by_task(report), dir + "/report_by_task.csv");

    std::FILE* f = std::fopen((dir + "/cells.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write cells file");
    std::fprintf(f, "scenario_id,speed_kmh,gap_m,seed,outcome,duration_s,total_reward\n");
    for (const auto& c : report.cells) {
      std::fprintf(f, "%s,%.17g,%.17g,%" PRIu64 ",%s,%.17g,%.17g\n",
                   to_string(c.scenario).c_str(), c.speed_kmh, c.gap_m, c.seed,
                   to_string(c.outcome).c_str(), c.duration, c.total_reward);
    }
    std::fclose(f);
  } else {
    std::FILE* f = std::fopen((dir + "/episodes.csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write episodes file");
    std::fprintf(f, "task,episode,seed,outcome,duration_s,total_reward\n");
    for (const auto& e : report.episodes) {
      std::fprintf(f, "%s,%d,%" PRIu64 ",%s,%.17g,%.17g\n", to_string(e.task).c_str(),
                   e.episode, e.seed, to_string(e.outcome).c_str(), e.duration, e.total_reward);
    }
    std::fclose(f);
  }

  nlohmann::ordered_json summary;
  summary["agent"] = report.agent_label;
  summary["kind"] =
      report.kind == TestReport::Kind::Deterministic ? "deterministic" : "stochastic";
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016" PRIx64, fnv1a(report.config_snapshot));
  summary["config_hash"] = hash_hex;
  summary["seeds"] = report.seeds;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["id"] = row.id;
    r["episodes"] = row.metrics.total();
    r["successes"] = row.metrics.successes;
    r["collisions"] = row.metrics.collisions;
    r["timeouts"] = row.metrics.timeouts;
    r["success_rate_pct"] = row.metrics.success_rate_pct();
    if (const auto avg = row.metrics.avg_time()) {
      r["avg_time_s"] = *avg;
    } else {
      r["avg_time_s"] = nullptr;
    }
    rows.push_back(r);
  }
  summary["rows"] = rows;
  summary["config"] = report.config_snapshot;

  std::FILE* f = std::fopen((dir + "/summary.json").c_str(), "w");
  if (!f) throw std::runtime_error("cannot write summary file");
  const std::string text = summary.dump(2);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fputc('\n', f);
  std::fclose(f);
}

std::vector<CellOutcome> load_cells_csv(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw std::runtime_error("cannot open cells file: " + path);
  std::vector<CellOutcome> cells;
  char line[512];
  bool header = true;
  while (std::fgets(line, sizeof(line), f)) {
    if (header) {
      header = false;
      continue;
    }
    char scen[16], outcome[32];
    CellOutcome c;
    if (std::sscanf(line, "%15[^,],%lg,%lg,%" SCNu64 ",%31[^,],%lg,%lg", scen, &c.speed_kmh,
                    &c.gap_m, &c.seed, outcome, &c.duration, &c.total_reward) == 7) {
      c.scenario = functional_from_string(scen);
      if (std::strcmp(outcome, "success") == 0) {
        c.outcome = Outcome::Success;
      } else if (std::strcmp(outcome, "collision") == 0) {
        c.outcome = Outcome::Collision;
      } else if (std::strcmp(outcome, "timeout") == 0) {
        c.outcome = Outcome::Timeout;
      } else {
        std::fclose(f);
        throw std::runtime_error("cells file: unknown outcome " + std::string(outcome));
      }
      cells.push_back(c);
    }
  }
  std::fclose(f);
  return cells;
}

Metrics metrics_from_cells(const std::vector<CellOutcome>& cells, FunctionalId scenario) {
  Metrics m;
  for (const auto& c : cells) {
    if (c.scenario == scenario) m.add(c.outcome, c.duration);
  }
  return m;
}

}  // namespace ixsim
