#include "precarity/app.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>

#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "precarity/config.hpp"
#include "precarity/error.hpp"
#include "precarity/report.hpp"

namespace precarity::app {

namespace {

struct ScenarioResult {
  ScenarioReport report;
  nlohmann::json meta;
};

nlohmann::json ifp_meta(const SimulationState& s) {
  if (!s.ifp[0]) return nullptr;
  nlohmann::json out = nlohmann::json::array();
  for (const auto& sol : s.ifp) {
    if (!sol) continue;
    out.push_back({{"converged", true},
                   {"distance", sol->distance},
                   {"iterations", sol->iterations},
                   {"income_unit", sol->unit}});
  }
  return out;
}

ScenarioResult run_scenario(const Scenario& sc, const std::filesystem::path& out_dir) {
  spdlog::info("scenario '{}': {} households, {} rounds, {} agents", sc.name, sc.sim.population.n,
               sc.sim.rounds, to_string(sc.sim.agent_model));
  SimulationState state = init_simulation(sc.sim);
  for (int r = 1; r <= sc.sim.rounds; ++r) {
    run_round(state, r);
    spdlog::debug("scenario '{}': round {} done", sc.name, r);
  }

  if (sc.dump_policy && state.ifp[0]) {
    write_policy_table(out_dir / (sc.name + ".policy.csv"), state.ifp[0]->policy,
                       state.ifp[0]->unit);
  }

  std::size_t insolvent = 0;
  for (const Household& hh : state.population) insolvent += hh.insolvent ? 1 : 0;

  ScenarioResult o;
  o.report = summarize(state.record, sc.name, sc.sim.precarity);
  o.meta = {
      {"scenario", sc.name},
      {"seed", sc.sim.seed},
      {"config_sha256", sc.digest},
      {"config", nlohmann::json::parse(sc.canonical)},
      {"agent_model", std::string(to_string(sc.sim.agent_model))},
      {"households", state.population.size()},
      {"rounds", sc.sim.rounds},
      {"threshold_income", state.classifier.threshold_income},
      {"acceptance_quantile", state.classifier.acceptance_quantile},
      {"bin_edges", o.report.bin_edges()},
      {"insolvent_households", insolvent},
      {"ifp", ifp_meta(state)},
  };
  return o;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

}  // namespace

void configure_logging() {
  auto logger = spdlog::get("precarity");
  if (!logger) logger = spdlog::stderr_color_mt("precarity");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* v = std::getenv("PRECARITY_VERBOSITY")) level = spdlog::level::from_str(v);
  spdlog::set_level(level);
}

int run(const RunOptions& opts, std::ostream& err) {
  try {
    const std::vector<Scenario> scenarios = load_config(opts.config, opts.seed);
    if (opts.dry_run) {
      // Data files were ingested while loading; also exercise population builds.
      for (const Scenario& sc : scenarios) build_population(sc.sim.population, sc.sim.seed);
      spdlog::info("dry run: {} scenario(s) valid", scenarios.size());
      return 0;
    }
    std::filesystem::create_directories(opts.out);

    std::vector<ScenarioResult> results;
    if (opts.parallel_scenarios) {
      std::vector<std::future<ScenarioResult>> jobs;
      for (const Scenario& sc : scenarios) {
        jobs.push_back(std::async(std::launch::async, run_scenario, std::cref(sc), opts.out));
      }
      for (auto& j : jobs) results.push_back(j.get());
    } else {
      for (const Scenario& sc : scenarios) results.push_back(run_scenario(sc, opts.out));
    }

    std::vector<ComparisonRow> comparison;
    for (const ScenarioResult& o : results) {
      write_report_csv(opts.out / (o.report.scenario + ".csv"), o.report);
      write_text(opts.out / (o.report.scenario + ".meta.json"), o.meta.dump(2) + "\n");
    }
    for (std::size_t i = 1; i < results.size(); ++i) {
      const auto rows = precarity::compare(results[0].report, results[i].report);
      comparison.insert(comparison.end(), rows.begin(), rows.end());
    }
    write_comparison_csv(opts.out / "comparison.csv", comparison);
    return 0;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IngestionError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int compare(const std::filesystem::path& a, const std::filesystem::path& b, std::ostream& out,
            std::ostream& err) {
  try {
    const ScenarioReport ra = read_report_csv(a);
    const ScenarioReport rb = read_report_csv(b);
    write_comparison_csv(out, precarity::compare(ra, rb));
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace precarity::app
