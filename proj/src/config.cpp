#include "precarity/config.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "precarity/error.hpp"
#include "precarity/io.hpp"

namespace precarity {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Object reader that tracks the dotted key path for messages and rejects
// keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(fmt::format("key '{}': expected a number", key_path(key)));
    return v.get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) {
      throw ConfigError(fmt::format("key '{}': expected an integer", key_path(key)));
    }
    return v.get<long long>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(fmt::format("key '{}': expected a non-negative integer", key_path(key)));
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(fmt::format("key '{}': expected true or false", key_path(key)));
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(fmt::format("key '{}': expected a string", key_path(key)));
    return v.get<std::string>();
  }

  template <typename E, std::size_t N>
  E choice(const std::string& key, E fallback, const std::array<std::pair<const char*, E>, N>& options) {
    if (!has(key)) return fallback;
    const std::string s = string(key, "");
    for (const auto& [name, value] : options) {
      if (s == name) return value;
    }
    std::string allowed;
    for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    throw ConfigError(fmt::format("key '{}': '{}' is not one of {}", key_path(key), s, allowed));
  }

  Section child(const std::string& key) { return Section(raw(key), key_path(key)); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(fmt::format("unknown key '{}'", key_path(key)));
    }
  }

  std::string where() const { return path_.empty() ? "config" : "key '" + path_ + "'"; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

const std::array<std::pair<const char*, BinningMode>, 2> kBinningModes{
    {{"initial", BinningMode::Initial}, {"relative", BinningMode::Relative}}};

void parse_population(Section sec, const std::filesystem::path& base, PopulationSpec& spec,
                      json& data_digests) {
  bool n_given = sec.has("n");
  const long long n = sec.integer("n", static_cast<long long>(spec.n));
  if (n <= 0) throw ConfigError(fmt::format("key '{}': must be positive", sec.key_path("n")));
  spec.n = static_cast<std::size_t>(n);

  auto note_file = [&](const std::string& key, const std::filesystem::path& path) {
    data_digests[key] = sha256_hex(read_file(path));
  };

  if (sec.has("source")) {
    Section src = sec.child("source");
    const std::string kind = src.string("kind", "synthetic");
    if (kind == "synthetic") {
      SyntheticIncome s;
      s.log_mean = src.number("log_mean", s.log_mean);
      s.log_sd = src.number("log_sd", s.log_sd);
      spec.source = s;
    } else if (kind == "file") {
      if (!src.has("path")) throw ConfigError(fmt::format("key '{}' is required", src.key_path("path")));
      const auto path = resolve(base, src.string("path", ""));
      const std::vector<double> rows = io::read_income_file(path);
      if (!n_given) spec.n = rows.size();
      note_file("income_file", path);
      spec.source = IncomeFile{path};
    } else {
      throw ConfigError(fmt::format("key '{}': unknown source kind '{}'", src.key_path("kind"), kind));
    }
    src.finish();
  }
  if (sec.has("net_worth_table")) {
    const auto path = resolve(base, sec.string("net_worth_table", ""));
    spec.net_worth_by_percentile = io::read_net_worth_table(path);
    note_file("net_worth_table", path);
  }
  spec.net_worth_dispersion = sec.number("net_worth_dispersion", spec.net_worth_dispersion);
  if (sec.has("expenditure_table")) {
    const auto path = resolve(base, sec.string("expenditure_table", ""));
    spec.expenses_by_decile = io::read_expenditure_table(path);
    note_file("expenditure_table", path);
  }
  if (sec.has("class_cutoffs")) {
    const json& c = sec.raw("class_cutoffs");
    if (!c.is_array() || c.size() != 3 || !std::all_of(c.begin(), c.end(), [](const json& v) { return v.is_number(); })) {
      throw ConfigError(fmt::format("key '{}': expected three numbers", sec.key_path("class_cutoffs")));
    }
    for (std::size_t i = 0; i < 3; ++i) spec.class_cutoffs[i] = c[i].get<double>();
  }
  if (sec.has("health")) {
    Section h = sec.child("health");
    spec.health.mean_health = h.number("mean", spec.health.mean_health);
    spec.health.eta = h.number("eta", spec.health.eta);
    spec.health.sigma_h = h.number("sigma", spec.health.sigma_h);
    h.finish();
  }
  sec.finish();
}

void parse_table(Section sec, TransitionTable& table) {
  const std::array<std::pair<const char*, IncomeClass>, 3> classes{
      {{"low", IncomeClass::Low}, {"middle", IncomeClass::Middle}, {"high", IncomeClass::High}}};
  for (const auto& [cname, cls] : classes) {
    if (!sec.has(cname)) continue;
    Section by_class = sec.child(cname);
    for (Outcome o : {Outcome::Negative, Outcome::Positive}) {
      const std::string oname(to_string(o));
      if (!by_class.has(oname)) continue;
      Section row_sec = by_class.child(oname);
      TransitionRow row{};
      row[0] = row_sec.number("stay", -1.0);
      const auto moves = moves_after(o);
      for (std::size_t k = 0; k < 3; ++k) row[k + 1] = row_sec.number(std::string(to_string(moves[k])), -1.0);
      for (double p : row) {
        if (p < 0.0) {
          throw ConfigError(fmt::format("key '{}': every action needs a probability >= 0",
                                        by_class.key_path(oname)));
        }
      }
      row_sec.finish();
      table.set_row(cls, o, row);
    }
    by_class.finish();
  }
  sec.finish();
  table.validate();
}

SimulationConfig parse_simulation(const json& j, const std::filesystem::path& base, json& data_digests,
                                  bool& dump_policy) {
  Section top(j, "");
  SimulationConfig cfg;
  cfg.seed = top.unsigned_integer("seed", cfg.seed);
  cfg.rounds = static_cast<int>(top.integer("rounds", cfg.rounds));
  if (cfg.rounds < 1) throw ConfigError("key 'rounds': must be >= 1");
  cfg.agent_model = top.choice<AgentModel, 2>(
      "agent_model", cfg.agent_model, {{{"mdp", AgentModel::Mdp}, {"ifp", AgentModel::Ifp}}});
  cfg.threads = static_cast<int>(top.integer("threads", 0));
  cfg.shock_fraction = top.number("shock_fraction", cfg.shock_fraction);

  if (top.has("population")) parse_population(top.child("population"), base, cfg.population, data_digests);

  if (top.has("states")) {
    Section s = top.child("states");
    cfg.binning.income = s.choice("income", cfg.binning.income, kBinningModes);
    cfg.binning.net_worth = s.choice("net_worth", cfg.binning.net_worth, kBinningModes);
    cfg.binning.health = s.choice("health", cfg.binning.health, kBinningModes);
    s.finish();
  }
  if (top.has("classifier")) {
    Section c = top.child("classifier");
    cfg.acceptance_quantile = c.number("acceptance_quantile", cfg.acceptance_quantile);
    c.finish();
  }
  if (top.has("mdp")) {
    Section m = top.child("mdp");
    cfg.class_rule = m.choice<ClassRule, 2>(
        "class_rule", cfg.class_rule, {{{"current", ClassRule::Current}, {"initial", ClassRule::Initial}}});
    if (m.has("table")) parse_table(m.child("table"), cfg.table);
    m.finish();
  }
  if (top.has("ifp")) {
    Section f = top.child("ifp");
    cfg.ifp.beta = f.number("beta", cfg.ifp.beta);
    cfg.ifp.gamma_c = f.number("gamma_c", cfg.ifp.gamma_c);
    cfg.ifp.a_r = f.number("a_r", cfg.ifp.a_r);
    cfg.ifp.b_r = f.number("b_r", cfg.ifp.b_r);
    cfg.ifp.grid_points = static_cast<int>(f.integer("grid_points", cfg.ifp.grid_points));
    cfg.ifp.grid_extent = f.number("grid_extent", cfg.ifp.grid_extent);
    cfg.ifp.tol = f.number("tol", cfg.ifp.tol);
    cfg.ifp.max_iter = static_cast<int>(f.integer("max_iter", cfg.ifp.max_iter));
    cfg.ifp.quadrature_nodes = static_cast<int>(f.integer("quadrature_nodes", cfg.ifp.quadrature_nodes));
    dump_policy = f.boolean("dump_policy", false);
    f.finish();
  }
  if (top.has("precarity")) {
    Section p = top.child("precarity");
    cfg.precarity.lambda = p.number("lambda", cfg.precarity.lambda);
    cfg.precarity.alpha = p.number("alpha", cfg.precarity.alpha);
    cfg.precarity.gamma = p.number("gamma", cfg.precarity.gamma);
    cfg.precarity.count_stays = p.boolean("count_stays", cfg.precarity.count_stays);
    p.finish();
  }
  if (top.has("intervention")) {
    Section iv = top.child("intervention");
    const std::string kind = iv.string("kind", "none");
    if (kind == "none") {
      cfg.intervention.kind = NoIntervention{};
    } else if (kind == "stimulus") {
      cfg.intervention.kind = FixedStimulus{iv.number("amount", FixedStimulus{}.amount)};
    } else if (kind == "resistance") {
      cfg.intervention.kind = PrecarityResistance{iv.number("scale", 1.0)};
    } else {
      throw ConfigError(fmt::format("key 'intervention.kind': unknown kind '{}'", kind));
    }
    cfg.intervention.start_round = static_cast<int>(iv.integer("start_round", 1));
    iv.finish();
  }
  top.finish();
  cfg.validate();
  return cfg;
}

std::string quantile_suffix(double q) { return fmt::format("_q{:.2f}", q); }

}  // namespace

std::vector<Scenario> parse_config(const std::string& text, const std::filesystem::path& base_dir,
                                   std::optional<std::uint64_t> seed_override) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(fmt::format("config parse error at line {}, column {}: {}", line, col, e.what()));
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");

  json base = root;
  json scenarios = json::array({json{{"name", "baseline"}}});
  if (base.contains("scenarios")) {
    scenarios = base["scenarios"];
    base.erase("scenarios");
    if (!scenarios.is_array() || scenarios.empty()) {
      throw ConfigError("key 'scenarios': expected a non-empty array");
    }
  }

  std::vector<Scenario> out;
  std::set<std::string> names;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    json patch = scenarios[i];
    const std::string where = fmt::format("scenarios[{}]", i);
    if (!patch.is_object() || !patch.contains("name") || !patch["name"].is_string()) {
      throw ConfigError(fmt::format("key '{}': expected an object with a string 'name'", where));
    }
    const std::string name = patch["name"].get<std::string>();
    if (name.empty() || name.find_first_of("/\\,\n") != std::string::npos) {
      throw ConfigError(fmt::format("key '{}.name': '{}' is not a valid scenario name", where, name));
    }
    patch.erase("name");
    json merged = base;
    merged.merge_patch(patch);
    if (seed_override) merged["seed"] = *seed_override;

    std::vector<std::pair<std::string, json>> expanded;
    const json* quantiles = nullptr;
    if (merged.contains("classifier") && merged["classifier"].is_object() &&
        merged["classifier"].contains("quantiles")) {
      quantiles = &merged["classifier"]["quantiles"];
    }
    if (quantiles != nullptr) {
      if (!quantiles->is_array() || quantiles->empty()) {
        throw ConfigError("key 'classifier.quantiles': expected a non-empty array of numbers");
      }
      if (merged["classifier"].contains("acceptance_quantile")) {
        throw ConfigError("classifier: give either acceptance_quantile or quantiles, not both");
      }
      for (const json& q : *quantiles) {
        if (!q.is_number()) throw ConfigError("key 'classifier.quantiles': expected numbers");
        json one = merged;
        one["classifier"].erase("quantiles");
        one["classifier"]["acceptance_quantile"] = q;
        expanded.emplace_back(name + quantile_suffix(q.get<double>()), std::move(one));
      }
    } else {
      expanded.emplace_back(name, std::move(merged));
    }

    for (auto& [scenario_name, settings] : expanded) {
      if (!names.insert(scenario_name).second) {
        throw ConfigError(fmt::format("duplicate scenario name '{}'", scenario_name));
      }
      Scenario s;
      s.name = scenario_name;
      json data_digests = json::object();
      try {
        s.sim = parse_simulation(settings, base_dir, data_digests, s.dump_policy);
      } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("scenario '{}': {}", scenario_name, e.what()));
      }
      json canonical = settings;
      canonical["scenario"] = scenario_name;
      if (!data_digests.empty()) canonical["data_sha256"] = data_digests;
      s.canonical = canonical.dump();
      s.digest = sha256_hex(s.canonical);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<Scenario> load_config(const std::filesystem::path& path,
                                  std::optional<std::uint64_t> seed_override) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IngestionError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  try {
    return parse_config(text, path.parent_path(), seed_override);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace precarity
