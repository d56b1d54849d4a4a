#include "nnrates/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nnrates/bounds.hpp"
#include "nnrates/errors.hpp"
#include "nnrates/presets.hpp"

namespace nnrates {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ArgumentError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ArgumentError(where + ": unknown key '" + it.key() + "'");
  }
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ArgumentError(where + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw ArgumentError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

std::uint64_t as_count(const json& v, const std::string& what) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ArgumentError(what + " must be nonnegative");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  throw ArgumentError(what + " must be a nonnegative integer");
}

std::size_t count(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ArgumentError(where + ": missing '" + key + "'");
  return static_cast<std::size_t>(as_count(j.at(key), where + "." + key));
}

std::size_t count_or(const json& j, const std::string& key, std::size_t fallback, const std::string& where) {
  return j.contains(key) ? count(j, key, where) : fallback;
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array()) throw ArgumentError(where + ": '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ArgumentError(where + ": '" + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ClassDensity class_density(const json& j, const std::string& where) {
  check_keys(j, {"breaks", "heights"}, where);
  return {numbers(j, "breaks", where), numbers(j, "heights", where)};
}

KRule k_rule(const json& e, const std::string& where, std::optional<KRule> fallback) {
  if (e.contains("k") && e.contains("k_rule")) throw ArgumentError(where + ": give either 'k' or 'k_rule'");
  if (e.contains("k")) {
    const std::size_t k = count(e, "k", where);
    return KRule::fixed_k(k);
  }
  if (!e.contains("k_rule")) {
    if (fallback) return *fallback;
    throw ArgumentError(where + ": missing 'k' or 'k_rule'");
  }
  const json& r = e.at("k_rule");
  const std::string w = where + ".k_rule";
  if (!r.is_object() || !r.contains("kind") || !r.at("kind").is_string()) {
    throw ArgumentError(w + ": needs a string 'kind'");
  }
  const std::string kind = r.at("kind").get<std::string>();
  if (kind == "fixed") {
    check_keys(r, {"kind", "k"}, w);
    return KRule::fixed_k(count(r, "k", w));
  }
  if (kind == "power") {
    check_keys(r, {"kind", "exponent"}, w);
    return KRule::power(number(r, "exponent", w));
  }
  if (kind == "sqrt") {
    check_keys(r, {"kind"}, w);
    return KRule::sqrt_n();
  }
  if (kind == "theorem4") {
    check_keys(r, {"kind", "k_o", "alpha", "delta"}, w);
    std::optional<double> delta;
    if (r.contains("delta")) delta = number(r, "delta", w);
    return KRule::theorem4(number_or(r, "k_o", 1.0, w), number(r, "alpha", w), delta);
  }
  throw ArgumentError(w + ": unknown kind '" + kind + "'");
}

ExperimentType experiment_type(const std::string& s, const std::string& where) {
  static const std::pair<const char*, ExperimentType> table[] = {
      {"upper_bound", ExperimentType::UpperBound},
      {"zero_bayes", ExperimentType::ZeroBayes},
      {"lower_bound", ExperimentType::LowerBound},
      {"exact_mistake", ExperimentType::ExactMistake},
      {"expected_excess", ExperimentType::ExpectedExcess},
      {"pointwise_excess", ExperimentType::PointwiseExcess},
      {"rate_sweep", ExperimentType::RateSweep},
      {"consistency", ExperimentType::Consistency},
      {"boundary", ExperimentType::Boundary},
      {"high_error", ExperimentType::HighError},
  };
  for (const auto& [name, type] : table) {
    if (s == name) return type;
  }
  throw ArgumentError(where + ": unknown experiment type '" + s + "'");
}

bool safe_name(const std::string& s) {
  if (s.empty() || s[0] == '.') return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

Point query_point(const DistributionInstance& dist, double x, const std::string& where) {
  if (dist.is_interval()) {
    if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError(where + ": x must lie in [0,1]");
    return x;
  }
  if (!(x >= 0.0 && x == std::floor(x) && x < static_cast<double>(dist.atomic().mass.size()))) {
    throw ArgumentError(where + ": x must be an atom index");
  }
  return AtomId{static_cast<std::size_t>(x)};
}

ExperimentSpec parse_experiment(const json& e, std::size_t index, const Overrides& ov) {
  const std::string where0 = "experiments[" + std::to_string(index) + "]";
  if (!e.is_object() || !e.contains("type") || !e.at("type").is_string()) {
    throw ArgumentError(where0 + ": needs a string 'type'");
  }
  ExperimentSpec s;
  s.type = experiment_type(e.at("type").get<std::string>(), where0);
  s.name = e.value("name", to_string(s.type) + "_" + std::to_string(index));
  if (e.contains("name") && !e.at("name").is_string()) throw ArgumentError(where0 + ": 'name' must be a string");
  if (!safe_name(s.name)) throw ArgumentError(where0 + ": name '" + s.name + "' must be [A-Za-z0-9_.-]");
  const std::string where = where0 + " (" + s.name + ")";

  auto single_n = [&] { s.n = {count(e, "n", where)}; };
  auto trials = [&](std::size_t fallback) {
    s.trials = ov.trials ? *ov.trials : count_or(e, "trials", fallback, where);
    if (s.trials < 1) throw ArgumentError(where + ": trials must be >= 1");
  };
  auto query = [&] {
    s.mc_points = ov.mc_points ? *ov.mc_points : count_or(e, "mc_points", 2000, where);
    const std::string q = e.value("query", std::string("auto"));
    if (q == "auto") s.query = QueryMode::Auto;
    else if (q == "monte_carlo") s.query = QueryMode::MonteCarlo;
    else throw ArgumentError(where + ": query must be auto or monte_carlo");
    if (s.query == QueryMode::MonteCarlo && s.mc_points < 1) throw ArgumentError(where + ": mc_points must be >= 1");
  };

  switch (s.type) {
    case ExperimentType::UpperBound:
    case ExperimentType::ZeroBayes:
      check_keys(e, {"type", "name", "n", "k", "k_rule", "delta", "trials", "mc_points", "query"}, where);
      single_n();
      s.rule = k_rule(e, where, std::nullopt);
      s.delta = number(e, "delta", where);
      trials(400);
      query();
      break;
    case ExperimentType::LowerBound:
      check_keys(e, {"type", "name", "n", "k", "k_rule", "batch", "min_trials", "max_trials", "mc_points", "query"},
                 where);
      single_n();
      s.rule = k_rule(e, where, std::nullopt);
      s.batch = count_or(e, "batch", 2000, where);
      s.min_trials = count_or(e, "min_trials", 2000, where);
      s.max_trials = ov.trials ? *ov.trials : count_or(e, "max_trials", 400000, where);
      if (s.batch < 1 || s.max_trials < 1) throw ArgumentError(where + ": batch and max_trials must be >= 1");
      query();
      break;
    case ExperimentType::ExactMistake:
      check_keys(e, {"type", "name", "n", "k", "k_rule"}, where);
      single_n();
      s.rule = k_rule(e, where, std::nullopt);
      break;
    case ExperimentType::ExpectedExcess:
      check_keys(e, {"type", "name", "n", "k", "k_rule", "trials", "mc_points", "query"}, where);
      if (e.contains("n") && e.at("n").is_array()) {
        for (const auto& v : e.at("n")) s.n.push_back(static_cast<std::size_t>(as_count(v, where + ".n")));
        if (s.n.empty()) throw ArgumentError(where + ": n must not be empty");
      } else {
        single_n();
      }
      s.rule = k_rule(e, where, std::nullopt);
      trials(400);
      query();
      break;
    case ExperimentType::PointwiseExcess:
      check_keys(e, {"type", "name", "x", "n", "k", "k_rule", "trials"}, where);
      single_n();
      s.rule = k_rule(e, where, std::nullopt);
      s.x = number(e, "x", where);
      trials(400);
      break;
    case ExperimentType::RateSweep:
    case ExperimentType::Consistency: {
      check_keys(e, {"type", "name", "n_grid", "k", "k_rule", "trials", "mc_points", "query"}, where);
      if (!e.contains("n_grid") || !e.at("n_grid").is_array()) throw ArgumentError(where + ": 'n_grid' must be an array");
      for (const auto& v : e.at("n_grid")) s.n.push_back(static_cast<std::size_t>(as_count(v, where + ".n_grid")));
      const std::size_t min_points = s.type == ExperimentType::RateSweep ? 4 : 1;
      if (s.n.size() < min_points) {
        throw ArgumentError(where + ": n_grid needs at least " + std::to_string(min_points) + " sizes");
      }
      std::optional<KRule> fallback;
      if (s.type == ExperimentType::Consistency) fallback = KRule::sqrt_n();
      s.rule = k_rule(e, where, fallback);
      trials(s.type == ExperimentType::RateSweep ? 50 : 100);
      query();
      break;
    }
    case ExperimentType::Boundary:
      check_keys(e, {"type", "name", "p", "delta", "probes"}, where);
      s.p = number(e, "p", where);
      s.delta = number(e, "delta", where);
      s.probes = count_or(e, "probes", 101, where);
      if (!(s.p > 0.0 && s.p <= 1.0)) throw ArgumentError(where + ": p must lie in (0,1]");
      if (!(s.delta >= 0.0 && s.delta <= 0.5)) throw ArgumentError(where + ": delta must lie in [0,1/2]");
      if (s.probes < 2) throw ArgumentError(where + ": probes must be >= 2");
      break;
    case ExperimentType::HighError:
      check_keys(e, {"type", "name", "n", "k", "k_rule", "probes"}, where);
      single_n();
      s.rule = k_rule(e, where, std::nullopt);
      s.probes = count_or(e, "probes", 101, where);
      if (s.probes < 2) throw ArgumentError(where + ": probes must be >= 2");
      break;
  }
  return s;
}

// Checks that an experiment can run on `dist` without doing the work.
void validate_experiment(const ExperimentSpec& s, const DistributionInstance& dist) {
  const std::string where = "experiment " + s.name;
  try {
    for (std::size_t n : s.n) {
      if (n < 2) throw ArgumentError("n must be >= 2");
      const std::size_t k = s.rule.k_for(n);
      switch (s.type) {
        case ExperimentType::UpperBound: theorem1_params(n, k, s.delta); break;
        case ExperimentType::ZeroBayes: zero_bayes_params(n, k, s.delta); break;
        case ExperimentType::ExactMistake:
          if (dist.family() != Family::FiniteAtomic) throw ArgumentError("exact_mistake needs a finite_atomic distribution");
          if (occupancy_state_count(dist.atomic().mass.size(), n) > 1e6) {
            throw ResourceError(where + ": exact oracle would enumerate more than 10^6 occupancy states");
          }
          break;
        case ExperimentType::PointwiseExcess: query_point(dist, s.x, where); break;
        default: break;
      }
    }
  } catch (const ResourceError&) {
    throw;
  } catch (const Error& err) {
    throw ArgumentError(where + ": " + err.what());
  }
}

}  // namespace

std::string to_string(ExperimentType type) {
  switch (type) {
    case ExperimentType::UpperBound: return "upper_bound";
    case ExperimentType::ZeroBayes: return "zero_bayes";
    case ExperimentType::LowerBound: return "lower_bound";
    case ExperimentType::ExactMistake: return "exact_mistake";
    case ExperimentType::ExpectedExcess: return "expected_excess";
    case ExperimentType::PointwiseExcess: return "pointwise_excess";
    case ExperimentType::RateSweep: return "rate_sweep";
    case ExperimentType::Consistency: return "consistency";
    case ExperimentType::Boundary: return "boundary";
    case ExperimentType::HighError: return "high_error";
  }
  return "unknown";
}

DistributionInstance distribution_from_json(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "distribution";
  if (!j.is_object()) throw ArgumentError(where + ": expected an object");
  if (j.contains("preset")) {
    check_keys(j, {"preset"}, where);
    const std::string name = j.at("preset").is_string() ? j.at("preset").get<std::string>() : "";
    if (name == "disjoint_support") return presets::disjoint_support();
    if (name == "two_pure_atoms") return presets::two_pure_atoms();
    if (name == "gapped_two_level") return presets::gapped_two_level();
    throw ArgumentError(where + ": unknown preset '" + name + "'");
  }
  if (!j.contains("family") || !j.at("family").is_string()) throw ArgumentError(where + ": needs 'family' or 'preset'");
  const std::string family = j.at("family").get<std::string>();
  if (family == "power_margin") {
    check_keys(j, {"family", "gamma"}, where);
    const double gamma = number(j, "gamma", where);
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ArgumentError(where + ": gamma must be positive");
    return DistributionInstance::power_margin(gamma);
  }
  if (family == "piecewise_uniform") {
    check_keys(j, {"family", "prior1", "class0", "class1"}, where);
    if (!j.contains("class0") || !j.contains("class1")) throw ArgumentError(where + ": needs class0 and class1");
    return DistributionInstance::piecewise_uniform(class_density(j.at("class0"), where + ".class0"),
                                                   class_density(j.at("class1"), where + ".class1"),
                                                   number(j, "prior1", where));
  }
  if (family == "finite_atomic") {
    check_keys(j, {"family", "distances", "distance_file", "mass", "eta"}, where);
    DistanceMatrix d;
    if (j.contains("distance_file") == j.contains("distances")) {
      throw ArgumentError(where + ": give exactly one of 'distances' and 'distance_file'");
    }
    if (j.contains("distance_file")) {
      if (!j.at("distance_file").is_string()) throw ArgumentError(where + ": distance_file must be a string");
      std::filesystem::path p = j.at("distance_file").get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      d = load_distance_matrix(p.string());
    } else {
      const json& rows = j.at("distances");
      if (!rows.is_array()) throw ArgumentError(where + ": distances must be a matrix");
      const std::size_t m = rows.size();
      std::vector<double> entries;
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != m) throw ArgumentError(where + ": distances must be square");
        for (const auto& v : row) {
          if (!v.is_number()) throw ArgumentError(where + ": distances must be numbers");
          entries.push_back(v.get<double>());
        }
      }
      d = DistanceMatrix(m, std::move(entries));
    }
    return DistributionInstance::finite_atomic(MetricSpace::finite(std::move(d)), numbers(j, "mass", where),
                                               numbers(j, "eta", where));
  }
  throw ArgumentError(where + ": unknown family '" + family + "'");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ArgumentError(path.string() + ": " + e.what());
  }
}

DistributionInstance load_distribution(const std::filesystem::path& path) {
  return distribution_from_json(read_json_file(path), path.parent_path());
}

RunConfig parse_run_config(const json& doc, const Overrides& ov, const std::filesystem::path& base_dir) {
  check_keys(doc, {"distribution", "experiments", "seed", "output_dir", "format"}, "config");
  if (!doc.contains("distribution")) throw ArgumentError("config: missing 'distribution'");
  if (!doc.contains("experiments") || !doc.at("experiments").is_array() || doc.at("experiments").empty()) {
    throw ArgumentError("config: 'experiments' must be a nonempty array");
  }
  RunConfig cfg{.echo = doc, .dist = distribution_from_json(doc.at("distribution"), base_dir), .experiments = {}};

  cfg.seed = ov.master_seed ? *ov.master_seed : (doc.contains("seed") ? as_count(doc.at("seed"), "config.seed") : 0);
  if (ov.output_dir) {
    cfg.output_dir = *ov.output_dir;
  } else if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string()) throw ArgumentError("config: output_dir must be a string");
    cfg.output_dir = doc.at("output_dir").get<std::string>();
  }
  std::string format = "csv";
  if (doc.contains("format")) {
    if (!doc.at("format").is_string()) throw ArgumentError("config: format must be a string");
    format = doc.at("format").get<std::string>();
  }
  if (ov.format) format = *ov.format;
  cfg.format = parse_format(format);

  std::set<std::string> names;
  const json& exps = doc.at("experiments");
  for (std::size_t i = 0; i < exps.size(); ++i) {
    ExperimentSpec s = parse_experiment(exps[i], i, ov);
    if (!names.insert(s.name).second) throw ArgumentError("config: duplicate experiment name '" + s.name + "'");
    validate_experiment(s, cfg.dist);
    cfg.experiments.push_back(std::move(s));
  }

  // Echo what will actually run.
  cfg.echo["seed"] = cfg.seed;
  cfg.echo["output_dir"] = cfg.output_dir.string();
  cfg.echo["format"] = format;
  for (std::size_t i = 0; i < cfg.experiments.size(); ++i) {
    json& e = cfg.echo["experiments"][i];
    const ExperimentSpec& s = cfg.experiments[i];
    e["name"] = s.name;
    const bool has_trials = s.type != ExperimentType::ExactMistake && s.type != ExperimentType::Boundary &&
                            s.type != ExperimentType::HighError;
    if (ov.trials && has_trials) e[s.type == ExperimentType::LowerBound ? "max_trials" : "trials"] = *ov.trials;
    if (ov.mc_points && e.contains("mc_points")) e["mc_points"] = *ov.mc_points;
  }
  return cfg;
}

}  // namespace nnrates
