#include "nnrates/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "nnrates/boundary.hpp"
#include "nnrates/bounds.hpp"
#include "nnrates/errors.hpp"
#include "nnrates/harness.hpp"
#include "nnrates/parallel.hpp"

#ifndef NNRATES_VERSION
#define NNRATES_VERSION "0.0.0"
#endif

namespace nnrates {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::int64_t i64(std::size_t v) { return static_cast<std::int64_t>(v); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Point probe_point(const DistributionInstance& dist, std::size_t i, std::size_t probes) {
  if (dist.is_interval()) return static_cast<double>(i) / static_cast<double>(probes - 1);
  return AtomId{i};
}

std::size_t probe_count(const DistributionInstance& dist, std::size_t probes) {
  return dist.is_interval() ? probes : dist.atomic().mass.size();
}

Cell point_cell(const Point& x) {
  if (const auto* a = std::get_if<AtomId>(&x)) return i64(a->index);
  return std::get<double>(x);
}

ExperimentResult trial_result(const ExperimentSpec& s, const TrialReport& r) {
  ExperimentResult out;
  out.table.columns = {"trial", "n", "k", "delta", "mistake_prob", "bound", "violated"};
  for (const auto& row : r.rows) {
    out.table.rows.push_back(
        {i64(row.trial), i64(row.n), i64(row.k), row.delta, row.mistake_prob, row.bound, std::int64_t{row.violated}});
  }
  const TrialRow& first = r.rows.front();
  out.summary = {{"experiment", s.name},
                 {"type", to_string(s.type)},
                 {"n", i64(first.n)},
                 {"k", i64(first.k)},
                 {"delta", first.delta},
                 {"p", r.p},
                 {"Delta", r.Delta},
                 {"bound", first.bound},
                 {"trials", i64(r.rows.size())},
                 {"violations", i64(r.violations)},
                 {"frequency", r.frequency},
                 {"wilson_lo", r.wilson.lo},
                 {"wilson_hi", r.wilson.hi}};
  return out;
}

ExcessConfig excess_config(const ExperimentSpec& s, std::uint64_t seed) {
  ExcessConfig c;
  c.trials = s.trials;
  c.mc_points = s.mc_points;
  c.master_seed = seed;
  c.query = s.query;
  return c;
}

}  // namespace

ExperimentResult analyze_boundary(const DistributionInstance& dist, double p, double delta,
                                  std::size_t probes) {
  if (probes < 2) throw ArgumentError("probes must be >= 2");
  const std::size_t count = probe_count(dist, probes);
  const auto verdicts = parallel_map<RegionVerdict>(
      count, [&](std::size_t i) { return region_classify(dist, probe_point(dist, i, probes), p, delta); });
  ExperimentResult out;
  out.table.columns = {"x", "verdict", "binding_radius"};
  for (std::size_t i = 0; i < count; ++i) {
    const RegionVerdict& v = verdicts[i];
    out.table.rows.push_back({point_cell(probe_point(dist, i, probes)), to_string(v.verdict),
                              v.binding_radius ? Cell{*v.binding_radius} : Cell{std::string()}});
  }
  const MassQueryResult m = boundary_measure(dist, p, delta);
  out.summary = {{"family", to_string(dist.family())},
                 {"p", p},
                 {"delta", delta},
                 {"boundary_measure", m.value},
                 {"error_bound", m.error_bound}};
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& s, const DistributionInstance& dist,
                                std::uint64_t seed) {
  switch (s.type) {
    case ExperimentType::UpperBound:
    case ExperimentType::ZeroBayes: {
      TrialConfig c;
      c.n = s.n.front();
      c.k = s.rule.k_for(c.n);
      c.delta = s.delta;
      c.trials = s.trials;
      c.mc_points = s.mc_points;
      c.master_seed = seed;
      c.query = s.query;
      const TrialReport r =
          s.type == ExperimentType::UpperBound ? run_upper_bound_trials(dist, c) : run_zero_bayes_trials(dist, c);
      return trial_result(s, r);
    }
    case ExperimentType::LowerBound: {
      const std::size_t n = s.n.front();
      const std::size_t k = s.rule.k_for(n);
      LowerBoundBudget b;
      b.batch = s.batch;
      b.min_trials = s.min_trials;
      b.max_trials = s.max_trials;
      b.mc_points = s.mc_points;
      b.query = s.query;
      const LowerBoundCheck r = run_lower_bound_check(dist, n, k, b, seed);
      ExperimentResult out;
      out.table.columns = {"n", "k", "lhs", "lhs_stderr", "rhs", "c_o", "high_error_mass", "trials", "exact",
                           "precision_met", "pass"};
      out.table.rows.push_back({i64(n), i64(k), r.lhs, r.lhs_stderr, r.rhs, r.c_o, r.high_error_mass, i64(r.trials),
                                std::int64_t{r.exact}, std::int64_t{r.precision_met}, std::int64_t{r.pass}});
      out.summary = {{"experiment", s.name}, {"type", to_string(s.type)}, {"lhs", r.lhs},
                     {"lhs_stderr", r.lhs_stderr}, {"rhs", r.rhs},      {"pass", std::int64_t{r.pass}}};
      return out;
    }
    case ExperimentType::ExactMistake: {
      const std::size_t n = s.n.front();
      const std::size_t k = s.rule.k_for(n);
      const double v = exact_expected_mistake(dist, n, k);
      ExperimentResult out;
      out.table.columns = {"n", "k", "expected_mistake"};
      out.table.rows.push_back({i64(n), i64(k), v});
      out.summary = {{"experiment", s.name}, {"type", to_string(s.type)}, {"expected_mistake", v}};
      return out;
    }
    case ExperimentType::ExpectedExcess: {
      ExperimentResult out;
      out.table.columns = {"n", "k", "mean_excess", "stderr"};
      for (std::size_t n : s.n) {
        const std::size_t k = s.rule.k_for(n);
        const ExcessEstimate e = estimate_expected_excess(dist, n, k, excess_config(s, seed));
        out.table.rows.push_back({i64(n), i64(k), e.mean, e.stderr_});
      }
      out.summary = {{"experiment", s.name},
                     {"type", to_string(s.type)},
                     {"trials", i64(s.trials)},
                     {"bayes_risk", dist.bayes_risk()}};
      return out;
    }
    case ExperimentType::PointwiseExcess: {
      const std::size_t n = s.n.front();
      const std::size_t k = s.rule.k_for(n);
      const Point x = dist.is_interval() ? Point{s.x} : Point{AtomId{static_cast<std::size_t>(s.x)}};
      const ExcessEstimate e = estimate_pointwise_excess(dist, x, n, k, excess_config(s, seed));
      ExperimentResult out;
      out.table.columns = {"x", "n", "k", "mean_excess", "stderr"};
      out.table.rows.push_back({point_cell(x), i64(n), i64(k), e.mean, e.stderr_});
      out.summary = {{"experiment", s.name}, {"type", to_string(s.type)}, {"eta_x", dist.eta_point(x)}};
      return out;
    }
    case ExperimentType::RateSweep: {
      const RateSweep r = rate_sweep(dist, s.n, s.rule, excess_config(s, seed));
      ExperimentResult out;
      out.table.columns = {"n", "k", "mean_excess", "stderr"};
      std::string excluded;
      for (const auto& pt : r.points) {
        out.table.rows.push_back({i64(pt.n), i64(pt.k), pt.mean_excess, pt.stderr_});
        if (pt.excluded) excluded += (excluded.empty() ? "" : ";") + std::to_string(pt.n);
      }
      out.summary = {{"experiment", s.name},  {"type", to_string(s.type)}, {"k_rule", s.rule.describe()},
                     {"slope", r.slope},      {"intercept", r.intercept},  {"fitted", i64(r.fitted)},
                     {"excluded", excluded},  {"degenerate", std::int64_t{r.degenerate}}};
      return out;
    }
    case ExperimentType::Consistency: {
      const ConsistencySweep r = consistency_sweep(dist, s.n, s.rule, excess_config(s, seed));
      ExperimentResult out;
      out.table.columns = {"n", "k", "median_excess", "mean_excess"};
      for (const auto& pt : r.points) out.table.rows.push_back({i64(pt.n), i64(pt.k), pt.median_excess, pt.mean_excess});
      out.summary = {{"experiment", s.name},
                     {"type", to_string(s.type)},
                     {"k_rule", s.rule.describe()},
                     {"spearman", r.spearman},
                     {"strictly_decreasing", std::int64_t{r.strictly_decreasing}}};
      return out;
    }
    case ExperimentType::Boundary: {
      ExperimentResult out = analyze_boundary(dist, s.p, s.delta, s.probes);
      out.summary.insert(out.summary.begin(), {{"experiment", s.name}, {"type", to_string(s.type)}});
      return out;
    }
    case ExperimentType::HighError: {
      const std::size_t n = s.n.front();
      const std::size_t k = s.rule.k_for(n);
      const std::size_t count = probe_count(dist, s.probes);
      const auto verdicts = parallel_map<HighErrorVerdict>(
          count, [&](std::size_t i) { return high_error_classify(dist, probe_point(dist, i, s.probes), n, k); });
      ExperimentResult out;
      out.table.columns = {"x", "verdict", "side"};
      for (std::size_t i = 0; i < count; ++i) {
        out.table.rows.push_back(
            {point_cell(probe_point(dist, i, s.probes)), std::int64_t{verdicts[i].verdict}, to_string(verdicts[i].side)});
      }
      const MassQueryResult m = high_error_measure(dist, n, k);
      out.summary = {{"experiment", s.name}, {"type", to_string(s.type)}, {"n", i64(n)},
                     {"k", i64(k)},          {"high_error_measure", m.value}, {"error_bound", m.error_bound}};
      return out;
    }
  }
  throw ArgumentError("unhandled experiment type");
}

// ---------------------------------------------------------------------------
// Commands

namespace {

int classify_error(const std::exception& e) {
  if (dynamic_cast<const ResourceError*>(&e)) return kExitResource;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kExitIo;
  if (dynamic_cast<const Error*>(&e)) return kExitInvalid;
  if (dynamic_cast<const json::exception*>(&e)) return kExitInvalid;
  return kExitFailure;
}

int cmd_run(const std::string& config_path, const Overrides& ov, std::ostream& out, std::ostream& err) {
  const json doc = read_json_file(config_path);
  const RunConfig cfg = parse_run_config(doc, ov, fs::path(config_path).parent_path());

  fs::create_directories(cfg.output_dir);
  json manifest = {{"version", NNRATES_VERSION},
                   {"master_seed", cfg.seed},
                   {"config", cfg.echo},
                   {"workers", default_workers()},
                   {"started_at", utc_now()},
                   {"experiments", json::array()}};
  const fs::path manifest_path = cfg.output_dir / "manifest.json";
  auto write_manifest = [&] {
    std::ofstream m(manifest_path);
    if (!m) throw IoError("cannot write " + manifest_path.string());
    m << manifest.dump(2) << '\n';
    if (!m) throw IoError("write failed for " + manifest_path.string());
  };

  int status = kExitOk;
  for (const ExperimentSpec& s : cfg.experiments) {
    json entry = {{"name", s.name}, {"type", to_string(s.type)}};
    try {
      const ExperimentResult r = run_experiment(s, cfg.dist, cfg.seed);
      const fs::path report = cfg.output_dir / (s.name + extension(cfg.format));
      const fs::path summary = cfg.output_dir / (s.name + ".summary.txt");
      emit_report(r.table, r.summary, cfg.format, report);
      std::ofstream sm(summary);
      sm << summary_line(r.summary) << '\n';
      if (!sm) throw IoError("cannot write " + summary.string());
      out << summary_line(r.summary) << '\n';
      entry["status"] = "ok";
      entry["outputs"] = {report.string(), summary.string()};
      entry["summary"] = summary_json(r.summary);
    } catch (const std::exception& e) {
      entry["status"] = std::string("error: ") + e.what();
      manifest["experiments"].push_back(entry);
      manifest["finished_at"] = utc_now();
      write_manifest();
      err << "nnrates: experiment " << s.name << ": " << e.what() << '\n';
      status = classify_error(e);
      break;
    }
    manifest["experiments"].push_back(entry);
  }
  if (status == kExitOk) {
    manifest["finished_at"] = utc_now();
    manifest["outputs"] = json::array();
    for (const auto& e : manifest["experiments"]) {
      for (const auto& o : e["outputs"]) manifest["outputs"].push_back(o);
    }
    manifest["outputs"].push_back(manifest_path.string());
    write_manifest();
    out << manifest.dump(2) << '\n';
  }
  return status;
}

struct BoundArgs {
  std::string theorem;
  std::optional<std::size_t> n, k;
  std::optional<double> delta, alpha, L, beta, C, delta_star;
  double k_o = 1.0, C_o = 1.0;
  std::string dist_path;
  std::string format = "kv";
};

template <class T>
T need(const std::optional<T>& v, const char* flag, const std::string& theorem) {
  if (!v) throw ArgumentError("bounds eval --theorem " + theorem + " needs --" + flag);
  return *v;
}

Summary eval_bounds(const BoundArgs& a) {
  Summary s{{"theorem", a.theorem}};
  std::optional<DistributionInstance> dist;
  if (!a.dist_path.empty()) dist = load_distribution(a.dist_path);
  if (a.theorem == "1") {
    const std::size_t n = need(a.n, "n", a.theorem), k = need(a.k, "k", a.theorem);
    const double delta = need(a.delta, "delta", a.theorem);
    const TheoremOneParams t = theorem1_params(n, k, delta);
    s.insert(s.end(), {{"n", i64(n)}, {"k", i64(k)}, {"delta", delta}, {"p", t.p}, {"Delta", t.Delta},
                       {"gamma", t.gamma},
                       {"chernoff_ball", concentration_bound(ConcentrationKind::ChernoffBall, k, std::min(1.0, t.gamma))},
                       {"hoeffding_dev", concentration_bound(ConcentrationKind::HoeffdingDev, k, t.Delta)}});
    if (dist) {
      const ClampedBound b = misclassification_upper_bound(*dist, n, k, delta);
      s.insert(s.end(), {{"bound_raw", b.raw}, {"bound", b.clamped}});
    }
  } else if (a.theorem == "3") {
    const std::size_t k = need(a.k, "k", a.theorem);
    const LowerBoundConstants c = lower_bound_constants(k);
    s.insert(s.end(), {{"k", i64(k)}, {"c1", c.c1}, {"c2", c.c2}, {"c_o", c.c_o}});
    if (dist) {
      const std::size_t n = need(a.n, "n", a.theorem);
      const MassQueryResult m = high_error_measure(*dist, n, k);
      s.insert(s.end(), {{"n", i64(n)}, {"high_error_measure", m.value}, {"error_bound", m.error_bound},
                         {"lower_bound", c.c_o * m.value}});
    }
  } else if (a.theorem == "4") {
    const std::size_t n = need(a.n, "n", a.theorem);
    const SmoothnessSpec sm{need(a.alpha, "alpha", a.theorem), a.L.value_or(1.0)};
    const MarginSpec mg{need(a.beta, "beta", a.theorem), a.C.value_or(1.0)};
    const MarginRate r = margin_rate(n, a.delta, sm, mg, a.k_o, a.C_o);
    s.insert(s.end(), {{"n", i64(n)}, {"alpha", sm.alpha}, {"beta", mg.beta}, {"k_o", a.k_o}, {"C_o", a.C_o},
                       {"mode", to_string(r.mode)}, {"k", i64(r.k)}, {"bound", r.bound}});
    if (a.delta) s.insert(s.end(), {{"delta", *a.delta}});
    if (a.L && a.C) {
      const std::size_t k = a.k.value_or(r.k);
      if (k < n) {
        const double e = expected_risk_bound(n, k, sm, mg);
        s.insert(s.end(), {{"L", sm.L}, {"C", mg.C}, {"expected_risk_bound", e},
                           {"expected_risk_bound_clamped", std::min(1.0, e)}});
      }
    }
  } else if (a.theorem == "exp") {
    const SmoothnessSpec sm{need(a.alpha, "alpha", a.theorem), need(a.L, "L", a.theorem)};
    const double ds = need(a.delta_star, "delta_star", a.theorem);
    const std::size_t n = need(a.n, "n", a.theorem);
    const ExponentialRegime r = exponential_regime(ds, sm, n);
    s.insert(s.end(), {{"n", i64(n)}, {"delta_star", ds}, {"alpha", sm.alpha}, {"L", sm.L}, {"k", i64(r.k)},
                       {"delta", r.delta}, {"C_o", r.C_o}, {"bound", r.bound}});
    if (dist) s.insert(s.end(), {{"margin_mass", margin_mass(*dist, ds - 1e-12)}});
  } else if (a.theorem == "zero") {
    const std::size_t n = need(a.n, "n", a.theorem), k = need(a.k, "k", a.theorem);
    const double delta = need(a.delta, "delta", a.theorem);
    const double p = zero_bayes_params(n, k, delta);
    s.insert(s.end(), {{"n", i64(n)}, {"k", i64(k)}, {"delta", delta}, {"p", p}});
    if (dist && p <= 1.0) {
      const MassQueryResult m = boundary_measure(*dist, p, 0.5);
      s.insert(s.end(), {{"boundary_measure", m.value}, {"bound", delta + m.value + m.error_bound}});
    }
  } else {
    throw ArgumentError("--theorem must be one of 1, 3, 4, exp, zero");
  }
  return s;
}

void print_summary(const Summary& s, const std::string& format, std::ostream& out) {
  if (format == "kv") {
    for (const auto& [key, value] : s) out << key << '=' << format_cell(value) << '\n';
  } else if (format == "csv") {
    Table t;
    t.rows.emplace_back();
    for (const auto& [key, value] : s) {
      t.columns.push_back(key);
      t.rows.back().push_back(value);
    }
    write_csv(out, t);
  } else if (format == "json") {
    out << summary_json(s).dump(2) << '\n';
  } else {
    throw ArgumentError("format must be kv, csv or json");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"k-NN convergence-rate toolkit: bound evaluation, boundary analysis, experiments", "nnrates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NNRATES_VERSION);

  std::string config_path;
  Overrides ov;
  std::uint64_t seed_flag = 0;
  std::size_t trials_flag = 0, mc_flag = 0;
  std::string format_flag, out_dir_flag;
  auto* run = app.add_subcommand("run", "Run every experiment in a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  auto* seed_opt = run->add_option("--master_seed", seed_flag, "Override the config seed");
  auto* trials_opt = run->add_option("--trials", trials_flag, "Override every experiment's trial count");
  auto* mc_opt = run->add_option("--mc_points", mc_flag, "Override Monte Carlo query points");
  auto* fmt_opt = run->add_option("--format", format_flag, "Report format")->check(CLI::IsMember({"csv", "json"}));
  auto* dir_opt = run->add_option("--output_dir", out_dir_flag, "Output directory");

  BoundArgs b;
  auto* bounds = app.add_subcommand("bounds", "Closed-form bound evaluation");
  bounds->require_subcommand(1);
  auto* eval = bounds->add_subcommand("eval", "Evaluate one bound");
  eval->add_option("--theorem", b.theorem, "1 | 3 | 4 | exp | zero")
      ->required()
      ->check(CLI::IsMember({"1", "3", "4", "exp", "zero"}));
  eval->add_option("--n", b.n);
  eval->add_option("--k", b.k);
  eval->add_option("--delta", b.delta);
  eval->add_option("--alpha", b.alpha);
  eval->add_option("--L", b.L);
  eval->add_option("--beta", b.beta);
  eval->add_option("--C", b.C);
  eval->add_option("--k_o", b.k_o);
  eval->add_option("--C_o", b.C_o);
  eval->add_option("--delta_star", b.delta_star);
  eval->add_option("--dist", b.dist_path, "Distribution JSON file");
  eval->add_option("--format", b.format, "kv | csv | json")->check(CLI::IsMember({"kv", "csv", "json"}));

  std::string dist_path, analyze_format = "csv", analyze_dir;
  double p = 0.0, delta = 0.0;
  std::size_t probes = 101;
  auto* analyze = app.add_subcommand("analyze", "Distribution-side analyses");
  analyze->require_subcommand(1);
  auto* boundary = analyze->add_subcommand("boundary", "Classify probe points into interiors and boundary");
  boundary->add_option("--dist", dist_path, "Distribution JSON file")->required();
  boundary->add_option("--p", p)->required();
  boundary->add_option("--delta", delta)->required();
  boundary->add_option("--probes", probes, "Grid size on [0,1]");
  boundary->add_option("--format", analyze_format)->check(CLI::IsMember({"csv", "json"}));
  boundary->add_option("--output_dir", analyze_dir, "Write boundary.<fmt> here instead of stdout");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << NNRATES_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "nnrates: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (run->parsed()) {
      if (*seed_opt) ov.master_seed = seed_flag;
      if (*trials_opt) ov.trials = trials_flag;
      if (*mc_opt) ov.mc_points = mc_flag;
      if (*fmt_opt) ov.format = format_flag;
      if (*dir_opt) ov.output_dir = out_dir_flag;
      return cmd_run(config_path, ov, out, err);
    }
    if (eval->parsed()) {
      print_summary(eval_bounds(b), b.format, out);
      return kExitOk;
    }
    if (boundary->parsed()) {
      const DistributionInstance dist = load_distribution(dist_path);
      const ExperimentResult r = analyze_boundary(dist, p, delta, probes);
      const ReportFormat fmt = parse_format(analyze_format);
      if (analyze_dir.empty()) {
        if (fmt == ReportFormat::Csv) {
          write_csv(out, r.table);
        } else {
          out << report_json(r.table, r.summary).dump(2) << '\n';
        }
      } else {
        fs::create_directories(analyze_dir);
        emit_report(r.table, r.summary, fmt, fs::path(analyze_dir) / ("boundary" + extension(fmt)));
      }
      err << summary_line(r.summary) << '\n';
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "nnrates: " << e.what() << '\n';
    return classify_error(e);
  }
  return kExitInvalid;
}

}  // namespace nnrates
