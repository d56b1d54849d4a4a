#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nnrates/boundary.hpp"
#include "nnrates/bounds.hpp"
#include "nnrates/cli.hpp"
#include "nnrates/config.hpp"
#include "nnrates/errors.hpp"
#include "nnrates/harness.hpp"
#include "nnrates/presets.hpp"

namespace py = pybind11;
using namespace nnrates;

namespace {

// Atoms are addressed by integer index; 1-D families take floats.
Point to_point(const DistributionInstance& d, const py::handle& x) {
  if (d.is_interval()) return x.cast<double>();
  return AtomId{x.cast<std::size_t>()};
}

py::object from_point(const Point& p) {
  if (const auto* a = std::get_if<AtomId>(&p)) return py::int_(a->index);
  if (const auto* v = std::get_if<double>(&p)) return py::float_(*v);
  return py::cast(std::get<std::vector<double>>(p));
}

BallKind ball_kind(const std::string& s) {
  if (s == "open") return BallKind::Open;
  if (s == "closed") return BallKind::Closed;
  if (s == "augmented") return BallKind::Augmented;
  throw ArgumentError("kind must be open, closed or augmented");
}

QueryMode query_mode(const std::string& s) {
  if (s == "auto") return QueryMode::Auto;
  if (s == "monte_carlo") return QueryMode::MonteCarlo;
  throw ArgumentError("query must be auto or monte_carlo");
}

KRule k_rule(const py::object& rule) {
  if (py::isinstance<py::int_>(rule)) return KRule::fixed_k(rule.cast<std::size_t>());
  const auto s = rule.cast<std::string>();
  if (s == "sqrt") return KRule::sqrt_n();
  if (s.rfind("power:", 0) == 0) return KRule::power(std::stod(s.substr(6)));
  throw ArgumentError("k rule must be an int, 'sqrt' or 'power:<a>'");
}

py::dict trial_report(const TrialReport& r) {
  py::list rows;
  for (const auto& t : r.rows) rows.append(py::make_tuple(t.trial, t.mistake_prob, t.bound, t.violated));
  py::dict d;
  d["rows"] = rows;
  d["violations"] = r.violations;
  d["frequency"] = r.frequency;
  d["wilson"] = py::make_tuple(r.wilson.lo, r.wilson.hi);
  d["p"] = r.p;
  d["Delta"] = r.Delta;
  return d;
}

ExcessConfig excess_config(std::size_t trials, std::size_t mc_points, std::uint64_t seed, const std::string& query) {
  ExcessConfig c;
  c.trials = trials;
  c.mc_points = mc_points;
  c.master_seed = seed;
  c.query = query_mode(query);
  return c;
}

}  // namespace

PYBIND11_MODULE(_nnrates, m) {
  m.doc() = "k-NN convergence-rate toolkit";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<UndefinedValueError>(m, "UndefinedValueError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<DistributionInstance>(m, "Distribution")
      .def_property_readonly("family", [](const DistributionInstance& d) { return to_string(d.family()); })
      .def("ball_mass",
           [](const DistributionInstance& d, py::handle x, double r, const std::string& kind) {
             return d.ball_mass(to_point(d, x), r, ball_kind(kind)).value;
           },
           py::arg("x"), py::arg("r"), py::arg("kind") = "closed")
      .def("prob_radius", [](const DistributionInstance& d, py::handle x, double p) { return d.prob_radius(to_point(d, x), p); })
      .def("eta", [](const DistributionInstance& d, py::handle x) { return d.eta_point(to_point(d, x)); })
      .def("eta_ball",
           [](const DistributionInstance& d, py::handle x, double r, const std::string& kind, double z_cut) {
             return d.eta_ball(to_point(d, x), r, ball_kind(kind), z_cut).value;
           },
           py::arg("x"), py::arg("r"), py::arg("kind") = "closed", py::arg("z_cut") = 0.0)
      .def("in_support", [](const DistributionInstance& d, py::handle x) { return d.in_support(to_point(d, x)); })
      .def("bayes_risk", &DistributionInstance::bayes_risk)
      .def("sample",
           [](const DistributionInstance& d, std::uint64_t seed, std::size_t n) {
             py::list out;
             for (const auto& s : d.sample_labeled(seed, n))
               out.append(py::make_tuple(from_point(s.point.location), s.point.z, s.label));
             return out;
           },
           py::arg("seed"), py::arg("n"));

  m.def("disjoint_support", &presets::disjoint_support);
  m.def("two_pure_atoms", &presets::two_pure_atoms);
  m.def("gapped_two_level", &presets::gapped_two_level);
  m.def("constant_eta", &presets::constant_eta, py::arg("eta"));
  m.def("power_margin", &DistributionInstance::power_margin, py::arg("gamma") = 1.0);
  m.def(
      "piecewise_uniform",
      [](std::vector<double> b0, std::vector<double> h0, std::vector<double> b1, std::vector<double> h1, double prior1) {
        return DistributionInstance::piecewise_uniform({std::move(b0), std::move(h0)}, {std::move(b1), std::move(h1)},
                                                       prior1);
      },
      py::arg("breaks0"), py::arg("heights0"), py::arg("breaks1"), py::arg("heights1"), py::arg("prior1"));
  m.def(
      "finite_atomic",
      [](const std::vector<std::vector<double>>& distances, std::vector<double> mass, std::vector<double> eta) {
        std::vector<double> flat;
        for (const auto& row : distances) {
          if (row.size() != distances.size()) throw ArgumentError("distance matrix must be square");
          flat.insert(flat.end(), row.begin(), row.end());
        }
        return DistributionInstance::finite_atomic(
            MetricSpace::finite(DistanceMatrix(distances.size(), std::move(flat))), std::move(mass), std::move(eta));
      },
      py::arg("distances"), py::arg("mass"), py::arg("eta"));
  m.def("load_distribution", [](const std::string& path) { return load_distribution(path); });

  // boundary analysis
  m.def("region_classify", [](const DistributionInstance& d, py::handle x, double p, double delta) {
    const RegionVerdict v = region_classify(d, to_point(d, x), p, delta);
    return py::make_tuple(to_string(v.verdict), v.binding_radius ? py::cast(*v.binding_radius) : py::none());
  });
  m.def("boundary_measure", [](const DistributionInstance& d, double p, double delta) {
    const auto r = boundary_measure(d, p, delta);
    return py::make_tuple(r.value, r.error_bound);
  });
  m.def("high_error_classify", [](const DistributionInstance& d, py::handle x, std::size_t n, std::size_t k) {
    const HighErrorVerdict v = high_error_classify(d, to_point(d, x), n, k);
    return py::make_tuple(v.verdict, to_string(v.side));
  });
  m.def("high_error_measure", [](const DistributionInstance& d, std::size_t n, std::size_t k) {
    const auto r = high_error_measure(d, n, k);
    return py::make_tuple(r.value, r.error_bound);
  });
  m.def("margin_mass", &margin_mass, py::arg("dist"), py::arg("t"));

  // closed-form bounds
  m.def("theorem1_params", [](std::size_t n, std::size_t k, double delta) {
    const auto t = theorem1_params(n, k, delta);
    py::dict d;
    d["p"] = t.p;
    d["Delta"] = t.Delta;
    d["gamma"] = t.gamma;
    return d;
  });
  m.def("misclassification_upper_bound", [](const DistributionInstance& d, std::size_t n, std::size_t k, double delta) {
    const auto b = misclassification_upper_bound(d, n, k, delta);
    return py::make_tuple(b.raw, b.clamped);
  });
  m.def("smooth_thresholds", [](double alpha, double L, double p, double delta, std::size_t n, std::size_t k) {
    const auto t = smooth_thresholds({alpha, L}, p, delta, n, k);
    return py::make_tuple(t.upper_band, t.lower_band);
  });
  m.def(
      "margin_rate",
      [](std::size_t n, std::optional<double> delta, double alpha, double L, double beta, double C, double k_o,
         double C_o) {
        const auto r = margin_rate(n, delta, {alpha, L}, {beta, C}, k_o, C_o);
        return py::make_tuple(r.k, r.bound, to_string(r.mode));
      },
      py::arg("n"), py::arg("delta") = py::none(), py::arg("alpha") = 1.0, py::arg("L") = 1.0, py::arg("beta") = 1.0,
      py::arg("C") = 1.0, py::arg("k_o") = 1.0, py::arg("C_o") = 1.0);
  m.def("expected_risk_bound",
        [](std::size_t n, std::size_t k, double alpha, double L, double beta, double C) {
          return expected_risk_bound(n, k, {alpha, L}, {beta, C});
        },
        py::arg("n"), py::arg("k"), py::arg("alpha"), py::arg("L"), py::arg("beta"), py::arg("C"));
  m.def("pointwise_risk_bound", &pointwise_risk_bound, py::arg("k"), py::arg("delta_x"), py::arg("delta_o"));
  m.def("exponential_regime", [](double delta_star, double alpha, double L, std::size_t n) {
    const auto e = exponential_regime(delta_star, {alpha, L}, n);
    py::dict d;
    d["k"] = e.k;
    d["delta"] = e.delta;
    d["C_o"] = e.C_o;
    d["bound"] = e.bound;
    return d;
  });
  m.def("zero_bayes_params", &zero_bayes_params, py::arg("n"), py::arg("k"), py::arg("delta"));
  m.def(
      "binomial_tail",
      [](std::uint64_t n, double q, std::uint64_t l, const std::string& direction) {
        if (direction != "ge" && direction != "le") throw ArgumentError("direction must be ge or le");
        return binomial_tail(n, q, l, direction == "ge" ? TailDirection::GreaterEqual : TailDirection::LessEqual);
      },
      py::arg("n"), py::arg("q"), py::arg("l"), py::arg("direction") = "ge");
  m.def("normal_cdf", &normal_cdf);
  m.def("slud_bound", [](std::uint64_t n, double q, std::uint64_t l) {
    const auto s = slud_bound(n, q, l);
    return py::make_tuple(s.bound, to_string(s.clause));
  });
  m.def("lower_bound_constants", [](std::size_t k) {
    const auto c = lower_bound_constants(k);
    return py::make_tuple(c.c1, c.c2, c.c_o);
  });
  m.def("concentration_bound", [](const std::string& kind, std::size_t k, double x) {
    if (kind == "chernoff_ball") return concentration_bound(ConcentrationKind::ChernoffBall, k, x);
    if (kind == "hoeffding_dev") return concentration_bound(ConcentrationKind::HoeffdingDev, k, x);
    throw ArgumentError("kind must be chernoff_ball or hoeffding_dev");
  });

  // experiments
  m.def("exact_expected_mistake", &exact_expected_mistake, py::arg("dist"), py::arg("n"), py::arg("k"),
        py::arg("max_states") = 1000000);
  m.def(
      "run_upper_bound_trials",
      [](const DistributionInstance& d, std::size_t n, std::size_t k, double delta, std::size_t trials,
         std::uint64_t seed, bool zero_bayes) {
        TrialConfig c;
        c.n = n;
        c.k = k;
        c.delta = delta;
        c.trials = trials;
        c.master_seed = seed;
        TrialReport r;
        {
          py::gil_scoped_release release;
          r = zero_bayes ? run_zero_bayes_trials(d, c) : run_upper_bound_trials(d, c);
        }
        return trial_report(r);
      },
      py::arg("dist"), py::arg("n"), py::arg("k"), py::arg("delta"), py::arg("trials") = 400, py::arg("seed") = 0,
      py::arg("zero_bayes") = false);
  m.def(
      "estimate_expected_excess",
      [](const DistributionInstance& d, std::size_t n, std::size_t k, std::size_t trials, std::size_t mc_points,
         std::uint64_t seed, const std::string& query) {
        const ExcessConfig c = excess_config(trials, mc_points, seed, query);
        py::gil_scoped_release release;
        const ExcessEstimate e = estimate_expected_excess(d, n, k, c);
        return std::make_pair(e.mean, e.stderr_);
      },
      py::arg("dist"), py::arg("n"), py::arg("k"), py::arg("trials") = 400, py::arg("mc_points") = 2000,
      py::arg("seed") = 0, py::arg("query") = "auto");
  m.def(
      "rate_sweep",
      [](const DistributionInstance& d, const std::vector<std::size_t>& n_grid, py::object rule, std::size_t trials,
         std::uint64_t seed) {
        const KRule kr = k_rule(rule);
        const ExcessConfig c = excess_config(trials, 2000, seed, "auto");
        RateSweep r;
        {
          py::gil_scoped_release release;
          r = rate_sweep(d, n_grid, kr, c);
        }
        py::dict out;
        py::list pts;
        for (const auto& p : r.points) pts.append(py::make_tuple(p.n, p.k, p.mean_excess, p.stderr_, p.excluded));
        out["points"] = pts;
        out["slope"] = r.slope;
        out["intercept"] = r.intercept;
        out["degenerate"] = r.degenerate;
        return out;
      },
      py::arg("dist"), py::arg("n_grid"), py::arg("k_rule"), py::arg("trials") = 400, py::arg("seed") = 0);
  m.def(
      "consistency_sweep",
      [](const DistributionInstance& d, const std::vector<std::size_t>& n_grid, py::object rule, std::size_t trials,
         std::uint64_t seed) {
        const KRule kr = k_rule(rule);
        const ExcessConfig c = excess_config(trials, 2000, seed, "auto");
        ConsistencySweep r;
        {
          py::gil_scoped_release release;
          r = consistency_sweep(d, n_grid, kr, c);
        }
        py::dict out;
        py::list pts;
        for (const auto& p : r.points) pts.append(py::make_tuple(p.n, p.k, p.median_excess, p.mean_excess));
        out["points"] = pts;
        out["spearman"] = r.spearman;
        out["strictly_decreasing"] = r.strictly_decreasing;
        return out;
      },
      py::arg("dist"), py::arg("n_grid"), py::arg("k_rule") = py::str("sqrt"), py::arg("trials") = 400,
      py::arg("seed") = 0);
  m.def(
      "run_lower_bound_check",
      [](const DistributionInstance& d, std::size_t n, std::size_t k, std::size_t max_trials, std::uint64_t seed) {
        LowerBoundBudget b;
        b.max_trials = max_trials;
        b.min_trials = std::min(b.min_trials, max_trials);
        b.batch = std::min(b.batch, max_trials);
        LowerBoundCheck c;
        {
          py::gil_scoped_release release;
          c = run_lower_bound_check(d, n, k, b, seed);
        }
        py::dict out;
        out["lhs"] = c.lhs;
        out["lhs_stderr"] = c.lhs_stderr;
        out["rhs"] = c.rhs;
        out["trials"] = c.trials;
        out["exact"] = c.exact;
        out["precision_met"] = c.precision_met;
        out["pass"] = c.pass;
        return out;
      },
      py::arg("dist"), py::arg("n"), py::arg("k"), py::arg("max_trials") = 400000, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
