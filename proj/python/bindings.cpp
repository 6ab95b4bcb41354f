#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>

#include "supportest/chebyshev.hpp"
#include "supportest/error.hpp"
#include "supportest/estimators.hpp"
#include "supportest/harness.hpp"
#include "supportest/ingest.hpp"
#include "supportest/synth.hpp"
#include "supportest/theory.hpp"

namespace py = pybind11;
using namespace supportest;

namespace {

EstimatorConfig make_config(double c0, double c1, std::optional<int> degree) {
  EstimatorConfig cfg;
  cfg.c0 = c0;
  cfg.c1 = c1;
  cfg.override_degree = degree;
  return cfg;
}

TokenizerConfig make_tokenizer(const std::string& encoding, bool case_fold, bool strip_punctuation) {
  TokenizerConfig cfg;
  cfg.encoding = parse_encoding(encoding);
  cfg.case_fold = case_fold;
  cfg.strip_punctuation = strip_punctuation;
  return cfg;
}

py::dict sweep_row_dict(const SweepRow& row) {
  py::dict d;
  d["estimator"] = row.estimator;
  d["n"] = row.n;
  d["mean_estimate"] = row.mean_estimate;
  d["rmse"] = row.rmse;
  d["std_dev"] = row.std_dev;
  d["trials"] = row.trials;
  d["undefined_count"] = row.undefined_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Support-size estimation: estimators, samplers, sweeps and lower-bound tools";

  // The base class is registered first so that pybind11, which tries the
  // most recent translator first, maps each library error to its subclass.
  static py::exception<Error> base(m, "Error");
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<DecodeError>(m, "DecodeError", base.ptr());
  py::register_exception<EmptyInputError>(m, "EmptyInputError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<DegenerateDegreeError>(m, "DegenerateDegreeError", base.ptr());
  py::register_exception<UndefinedEstimatorError>(m, "UndefinedEstimatorError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<PrecisionError>(m, "PrecisionError", base.ptr());
  py::register_exception<InternalError>(m, "InternalError", base.ptr());

  py::class_<Fingerprint>(m, "Fingerprint")
      .def(py::init(&Fingerprint::from_counts), py::arg("counts"),
           "Build from a {multiplicity j: number of symbols h_j} mapping.")
      .def_property_readonly("counts", &Fingerprint::counts)
      .def_property_readonly("n", &Fingerprint::n)
      .def_property_readonly("distinct", &Fingerprint::distinct)
      .def("__getitem__", &Fingerprint::at)
      .def("__eq__", [](const Fingerprint& a, const Fingerprint& b) { return a == b; })
      .def("__repr__", [](const Fingerprint& fp) {
        return "<Fingerprint n=" + std::to_string(fp.n()) + " distinct=" + std::to_string(fp.distinct()) + ">";
      });

  m.def(
      "fingerprint_text",
      [](const std::string& text, const std::string& encoding, bool case_fold, bool strip_punctuation) {
        return fingerprint_of(build_histogram(tokenize(text, make_tokenizer(encoding, case_fold, strip_punctuation))));
      },
      py::arg("text"), py::arg("encoding") = "utf-8", py::arg("case_fold") = true,
      py::arg("strip_punctuation") = true);
  m.def("parse_fingerprint", &parse_fingerprint, py::arg("text"));
  m.def("format_fingerprint", &format_fingerprint, py::arg("fingerprint"));

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("rounded", &Estimate::rounded)
      .def_readonly("estimator", &Estimate::estimator)
      .def_readonly("n", &Estimate::n)
      .def_readonly("k", &Estimate::k)
      .def_readonly("L", &Estimate::degree)
      .def_readonly("l", &Estimate::l)
      .def_readonly("r", &Estimate::r)
      .def("__repr__", [](const Estimate& e) { return "<Estimate " + e.estimator + "=" + std::to_string(e.value) + ">"; });

  m.def(
      "estimate",
      [](const Fingerprint& fp, const std::string& estimator, std::optional<double> k, double c0, double c1,
         std::optional<int> degree, double et_t, int et_J, double gtoulmin_t, bool clamp) {
        EstimatorSpec spec;
        spec.kind = parse_estimator(estimator);
        spec.k = k;
        spec.config = make_config(c0, c1, degree);
        spec.et_t = et_t;
        spec.et_J = et_J;
        spec.gtoulmin_t = gtoulmin_t;
        const Estimate e = evaluate(spec, fp);
        return clamp ? clamp_estimate(e, fp) : e;
      },
      py::arg("fingerprint"), py::arg("estimator") = "wy", py::arg("k") = py::none(), py::arg("c0") = 0.45,
      py::arg("c1") = 0.5, py::arg("degree") = py::none(), py::arg("et_t") = 1.0, py::arg("et_J") = 10,
      py::arg("gtoulmin_t") = 1.0, py::arg("clamp") = false);

  m.def(
      "degree_params",
      [](double k, double n, double c0, double c1, std::optional<int> degree) {
        const DegreeParams p = degree_params(k, n, make_config(c0, c1, degree));
        return py::make_tuple(p.degree, p.l, p.r);
      },
      py::arg("k"), py::arg("n"), py::arg("c0") = 0.45, py::arg("c1") = 0.5, py::arg("degree") = py::none(),
      "Return (L, l, r).");

  m.def(
      "coefficients",
      [](int degree, double l, double r, double n) {
        const CoefficientTable t = g_table(degree, l, r, n);
        return py::make_tuple(t.a, t.g);
      },
      py::arg("degree"), py::arg("l"), py::arg("r"), py::arg("n"), "Return (a, g) for P_L on [l, r].");

  m.def(
      "family_masses", [](const std::string& spec) {
        const auto p = make_family(spec);
        return std::vector<double>(p.masses().begin(), p.masses().end());
      },
      py::arg("spec"));
  m.def(
      "sample",
      [](const std::string& spec, double n, std::uint64_t seed, bool poissonized) {
        const auto p = make_family(spec);
        if (poissonized) return fingerprint_of(sample_poissonized(p, n, seed));
        if (!(n >= 0.0) || n != static_cast<double>(static_cast<std::uint64_t>(n))) {
          throw ParameterError("fixed-n sampling needs a nonnegative integer n");
        }
        return fingerprint_of(sample_iid(p, static_cast<std::uint64_t>(n), seed));
      },
      py::arg("family"), py::arg("n"), py::arg("seed") = 0, py::arg("poissonized") = false);

  m.def(
      "run_sweep",
      [](const std::string& family, const std::vector<Count>& n_grid, const std::vector<std::string>& estimators,
         int trials, std::uint64_t seed, const std::string& sampling, std::optional<double> k, double c0,
         double c1, unsigned threads) {
        SweepSpec s;
        s.family = family;
        s.n_grid = n_grid;
        s.estimators = estimators;
        s.trials = trials;
        s.seed = seed;
        s.sampling = parse_sampling(sampling);
        s.k = k;
        s.config = make_config(c0, c1, std::nullopt);
        s.threads = threads;
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(s);
        }
        py::list out;
        for (const auto& row : rows) out.append(sweep_row_dict(row));
        return out;
      },
      py::arg("family"), py::arg("n_grid"), py::arg("estimators") = std::vector<std::string>{"wy", "plugin"},
      py::arg("trials") = 50, py::arg("seed") = 0, py::arg("sampling") = "iid", py::arg("k") = py::none(),
      py::arg("c0") = 0.45, py::arg("c1") = 0.5, py::arg("threads") = 0u);

  m.def(
      "probe",
      [](const std::string& family, double epsilon, const std::string& estimator, double delta, int trials,
         std::uint64_t seed, std::optional<Count> ceiling) {
        ProbeSpec s;
        s.family = family;
        s.epsilon = epsilon;
        s.estimator = estimator;
        s.delta = delta;
        s.trials = trials;
        s.seed = seed;
        s.ceiling = ceiling;
        ProbeResult r;
        {
          py::gil_scoped_release release;
          r = probe_sample_complexity(s);
        }
        py::dict d;
        d["n_star"] = r.n_star;
        d["k"] = r.k;
        d["ceiling_reached"] = r.ceiling_reached;
        d["ceiling"] = r.ceiling;
        d["failure_rate"] = r.failure_rate;
        d["wilson"] = py::make_tuple(r.wilson_low, r.wilson_high);
        d["evaluations"] = r.evaluations;
        return d;
      },
      py::arg("family"), py::arg("epsilon"), py::arg("estimator") = "wy", py::arg("delta") = 0.1,
      py::arg("trials") = 100, py::arg("seed") = 0, py::arg("ceiling") = py::none());

  py::class_<ApproxResult>(m, "ApproxResult")
      .def_readonly("degree", &ApproxResult::degree)
      .def_readonly("a", &ApproxResult::a)
      .def_readonly("b", &ApproxResult::b)
      .def_readonly("error", &ApproxResult::error)
      .def_readonly("extrema", &ApproxResult::extrema)
      .def_readonly("cheb_coeffs", &ApproxResult::cheb_coeffs)
      .def_readonly("iterations", &ApproxResult::iterations)
      .def("__call__", &ApproxResult::evaluate);
  m.def("best_inv_approx", &best_inv_approx, py::arg("degree"), py::arg("a"), py::arg("b"),
        py::arg("max_iterations") = 100);
  m.def("closed_form_error", &closed_form_error, py::arg("L"), py::arg("a"), py::arg("b"));
  m.def("primal_value", &primal_value, py::arg("L"), py::arg("a"), py::arg("b"), py::arg("grid_size"));

  py::class_<DiscretePrior>(m, "DiscretePrior")
      .def_readonly("atoms", &DiscretePrior::atoms)
      .def_readonly("weights", &DiscretePrior::weights)
      .def("moment", &DiscretePrior::moment);
  py::class_<PriorPair>(m, "PriorPair")
      .def_readonly("u", &PriorPair::u)
      .def_readonly("u_prime", &PriorPair::u_prime)
      .def_readonly("L", &PriorPair::L)
      .def_readonly("nu", &PriorPair::nu)
      .def_readonly("lam", &PriorPair::lambda)
      .def_readonly("gap", &PriorPair::gap);
  m.def("prior_pair", &construct_prior_pair, py::arg("L"), py::arg("nu"), py::arg("lam"));
  m.def(
      "tv_exact",
      [](const PriorPair& pair, double scale, std::optional<int> cutoff) {
        const TvEstimate t = cutoff ? tv_exact(pair, scale, *cutoff) : tv_exact(pair, scale);
        return py::make_tuple(t.lower, t.upper);
      },
      py::arg("pair"), py::arg("scale"), py::arg("cutoff") = py::none(), "Return (lower, upper) bounds on TV.");
  m.def("tv_bound", [](double Lambda, int L) { return tv_bound(Lambda, L).value; }, py::arg("Lambda"),
        py::arg("L"));

  py::class_<Certificate>(m, "Certificate")
      .def_readonly("valid", &Certificate::valid)
      .def_readonly("lhs", &Certificate::lhs)
      .def_readonly("gap", &Certificate::gap)
      .def_readonly("implied_epsilon", &Certificate::implied_epsilon)
      .def_readonly("meets_target", &Certificate::meets_target);
  m.def("lecam_certificate", &lecam_certificate, py::arg("k"), py::arg("n"), py::arg("epsilon"), py::arg("L"),
        py::arg("lam"), py::arg("nu"), py::arg("alpha"));
  m.def(
      "lower_bound_recipe",
      [](double k, double epsilon, double c0, double gamma, double C) {
        const LowerBoundRecipe r = lower_bound_recipe(k, epsilon, c0, gamma, C);
        py::dict d;
        d["L"] = r.L;
        d["lam"] = r.lambda;
        d["nu"] = r.nu;
        d["alpha"] = r.alpha;
        d["n"] = r.n;
        return d;
      },
      py::arg("k"), py::arg("epsilon"), py::arg("c0"), py::arg("gamma"), py::arg("C"));
  m.def("recipe_max_constant", &recipe_max_constant, py::arg("c0"), py::arg("gamma"));
  m.def(
      "max_exp_cheby",
      [](double beta, int L) {
        const ExpChebyMax r = max_exp_cheby(beta, L);
        return py::make_tuple(r.x_star, r.value);
      },
      py::arg("beta"), py::arg("L"), "Return (x*, max) of e^{-beta x} T_L(x) over x >= 1.");
  m.def("rate_envelope", &rate_envelope, py::arg("k"), py::arg("n"));
}
