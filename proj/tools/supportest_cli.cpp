// Command-line front end: estimation, simulation sweeps, sample-complexity
// probes, coefficient dumps and the lower-bound laboratory.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "supportest/chebyshev.hpp"
#include "supportest/error.hpp"
#include "supportest/estimators.hpp"
#include "supportest/harness.hpp"
#include "supportest/ingest.hpp"
#include "supportest/synth.hpp"
#include "supportest/theory.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace supportest;

struct Globals {
  std::uint64_t seed = 0;
  std::string output = "-";
  std::string format;
};

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// A flat JSON object as a two-line CSV (header, values).
std::string record_csv(const Json& rec) {
  std::string header;
  std::string values;
  for (auto it = rec.begin(); it != rec.end(); ++it) {
    if (it->is_structured()) {
      throw ParameterError("field '" + it.key() + "' is not a scalar; use --format json");
    }
    if (!header.empty()) {
      header += ',';
      values += ',';
    }
    header += it.key();
    if (it->is_null()) continue;
    if (it->is_string()) {
      values += it->get<std::string>();
    } else if (it->is_number_float()) {
      values += format_double(it->get<double>());
    } else {
      values += it->dump();
    }
  }
  return header + "\n" + values + "\n";
}

void emit_record(const Json& rec, const Globals& g) {
  const std::string fmt = g.format.empty() ? "json" : g.format;
  write_text(fmt == "csv" ? record_csv(rec) : rec.dump() + "\n", g.output);
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Count> parse_grid(const std::string& text) {
  std::vector<Count> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(v >= 1.0) || v != std::floor(v)) {
      throw ParameterError("sample-size grid entries must be positive integers, got '" + item + "'");
    }
    grid.push_back(static_cast<Count>(v));
  }
  if (grid.empty()) throw ParameterError("sample-size grid is empty");
  return grid;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Options shared by every command that evaluates estimators.
struct EstimatorOptions {
  double c0 = 0.45;
  double c1 = 0.5;
  std::optional<int> degree;
  double et_t = 1.0;
  int et_J = 10;
  double gtoulmin_t = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--c0", c0, "Degree constant: L = floor(c0 ln k)")->capture_default_str();
    app->add_option("--c1", c1, "Interval constant: r = c1 ln k / n")->capture_default_str();
    app->add_option("--degree", degree, "Override the polynomial degree L");
    app->add_option("--et-t", et_t, "Efron-Thisted extrapolation ratio t")->capture_default_str();
    app->add_option("--et-J", et_J, "Efron-Thisted truncation J")->capture_default_str();
    app->add_option("--gtoulmin-t", gtoulmin_t, "Good-Toulmin extrapolation ratio t")->capture_default_str();
  }
  EstimatorConfig config() const {
    EstimatorConfig cfg;
    cfg.c0 = c0;
    cfg.c1 = c1;
    cfg.override_degree = degree;
    return cfg;
  }
};

struct TokenOptions {
  std::string encoding = "utf-8";
  bool keep_case = false;
  bool keep_punctuation = false;

  void attach(CLI::App* app) {
    app->add_option("--encoding", encoding, "utf-8, ascii or latin1")->capture_default_str();
    app->add_flag("--keep-case", keep_case, "Do not fold case");
    app->add_flag("--keep-punctuation", keep_punctuation, "Do not strip punctuation");
  }
  TokenizerConfig config() const {
    TokenizerConfig cfg;
    cfg.encoding = parse_encoding(encoding);
    cfg.case_fold = !keep_case;
    cfg.strip_punctuation = !keep_punctuation;
    return cfg;
  }
};

Fingerprint load_fingerprint(const std::string& path, bool is_fingerprint, const TokenOptions& tok) {
  if (is_fingerprint) return parse_fingerprint(read_input(path));
  if (path == "-") return fingerprint_stream(std::cin, tok.config());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return fingerprint_stream(in, tok.config());
}

Json estimate_json(const Estimate& e) {
  Json j;
  j["estimator"] = e.estimator;
  j["value"] = e.value;
  j["rounded"] = e.rounded;
  j["n"] = e.n;
  j["k"] = optional_json(e.k);
  j["L"] = e.degree ? Json(*e.degree) : Json(nullptr);
  j["l"] = optional_json(e.l);
  j["r"] = optional_json(e.r);
  return j;
}

Json prior_json(const DiscretePrior& p) {
  Json j;
  j["atoms"] = p.atoms;
  j["weights"] = p.weights;
  return j;
}

void print_error(const std::string& kind, const std::string& message) {
  Json err;
  err["error"] = kind;
  err["message"] = message;
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Support-size estimation from samples, with simulation and lower-bound tools"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file ([section] per subcommand)");

  Globals g;
  app.add_option("--seed", g.seed, "Master seed for every random draw")->capture_default_str();
  app.add_option("--output,-o", g.output, "Output path, '-' for stdout")->capture_default_str();
  app.add_option("--format", g.format, "csv or json (default depends on the command)")
      ->check(CLI::IsMember({"csv", "json"}));

  // estimate ---------------------------------------------------------------
  auto* est = app.add_subcommand("estimate", "Estimate the support size of a token file or fingerprint file");
  std::string est_input;
  bool est_is_fp = false;
  std::optional<double> est_k;
  std::string est_name = "wy";
  bool est_clamp = false;
  bool est_round = false;
  EstimatorOptions est_opts;
  TokenOptions est_tok;
  est->add_option("input", est_input, "Token file, fingerprint file with --fingerprint, or '-'")->required();
  est->add_flag("--fingerprint", est_is_fp, "Input holds 'j h_j' lines instead of text");
  est->add_option("--k", est_k, "Reciprocal of the minimum nonzero mass (required by wy)");
  est->add_option("--estimator", est_name, "wy, plugin, gt, cl1, cl2, et, gtoulmin")->capture_default_str();
  est->add_flag("--clamp", est_clamp, "Restrict the value to [plug-in, k]");
  est->add_flag("--round", est_round, "Report the rounded value as the value");
  est_opts.attach(est);
  est_tok.attach(est);

  // fingerprint ------------------------------------------------------------
  auto* fpc = app.add_subcommand("fingerprint", "Tokenize a text file and write its fingerprint");
  std::string fp_input;
  TokenOptions fp_tok;
  fpc->add_option("input", fp_input, "Token file or '-'")->required();
  fp_tok.attach(fpc);

  // simulate ---------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Monte Carlo sweep over a sample-size grid");
  std::string sim_family;
  std::string sim_grid;
  std::string sim_estimators = "wy,plugin";
  std::string sim_sampling = "iid";
  int sim_trials = 50;
  std::optional<double> sim_k;
  unsigned sim_threads = 0;
  EstimatorOptions sim_opts;
  sim->add_option("--family", sim_family, "uniform:k=..., zipf:k=...,alpha=..., mixture:k=...")->required();
  sim->add_option("--n", sim_grid, "Comma-separated, strictly increasing sample sizes")->required();
  sim->add_option("--estimators", sim_estimators, "Comma-separated estimator names")->capture_default_str();
  sim->add_option("--sampling", sim_sampling, "iid or poissonized")->capture_default_str();
  sim->add_option("--trials", sim_trials, "Trials per grid point")->capture_default_str();
  sim->add_option("--k", sim_k, "Estimator k (defaults to 1/min mass of the family)");
  sim->add_option("--threads", sim_threads, "Worker threads, 0 = all cores")->capture_default_str();
  sim_opts.attach(sim);

  // probe ------------------------------------------------------------------
  auto* probe = app.add_subcommand("probe", "Smallest n with P[|S_hat - S| >= eps k] <= delta");
  ProbeSpec ps;
  std::string probe_sampling = "poissonized";
  std::optional<Count> probe_ceiling;
  EstimatorOptions probe_opts;
  probe->add_option("--family", ps.family, "Distribution family spec")->required();
  probe->add_option("--epsilon", ps.epsilon, "Accuracy as a fraction of k")->required();
  probe->add_option("--delta", ps.delta, "Allowed failure probability")->capture_default_str();
  probe->add_option("--trials", ps.trials, "Trials per search point")->capture_default_str();
  probe->add_option("--estimator", ps.estimator, "Estimator name")->capture_default_str();
  probe->add_option("--sampling", probe_sampling, "iid or poissonized")->capture_default_str();
  probe->add_option("--ceiling", probe_ceiling, "Search ceiling (default 10 k ln k)");
  probe->add_option("--threads", ps.threads, "Worker threads, 0 = all cores")->capture_default_str();
  probe_opts.attach(probe);

  // coeffs -----------------------------------------------------------------
  auto* coeffs = app.add_subcommand("coeffs", "Dump j, a_j, g_j for one (L, l, r, n)");
  std::optional<double> co_k;
  std::optional<double> co_l;
  std::optional<double> co_r;
  double co_n = 0.0;
  EstimatorOptions co_opts;
  coeffs->add_option("--n", co_n, "Sample size")->required();
  coeffs->add_option("--k", co_k, "Derive L, l, r from k and the constants");
  coeffs->add_option("--l", co_l, "Left end of the interval (with --r and --degree)");
  coeffs->add_option("--r", co_r, "Right end of the interval");
  co_opts.attach(coeffs);

  // theory -----------------------------------------------------------------
  auto* theory = app.add_subcommand("theory", "Lower-bound laboratory");
  theory->require_subcommand(1);

  auto* approx = theory->add_subcommand("approx", "Best uniform polynomial approximation of 1/x on [a, b]");
  int ap_degree = 0;
  double ap_a = 1.0;
  double ap_b = 2.0;
  int ap_grid = 0;
  approx->add_option("--degree", ap_degree, "Polynomial degree")->required();
  approx->add_option("--a", ap_a, "Left end (>= 1)")->required();
  approx->add_option("--b", ap_b, "Right end")->required();
  approx->add_option("--lp-grid", ap_grid, "Also solve the discretized dual LP on this many points");

  auto* priors = theory->add_subcommand("priors", "Moment-matched prior pair on {0} u [1 + nu, lambda]");
  int pr_L = 1;
  double pr_nu = 0.0;
  double pr_lambda = 2.0;
  priors->add_option("--L", pr_L, "Number of matched moments")->required();
  priors->add_option("--nu", pr_nu, "Gap above 1")->capture_default_str();
  priors->add_option("--lambda", pr_lambda, "Right end of the support")->required();

  auto* tv = theory->add_subcommand("tv", "Total variation between the Poisson mixtures of a prior pair");
  int tv_L = 1;
  double tv_nu = 0.0;
  double tv_lambda = 2.0;
  double tv_scale = 1.0;
  std::optional<int> tv_cutoff;
  tv->add_option("--L", tv_L, "Number of matched moments")->required();
  tv->add_option("--nu", tv_nu, "Gap above 1")->capture_default_str();
  tv->add_option("--lambda", tv_lambda, "Right end of the support")->required();
  tv->add_option("--scale", tv_scale, "Poisson scale (n/k)")->required();
  tv->add_option("--cutoff", tv_cutoff, "Truncation point (default: smallest certified)");

  auto* certify = theory->add_subcommand("certify", "Le Cam two-point certificate");
  double ce_k = 0.0;
  std::optional<double> ce_n;
  double ce_eps = 0.1;
  std::optional<int> ce_L;
  std::optional<double> ce_lambda;
  std::optional<double> ce_nu;
  std::optional<double> ce_alpha;
  std::optional<double> ce_c0;
  double ce_gamma = 2.0;
  std::optional<double> ce_C;
  certify->add_option("--k", ce_k, "Reciprocal of the minimum mass")->required();
  certify->add_option("--epsilon", ce_eps, "Target accuracy")->capture_default_str();
  certify->add_option("--n", ce_n, "Sample size to certify");
  certify->add_option("--L", ce_L, "Matched moments");
  certify->add_option("--lambda", ce_lambda, "Support end");
  certify->add_option("--nu", ce_nu, "Gap above 1");
  certify->add_option("--alpha", ce_alpha, "Slack in (0, 1/2)");
  certify->add_option("--recipe-c0", ce_c0, "Fill unset parameters from the recipe with this c0");
  certify->add_option("--recipe-gamma", ce_gamma, "Recipe gamma")->capture_default_str();
  certify->add_option("--recipe-C", ce_C, "Recipe constant C (default 0.9 of the largest allowed)");

  auto* maxcheb = theory->add_subcommand("maxcheb", "max over x >= 1 of e^{-beta x} T_L(x)");
  double mc_beta = 1.0;
  int mc_L = 1;
  maxcheb->add_option("--beta", mc_beta, "Damping rate")->required();
  maxcheb->add_option("--L", mc_L, "Chebyshev degree")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*est) {
      const Fingerprint fp = load_fingerprint(est_input, est_is_fp, est_tok);
      EstimatorSpec spec;
      spec.kind = parse_estimator(est_name);
      spec.k = est_k;
      spec.config = est_opts.config();
      spec.et_t = est_opts.et_t;
      spec.et_J = est_opts.et_J;
      spec.gtoulmin_t = est_opts.gtoulmin_t;
      Estimate e = evaluate(spec, fp);
      if (est_clamp) e = clamp_estimate(e, fp);
      if (est_round) e.value = static_cast<double>(e.rounded);
      emit_record(estimate_json(e), g);
    } else if (*fpc) {
      const Fingerprint fp = load_fingerprint(fp_input, false, fp_tok);
      write_text(format_fingerprint(fp), g.output);
    } else if (*sim) {
      SweepSpec s;
      s.family = sim_family;
      s.n_grid = parse_grid(sim_grid);
      s.trials = sim_trials;
      s.estimators = split_names(sim_estimators);
      s.seed = g.seed;
      s.sampling = parse_sampling(sim_sampling);
      s.config = sim_opts.config();
      s.k = sim_k;
      s.et_t = sim_opts.et_t;
      s.et_J = sim_opts.et_J;
      s.gtoulmin_t = sim_opts.gtoulmin_t;
      s.threads = sim_threads;
      const auto rows = run_sweep(s);
      if (g.format == "json") {
        emit_json(rows, g.output);
      } else {
        emit_csv(rows, g.output);
      }
    } else if (*probe) {
      ps.seed = g.seed;
      ps.sampling = parse_sampling(probe_sampling);
      ps.ceiling = probe_ceiling;
      ps.config = probe_opts.config();
      ps.et_t = probe_opts.et_t;
      ps.et_J = probe_opts.et_J;
      ps.gtoulmin_t = probe_opts.gtoulmin_t;
      const ProbeResult r = probe_sample_complexity(ps);
      Json j;
      j["family"] = ps.family;
      j["estimator"] = ps.estimator;
      j["epsilon"] = ps.epsilon;
      j["delta"] = ps.delta;
      j["k"] = r.k;
      j["n_star"] = r.n_star;
      j["ceiling_reached"] = r.ceiling_reached;
      j["ceiling"] = r.ceiling;
      j["failure_rate"] = r.failure_rate;
      j["confirmation_trials"] = r.confirmation_trials;
      j["wilson_low"] = r.wilson_low;
      j["wilson_high"] = r.wilson_high;
      j["evaluations"] = r.evaluations;
      emit_record(j, g);
    } else if (*coeffs) {
      int L = 0;
      double l = 0.0;
      double r = 0.0;
      if (co_k) {
        const DegreeParams p = degree_params(*co_k, co_n, co_opts.config());
        L = p.degree;
        l = p.l;
        r = p.r;
      } else {
        if (!co_l || !co_r || !co_opts.degree) {
          throw ParameterError("coeffs needs --k, or all of --l, --r and --degree");
        }
        L = *co_opts.degree;
        l = *co_l;
        r = *co_r;
      }
      const CoefficientTable t = g_table(L, l, r, co_n);
      if (g.format == "json") {
        Json j;
        j["L"] = L;
        j["l"] = l;
        j["r"] = r;
        j["n"] = co_n;
        j["a"] = t.a;
        j["g"] = t.g;
        write_text(j.dump() + "\n", g.output);
      } else {
        std::string csv = "j,a_j,g_j\n";
        for (int i = 0; i <= L; ++i) {
          csv += std::to_string(i) + "," + format_double(t.a[i]) + "," + format_double(t.g[i]) + "\n";
        }
        write_text(csv, g.output);
      }
    } else if (*approx) {
      const ApproxResult res = best_inv_approx(ap_degree, ap_a, ap_b);
      Json j;
      j["degree"] = res.degree;
      j["a"] = res.a;
      j["b"] = res.b;
      j["error"] = res.error;
      j["closed_form_error"] = closed_form_error(res.degree + 1, ap_a, ap_b);
      j["iterations"] = res.iterations;
      j["extrema"] = res.extrema;
      j["cheb_coeffs"] = res.cheb_coeffs;
      if (ap_grid > 0) j["lp_primal_value"] = primal_value(ap_degree, ap_a, ap_b, ap_grid);
      emit_record(j, g);
    } else if (*priors) {
      const PriorPair p = construct_prior_pair(pr_L, pr_nu, pr_lambda);
      Json j;
      j["L"] = p.L;
      j["nu"] = p.nu;
      j["lambda"] = p.lambda;
      j["gap"] = p.gap;
      j["u"] = prior_json(p.u);
      j["u_prime"] = prior_json(p.u_prime);
      Json moments = Json::array();
      for (int m = 1; m <= p.L; ++m) moments.push_back({p.u.moment(m), p.u_prime.moment(m)});
      j["moments"] = moments;
      emit_record(j, g);
    } else if (*tv) {
      const PriorPair p = construct_prior_pair(tv_L, tv_nu, tv_lambda);
      const TvEstimate t = tv_cutoff ? tv_exact(p, tv_scale, *tv_cutoff) : tv_exact(p, tv_scale);
      const TvBound b = tv_bound(tv_scale * tv_lambda, tv_L);
      Json j;
      j["L"] = tv_L;
      j["nu"] = tv_nu;
      j["lambda"] = tv_lambda;
      j["scale"] = tv_scale;
      j["cutoff"] = t.cutoff;
      j["tv_lower"] = t.lower;
      j["tv_upper"] = t.upper;
      j["tail_bound"] = t.tail_bound;
      j["Lambda"] = tv_scale * tv_lambda;
      j["bound_full"] = b.full;
      j["bound_simplified"] = b.simplified;
      j["bound"] = b.value;
      emit_record(j, g);
    } else if (*certify) {
      int L = 0;
      double lambda = 0.0;
      double nu = 0.0;
      double alpha = 0.0;
      double n = 0.0;
      if (ce_c0) {
        const double C = ce_C.value_or(0.9 * recipe_max_constant(*ce_c0, ce_gamma));
        const LowerBoundRecipe rec = lower_bound_recipe(ce_k, ce_eps, *ce_c0, ce_gamma, C);
        L = rec.L;
        lambda = rec.lambda;
        nu = rec.nu;
        alpha = rec.alpha;
        n = rec.n;
      } else if (!ce_n || !ce_L || !ce_lambda || !ce_nu || !ce_alpha) {
        throw ParameterError("certify needs --n, --L, --lambda, --nu and --alpha, or --recipe-c0");
      }
      if (ce_L) L = *ce_L;
      if (ce_lambda) lambda = *ce_lambda;
      if (ce_nu) nu = *ce_nu;
      if (ce_alpha) alpha = *ce_alpha;
      if (ce_n) n = *ce_n;
      const Certificate c = lecam_certificate(ce_k, n, ce_eps, L, lambda, nu, alpha);
      Json j;
      j["k"] = ce_k;
      j["n"] = n;
      j["epsilon"] = ce_eps;
      j["L"] = L;
      j["lambda"] = lambda;
      j["nu"] = nu;
      j["alpha"] = alpha;
      j["valid"] = c.valid;
      j["lhs"] = c.lhs;
      j["mass_term"] = c.mass_term;
      j["support_term"] = c.support_term;
      j["tv_term"] = c.tv_term;
      j["gap"] = c.gap;
      j["implied_epsilon"] = c.implied_epsilon;
      j["meets_target"] = c.meets_target;
      emit_record(j, g);
    } else if (*maxcheb) {
      const ExpChebyMax m = max_exp_cheby(mc_beta, mc_L);
      Json j;
      j["beta"] = mc_beta;
      j["L"] = mc_L;
      j["x_star"] = m.x_star;
      j["value"] = m.value;
      j["log_value"] = m.log_value;
      j["residual"] = m.residual;
      emit_record(j, g);
    }
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
