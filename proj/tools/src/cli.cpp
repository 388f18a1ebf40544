#include "ssc_cli/cli.hpp"

#include "ssc/cluster.hpp"
#include "ssc/experiment.hpp"
#include "ssc/geometry.hpp"
#include "ssc/io.hpp"
#include "ssc/serialize.hpp"
#include "ssc/simulate.hpp"
#include "ssc/solver.hpp"
#include "ssc/theory.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>

namespace ssc::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError: return kIoFailure;
    case ErrorCode::CholeskyFailure:
    case ErrorCode::NonFinite:
    case ErrorCode::EigenFailure:
    case ErrorCode::DegenerateDual: return kNumericalFailure;
    default: return kInvalidInput;
  }
}

std::string fmt(double v) { return io::format_double(v); }

std::size_t count_trivial(const CoefficientMatrix& c, double support_rel) {
  std::size_t trivial = 0;
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    const double eps = solver::support_eps(c.column(j), support_rel);
    if (c.column(j).cwiseAbs().maxCoeff() <= eps) ++trivial;
  }
  return trivial;
}

// generate

struct GenerateArgs {
  std::string spec;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const auto spec = json::parse_model_spec(io::read_text(a.spec));
  const auto ds = sim::generate(spec, RngSpec{a.seed, {}});
  const fs::path dir(a.out);
  fs::create_directories(dir);
  io::write_matrix_csv(dir / "data.csv", ds.data.values());
  io::write_matrix_csv(dir / "clean.csv", ds.clean->values());
  io::write_labels(dir / "labels.txt", ds.labels);
  io::write_text(dir / "ensemble.json", json::to_json(*ds.ensemble));
  io::write_text(dir / "spec.json", json::to_json(spec));

  const Matrix z = ds.data.values() - ds.clean->values();
  const double delta = z.colwise().norm().maxCoeff();
  out << "n=" << ds.data.ambient_dim() << " N=" << ds.data.num_samples() << " L=" << ds.num_subspaces()
      << " delta=" << fmt(delta) << "\n";
  return kOk;
}

// solve

struct SolveArgs {
  std::string data;
  std::optional<double> lambda;
  std::string mode = "matrix";
  int max_iter = 2000;
  double tol = 1e-6;
  double rho = 1.0;
  double mu0 = 0.0;
  bool no_polish = false;
  double support_rel = 1e-6;
  std::string out;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const DataMatrix x(io::read_matrix_csv(a.data));
  solver::SolveConfig cfg;
  cfg.lambda = a.lambda.value_or(std::sqrt(static_cast<double>(x.ambient_dim())));
  cfg.mode = solver::parse_solve_mode(a.mode);
  cfg.max_iter = a.max_iter;
  cfg.tol_primal = a.tol;
  cfg.tol_dual = a.tol;
  cfg.rho = a.rho;
  cfg.mu0 = a.mu0;
  cfg.polish = !a.no_polish;
  cfg.support_rel = a.support_rel;
  const auto sol = solver::solve_self_expression(x.values(), cfg);

  json::SolveSummary s;
  s.lambda = cfg.lambda;
  s.mode = solver::to_string(cfg.mode);
  s.iterations = sol.iterations;
  s.objective = sol.objective;
  s.converged = sol.converged;
  s.trivial_columns = count_trivial(sol.coefficients, cfg.support_rel);
  s.trivial = s.trivial_columns == static_cast<std::size_t>(sol.coefficients.size());
  s.polished_columns = sol.polished_columns;
  s.kkt_residual = sol.kkt_residual;

  const fs::path dir(a.out);
  fs::create_directories(dir);
  io::write_matrix_csv(dir / "C.csv", sol.coefficients.values());
  io::write_text(dir / "solve.json", json::to_json(s));

  out << "lambda=" << fmt(cfg.lambda) << " mode=" << s.mode << " iterations=" << s.iterations
      << " objective=" << fmt(s.objective) << " trivial_columns=" << s.trivial_columns << "\n";
  if (!sol.converged) {
    err << "warning: MaxIterExceeded after " << sol.iterations << " iterations (kkt residual "
        << fmt(sol.kkt_residual) << "); best iterate written\n";
    return kMaxIterExceeded;
  }
  return kOk;
}

// diagnose

struct DiagnoseArgs {
  std::string data;
  std::string labels;
  std::string clean;
  std::string ensemble;
  std::optional<double> lambda;
  std::uint64_t seed = 0;
  long budget = 20000;
  std::optional<double> sigma;
  bool allow_proxy = false;
  std::string out;
};

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out, std::ostream& err) {
  if (a.ensemble.empty()) {
    err << "error: diagnose needs --ensemble to compute incoherence\n";
    return kInvalidInput;
  }
  if (a.clean.empty() && !a.allow_proxy) {
    err << "error: diagnose needs --clean (or --allow-proxy to measure on noisy data)\n";
    return kInvalidInput;
  }
  LabeledDataset ds{DataMatrix(io::read_matrix_csv(a.data)), io::read_labels(a.labels), std::nullopt,
                    json::parse_ensemble(io::read_text(a.ensemble))};
  if (!a.clean.empty()) ds.clean = DataMatrix(io::read_matrix_csv(a.clean));
  ds.validate();

  const auto n = static_cast<int>(ds.data.ambient_dim());
  const auto num_samples = static_cast<int>(ds.data.num_samples());
  solver::SolveConfig cfg;
  cfg.lambda = a.lambda.value_or(std::sqrt(static_cast<double>(n)));
  geometry::InradiusOptions opts;
  opts.budget = a.budget;

  json::Diagnosis d;
  d.geometry = geometry::analyze(ds, cfg, RngSpec{a.seed, {}}, opts);
  const auto& g = d.geometry;
  if (g.mu_proxy) d.notes.emplace_back("mu measured against noisy data (clean data absent)");

  std::vector<int> counts(g.dims.size(), 0);
  for (int l : ds.labels) ++counts[static_cast<std::size_t>(l)];

  auto attempt = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      d.notes.push_back(std::string(name) + ": " + e.what());
    }
  };
  attempt("deterministic", [&] { d.deterministic = theory::deterministic_conditions(g); });
  attempt("random_noise", [&] { d.random_noise = theory::random_noise_conditions(g, n, num_samples, g.dims); });
  attempt("fully_random", [&] {
    if (!std::all_of(g.dims.begin(), g.dims.end(), [&](int v) { return v == g.dims.front(); })) {
      throw Error(ErrorCode::InvalidInput, "needs equal subspace dimensions");
    }
    const int dim = g.dims.front();
    const double kappa = static_cast<double>(*std::min_element(counts.begin(), counts.end())) / dim;
    const double sigma = a.sigma ? *a.sigma : g.delta;
    if (!std::isfinite(sigma)) throw Error(ErrorCode::InvalidInput, "needs --sigma when clean data is absent");
    d.fully_random = theory::fully_random_conditions(n, dim, static_cast<int>(g.dims.size()), kappa, sigma);
  });
  attempt("semirandom", [&] {
    theory::SemirandomParams p{n, num_samples, g.dims, counts, 1.0};
    d.semirandom = theory::semirandom_advisory(g, p);
  });

  const std::string text = json::to_json(d);
  if (a.out.empty()) {
    out << text;
  } else {
    io::write_text(a.out, text);
    double mu_max = 0.0;
    for (double m : g.mu) mu_max = std::max(mu_max, m);
    out << "r_min=" << fmt(g.r_min) << " mu_max=" << fmt(mu_max) << " delta=" << fmt(g.delta);
    if (d.deterministic) {
      const auto& r = d.deterministic->range;
      out << " deterministic: gap_ok=" << (d.deterministic->gap_ok ? "true" : "false") << " lambda in ("
          << fmt(r.lower) << ", " << (r.upper_unbounded ? std::string("inf") : fmt(r.upper)) << ")";
    }
    out << "\n";
  }
  return kOk;
}

// cluster

struct ClusterArgs {
  std::string coefficients;
  std::string labels;
  int num_clusters = 0;
  std::uint64_t seed = 0;
  std::optional<double> lambda;
  double support_rel = 1e-6;
  std::string out;
};

int cmd_cluster(const ClusterArgs& a, std::ostream& out) {
  const CoefficientMatrix c(io::read_matrix_csv(a.coefficients));
  const auto labels = io::read_labels(a.labels);
  int num = a.num_clusters;
  if (num <= 0) num = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

  json::ClusterReport rep;
  rep.result = cluster::evaluate(c, labels, num, RngSpec{a.seed, {}}, a.support_rel);
  rep.lambda = a.lambda.value_or(std::numeric_limits<double>::quiet_NaN());
  rep.seed = a.seed;
  const std::string text = json::to_json(rep);
  if (a.out.empty()) {
    out << text;
  } else {
    io::write_text(a.out, text);
    out << "accuracy=" << fmt(rep.result.accuracy) << " rel_violation=" << fmt(rep.result.rel_violation)
        << " sep_holds=" << (rep.result.sep_holds ? "true" : "false")
        << " trivial_columns=" << rep.result.trivial_columns << "\n";
  }
  return kOk;
}

// experiment

struct ExperimentArgs {
  std::string grid;
  std::string out;
  int workers = 1;
  std::optional<int> seeds;
  std::optional<std::uint64_t> master_seed;
  bool keep_coefficients = false;
  bool resume = false;
  bool quiet = false;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  auto grid = experiment::parse_grid(io::read_text(a.grid));
  if (a.seeds) grid.seeds = *a.seeds;
  if (a.master_seed) grid.master_seed = *a.master_seed;
  grid.validate();

  experiment::RunOptions opts;
  opts.out_dir = a.out;
  opts.workers = a.workers;
  opts.keep_coefficients = a.keep_coefficients;
  opts.resume = a.resume;
  const std::size_t total = grid.num_cells();
  std::size_t finished = 0;
  if (!a.quiet) {
    opts.on_cell = [&](const experiment::GridCellResult& c) {
      ++finished;
      err << "[" << finished << "] cell " << c.index << "/" << total << " lambda=" << fmt(c.lambda) << " "
          << experiment::to_string(grid.axis) << "=" << fmt(c.axis_value) << " seed=" << c.seed << " -> "
          << experiment::to_string(c.verdict) << "\n";
    };
  }
  const auto res = experiment::run_grid(grid, opts);

  std::size_t counts[3] = {0, 0, 0};
  for (const auto& c : res.cells) ++counts[static_cast<int>(c.verdict)];
  out << "cells=" << res.cells.size() << "/" << total << " trivial=" << counts[0] << " gray=" << counts[1]
      << " white=" << counts[2] << " resumed=" << res.resumed_cells << "\n";
  if (res.interrupted) {
    err << "interrupted: partial results written; rerun with --resume to continue\n";
    return kInterrupted;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noisy sparse subspace clustering toolkit", "ssc"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample a labelled data set from a model spec");
  g->add_option("--spec", gen.spec, "Model spec (JSON)")->required();
  g->add_option("--seed", gen.seed, "Master seed");
  g->add_option("--out", gen.out, "Output directory")->required();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve the self-expression LASSO for every column");
  s->add_option("--data", sol.data, "Data matrix CSV")->required();
  s->add_option("--lambda", sol.lambda, "Tradeoff lambda (default sqrt(n))");
  s->add_option("--mode", sol.mode, "column or matrix")->check(CLI::IsMember({"column", "matrix"}));
  s->add_option("--max-iter", sol.max_iter, "ADMM iteration cap");
  s->add_option("--tol", sol.tol, "Primal and dual tolerance");
  s->add_option("--rho", sol.rho, "Penalty growth factor (>= 1)");
  s->add_option("--mu0", sol.mu0, "Initial penalty (default lambda)");
  s->add_flag("--no-polish", sol.no_polish, "Disable the active-set KKT polish");
  s->add_option("--support-rel", sol.support_rel, "Relative support threshold");
  s->add_option("--out", sol.out, "Output directory")->required();

  DiagnoseArgs dia;
  auto* d = app.add_subcommand("diagnose", "Geometry report and theorem conditions");
  d->add_option("--data", dia.data, "Data matrix CSV")->required();
  d->add_option("--labels", dia.labels, "Labels file")->required();
  d->add_option("--clean", dia.clean, "Clean data matrix CSV");
  d->add_option("--ensemble", dia.ensemble, "Subspace bases (JSON)");
  d->add_option("--lambda", dia.lambda, "Lambda for the dual directions (default sqrt(n))");
  d->add_option("--seed", dia.seed, "Seed for the inradius search");
  d->add_option("--budget", dia.budget, "Random directions per inradius estimate");
  d->add_option("--sigma", dia.sigma, "Noise level for the fully random conditions (default measured delta)");
  d->add_flag("--allow-proxy", dia.allow_proxy, "Measure incoherence on noisy data when clean data is absent");
  d->add_option("--out", dia.out, "Report file (default stdout)");

  ClusterArgs clu;
  auto* c = app.add_subcommand("cluster", "Spectral clustering and success metrics");
  c->add_option("--coefficients", clu.coefficients, "Coefficient matrix CSV")->required();
  c->add_option("--labels", clu.labels, "Ground-truth labels")->required();
  c->add_option("--num-clusters", clu.num_clusters, "Number of clusters (default from labels)");
  c->add_option("--seed", clu.seed, "k-means seed");
  c->add_option("--lambda", clu.lambda, "Lambda recorded in the report");
  c->add_option("--support-rel", clu.support_rel, "Relative support threshold");
  c->add_option("--out", clu.out, "Report file (default stdout)");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Run a lambda x (sigma | d | L) phase-transition grid");
  e->add_option("--grid", exp.grid, "Grid config (JSON)")->required();
  e->add_option("--out", exp.out, "Output directory")->required();
  e->add_option("--workers", exp.workers, "Worker threads (capped by SSC_THREADS)");
  e->add_option("--seeds", exp.seeds, "Seeds per cell (overrides the grid)");
  e->add_option("--master-seed", exp.master_seed, "Master seed (overrides the grid)");
  e->add_flag("--keep-coefficients", exp.keep_coefficients, "Write C.csv for every cell");
  e->add_flag("--resume", exp.resume, "Skip cells recorded in progress.jsonl");
  e->add_flag("--quiet", exp.quiet, "No per-cell progress lines");

  std::vector<std::string> argv_store{"ssc"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int rc = app.exit(ex, out, err);
    return rc == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*s) return cmd_solve(sol, out, err);
    if (*d) return cmd_diagnose(dia, out, err);
    if (*c) return cmd_cluster(clu, out);
    if (*e) return cmd_experiment(exp, out, err);
  } catch (const Error& ex) {
    err << "error [" << to_string(ex.code()) << "]: " << ex.what() << "\n";
    return exit_code_for(ex.code());
  } catch (const fs::filesystem_error& ex) {
    err << "error [IoError]: " << ex.what() << "\n";
    return kIoFailure;
  }
  return kInvalidInput;
}

}  // namespace ssc::cli
