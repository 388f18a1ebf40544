#include "ssc/experiment.hpp"

#include "ssc/io.hpp"
#include "ssc/serialize.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace ssc::experiment {

namespace fs = std::filesystem;
using J = nlohmann::ordered_json;

namespace {

std::atomic<bool> g_stop{false};

void spec_error(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

J num(double v) { return std::isfinite(v) ? J(v) : J(nullptr); }

double get_num(const J& j, const char* key, double null_value) {
  const J& v = j.at(key);
  return v.is_null() ? null_value : v.get<double>();
}

J cell_json(const GridCellResult& c) {
  J j;
  j["index"] = c.index;
  j["axis_index"] = c.axis_index;
  j["seed"] = c.seed;
  j["lambda_index"] = c.lambda_index;
  j["axis_value"] = c.axis_value;
  j["lambda"] = c.lambda;
  j["verdict"] = to_string(c.verdict);
  j["rel_violation"] = num(c.rel_violation);
  j["above_gray_threshold"] = c.above_gray_threshold;
  j["accuracy"] = num(c.accuracy);
  j["trivial_columns"] = c.trivial_columns;
  j["iterations"] = c.iterations;
  j["converged"] = c.converged;
  j["runtime_ms"] = c.runtime_ms;
  return j;
}

GridCellResult cell_from(const J& j) {
  GridCellResult c;
  c.index = j.at("index").get<std::size_t>();
  c.axis_index = j.at("axis_index").get<std::size_t>();
  c.seed = j.at("seed").get<int>();
  c.lambda_index = j.at("lambda_index").get<std::size_t>();
  c.axis_value = j.at("axis_value").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.verdict = parse_verdict(j.at("verdict").get<std::string>());
  c.rel_violation = get_num(j, "rel_violation", std::numeric_limits<double>::infinity());
  c.above_gray_threshold = j.at("above_gray_threshold").get<bool>();
  c.accuracy = get_num(j, "accuracy", std::numeric_limits<double>::quiet_NaN());
  c.trivial_columns = j.at("trivial_columns").get<std::size_t>();
  c.iterations = j.at("iterations").get<int>();
  c.converged = j.at("converged").get<bool>();
  c.runtime_ms = j.at("runtime_ms").get<double>();
  return c;
}

std::string dims_field(const std::vector<int>& dims) {
  if (std::all_of(dims.begin(), dims.end(), [&](int d) { return d == dims.front(); })) {
    return std::to_string(dims.front());
  }
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) out += (i ? ";" : "") + std::to_string(dims[i]);
  return out;
}

std::string unit_dir(std::size_t a, int s) { return "a" + std::to_string(a) + "_s" + std::to_string(s); }

}  // namespace

const char* to_string(Axis axis) {
  switch (axis) {
    case Axis::sigma: return "sigma";
    case Axis::d: return "d";
    case Axis::L: return "L";
  }
  return "unknown";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::trivial: return "trivial";
    case Verdict::gray: return "gray";
    case Verdict::white: return "white";
  }
  return "unknown";
}

Axis parse_axis(const std::string& s) {
  if (s == "sigma") return Axis::sigma;
  if (s == "d") return Axis::d;
  if (s == "L") return Axis::L;
  spec_error("unknown axis '" + s + "' (expected sigma, d or L)");
  return Axis::sigma;
}

Verdict parse_verdict(const std::string& s) {
  if (s == "trivial") return Verdict::trivial;
  if (s == "gray") return Verdict::gray;
  if (s == "white") return Verdict::white;
  throw Error(ErrorCode::ParseError, "unknown verdict '" + s + "'");
}

std::vector<double> default_lambdas(int n, int count) {
  if (n < 1 || count < 1) spec_error("default_lambdas needs n >= 1 and count >= 1");
  const double root = std::sqrt(static_cast<double>(n));
  if (count == 1) return {root};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double e = -2.0 + 5.0 * k / (count - 1);
    out[static_cast<std::size_t>(k)] = root * std::pow(10.0, e);
  }
  return out;
}

std::vector<double> ExperimentGrid::resolved_lambdas() const {
  return lambdas.empty() ? default_lambdas(base.n) : lambdas;
}

std::size_t ExperimentGrid::num_cells() const {
  return axis_values.size() * static_cast<std::size_t>(std::max(seeds, 0)) * resolved_lambdas().size();
}

sim::ModelSpec ExperimentGrid::cell_model(std::size_t a) const {
  sim::ModelSpec spec = base;
  const double v = axis_values.at(a);
  switch (axis) {
    case Axis::sigma:
      spec.noise.sigma = v;
      spec.noise.kind = v > 0.0 ? sim::NoiseKind::gaussian : sim::NoiseKind::none;
      break;
    case Axis::d: {
      const int d = static_cast<int>(std::lround(v));
      spec.dims.assign(base.dims.size(), d);
      spec.counts.clear();
      break;
    }
    case Axis::L: {
      const int num = static_cast<int>(std::lround(v));
      if (num < 1) spec_error("L axis values must be >= 1");
      spec.dims.assign(static_cast<std::size_t>(num), base.dims.front());
      spec.counts.clear();
      break;
    }
  }
  return spec;
}

RngSpec ExperimentGrid::dataset_rng(std::size_t a, int seed) const {
  return RngSpec{master_seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(seed), 0}};
}

RngSpec ExperimentGrid::cluster_rng(std::size_t a, int seed, std::size_t k) const {
  return RngSpec{master_seed,
                 {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(seed), 1, static_cast<std::uint64_t>(k)}};
}

void ExperimentGrid::validate() const {
  if (axis_values.empty()) spec_error("axis values must be non-empty");
  if (seeds < 1) spec_error("seeds must be >= 1");
  if (!(gray_threshold >= 0.0)) spec_error("gray_threshold must be >= 0");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) spec_error("lambdas must be positive and finite");
  }
  if (axis != Axis::sigma && !base.counts.empty() && !base.kappa) {
    spec_error("d and L axes need kappa (counts cannot follow the axis)");
  }
  for (std::size_t a = 0; a < axis_values.size(); ++a) {
    if (axis != Axis::sigma && std::abs(axis_values[a] - std::round(axis_values[a])) > 0.0) {
      spec_error("d and L axis values must be integers");
    }
    cell_model(a).validate();
  }
  try {
    auto cfg = solve;
    cfg.lambda = 1.0;
    cfg.validate();
  } catch (const Error& e) {
    spec_error(e.what());
  }
}

std::string to_json(const ExperimentGrid& grid) {
  J j;
  j["model"] = J::parse(json::to_json(grid.base));
  j["lambdas"] = grid.resolved_lambdas();
  j["axis"] = to_string(grid.axis);
  j["values"] = grid.axis_values;
  j["seeds"] = grid.seeds;
  j["master_seed"] = grid.master_seed;
  J s;
  s["mode"] = solver::to_string(grid.solve.mode);
  s["mu0"] = grid.solve.mu0;
  s["rho"] = grid.solve.rho;
  s["tol_primal"] = grid.solve.tol_primal;
  s["tol_dual"] = grid.solve.tol_dual;
  s["max_iter"] = grid.solve.max_iter;
  s["polish"] = grid.solve.polish;
  s["polish_every"] = grid.solve.polish_every;
  s["support_rel"] = grid.solve.support_rel;
  j["solver"] = std::move(s);
  j["gray_threshold"] = grid.gray_threshold;
  j["cluster"] = grid.cluster;
  return j.dump(2) + "\n";
}

ExperimentGrid parse_grid(const std::string& text) {
  J j;
  try {
    j = J::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  ExperimentGrid grid;
  try {
    grid.base = json::parse_model_spec(j.at("model").dump());
    if (j.contains("lambdas")) {
      grid.lambdas = j.at("lambdas").get<std::vector<double>>();
    } else if (j.contains("lambda_count")) {
      grid.lambdas = default_lambdas(grid.base.n, j.at("lambda_count").get<int>());
    }
    grid.axis = parse_axis(j.value("axis", std::string("sigma")));
    grid.axis_values = j.at("values").get<std::vector<double>>();
    grid.seeds = j.value("seeds", 1);
    grid.master_seed = j.value("master_seed", std::uint64_t{0});
    if (j.contains("solver")) {
      const J& s = j.at("solver");
      grid.solve.mode = solver::parse_solve_mode(s.value("mode", std::string("matrix")));
      grid.solve.mu0 = s.value("mu0", 0.0);
      grid.solve.rho = s.value("rho", 1.0);
      grid.solve.tol_primal = s.value("tol_primal", grid.solve.tol_primal);
      grid.solve.tol_dual = s.value("tol_dual", grid.solve.tol_dual);
      grid.solve.max_iter = s.value("max_iter", grid.solve.max_iter);
      grid.solve.polish = s.value("polish", true);
      grid.solve.polish_every = s.value("polish_every", grid.solve.polish_every);
      grid.solve.support_rel = s.value("support_rel", grid.solve.support_rel);
    }
    grid.gray_threshold = j.value("gray_threshold", 0.1);
    grid.cluster = j.value("cluster", true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
  grid.validate();
  return grid;
}

Verdict classify(std::size_t trivial_columns, double rel_violation) {
  if (trivial_columns > 0) return Verdict::trivial;
  if (rel_violation == 0.0) return Verdict::white;
  return Verdict::gray;
}

Verdict recompute_verdict(const CoefficientMatrix& c, const std::vector<int>& labels, double support_rel) {
  const auto sep = cluster::check_sep_and_trivial(c, labels, support_rel);
  const auto rv = cluster::rel_violation(c, labels, support_rel);
  return classify(sep.trivial_columns, rv.value);
}

int effective_workers(int requested) {
  int workers = std::max(requested, 1);
  if (const char* env = std::getenv("SSC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) workers = std::min<long>(workers, cap);
  }
  return workers;
}

void request_stop() { g_stop.store(true); }
void clear_stop() { g_stop.store(false); }

std::string results_csv(const ExperimentGrid& grid, const std::vector<GridCellResult>& cells) {
  std::ostringstream out;
  out << "cell,model,n,d,L,kappa,sigma,lambda,axis2,axis2_value,seed,verdict,rel_violation,accuracy,"
         "trivial_columns,iterations,converged,above_gray_threshold\n";
  for (const auto& c : cells) {
    const auto spec = grid.cell_model(c.axis_index);
    out << c.index << ',' << sim::to_string(spec.model) << ',' << spec.n << ',' << dims_field(spec.dims) << ','
        << spec.dims.size() << ',' << (spec.kappa ? io::format_double(*spec.kappa) : std::string()) << ','
        << io::format_double(spec.noise.sigma) << ',' << io::format_double(c.lambda) << ','
        << to_string(grid.axis) << ',' << io::format_double(c.axis_value) << ',' << c.seed << ','
        << to_string(c.verdict) << ',' << io::format_double(c.rel_violation) << ','
        << io::format_double(c.accuracy) << ',' << c.trivial_columns << ',' << c.iterations << ','
        << (c.converged ? 1 : 0) << ',' << (c.above_gray_threshold ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<GridCellResult> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<GridCellResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 18) throw Error(ErrorCode::ParseError, "results.csv row has " + std::to_string(f.size()) + " fields");
    auto to_d = [](const std::string& s) {
      if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      return std::stod(s);
    };
    GridCellResult c;
    c.index = std::stoul(f[0]);
    c.lambda = to_d(f[7]);
    c.axis_value = to_d(f[9]);
    c.seed = std::stoi(f[10]);
    c.verdict = parse_verdict(f[11]);
    c.rel_violation = to_d(f[12]);
    c.accuracy = to_d(f[13]);
    c.trivial_columns = std::stoul(f[14]);
    c.iterations = std::stoi(f[15]);
    c.converged = f[16] == "1";
    c.above_gray_threshold = f[17] == "1";
    out.push_back(c);
  }
  return out;
}

RunResult run_grid(const ExperimentGrid& grid, const RunOptions& opts) {
  grid.validate();
  const auto lambdas = grid.resolved_lambdas();
  const std::size_t num_l = lambdas.size();
  const auto seeds = static_cast<std::size_t>(grid.seeds);
  const std::size_t total = grid.num_cells();

  const fs::path root(opts.out_dir);
  const bool persist = !opts.out_dir.empty();
  const std::string grid_text = to_json(grid);
  const fs::path progress_path = root / "progress.jsonl";

  std::vector<GridCellResult> results(total);
  std::vector<char> done(total, 0);
  RunResult out;

  if (persist) {
    fs::create_directories(root);
    if (opts.resume && fs::exists(root / "grid.json")) {
      if (io::read_text(root / "grid.json") != grid_text) {
        throw Error(ErrorCode::InvalidInput, "cannot resume: grid.json in the output directory differs");
      }
      if (fs::exists(progress_path)) {
        std::istringstream lines(io::read_text(progress_path));
        std::string line;
        while (std::getline(lines, line)) {
          if (line.empty()) continue;
          GridCellResult c;
          try {
            c = cell_from(J::parse(line));
          } catch (const nlohmann::json::exception&) {
            continue;  // torn last line from an interrupted run
          }
          if (c.index < total && !done[c.index]) {
            results[c.index] = c;
            done[c.index] = 1;
            ++out.resumed_cells;
          }
        }
      }
    } else {
      io::write_text(root / "grid.json", grid_text);
      io::write_text(progress_path, "");
    }
  }

  std::ofstream progress;
  if (persist) {
    progress.open(progress_path, std::ios::app);
    if (!progress) throw Error(ErrorCode::IoError, "cannot open " + progress_path.string());
  }

  // A work unit is one data set: (axis index, seed), solved for every lambda.
  std::vector<std::pair<std::size_t, int>> units;
  for (std::size_t a = 0; a < grid.axis_values.size(); ++a) {
    for (std::size_t s = 0; s < seeds; ++s) {
      const std::size_t first = (a * seeds + s) * num_l;
      std::size_t have = 0;
      for (std::size_t k = 0; k < num_l; ++k) have += done[first + k] ? 1 : 0;
      if (have == num_l) continue;
      // Lambdas are solved in order with warm starts, so a partly finished
      // unit is recomputed from its first lambda to keep results identical.
      for (std::size_t k = 0; k < num_l; ++k) done[first + k] = 0;
      out.resumed_cells -= have;
      units.emplace_back(a, static_cast<int>(s));
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mtx;
  std::exception_ptr error;

  auto work = [&]() {
    for (;;) {
      if (g_stop.load() || failed.load()) return;
      const std::size_t u = next.fetch_add(1);
      if (u >= units.size()) return;
      const auto [a, s] = units[u];
      try {
        const auto spec = grid.cell_model(a);
        const LabeledDataset ds = sim::generate(spec, grid.dataset_rng(a, s));
        const Matrix& x = ds.data.values();
        const int num_labels = ds.num_subspaces();
        fs::path cell_dir;
        if (persist && opts.keep_coefficients) {
          cell_dir = root / "cells" / unit_dir(a, s);
          fs::create_directories(cell_dir);
          io::write_labels(cell_dir / "labels.txt", ds.labels);
        }
        std::optional<Matrix> previous;
        for (std::size_t k = 0; k < num_l; ++k) {
          const std::size_t index = (a * seeds + static_cast<std::size_t>(s)) * num_l + k;
          if (g_stop.load() || failed.load()) return;
          const auto t0 = std::chrono::steady_clock::now();
          auto cfg = grid.solve;
          cfg.lambda = lambdas[k];
          const auto sol = solver::solve_self_expression(x, cfg, previous ? &*previous : nullptr);
          const auto& c = sol.coefficients;
          previous = c.values();

          GridCellResult r;
          r.index = index;
          r.axis_index = a;
          r.seed = s;
          r.lambda_index = k;
          r.axis_value = grid.axis_values[a];
          r.lambda = lambdas[k];
          const auto sep = cluster::check_sep_and_trivial(c, ds.labels, cfg.support_rel);
          const auto rv = cluster::rel_violation(c, ds.labels, cfg.support_rel);
          r.trivial_columns = sep.trivial_columns;
          r.rel_violation = rv.value;
          r.verdict = classify(sep.trivial_columns, rv.value);
          r.above_gray_threshold = rv.value > grid.gray_threshold;
          r.accuracy = std::numeric_limits<double>::quiet_NaN();
          if (grid.cluster && num_labels >= 2) {
            const auto graph = cluster::build_affinity(c);
            const auto sc = cluster::spectral_cluster(graph, num_labels, grid.cluster_rng(a, s, k));
            r.accuracy = cluster::clustering_accuracy(sc.assignments, ds.labels, num_labels);
          }
          r.iterations = sol.iterations;
          r.converged = sol.converged;
          if (!cell_dir.empty()) io::write_matrix_csv(cell_dir / ("l" + std::to_string(k) + "_C.csv"), c.values());
          r.runtime_ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

          std::lock_guard<std::mutex> lock(mtx);
          results[index] = r;
          done[index] = 1;
          if (progress.is_open()) {
            progress << cell_json(r).dump() << '\n';
            progress.flush();
          }
          if (opts.on_cell) opts.on_cell(r);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mtx);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const int workers = std::min<int>(effective_workers(opts.workers), std::max<int>(1, static_cast<int>(units.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  for (std::size_t i = 0; i < total; ++i) {
    if (done[i]) out.cells.push_back(results[i]);
  }
  out.interrupted = out.cells.size() < total;

  if (persist) {
    io::write_text(root / "results.csv", results_csv(grid, out.cells));
    std::ostringstream timings;
    timings << "cell,runtime_ms\n";
    for (const auto& c : out.cells) timings << c.index << ',' << io::format_double(c.runtime_ms) << '\n';
    io::write_text(root / "timings.csv", timings.str());
  }
  return out;
}

}  // namespace ssc::experiment
