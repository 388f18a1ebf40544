#include "ssc/serialize.hpp"

#include "json.hpp"

#include <cmath>
#include <limits>

namespace ssc::json {

using nlohmann::ordered_json;
using J = ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

J num(double v) { return std::isfinite(v) ? J(v) : J(nullptr); }

double get_num(const J& j, const char* key, double fallback = kNaN) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

J matrix_rows(const Matrix& m) {
  J rows = J::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    J row = J::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(num(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix rows_matrix(const J& rows, double null_value = kNaN) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.at(0).size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const J& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != c) throw Error(ErrorCode::ParseError, "ragged matrix rows");
    for (Eigen::Index k = 0; k < c; ++k) {
      const J& v = row.at(static_cast<std::size_t>(k));
      m(i, k) = v.is_null() ? null_value : v.get<double>();
    }
  }
  return m;
}

J num_list(const std::vector<double>& v) {
  J out = J::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

std::vector<double> get_num_list(const J& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(v.is_null() ? kNaN : v.get<double>());
  return out;
}

// Wraps decoding so library errors surface as ssc::Error.
template <typename F>
auto decode(const std::string& text, ErrorCode semantic, F&& f) {
  J j;
  try {
    j = J::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  try {
    return f(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(semantic, e.what());
  }
}

// LambdaRange

J range_json(const theory::LambdaRange& range) {
  J j;
  j["theorem"] = theory::to_string(range.theorem);
  j["lower"] = num(range.lower);
  j["upper"] = range.upper_unbounded ? J(nullptr) : num(range.upper);
  j["upper_unbounded"] = range.upper_unbounded;
  j["nonempty"] = range.nonempty;
  const auto& in = range.inputs;
  J inputs;
  inputs["r"] = num_list(in.r);
  inputs["mu"] = num_list(in.mu);
  inputs["delta"] = num(in.delta);
  inputs["delta1"] = num(in.delta1);
  if (in.epsilon) inputs["epsilon"] = num(*in.epsilon);
  inputs["dims"] = in.dims;
  if (in.n) inputs["n"] = *in.n;
  if (in.num_samples) inputs["N"] = *in.num_samples;
  if (in.sigma) inputs["sigma"] = num(*in.sigma);
  if (in.kappa) inputs["kappa"] = num(*in.kappa);
  j["inputs"] = std::move(inputs);
  return j;
}

theory::TheoremKind parse_theorem(const std::string& s) {
  if (s == "deterministic") return theory::TheoremKind::deterministic;
  if (s == "random_noise") return theory::TheoremKind::random_noise;
  if (s == "fully_random") return theory::TheoremKind::fully_random;
  throw Error(ErrorCode::InvalidInput, "unknown theorem '" + s + "'");
}

theory::LambdaRange range_from(const J& j) {
  theory::LambdaRange range;
  range.theorem = parse_theorem(j.at("theorem").get<std::string>());
  range.lower = get_num(j, "lower", std::numeric_limits<double>::infinity());
  range.upper_unbounded = j.at("upper_unbounded").get<bool>();
  range.upper = range.upper_unbounded ? std::numeric_limits<double>::infinity()
                                      : get_num(j, "upper", std::numeric_limits<double>::infinity());
  range.nonempty = j.at("nonempty").get<bool>();
  const J& in = j.at("inputs");
  range.inputs.r = get_num_list(in.at("r"));
  range.inputs.mu = get_num_list(in.at("mu"));
  range.inputs.delta = get_num(in, "delta");
  range.inputs.delta1 = get_num(in, "delta1");
  if (in.contains("epsilon")) range.inputs.epsilon = get_num(in, "epsilon");
  range.inputs.dims = in.at("dims").get<std::vector<int>>();
  if (in.contains("n")) range.inputs.n = in.at("n").get<int>();
  if (in.contains("N")) range.inputs.num_samples = in.at("N").get<int>();
  if (in.contains("sigma")) range.inputs.sigma = get_num(in, "sigma");
  if (in.contains("kappa")) range.inputs.kappa = get_num(in, "kappa");
  return range;
}

J geometry_json(const geometry::GeometryReport& rep) {
  J j;
  j["r"] = num_list(rep.r);
  j["r_min"] = num(rep.r_min);
  j["mu"] = num_list(rep.mu);
  j["mu_proxy"] = rep.mu_proxy;
  j["delta"] = num(rep.delta);
  j["delta1"] = num(rep.delta1);
  j["affinity"] = matrix_rows(rep.affinity);
  j["dims"] = rep.dims;
  j["lambda"] = num(rep.lambda);
  j["skipped_columns"] = rep.skipped_columns;
  j["inradius_upper_bound"] = rep.inradius_upper_bound;
  return j;
}

geometry::GeometryReport geometry_from(const J& j) {
  geometry::GeometryReport rep;
  rep.r = get_num_list(j.at("r"));
  rep.r_min = get_num(j, "r_min");
  rep.mu = get_num_list(j.at("mu"));
  rep.mu_proxy = j.at("mu_proxy").get<bool>();
  rep.delta = get_num(j, "delta");
  rep.delta1 = get_num(j, "delta1");
  rep.affinity = rows_matrix(j.at("affinity"));
  rep.dims = j.at("dims").get<std::vector<int>>();
  rep.lambda = get_num(j, "lambda");
  rep.skipped_columns = j.at("skipped_columns").get<std::size_t>();
  rep.inradius_upper_bound = j.at("inradius_upper_bound").get<bool>();
  return rep;
}

}  // namespace

// ModelSpec

std::string to_json(const sim::ModelSpec& spec) {
  J j;
  j["model"] = sim::to_string(spec.model);
  j["n"] = spec.n;
  j["dims"] = spec.dims;
  if (!spec.counts.empty()) j["counts"] = spec.counts;
  if (spec.kappa) j["kappa"] = num(*spec.kappa);
  J noise;
  noise["kind"] = sim::to_string(spec.noise.kind);
  noise["sigma"] = spec.noise.sigma;
  noise["delta"] = spec.noise.delta;
  noise["policy"] = sim::to_string(spec.noise.policy);
  j["noise"] = std::move(noise);
  j["normalize_noisy"] = spec.normalize_noisy;
  j["overlap"] = spec.overlap;
  return j.dump(2) + "\n";
}

sim::ModelSpec parse_model_spec(const std::string& text) {
  return decode(text, ErrorCode::InvalidSpec, [](const J& j) {
    sim::ModelSpec spec;
    spec.model = sim::parse_model_kind(j.value("model", std::string("fully_random")));
    spec.n = j.at("n").get<int>();
    if (j.contains("dims")) {
      spec.dims = j.at("dims").get<std::vector<int>>();
    } else {
      // shorthand: equal dimensions
      const int d = j.at("d").get<int>();
      const int num = j.at("L").get<int>();
      if (num < 1) throw Error(ErrorCode::InvalidSpec, "L must be >= 1");
      spec.dims.assign(static_cast<std::size_t>(num), d);
    }
    if (j.contains("counts")) spec.counts = j.at("counts").get<std::vector<int>>();
    if (j.contains("kappa") && !j.at("kappa").is_null()) spec.kappa = j.at("kappa").get<double>();
    if (j.contains("noise")) {
      const J& nz = j.at("noise");
      spec.noise.kind = sim::parse_noise_kind(nz.value("kind", std::string("none")));
      spec.noise.sigma = nz.value("sigma", 0.0);
      spec.noise.delta = nz.value("delta", 0.0);
      spec.noise.policy = sim::parse_policy(nz.value("policy", std::string("random_fixed_norm")));
    } else if (j.contains("sigma")) {
      spec.noise.sigma = j.at("sigma").get<double>();
      spec.noise.kind = spec.noise.sigma > 0.0 ? sim::NoiseKind::gaussian : sim::NoiseKind::none;
    }
    spec.normalize_noisy = j.value("normalize_noisy", false);
    spec.overlap = j.value("overlap", 0);
    spec.validate();
    return spec;
  });
}

// SubspaceEnsemble

std::string to_json(const SubspaceEnsemble& ensemble) {
  J j;
  j["n"] = ensemble.ambient_dim();
  j["dims"] = ensemble.dims();
  J bases = J::array();
  for (const auto& u : ensemble.bases()) bases.push_back(matrix_rows(u));
  j["bases"] = std::move(bases);
  return j.dump() + "\n";
}

SubspaceEnsemble parse_ensemble(const std::string& text) {
  return decode(text, ErrorCode::ParseError, [](const J& j) {
    std::vector<Matrix> bases;
    for (const auto& b : j.at("bases")) {
      Matrix u = rows_matrix(b);
      if (!u.allFinite()) throw Error(ErrorCode::ParseError, "non-finite basis entry");
      bases.push_back(std::move(u));
    }
    return SubspaceEnsemble(std::move(bases));
  });
}

// GeometryReport and LambdaRange

std::string to_json(const geometry::GeometryReport& report) { return geometry_json(report).dump(2) + "\n"; }

geometry::GeometryReport parse_geometry_report(const std::string& text) {
  return decode(text, ErrorCode::InvalidInput, geometry_from);
}

std::string to_json(const theory::LambdaRange& range) { return range_json(range).dump(2) + "\n"; }

theory::LambdaRange parse_lambda_range(const std::string& text) {
  return decode(text, ErrorCode::InvalidInput, range_from);
}

// Diagnosis

std::string to_json(const Diagnosis& d) {
  J j;
  j["geometry"] = geometry_json(d.geometry);
  if (d.deterministic) {
    const auto& c = *d.deterministic;
    J t;
    t["delta_bound"] = num(c.delta_bound);
    t["gap_ok"] = c.gap_ok;
    t["rho_lower"] = num(c.rho_lower);
    t["rho_upper"] = num(c.rho_upper);
    t["range"] = range_json(c.range);
    j["deterministic"] = std::move(t);
  }
  if (d.random_noise) {
    const auto& c = *d.random_noise;
    J t;
    t["epsilon"] = num(c.epsilon);
    t["cond1"] = c.cond1;
    t["cond2"] = c.cond2;
    t["gap_ok"] = c.gap_ok;
    t["rho_lower"] = num(c.rho_lower);
    t["rho_upper"] = num(c.rho_upper);
    t["range"] = range_json(c.range);
    j["random_noise"] = std::move(t);
  }
  if (d.fully_random) {
    const auto& c = *d.fully_random;
    J t;
    t["c_kappa"] = num(c.c_kappa);
    t["N"] = c.num_samples;
    t["dim_ok"] = c.dim_ok;
    t["sigma_ok"] = c.sigma_ok;
    t["dim_bound"] = num(c.dim_bound);
    t["sigma_bound"] = num(c.sigma_bound);
    t["advisory"] = c.advisory;
    t["range"] = range_json(c.range);
    j["fully_random"] = std::move(t);
  }
  if (d.semirandom) {
    const auto& c = *d.semirandom;
    J t;
    t["bound"] = num(c.bound);
    t["feasible"] = c.feasible;
    t["advisory"] = c.advisory;
    t["pair_bounds"] = matrix_rows(c.pair_bounds);
    j["semirandom"] = std::move(t);
  }
  j["notes"] = d.notes;
  return j.dump(2) + "\n";
}

Diagnosis parse_diagnosis(const std::string& text) {
  return decode(text, ErrorCode::InvalidInput, [](const J& j) {
    Diagnosis d;
    d.geometry = geometry_from(j.at("geometry"));
    const double inf = std::numeric_limits<double>::infinity();
    if (j.contains("deterministic")) {
      const J& t = j.at("deterministic");
      theory::DeterministicConditions c;
      c.delta_bound = get_num(t, "delta_bound", inf);
      c.gap_ok = t.at("gap_ok").get<bool>();
      c.rho_lower = get_num(t, "rho_lower", inf);
      c.rho_upper = get_num(t, "rho_upper", inf);
      c.range = range_from(t.at("range"));
      d.deterministic = c;
    }
    if (j.contains("random_noise")) {
      const J& t = j.at("random_noise");
      theory::RandomNoiseConditions c;
      c.epsilon = get_num(t, "epsilon");
      c.cond1 = t.at("cond1").get<bool>();
      c.cond2 = t.at("cond2").get<bool>();
      c.gap_ok = t.at("gap_ok").get<bool>();
      c.rho_lower = get_num(t, "rho_lower", inf);
      c.rho_upper = get_num(t, "rho_upper", inf);
      c.range = range_from(t.at("range"));
      d.random_noise = c;
    }
    if (j.contains("fully_random")) {
      const J& t = j.at("fully_random");
      theory::FullyRandomConditions c;
      c.c_kappa = get_num(t, "c_kappa");
      c.num_samples = t.at("N").get<int>();
      c.dim_ok = t.at("dim_ok").get<bool>();
      c.sigma_ok = t.at("sigma_ok").get<bool>();
      c.dim_bound = get_num(t, "dim_bound");
      c.sigma_bound = get_num(t, "sigma_bound");
      c.advisory = t.at("advisory").get<bool>();
      c.range = range_from(t.at("range"));
      d.fully_random = c;
    }
    if (j.contains("semirandom")) {
      const J& t = j.at("semirandom");
      theory::SemirandomAdvisory c;
      c.bound = get_num(t, "bound", -inf);
      c.feasible = t.at("feasible").get<bool>();
      c.advisory = t.at("advisory").get<bool>();
      c.pair_bounds = rows_matrix(t.at("pair_bounds"), -inf);
      d.semirandom = c;
    }
    d.notes = j.value("notes", std::vector<std::string>{});
    return d;
  });
}

// Sidecars

std::string to_json(const SolveSummary& s) {
  J j;
  j["lambda"] = num(s.lambda);
  j["mode"] = s.mode;
  j["iterations"] = s.iterations;
  j["objective"] = num(s.objective);
  j["converged"] = s.converged;
  j["trivial"] = s.trivial;
  j["trivial_columns"] = s.trivial_columns;
  j["polished_columns"] = s.polished_columns;
  j["kkt_residual"] = num(s.kkt_residual);
  return j.dump(2) + "\n";
}

SolveSummary parse_solve_summary(const std::string& text) {
  return decode(text, ErrorCode::InvalidInput, [](const J& j) {
    SolveSummary s;
    s.lambda = get_num(j, "lambda");
    s.mode = j.at("mode").get<std::string>();
    s.iterations = j.at("iterations").get<int>();
    s.objective = get_num(j, "objective");
    s.converged = j.at("converged").get<bool>();
    s.trivial = j.at("trivial").get<bool>();
    s.trivial_columns = j.at("trivial_columns").get<std::size_t>();
    s.polished_columns = j.at("polished_columns").get<std::size_t>();
    s.kkt_residual = get_num(j, "kkt_residual");
    return s;
  });
}

std::string to_json(const ClusterReport& r) {
  J j;
  j["assignments"] = r.result.assignments;
  j["accuracy"] = num(r.result.accuracy);
  // +inf when the in-mask mass is zero
  j["rel_violation"] = num(r.result.rel_violation);
  j["all_zero_mass"] = r.result.all_zero_mass;
  j["sep_holds"] = r.result.sep_holds;
  j["trivial_columns"] = r.result.trivial_columns;
  j["degenerate"] = r.result.degenerate;
  j["lambda"] = num(r.lambda);
  j["seed"] = r.seed;
  return j.dump(2) + "\n";
}

ClusterReport parse_cluster_report(const std::string& text) {
  return decode(text, ErrorCode::InvalidInput, [](const J& j) {
    ClusterReport r;
    r.result.assignments = j.at("assignments").get<std::vector<int>>();
    r.result.accuracy = get_num(j, "accuracy");
    r.result.rel_violation = get_num(j, "rel_violation", std::numeric_limits<double>::infinity());
    r.result.all_zero_mass = j.value("all_zero_mass", false);
    r.result.sep_holds = j.at("sep_holds").get<bool>();
    r.result.trivial_columns = j.at("trivial_columns").get<std::size_t>();
    r.result.degenerate = j.value("degenerate", false);
    r.lambda = get_num(j, "lambda");
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  });
}

}  // namespace ssc::json
