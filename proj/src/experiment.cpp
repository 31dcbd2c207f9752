#include "qmb/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>

#include "qmb/circuit.hpp"
#include "qmb/coldatoms.hpp"
#include "qmb/dmrg.hpp"
#include "qmb/eigensolve.hpp"
#include "qmb/numio.hpp"
#include "qmb/qmc.hpp"
#include "qmb/rng.hpp"
#include "qmb/spin_chain.hpp"

namespace qmb::cli {

namespace {

using nlohmann::json;

std::string fnv1a_digest(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Tracks which keys a method consumed so leftovers can be rejected.
class Params {
 public:
  explicit Params(const json& config) : config_(config) {
    used_.insert({"method", "seed", "sweep"});
  }

  bool has(const std::string& key) const { return config_.contains(key); }

  double number(const std::string& key) {
    require(key);
    return checked_number(key);
  }

  double number_or(const std::string& key, double fallback) {
    if (!config_.contains(key)) return fallback;
    return checked_number(key);
  }

  long long integer(const std::string& key) {
    const double v = number(key);
    return to_integer(key, v);
  }

  long long integer_or(const std::string& key, long long fallback) {
    if (!config_.contains(key)) return fallback;
    return to_integer(key, checked_number(key));
  }

  std::string string_or(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    if (!config_.contains(key)) return fallback;
    if (!config_[key].is_string())
      throw ConfigError("value of '" + key + "' must be a string", key);
    return config_[key].get<std::string>();
  }

  void reject_unknown() const {
    for (const auto& [key, value] : config_.items())
      if (!used_.count(key)) throw ConfigError("unknown key '" + key + "'", key);
  }

 private:
  void require(const std::string& key) {
    if (!config_.contains(key))
      throw ConfigError("missing required key '" + key + "'", key);
  }

  double checked_number(const std::string& key) {
    used_.insert(key);
    if (!config_[key].is_number())
      throw ConfigError("value of '" + key + "' must be a number", key);
    return config_[key].get<double>();
  }

  long long to_integer(const std::string& key, double v) {
    if (v != std::floor(v))
      throw ConfigError("value of '" + key + "' must be an integer", key);
    return static_cast<long long>(v);
  }

  const json& config_;
  std::set<std::string> used_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct SweepPoint {
  std::optional<std::string> parameter;
  double value = 0.0;
  std::uint64_t seed = 0;
};

void check_range(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("value of '" + key + "' " + what, key);
}

spin::Boundary parse_boundary(const std::string& text, const std::string& key) {
  if (text == "open") return spin::Boundary::open;
  if (text == "periodic") return spin::Boundary::periodic;
  throw ConfigError("boundary must be 'open' or 'periodic'", key);
}

std::string fmt(double v) { return format_double(v); }
std::string fmt_int(long long v) { return std::to_string(v); }

// ---------------------------------------------------------------- methods

Table run_lanczos(const json& config, const std::vector<SweepPoint>& points,
                  bool power_method) {
  Params p(config);
  const long long n = p.integer("n");
  check_range(n >= 2 && n <= 24, "n", "must be in [2, 24]");
  const double tolerance = p.number_or("tolerance", 1e-10);
  check_range(tolerance > 0.0, "tolerance", "must be positive");
  const long long max_iterations = p.integer_or("max_iterations", 20000);
  check_range(max_iterations >= 1, "max_iterations", "must be >= 1");
  const auto boundary = parse_boundary(p.string_or("boundary", "open"), "boundary");
  const double g_fixed = p.number_or("g", 1.0);
  const bool has_shift = p.has("shift");
  const double shift_cfg = p.number_or("shift", 0.0);
  if (!power_method && has_shift)
    throw ConfigError("unknown key 'shift'", "shift");
  p.reject_unknown();

  Table table;
  table.header = {"g", "energy", "magnetization", "iterations"};
  if (power_method) table.header.push_back("residual_norm");
  for (const auto& point : points) {
    double g = g_fixed;
    if (point.parameter) {
      if (*point.parameter != "g")
        throw ConfigError("sweep parameter must be 'g'", "sweep");
      g = point.value;
    }
    check_range(g >= 0.0, "g", "must be >= 0");
    spin::TfimHamiltonian h{int(n), g, boundary};
    eig::SolverConfig solver;
    solver.tolerance = tolerance;
    solver.max_iterations = int(max_iterations);
    solver.seed = point.seed;
    const auto op = eig::LinearOperator::from_tfim(h);
    double energy, m2;
    int iterations;
    double residual = 0.0;
    if (power_method) {
      solver.shift = has_shift ? shift_cfg : (g <= 1.0 ? 2.0 * n : n * (1.0 + g));
      const auto r = eig::power_method(op, solver);
      spin::StateVector v{r.vector, int(n)};
      energy = r.energy;
      m2 = spin::expectation(spin::ObservableSpec::magnetization_z_sq(), v);
      iterations = r.iterations;
      residual = r.residual_norm;
    } else {
      const auto r = eig::lanczos(op, solver);
      spin::StateVector v{r.eigen.vector, int(n)};
      energy = r.eigen.energy;
      m2 = spin::expectation(spin::ObservableSpec::magnetization_z_sq(), v);
      iterations = r.eigen.iterations;
    }
    std::vector<std::string> row = {fmt(g), fmt(energy),
                                    fmt(std::sqrt(std::max(0.0, m2))),
                                    fmt_int(iterations)};
    if (power_method) row.push_back(fmt(residual));
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table run_qmc(const json& config, const std::vector<SweepPoint>& points,
              json& manifest_extra) {
  Params p(config);
  const std::string model = p.string_or("model", "tfim");
  const long long n_x = p.integer("n_x");
  const long long n_y = p.integer("n_y");
  check_range(n_x >= 1, "n_x", "must be >= 1");
  check_range(n_y >= 1, "n_y", "must be >= 1");
  const long long sweeps = p.integer("sweeps");
  check_range(sweeps >= 1, "sweeps", "must be >= 1");
  const long long thermalization = p.integer_or("thermalization", sweeps / 5);
  check_range(thermalization >= 0, "thermalization", "must be >= 0");

  Table table;
  if (model == "tfim") {
    check_range(n_x >= 2, "n_x", "must be >= 2 for the tfim model");
    check_range(n_y >= 2, "n_y", "must be >= 2 for the tfim model");
    const double beta = p.number("beta");
    check_range(beta > 0.0, "beta", "must be positive");
    const double g_fixed = p.number_or("g", 1.0);
    const auto boundary =
        parse_boundary(p.string_or("boundary_x", "open"), "boundary_x");
    p.reject_unknown();
    table.header = {"g",
                    "a",
                    "gamma",
                    "lambda_factor",
                    "beta_cl",
                    "abs_magnetization",
                    "abs_magnetization_stderr",
                    "energy_per_site",
                    "energy_per_site_stderr",
                    "binder_cumulant",
                    "acceptance_rate"};
    json prefactors = json::array();
    for (const auto& point : points) {
      double g = g_fixed;
      if (point.parameter) {
        if (*point.parameter != "g")
          throw ConfigError("sweep parameter must be 'g' for the tfim model",
                            "sweep");
        g = point.value;
      }
      check_range(g > 0.0, "g", "must be positive");
      const auto mp = qmc::map_parameters(beta, g, int(n_y));
      const auto stats = qmc::tfim_qmc_magnetization(
          int(n_x), g, beta, int(n_y), sweeps, point.seed, thermalization,
          boundary);
      // Constant partition-function prefactor Lambda^(N Ny); logged only.
      prefactors.push_back(double(n_x) * double(n_y) *
                           std::log(mp.lambda_factor));
      table.rows.push_back({fmt(g), fmt(mp.a), fmt(mp.gamma),
                            fmt(mp.lambda_factor), fmt(mp.beta_cl),
                            fmt(stats.mean_abs_magnetization),
                            fmt(stats.stderr_abs_magnetization),
                            fmt(stats.mean_energy_per_site),
                            fmt(stats.stderr_energy_per_site),
                            fmt(stats.binder_cumulant),
                            fmt(stats.acceptance_rate)});
    }
    manifest_extra["log_lambda_prefactor"] = prefactors;
  } else if (model == "classical_ising") {
    const double beta_cl_fixed = p.number_or("beta_cl", 0.4);
    const double coupling_x = p.number_or("coupling_x", 1.0);
    const double coupling_y = p.number_or("coupling_y", 1.0);
    const auto boundary =
        parse_boundary(p.string_or("boundary_x", "periodic"), "boundary_x");
    p.reject_unknown();
    table.header = {"beta_cl",
                    "abs_magnetization",
                    "abs_magnetization_stderr",
                    "energy_per_site",
                    "energy_per_site_stderr",
                    "binder_cumulant",
                    "acceptance_rate"};
    for (const auto& point : points) {
      double beta_cl = beta_cl_fixed;
      if (point.parameter) {
        if (*point.parameter != "beta_cl")
          throw ConfigError(
              "sweep parameter must be 'beta_cl' for the classical model",
              "sweep");
        beta_cl = point.value;
      }
      check_range(beta_cl >= 0.0, "beta_cl", "must be >= 0");
      auto lattice = qmc::ClassicalLattice2D::polarized(
          int(n_x), int(n_y), coupling_x, coupling_y, boundary);
      const auto stats = qmc::metropolis_run(std::move(lattice), beta_cl, sweeps,
                                             thermalization, point.seed);
      table.rows.push_back(
          {fmt(beta_cl), fmt(stats.mean_abs_magnetization),
           fmt(stats.stderr_abs_magnetization), fmt(stats.mean_energy_per_site),
           fmt(stats.stderr_energy_per_site), fmt(stats.binder_cumulant),
           fmt(stats.acceptance_rate)});
    }
  } else {
    throw ConfigError("model must be 'tfim' or 'classical_ising'", "model");
  }
  return table;
}

Table run_dmrg(const json& config, const std::vector<SweepPoint>& points) {
  Params p(config);
  const long long n = p.integer("n");
  check_range(n >= 4 && n % 2 == 0 && n <= 64, "n",
              "must be even and in [4, 64]");
  const double g_fixed = p.number_or("g", 1.0);
  const long long d_fixed = p.integer_or("d_max", 16);
  const long long sweep_count = p.integer_or("sweeps", 3);
  check_range(sweep_count >= 1, "sweeps", "must be >= 1");
  const double tolerance = p.number_or("tolerance", 1e-9);
  check_range(tolerance > 0.0, "tolerance", "must be positive");
  p.reject_unknown();

  Table table;
  table.header = {"n",      "g",
                  "d_max",  "energy",
                  "energy_per_bond", "truncation_epsilon",
                  "entropy_mid",     "sweeps"};
  for (const auto& point : points) {
    double g = g_fixed;
    long long d = d_fixed;
    if (point.parameter) {
      if (*point.parameter == "g")
        g = point.value;
      else if (*point.parameter == "d_max")
        d = static_cast<long long>(point.value);
      else
        throw ConfigError("sweep parameter must be 'g' or 'd_max'", "sweep");
    }
    check_range(d >= 2, "d_max", "must be >= 2");
    dmrg::DmrgConfig cfg;
    cfg.d_max = int(d);
    cfg.target_length = int(n);
    cfg.g = g;
    cfg.energy_tolerance = tolerance;
    cfg.sweep_count = int(sweep_count);
    cfg.seed = point.seed;
    const auto result = dmrg::finite_dmrg(cfg);
    table.rows.push_back({fmt_int(n), fmt(g), fmt_int(d), fmt(result.energy),
                          fmt(result.energy_per_bond),
                          fmt(result.final_truncation.discarded_weight),
                          fmt(result.entanglement_entropy_mid),
                          fmt_int(result.sweeps_performed)});
  }
  return table;
}

Table run_circuit_method(const json& config, const RunOptions& opts) {
  Params p(config);
  const long long n_qubits = p.integer_or("n_qubits", -1);
  std::string path = p.string_or("circuit_file", "");
  if (!opts.circuit_path.empty()) path = opts.circuit_path;
  p.reject_unknown();
  if (path.empty())
    throw ConfigError("circuit method needs 'circuit_file' or --circuit",
                      "circuit_file");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open circuit file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const auto c = circuit::parse_circuit(text, int(n_qubits));
  check_range(c.n_qubits >= 1 && c.n_qubits <= 20, "n_qubits",
              "must be in [1, 20]");
  auto reg = circuit::QubitRegister::basis(c.n_qubits, 0);
  reg = circuit::run_circuit(reg, c);
  Table table;
  table.header = {"basis_index", "re", "im", "probability"};
  for (std::size_t i = 0; i < reg.dimension(); ++i) {
    const cplx a = reg.amplitudes[i];
    table.rows.push_back({fmt_int(static_cast<long long>(i)), fmt(a.real()),
                          fmt(a.imag()), fmt(std::norm(a))});
  }
  return table;
}

Table run_coldatoms(const json& config, const std::vector<SweepPoint>& points) {
  Params p(config);
  const std::string model = p.string_or("model", "helium");
  Table table;
  if (model == "helium") {
    p.reject_unknown();
    const auto m = coldatoms::helium_minimize();
    table.header = {"z_star", "e_min"};
    table.rows.push_back({fmt(m.z_star), fmt(m.e_min)});
  } else if (model == "bose_hubbard") {
    const long long n_star = p.integer_or("n_star", 1);
    check_range(n_star >= 1, "n_star", "must be >= 1");
    const double zj_fixed = p.number_or("zj_over_u", 0.0);
    p.reject_unknown();
    table.header = {"n_star",          "zj_over_u",       "u_c_over_zj",
                    "mu_lower_over_u", "mu_upper_over_u", "lobe_closed"};
    for (const auto& point : points) {
      double zj = zj_fixed;
      if (point.parameter) {
        if (*point.parameter != "zj_over_u")
          throw ConfigError("sweep parameter must be 'zj_over_u'", "sweep");
        zj = point.value;
      }
      check_range(zj >= 0.0, "zj_over_u", "must be >= 0");
      const auto lobe = coldatoms::mott_lobes(int(n_star), zj);
      table.rows.push_back({fmt_int(n_star), fmt(zj),
                            fmt(coldatoms::bh_critical_point(int(n_star))),
                            fmt(lobe.mu_lower_over_u), fmt(lobe.mu_upper_over_u),
                            lobe.closed ? "1" : "0"});
    }
  } else if (model == "band") {
    coldatoms::LatticeParams lp;
    const double v_fixed = p.number_or("v0_over_er", 10.0);
    lp.recoil_er = p.number_or("recoil_er", 1.0);
    lp.k_l = p.number_or("k_l", 1.0);
    lp.a_s = p.number_or("a_s", 0.0);
    p.reject_unknown();
    table.header = {"v0_over_er", "bandwidth", "j_hop",
                    "a_osc",      "u_onsite",  "shallow_lattice"};
    for (const auto& point : points) {
      lp.v0_over_er = v_fixed;
      if (point.parameter) {
        if (*point.parameter != "v0_over_er")
          throw ConfigError("sweep parameter must be 'v0_over_er'", "sweep");
        lp.v0_over_er = point.value;
      }
      check_range(lp.v0_over_er > 0.0, "v0_over_er", "must be positive");
      const auto band = coldatoms::band_parameters(lp);
      table.rows.push_back({fmt(lp.v0_over_er), fmt(band.bandwidth),
                            fmt(band.j_hop), fmt(band.a_osc), fmt(band.u_onsite),
                            band.shallow_lattice ? "1" : "0"});
    }
  } else {
    throw ConfigError("model must be 'helium', 'bose_hubbard', or 'band'",
                      "model");
  }
  return table;
}

// -------------------------------------------------------------- framework

std::vector<SweepPoint> sweep_points(const json& config, std::uint64_t seed) {
  std::vector<SweepPoint> points;
  if (!config.contains("sweep")) {
    points.push_back({std::nullopt, 0.0, seed});
    return points;
  }
  const json& sweep = config["sweep"];
  if (!sweep.is_object() || !sweep.contains("parameter") ||
      !sweep.contains("values"))
    throw ConfigError("sweep needs 'parameter' and 'values'", "sweep");
  for (const auto& [key, value] : sweep.items())
    if (key != "parameter" && key != "values")
      throw ConfigError("unknown key 'sweep." + key + "'", "sweep." + key);
  if (!sweep["parameter"].is_string())
    throw ConfigError("sweep.parameter must be a string", "sweep.parameter");
  if (!sweep["values"].is_array() || sweep["values"].empty())
    throw ConfigError("sweep.values must be a non-empty array", "sweep.values");
  const std::string parameter = sweep["parameter"].get<std::string>();
  std::vector<double> values;
  for (const auto& v : sweep["values"]) {
    if (!v.is_number())
      throw ConfigError("sweep.values must be numbers", "sweep.values");
    values.push_back(v.get<double>());
  }
  std::sort(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i)
    points.push_back({parameter, values[i], seed ^ splitmix64(i)});
  return points;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << bytes;
}

std::string render_csv(const Table& table) {
  std::string out;
  auto row_join = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  };
  row_join(table.header);
  for (const auto& row : table.rows) row_join(row);
  return out;
}

std::string render_json(const Table& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      // Numbers stay numbers; anything unparsable stays a string.
      try {
        obj[table.header[i]] = parse_double(row[i]);
      } catch (const std::invalid_argument&) {
        obj[table.header[i]] = row[i];
      }
    }
    rows.push_back(obj);
  }
  return rows.dump(2) + "\n";
}

}  // namespace

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path, "");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), "");
  }
}

RunManifest run_experiment(const json& config, const RunOptions& opts) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object", "");
  if (!config.contains("method") || !config["method"].is_string())
    throw ConfigError("missing required key 'method'", "method");
  const std::string method = config["method"].get<std::string>();
  if (opts.format != "csv" && opts.format != "json")
    throw ConfigError("format must be 'csv' or 'json'", "format");

  std::uint64_t seed = 0;
  if (config.contains("seed")) {
    if (!config["seed"].is_number_unsigned() && !config["seed"].is_number_integer())
      throw ConfigError("seed must be an unsigned integer", "seed");
    seed = config["seed"].get<std::uint64_t>();
  }
  if (opts.seed_override) seed = *opts.seed_override;

  RunManifest manifest;
  manifest.command = opts.command_line;
  manifest.config_digest = fnv1a_digest(config.dump());
  manifest.seed = seed;
  manifest.started_at = iso_timestamp();
  manifest.toolkit_version = kToolkitVersion;

  const auto points = sweep_points(config, seed);
  json manifest_extra = json::object();
  Table table;
  if (method == "lanczos") {
    table = run_lanczos(config, points, false);
  } else if (method == "ed") {
    table = run_lanczos(config, points, true);
  } else if (method == "qmc") {
    table = run_qmc(config, points, manifest_extra);
  } else if (method == "dmrg") {
    table = run_dmrg(config, points);
  } else if (method == "circuit") {
    table = run_circuit_method(config, opts);
  } else if (method == "coldatoms") {
    table = run_coldatoms(config, points);
  } else {
    throw ConfigError("unknown method '" + method + "'", "method");
  }

  std::filesystem::create_directories(opts.out_dir);
  const std::string stem = (std::filesystem::path(opts.out_dir) / method).string();
  const std::string data_path =
      stem + (opts.format == "csv" ? ".csv" : ".json");
  write_file(data_path,
             opts.format == "csv" ? render_csv(table) : render_json(table));
  manifest.outputs.push_back(data_path);
  manifest.finished_at = iso_timestamp();

  json mj;
  mj["command"] = manifest.command;
  mj["config_digest"] = manifest.config_digest;
  mj["seed"] = manifest.seed;
  mj["started_at"] = manifest.started_at;
  mj["finished_at"] = manifest.finished_at;
  mj["outputs"] = manifest.outputs;
  mj["toolkit_version"] = manifest.toolkit_version;
  if (!manifest_extra.empty()) mj["log"] = manifest_extra;
  write_file(stem + "_manifest.json", mj.dump(2) + "\n");
  return manifest;
}

}  // namespace qmb::cli
