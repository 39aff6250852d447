#include <CLI11.hpp>

#include "gipnm/channels.hpp"
#include "gipnm/gip.hpp"
#include "gipnm/io.hpp"
#include "gipnm/nonmarkov.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace gipnm;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string model = "damping";
  std::vector<double> alpha{0.1};
  std::vector<double> nbar{1.0};
  double temp = 0.0;
  double w0 = 4.0;
  double wc = 1.0;
  std::string probe = "sts";
  double k = 1.0;
  double tmax = 8.0;
  double dt = 0.0;  // 0 = auto (0.01 for damping, min(0.01, pi/(50 w0)) for qbm)
  double eps = 1e-5;
  std::uint64_t seed = 1;
  std::string out;
  int random = 0;
  bool qbm_lambda2_literal = false;
};

// Minimal flat-TOML reader: `key = value` lines, optional quotes, [a, b]
// arrays of numbers, # comments. Section headers are rejected.
std::map<std::string, std::string> read_toml(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open config file: " + path);
  }
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": sections are not supported, use flat keys");
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && ((val.front() == '"' && val.back() == '"') ||
                            (val.front() == '\'' && val.back() == '\''))) {
      val = val.substr(1, val.size() - 2);
    }
    kv[key] = val;
  }
  return kv;
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::string body = text;
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') {
      throw ValidationError("config key '" + key + "': unterminated array");
    }
    body = body.substr(1, body.size() - 2);
  }
  std::vector<double> vals;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::istringstream field(tok);
    double v;
    if (!(field >> v)) {
      throw ValidationError("config key '" + key + "': non-numeric entry '" + tok + "'");
    }
    vals.push_back(v);
  }
  if (vals.empty()) {
    throw ValidationError("config key '" + key + "': empty list");
  }
  return vals;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  const auto kv = read_toml(path);
  for (const auto& [key, val] : kv) {
    auto as_double = [&](const char* name) {
      std::istringstream in(val);
      double v;
      if (!(in >> v)) {
        throw ValidationError(std::string("config key '") + name + "': not a number: " + val);
      }
      return v;
    };
    if (key == "model") {
      cfg.model = val;
    } else if (key == "alpha") {
      cfg.alpha = parse_list(val, key);
    } else if (key == "nbar") {
      cfg.nbar = parse_list(val, key);
    } else if (key == "temp") {
      cfg.temp = as_double("temp");
    } else if (key == "w0") {
      cfg.w0 = as_double("w0");
    } else if (key == "wc") {
      cfg.wc = as_double("wc");
    } else if (key == "probe") {
      cfg.probe = val;
    } else if (key == "k") {
      cfg.k = as_double("k");
    } else if (key == "tmax") {
      cfg.tmax = as_double("tmax");
    } else if (key == "dt") {
      cfg.dt = as_double("dt");
    } else if (key == "eps") {
      cfg.eps = as_double("eps");
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(as_double("seed"));
    } else if (key == "out") {
      cfg.out = val;
    } else if (key == "random") {
      cfg.random = static_cast<int>(as_double("random"));
    } else if (key == "qbm_lambda2_literal") {
      if (val == "true") {
        cfg.qbm_lambda2_literal = true;
      } else if (val == "false") {
        cfg.qbm_lambda2_literal = false;
      } else {
        throw ValidationError("config key 'qbm_lambda2_literal': expected true or false");
      }
    } else {
      throw ValidationError("config: unknown key '" + key + "'");
    }
  }
}

std::string join(const std::vector<double>& v) {
  std::ostringstream ss;
  ss << std::setprecision(12);
  for (std::size_t j = 0; j < v.size(); ++j) {
    ss << (j ? "," : "") << v[j];
  }
  return ss.str();
}

std::string config_echo(const RunConfig& cfg, const std::string& command) {
  std::ostringstream ss;
  ss << std::setprecision(12);
  ss << "# command=" << command << " model=" << cfg.model << " alpha=[" << join(cfg.alpha)
     << "] nbar=[" << join(cfg.nbar) << "] temp=" << cfg.temp << " w0=" << cfg.w0
     << " wc=" << cfg.wc << " probe=" << cfg.probe << " k=" << cfg.k << " tmax=" << cfg.tmax
     << " dt=" << cfg.dt << " eps=" << cfg.eps << " seed=" << cfg.seed
     << " random=" << cfg.random
     << " qbm_lambda2_literal=" << (cfg.qbm_lambda2_literal ? "true" : "false");
  return ss.str();
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) {
    return std::cout;
  }
  file.open(path);
  if (!file) {
    throw ValidationError("cannot write output file: " + path);
  }
  return file;
}

double resolved_dt(const RunConfig& cfg) {
  if (cfg.dt > 0.0) {
    return cfg.dt;
  }
  if (cfg.model == "qbm") {
    return std::min(0.01, std::numbers::pi / (50.0 * cfg.w0));
  }
  return 0.01;
}

TwoModeCovariance make_probe(const RunConfig& cfg, double nbar, std::uint64_t seed) {
  if (cfg.probe == "sts") {
    return sts_at_energy(cfg.k, nbar);
  }
  if (cfg.probe == "mts") {
    return mts_at_energy(cfg.k, nbar);
  }
  if (cfg.probe == "random") {
    return random_state(nbar, seed);
  }
  if (cfg.probe.rfind("file:", 0) == 0) {
    return read_sigma(cfg.probe.substr(5));
  }
  throw ValidationError("unknown probe '" + cfg.probe + "' (expected sts, mts, random, file:<path>)");
}

std::unique_ptr<GaussianChannel> make_channel(const RunConfig& cfg, double alpha,
                                              std::shared_ptr<const QbmCoefficients> coeffs) {
  if (cfg.model == "damping") {
    return std::make_unique<DampingModel>(DampingModel::default_pulse(alpha));
  }
  if (cfg.model == "qbm") {
    return std::make_unique<QbmModel>(std::move(coeffs), alpha, cfg.qbm_lambda2_literal);
  }
  throw ValidationError("unknown model '" + cfg.model + "' (expected damping or qbm)");
}

std::shared_ptr<const QbmCoefficients> make_coeffs(const RunConfig& cfg) {
  if (cfg.model != "qbm") {
    return nullptr;
  }
  QbmParams params;
  params.temperature = cfg.temp;
  params.omega0 = cfg.w0;
  params.omegac = cfg.wc;
  if (params.omega0 <= 0.0 || params.omegac <= 0.0 || params.temperature < 0.0) {
    throw ValidationError("qbm requires w0 > 0, wc > 0, temp >= 0");
  }
  return std::make_shared<QbmCoefficients>(params, cfg.tmax + 0.1);
}

struct CellResult {
  double alpha = 0.0;
  double nbar = 0.0;
  std::string probe;
  double nq = 0.0;
  double nd = 0.0;
};

std::string witness_header = "alpha,nbar,T,w0,wc,probe,NQ_sigma,ND";

void write_rows(std::ostream& out, const RunConfig& cfg, const std::vector<CellResult>& rows) {
  out << std::setprecision(12);
  for (const auto& row : rows) {
    out << row.alpha << "," << row.nbar << "," << cfg.temp << "," << cfg.w0 << "," << cfg.wc
        << "," << row.probe << "," << row.nq << "," << row.nd << "\n";
  }
}

int cmd_gip(const std::string& path) {
  const auto sigma = read_sigma(path);
  if (!bona_fide_check(sigma)) {
    throw ValidationError("input covariance matrix is not a bona fide state: " + path);
  }
  std::cout << std::setprecision(12) << gip_general(sigma).value << "\n";
  return 0;
}

int cmd_damping_sweep(const RunConfig& cfg) {
  const double dt = resolved_dt(cfg);
  struct Cell {
    double alpha;
    double nbar;
    std::string probe;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double a : cfg.alpha) {
    for (double n : cfg.nbar) {
      cells.push_back({a, n, cfg.probe, cfg.seed});
    }
  }
  // extra random-probe rows with seeded energies and sub-seeds
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unbar(cfg.nbar.front(),
                                               cfg.nbar.size() > 1 ? cfg.nbar.back()
                                                                   : cfg.nbar.front());
  for (int j = 0; j < cfg.random; ++j) {
    const double n = unbar(rng);
    cells.push_back({cfg.alpha.front(), n, "random", rng()});
  }
  if (cells.size() > 100000) {
    std::cerr << "warning: sweep has " << cells.size() << " cells (> 1e5)\n";
  }
  std::vector<CellResult> rows(cells.size());
  std::vector<std::future<void>> jobs;
  std::atomic<std::size_t> next{0};
  const unsigned n_workers = std::max(1u, std::thread::hardware_concurrency());
  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= cells.size()) {
        return;
      }
      const auto& cell = cells[j];
      RunConfig local = cfg;
      local.probe = cell.probe;
      auto model = DampingModel::default_pulse(cell.alpha);
      auto probe = make_probe(local, cell.nbar, cell.seed);
      auto w = witness(model, probe, cfg.tmax, dt);
      auto d = divisibility_ND(model, cfg.tmax, dt, cfg.eps);
      rows[j] = {cell.alpha, cell.nbar, cell.probe, w.nq_sigma, d.nd};
    }
  };
  for (unsigned j = 0; j < n_workers; ++j) {
    jobs.push_back(std::async(std::launch::async, worker));
  }
  for (auto& job : jobs) {
    job.get();
  }
  std::ofstream file;
  auto& out = open_output(file, cfg.out);
  out << config_echo(cfg, "damping-sweep") << "\n" << witness_header << "\n";
  write_rows(out, cfg, rows);
  return 0;
}

int cmd_qbm_sweep(RunConfig cfg) {
  cfg.model = "qbm";
  const double dt = resolved_dt(cfg);
  auto coeffs = make_coeffs(cfg);
  const double nbar = cfg.nbar.front();
  std::vector<CellResult> rows(2 * cfg.alpha.size());
  std::vector<std::future<void>> jobs;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= rows.size()) {
        return;
      }
      const double a = cfg.alpha[j / 2];
      const bool sts = (j % 2 == 0);
      QbmModel model(coeffs, a);
      auto probe = sts ? sts_at_energy(1.0, nbar) : mts_at_energy(1.0, nbar);
      auto w = witness(model, probe, cfg.tmax, dt);
      auto d = divisibility_ND(model, cfg.tmax, dt, cfg.eps);
      rows[j] = {a, nbar, sts ? "sts" : "mts", w.nq_sigma, d.nd};
    }
  };
  const unsigned n_workers = std::max(1u, std::thread::hardware_concurrency());
  for (unsigned j = 0; j < n_workers; ++j) {
    jobs.push_back(std::async(std::launch::async, worker));
  }
  for (auto& job : jobs) {
    job.get();
  }
  std::ofstream file;
  auto& out = open_output(file, cfg.out);
  out << config_echo(cfg, "qbm-sweep") << "\n" << witness_header << "\n";
  write_rows(out, cfg, rows);
  return 0;
}

int cmd_coeffs(RunConfig cfg) {
  cfg.model = "qbm";
  const double dt = cfg.dt > 0.0 ? cfg.dt : 0.05;
  auto coeffs = make_coeffs(cfg);
  std::ofstream file;
  auto& out = open_output(file, cfg.out);
  out << config_echo(cfg, "coeffs") << "\n"
      << "t,delta,gamma,delta_plus_gamma_over_2,delta_minus_gamma_over_2\n";
  out << std::setprecision(12);
  for (double t = 0.0; t <= cfg.tmax + 1e-12; t += dt) {
    const double d = coeffs->delta(t);
    const double g = coeffs->gamma(t);
    out << t << "," << d << "," << g << "," << 0.5 * (d + g) << "," << 0.5 * (d - g) << "\n";
  }
  return 0;
}

int cmd_witness(const RunConfig& cfg) {
  const double dt = resolved_dt(cfg);
  auto coeffs = make_coeffs(cfg);
  auto channel = make_channel(cfg, cfg.alpha.front(), coeffs);
  auto probe = make_probe(cfg, cfg.nbar.front(), cfg.seed);
  auto w = witness(*channel, probe, cfg.tmax, dt);
  auto d = divisibility_ND(*channel, cfg.tmax, dt, cfg.eps);
  std::ofstream file;
  auto& out = open_output(file, cfg.out);
  out << config_echo(cfg, "witness") << "\n" << witness_header << "\n";
  write_rows(out, cfg, {{cfg.alpha.front(), cfg.nbar.front(), cfg.probe, w.nq_sigma, d.nd}});
  return 0;
}

int cmd_measure(const RunConfig& cfg) {
  auto coeffs = make_coeffs(cfg);
  auto channel = make_channel(cfg, cfg.alpha.front(), coeffs);
  SearchConfig search;
  search.t_max = cfg.tmax;
  search.dt = resolved_dt(cfg);
  search.seed = cfg.seed;
  if (cfg.random > 0) {
    search.n_random = cfg.random;
  }
  auto res = measure(*channel, cfg.nbar.front(), search);
  std::ofstream file;
  auto& out = open_output(file, cfg.out);
  out << config_echo(cfg, "measure") << "\n";
  out << std::setprecision(12) << "NQ=" << res.nq << " family=" << to_string(res.family)
      << " probe=(" << res.argmax_probe.a << "," << res.argmax_probe.b << ","
      << res.argmax_probe.c << "," << res.argmax_probe.d << ") evaluations="
      << res.evaluations << "\n";
  return 0;
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "TOML config file (flags override)");
  cmd->add_option("--model", cfg.model, "channel model: damping | qbm");
  cmd->add_option("--alpha", cfg.alpha, "coupling constant(s)")->delimiter(',');
  cmd->add_option("--nbar", cfg.nbar, "per-mode mean excitation number(s)")->delimiter(',');
  cmd->add_option("--temp", cfg.temp, "scaled bath temperature (qbm)");
  cmd->add_option("--w0", cfg.w0, "system frequency (qbm)");
  cmd->add_option("--wc", cfg.wc, "Ohmic cutoff (qbm)");
  cmd->add_option("--probe", cfg.probe, "probe: sts | mts | random | file:<path>");
  cmd->add_option("--k", cfg.k, "probe mixedness parameter");
  cmd->add_option("--tmax", cfg.tmax, "integration horizon");
  cmd->add_option("--dt", cfg.dt, "trajectory time step (0 = auto)");
  cmd->add_option("--eps", cfg.eps, "intermediate-map step for the divisibility rate");
  cmd->add_option("--seed", cfg.seed, "RNG seed");
  cmd->add_option("--out", cfg.out, "output CSV path (default stdout)");
  cmd->add_option("--random", cfg.random, "number of random probes");
  cmd->add_flag("--qbm-lambda2-literal", cfg.qbm_lambda2_literal,
                "use the uncorrected qbm noise normalization (not completely positive; "
                "reproduces the classic backflow phenomenology)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian interferometric power non-Markovianity toolkit"};
  app.require_subcommand(1);

  std::string gip_input;
  auto* gip_cmd = app.add_subcommand("gip", "GIP of a covariance-matrix file");
  gip_cmd->add_option("input", gip_input, "JSON or CSV covariance file")->required();

  RunConfig cfg;
  std::string config_path;
  auto* damping_cmd = app.add_subcommand("damping-sweep", "witness/ND sweep, damping channel");
  auto* qbm_cmd = app.add_subcommand("qbm-sweep", "witness/ND sweep over alpha, QBM channel");
  auto* coeffs_cmd = app.add_subcommand("coeffs", "dump QBM coefficients Delta, gamma");
  auto* witness_cmd = app.add_subcommand("witness", "witness and ND for a single probe");
  auto* measure_cmd = app.add_subcommand("measure", "maximize the witness over probes");
  for (auto* cmd : {damping_cmd, qbm_cmd, coeffs_cmd, witness_cmd, measure_cmd}) {
    add_common_flags(cmd, cfg, config_path);
  }

  try {
    // two-pass parse so config-file values sit below CLI flags
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : kExitValidation;
    }
    if (!config_path.empty()) {
      apply_config_file(cfg, config_path);
      try {
        app.clear();
        app.parse(argc, argv);
      } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
      }
    }
    if (gip_cmd->parsed()) {
      return cmd_gip(gip_input);
    }
    if (damping_cmd->parsed()) {
      return cmd_damping_sweep(cfg);
    }
    if (qbm_cmd->parsed()) {
      return cmd_qbm_sweep(cfg);
    }
    if (coeffs_cmd->parsed()) {
      return cmd_coeffs(cfg);
    }
    if (witness_cmd->parsed()) {
      return cmd_witness(cfg);
    }
    if (measure_cmd->parsed()) {
      return cmd_measure(cfg);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
