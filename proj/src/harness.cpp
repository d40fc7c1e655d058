#include "hetsec/harness.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "hetsec/benchmark.hpp"
#include "hetsec/metrics.hpp"
#include "hetsec/stb_jmf.hpp"
#include "hetsec/stb_om.hpp"
#include "hetsec/stb_smf.hpp"

namespace hetsec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("not a number in " + what + ": '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("not an integer in " + what + ": '" + s + "'");
  }
}

}  // namespace

const std::vector<std::string>& known_schemes() {
  static const std::vector<std::string> names = {"stb_om", "stb_smf", "stb_jmf", "benchmark", "stb_om_an", "random_an"};
  return names;
}

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep must look like p_m_db=30:45:3");
  Sweep s;
  s.param = text.substr(0, eq);
  const std::string rhs = text.substr(eq + 1);
  if (rhs.find(':') != std::string::npos) {
    const auto parts = split(rhs, ':');
    if (parts.size() != 3) throw ConfigError("range sweep needs lo:hi:step");
    const double lo = to_double(parts[0], "sweep"), hi = to_double(parts[1], "sweep"),
                 step = to_double(parts[2], "sweep");
    if (!(step > 0.0) || hi < lo) throw ConfigError("sweep range needs lo <= hi and step > 0");
    for (int i = 0;; ++i) {
      const double v = lo + i * step;
      if (v > hi + 1e-9 * std::max(1.0, std::abs(hi))) break;
      s.values.push_back(v);
    }
  } else {
    for (const auto& p : split(rhs, ',')) s.values.push_back(to_double(p, "sweep"));
  }
  return s;
}

void ExperimentSpec::validate() const {
  base.validate();
  if (sweep.param != "p_m_db" && sweep.param != "p_f_db") throw ConfigError("sweep parameter must be p_m_db or p_f_db");
  if (sweep.values.empty()) throw ConfigError("sweep has no values");
  for (double v : sweep.values)
    if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");
  if (schemes.empty()) throw ConfigError("no schemes selected");
  for (const auto& s : schemes)
    if (std::find(known_schemes().begin(), known_schemes().end(), s) == known_schemes().end())
      throw ConfigError("unknown scheme '" + s + "'");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (!(random_an_fraction > 0.0 && random_an_fraction < 1.0)) throw ConfigError("random_an_fraction must be in (0, 1)");
  if (!(error_budget >= 0.0 && error_budget <= 1.0)) throw ConfigError("error_budget must be in [0, 1]");
}

ExperimentSpec parse_spec_yaml(const std::string& text) {
  ExperimentSpec spec;
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("bad YAML: ") + e.what());
  }
  if (doc.IsNull()) return spec;
  if (!doc.IsMap()) throw ConfigError("config must be a mapping");
  try {
    static const std::set<std::string> top = {"config",  "sweep", "schemes",         "trials", "seed",
                                              "output", "timing", "random_an_fraction", "error_budget", "trace"};
    for (const auto& kv : doc)
      if (!top.count(kv.first.as<std::string>())) throw ConfigError("unknown key '" + kv.first.as<std::string>() + "'");

    auto& c = spec.base;
    YAML::Node gm, gf;
    if (const auto cfg = doc["config"]) {
      static const std::set<std::string> keys = {"n_m",      "n_f",      "m_users",  "k_users",       "n_coop",
                                                 "p_m_db",   "p_f_db",   "gamma_mu", "gamma_fu",      "cell_radius_m",
                                                 "fbs_intensity"};
      for (const auto& kv : cfg)
        if (!keys.count(kv.first.as<std::string>()))
          throw ConfigError("unknown config key '" + kv.first.as<std::string>() + "'");
      if (cfg["n_m"]) c.n_m = cfg["n_m"].as<int>();
      if (cfg["n_f"]) c.n_f = cfg["n_f"].as<int>();
      if (cfg["m_users"]) c.m_users = cfg["m_users"].as<int>();
      if (cfg["k_users"]) c.k_users = cfg["k_users"].as<int>();
      if (cfg["n_coop"]) c.n_coop = cfg["n_coop"].as<int>();
      if (cfg["p_m_db"]) c.p_m = db_to_linear(cfg["p_m_db"].as<double>());
      if (cfg["p_f_db"]) c.p_f = db_to_linear(cfg["p_f_db"].as<double>());
      if (cfg["cell_radius_m"]) c.cell_radius_m = cfg["cell_radius_m"].as<double>();
      if (cfg["fbs_intensity"]) c.fbs_intensity = cfg["fbs_intensity"].as<double>();
      if (cfg["gamma_mu"]) gm.reset(cfg["gamma_mu"]);
      if (cfg["gamma_fu"]) gf.reset(cfg["gamma_fu"]);
    }
    // targets follow the counts
    const double gm0 = c.gamma_mu.empty() ? 1.0 : c.gamma_mu[0];
    const double gf0 = c.gamma_fu.empty() || c.gamma_fu[0].empty() ? 0.6 : c.gamma_fu[0][0];
    c.set_uniform_targets(gm && gm.IsScalar() ? gm.as<double>() : gm0, gf && gf.IsScalar() ? gf.as<double>() : gf0);
    if (gm && gm.IsSequence()) c.gamma_mu = gm.as<std::vector<double>>();
    if (gf && gf.IsSequence()) c.gamma_fu = gf.as<std::vector<std::vector<double>>>();

    if (const auto sw = doc["sweep"]) {
      if (sw.IsScalar()) {
        spec.sweep = parse_sweep(sw.as<std::string>());
      } else {
        if (!sw["param"]) throw ConfigError("sweep needs a param");
        spec.sweep.param = sw["param"].as<std::string>();
        if (sw["values"])
          spec.sweep.values = sw["values"].as<std::vector<double>>();
        else if (sw["range"])
          spec.sweep = parse_sweep(spec.sweep.param + "=" + sw["range"].as<std::string>());
      }
    }
    if (doc["schemes"]) spec.schemes = doc["schemes"].as<std::vector<std::string>>();
    if (doc["trials"]) spec.trials = doc["trials"].as<int>();
    if (doc["seed"]) spec.seed = doc["seed"].as<std::uint64_t>();
    if (doc["output"]) spec.output = doc["output"].as<std::string>();
    if (doc["timing"]) spec.timing = doc["timing"].as<bool>();
    if (doc["trace"]) spec.trace = doc["trace"].as<bool>();
    if (doc["random_an_fraction"]) spec.random_an_fraction = doc["random_an_fraction"].as<double>();
    if (doc["error_budget"]) spec.error_budget = doc["error_budget"].as<double>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec_yaml(ss.str());
}

bool operator==(const ResultRow& a, const ResultRow& b) {
  return a.scheme == b.scheme && a.sweep_param == b.sweep_param && same(a.sweep_value_db, b.sweep_value_db) &&
         a.trial == b.trial && same(a.secrecy_rate_bits, b.secrecy_rate_bits) && same(a.sinr_mu1, b.sinr_mu1) &&
         same(a.sinr_mu2, b.sinr_mu2) && same(a.sinr_eve, b.sinr_eve) && same(a.sinr_fu_mean, b.sinr_fu_mean) &&
         a.iterations == b.iterations && same(a.solve_ms, b.solve_ms) && a.status == b.status;
}

bool solved(const ResultRow& row) { return row.status == "ok" || row.status == "ok_gamma_fu_0.5"; }

const char* const kCsvHeader =
    "scheme,sweep_param,sweep_value_db,trial,secrecy_rate_bits,sinr_mu1,sinr_mu2,sinr_eve,sinr_fu_mean,iterations,"
    "solve_ms,status";

ChannelSet trial_channels(const NetworkConfig& config, std::uint64_t seed, int trial) {
  return sample_rayleigh_channels(config, stream_seed(seed, static_cast<std::uint64_t>(trial)));
}

NetworkConfig at_sweep_point(const NetworkConfig& base, const std::string& param, double value_db) {
  NetworkConfig c = base;
  if (param == "p_m_db")
    c.p_m = db_to_linear(value_db);
  else if (param == "p_f_db")
    c.p_f = db_to_linear(value_db);
  else
    throw ConfigError("unknown sweep parameter '" + param + "'");
  return c;
}

namespace {

BeamformingSolution solve_one(const std::string& scheme, const ChannelSet& ch, const NetworkConfig& c,
                              const ExperimentSpec& spec, int trial) {
  if (scheme == "stb_om") return solve_stb_om(ch, c);
  if (scheme == "stb_smf") return solve_stb_smf(ch, c);
  if (scheme == "stb_jmf") return solve_stb_jmf(ch, c);
  if (scheme == "benchmark") return solve_benchmark(ch, c);
  if (scheme == "stb_om_an") return solve_stb_om_with_an(ch, c);
  if (scheme == "random_an")
    return solve_random_an(ch, c, stream_seed(stream_seed(spec.seed, static_cast<std::uint64_t>(trial)), 0xA4), spec.random_an_fraction);
  throw ConfigError("unknown scheme '" + scheme + "'");
}

void fill_metrics(ResultRow& r, const ChannelSet& ch, const NetworkConfig& c, const BeamformingSolution& s) {
  r.secrecy_rate_bits = secrecy_rate_clipped(ch, s);
  r.sinr_mu1 = sinr_mu(ch, s, 0);
  r.sinr_mu2 = c.m_users > 1 ? sinr_mu(ch, s, 1) : kNaN;
  r.sinr_eve = sinr_eve(ch, s);
  if (s.w_fu.empty()) {
    r.sinr_fu_mean = kNaN;
  } else {
    double acc = 0.0;
    int cnt = 0;
    for (int n = 0; n < c.n_coop; ++n)
      for (int k = 0; k < c.k_users; ++k, ++cnt) acc += sinr_fu(ch, s, n, k);
    r.sinr_fu_mean = cnt ? acc / cnt : kNaN;
  }
  r.iterations = s.diagnostics.iterations;
}

}  // namespace

std::vector<ResultRow> run_scheme(const std::string& scheme, const ChannelSet& ch, const NetworkConfig& config,
                                  const ExperimentSpec& spec, int trial, BeamformingSolution* solution) {
  ResultRow r;
  r.scheme = scheme;
  r.sweep_param = spec.sweep.param;
  r.sweep_value_db = spec.sweep.param == "p_f_db" ? linear_to_db(config.p_f) : linear_to_db(config.p_m);
  r.trial = trial;
  r.secrecy_rate_bits = r.sinr_mu1 = r.sinr_mu2 = r.sinr_eve = r.sinr_fu_mean = kNaN;
  std::vector<ResultRow> out;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    BeamformingSolution s;
    NetworkConfig used = config;
    r.status = "ok";
    try {
      s = solve_one(scheme, ch, used, spec, trial);
    } catch (const QosInfeasible&) {
      // lower FU target once, for the schemes that carry FU QoS
      if (scheme != "stb_jmf" && scheme != "benchmark") throw;
      used.set_uniform_targets(config.gamma_mu.empty() ? 1.0 : config.gamma_mu[0], 0.5);
      used.gamma_mu = config.gamma_mu;
      s = solve_one(scheme, ch, used, spec, trial);
      r.status = "ok_gamma_fu_0.5";
    }
    fill_metrics(r, ch, used, s);
    if (solution) *solution = s;
    if (spec.trace && !s.diagnostics.trace.empty() && scheme.rfind("stb_om", 0) == 0) {
      for (std::size_t k = 0; k < s.diagnostics.trace.size(); ++k) {
        ResultRow t = r;
        t.secrecy_rate_bits = std::log2(s.diagnostics.trace[k]);
        t.sinr_mu1 = t.sinr_mu2 = t.sinr_eve = t.sinr_fu_mean = kNaN;
        t.iterations = static_cast<int>(k + 1);
        t.solve_ms = 0.0;
        t.status = "trace";
        out.push_back(t);
      }
    }
  } catch (const QosInfeasible&) {
    r.status = "qos_infeasible";
  } catch (const NumericalFailure&) {
    r.status = "numerical_failure";
  } catch (const DegenerateChannel&) {
    r.status = "degenerate_channel";
  } catch (const ConfigError&) {
    r.status = "config_error";
  } catch (const Error&) {
    r.status = "error";
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.solve_ms = spec.timing ? ms : 0.0;
  out.push_back(r);
  return out;
}

ResultTable run_experiment(const ExperimentSpec& spec, const Progress& progress) {
  spec.validate();
  ResultTable table;
  for (double v : spec.sweep.values) {
    const NetworkConfig c = at_sweep_point(spec.base, spec.sweep.param, v);
    for (int t = 0; t < spec.trials; ++t) {
      const ChannelSet ch = trial_channels(c, spec.seed, t);
      for (const auto& scheme : spec.schemes)
        for (auto& row : run_scheme(scheme, ch, c, spec, t)) {
          row.sweep_value_db = v;
          if (progress) progress(row);
          table.rows.push_back(std::move(row));
        }
    }
  }
  return table;
}

std::string to_csv(const ResultTable& table) {
  std::string out = kCsvHeader;
  out += '\n';
  char buf[64];
  auto real = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17e", x);
    out += buf;
    out += ',';
  };
  for (const auto& r : table.rows) {
    out += r.scheme + ',' + r.sweep_param + ',';
    real(r.sweep_value_db);
    out += std::to_string(r.trial) + ',';
    real(r.secrecy_rate_bits);
    real(r.sinr_mu1);
    real(r.sinr_mu2);
    real(r.sinr_eve);
    real(r.sinr_fu_mean);
    out += std::to_string(r.iterations) + ',';
    real(r.solve_ms);
    out += r.status + '\n';
  }
  return out;
}

ResultTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("CSV header does not match the schema");
  ResultTable t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const std::string where = "CSV line " + std::to_string(lineno);
    if (f.size() != 12) throw ConfigError(where + ": expected 12 fields");
    auto num = [&](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
    ResultRow r;
    r.scheme = f[0];
    r.sweep_param = f[1];
    r.sweep_value_db = num(f[2]);
    r.trial = to_int(f[3], where);
    r.secrecy_rate_bits = num(f[4]);
    r.sinr_mu1 = num(f[5]);
    r.sinr_mu2 = num(f[6]);
    r.sinr_eve = num(f[7]);
    r.sinr_fu_mean = num(f[8]);
    r.iterations = to_int(f[9], where);
    r.solve_ms = num(f[10]);
    r.status = f[11];
    t.rows.push_back(std::move(r));
  }
  return t;
}

void write_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << to_csv(table);
  if (!out) throw Error("write to '" + path + "' failed");
}

ResultTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::map<SummaryKey, PointSummary> summarize(const ResultTable& table) {
  std::map<SummaryKey, PointSummary> out;
  std::map<SummaryKey, int> fu_count;
  for (const auto& r : table.rows) {
    if (r.status == "trace") continue;
    const SummaryKey key{r.scheme, r.sweep_param, r.sweep_value_db};
    auto& s = out[key];
    if (!solved(r)) {
      ++s.failed;
      continue;
    }
    ++s.solved;
    s.mean_secrecy += r.secrecy_rate_bits;
    s.mean_iterations += r.iterations;
    if (std::isfinite(r.sinr_fu_mean)) {
      s.mean_fu_sinr += r.sinr_fu_mean;
      ++fu_count[key];
    }
  }
  for (auto& [key, s] : out) {
    if (s.solved > 0) {
      s.mean_secrecy /= s.solved;
      s.mean_iterations /= s.solved;
    } else {
      s.mean_secrecy = s.mean_iterations = kNaN;
    }
    const int n = fu_count[key];
    s.mean_fu_sinr = n > 0 ? s.mean_fu_sinr / n : kNaN;
  }
  return out;
}

double failure_rate(const ResultTable& table) {
  int total = 0, bad = 0;
  for (const auto& r : table.rows) {
    if (r.status == "trace") continue;
    ++total;
    if (!solved(r)) ++bad;
  }
  return total ? static_cast<double>(bad) / total : 0.0;
}

std::vector<ExperimentSpec> figure_specs(const std::string& name, int trials, std::uint64_t seed) {
  ExperimentSpec s;
  s.trials = trials;
  s.seed = seed;
  s.output = name + ".csv";
  const std::vector<double> pm = {30, 33, 36, 39, 42, 45};
  const std::vector<double> pf = {20, 25, 30, 35, 40};
  if (name == "fig3") {
    s.sweep = {"p_m_db", {30.0, 40.0, 45.0}};
    s.schemes = {"stb_om"};
    s.trace = true;
    return {s};
  }
  if (name == "fig6") {
    s.sweep = {"p_m_db", pm};
    s.schemes = {"stb_smf", "stb_jmf", "stb_om", "benchmark"};
    return {s};
  }
  if (name == "fig7") {
    s.sweep = {"p_f_db", pf};
    s.schemes = {"stb_smf", "stb_jmf", "stb_om", "benchmark"};
    return {s};
  }
  if (name == "fig8") {
    // one p_m sweep per FBS power; the sweep column carries both coordinates
    std::vector<ExperimentSpec> out;
    for (double f : {20.0, 30.0, 40.0}) {
      ExperimentSpec t = s;
      t.base.p_f = db_to_linear(f);
      t.sweep = {"p_m_db", {30, 35, 40, 45}};
      t.schemes = {"stb_smf", "stb_jmf"};
      out.push_back(t);
    }
    return out;
  }
  if (name == "fig9") {
    s.sweep = {"p_m_db", pm};
    s.schemes = {"stb_smf", "stb_jmf"};
    return {s};
  }
  if (name == "fig10") {
    s.sweep = {"p_f_db", pf};
    s.schemes = {"stb_smf", "stb_jmf"};
    return {s};
  }
  throw ConfigError("unknown figure '" + name + "' (fig3, fig6, fig7, fig8, fig9, fig10)");
}

ResultTable run_figure(const std::string& name, int trials, std::uint64_t seed, const Progress& progress) {
  ResultTable all;
  for (const auto& spec : figure_specs(name, trials, seed)) {
    ResultTable t = run_experiment(spec, progress);
    if (name == "fig8") {
      char tag[64];
      std::snprintf(tag, sizeof tag, "p_m_db@p_f_db=%g", linear_to_db(spec.base.p_f));
      for (auto& r : t.rows) r.sweep_param = tag;
    }
    all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
  }
  return all;
}

std::vector<std::string> verify_invariants(const NetworkConfig& c, int trials, std::uint64_t seed) {
  c.validate_for_null_space();
  std::vector<std::string> bad;
  auto fail = [&](int t, const std::string& what) { bad.push_back("trial " + std::to_string(t) + ": " + what); };
  const double tol = 1e-6;
  auto powers = [&](int t, const std::string& name, const BeamformingSolution& s) {
    if (s.mbs_power() > c.p_m * (1 + tol)) fail(t, name + " MBS power over budget");
    for (int n = 0; n < static_cast<int>(s.w_fu.size()); ++n)
      if (s.fbs_power(n) > c.p_f * (1 + tol)) fail(t, name + " FBS power over budget");
  };
  for (int t = 0; t < trials; ++t) {
    const ChannelSet ch = trial_channels(c, seed, t);
    auto qos = [&](const std::string& name, const BeamformingSolution& s, bool fu) {
      for (int m = 1; m < c.m_users; ++m)
        if (sinr_mu(ch, s, m) < c.gamma_mu[m - 1] * (1 - tol)) fail(t, name + " MU QoS violated");
      if (fu)
        for (int n = 0; n < c.n_coop; ++n)
          for (int k = 0; k < c.k_users; ++k)
            if (sinr_fu(ch, s, n, k) < c.gamma_fu[n][k] * (1 - tol)) fail(t, name + " FU QoS violated");
    };
    try {
      const BeamformingSolution om = solve_stb_om(ch, c);
      powers(t, "stb_om", om);
      qos("stb_om", om, false);
      const auto& tr = om.diagnostics.trace;
      for (std::size_t k = 1; k < tr.size(); ++k)
        if (tr[k] < tr[k - 1] * (1 - tol)) fail(t, "stb_om objective decreased");

      const BeamformingSolution smf = solve_stb_smf(ch, c);
      powers(t, "stb_smf", smf);
      qos("stb_smf", smf, false);
      for (int n = 0; n < c.n_coop; ++n)
        for (const auto& w : smf.w_fu[n])
          for (int m = 0; m < c.m_users; ++m)
            if (std::abs((ch.h_fbs_mu[n][m] * w).value()) > 1e-8 * std::sqrt(c.p_f)) fail(t, "stb_smf leaks into an MU");
      if (secrecy_rate(ch, smf) < secrecy_rate(ch, om) - tol) fail(t, "stb_smf below stb_om");

      const BeamformingSolution jmf = solve_stb_jmf(ch, c);
      powers(t, "stb_jmf", jmf);
      if (jmf.diagnostics.randomized_blocks == 0) qos("stb_jmf", jmf, true);

      const BeamformingSolution bm = solve_benchmark(ch, c);
      powers(t, "benchmark", bm);
      if (bm.diagnostics.randomized_blocks == 0) qos("benchmark", bm, true);
    } catch (const Error& e) {
      fail(t, std::string("solver error: ") + e.what());
    }
  }
  return bad;
}

}  // namespace hetsec
