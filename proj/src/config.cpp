#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "qmeter/cloning.hpp"
#include "qmeter/experiment.hpp"

namespace qmeter {

using nlohmann::json;
using nlohmann::ordered_json;

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::StrongRepeat: return "strong-repeat";
    case Scheme::WeakRepeat: return "weak-repeat";
    case Scheme::ProtectiveBranch: return "protective-branch";
    case Scheme::TwoQubitProtective: return "two-qubit-protective";
    case Scheme::InfoClone: return "info-clone";
    case Scheme::OptimalClone: return "optimal-clone";
    case Scheme::LinearityProbe: return "linearity-probe";
    case Scheme::NoCloning: return "nocloning";
  }
  throw std::logic_error("unhandled scheme");
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::StrongRepeat, Scheme::WeakRepeat, Scheme::ProtectiveBranch,
                   Scheme::TwoQubitProtective, Scheme::InfoClone, Scheme::OptimalClone,
                   Scheme::LinearityProbe, Scheme::NoCloning}) {
    if (scheme_name(s) == name) return s;
  }
  throw ConfigError("unknown scheme \"" + name + "\"");
}

bool scheme_samples(Scheme s) {
  return s != Scheme::TwoQubitProtective && s != Scheme::LinearityProbe;
}

bool scheme_classifies(Scheme s) {
  switch (s) {
    case Scheme::StrongRepeat:
    case Scheme::WeakRepeat:
    case Scheme::ProtectiveBranch:
    case Scheme::InfoClone:
    case Scheme::OptimalClone:
      return true;
    default:
      return false;
  }
}

namespace {

// Which config sections apply to which scheme.
bool scheme_uses_observable(Scheme s) {
  return s == Scheme::StrongRepeat || s == Scheme::WeakRepeat || s == Scheme::ProtectiveBranch;
}

bool scheme_uses_alpha(Scheme s) { return s == Scheme::InfoClone || s == Scheme::OptimalClone; }

bool scheme_writes_records(Scheme s) {
  return s != Scheme::LinearityProbe && s != Scheme::TwoQubitProtective;
}

bool scheme_writes_plot(Scheme s) {
  return s != Scheme::LinearityProbe && s != Scheme::NoCloning;
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

[[noreturn]] void fail_not_used(const std::string& field, Scheme scheme) {
  fail("field \"" + field + "\" is not used by scheme \"" + scheme_name(scheme) + "\"");
}

const json* find_key(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &it.value();
}

const json& require_key(const json& obj, const char* key, const std::string& where) {
  const json* v = find_key(obj, key);
  if (!v) fail("missing required field \"" + (where.empty() ? key : where + "." + key) + "\"");
  return *v;
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail("field \"" + where + "\" must be an object");
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail("unknown field \"" + (where.empty() ? it.key() : where + "." + it.key()) + "\"");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail("field \"" + where + "\" must be a number");
  return j.get<double>();
}

double get_positive(const json& j, const std::string& where) {
  double v = get_number(j, where);
  if (!(v > 0.0)) fail("field \"" + where + "\" must be > 0");
  return v;
}

double get_nonnegative(const json& j, const std::string& where) {
  double v = get_number(j, where);
  if (!(v >= 0.0)) fail("field \"" + where + "\" must be >= 0");
  return v;
}

std::uint64_t get_u64(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) fail("field \"" + where + "\" must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::size_t get_count(const json& j, const std::string& where, std::size_t min_value) {
  std::uint64_t v = get_u64(j, where);
  if (v < min_value) fail("field \"" + where + "\" must be >= " + std::to_string(min_value));
  return static_cast<std::size_t>(v);
}

cdouble get_complex(const json& j, const std::string& where) {
  if (j.is_number()) return cdouble(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cdouble(j[0].get<double>(), j[1].get<double>());
  fail("field \"" + where + "\" must be a number or an [re, im] pair");
}

std::vector<cdouble> get_amplitudes(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() < 2)
    fail("field \"" + where + "\" must be an array of at least two amplitudes");
  std::vector<cdouble> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_complex(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> get_number_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail("field \"" + where + "\" must be a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

CMatrix get_complex_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail("field \"" + where + "\" must be a non-empty array of rows");
  const std::size_t n = j.size();
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const json& row = j[r];
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != n)
      fail("field \"" + row_where + "\" must be a row of " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          get_complex(row[c], row_where + "[" + std::to_string(c) + "]");
  }
  return m;
}

CVector to_cvector(const std::vector<cdouble>& amps) {
  CVector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  return v;
}

void parse_params(const json& doc, ExperimentConfig& cfg) {
  const json& p = require_key(doc, "params", "");
  require_object(p, "params");
  switch (cfg.scheme) {
    case Scheme::StrongRepeat:
      check_keys(p, "params", {"steps"});
      cfg.steps = get_count(require_key(p, "steps", "params"), "params.steps", 1);
      break;
    case Scheme::WeakRepeat:
      check_keys(p, "params", {"delta_p", "steps"});
      cfg.delta_p = get_positive(require_key(p, "delta_p", "params"), "params.delta_p");
      cfg.steps = get_count(require_key(p, "steps", "params"), "params.steps", 1);
      break;
    case Scheme::ProtectiveBranch:
      check_keys(p, "params", {"t_total", "r0", "c2", "c3", "c4"});
      cfg.t_total = get_positive(require_key(p, "t_total", "params"), "params.t_total");
      if (const json* j = find_key(p, "r0")) cfg.r0 = get_number(*j, "params.r0");
      if (const json* j = find_key(p, "c2")) cfg.c2 = get_nonnegative(*j, "params.c2");
      if (const json* j = find_key(p, "c3")) cfg.c3 = get_nonnegative(*j, "params.c3");
      if (const json* j = find_key(p, "c4")) cfg.c4 = get_nonnegative(*j, "params.c4");
      break;
    case Scheme::TwoQubitProtective: {
      check_keys(p, "params", {"t_grid", "gap", "ramp", "substeps"});
      cfg.t_grid = get_number_vector(require_key(p, "t_grid", "params"), "params.t_grid");
      for (std::size_t i = 0; i < cfg.t_grid.size(); ++i)
        if (!(cfg.t_grid[i] > 0.0))
          fail("field \"params.t_grid[" + std::to_string(i) + "]\" must be > 0");
      if (const json* j = find_key(p, "gap")) cfg.gap = get_positive(*j, "params.gap");
      if (const json* j = find_key(p, "ramp")) cfg.ramp = get_nonnegative(*j, "params.ramp");
      if (const json* j = find_key(p, "substeps"))
        cfg.substeps = static_cast<int>(get_count(*j, "params.substeps", 1));
      break;
    }
    case Scheme::InfoClone:
      check_keys(p, "params", {"n_clones", "beta"});
      cfg.n_clones = get_count(require_key(p, "n_clones", "params"), "params.n_clones", 2);
      if (const json* j = find_key(p, "beta")) cfg.blank_beta = get_complex(*j, "params.beta");
      break;
    case Scheme::OptimalClone:
      check_keys(p, "params", {"n_in", "m_out"});
      cfg.n_in = get_count(require_key(p, "n_in", "params"), "params.n_in", 1);
      cfg.m_out = get_count(require_key(p, "m_out", "params"), "params.m_out", 1);
      if (cfg.m_out < cfg.n_in) fail("field \"params.m_out\" must be >= params.n_in");
      break;
    case Scheme::LinearityProbe:
      check_keys(p, "params", {"state2_amplitudes", "coeff_a", "coeff_b", "observable_matrix"});
      cfg.amplitudes2 = get_amplitudes(require_key(p, "state2_amplitudes", "params"),
                                       "params.state2_amplitudes");
      cfg.coeff_a = get_complex(require_key(p, "coeff_a", "params"), "params.coeff_a");
      cfg.coeff_b = get_complex(require_key(p, "coeff_b", "params"), "params.coeff_b");
      cfg.observable_matrix = get_complex_matrix(require_key(p, "observable_matrix", "params"),
                                                 "params.observable_matrix");
      break;
    case Scheme::NoCloning:
      check_keys(p, "params", {"n_clones"});
      cfg.n_clones = get_count(require_key(p, "n_clones", "params"), "params.n_clones", 1);
      break;
  }
}

// Construct the physical objects once so ill-posed inputs (zero-norm states,
// repeated eigenvalues, non-hermitian matrices, parallel probe states) are
// reported as configuration errors, not runtime failures.
void validate_physics(const ExperimentConfig& cfg) {
  try {
    if (cfg.has_amplitudes) PureState state(to_cvector(cfg.amplitudes));
    if (!cfg.eigenvalues.empty()) Observable s(cfg.eigenvalues);
    if (cfg.scheme == Scheme::LinearityProbe) {
      PureState s1(to_cvector(cfg.amplitudes));
      PureState s2(to_cvector(cfg.amplitudes2));
      HermitianOperator obs(cfg.observable_matrix);
      linearity_probe(s1, s2, cfg.coeff_a, cfg.coeff_b, obs);
    }
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("top-level JSON value must be an object");
  check_keys(doc, "", {"scheme", "seed", "trajectories", "workers", "state", "observable",
                       "params", "true_mean", "output"});

  const json& js = require_key(doc, "scheme", "");
  if (!js.is_string()) fail("field \"scheme\" must be a string");
  ExperimentConfig cfg;
  cfg.scheme = parse_scheme(js.get<std::string>());

  if (const json* j = find_key(doc, "seed")) cfg.seed = get_u64(*j, "seed");
  if (const json* j = find_key(doc, "trajectories")) {
    if (!scheme_samples(cfg.scheme)) fail_not_used("trajectories", cfg.scheme);
    cfg.trajectories = get_count(*j, "trajectories", 1);
  }
  if (const json* j = find_key(doc, "workers"))
    cfg.workers = static_cast<int>(get_count(*j, "workers", 0));

  const json* jstate = find_key(doc, "state");
  if (cfg.scheme == Scheme::NoCloning) {
    if (jstate) fail_not_used("state", cfg.scheme);
  } else {
    if (!jstate) fail("missing required field \"state\"");
    require_object(*jstate, "state");
    if (scheme_uses_alpha(cfg.scheme)) {
      check_keys(*jstate, "state", {"alpha"});
      cfg.alpha = get_complex(require_key(*jstate, "alpha", "state"), "state.alpha");
      cfg.has_alpha = true;
    } else {
      check_keys(*jstate, "state", {"amplitudes"});
      cfg.amplitudes =
          get_amplitudes(require_key(*jstate, "amplitudes", "state"), "state.amplitudes");
      cfg.has_amplitudes = true;
      if (cfg.scheme == Scheme::TwoQubitProtective && cfg.amplitudes.size() != 2)
        fail("field \"state.amplitudes\" must have exactly two entries for scheme "
             "\"two-qubit-protective\"");
    }
  }

  const json* jobs = find_key(doc, "observable");
  if (scheme_uses_observable(cfg.scheme)) {
    if (!jobs) fail("missing required field \"observable\"");
    require_object(*jobs, "observable");
    check_keys(*jobs, "observable", {"eigenvalues"});
    cfg.eigenvalues = get_number_vector(require_key(*jobs, "eigenvalues", "observable"),
                                        "observable.eigenvalues");
    if (cfg.eigenvalues.size() != cfg.amplitudes.size())
      fail("field \"observable.eigenvalues\" must have one entry per amplitude");
  } else if (jobs) {
    fail_not_used("observable", cfg.scheme);
  }

  parse_params(doc, cfg);

  if (const json* j = find_key(doc, "true_mean")) {
    if (!scheme_classifies(cfg.scheme)) fail_not_used("true_mean", cfg.scheme);
    // explicit null = absent, so a summary's config echo parses back
    if (!j->is_null()) cfg.true_mean = get_number(*j, "true_mean");
  }

  if (const json* j = find_key(doc, "output")) {
    require_object(*j, "output");
    check_keys(*j, "output", {"records_csv", "summary_json", "plot_csv"});
    auto get_path = [&](const char* key) -> std::string {
      const json* v = find_key(*j, key);
      if (!v || v->is_null()) return {};  // null = absent, as in the config echo
      if (!v->is_string() || v->get<std::string>().empty())
        fail("field \"output." + std::string(key) + "\" must be a non-empty path");
      return v->get<std::string>();
    };
    cfg.records_csv = get_path("records_csv");
    if (!cfg.records_csv.empty() && !scheme_writes_records(cfg.scheme))
      fail_not_used("output.records_csv", cfg.scheme);
    cfg.plot_csv = get_path("plot_csv");
    if (!cfg.plot_csv.empty() && !scheme_writes_plot(cfg.scheme))
      fail_not_used("output.plot_csv", cfg.scheme);
    cfg.summary_json = get_path("summary_json");
  }

  validate_physics(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("cannot open config file \"" + path + "\"");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_experiment_config(ss.str());
}

nlohmann::ordered_json experiment_config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["scheme"] = scheme_name(cfg.scheme);
  j["seed"] = cfg.seed;
  if (scheme_samples(cfg.scheme)) j["trajectories"] = cfg.trajectories;
  j["workers"] = cfg.workers;

  auto pair_of = [](cdouble z) { return ordered_json::array({z.real(), z.imag()}); };
  if (cfg.has_amplitudes) {
    ordered_json amps = ordered_json::array();
    for (cdouble a : cfg.amplitudes) amps.push_back(pair_of(a));
    ordered_json st;
    st["amplitudes"] = amps;
    j["state"] = st;
  } else if (cfg.has_alpha) {
    ordered_json st;
    st["alpha"] = pair_of(cfg.alpha);
    j["state"] = st;
  }
  if (scheme_uses_observable(cfg.scheme)) {
    ordered_json obs;
    obs["eigenvalues"] = cfg.eigenvalues;
    j["observable"] = obs;
  }

  ordered_json p;
  switch (cfg.scheme) {
    case Scheme::StrongRepeat:
      p["steps"] = cfg.steps;
      break;
    case Scheme::WeakRepeat:
      p["delta_p"] = cfg.delta_p;
      p["steps"] = cfg.steps;
      break;
    case Scheme::ProtectiveBranch:
      p["t_total"] = cfg.t_total;
      p["r0"] = cfg.r0;
      p["c2"] = cfg.c2;
      p["c3"] = cfg.c3;
      p["c4"] = cfg.c4;
      break;
    case Scheme::TwoQubitProtective:
      p["t_grid"] = cfg.t_grid;
      p["gap"] = cfg.gap;
      p["ramp"] = cfg.ramp;
      p["substeps"] = cfg.substeps;
      break;
    case Scheme::InfoClone:
      p["n_clones"] = cfg.n_clones;
      p["beta"] = pair_of(cfg.blank_beta);
      break;
    case Scheme::OptimalClone:
      p["n_in"] = cfg.n_in;
      p["m_out"] = cfg.m_out;
      break;
    case Scheme::LinearityProbe: {
      ordered_json amps2 = ordered_json::array();
      for (cdouble a : cfg.amplitudes2) amps2.push_back(pair_of(a));
      p["state2_amplitudes"] = amps2;
      p["coeff_a"] = pair_of(cfg.coeff_a);
      p["coeff_b"] = pair_of(cfg.coeff_b);
      ordered_json rows = ordered_json::array();
      for (Eigen::Index r = 0; r < cfg.observable_matrix.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < cfg.observable_matrix.cols(); ++c)
          row.push_back(pair_of(cfg.observable_matrix(r, c)));
        rows.push_back(row);
      }
      p["observable_matrix"] = rows;
      break;
    }
    case Scheme::NoCloning:
      p["n_clones"] = cfg.n_clones;
      break;
  }
  j["params"] = p;

  if (scheme_classifies(cfg.scheme))
    j["true_mean"] = cfg.true_mean ? ordered_json(*cfg.true_mean) : ordered_json(nullptr);

  ordered_json out;
  out["records_csv"] = cfg.records_csv.empty() ? ordered_json(nullptr) : ordered_json(cfg.records_csv);
  out["summary_json"] =
      cfg.summary_json.empty() ? ordered_json(nullptr) : ordered_json(cfg.summary_json);
  out["plot_csv"] = cfg.plot_csv.empty() ? ordered_json(nullptr) : ordered_json(cfg.plot_csv);
  j["output"] = out;
  return j;
}

std::string format_double(double v) {
  std::array<char, 64> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

std::vector<double> read_sample_column(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open samples file \"" + path + "\"");
  std::vector<double> out;
  std::string line;
  while (std::getline(f, line)) {
    std::size_t comma = line.find(',');
    std::string token = comma == std::string::npos ? line : line.substr(0, comma);
    const std::size_t b = token.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const std::size_t e = token.find_last_not_of(" \t\r");
    token = token.substr(b, e - b + 1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec == std::errc{} && p == token.data() + token.size()) out.push_back(v);
    // non-numeric first column (e.g. a header row) is skipped
  }
  if (out.empty()) throw ConfigError("no numeric samples found in \"" + path + "\"");
  return out;
}

}  // namespace qmeter
