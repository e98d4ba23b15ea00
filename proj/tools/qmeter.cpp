#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmeter/classify.hpp"
#include "qmeter/cloning.hpp"
#include "qmeter/core.hpp"
#include "qmeter/experiment.hpp"
#include "qmeter/weak.hpp"

namespace {

using qmeter::ConfigError;

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse " + what + " entry \"" + tok + "\"");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError(what + " list is empty");
  return out;
}

struct Range {
  long lo = 0;
  long hi = 0;
};

std::map<std::string, Range> parse_ranges(const std::string& text) {
  std::map<std::string, Range> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("range item \"" + item + "\" must look like key=lo:hi or key=value");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    Range r;
    try {
      const std::size_t colon = val.find(':');
      if (colon == std::string::npos) {
        r.lo = r.hi = std::stol(val);
      } else {
        r.lo = std::stol(val.substr(0, colon));
        r.hi = std::stol(val.substr(colon + 1));
      }
    } catch (const std::exception&) {
      throw ConfigError("cannot parse range item \"" + item + "\"");
    }
    if (r.lo < 0 || r.hi < r.lo)
      throw ConfigError("range item \"" + item + "\" must satisfy 0 <= lo <= hi");
    if (!out.emplace(key, r).second) throw ConfigError("duplicate range key \"" + key + "\"");
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("no ranges given");
  return out;
}

Range require_range(const std::map<std::string, Range>& ranges, const std::string& key,
                    const std::string& table) {
  const auto it = ranges.find(key);
  if (it == ranges.end())
    throw ConfigError("table \"" + table + "\" needs range \"" + key + "\"");
  return it->second;
}

void check_range_keys(const std::map<std::string, Range>& ranges,
                      std::initializer_list<const char*> allowed, const std::string& table) {
  for (const auto& [key, r] : ranges) {
    bool known = false;
    for (const char* k : allowed)
      if (key == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("table \"" + table + "\" does not use range \"" + key + "\"");
  }
}

nlohmann::ordered_json verdict_to_json(const qmeter::OntologyVerdict& v, std::size_t n_samples) {
  nlohmann::ordered_json j;
  j["verdict"] = qmeter::verdict_name(v.kind);
  j["n_samples"] = n_samples;
  j["mu_hat"] = v.mu_hat;
  j["epsilon_hat"] = v.epsilon_hat;
  j["center_error"] = std::isfinite(v.center_error) ? nlohmann::ordered_json(v.center_error)
                                                    : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (const qmeter::MixtureComponent& c : v.components) {
    nlohmann::ordered_json jc;
    jc["weight"] = c.weight;
    jc["mean"] = c.mean;
    jc["sigma"] = c.sigma;
    comps.push_back(jc);
  }
  j["components"] = comps;
  j["pinned"] = v.pinned;
  j["bic"] = v.bic;
  return j;
}

int do_run(const std::string& config_path, std::optional<std::uint64_t> seed,
           std::optional<int> workers, const std::string& out_dir) {
  qmeter::ExperimentConfig cfg = qmeter::load_experiment_config(config_path);
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  if (!out_dir.empty()) {
    const auto prefix = [&](std::string& p) {
      if (p.empty()) return;
      const std::filesystem::path fp(p);
      if (fp.is_relative()) p = (std::filesystem::path(out_dir) / fp).string();
    };
    prefix(cfg.records_csv);
    prefix(cfg.plot_csv);
    prefix(cfg.summary_json);
    if (cfg.summary_json.empty())
      cfg.summary_json = (std::filesystem::path(out_dir) / "summary.json").string();
  }
  const qmeter::RunSummary rs = qmeter::run_experiment(cfg);
  std::cout << rs.to_json().dump(2) << "\n";
  return 0;
}

int do_classify(const std::string& samples_path, const std::string& eigenvalue_list,
                std::optional<double> true_mean) {
  const std::vector<double> samples = qmeter::read_sample_column(samples_path);
  const std::vector<double> eigenvalues = parse_double_list(eigenvalue_list, "eigenvalue");
  const qmeter::OntologyVerdict v =
      qmeter::classify_mean_distribution(samples, eigenvalues, true_mean);
  std::cout << verdict_to_json(v, samples.size()).dump(2) << "\n";
  return 0;
}

int do_formulas(const std::string& table, const std::string& ranges_text) {
  const auto ranges = parse_ranges(ranges_text);
  std::cout << std::left;
  if (table == "qubit-fidelity") {
    check_range_keys(ranges, {"N", "M"}, table);
    const Range rn = require_range(ranges, "N", table);
    const Range rm = require_range(ranges, "M", table);
    std::cout << std::setw(8) << "N" << std::setw(8) << "M" << std::setw(22) << "fidelity"
              << std::setw(22) << "limit_M_to_inf" << "\n";
    for (long n = std::max(rn.lo, 1L); n <= rn.hi; ++n)
      for (long m = std::max({rm.lo, n, 1L}); m <= rm.hi; ++m)
        std::cout << std::setw(8) << n << std::setw(8) << m << std::setw(22)
                  << qmeter::format_double(qmeter::qubit_fidelity(n, m)) << std::setw(22)
                  << qmeter::format_double(qmeter::qubit_fidelity_limit(n)) << "\n";
  } else if (table == "d-fidelity") {
    check_range_keys(ranges, {"N", "M", "d"}, table);
    const Range rn = require_range(ranges, "N", table);
    const Range rm = require_range(ranges, "M", table);
    const Range rd = ranges.count("d") ? ranges.at("d") : Range{2, 2};
    std::cout << std::setw(8) << "N" << std::setw(8) << "M" << std::setw(8) << "d"
              << std::setw(22) << "fidelity" << std::setw(22) << "shrink" << "\n";
    for (long d = std::max(rd.lo, 2L); d <= rd.hi; ++d)
      for (long n = std::max(rn.lo, 1L); n <= rn.hi; ++n)
        for (long m = std::max({rm.lo, n, 1L}); m <= rm.hi; ++m)
          std::cout << std::setw(8) << n << std::setw(8) << m << std::setw(8) << d
                    << std::setw(22) << qmeter::format_double(qmeter::d_dim_fidelity(n, m, d))
                    << std::setw(22)
                    << qmeter::format_double(qmeter::clone_shrink_factor(n, m, d)) << "\n";
  } else if (table == "coherent-bound") {
    check_range_keys(ranges, {"N", "M"}, table);
    const Range rn = require_range(ranges, "N", table);
    const Range rm = require_range(ranges, "M", table);
    std::cout << std::setw(8) << "N" << std::setw(8) << "M" << std::setw(22) << "bound" << "\n";
    for (long n = std::max(rn.lo, 1L); n <= rn.hi; ++n)
      for (long m = std::max({rm.lo, n, 1L}); m <= rm.hi; ++m)
        std::cout << std::setw(8) << n << std::setw(8) << m << std::setw(22)
                  << qmeter::format_double(qmeter::coherent_fidelity_bound(n, m)) << "\n";
  } else if (table == "resource") {
    check_range_keys(ranges, {"mult", "m_strong"}, table);
    const Range rmult = require_range(ranges, "mult", table);
    const Range rms = require_range(ranges, "m_strong", table);
    std::cout << std::setw(12) << "multiplier" << std::setw(12) << "m_strong" << std::setw(22)
              << "m_weak_exact" << std::setw(12) << "m_weak" << "\n";
    for (long ms = std::max(rms.lo, 1L); ms <= rms.hi; ++ms)
      for (long mult = std::max(rmult.lo, 1L); mult <= rmult.hi; ++mult) {
        const double exact = qmeter::weak_resource_ratio_exact(
            static_cast<double>(mult), 1.0, static_cast<std::size_t>(ms));
        const std::size_t rounded = qmeter::weak_resource_ratio(
            static_cast<double>(mult), 1.0, static_cast<std::size_t>(ms));
        std::cout << std::setw(12) << mult << std::setw(12) << ms << std::setw(22)
                  << qmeter::format_double(exact) << std::setw(12) << rounded << "\n";
      }
  } else {
    throw ConfigError("unknown table \"" + table +
                      "\" (use qubit-fidelity, d-fidelity, coherent-bound, or resource)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate single-copy quantum measurement and cloning schemes"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_value = 0;
  int workers_value = 0;
  std::string out_dir;
  CLI::App* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("--config", config_path, "Path to the experiment config")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed_value, "Override the config seed");
  CLI::Option* workers_opt =
      run->add_option("--workers", workers_value, "Override the worker count (1 = serial)");
  run->add_option("--out", out_dir,
                  "Directory prefixed to relative output paths; also receives summary.json "
                  "when the config names none");

  std::string samples_path, eigenvalue_list;
  double true_mean_value = 0.0;
  CLI::App* classify =
      app.add_subcommand("classify", "Classify a sample column against an ontology");
  classify->add_option("--samples", samples_path, "CSV whose first column holds the samples")
      ->required();
  classify->add_option("--eigenvalues", eigenvalue_list, "Comma-separated eigenvalue list")
      ->required();
  CLI::Option* tm_opt =
      classify->add_option("--true-mean", true_mean_value, "Reference mean for the FAPP1 test");

  std::string table, ranges_text;
  CLI::App* formulas = app.add_subcommand("formulas", "Print closed-form fidelity tables");
  formulas
      ->add_option("--table", table,
                   "One of qubit-fidelity, d-fidelity, coherent-bound, resource")
      ->required();
  formulas->add_option("--ranges", ranges_text, "Comma-separated key=lo:hi ranges")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      return do_run(config_path,
                    *seed_opt ? std::optional<std::uint64_t>(seed_value) : std::nullopt,
                    *workers_opt ? std::optional<int>(workers_value) : std::nullopt, out_dir);
    }
    if (classify->parsed()) {
      return do_classify(samples_path, eigenvalue_list,
                         *tm_opt ? std::optional<double>(true_mean_value) : std::nullopt);
    }
    if (formulas->parsed()) return do_formulas(table, ranges_text);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qmeter::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
