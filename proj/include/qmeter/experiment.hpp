#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmeter/classify.hpp"
#include "qmeter/core.hpp"
#include "qmeter/stats.hpp"

namespace qmeter {

// Declarative experiment runner: one JSON config names a measurement or
// cloning scheme, the runner produces per-trajectory records, summary
// statistics, and (where the scheme yields an outcome-mean sample) an
// ontology verdict.  Identical (config, seed) reruns are byte-identical at
// any worker count; the only exception is the wall-time field of the summary.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme {
  StrongRepeat,
  WeakRepeat,
  ProtectiveBranch,
  TwoQubitProtective,
  InfoClone,
  OptimalClone,
  LinearityProbe,
  NoCloning,
};

std::string scheme_name(Scheme scheme);
Scheme parse_scheme(const std::string& name);

// Schemes that draw per-trajectory randomness (everything except the two
// deterministic checks) and the subset whose outcome statistic gets an
// ontology verdict.
bool scheme_samples(Scheme scheme);
bool scheme_classifies(Scheme scheme);

struct ExperimentConfig {
  Scheme scheme = Scheme::StrongRepeat;
  std::uint64_t seed = 0;
  std::size_t trajectories = 1;
  int workers = 0;  // 0 = library default thread count, 1 = serial reference

  // State: discrete amplitudes or a coherent-state amplitude, per scheme.
  std::vector<cdouble> amplitudes;
  cdouble alpha{0.0, 0.0};
  bool has_amplitudes = false;
  bool has_alpha = false;

  std::vector<double> eigenvalues;  // diagonal observable, when the scheme uses one
  std::optional<double> true_mean;  // classifier reference; scheme default if absent

  // strong-repeat / weak-repeat
  std::size_t steps = 0;
  double delta_p = 0.0;

  // protective-branch
  double t_total = 0.0;
  double r0 = 0.0;
  double c2 = 1.0, c3 = 1.0, c4 = 1.0;

  // two-qubit-protective
  std::vector<double> t_grid;
  double gap = 1.0;
  double ramp = 10.0;
  int substeps = 256;

  // info-clone / nocloning
  std::size_t n_clones = 0;
  cdouble blank_beta{0.0, 0.0};

  // optimal-clone
  std::size_t n_in = 0;
  std::size_t m_out = 0;

  // linearity-probe
  std::vector<cdouble> amplitudes2;
  cdouble coeff_a{0.0, 0.0};
  cdouble coeff_b{0.0, 0.0};
  CMatrix observable_matrix;

  // Output paths; empty string = not written.
  std::string records_csv;
  std::string summary_json;
  std::string plot_csv;
};

// Strict parsing: unknown fields anywhere in the document are rejected, as is
// any field the chosen scheme does not use.  Errors name the offending field.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Canonical JSON echo of a config (defaults filled in, absent options as
// null); embedded in summaries, and itself parseable back to the same config.
nlohmann::ordered_json experiment_config_to_json(const ExperimentConfig& cfg);

struct RunSummary {
  ExperimentConfig config;
  std::vector<double> samples;  // the classified outcome statistic, if any
  std::optional<SampleMoments> moments;
  std::optional<OntologyVerdict> verdict;
  nlohmann::ordered_json stats;  // scheme-specific figures
  double runtime_s = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Dispatch to the scheme, run all trajectories with per-trajectory random
// streams, classify where applicable, and write the requested output files.
RunSummary run_experiment(const ExperimentConfig& cfg);

// Weak-vs-strong repetition budget at equal statistical error, over a grid of
// pointer widths delta_p = multiplier * spread(S).
struct ResourceRow {
  double multiplier;     // delta_p / spread
  double delta_p;
  double m_weak_exact;   // (delta_p/spread)^2 m_strong / 2, before rounding
  std::size_t m_weak;
};

std::vector<ResourceRow> resource_report(
    const PureState& psi, const Observable& s, std::size_t m_strong,
    const std::vector<double>& multipliers = {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0});

// First numeric column of a CSV file (non-numeric lines such as headers are
// skipped); used by the classify command.
std::vector<double> read_sample_column(const std::string& path);

// Shortest round-trip decimal rendering; every CSV number goes through this
// so file bytes are reproducible.
std::string format_double(double v);

}  // namespace qmeter
