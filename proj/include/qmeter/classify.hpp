#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmeter/core.hpp"
#include "qmeter/stats.hpp"

namespace qmeter {

// Classification of an empirical outcome-mean distribution:
//   Exact — a single delta: every run lands on one value,
//   FAPP1 — a single narrow Gaussian centered on the true mean,
//   FAPP2 — a dominant component plus small contamination,
//   NoOntology — a genuine mixture pinned at the eigenvalues (reported "None").
enum class VerdictKind { Exact, FAPP1, FAPP2, NoOntology };

std::string verdict_name(VerdictKind kind);

struct MixtureComponent {
  double weight;
  double mean;
  double sigma;
};

struct OntologyVerdict {
  VerdictKind kind;
  double mu_hat = 0.0;       // mean of the winning mixture
  double epsilon_hat = 0.0;  // std of its dominant component
  // |mu_hat - true_mean|; NaN when no true mean was supplied.
  double center_error = 0.0;
  std::vector<MixtureComponent> components;  // winning model
  bool pinned = false;                       // winner had eigenvalue-pinned means
  double bic = 0.0;
};

struct ClassifyOptions {
  double exact_std_threshold = 1e-9;  // dominant std below this => Exact
  double weight_threshold = 0.02;     // "non-negligible" pinned component
  // FAPP1 centering: |mu_hat - true_mean| <= k * sigma / sqrt(effective n).
  double center_tolerance_sigmas = 5.0;
  GmmFitOptions gmm;
};

// Fit free mixtures with k in {1, #eigenvalues} and the eigenvalue-pinned
// variant, select by BIC, and map the winner to a verdict.  An empty
// eigenvalue list (estimator statistics with no reference spectrum) fits free
// k in {1, 2} only, so NoOntology is unreachable there.  Requires >= 500
// finite samples.  Candidates whose EM degenerates (a component starves) are
// skipped; at least one candidate always survives.
OntologyVerdict classify_mean_distribution(const std::vector<double>& samples,
                                           const std::vector<double>& eigenvalues,
                                           std::optional<double> true_mean,
                                           const ClassifyOptions& opt = {});

OntologyVerdict classify_mean_distribution(const std::vector<double>& samples,
                                           const Observable& obs,
                                           std::optional<double> true_mean,
                                           const ClassifyOptions& opt = {});

}  // namespace qmeter
