#include "qmeter/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmeter {

std::string verdict_name(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Exact:
      return "Exact";
    case VerdictKind::FAPP1:
      return "FAPP1";
    case VerdictKind::FAPP2:
      return "FAPP2";
    case VerdictKind::NoOntology:
      return "None";
  }
  return "None";
}

namespace {

struct Candidate {
  GmmFit fit;
  double bic = std::numeric_limits<double>::infinity();
  bool ok = false;
};

Candidate try_fit(const std::vector<double>& xs, std::size_t k, const std::vector<double>* pinned,
                  const GmmFitOptions& opt) {
  Candidate c;
  if (xs.size() < 2 * k) return c;
  try {
    c.fit = pinned ? fit_gmm_pinned(xs, *pinned, opt) : fit_gmm(xs, k, opt);
    c.bic = c.fit.bic(xs.size());
    c.ok = true;
  } catch (const NumericalError&) {
    // Degenerate candidate (e.g. a pinned component with no samples near its
    // eigenvalue): drop it from model selection.
  }
  return c;
}

}  // namespace

OntologyVerdict classify_mean_distribution(const std::vector<double>& samples,
                                           const std::vector<double>& eigenvalues,
                                           std::optional<double> true_mean,
                                           const ClassifyOptions& opt) {
  if (samples.size() < 500)
    throw std::invalid_argument("classify_mean_distribution: need at least 500 samples");
  for (double x : samples) {
    if (!std::isfinite(x))
      throw std::invalid_argument("classify_mean_distribution: non-finite sample");
  }

  const std::size_t n_eig = eigenvalues.size();
  std::vector<Candidate> candidates;
  candidates.push_back(try_fit(samples, 1, nullptr, opt.gmm));
  const std::size_t k_free = n_eig >= 2 ? n_eig : 2;  // contaminant detector when no spectrum
  candidates.push_back(try_fit(samples, k_free, nullptr, opt.gmm));
  if (n_eig >= 1) candidates.push_back(try_fit(samples, n_eig, &eigenvalues, opt.gmm));

  const Candidate* best = nullptr;
  for (const Candidate& c : candidates) {
    if (c.ok && (best == nullptr || c.bic < best->bic)) best = &c;
  }
  if (best == nullptr)
    throw NumericalError("classify_mean_distribution: every mixture candidate degenerated");

  const GaussianMixture1D& model = best->fit.model;
  OntologyVerdict verdict;
  verdict.pinned = best->fit.pinned_means;
  verdict.bic = best->bic;
  verdict.mu_hat = model.mean();

  std::size_t dominant = 0;
  for (std::size_t j = 1; j < model.size(); ++j) {
    if (model.weights[j] > model.weights[dominant]) dominant = j;
  }
  verdict.epsilon_hat = model.sigmas[dominant];
  verdict.center_error = true_mean ? std::abs(verdict.mu_hat - *true_mean)
                                   : std::numeric_limits<double>::quiet_NaN();

  verdict.components.reserve(model.size());
  for (std::size_t j = 0; j < model.size(); ++j)
    verdict.components.push_back({model.weights[j], model.means[j], model.sigmas[j]});
  if (!verdict.pinned) {
    // Free components in mean order; pinned ones keep the eigenvalue order.
    std::sort(verdict.components.begin(), verdict.components.end(),
              [](const MixtureComponent& a, const MixtureComponent& b) { return a.mean < b.mean; });
  }

  if (verdict.pinned) {
    std::size_t significant = 0;
    for (double w : model.weights)
      if (w >= opt.weight_threshold) ++significant;
    if (significant >= 2) {
      verdict.kind = VerdictKind::NoOntology;
      return verdict;
    }
  }

  // Exact and FAPP1 demand a genuinely single-component description; a pinned
  // winner that escaped NoOntology is a dominant-plus-small-extras shape.
  const bool single = !verdict.pinned && model.size() == 1;
  const double dom_mean = model.means[dominant];
  const double dom_sigma = model.sigmas[dominant];
  const double n_eff = model.weights[dominant] * static_cast<double>(samples.size());
  if (single && dom_sigma < opt.exact_std_threshold) {
    verdict.kind = VerdictKind::Exact;
  } else if (single && true_mean &&
             std::abs(dom_mean - *true_mean) <=
                 opt.center_tolerance_sigmas * dom_sigma / std::sqrt(std::max(1.0, n_eff))) {
    verdict.kind = VerdictKind::FAPP1;
  } else {
    verdict.kind = VerdictKind::FAPP2;
  }
  return verdict;
}

OntologyVerdict classify_mean_distribution(const std::vector<double>& samples,
                                           const Observable& obs, std::optional<double> true_mean,
                                           const ClassifyOptions& opt) {
  return classify_mean_distribution(samples, obs.eigenvalues(), true_mean, opt);
}

}  // namespace qmeter
