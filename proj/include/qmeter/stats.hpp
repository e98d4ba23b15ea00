#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "qmeter/random.hpp"

namespace qmeter {

// Finite mixture of 1-D Gaussians; also serves as the closed-form outcome
// and trajectory-mean densities of the Gaussian-pointer measurement model.
struct GaussianMixture1D {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> sigmas;

  std::size_t size() const { return weights.size(); }
  double pdf(double x) const;
  double log_pdf(double x) const;  // log-sum-exp over components
  double cdf(double x) const;
  double mean() const;
  double variance() const;
  double sample(RandomStream& rng) const;  // component draw, then Gaussian
};

struct SampleMoments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n-1 denominator)
  double min = 0.0;
  double max = 0.0;
};

// Left-to-right two-pass moments; result independent of worker count as long
// as the input vector ordering is fixed.
SampleMoments compute_moments(const std::vector<double>& xs);

// Two-sided Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Critical value c(alpha)/sqrt(n) from the asymptotic Kolmogorov distribution.
double ks_critical(double alpha, std::size_t n);

// Least-squares slope of y against x.
double linear_fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct GmmFitOptions {
  int restarts = 20;
  int max_iterations = 300;
  double tolerance = 1e-10;          // relative log-likelihood change
  std::uint64_t seed = 0x9d2c5680u;  // restarts are deterministic given this
};

struct GmmFit {
  GaussianMixture1D model;
  double log_likelihood = 0.0;
  int n_parameters = 0;
  bool pinned_means = false;

  double bic(std::size_t n_samples) const;
};

// EM with k-means++ initialization and multiple restarts.  Variances are
// floored at max(1e-24, (1e-6 * sample_std)^2): low enough that identical
// samples still fit with std ~1e-12, high enough that a component cannot
// collapse onto a single point for unbounded likelihood.  Restarts where a
// component captures fewer than two points are discarded.
GmmFit fit_gmm(const std::vector<double>& xs, std::size_t k, const GmmFitOptions& opt = {});

// Same, with component means pinned to the given locations (weights and
// variances free).  Used for the eigenvalue-pinned mixture hypothesis.
GmmFit fit_gmm_pinned(const std::vector<double>& xs, const std::vector<double>& means,
                      const GmmFitOptions& opt = {});

}  // namespace qmeter
