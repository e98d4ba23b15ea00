#include "qmeter/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qmeter/core.hpp"

namespace qmeter {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }
}  // namespace

double GaussianMixture1D::pdf(double x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double z = (x - means[i]) / sigmas[i];
    acc += weights[i] * std::exp(-0.5 * z * z) / (sigmas[i] * 2.5066282746310005024);
  }
  return acc;
}

double GaussianMixture1D::log_pdf(double x) const {
  std::vector<double> terms(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const double z = (x - means[i]) / sigmas[i];
    terms[i] = std::log(weights[i]) - 0.5 * z * z - std::log(sigmas[i]) - 0.5 * kLog2Pi;
  }
  return log_sum_exp(terms);
}

double GaussianMixture1D::cdf(double x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += weights[i] * normal_cdf((x - means[i]) / sigmas[i]);
  return acc;
}

double GaussianMixture1D::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += weights[i] * means[i];
  return acc;
}

double GaussianMixture1D::variance() const {
  const double m = mean();
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    acc += weights[i] * (sigmas[i] * sigmas[i] + (means[i] - m) * (means[i] - m));
  return acc;
}

double GaussianMixture1D::sample(RandomStream& rng) const {
  const std::size_t i = rng.categorical(weights);
  return rng.normal(means[i], sigmas[i]);
}

SampleMoments compute_moments(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("compute_moments: empty sample");
  SampleMoments m;
  m.n = xs.size();
  m.min = xs[0];
  m.max = xs[0];
  double acc = 0.0;
  for (double x : xs) {
    acc += x;
    m.min = std::min(m.min, x);
    m.max = std::max(m.max, x);
  }
  m.mean = acc / static_cast<double>(m.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.variance = m.n > 1 ? ss / static_cast<double>(m.n - 1) : 0.0;
  return m;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

double ks_critical(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks_critical: alpha in (0,1)");
  if (n == 0) throw std::invalid_argument("ks_critical: empty sample");
  // Invert the Kolmogorov tail Q(lambda) = 2 sum_k (-1)^{k-1} exp(-2 k^2 lambda^2).
  auto tail = [](double lam) {
    double acc = 0.0;
    for (int k = 1; k <= 100; ++k)
      acc += (k % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lam * lam);
    return acc;
  };
  double lo = 0.2, hi = 3.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(static_cast<double>(n));
}

double linear_fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit_slope: need matching vectors, n >= 2");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw NumericalError("linear_fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

double GmmFit::bic(std::size_t n_samples) const {
  return static_cast<double>(n_parameters) * std::log(static_cast<double>(n_samples)) -
         2.0 * log_likelihood;
}

namespace {

struct EmResult {
  GaussianMixture1D model;
  double loglik = -std::numeric_limits<double>::infinity();
  bool valid = false;
};

double variance_floor(const std::vector<double>& xs) {
  const SampleMoments m = compute_moments(xs);
  const double s = std::sqrt(std::max(0.0, m.variance));
  return std::max(1e-24, 1e-12 * s * s);
}

// k-means++ seeding followed by a few Lloyd iterations; returns centers.
std::vector<double> kmeans_init(const std::vector<double>& xs, std::size_t k, RandomStream& rng) {
  std::vector<double> centers;
  centers.reserve(k);
  const std::size_t first =
      std::min(xs.size() - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(xs.size())));
  centers.push_back(xs[first]);
  std::vector<double> d2(xs.size());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (xs[i] - c) * (xs[i] - c));
      d2[i] = best;
      total += best;
    }
    if (total == 0.0) {
      centers.push_back(centers.back());
      continue;
    }
    double u = rng.uniform() * total;
    std::size_t pick = xs.size() - 1;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      u -= d2[i];
      if (u <= 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(xs[pick]);
  }
  for (int it = 0; it < 10; ++it) {
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> cnt(k, 0);
    for (double x : xs) {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = (x - centers[j]) * (x - centers[j]);
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      sum[best] += x;
      ++cnt[best];
    }
    for (std::size_t j = 0; j < k; ++j)
      if (cnt[j] > 0) centers[j] = sum[j] / static_cast<double>(cnt[j]);
  }
  return centers;
}

EmResult run_em(const std::vector<double>& xs, GaussianMixture1D model, bool pin_means,
                const GmmFitOptions& opt, double floor_var) {
  const std::size_t n = xs.size();
  const std::size_t k = model.size();
  std::vector<double> resp(n * k);
  double prev = -std::numeric_limits<double>::infinity();
  EmResult out;
  for (int it = 0; it < opt.max_iterations; ++it) {
    // E step in log space.
    double loglik = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double z = (xs[i] - model.means[j]) / model.sigmas[j];
        const double lj = std::log(model.weights[j]) - 0.5 * z * z - std::log(model.sigmas[j]) -
                          0.5 * kLog2Pi;
        resp[i * k + j] = lj;
        mx = std::max(mx, lj);
      }
      double norm = 0.0;
      for (std::size_t j = 0; j < k; ++j) norm += std::exp(resp[i * k + j] - mx);
      const double lse = mx + std::log(norm);
      loglik += lse;
      for (std::size_t j = 0; j < k; ++j) resp[i * k + j] = std::exp(resp[i * k + j] - lse);
    }
    // M step.
    bool degenerate = false;
    for (std::size_t j = 0; j < k; ++j) {
      double nj = 0.0, sj = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nj += resp[i * k + j];
        sj += resp[i * k + j] * xs[i];
      }
      if (nj < 1e-12) {
        degenerate = true;
        break;
      }
      model.weights[j] = nj / static_cast<double>(n);
      if (!pin_means) model.means[j] = sj / nj;
      double vj = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        vj += resp[i * k + j] * (xs[i] - model.means[j]) * (xs[i] - model.means[j]);
      model.sigmas[j] = std::sqrt(std::max(vj / nj, floor_var));
    }
    if (degenerate) return out;  // invalid
    if (std::abs(loglik - prev) <= opt.tolerance * (1.0 + std::abs(loglik))) {
      prev = loglik;
      break;
    }
    prev = loglik;
  }
  // Reject solutions where a component holds fewer than two points: those are
  // single-point collapses, not structure.
  for (std::size_t j = 0; j < k; ++j)
    if (model.weights[j] * static_cast<double>(n) < 2.0) return out;
  out.model = std::move(model);
  out.loglik = prev;
  out.valid = std::isfinite(prev);
  return out;
}

GmmFit fit_impl(const std::vector<double>& xs, std::size_t k, const std::vector<double>* pinned,
                const GmmFitOptions& opt) {
  if (xs.size() < 2 * k)
    throw std::invalid_argument("fit_gmm: need at least 2k samples");
  if (k == 0) throw std::invalid_argument("fit_gmm: k must be >= 1");
  const double floor_var = variance_floor(xs);
  const SampleMoments mom = compute_moments(xs);
  const double init_sigma =
      std::max(std::sqrt(std::max(mom.variance, floor_var)), std::sqrt(floor_var));

  EmResult best;
  for (int r = 0; r < opt.restarts; ++r) {
    RandomStream rng(opt.seed, static_cast<std::uint64_t>(r));
    GaussianMixture1D init;
    init.weights.assign(k, 1.0 / static_cast<double>(k));
    init.means = pinned ? *pinned : kmeans_init(xs, k, rng);
    init.sigmas.assign(k, init_sigma);
    if (pinned && r > 0) {
      // Pinned restarts only vary initial variances.
      for (auto& s : init.sigmas) s = init_sigma * std::exp(rng.uniform(-2.0, 2.0));
    }
    EmResult res = run_em(xs, std::move(init), pinned != nullptr, opt, floor_var);
    if (res.valid && res.loglik > best.loglik) best = std::move(res);
  }
  if (!best.valid) throw NumericalError("fit_gmm: no EM restart produced a valid fit");
  GmmFit fit;
  fit.model = std::move(best.model);
  fit.log_likelihood = best.loglik;
  fit.pinned_means = pinned != nullptr;
  fit.n_parameters = pinned ? static_cast<int>(2 * k - 1) : static_cast<int>(3 * k - 1);
  return fit;
}

}  // namespace

GmmFit fit_gmm(const std::vector<double>& xs, std::size_t k, const GmmFitOptions& opt) {
  return fit_impl(xs, k, nullptr, opt);
}

GmmFit fit_gmm_pinned(const std::vector<double>& xs, const std::vector<double>& means,
                      const GmmFitOptions& opt) {
  if (means.empty()) throw std::invalid_argument("fit_gmm_pinned: empty mean list");
  return fit_impl(xs, means.size(), &means, opt);
}

}  // namespace qmeter
