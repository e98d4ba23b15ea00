#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include "qmeter/cloning.hpp"
#include "qmeter/ensemble.hpp"
#include "qmeter/experiment.hpp"
#include "qmeter/projective.hpp"
#include "qmeter/protective.hpp"
#include "qmeter/weak.hpp"

namespace qmeter {

using nlohmann::ordered_json;

namespace {

CVector to_cvector(const std::vector<cdouble>& amps) {
  CVector v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  return v;
}

// Everything a scheme runner produces besides the verdict (classification and
// the histogram plot are applied uniformly afterwards).
struct SchemeOutput {
  std::vector<double> samples;
  ordered_json stats = ordered_json::object();
  std::string record_header;
  std::vector<std::string> record_lines;
  std::string plot_header;  // set only by schemes with a curve instead of a histogram
  std::vector<std::string> plot_lines;
  std::vector<double> pinned_eigenvalues;  // classifier's collapse hypothesis
  std::optional<double> default_true_mean;
};

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw ConfigError("cannot create directory \"" + p.parent_path().string() + "\"");
  }
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write output file \"" + path + "\"");
  f << content;
  if (!f) throw ConfigError("write failed for output file \"" + path + "\"");
}

std::string join_csv(const std::string& header, const std::vector<std::string>& lines) {
  std::string out = header;
  out += '\n';
  for (const std::string& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

SchemeOutput run_strong(const ExperimentConfig& cfg) {
  const PureState psi(to_cvector(cfg.amplitudes));
  const Observable s(cfg.eigenvalues);
  const std::size_t n = cfg.trajectories;

  std::vector<double> means(n);
  std::vector<std::size_t> collapsed(n);
  std::vector<double> first(n);
  std::vector<std::uint8_t> constant(n);
  parallel_for_index(n, cfg.workers, [&](std::size_t i) {
    RandomStream rng(cfg.seed, i);
    const StrongTrajectory traj = run_strong_trajectory(psi, s, cfg.steps, rng);
    means[i] = traj.mean;
    collapsed[i] = traj.collapsed_index;
    first[i] = traj.outcomes.front();
    bool all_equal = true;
    for (double o : traj.outcomes)
      if (o != traj.outcomes.front()) {
        all_equal = false;
        break;
      }
    constant[i] = all_equal ? 1 : 0;
  });

  std::vector<std::size_t> counts(s.dim(), 0);
  bool all_constant = true;
  for (std::size_t i = 0; i < n; ++i) {
    ++counts[collapsed[i]];
    all_constant = all_constant && constant[i];
  }
  std::vector<double> freqs(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    freqs[k] = static_cast<double>(counts[k]) / static_cast<double>(n);

  SchemeOutput out;
  out.stats["born_probabilities"] = psi.probabilities();
  out.stats["first_outcome_counts"] = counts;
  out.stats["first_outcome_frequencies"] = freqs;
  out.stats["constant_within_trajectory"] = all_constant;
  out.record_header = "trajectory_id,collapsed_index,first_outcome,mean";
  if (!cfg.records_csv.empty()) {
    out.record_lines.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      out.record_lines.push_back(std::to_string(i) + ',' + std::to_string(collapsed[i]) + ',' +
                                 format_double(first[i]) + ',' + format_double(means[i]));
  }
  out.samples = std::move(means);
  out.pinned_eigenvalues = cfg.eigenvalues;
  out.default_true_mean = expectation(psi, s);
  return out;
}

SchemeOutput run_weak(const ExperimentConfig& cfg) {
  const PureState psi(to_cvector(cfg.amplitudes));
  const Observable s(cfg.eigenvalues);
  const std::size_t n = cfg.trajectories;

  std::vector<double> y(n);
  std::vector<int> conv(n);
  parallel_for_index(n, cfg.workers, [&](std::size_t i) {
    RandomStream rng(cfg.seed, i);
    const WeakTrajectory traj =
        run_weak_trajectory(psi, s, cfg.delta_p, cfg.steps, rng, WeakRecord::None);
    y[i] = traj.mean_outcome;
    conv[i] = traj.converged_to ? static_cast<int>(*traj.converged_to) : -1;
  });

  std::vector<std::size_t> counts(s.dim(), 0);
  std::size_t unconverged = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (conv[i] >= 0)
      ++counts[static_cast<std::size_t>(conv[i])];
    else
      ++unconverged;
  }
  std::vector<double> fracs(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k)
    fracs[k] = static_cast<double>(counts[k]) / static_cast<double>(n);

  SchemeOutput out;
  out.stats["born_probabilities"] = psi.probabilities();
  out.stats["converged_counts"] = counts;
  out.stats["converged_fractions"] = fracs;
  out.stats["unconverged_count"] = unconverged;

  if (!cfg.records_csv.empty()) {
    // Second serial pass: each trajectory is a pure function of its stream,
    // so regeneration reproduces the parallel pass bit for bit.
    out.record_header = "trajectory_id,step,outcome_p";
    for (std::size_t k = 0; k < psi.dim(); ++k)
      out.record_header += ",amp_sq_" + std::to_string(k);
    out.record_lines.reserve(n * cfg.steps);
    for (std::size_t i = 0; i < n; ++i) {
      RandomStream rng(cfg.seed, i);
      const WeakTrajectory traj =
          run_weak_trajectory(psi, s, cfg.delta_p, cfg.steps, rng, WeakRecord::Full);
      for (std::size_t j = 0; j < cfg.steps; ++j) {
        std::string line =
            std::to_string(i) + ',' + std::to_string(j) + ',' + format_double(traj.outcomes[j]);
        for (double pr : traj.states[j].probabilities()) {
          line += ',';
          line += format_double(pr);
        }
        out.record_lines.push_back(std::move(line));
      }
    }
  }

  out.samples = std::move(y);
  out.pinned_eigenvalues = cfg.eigenvalues;
  out.default_true_mean = expectation(psi, s);
  return out;
}

SchemeOutput run_protective_branch(const ExperimentConfig& cfg) {
  const PureState psi(to_cvector(cfg.amplitudes));
  const Observable s(cfg.eigenvalues);
  ProtectiveConfig pc;
  pc.t_total = cfg.t_total;
  pc.c2 = cfg.c2;
  pc.c3 = cfg.c3;
  pc.c4 = cfg.c4;
  pc.r0 = cfg.r0;
  const std::size_t n = cfg.trajectories;

  std::vector<double> readings(n);
  std::vector<int> kinds(n);
  parallel_for_index(n, cfg.workers, [&](std::size_t i) {
    RandomStream rng(cfg.seed, i);
    const ProtectiveBranch b = sample_protective_branch(psi, s, pc, rng);
    readings[i] = b.pointer_reading;
    kinds[i] = static_cast<int>(b.kind);
  });

  std::array<std::size_t, 4> counts{0, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(kinds[i] - 1)];
  std::array<double, 4> fracs{};
  for (std::size_t k = 0; k < 4; ++k)
    fracs[k] = static_cast<double>(counts[k]) / static_cast<double>(n);

  SchemeOutput out;
  out.stats["analytic_probabilities"] = protective_branch_probabilities(pc);
  out.stats["branch_counts"] = counts;
  out.stats["branch_frequencies"] = fracs;
  out.stats["failure_frequency"] = 1.0 - fracs[0];
  if (!cfg.records_csv.empty()) {
    out.record_header = "trajectory_id,branch,pointer_reading";
    out.record_lines.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      out.record_lines.push_back(std::to_string(i) + ',' + std::to_string(kinds[i]) + ',' +
                                 format_double(readings[i]));
  }
  out.samples = std::move(readings);
  out.pinned_eigenvalues = cfg.eigenvalues;
  for (double& e : out.pinned_eigenvalues) e += cfg.r0;
  out.default_true_mean = ideal_pointer_shift(psi, s, cfg.r0);
  return out;
}

SchemeOutput run_two_qubit(const ExperimentConfig& cfg) {
  const PureState psi(to_cvector(cfg.amplitudes));
  const cdouble alpha = psi.amplitude(0);
  const cdouble beta = psi.amplitude(1);
  TwoQubitPulse pulse;
  pulse.gap = cfg.gap;
  pulse.ramp = cfg.ramp;
  pulse.substeps = cfg.substeps;
  const std::size_t n = cfg.t_grid.size();

  std::vector<double> p_fail(n), angle(n);
  parallel_for_index(n, cfg.workers, [&](std::size_t i) {
    const TwoQubitResult r = evolve_two_qubit_protective(alpha, beta, cfg.t_grid[i], pulse);
    p_fail[i] = r.p_fail;
    angle[i] = r.pointer_angle;
  });

  std::vector<double> log_t(n), log_p(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_t[i] = std::log(cfg.t_grid[i]);
    log_p[i] = std::log(std::max(p_fail[i], 1e-300));
  }
  const double target_angle = std::numbers::pi * std::norm(alpha);

  SchemeOutput out;
  out.stats["t"] = cfg.t_grid;
  out.stats["p_fail"] = p_fail;
  out.stats["pointer_angle"] = angle;
  if (n >= 2) out.stats["log_slope"] = linear_fit_slope(log_t, log_p);
  out.stats["target_angle"] = target_angle;
  out.stats["final_angle_error"] = std::abs(angle.back() - target_angle);
  out.plot_header = "t,p_fail,pointer_angle";
  out.plot_lines.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.plot_lines.push_back(format_double(cfg.t_grid[i]) + ',' + format_double(p_fail[i]) + ',' +
                             format_double(angle[i]));
  return out;
}

SchemeOutput run_info_clone(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.trajectories;
  const double t = info_clone_full_transfer_time(cfg.n_clones);
  const InfoCloneResult ic = info_clone(cfg.alpha, cfg.blank_beta, cfg.n_clones, t);

  std::vector<double> re(n), im(n);
  double std_per_component = 0.0;
  parallel_for_index(n, cfg.workers, [&](std::size_t i) {
    RandomStream rng(cfg.seed, i);
    const AlphaEstimate est = estimate_alpha(ic.clone_amplitudes, rng);
    re[i] = est.alpha_hat.real();
    im[i] = est.alpha_hat.imag();
    if (i == 0) std_per_component = est.std_per_component;
  });

  const SampleMoments mre = compute_moments(re);
  const SampleMoments mim = compute_moments(im);

  SchemeOutput out;
  out.stats["full_transfer_time"] = t;
  out.stats["clone_amplitude"] =
      ordered_json::array({ic.clone_amplitudes.front().real(), ic.clone_amplitudes.front().imag()});
  out.stats["source_amplitude_after"] =
      ordered_json::array({ic.source_amplitude.real(), ic.source_amplitude.imag()});
  out.stats["predicted_std_per_component"] = std_per_component;
  out.stats["mean_alpha_hat"] = ordered_json::array({mre.mean, mim.mean});
  out.stats["std_alpha_hat"] =
      ordered_json::array({std::sqrt(mre.variance), std::sqrt(mim.variance)});
  if (!cfg.records_csv.empty()) {
    out.record_header = "experiment_id,alpha_hat_re,alpha_hat_im";
    out.record_lines.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      out.record_lines.push_back(std::to_string(i) + ',' + format_double(re[i]) + ',' +
                                 format_double(im[i]));
  }
  out.samples = std::move(re);
  out.default_true_mean = cfg.alpha.real();
  return out;
}

SchemeOutput run_optimal_clone(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.trajectories;
  std::vector<double> xs(n), ps(n);
  parallel_for_index(n, cfg.workers, [&](std::size_t i) {
    RandomStream rng(cfg.seed, i);
    const cdouble label = sample_coherent_clone(cfg.alpha, cfg.n_in, cfg.m_out, rng);
    xs[i] = sample_coherent_quadrature(label, Quadrature::Position, rng);
    ps[i] = sample_coherent_quadrature(label, Quadrature::Momentum, rng);
  });

  const CoherentCloneMoments pred = coherent_clone_moments(cfg.alpha, cfg.n_in, cfg.m_out);
  const SampleMoments mx = compute_moments(xs);
  const SampleMoments mp = compute_moments(ps);

  SchemeOutput out;
  out.stats["sigma2"] = pred.sigma2;
  out.stats["fidelity_bound"] = coherent_fidelity_bound(cfg.n_in, cfg.m_out);
  ordered_json predicted;
  predicted["mean_x"] = pred.mean_x;
  predicted["mean_p"] = pred.mean_p;
  predicted["var_x"] = pred.var_x;
  predicted["var_p"] = pred.var_p;
  out.stats["predicted"] = predicted;
  ordered_json measured;
  measured["mean_x"] = mx.mean;
  measured["mean_p"] = mp.mean;
  measured["var_x"] = mx.variance;
  measured["var_p"] = mp.variance;
  out.stats["measured"] = measured;
  if (!cfg.records_csv.empty()) {
    out.record_header = "draw_id,x,p";
    out.record_lines.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      out.record_lines.push_back(std::to_string(i) + ',' + format_double(xs[i]) + ',' +
                                 format_double(ps[i]));
  }
  out.samples = std::move(xs);
  out.default_true_mean = pred.mean_x;
  return out;
}

SchemeOutput run_linearity_probe(const ExperimentConfig& cfg) {
  const PureState s1(to_cvector(cfg.amplitudes));
  const PureState s2(to_cvector(cfg.amplitudes2));
  const HermitianOperator obs(cfg.observable_matrix);
  const double mismatch = linearity_probe(s1, s2, cfg.coeff_a, cfg.coeff_b, obs);
  const double e1 = expectation(s1, obs);
  const double e2 = expectation(s2, obs);
  const double na = std::norm(cfg.coeff_a);
  const double nb = std::norm(cfg.coeff_b);
  const double wa = na / (na + nb);
  const double wb = nb / (na + nb);

  SchemeOutput out;
  out.stats["mismatch"] = mismatch;
  out.stats["expectation_state1"] = e1;
  out.stats["expectation_state2"] = e2;
  out.stats["weight_state1"] = wa;
  out.stats["weight_state2"] = wb;
  out.stats["mixture_expectation"] = wa * e1 + wb * e2;
  return out;
}

SchemeOutput run_nocloning(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.trajectories;
  std::vector<double> re(n), im(n), res(n);
  std::vector<std::uint8_t> ok(n);
  parallel_for_index(n, cfg.workers, [&](std::size_t i) {
    RandomStream rng(cfg.seed, i);
    cdouble c;
    if (i == 0) {
      c = cdouble(0.0, 0.0);
    } else if (i == 1) {
      c = cdouble(1.0, 0.0);
    } else {
      // Interior overlap: uniform over the open unit disk, away from the two
      // fixed points where the constraint is satisfiable.
      do {
        c = cdouble(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      } while (std::abs(c) <= 1e-9 || std::abs(c) >= 1.0 - 1e-9);
    }
    const NoCloningCheck chk = nocloning_constraint(c, cfg.n_clones);
    re[i] = c.real();
    im[i] = c.imag();
    res[i] = chk.residual;
    ok[i] = chk.consistent ? 1 : 0;
  });

  bool fixed_ok = ok[0] != 0 && (n < 2 || ok[1] != 0);
  std::size_t interior = n > 2 ? n - 2 : 0;
  std::size_t flagged = 0;
  double min_resid = std::numeric_limits<double>::infinity();
  for (std::size_t i = 2; i < n; ++i) {
    if (!ok[i]) ++flagged;
    min_resid = std::min(min_resid, res[i]);
  }

  SchemeOutput out;
  out.stats["n_draws"] = n;
  out.stats["fixed_points_consistent"] = fixed_ok;
  out.stats["interior_draws"] = interior;
  out.stats["interior_flagged"] = flagged;
  if (interior > 0) out.stats["min_interior_residual"] = min_resid;
  if (!cfg.records_csv.empty()) {
    out.record_header = "draw_id,overlap_re,overlap_im,residual,consistent";
    out.record_lines.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      out.record_lines.push_back(std::to_string(i) + ',' + format_double(re[i]) + ',' +
                                 format_double(im[i]) + ',' + format_double(res[i]) + ',' +
                                 std::to_string(static_cast<int>(ok[i])));
  }
  out.samples = std::move(res);
  return out;
}

// Histogram of the samples with the winning mixture density alongside, so the
// fit can be plotted over the data.
std::string histogram_plot_csv(const std::vector<double>& xs,
                               const std::optional<OntologyVerdict>& verdict) {
  const std::size_t n = xs.size();
  const std::size_t bins = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))), 10, 200);
  double lo = *std::min_element(xs.begin(), xs.end());
  double hi = *std::max_element(xs.begin(), xs.end());
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double x : xs) {
    std::size_t b = static_cast<std::size_t>((x - lo) / width);
    ++counts[std::min(b, bins - 1)];
  }

  GaussianMixture1D fit;
  if (verdict) {
    for (const MixtureComponent& c : verdict->components) {
      fit.weights.push_back(c.weight);
      fit.means.push_back(c.mean);
      fit.sigmas.push_back(c.sigma);
    }
  }

  std::string csv = "bin_lo,bin_center,bin_hi,count,density,fit_density\n";
  for (std::size_t b = 0; b < bins; ++b) {
    const double blo = lo + width * static_cast<double>(b);
    const double bhi = blo + width;
    const double center = 0.5 * (blo + bhi);
    const double density =
        static_cast<double>(counts[b]) / (static_cast<double>(n) * width);
    const double fit_density = verdict ? fit.pdf(center) : 0.0;
    csv += format_double(blo) + ',' + format_double(center) + ',' + format_double(bhi) + ',' +
           std::to_string(counts[b]) + ',' + format_double(density) + ',' +
           format_double(fit_density) + '\n';
  }
  return csv;
}

}  // namespace

ordered_json RunSummary::to_json() const {
  ordered_json j;
  j["scheme"] = scheme_name(config.scheme);
  j["seed"] = config.seed;
  j["workers"] = config.workers;
  if (scheme_samples(config.scheme)) j["trajectories"] = config.trajectories;
  j["config"] = experiment_config_to_json(config);
  j["n_samples"] = samples.size();
  if (moments) {
    ordered_json m;
    m["n"] = moments->n;
    m["mean"] = moments->mean;
    m["variance"] = moments->variance;
    m["min"] = moments->min;
    m["max"] = moments->max;
    j["moments"] = m;
  } else {
    j["moments"] = nullptr;
  }
  j["stats"] = stats;
  if (verdict) {
    j["verdict"] = verdict_name(verdict->kind);
    j["mu_hat"] = verdict->mu_hat;
    j["epsilon_hat"] = verdict->epsilon_hat;
    j["center_error"] = std::isfinite(verdict->center_error)
                            ? ordered_json(verdict->center_error)
                            : ordered_json(nullptr);
    ordered_json comps = ordered_json::array();
    for (const MixtureComponent& c : verdict->components) {
      ordered_json jc;
      jc["weight"] = c.weight;
      jc["mean"] = c.mean;
      jc["sigma"] = c.sigma;
      comps.push_back(jc);
    }
    j["components"] = comps;
    j["pinned"] = verdict->pinned;
    j["bic"] = verdict->bic;
  } else {
    j["verdict"] = nullptr;
    j["mu_hat"] = nullptr;
    j["epsilon_hat"] = nullptr;
    j["center_error"] = nullptr;
    j["components"] = ordered_json::array();
    j["pinned"] = nullptr;
    j["bic"] = nullptr;
  }
  j["records_csv"] =
      config.records_csv.empty() ? ordered_json(nullptr) : ordered_json(config.records_csv);
  j["plot_csv"] = config.plot_csv.empty() ? ordered_json(nullptr) : ordered_json(config.plot_csv);
  j["runtime_s"] = runtime_s;
  return j;
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();

  SchemeOutput out;
  switch (cfg.scheme) {
    case Scheme::StrongRepeat: out = run_strong(cfg); break;
    case Scheme::WeakRepeat: out = run_weak(cfg); break;
    case Scheme::ProtectiveBranch: out = run_protective_branch(cfg); break;
    case Scheme::TwoQubitProtective: out = run_two_qubit(cfg); break;
    case Scheme::InfoClone: out = run_info_clone(cfg); break;
    case Scheme::OptimalClone: out = run_optimal_clone(cfg); break;
    case Scheme::LinearityProbe: out = run_linearity_probe(cfg); break;
    case Scheme::NoCloning: out = run_nocloning(cfg); break;
  }

  RunSummary rs;
  rs.config = cfg;
  rs.samples = std::move(out.samples);
  rs.stats = std::move(out.stats);
  if (!rs.samples.empty()) rs.moments = compute_moments(rs.samples);

  if (scheme_classifies(cfg.scheme)) {
    if (rs.samples.size() >= 500) {
      const std::optional<double> ref = cfg.true_mean ? cfg.true_mean : out.default_true_mean;
      rs.verdict = classify_mean_distribution(rs.samples, out.pinned_eigenvalues, ref);
      rs.stats["reference_mean"] = ref ? ordered_json(*ref) : ordered_json(nullptr);
    } else {
      rs.stats["classification_note"] = "classification needs at least 500 samples";
    }
  }

  if (!cfg.records_csv.empty())
    write_text_file(cfg.records_csv, join_csv(out.record_header, out.record_lines));
  if (!cfg.plot_csv.empty()) {
    if (!out.plot_header.empty())
      write_text_file(cfg.plot_csv, join_csv(out.plot_header, out.plot_lines));
    else
      write_text_file(cfg.plot_csv, histogram_plot_csv(rs.samples, rs.verdict));
  }

  rs.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!cfg.summary_json.empty()) write_text_file(cfg.summary_json, rs.to_json().dump(2) + "\n");
  return rs;
}

std::vector<ResourceRow> resource_report(const PureState& psi, const Observable& s,
                                         std::size_t m_strong,
                                         const std::vector<double>& multipliers) {
  const double spread = s.spread(psi.probabilities());
  std::vector<ResourceRow> rows;
  rows.reserve(multipliers.size());
  for (double mult : multipliers) {
    ResourceRow r;
    r.multiplier = mult;
    r.delta_p = mult * spread;
    r.m_weak_exact = weak_resource_ratio_exact(r.delta_p, spread, m_strong);
    r.m_weak = weak_resource_ratio(r.delta_p, spread, m_strong);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace qmeter
