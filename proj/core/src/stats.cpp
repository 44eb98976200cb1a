#include "syncomp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/tools/minima.hpp>

namespace syncomp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* to_string(FitMethod method) {
  return method == FitMethod::kLmm ? "lmm" : "ols";
}

const char* significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

namespace {

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

double two_sided_t_p(double t, int df) {
  if (df <= 0) return std::numeric_limits<double>::quiet_NaN();
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double p_from(double coef, double se, FitMethod method, int df) {
  if (se == 0.0) return coef == 0.0 ? 1.0 : 0.0;
  const double stat = coef / se;
  return method == FitMethod::kOls ? two_sided_t_p(stat, df) : two_sided_normal_p(stat);
}

int column_count(const FitOptions& options) { return options.quadratic ? 3 : 2; }

MatrixXd design(const Observations& obs, const FitOptions& options) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  MatrixXd x(n, column_count(options));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pos = obs.position[i];
    x(i, 0) = 1.0;
    x(i, 1) = pos;
    if (options.quadratic) x(i, 2) = pos * pos;
  }
  return x;
}

int count_groups(const Observations& obs) {
  std::vector<int> g(obs.group);
  std::sort(g.begin(), g.end());
  return static_cast<int>(std::unique(g.begin(), g.end()) - g.begin());
}

void check_design(const Observations& obs, const FitOptions& options) {
  if (obs.position.size() != obs.size() || obs.group.size() != obs.size()) {
    throw std::invalid_argument("observation columns differ in length");
  }
  const int p = column_count(options);
  if (obs.size() < 3 || static_cast<int>(obs.size()) <= p) {
    throw DegenerateDesignError("regression needs at least " + std::to_string(std::max(3, p + 1)) +
                                " observations, got " + std::to_string(obs.size()));
  }
  std::vector<double> distinct(obs.position);
  std::sort(distinct.begin(), distinct.end());
  const auto n_distinct = std::unique(distinct.begin(), distinct.end()) - distinct.begin();
  if (n_distinct < 2) throw DegenerateDesignError("position is constant");
  if (options.quadratic && n_distinct < 3) {
    throw DegenerateDesignError("quadratic term needs at least 3 distinct positions");
  }
}

bool constant_response(const Observations& obs) {
  return std::all_of(obs.value.begin(), obs.value.end(),
                     [&](double v) { return v == obs.value.front(); });
}

RegressionResult constant_result(const Observations& obs, const FitOptions& options,
                                 FitMethod method) {
  RegressionResult r;
  r.method = method;
  r.intercept = obs.value.front();
  r.n_obs = static_cast<int>(obs.size());
  r.n_groups = count_groups(obs);
  r.n_params = column_count(options);
  r.degenerate = true;
  if (options.quadratic) r.quadratic = QuadraticTerm{};
  r.warnings.push_back("response is constant");
  return r;
}

double residual_tolerance(const VectorXd& y) { return 1e-24 * std::max(1.0, y.squaredNorm()); }

}  // namespace

double slope_p_value(const RegressionResult& result) {
  return p_from(result.slope, result.slope_se, result.method, result.n_obs - result.n_params);
}

Observations to_observations(std::span<const ComplexityRecord> records,
                             const FitOptions& options) {
  Observations obs;
  std::map<std::string, int> group_index;
  for (const auto& r : records) {
    const auto [it, inserted] =
        group_index.emplace(r.dialogue_id, static_cast<int>(group_index.size()));
    obs.position.push_back(options.normalized_position ? r.normalized_position()
                                                       : static_cast<double>(r.position));
    obs.value.push_back(r.sc);
    obs.group.push_back(it->second);
  }
  return obs;
}

RegressionResult fit_ols(const Observations& obs, const FitOptions& options) {
  check_design(obs, options);
  if (constant_response(obs)) return constant_result(obs, options, FitMethod::kOls);

  const MatrixXd x = design(obs, options);
  const VectorXd y = Eigen::Map<const VectorXd>(obs.value.data(), obs.value.size());
  const auto p = x.cols();
  const auto n = x.rows();

  const Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
  if (qr.rank() < p) throw DegenerateDesignError("design matrix is rank deficient");
  const VectorXd beta = qr.solve(y);
  const double rss = (y - x * beta).squaredNorm();
  const int df = static_cast<int>(n - p);

  RegressionResult r;
  r.method = FitMethod::kOls;
  r.intercept = beta(0);
  r.slope = beta(1);
  r.n_obs = static_cast<int>(n);
  r.n_groups = count_groups(obs);
  r.n_params = static_cast<int>(p);

  if (rss <= residual_tolerance(y)) {
    r.degenerate = true;
    r.warnings.push_back("zero residual variance");
    if (options.quadratic) {
      r.quadratic = QuadraticTerm{beta(2), 0.0, p_from(beta(2), 0.0, FitMethod::kOls, df)};
    }
  } else {
    r.sigma_e2 = rss / df;
    const MatrixXd rt = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const MatrixXd r_inv =
        rt.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(p, p));
    const MatrixXd cov_permuted = r_inv * r_inv.transpose();
    const MatrixXd cov = qr.colsPermutation() * cov_permuted * qr.colsPermutation().transpose();
    r.slope_se = std::sqrt(r.sigma_e2 * cov(1, 1));
    if (options.quadratic) {
      QuadraticTerm q;
      q.coef = beta(2);
      q.se = std::sqrt(r.sigma_e2 * cov(2, 2));
      q.p_value = p_from(q.coef, q.se, FitMethod::kOls, df);
      r.quadratic = q;
    }
  }
  r.p_value = slope_p_value(r);
  return r;
}

RegressionResult fit_ols(std::span<const ComplexityRecord> records, const FitOptions& options) {
  return fit_ols(to_observations(records, options), options);
}

namespace {

// Per-dialogue sufficient statistics, centered within group so that the
// variance-ratio dependence separates from the within-group part.
struct GroupedData {
  int n = 0;
  int p = 0;
  std::vector<int> size;          // n_d
  std::vector<VectorXd> x_mean;   // per group mean of design row
  std::vector<double> y_mean;
  MatrixXd within_xx;             // sum over groups of centered X'X
  VectorXd within_xy;
  MatrixXd x_centered;            // rows centered within group
  VectorXd y_centered;
};

GroupedData group_data(const Observations& obs, const FitOptions& options) {
  GroupedData d;
  const MatrixXd x = design(obs, options);
  d.n = static_cast<int>(x.rows());
  d.p = static_cast<int>(x.cols());

  std::map<int, int> index;
  for (int g : obs.group) index.emplace(g, static_cast<int>(index.size()));
  const auto groups = index.size();
  d.size.assign(groups, 0);
  d.x_mean.assign(groups, VectorXd::Zero(d.p));
  d.y_mean.assign(groups, 0.0);

  std::vector<int> gi(d.n);
  for (int i = 0; i < d.n; ++i) {
    gi[i] = index.at(obs.group[i]);
    ++d.size[gi[i]];
    d.x_mean[gi[i]] += x.row(i).transpose();
    d.y_mean[gi[i]] += obs.value[i];
  }
  for (std::size_t g = 0; g < groups; ++g) {
    d.x_mean[g] /= d.size[g];
    d.y_mean[g] /= d.size[g];
  }
  d.x_centered.resize(d.n, d.p);
  d.y_centered.resize(d.n);
  for (int i = 0; i < d.n; ++i) {
    d.x_centered.row(i) = x.row(i) - d.x_mean[gi[i]].transpose();
    d.y_centered(i) = obs.value[i] - d.y_mean[gi[i]];
  }
  d.within_xx = d.x_centered.transpose() * d.x_centered;
  d.within_xy = d.x_centered.transpose() * d.y_centered;
  return d;
}

struct GlsFit {
  VectorXd beta;
  MatrixXd xt_hinv_x;
  double q = 0;          // r' H^-1 r
  double log_det_h = 0;
  double log_det_xhx = 0;
  std::vector<double> group_mean_residual;
};

// Generalized least squares with V = sigma^2 H, H_d = I + theta * 11'.
GlsFit gls(const GroupedData& d, double theta) {
  GlsFit f;
  f.xt_hinv_x = d.within_xx;
  VectorXd xt_hinv_y = d.within_xy;
  for (std::size_t g = 0; g < d.size.size(); ++g) {
    const double nd = d.size[g];
    const double between = nd / (1.0 + theta * nd);
    f.xt_hinv_x += between * d.x_mean[g] * d.x_mean[g].transpose();
    xt_hinv_y += between * d.x_mean[g] * d.y_mean[g];
    f.log_det_h += std::log1p(theta * nd);
  }
  const Eigen::LDLT<MatrixXd> ldlt(f.xt_hinv_x);
  f.beta = ldlt.solve(xt_hinv_y);
  f.log_det_xhx = ldlt.vectorD().array().log().sum();

  f.q = (d.y_centered - d.x_centered * f.beta).squaredNorm();
  f.group_mean_residual.resize(d.size.size());
  for (std::size_t g = 0; g < d.size.size(); ++g) {
    const double nd = d.size[g];
    const double rbar = d.y_mean[g] - d.x_mean[g].dot(f.beta);
    f.group_mean_residual[g] = rbar;
    f.q += nd / (1.0 + theta * nd) * rbar * rbar;
  }
  return f;
}

double reml_from_fit(const GroupedData& d, const GlsFit& f) {
  const double dof = d.n - d.p;
  return -0.5 * (dof * std::log(f.q / dof) + f.log_det_h + f.log_det_xhx +
                 dof * (1.0 + std::log(2.0 * std::numbers::pi)));
}

constexpr double kLogThetaMin = -8.0;
constexpr double kLogThetaMax = 8.0;
constexpr double kLogThetaStep = 0.25;

double optimize_theta(const GroupedData& d, bool* at_upper_bound) {
  const auto objective = [&](double theta) { return reml_from_fit(d, gls(d, theta)); };

  std::vector<double> grid;
  for (double s = kLogThetaMin; s <= kLogThetaMax + 1e-12; s += kLogThetaStep) grid.push_back(s);
  std::vector<double> values(grid.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    values[k] = objective(std::pow(10.0, grid[k]));
    if (values[k] > values[best]) best = k;
  }
  const double at_zero = objective(0.0);
  *at_upper_bound = false;
  if (at_zero >= values[best]) return 0.0;
  if (best + 1 == grid.size()) {
    *at_upper_bound = true;
    return std::pow(10.0, grid.back());
  }

  const int bits = std::numeric_limits<double>::digits / 2;
  double theta = 0.0;
  double value = 0.0;
  if (best == 0) {
    const auto [arg, neg] = boost::math::tools::brent_find_minima(
        [&](double t) { return -objective(t); }, 0.0, std::pow(10.0, grid[1]), bits);
    theta = arg;
    value = -neg;
  } else {
    const auto [arg, neg] = boost::math::tools::brent_find_minima(
        [&](double s) { return -objective(std::pow(10.0, s)); }, grid[best - 1], grid[best + 1],
        bits);
    theta = std::pow(10.0, arg);
    value = -neg;
  }
  return value >= values[best] ? theta : std::pow(10.0, grid[best]);
}

}  // namespace

double reml_log_likelihood(const Observations& obs, double theta, const FitOptions& options) {
  if (theta < 0) throw std::invalid_argument("variance ratio must be non-negative");
  check_design(obs, options);
  const auto d = group_data(obs, options);
  return reml_from_fit(d, gls(d, theta));
}

RegressionResult fit_lmm(const Observations& obs, const FitOptions& options) {
  if (options.quadratic) {
    throw std::invalid_argument("the quadratic term is only available for OLS fits");
  }
  check_design(obs, options);
  const int groups = count_groups(obs);
  if (groups < 2) {
    auto r = fit_ols(obs, options);
    r.warnings.push_back("single dialogue: fell back to OLS");
    return r;
  }
  if (constant_response(obs)) return constant_result(obs, options, FitMethod::kLmm);

  const auto d = group_data(obs, options);
  RegressionResult r;
  r.method = FitMethod::kLmm;
  r.n_obs = d.n;
  r.n_groups = groups;
  r.n_params = d.p;

  const auto ols = gls(d, 0.0);
  const VectorXd y = Eigen::Map<const VectorXd>(obs.value.data(), obs.value.size());
  if (ols.q <= residual_tolerance(y)) {
    r.intercept = ols.beta(0);
    r.slope = ols.beta(1);
    r.degenerate = true;
    r.warnings.push_back("zero residual variance");
    r.p_value = slope_p_value(r);
    return r;
  }

  bool at_upper_bound = false;
  double theta = 0.0;
  if (options.fixed_theta) {
    if (*options.fixed_theta < 0) throw std::invalid_argument("variance ratio must be non-negative");
    theta = *options.fixed_theta;
  } else {
    theta = optimize_theta(d, &at_upper_bound);
  }

  const auto fit = gls(d, theta);
  const double dof = d.n - d.p;
  r.theta = theta;
  r.intercept = fit.beta(0);
  r.slope = fit.beta(1);
  r.sigma_e2 = fit.q / dof;
  r.sigma_u2 = theta * r.sigma_e2;
  const MatrixXd cov = r.sigma_e2 * fit.xt_hinv_x.ldlt().solve(MatrixXd::Identity(d.p, d.p));
  r.slope_se = std::sqrt(cov(1, 1));

  if (at_upper_bound) {
    // Within-dialogue variation has vanished; the likelihood keeps rising
    // with theta. Report the between-dialogue variance of the group means.
    double ss = 0.0;
    for (double m : fit.group_mean_residual) ss += m * m;
    r.sigma_u2 = ss / (groups - 1);
    r.warnings.push_back("within-dialogue variance is numerically zero");
  }
  r.p_value = slope_p_value(r);
  return r;
}

RegressionResult fit_lmm(std::span<const ComplexityRecord> records, const FitOptions& options) {
  return fit_lmm(to_observations(records, options), options);
}

const char* to_string(Convergence label) {
  switch (label) {
    case Convergence::kConvergent: return "convergent";
    case Convergence::kDivergent: return "divergent";
    case Convergence::kParallelIncrease: return "parallel_increase";
    case Convergence::kParallelDecrease: return "parallel_decrease";
    case Convergence::kFollowerRising: return "follower_rising";
    case Convergence::kInconclusive: return "inconclusive";
  }
  return "unknown";
}

ConvergenceLabel classify_convergence(const RegressionResult& initiator,
                                      const RegressionResult& follower, double alpha) {
  ConvergenceLabel out{Convergence::kInconclusive, initiator, follower, alpha};
  if (initiator.degenerate || follower.degenerate) return out;
  const bool both_significant = initiator.p_value < alpha && follower.p_value < alpha;
  if (!both_significant) return out;

  const double a = initiator.slope;
  const double b = follower.slope;
  if (a < 0 && b > 0) {
    out.label = Convergence::kConvergent;
  } else if (a > 0 && b < 0) {
    out.label = Convergence::kDivergent;
  } else if (a > 0 && b > 0) {
    out.label = b > kFollowerRisingRatio * a ? Convergence::kFollowerRising
                                             : Convergence::kParallelIncrease;
  } else if (a < 0 && b < 0) {
    out.label = Convergence::kParallelDecrease;
  }
  return out;
}

int position_bin(int position, int role_total, int n_bins) {
  if (role_total < 1 || position < 1 || position > role_total || n_bins < 1) {
    throw std::invalid_argument("position outside 1..role_total");
  }
  const long long scaled = static_cast<long long>(position) * n_bins;
  return static_cast<int>((scaled + role_total - 1) / role_total);
}

namespace {

double percentile(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<BootstrapBand> bootstrap_bands(std::span<const ComplexityRecord> records,
                                           const BootstrapOptions& options) {
  if (options.n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
  if (options.n_resamples < 1) throw std::invalid_argument("n_resamples must be >= 1");
  const int bins = options.n_bins;

  std::map<std::string, int> dialogue_index;
  for (const auto& r : records) dialogue_index.emplace(r.dialogue_id, 0);
  int next = 0;
  for (auto& [id, idx] : dialogue_index) idx = next++;
  const int n_dialogues = next;

  // sums[d * bins + b], counts likewise
  std::vector<double> sums(static_cast<std::size_t>(n_dialogues) * bins, 0.0);
  std::vector<int> counts(sums.size(), 0);
  for (const auto& r : records) {
    const auto cell = static_cast<std::size_t>(dialogue_index.at(r.dialogue_id)) * bins +
                      (position_bin(r.position, r.role_total, bins) - 1);
    sums[cell] += r.sc;
    ++counts[cell];
  }

  std::vector<BootstrapBand> bands;
  if (n_dialogues == 0) return bands;

  const auto n_resamples = static_cast<std::size_t>(options.n_resamples);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> replicate(n_resamples * bins, nan);

  const auto run = [&](std::size_t begin, std::size_t end) {
    std::vector<double> s(bins);
    std::vector<int> c(bins);
    std::vector<int> picks(n_dialogues);
    for (std::size_t k = begin; k < end; ++k) {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                        static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
      std::mt19937_64 rng(seq);
      std::uniform_int_distribution<int> pick(0, n_dialogues - 1);
      for (auto& d : picks) d = pick(rng);
      std::fill(s.begin(), s.end(), 0.0);
      std::fill(c.begin(), c.end(), 0);
      for (int d : picks) {
        const auto base = static_cast<std::size_t>(d) * bins;
        for (int b = 0; b < bins; ++b) {
          s[b] += sums[base + b];
          c[b] += counts[base + b];
        }
      }
      for (int b = 0; b < bins; ++b) {
        if (c[b] > 0) replicate[k * bins + b] = s[b] / c[b];
      }
    }
  };

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_resamples));
  if (threads <= 1) {
    run(0, n_resamples);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n_resamples + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n_resamples; begin += chunk) {
      workers.emplace_back(run, begin, std::min(n_resamples, begin + chunk));
    }
  }

  for (int b = 0; b < bins; ++b) {
    double sum = 0.0;
    int count = 0;
    int contributing = 0;
    for (int d = 0; d < n_dialogues; ++d) {
      const auto cell = static_cast<std::size_t>(d) * bins + b;
      sum += sums[cell];
      count += counts[cell];
      contributing += counts[cell] > 0 ? 1 : 0;
    }
    if (count == 0) continue;

    std::vector<double> values;
    values.reserve(n_resamples);
    for (std::size_t k = 0; k < n_resamples; ++k) {
      const double v = replicate[k * bins + b];
      if (!std::isnan(v)) values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    if (values.empty()) values.push_back(sum / count);

    BootstrapBand band;
    band.bin = b + 1;
    band.mean_sc = sum / count;
    band.n_dialogues = contributing;
    band.n_obs = count;
    band.ci_low = std::min(percentile(values, 0.025), band.mean_sc);
    band.ci_high = std::max(percentile(values, 0.975), band.mean_sc);
    bands.push_back(band);
  }
  return bands;
}

void write_results_csv_header(std::ostream& os) {
  os << "role,method,slope,se,p,stars,sigma_u2,sigma_e2,n_obs,n_groups\n";
}

void write_results_csv_row(std::ostream& os, Role role, const RegressionResult& r) {
  os << to_string(role) << ',' << to_string(r.method) << ',' << format_double(r.slope) << ','
     << format_double(r.slope_se) << ',' << format_double(r.p_value) << ','
     << significance_stars(r.p_value) << ',' << format_double(r.sigma_u2) << ','
     << format_double(r.sigma_e2) << ',' << r.n_obs << ',' << r.n_groups << '\n';
}

void write_bands_csv_header(std::ostream& os) { os << "role,bin,mean,lo,hi,n\n"; }

void write_bands_csv_rows(std::ostream& os, Role role, const std::vector<BootstrapBand>& bands) {
  for (const auto& b : bands) {
    os << to_string(role) << ',' << b.bin << ',' << format_double(b.mean_sc) << ','
       << format_double(b.ci_low) << ',' << format_double(b.ci_high) << ',' << b.n_dialogues
       << '\n';
  }
}

}  // namespace syncomp
