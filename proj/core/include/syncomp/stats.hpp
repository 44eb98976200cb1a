#pragma once

// Regression of complexity on utterance position, convergence
// classification and dialogue-level bootstrap bands.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "syncomp/complexity.hpp"

namespace syncomp {

/// Design cannot identify the requested coefficients (constant position,
/// too few observations).
class DegenerateDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain regression input: one row per observation, `group` indexes the
/// dialogue (any integer labels).
struct Observations {
  std::vector<double> position;
  std::vector<double> value;
  std::vector<int> group;

  std::size_t size() const { return value.size(); }
};

struct FitOptions {
  /// Regress on position / role_total instead of the raw per-role index.
  bool normalized_position = false;
  /// Add a position^2 term (OLS only).
  bool quadratic = false;
  /// Fix the variance ratio sigma_u^2 / sigma_e^2 instead of estimating it.
  /// 0 turns the mixed model into ordinary least squares.
  std::optional<double> fixed_theta;
};

enum class FitMethod { kLmm, kOls };
const char* to_string(FitMethod method);

struct QuadraticTerm {
  double coef = 0;
  double se = 0;
  double p_value = 1;
};

struct RegressionResult {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
  double p_value = 1;
  double sigma_u2 = 0;  // between-dialogue intercept variance
  double sigma_e2 = 0;  // residual variance
  double theta = 0;     // sigma_u2 / sigma_e2 at the optimum (lmm)
  int n_obs = 0;
  int n_groups = 0;
  int n_params = 2;
  FitMethod method = FitMethod::kOls;
  /// Zero residual variance: standard errors are 0 and p is 1 for a zero
  /// slope, 0 otherwise.
  bool degenerate = false;
  std::optional<QuadraticTerm> quadratic;
  std::vector<std::string> warnings;
};

/// Two-sided p-value of the slope, from slope and slope_se: Student t with
/// n_obs - n_params degrees of freedom for OLS, standard normal (Wald) for
/// the mixed model.
double slope_p_value(const RegressionResult& result);

/// "***" below 0.001, "**" below 0.01, "*" below 0.05, "" otherwise.
const char* significance_stars(double p_value);

Observations to_observations(std::span<const ComplexityRecord> records,
                             const FitOptions& options = {});

RegressionResult fit_ols(const Observations& obs, const FitOptions& options = {});
RegressionResult fit_ols(std::span<const ComplexityRecord> records,
                         const FitOptions& options = {});

/// Random-intercept model value = b0 + b1 * position + u_dialogue + e,
/// variance ratio chosen by maximizing the profiled REML log-likelihood.
/// A single dialogue falls back to OLS with a warning.
RegressionResult fit_lmm(const Observations& obs, const FitOptions& options = {});
RegressionResult fit_lmm(std::span<const ComplexityRecord> records,
                         const FitOptions& options = {});

/// Profiled REML log-likelihood at variance ratio theta (>= 0).
double reml_log_likelihood(const Observations& obs, double theta,
                           const FitOptions& options = {});

enum class Convergence {
  kConvergent,
  kDivergent,
  kParallelIncrease,
  kParallelDecrease,
  kFollowerRising,
  kInconclusive,
};
const char* to_string(Convergence label);

struct ConvergenceLabel {
  Convergence label = Convergence::kInconclusive;
  RegressionResult initiator;
  RegressionResult follower;
  double alpha = 0.05;
};

/// Follower slope must exceed this multiple of a positive initiator slope
/// for the follower_rising pattern.
inline constexpr double kFollowerRisingRatio = 10.0;

ConvergenceLabel classify_convergence(const RegressionResult& initiator,
                                      const RegressionResult& follower, double alpha);

struct BootstrapOptions {
  int n_bins = 10;
  int n_resamples = 1000;
  std::uint64_t seed = 20240917;
  /// Worker threads; 0 picks the hardware concurrency. Output does not
  /// depend on this.
  unsigned threads = 1;
};

struct BootstrapBand {
  int bin = 0;          // 1..n_bins
  double mean_sc = 0;
  double ci_low = 0;
  double ci_high = 0;
  int n_dialogues = 0;
  int n_obs = 0;
};

/// Percentile 95% bands of the per-bin mean complexity. Records are binned
/// by normalized position into equal-width bins; whole dialogues are
/// resampled with replacement. Bins without observations are omitted.
std::vector<BootstrapBand> bootstrap_bands(std::span<const ComplexityRecord> records,
                                           const BootstrapOptions& options = {});

/// Bin of a record: ceil(position * n_bins / role_total), in 1..n_bins.
int position_bin(int position, int role_total, int n_bins);

/// `role,method,slope,se,p,stars,sigma_u2,sigma_e2,n_obs,n_groups`
void write_results_csv_header(std::ostream& os);
void write_results_csv_row(std::ostream& os, Role role, const RegressionResult& result);

/// `role,bin,mean,lo,hi,n`
void write_bands_csv_header(std::ostream& os);
void write_bands_csv_rows(std::ostream& os, Role role, const std::vector<BootstrapBand>& bands);

}  // namespace syncomp
