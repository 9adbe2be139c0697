#pragma once

#include <span>

#include "vote_audit/election_data.hpp"
#include "vote_audit/special_fn.hpp"
#include "vote_audit/wls.hpp"

namespace vote_audit::prediction {

/// Aggregate prediction for the contaminated districts and the probability
/// that their true candidate-1 mail total reaches the reversal threshold.
///
/// The aggregate V = k_hat * v_b + eps has variance
/// sigma^2 (v_b^2 / s_xx + m); standardized with sigma_hat it is t-distributed
/// with the fit's degrees of freedom.
struct ReversalReport {
  Count v_b_red = 0;
  Count m_red = 0;
  Count v_m_counted = 0;
  Count v_threshold = 0;
  double point_prediction = 0.0;  ///< k_hat * v_b_red
  double pred_sd = 0.0;           ///< sigma_hat * sqrt(v_b_red^2 / s_xx + m_red)
  double t_stat = 0.0;
  std::size_t dof = 0;
  special::TailProbability p_reversal;
  Variant variant = Variant::red_only;
  /// sigma_hat == 0: p_reversal is 0 or 1 by the sign of the gap and t_stat
  /// is infinite. Not a computed tail probability.
  bool degenerate = false;
};

struct PredictionInterval {
  double level = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Standard deviation of the aggregate predictor; the two variance terms are
/// var(k_hat) v_b^2 and sigma^2 m.
double prediction_sd(const wls::RegressionFit& fit, Count v_b_red, Count m_red);

ReversalReport reversal_probability(const wls::RegressionFit& fit, std::span<const DistrictRecord> red,
                                    Count v_threshold, Variant variant = Variant::red_only);

/// Symmetric t interval around k_hat * v_b. Throws DomainError unless
/// 0 < level < 1 and DegenerateFitError when sigma2_hat == 0.
PredictionInterval prediction_interval(const wls::RegressionFit& fit, std::span<const DistrictRecord> red,
                                       double level);

}  // namespace vote_audit::prediction
