#include "vote_audit/prediction.hpp"

#include <cmath>
#include <limits>

#include "vote_audit/errors.hpp"

namespace vote_audit::prediction {

double prediction_sd(const wls::RegressionFit& fit, Count v_b_red, Count m_red) {
  const double vb = static_cast<double>(v_b_red);
  return std::sqrt(fit.sigma2_hat * (vb * vb / fit.s_xx + static_cast<double>(m_red)));
}

ReversalReport reversal_probability(const wls::RegressionFit& fit, std::span<const DistrictRecord> red,
                                    Count v_threshold, Variant variant) {
  const RedAggregate agg = aggregate_red(red);
  ReversalReport rep;
  rep.v_b_red = agg.ballot_c1;
  rep.m_red = agg.mail_total;
  rep.v_m_counted = agg.mail_c1;
  rep.v_threshold = v_threshold;
  rep.variant = variant;
  rep.dof = fit.dof;
  rep.point_prediction = fit.k_hat * static_cast<double>(agg.ballot_c1);
  rep.pred_sd = prediction_sd(fit, agg.ballot_c1, agg.mail_total);

  const double gap = static_cast<double>(v_threshold) - rep.point_prediction;
  if (!(rep.pred_sd > 0.0)) {
    rep.degenerate = true;
    constexpr double inf = std::numeric_limits<double>::infinity();
    rep.t_stat = gap > 0.0 ? inf : (gap < 0.0 ? -inf : 0.0);
    rep.p_reversal = gap > 0.0 ? special::TailProbability{0.0, -inf} : special::TailProbability{1.0, 0.0};
    return rep;
  }
  rep.t_stat = gap / rep.pred_sd;
  rep.p_reversal = special::student_t_sf(rep.t_stat, static_cast<double>(fit.dof));
  return rep;
}

PredictionInterval prediction_interval(const wls::RegressionFit& fit, std::span<const DistrictRecord> red,
                                       double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("interval level must lie in (0, 1)");
  if (!(fit.sigma2_hat > 0.0)) throw DegenerateFitError("sigma2_hat is zero; no prediction interval");
  const RedAggregate agg = aggregate_red(red);
  const double center = fit.k_hat * static_cast<double>(agg.ballot_c1);
  const double sd = prediction_sd(fit, agg.ballot_c1, agg.mail_total);
  const double q = special::student_t_quantile(0.5 * (1.0 + level), static_cast<double>(fit.dof));
  return {level, center - q * sd, center + q * sd};
}

}  // namespace vote_audit::prediction
