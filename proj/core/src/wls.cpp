#include "vote_audit/wls.hpp"

#include <algorithm>
#include <cmath>

#include "vote_audit/errors.hpp"

namespace vote_audit::wls {
namespace {

void check_problem(const GeneralWlsProblem& p) {
  const std::size_t n = p.design.rows();
  const std::size_t k = p.design.cols();
  if (k == 0) throw DomainError("design matrix has no columns");
  if (n < k) throw DomainError("fewer observations than parameters");
  if (p.response.size() != n || p.variance_weights.size() != n)
    throw DomainError("response and weight lengths must match the design rows");
  for (double w : p.variance_weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("variance weights must be positive and finite");
  if (n == k) throw InsufficientDataError("need more observations than parameters to estimate sigma^2");
}

}  // namespace

GeneralWlsFit solve_general(const GeneralWlsProblem& problem) {
  check_problem(problem);
  const std::size_t n = problem.design.rows();
  const std::size_t p = problem.design.cols();

  // Whitened system: rows scaled by 1/sqrt(w_n).
  Matrix a(n, p);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = 1.0 / std::sqrt(problem.variance_weights[i]);
    for (std::size_t j = 0; j < p; ++j) a(i, j) = problem.design(i, j) * s;
    b[i] = problem.response[i] * s;
  }

  // Householder QR in place; R ends up in the upper triangle of `a`, Q' b in `b`.
  std::vector<double> v(n);
  for (std::size_t j = 0; j < p; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm = std::hypot(norm, a(i, j));
    if (norm == 0.0) continue;
    const double alpha = a(j, j) > 0.0 ? -norm : norm;
    for (std::size_t i = j; i < n; ++i) v[i] = a(i, j);
    v[j] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;

    for (std::size_t c = j; c < p; ++c) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += v[i] * a(i, c);
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < n; ++i) a(i, c) -= f * v[i];
    }
    double dot = 0.0;
    for (std::size_t i = j; i < n; ++i) dot += v[i] * b[i];
    const double f = 2.0 * dot / vnorm2;
    for (std::size_t i = j; i < n; ++i) b[i] -= f * v[i];
    a(j, j) = alpha;
    for (std::size_t i = j + 1; i < n; ++i) a(i, j) = 0.0;
  }

  double largest = 0.0;
  for (std::size_t j = 0; j < p; ++j) largest = std::max(largest, std::abs(a(j, j)));
  for (std::size_t j = 0; j < p; ++j)
    if (largest == 0.0 || std::abs(a(j, j)) < kRankTolerance * largest)
      throw RankDeficientError("design matrix is numerically rank deficient (column " + std::to_string(j) + ")");

  GeneralWlsFit fit;
  fit.beta_hat.assign(p, 0.0);
  for (std::size_t jj = p; jj-- > 0;) {
    double s = b[jj];
    for (std::size_t c = jj + 1; c < p; ++c) s -= a(jj, c) * fit.beta_hat[c];
    fit.beta_hat[jj] = s / a(jj, jj);
  }

  fit.residuals.resize(n);
  double weighted_rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = 0.0;
    for (std::size_t j = 0; j < p; ++j) pred += problem.design(i, j) * fit.beta_hat[j];
    fit.residuals[i] = problem.response[i] - pred;
    weighted_rss += fit.residuals[i] * fit.residuals[i] / problem.variance_weights[i];
  }
  fit.dof = n - p;
  fit.sigma2_hat = weighted_rss / static_cast<double>(fit.dof);

  // (X'W^-1X)^-1 = R^-1 R^-T; invert the triangular factor column by column.
  Matrix rinv(p, p);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t r = c + 1; r-- > 0;) {
      double s = r == c ? 1.0 : 0.0;
      for (std::size_t k = r + 1; k <= c; ++k) s -= a(r, k) * rinv(k, c);
      rinv(r, c) = s / a(r, r);
    }
  }
  fit.cov_beta = Matrix(p, p);
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = r; c < p; ++c) {
      double s = 0.0;
      for (std::size_t k = c; k < p; ++k) s += rinv(r, k) * rinv(c, k);
      fit.cov_beta(r, c) = fit.sigma2_hat * s;
      fit.cov_beta(c, r) = fit.cov_beta(r, c);
    }
  }
  return fit;
}

RegressionFit fit_through_origin(std::span<const DistrictRecord> green) {
  RegressionFit fit;
  double sxy = 0.0;
  for (const auto& d : green) {
    if (d.mail_total == 0) {
      fit.excluded_ids.push_back(d.district_id);
      continue;
    }
    const double x = static_cast<double>(d.ballot_c1);
    const double y = static_cast<double>(d.mail_c1);
    const double m = static_cast<double>(d.mail_total);
    fit.s_xx += x * x / m;
    sxy += x * y / m;
    ++fit.n_used;
  }
  if (fit.n_used < 2)
    throw InsufficientDataError("through-origin fit needs at least two districts with mail votes");
  if (!(fit.s_xx > 0.0))
    throw InsufficientDataError("every fitted district has zero candidate-1 ballot votes");

  fit.k_hat = sxy / fit.s_xx;
  double weighted_rss = 0.0;
  fit.residuals.reserve(fit.n_used);
  for (const auto& d : green) {
    if (d.mail_total == 0) continue;
    const double r = static_cast<double>(d.mail_c1) - fit.k_hat * static_cast<double>(d.ballot_c1);
    fit.residuals.push_back(r);
    weighted_rss += r * r / static_cast<double>(d.mail_total);
  }
  fit.dof = fit.n_used - 1;
  fit.sigma2_hat = weighted_rss / static_cast<double>(fit.dof);
  fit.var_k_hat = fit.sigma2_hat / fit.s_xx;
  return fit;
}

GeneralWlsProblem through_origin_problem(std::span<const DistrictRecord> green) {
  std::size_t n = 0;
  for (const auto& d : green) n += d.mail_total > 0 ? 1 : 0;
  GeneralWlsProblem p{Matrix(n, 1), {}, {}};
  p.response.reserve(n);
  p.variance_weights.reserve(n);
  std::size_t row = 0;
  for (const auto& d : green) {
    if (d.mail_total == 0) continue;
    p.design(row++, 0) = static_cast<double>(d.ballot_c1);
    p.response.push_back(static_cast<double>(d.mail_c1));
    p.variance_weights.push_back(static_cast<double>(d.mail_total));
  }
  return p;
}

}  // namespace vote_audit::wls
