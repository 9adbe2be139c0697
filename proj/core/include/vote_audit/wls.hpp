#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vote_audit/election_data.hpp"

namespace vote_audit::wls {

/// Dense row-major matrix; just enough for small least-squares problems.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = X beta + eps with cov(eps) = sigma^2 diag(variance_weights).
struct GeneralWlsProblem {
  Matrix design;
  std::vector<double> response;
  std::vector<double> variance_weights;
};

struct GeneralWlsFit {
  std::vector<double> beta_hat;
  double sigma2_hat = 0.0;
  Matrix cov_beta;  ///< sigma2_hat * (X' W^-1 X)^-1
  std::size_t dof = 0;
  std::vector<double> residuals;
};

/// Relative pivot size below which the design is declared rank deficient.
inline constexpr double kRankTolerance = 1e-12;

/// Generalized least squares with diagonal covariance. Rows are scaled by
/// 1/sqrt(w_n) and the problem is solved by Householder QR, so the normal
/// equations are never formed. Throws DomainError on malformed input and
/// RankDeficientError when a pivot of R falls below kRankTolerance times the
/// largest one.
GeneralWlsFit solve_general(const GeneralWlsProblem& problem);

/// Through-origin fit of candidate-1 mail votes on candidate-1 ballot votes
/// with noise variance proportional to each district's mail total.
struct RegressionFit {
  double k_hat = 0.0;
  double sigma2_hat = 0.0;
  double s_xx = 0.0;  ///< sum of ballot_c1^2 / mail_total over fitted districts
  double var_k_hat = 0.0;
  std::size_t dof = 0;
  std::size_t n_used = 0;
  std::vector<double> residuals;              ///< per fitted district, in input order
  std::vector<std::string> excluded_ids;      ///< districts skipped for mail_total == 0
};

/// Throws InsufficientDataError with fewer than two usable districts or when
/// every candidate-1 ballot count is zero.
RegressionFit fit_through_origin(std::span<const DistrictRecord> green);

/// The same fit expressed as a one-column GeneralWlsProblem (m = 0 rows
/// dropped). Used for cross-checks.
GeneralWlsProblem through_origin_problem(std::span<const DistrictRecord> green);

}  // namespace vote_audit::wls
