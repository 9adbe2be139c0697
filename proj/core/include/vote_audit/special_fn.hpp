#pragma once

// Special functions backing the Student-t distribution. Everything here is a
// pure function of its arguments and may be called from any thread.

namespace vote_audit::special {

// An upper-tail probability together with its natural logarithm. The log is
// computed alongside the value, so it stays finite even where `value`
// underflows to zero.
struct TailProbability {
  double value = 0.0;
  double log_value = 0.0;

  double log10_value() const noexcept;
};

/// ln Gamma(x) for x > 0. Throws DomainError for x <= 0 or non-finite x.
double log_gamma(double x);

/// ln B(a, b).
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b).
///
/// Evaluated by continued fraction (modified Lentz) on whichever side of the
/// symmetry I_x(a,b) = 1 - I_{1-x}(b,a) converges faster. Throws DomainError
/// outside 0 <= x <= 1, a > 0, b > 0 and ConvergenceError if the continued
/// fraction fails to settle within kBetaMaxIterations.
double reg_inc_beta(double x, double a, double b);

inline constexpr int kBetaMaxIterations = 500;

/// P[T > t] for T ~ Student-t with nu degrees of freedom.
TailProbability student_t_sf(double t, double nu);

/// P[T <= t]; the small side is always evaluated directly.
double student_t_cdf(double t, double nu);

/// Log-density of the t distribution.
double student_t_log_pdf(double t, double nu);

/// Inverse of student_t_cdf. Throws DomainError unless 0 < p < 1 and nu > 0.
double student_t_quantile(double p, double nu);

}  // namespace vote_audit::special
