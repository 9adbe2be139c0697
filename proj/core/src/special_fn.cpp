#include "vote_audit/special_fn.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "vote_audit/errors.hpp"

namespace vote_audit::special {
namespace {

constexpr double kEuler = 0.577215664901532860607;
constexpr double kHalfLog2Pi = 0.91893853320467274178;

// zeta(n) - 1 for n = 2..40. Beyond that 2^-n + 3^-n is exact to double
// precision and is computed on the fly.
constexpr std::array<double, 39> kZetaMinusOne = {
    0.64493406684822643647,     // 2
    0.2020569031595942854,      // 3
    0.08232323371113819152,     // 4
    0.03692775514336992633,     // 5
    0.01734306198444913971,     // 6
    0.00834927738192282684,     // 7
    0.00407735619794433938,     // 8
    0.00200839282608221442,     // 9
    0.00099457512781808534,     // 10
    0.00049418860411946456,     // 11
    0.0002460865533080483,      // 12
    0.00012271334757848915,     // 13
    0.00006124813505870483,     // 14
    0.00003058823630702049,     // 15
    0.00001528225940865187,     // 16
    0.00000763719763789976,     // 17
    0.00000381729326499984,     // 18
    0.00000190821271655394,     // 19
    0.0000009539620338728,      // 20
    0.00000047693298678781,     // 21
    0.00000023845050272773,     // 22
    0.00000011921992596531,     // 23
    0.00000005960818905126,     // 24
    0.00000002980350351465,     // 25
    0.00000001490155482837,     // 26
    0.00000000745071178984,     // 27
    0.00000000372533402479,     // 28
    0.00000000186265972351,     // 29
    0.00000000093132743242,     // 30
    0.000000000465662906503,    // 31
    0.000000000232831183367,    // 32
    0.000000000116415501727,    // 33
    0.0000000000582077208791,   // 34
    0.0000000000291038504450,   // 35
    0.0000000000145519218911,   // 36
    0.00000000000727595983505,  // 37
    0.00000000000363797954737,  // 38
    0.00000000000181898965030,  // 39
    0.000000000000909494784026, // 40
};

double zeta_minus_one(int n) {
  if (n <= 40) return kZetaMinusOne[static_cast<std::size_t>(n - 2)];
  return std::pow(2.0, -n) + std::pow(3.0, -n);
}

// ln Gamma(2 + z) for |z| <= 0.5:
//   z (1 - gamma) + sum_{n>=2} (-1)^n (zeta(n) - 1) z^n / n
// The series converges like (z/2)^n.
double log_gamma_2p(double z) {
  double sum = 0.0;
  double power = -z;  // (-z)^n
  for (int n = 2; n < 64; ++n) {
    power *= -z;
    const double term = zeta_minus_one(n) * power / n;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return z * (1.0 - kEuler) + sum;
}

// Stirling series; used for x >= 10 where eight terms reach full precision.
double log_gamma_stirling(double x) {
  constexpr std::array<double, 8> c = {
      1.0 / 12.0,        -1.0 / 360.0,  1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0, -691.0 / 360360.0,  1.0 / 156.0, -3617.0 / 122400.0,
  };
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) series = series * inv2 + *it;
  return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + series * inv;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(what) + " must be positive and finite");
}

// log I_x(a, b) by the continued fraction, valid and fast for
// x < (a + 1) / (a + b + 2). `y` is 1 - x supplied exactly by the caller and
// the logs of both are passed in to avoid cancellation in the prefactor.
double log_inc_beta_cf(double x, double log_x, double log_y, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  bool converged = false;
  for (int m = 1; m <= kBetaMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("incomplete beta continued fraction did not converge");
  return a * log_x + b * log_y - log_beta(a, b) - std::log(a) + std::log(h);
}

// Upper tail P[T > t] for t >= 0; always <= 1/2.
TailProbability upper_tail(double t, double nu) {
  if (t == 0.0) return {0.5, -std::numbers::ln2};

  // x = nu / (nu + t^2), y = t^2 / (nu + t^2), with logs, overflow-free.
  double x, y, log_x, log_y;
  if (t * t > nu || !std::isfinite(t * t)) {
    const double r = (nu / t) / t;
    const double log_r = std::log(nu) - 2.0 * std::log(t);
    x = r / (1.0 + r);
    y = 1.0 / (1.0 + r);
    log_x = log_r - std::log1p(r);
    log_y = -std::log1p(r);
  } else {
    const double s = (t / nu) * t;
    x = 1.0 / (1.0 + s);
    y = s / (1.0 + s);
    log_x = -std::log1p(s);
    log_y = std::log(t * t) - std::log(nu) - std::log1p(s);
  }

  const double a = 0.5 * nu;
  const double b = 0.5;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double log_tail = -std::numbers::ln2 + log_inc_beta_cf(x, log_x, log_y, a, b);
    return {std::exp(log_tail), log_tail};
  }
  const double complement = std::exp(log_inc_beta_cf(y, log_y, log_x, b, a));
  const double tail = 0.5 * (1.0 - complement);
  return {tail, std::log(tail)};
}

void check_t_args(double t, double nu) {
  require_positive(nu, "degrees of freedom");
  if (!std::isfinite(t)) throw DomainError("t must be finite");
}

}  // namespace

double TailProbability::log10_value() const noexcept { return log_value / std::numbers::ln10; }

double log_gamma(double x) {
  require_positive(x, "log_gamma argument");
  // ln Gamma(1 + z) = ln Gamma(2 + z) - log1p(z)
  if (x < 0.5) return log_gamma_2p(x) - std::log1p(x) - std::log(x);
  if (x <= 1.5) return log_gamma_2p(x - 1.0) - std::log(x);
  if (x <= 2.5) return log_gamma_2p(x - 2.0);
  if (x < 10.0) {
    // Step down into (1.5, 2.5]: Gamma(x) = (x-1)(x-2)...(x-n) Gamma(x-n).
    double product = 1.0;
    double z = x;
    while (z > 2.5) {
      z -= 1.0;
      product *= z;
    }
    return log_gamma_2p(z - 2.0) + std::log(product);
  }
  return log_gamma_stirling(x);
}

double log_beta(double a, double b) {
  require_positive(a, "beta parameter a");
  require_positive(b, "beta parameter b");
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double reg_inc_beta(double x, double a, double b) {
  require_positive(a, "beta parameter a");
  require_positive(b, "beta parameter b");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta argument must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double y = 1.0 - x;
  const double log_x = std::log(x);
  const double log_y = std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_inc_beta_cf(x, log_x, log_y, a, b));
  return 1.0 - std::exp(log_inc_beta_cf(y, log_y, log_x, b, a));
}

TailProbability student_t_sf(double t, double nu) {
  check_t_args(t, nu);
  const TailProbability tail = upper_tail(std::abs(t), nu);
  if (t >= 0.0) return tail;
  return {1.0 - tail.value, std::log1p(-tail.value)};
}

double student_t_cdf(double t, double nu) {
  check_t_args(t, nu);
  const TailProbability tail = upper_tail(std::abs(t), nu);
  return t >= 0.0 ? 1.0 - tail.value : tail.value;
}

double student_t_log_pdf(double t, double nu) {
  check_t_args(t, nu);
  return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi) -
         0.5 * (nu + 1.0) * std::log1p((t / nu) * t);
}

double student_t_quantile(double p, double nu) {
  require_positive(nu, "degrees of freedom");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile probability must lie in (0, 1)");
  if (p == 0.5) return 0.0;

  // Solve upper_tail(t) = q for t > 0 with q the smaller tail; Newton on
  // log(tail) safeguarded by a bracket.
  const double q = p > 0.5 ? 1.0 - p : p;
  const double log_q = std::log(q);
  double lo = 0.0;
  double hi = 1.0;
  while (upper_tail(hi, nu).log_value > log_q) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw ConvergenceError("t quantile bracket overflow");
  }

  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const TailProbability tail = upper_tail(t, nu);
    const double f = tail.log_value - log_q;
    if (f > 0.0) lo = t; else hi = t;
    if (f == 0.0) break;
    // d/dt log tail = -pdf / tail
    const double slope = -std::exp(student_t_log_pdf(t, nu) - tail.log_value);
    double next = t - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - t);
    t = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * t || hi - lo <= std::numeric_limits<double>::min())
      break;
  }
  return p > 0.5 ? t : -t;
}

}  // namespace vote_audit::special
