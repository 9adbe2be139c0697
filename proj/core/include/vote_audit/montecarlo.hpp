#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "vote_audit/election_data.hpp"

namespace vote_audit::montecarlo {

/// xoshiro256** seeded through splitmix64.
///
/// Stream rule: the noise for district `d` (0-based index in dataset order)
/// in replication `r` comes from its own generator, seeded from
///   splitmix64(seed) ^ splitmix64((r << 32) | d).
/// Every (replication, district) pair therefore has an independent stream and
/// a parallel run reproduces the serial one exactly.
class Xoshiro256ss {
public:
  explicit Xoshiro256ss(std::uint64_t seed);
  static Xoshiro256ss for_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t district);

  std::uint64_t next();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal by Box-Muller (cosine branch; one variate per call).
  double normal();

private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t x);

/// True model constants: v_m = k v_b + eps, eps ~ N(0, sigma^2 m).
struct ModelParameters {
  double k = 0.0;
  double sigma = 1.0;
};

/// Redraws every district's candidate-1 mail votes from the model, rounded and
/// clamped to [0, mail_total]. Everything else is copied from `templ`.
ElectionDataset simulate_election(const ElectionDataset& templ, const ModelParameters& params, std::uint64_t seed);

struct CalibrationReport {
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  ModelParameters params;
  Variant variant = Variant::red_only;
  std::size_t dof = 0;
  /// Standardized prediction statistic per replication; NaN where the fit
  /// failed (see `failures`).
  std::vector<double> t_stats;
  double ks_distance = 0.0;
  double ks_critical_value = 0.0;  ///< 1.36 / sqrt(n), the 95% level
  bool ks_pass = false;
  /// probe probability -> |empirical quantile - t quantile|
  std::map<double, double> quantile_errors;
  std::size_t clamped = 0;
  double clamp_rate = 0.0;  ///< clamped / (replications * districts)
  std::size_t failures = 0;
  double mean_red_aggregate = 0.0;
  double expected_red_aggregate = 0.0;  ///< k * v_b over red districts
};

inline constexpr std::size_t kMinReplications = 100;
inline constexpr std::array<double, 5> kProbeQuantiles = {0.05, 0.25, 0.5, 0.75, 0.95};

/// Simulates the model on the template's geometry `replications` times, fits
/// on the green districts, and standardizes the realized red aggregate.
/// `threads` only changes wall time; the report is identical for any value.
/// Throws DomainError for replications < kMinReplications or sigma <= 0.
CalibrationReport calibrate(const ElectionDataset& templ, const ModelParameters& params, std::size_t replications,
                            std::uint64_t seed, Variant variant = Variant::red_only, unsigned threads = 1);

/// Two-sided KS distance between a sample and the t_dof CDF.
double ks_distance_t(std::vector<double> sample, double dof);

}  // namespace vote_audit::montecarlo
