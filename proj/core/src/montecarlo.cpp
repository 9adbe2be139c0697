#include "vote_audit/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "vote_audit/errors.hpp"
#include "vote_audit/prediction.hpp"
#include "vote_audit/special_fn.hpp"
#include "vote_audit/wls.hpp"

namespace vote_audit::montecarlo {
namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Draws a model value for one district; returns true if it had to be clamped.
bool draw_mail_c1(const DistrictRecord& d, const ModelParameters& params, Xoshiro256ss& rng, Count& out) {
  const double mean = params.k * static_cast<double>(d.ballot_c1);
  const double sd = params.sigma * std::sqrt(static_cast<double>(d.mail_total));
  const double raw = std::nearbyint(mean + sd * rng.normal());
  if (raw < 0.0) {
    out = 0;
    return true;
  }
  if (raw > static_cast<double>(d.mail_total)) {
    out = d.mail_total;
    return true;
  }
  out = static_cast<Count>(raw);
  return false;
}

void check_params(const ModelParameters& params) {
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) throw DomainError("sigma must be positive");
  if (!std::isfinite(params.k)) throw DomainError("k must be finite");
}

struct ReplicationOutcome {
  double t_stat = std::numeric_limits<double>::quiet_NaN();
  Count red_aggregate = 0;
  std::size_t clamped = 0;
  bool failed = false;
};

double empirical_quantile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& word : s_) {
    word = splitmix64(x);
    x += 0x9E3779B97F4A7C15ULL;
  }
}

Xoshiro256ss Xoshiro256ss::for_stream(std::uint64_t seed, std::uint64_t replication, std::uint64_t district) {
  return Xoshiro256ss(splitmix64(seed) ^ splitmix64((replication << 32) | (district & 0xFFFFFFFFULL)));
}

std::uint64_t Xoshiro256ss::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256ss::uniform() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Xoshiro256ss::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ElectionDataset simulate_election(const ElectionDataset& templ, const ModelParameters& params, std::uint64_t seed) {
  check_params(params);
  std::vector<DistrictRecord> districts(templ.districts().begin(), templ.districts().end());
  for (std::size_t i = 0; i < districts.size(); ++i) {
    auto rng = Xoshiro256ss::for_stream(seed, 0, i);
    draw_mail_c1(districts[i], params, rng, districts[i].mail_c1);
  }
  return ElectionDataset(std::move(districts));
}

double ks_distance_t(std::vector<double> sample, double dof) {
  std::erase_if(sample, [](double v) { return !std::isfinite(v); });
  if (sample.empty()) return 1.0;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = special::student_t_cdf(sample[i], dof);
    const double fi = static_cast<double>(i);
    d = std::max({d, (fi + 1.0) / n - f, f - fi / n});
  }
  return d;
}

CalibrationReport calibrate(const ElectionDataset& templ, const ModelParameters& params, std::size_t replications,
                            std::uint64_t seed, Variant variant, unsigned threads) {
  check_params(params);
  if (replications < kMinReplications)
    throw DomainError("calibration needs at least " + std::to_string(kMinReplications) + " replications");

  // Geometry: which template rows are green or red under this variant.
  const auto all = templ.districts();
  std::vector<std::size_t> green_idx, red_idx;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const bool red = all[i].status == DistrictStatus::red ||
                     (variant == Variant::red_and_dubious && all[i].status == DistrictStatus::dubious);
    (red ? red_idx : green_idx).push_back(i);
  }
  if (red_idx.empty()) throw InsufficientDataError("template has no contaminated districts");
  Count red_ballot_c1 = 0;
  Count red_mail_total = 0;
  for (auto i : red_idx) {
    red_ballot_c1 += all[i].ballot_c1;
    red_mail_total += all[i].mail_total;
  }

  std::vector<ReplicationOutcome> outcomes(replications);
  auto run_range = [&](unsigned worker, unsigned workers) {
    std::vector<DistrictRecord> green;
    green.reserve(green_idx.size());
    for (auto i : green_idx) green.push_back(all[i]);
    for (std::size_t r = worker; r < replications; r += workers) {
      ReplicationOutcome& out = outcomes[r];
      for (std::size_t g = 0; g < green_idx.size(); ++g) {
        auto rng = Xoshiro256ss::for_stream(seed, r, green_idx[g]);
        out.clamped += draw_mail_c1(green[g], params, rng, green[g].mail_c1) ? 1 : 0;
      }
      for (auto i : red_idx) {
        auto rng = Xoshiro256ss::for_stream(seed, r, i);
        Count v = 0;
        out.clamped += draw_mail_c1(all[i], params, rng, v) ? 1 : 0;
        out.red_aggregate += v;
      }
      try {
        const auto fit = wls::fit_through_origin(green);
        const double sd = prediction::prediction_sd(fit, red_ballot_c1, red_mail_total);
        if (!(sd > 0.0)) throw DegenerateFitError("zero residual variance");
        out.t_stat = (static_cast<double>(out.red_aggregate) - fit.k_hat * static_cast<double>(red_ballot_c1)) / sd;
      } catch (const AuditError&) {
        out.failed = true;
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replications)));
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_range, w, workers);
    for (auto& t : pool) t.join();
  }

  CalibrationReport rep;
  rep.replications = replications;
  rep.seed = seed;
  rep.params = params;
  rep.variant = variant;
  std::size_t used = 0;
  for (auto i : green_idx) used += all[i].mail_total > 0 ? 1 : 0;
  rep.dof = used > 0 ? used - 1 : 0;
  rep.t_stats.reserve(replications);
  double aggregate_sum = 0.0;
  for (const auto& o : outcomes) {
    rep.t_stats.push_back(o.t_stat);
    rep.clamped += o.clamped;
    rep.failures += o.failed ? 1 : 0;
    aggregate_sum += static_cast<double>(o.red_aggregate);
  }
  rep.clamp_rate = static_cast<double>(rep.clamped) / (static_cast<double>(replications) * static_cast<double>(all.size()));
  rep.mean_red_aggregate = aggregate_sum / static_cast<double>(replications);
  rep.expected_red_aggregate = params.k * static_cast<double>(red_ballot_c1);

  std::vector<double> finite;
  for (double t : rep.t_stats)
    if (std::isfinite(t)) finite.push_back(t);
  if (finite.empty() || rep.dof == 0) {
    rep.ks_distance = 1.0;
    rep.ks_critical_value = 0.0;
    return rep;
  }
  rep.ks_distance = ks_distance_t(finite, static_cast<double>(rep.dof));
  rep.ks_critical_value = 1.36 / std::sqrt(static_cast<double>(finite.size()));
  rep.ks_pass = rep.ks_distance < rep.ks_critical_value;
  std::sort(finite.begin(), finite.end());
  for (double p : kProbeQuantiles)
    rep.quantile_errors[p] =
        std::abs(empirical_quantile(finite, p) - special::student_t_quantile(p, static_cast<double>(rep.dof)));
  return rep;
}

}  // namespace vote_audit::montecarlo
