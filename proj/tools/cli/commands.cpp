#include "commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <thread>

#include "vote_audit/errors.hpp"
#include "vote_audit/montecarlo.hpp"
#include "vote_audit/prediction.hpp"
#include "vote_audit/svg_plot.hpp"
#include "vote_audit/wls.hpp"

namespace vote_audit::cli {
namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10e", v);
  return buf;
}

// JSON has no infinities; non-finite values become null.
Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json envelope(std::string_view command, Json result, Json error) {
  Json j;
  j["command"] = command;
  j["ok"] = error.is_null();
  j["result"] = std::move(result);
  j["error"] = std::move(error);
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

template <class Body>
int guarded(std::string_view command, const RunConfiguration& cfg, std::ostream& out, std::ostream& err, Body body) {
  const bool json = cfg.output_format == OutputFormat::json;
  auto fail = [&](int code, std::string_view kind, const std::string& message, std::optional<std::size_t> line) {
    if (json) {
      Json e;
      e["kind"] = kind;
      e["message"] = message;
      e["line"] = line ? Json(*line) : Json(nullptr);
      out << envelope(command, nullptr, std::move(e)).dump(2) << '\n';
    }
    err << "vote-audit " << command << ": " << message << '\n';
    return code;
  };
  try {
    Json result = body(json);
    if (json) out << envelope(command, std::move(result), nullptr).dump(2) << '\n';
    return kExitOk;
  } catch (const UsageError& e) {
    return fail(kExitUsage, "usage", e.what(), std::nullopt);
  } catch (const ParseError& e) {
    return fail(kExitDataError, "parse", e.what(), e.line() ? std::optional<std::size_t>(e.line()) : std::nullopt);
  } catch (const AuditError& e) {
    return fail(kExitDataError, "data", e.what(), std::nullopt);
  } catch (const IoError& e) {
    return fail(kExitDataError, "io", e.what(), std::nullopt);
  }
}

ElectionDataset load(const RunConfiguration& cfg) {
  if (cfg.input_path.empty()) throw UsageError("an input CSV path is required");
  return load_dataset(cfg.input_path);
}

Json fit_json(const wls::RegressionFit& fit) {
  Json j;
  j["k_hat"] = fit.k_hat;
  j["sigma2_hat"] = fit.sigma2_hat;
  j["var_k_hat"] = fit.var_k_hat;
  j["s_xx"] = fit.s_xx;
  j["dof"] = fit.dof;
  j["n_used"] = fit.n_used;
  j["excluded_ids"] = fit.excluded_ids;
  return j;
}

}  // namespace

int cmd_analyze(const RunConfiguration& cfg, std::ostream& out, std::ostream& err) {
  return guarded("analyze", cfg, out, err, [&](bool json) {
    const auto ds = load(cfg);
    const auto parts = partition(ds, cfg.variant);
    const auto fit = wls::fit_through_origin(parts.green);
    const Count needed = votes_needed(ds.margin_official(), cfg.win_rule);
    const Count threshold = reversal_threshold(ds, parts.red, cfg.win_rule);
    const auto rep = prediction::reversal_probability(fit, parts.red, threshold, cfg.variant);
    std::optional<prediction::PredictionInterval> interval;
    if (cfg.level) {
      if (!(*cfg.level > 0.0 && *cfg.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
      interval = prediction::prediction_interval(fit, parts.red, *cfg.level);
    }

    Json r;
    r["variant"] = to_string(cfg.variant);
    r["n_green"] = parts.green.size();
    r["n_red"] = parts.red.size();
    r["fit"] = fit_json(fit);
    r["margin_official"] = ds.margin_official();
    r["votes_needed"] = needed;
    r["v_b_red"] = rep.v_b_red;
    r["m_red"] = rep.m_red;
    r["v_m_counted"] = rep.v_m_counted;
    r["v_threshold"] = rep.v_threshold;
    r["point_prediction"] = rep.point_prediction;
    r["pred_sd"] = rep.pred_sd;
    r["t_stat"] = real(rep.t_stat);
    r["dof"] = rep.dof;
    r["p"] = rep.p_reversal.value;
    r["log10_p"] = real(rep.p_reversal.log10_value());
    r["degenerate"] = rep.degenerate;
    r["interval"] = interval ? Json{{"level", interval->level}, {"lower", interval->lower}, {"upper", interval->upper}}
                             : Json(nullptr);

    if (!json) {
      out << "variant:            " << to_string(cfg.variant) << '\n'
          << "districts (N, M):   " << parts.green.size() << ", " << parts.red.size() << '\n'
          << "k_hat:              " << fmt_real(fit.k_hat) << '\n'
          << "sigma2_hat:         " << fmt_real(fit.sigma2_hat) << '\n'
          << "var(k_hat):         " << fmt_real(fit.var_k_hat) << '\n'
          << "v_b (red):          " << rep.v_b_red << '\n'
          << "m (red):            " << rep.m_red << '\n'
          << "counted v_m (red):  " << rep.v_m_counted << '\n'
          << "official margin:    " << ds.margin_official() << '\n'
          << "threshold V~:       " << rep.v_threshold << " (" << rep.v_m_counted << " + " << needed << ")\n"
          << "point prediction:   " << fmt_real(rep.point_prediction) << '\n'
          << "prediction sd:      " << fmt_real(rep.pred_sd) << '\n'
          << "t statistic:        " << fmt_real(rep.t_stat) << '\n'
          << "degrees of freedom: " << rep.dof << '\n'
          << "p = P[V >= V~]:     " << fmt_sci(rep.p_reversal.value) << '\n'
          << "log10 p:            " << fmt_real(rep.p_reversal.log10_value()) << '\n';
      if (rep.degenerate) out << "WARNING: sigma_hat is zero; p is a degenerate 0/1 verdict\n";
      if (!fit.excluded_ids.empty())
        out << "note: " << fit.excluded_ids.size() << " district(s) without mail votes excluded from the fit\n";
      if (interval)
        out << "prediction interval " << fmt_real(interval->level) << ": [" << fmt_real(interval->lower) << ", "
            << fmt_real(interval->upper) << "]\n";
    }
    return r;
  });
}

int cmd_scenario(const RunConfiguration& cfg, std::ostream& out, std::ostream& err) {
  return guarded("scenario", cfg, out, err, [&](bool json) {
    const auto ds = load(cfg);
    const auto parts = partition(ds, cfg.variant);
    if (cfg.scenario_votes && *cfg.scenario_votes < 0) throw UsageError("--votes must be non-negative");
    const Count votes = cfg.scenario_votes ? *cfg.scenario_votes : votes_needed(ds.margin_official(), cfg.win_rule);
    const auto result = scenario::build_reversal_scenario(ds, parts.red, votes, cfg.allocation_base);
    const std::string csv = to_csv(result.modified);
    if (cfg.out_path) write_file(*cfg.out_path, csv);

    char summary[160];
    std::snprintf(summary, sizeof(summary), "moved %lld votes; resulting margin (candidate 1 - candidate 2): %+lld",
                  static_cast<long long>(result.total_moved), static_cast<long long>(result.resulting_margin));

    Json moves = Json::object();
    for (const auto& [id, n] : result.votes_moved_per_district) moves[id] = n;
    Json r;
    r["variant"] = to_string(cfg.variant);
    r["votes_to_move"] = votes;
    r["total_moved"] = result.total_moved;
    r["resulting_margin"] = result.resulting_margin;
    r["moves"] = std::move(moves);
    r["out"] = cfg.out_path ? Json(*cfg.out_path) : Json(nullptr);
    r["csv"] = cfg.out_path ? Json(nullptr) : Json(csv);

    if (!json) {
      if (cfg.out_path) {
        out << summary << '\n';
      } else {
        out << csv;
        err << summary << '\n';
      }
    }
    return r;
  });
}

int cmd_plot(const RunConfiguration& cfg, std::ostream& out, std::ostream& err) {
  return guarded("plot", cfg, out, err, [&](bool json) {
    if (!cfg.out_path || cfg.out_path->empty()) throw UsageError("plot needs --out <file.svg>");
    auto ds = load(cfg);
    plot::ScatterOptions options;
    options.variant = cfg.variant;
    options.title = "Candidate 1 share: mail vs ballot votes (counted)";
    if (cfg.scenario_votes) {
      if (*cfg.scenario_votes < 0) throw UsageError("--votes must be non-negative");
      const auto parts = partition(ds, cfg.variant);
      ds = scenario::build_reversal_scenario(ds, parts.red, *cfg.scenario_votes, cfg.allocation_base).modified;
      options.title = "Candidate 1 share: mail vs ballot votes (reversal scenario)";
    }
    write_file(*cfg.out_path, plot::render_scatter_svg(ds, options));

    std::size_t green = 0, red = 0, dubious = 0;
    for (const auto& d : ds.districts()) {
      if (d.ballot_total == 0 || d.mail_total == 0) continue;
      const bool is_red = d.status == DistrictStatus::red ||
                          (cfg.variant == Variant::red_and_dubious && d.status == DistrictStatus::dubious);
      (is_red ? red : green) += 1;
      dubious += d.status == DistrictStatus::dubious ? 1 : 0;
    }
    Json r;
    r["variant"] = to_string(cfg.variant);
    r["out"] = *cfg.out_path;
    r["green_points"] = green;
    r["red_points"] = red;
    r["dubious_points"] = dubious;
    r["scenario_votes"] = cfg.scenario_votes ? Json(*cfg.scenario_votes) : Json(nullptr);
    if (!json) out << "wrote " << *cfg.out_path << ": " << green << " green, " << red << " red points\n";
    return r;
  });
}

int cmd_calibrate(const RunConfiguration& cfg, std::ostream& out, std::ostream& err) {
  return guarded("calibrate", cfg, out, err, [&](bool json) {
    if (cfg.replications < montecarlo::kMinReplications)
      throw UsageError("--reps must be at least " + std::to_string(montecarlo::kMinReplications));
    const auto ds = load(cfg);
    const auto parts = partition(ds, cfg.variant);
    const auto fit = wls::fit_through_origin(parts.green);
    const montecarlo::ModelParameters params{fit.k_hat, std::sqrt(fit.sigma2_hat)};
    const std::uint64_t seed = cfg.seed.value_or(kDefaultSeed);
    const auto rep = montecarlo::calibrate(ds, params, cfg.replications, seed, cfg.variant, cfg.threads);

    Json quantiles = Json::array();
    for (const auto& [p, e] : rep.quantile_errors) quantiles.push_back({{"p", p}, {"abs_error", e}});
    Json t_stats = Json::array();
    for (double t : rep.t_stats) t_stats.push_back(real(t));
    Json r;
    r["variant"] = to_string(rep.variant);
    r["replications"] = rep.replications;
    r["seed"] = rep.seed;
    r["k"] = rep.params.k;
    r["sigma"] = rep.params.sigma;
    r["dof"] = rep.dof;
    r["ks_distance"] = rep.ks_distance;
    r["ks_critical_value"] = rep.ks_critical_value;
    r["ks_pass"] = rep.ks_pass;
    r["quantile_errors"] = std::move(quantiles);
    r["clamped"] = rep.clamped;
    r["clamp_rate"] = rep.clamp_rate;
    r["failures"] = rep.failures;
    r["mean_red_aggregate"] = rep.mean_red_aggregate;
    r["expected_red_aggregate"] = rep.expected_red_aggregate;
    r["t_stats"] = std::move(t_stats);

    if (!json) {
      out << "variant:             " << to_string(rep.variant) << '\n'
          << "replications:        " << rep.replications << " (seed " << rep.seed << ")\n"
          << "model k, sigma:      " << fmt_real(rep.params.k) << ", " << fmt_real(rep.params.sigma) << '\n'
          << "degrees of freedom:  " << rep.dof << '\n'
          << "KS distance:         " << fmt_real(rep.ks_distance) << " (95% critical " << fmt_real(rep.ks_critical_value)
          << ") " << (rep.ks_pass ? "PASS" : "FAIL") << '\n';
      for (const auto& [p, e] : rep.quantile_errors)
        out << "quantile error p=" << fmt_real(p) << ": " << fmt_real(e) << '\n';
      out << "clamp rate:          " << fmt_real(rep.clamp_rate) << " (" << rep.clamped << " draws)\n"
          << "failed fits:         " << rep.failures << '\n'
          << "mean red aggregate:  " << fmt_real(rep.mean_red_aggregate) << " (model " << fmt_real(rep.expected_red_aggregate)
          << ")\n";
    }
    return r;
  });
}

int cmd_validate(const RunConfiguration& cfg, std::ostream& out, std::ostream& err) {
  return guarded("validate", cfg, out, err, [&](bool json) {
    const auto ds = load(cfg);
    Count ballots = 0, mail = 0;
    for (const auto& d : ds.districts()) {
      ballots += d.ballot_total;
      mail += d.mail_total;
    }
    Json r;
    r["districts"] = ds.size();
    r["green"] = ds.count(DistrictStatus::green);
    r["red"] = ds.count(DistrictStatus::red);
    r["dubious"] = ds.count(DistrictStatus::dubious);
    r["ballot_total"] = ballots;
    r["mail_total"] = mail;
    r["margin_official"] = ds.margin_official();
    if (!json) {
      out << "valid: " << ds.size() << " districts (" << ds.count(DistrictStatus::green) << " green, "
          << ds.count(DistrictStatus::red) << " red, " << ds.count(DistrictStatus::dubious) << " dubious)\n"
          << "ballot votes: " << ballots << ", mail votes: " << mail << '\n'
          << "official margin (candidate 2 - candidate 1): " << ds.margin_official() << '\n';
    }
    return r;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audit of contaminated mail-vote districts against a heteroskedastic through-origin model",
               "vote-audit"};
  app.require_subcommand(1);
  RunConfiguration cfg;
  bool include_dubious = false;
  bool json = false;
  bool strict_win = false;
  std::string base = "mail_total";

  auto common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input_path, "district CSV")->required();
    sub->add_flag("--include-dubious", include_dubious, "treat dubious districts as contaminated");
    sub->add_flag("--json", json, "machine-readable output");
  };
  auto* analyze = app.add_subcommand("analyze", "fit the model and compute the reversal probability");
  common(analyze);
  analyze->add_option("--level", cfg.level, "also report a prediction interval at this level");
  analyze->add_flag("--strict-win", strict_win, "require a strict win instead of ceil(margin/2)");

  auto* scen = app.add_subcommand("scenario", "reassign votes to build the reversal counterfactual");
  common(scen);
  scen->add_option("--votes", cfg.scenario_votes, "votes to move (default: ceil(margin/2))");
  scen->add_option("--out", cfg.out_path, "write the modified CSV here instead of standard output");
  scen->add_option("--base", base, "allocation base")->check(CLI::IsMember({"mail_total", "mail_c2"}));
  scen->add_flag("--strict-win", strict_win, "default votes for a strict win");

  auto* plot = app.add_subcommand("plot", "write an SVG scatter of mail vs ballot percentages");
  common(plot);
  plot->add_option("--out", cfg.out_path, "SVG output path")->required();
  plot->add_option("--votes", cfg.scenario_votes, "plot the reversal scenario with this many moved votes");
  plot->add_option("--base", base, "allocation base")->check(CLI::IsMember({"mail_total", "mail_c2"}));

  auto* cal = app.add_subcommand("calibrate", "Monte Carlo check of the t distribution claim");
  common(cal);
  cal->add_option("--seed", cfg.seed, "64-bit seed");
  cal->add_option("--reps", cfg.replications, "replications (>= 100)");
  cal->add_option("--threads", cfg.threads, "worker threads (output does not depend on this)")
      ->check(CLI::Range(1u, 256u));

  auto* val = app.add_subcommand("validate", "parse and validate a district CSV");
  common(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  cfg.variant = include_dubious ? Variant::red_and_dubious : Variant::red_only;
  cfg.output_format = json ? OutputFormat::json : OutputFormat::human;
  cfg.win_rule = strict_win ? WinRule::strict_win : WinRule::half_margin_rounded_up;
  cfg.allocation_base = base == "mail_c2" ? scenario::AllocationBase::mail_c2 : scenario::AllocationBase::mail_total;

  if (analyze->parsed()) return cmd_analyze(cfg, out, err);
  if (scen->parsed()) return cmd_scenario(cfg, out, err);
  if (plot->parsed()) return cmd_plot(cfg, out, err);
  if (cal->parsed()) return cmd_calibrate(cfg, out, err);
  return cmd_validate(cfg, out, err);
}

}  // namespace vote_audit::cli
