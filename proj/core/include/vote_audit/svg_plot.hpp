#pragma once

#include <string>

#include "vote_audit/election_data.hpp"

namespace vote_audit::plot {

struct ScatterOptions {
  std::string title = "Candidate 1 share: mail vs ballot votes";
  Variant variant = Variant::red_only;
};

/// Unweighted least-squares line y = intercept + slope * x in percentage
/// space over the green districts. Display only; not the model fit.
struct DisplayLine {
  double intercept = 0.0;
  double slope = 0.0;
  bool valid = false;
};

DisplayLine display_fit(const ElectionDataset& dataset, Variant variant);

/// SVG 1.1 scatter of mail vs ballot candidate-1 percentages. Each district
/// with non-zero ballot and mail totals becomes one <circle> whose class is
/// "pt green" or "pt red", with " dubious" appended for dubious districts.
/// Axes span 0-100 percent.
std::string render_scatter_svg(const ElectionDataset& dataset, const ScatterOptions& options);

}  // namespace vote_audit::plot
