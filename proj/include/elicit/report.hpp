#pragma once

#include <span>
#include <string>

#include "elicit/codec.hpp"
#include "elicit/metrics.hpp"

namespace elicit {

Json to_json(const MetricsReport& r);
MetricsReport report_from_json(const Json& j);

// Flat CSV: header `kind,name,value`, one `metric` row per scalar, one `wr`
// row per concept, and `curve_bleu` / `curve_rouge1_f` / `curve_rougeL_f` rows
// named by position.
std::string to_csv(const MetricsReport& r);

struct LabeledReport {
  std::string label;
  MetricsReport report;
};

// Score-vs-questions curves: BLEU panel on the left, ROUGE-L (solid) and
// ROUGE-1 (dashed) on the right, one colour per report.
std::string render_curves_svg(std::span<const LabeledReport> reports);

}  // namespace elicit
