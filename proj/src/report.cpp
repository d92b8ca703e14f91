#include "elicit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <sstream>
#include <type_traits>

#include "elicit/errors.hpp"

namespace elicit {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

}  // namespace

Json to_json(const MetricsReport& r) {
  Json o = Json::object();
  o["transcript_count"] = r.transcript_count;
  o["turn_count"] = r.turn_count;
  o["bleu_mean"] = r.bleu_mean;
  o["rouge1_f_mean"] = r.rouge1_f_mean;
  o["rougeL_f_mean"] = r.rougeL_f_mean;
  o["unanswered_rate"] = r.unanswered_rate;
  o["repetition_rate"] = r.repetition_rate;
  Json curve = Json::array();
  for (const PositionScore& p : r.per_position_scores) {
    Json row = Json::object();
    row["position"] = p.position;
    row["bleu"] = p.bleu;
    row["rouge1_f"] = p.rouge1_f;
    row["rougeL_f"] = p.rougeL_f;
    curve.push_back(std::move(row));
  }
  o["per_position_scores"] = std::move(curve);
  Json wr = Json::object();
  for (const auto& [tag, value] : r.weighted_ranks) wr[tag] = value;
  o["weighted_ranks"] = std::move(wr);
  return o;
}

MetricsReport report_from_json(const Json& j) {
  try {
    MetricsReport r;
    r.transcript_count = j.at("transcript_count").get<std::size_t>();
    r.turn_count = j.at("turn_count").get<std::size_t>();
    r.bleu_mean = j.at("bleu_mean").get<double>();
    r.rouge1_f_mean = j.at("rouge1_f_mean").get<double>();
    r.rougeL_f_mean = j.at("rougeL_f_mean").get<double>();
    r.unanswered_rate = j.at("unanswered_rate").get<double>();
    r.repetition_rate = j.at("repetition_rate").get<double>();
    for (const Json& row : j.at("per_position_scores")) {
      r.per_position_scores.push_back(PositionScore{
          row.at("position").get<std::size_t>(), row.at("bleu").get<double>(),
          row.at("rouge1_f").get<double>(), row.at("rougeL_f").get<double>()});
    }
    for (const auto& [tag, value] : j.at("weighted_ranks").items()) {
      r.weighted_ranks[tag] = value.get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed metrics report: ") + e.what());
  }
}

std::string to_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "kind,name,value\n";
  out << "metric,transcript_count," << r.transcript_count << "\n";
  out << "metric,turn_count," << r.turn_count << "\n";
  out << "metric,bleu_mean," << num(r.bleu_mean) << "\n";
  out << "metric,rouge1_f_mean," << num(r.rouge1_f_mean) << "\n";
  out << "metric,rougeL_f_mean," << num(r.rougeL_f_mean) << "\n";
  out << "metric,unanswered_rate," << num(r.unanswered_rate) << "\n";
  out << "metric,repetition_rate," << num(r.repetition_rate) << "\n";
  for (const auto& [tag, value] : r.weighted_ranks) {
    out << "wr," << csv_field(tag) << "," << num(value) << "\n";
  }
  // curve_* rows are keyed by the number of questions asked
  for (const PositionScore& p : r.per_position_scores) {
    out << "curve_bleu," << p.position << "," << num(p.bleu) << "\n";
    out << "curve_rouge1_f," << p.position << "," << num(p.rouge1_f) << "\n";
    out << "curve_rougeL_f," << p.position << "," << num(p.rougeL_f) << "\n";
  }
  return out.str();
}

std::string render_curves_svg(std::span<const LabeledReport> reports) {
  constexpr double kPanelW = 360, kPanelH = 260, kMargin = 50, kGap = 60, kLegendH = 22;
  const double width = 2 * kPanelW + kGap + 2 * kMargin;
  const double height = kPanelH + 2 * kMargin + kLegendH * static_cast<double>(reports.size());

  std::size_t max_pos = 1;
  for (const LabeledReport& lr : reports) {
    for (const PositionScore& p : lr.report.per_position_scores) max_pos = std::max(max_pos, p.position);
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\""
      << px(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto panel = [&](double x0, const char* title, auto pick_solid, auto pick_dashed) {
    const double y0 = kMargin;
    auto sx = [&](double pos) { return x0 + pos / static_cast<double>(max_pos) * kPanelW; };
    auto sy = [&](double v) { return y0 + (1.0 - v) * kPanelH; };
    svg << "<text x=\"" << px(x0 + kPanelW / 2) << "\" y=\"" << px(y0 - 18)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
    svg << "<rect x=\"" << px(x0) << "\" y=\"" << px(y0) << "\" width=\"" << px(kPanelW)
        << "\" height=\"" << px(kPanelH) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 5; ++i) {
      const double v = i / 5.0;
      svg << "<line x1=\"" << px(x0) << "\" x2=\"" << px(x0 + kPanelW) << "\" y1=\"" << px(sy(v))
          << "\" y2=\"" << px(sy(v)) << "\" stroke=\"#ddd\"/>\n";
      svg << "<text x=\"" << px(x0 - 6) << "\" y=\"" << px(sy(v) + 4) << "\" text-anchor=\"end\">"
          << px(v).substr(0, 3) << "</text>\n";
    }
    for (std::size_t k = 0; k <= max_pos; ++k) {
      svg << "<text x=\"" << px(sx(static_cast<double>(k))) << "\" y=\"" << px(y0 + kPanelH + 14)
          << "\" text-anchor=\"middle\">" << k << "</text>\n";
    }
    svg << "<text x=\"" << px(x0 + kPanelW / 2) << "\" y=\"" << px(y0 + kPanelH + 32)
        << "\" text-anchor=\"middle\">number of questions</text>\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const char* colour = kPalette[i % std::size(kPalette)];
      auto polyline = [&](auto pick, const char* dash) {
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"" << dash
            << " points=\"";
        for (const PositionScore& p : reports[i].report.per_position_scores) {
          svg << px(sx(static_cast<double>(p.position))) << "," << px(sy(pick(p))) << " ";
        }
        svg << "\"/>\n";
      };
      polyline(pick_solid, "");
      if constexpr (!std::is_same_v<decltype(pick_dashed), std::nullptr_t>) {
        polyline(pick_dashed, " stroke-dasharray=\"5,3\"");
      }
    }
  };

  panel(kMargin, "BLEU", [](const PositionScore& p) { return p.bleu; }, nullptr);
  panel(kMargin + kPanelW + kGap, "ROUGE-L (solid), ROUGE-1 (dashed)",
        [](const PositionScore& p) { return p.rougeL_f; },
        [](const PositionScore& p) { return p.rouge1_f; });

  for (std::size_t i = 0; i < reports.size(); ++i) {
    const double y = kMargin + kPanelH + 50 + kLegendH * static_cast<double>(i);
    svg << "<rect x=\"" << px(kMargin) << "\" y=\"" << px(y - 9) << "\" width=\"14\" height=\"4\" fill=\""
        << kPalette[i % std::size(kPalette)] << "\"/>\n";
    svg << "<text x=\"" << px(kMargin + 20) << "\" y=\"" << px(y - 3) << "\">"
        << xml_escape(reports[i].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace elicit
