// Copyright 2026 The Crossing Scenarios Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "crossing/analysis.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace crossing {

using nlohmann::json;

namespace {

std::string fmt6(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6g", x);
  return buf.data();
}

json optional_rational(const std::optional<Rational>& r) { return r ? json(r->to_string()) : json(nullptr); }

std::optional<Rational> optional_rational_from(const json& doc) {
  if (doc.is_null()) return std::nullopt;
  return Rational::parse(doc.get<std::string>());
}

}  // namespace

std::string space_fingerprint(const ScenarioSpace& space) {
  const std::string doc = serialize_space(space);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(doc.data(), doc.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

CollapseThresholds collapse_thresholds(const std::vector<VarianceCurve>& curves, std::int64_t k_max) {
  CollapseThresholds out;
  if (curves.empty()) return out;
  // Minimum V over reported features per nonempty bucket.
  std::vector<std::optional<double>> min_v(static_cast<std::size_t>(k_max + 1));
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      auto& slot = min_v[static_cast<std::size_t>(p.k)];
      slot = slot ? std::min(*slot, p.v) : p.v;
    }
  }
  std::optional<std::int64_t> first_plateau, last_plateau;
  for (std::int64_t k = 0; k <= k_max; ++k) {
    const auto& v = min_v[static_cast<std::size_t>(k)];
    if (v && *v >= kPlateauLevel) {
      if (!first_plateau) first_plateau = k;
      last_plateau = k;
    }
  }
  if (!first_plateau) return out;
  for (std::int64_t k = *first_plateau - 1; k >= 0; --k) {
    const auto& v = min_v[static_cast<std::size_t>(k)];
    if (v && *v < kCollapseLevel) {
      out.low_cd_collapse = Rational(k, k_max);
      break;
    }
  }
  for (std::int64_t k = *last_plateau + 1; k <= k_max; ++k) {
    const auto& v = min_v[static_cast<std::size_t>(k)];
    if (v && *v < kCollapseLevel) {
      out.high_cd_collapse = Rational(k, k_max);
      break;
    }
  }
  return out;
}

ProfileAnalysis analyze(const ScenarioSpace& space, const Profile& profile, const AnalysisOptions& options) {
  const CountingMethod method = options.use_fast_counting ? CountingMethod::kAuto : CountingMethod::kParallel;
  Tally result = tally(space, profile, method, true);

  ProfileAnalysis a;
  a.profile_id = profile.id;
  a.space_fingerprint = space_fingerprint(space);
  a.total_all = result.counts.total_all();
  a.total_profile = result.counts.total_profile();
  a.percentage = a.total_all == 0 ? 0.0 : 100.0 * static_cast<double>(a.total_profile) / static_cast<double>(a.total_all);
  a.delta = ScoreModel(space, profile).delta();
  a.buckets = result.counts;
  if (options.exclude_constrained) a.excluded_features = fixed_features(profile.constraint, space);
  a.curves = variance_curves(result.histograms, space,
                             std::set<FeatureId>(a.excluded_features.begin(), a.excluded_features.end()));
  a.thresholds = collapse_thresholds(a.curves, a.buckets.k_max);
  return a;
}

// ---------------------------------------------------------------------------
// JSON

json analysis_to_json(const ProfileAnalysis& a) {
  json buckets = json::array();
  for (std::int64_t k = 0; k <= a.buckets.k_max; ++k) {
    const auto i = static_cast<std::size_t>(k);
    buckets.push_back({{"k", k},
                       {"cd", Rational(k, a.buckets.k_max).to_string()},
                       {"count_all", a.buckets.all[i]},
                       {"count_profile", a.buckets.profile[i]}});
  }
  json curves = json::array();
  for (const auto& c : a.curves) {
    json points = json::array();
    for (const auto& p : c.points) points.push_back({{"k", p.k}, {"cd", p.cd.to_string()}, {"v", p.v}});
    curves.push_back({{"feature_id", c.feature_id}, {"feature_name", c.feature_name}, {"points", points}});
  }
  return {{"profile_id", a.profile_id},
          {"space_fingerprint", a.space_fingerprint},
          {"total_all", a.total_all},
          {"total_profile", a.total_profile},
          {"percentage", a.percentage},
          {"delta", a.delta.to_string()},
          {"k_max", a.buckets.k_max},
          {"buckets", buckets},
          {"excluded_features", a.excluded_features},
          {"curves", curves},
          {"thresholds",
           {{"low_cd_collapse", optional_rational(a.thresholds.low_cd_collapse)},
            {"high_cd_collapse", optional_rational(a.thresholds.high_cd_collapse)}}}};
}

ProfileAnalysis analysis_from_json(const json& doc) {
  try {
    ProfileAnalysis a;
    a.profile_id = doc.at("profile_id").get<std::string>();
    a.space_fingerprint = doc.at("space_fingerprint").get<std::string>();
    a.total_all = doc.at("total_all").get<std::uint64_t>();
    a.total_profile = doc.at("total_profile").get<std::uint64_t>();
    a.percentage = doc.at("percentage").get<double>();
    a.delta = Rational::parse(doc.at("delta").get<std::string>());
    a.buckets = BucketCounts(doc.at("k_max").get<std::int64_t>());
    for (const auto& b : doc.at("buckets")) {
      const auto k = b.at("k").get<std::int64_t>();
      if (k < 0 || k > a.buckets.k_max) throw DocumentError("bucket index out of range", "analysis.buckets");
      a.buckets.all[static_cast<std::size_t>(k)] = b.at("count_all").get<std::uint64_t>();
      a.buckets.profile[static_cast<std::size_t>(k)] = b.at("count_profile").get<std::uint64_t>();
    }
    a.excluded_features = doc.at("excluded_features").get<std::vector<FeatureId>>();
    for (const auto& c : doc.at("curves")) {
      VarianceCurve curve{c.at("feature_id").get<FeatureId>(), c.at("feature_name").get<std::string>(), {}};
      for (const auto& p : c.at("points")) {
        curve.points.push_back({p.at("k").get<std::int64_t>(), Rational::parse(p.at("cd").get<std::string>()),
                                p.at("v").get<double>()});
      }
      a.curves.push_back(std::move(curve));
    }
    const json& t = doc.at("thresholds");
    a.thresholds.low_cd_collapse = optional_rational_from(t.at("low_cd_collapse"));
    a.thresholds.high_cd_collapse = optional_rational_from(t.at("high_cd_collapse"));
    return a;
  } catch (const json::exception& e) {
    throw DocumentError(e.what(), "analysis");
  }
}

// ---------------------------------------------------------------------------
// exports

std::optional<ExportFormat> parse_export_format(std::string_view name) {
  if (name == "csv") return ExportFormat::kCsv;
  if (name == "json") return ExportFormat::kJson;
  if (name == "svg") return ExportFormat::kSvg;
  return std::nullopt;
}

std::string_view extension(ExportFormat format) {
  switch (format) {
    case ExportFormat::kCsv:
      return "csv";
    case ExportFormat::kJson:
      return "json";
    case ExportFormat::kSvg:
      return "svg";
  }
  return "";
}

std::string render_csv(const ProfileAnalysis& a) {
  std::ostringstream out;
  out << "profile_id,cd,k,count_all,count_profile,feature_id,feature_name,V\n";
  for (std::int64_t k = 0; k <= a.buckets.k_max; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (a.buckets.profile[i] == 0) continue;
    const std::string cd = fmt6(Rational(k, a.buckets.k_max).to_double());
    for (const auto& c : a.curves) {
      auto it = std::find_if(c.points.begin(), c.points.end(), [k](const VariancePoint& p) { return p.k == k; });
      out << a.profile_id << ',' << cd << ',' << k << ',' << a.buckets.all[i] << ',' << a.buckets.profile[i] << ','
          << c.feature_id << ",\"" << c.feature_name << "\"," << (it == c.points.end() ? "" : fmt6(it->v)) << '\n';
    }
  }
  return out.str();
}

std::string render_json(const ProfileAnalysis& a) { return analysis_to_json(a).dump(2) + "\n"; }

std::string count_summary(std::uint64_t total_profile, std::uint64_t total_all) {
  const double pct = total_all == 0 ? 0.0 : 100.0 * static_cast<double>(total_profile) / static_cast<double>(total_all);
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.1f", pct);
  return std::to_string(total_profile) + " / " + std::to_string(total_all) + " (" + buf.data() + "%)";
}

namespace {

constexpr double kPanelWidth = 440.0;
constexpr double kPanelHeight = 260.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginTop = 50.0;
constexpr double kGap = 80.0;
constexpr const char* kAllColour = "#0000FF";
constexpr const char* kProfileColour = "#FE0000";
constexpr std::array<const char*, 12> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                                                  "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const ProfileAnalysis& a) {
  const double width = kMarginLeft + kPanelWidth + kGap + kPanelWidth + 160.0;
  const double height = kMarginTop + kPanelHeight + 70.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt6(width) << "\" height=\"" << fmt6(height)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt6(kMarginLeft) << "\" y=\"20\" font-size=\"14\">" << escape_xml(a.profile_id) << ": "
      << count_summary(a.total_profile, a.total_all) << "</text>\n";

  // Left panel: counts per bucket, logarithmic y axis, empty buckets omitted.
  std::uint64_t peak = 1;
  for (auto c : a.buckets.all) peak = std::max(peak, c);
  const int decades = std::max(1, static_cast<int>(std::ceil(std::log10(static_cast<double>(peak)))));
  const double x0 = kMarginLeft;
  const double y0 = kMarginTop + kPanelHeight;
  auto y_of_count = [&](std::uint64_t c) { return y0 - kPanelHeight * std::log10(static_cast<double>(c)) / decades; };

  svg << "<g class=\"counts-panel\">\n";
  svg << "<line x1=\"" << fmt6(x0) << "\" y1=\"" << fmt6(y0) << "\" x2=\"" << fmt6(x0 + kPanelWidth) << "\" y2=\""
      << fmt6(y0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fmt6(x0) << "\" y1=\"" << fmt6(kMarginTop) << "\" x2=\"" << fmt6(x0) << "\" y2=\"" << fmt6(y0)
      << "\" stroke=\"black\"/>\n";
  for (int d = 0; d <= decades; ++d) {
    const double y = y0 - kPanelHeight * d / decades;
    svg << "<text class=\"y-tick\" x=\"" << fmt6(x0 - 6) << "\" y=\"" << fmt6(y + 4) << "\" text-anchor=\"end\">1e" << d
        << "</text>\n";
  }
  const double slot = kPanelWidth / static_cast<double>(a.buckets.k_max + 1);
  for (std::int64_t k = 0; k <= a.buckets.k_max; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (a.buckets.all[i] == 0) continue;
    const double left = x0 + slot * static_cast<double>(k) + slot * 0.1;
    const double bar = slot * 0.4;
    svg << "<g class=\"bar-group\" data-k=\"" << k << "\">\n";
    svg << "<rect x=\"" << fmt6(left) << "\" y=\"" << fmt6(y_of_count(a.buckets.all[i])) << "\" width=\"" << fmt6(bar)
        << "\" height=\"" << fmt6(y0 - y_of_count(a.buckets.all[i])) << "\" fill=\"" << kAllColour << "\"/>\n";
    if (a.buckets.profile[i] > 0) {
      svg << "<rect x=\"" << fmt6(left + bar) << "\" y=\"" << fmt6(y_of_count(a.buckets.profile[i])) << "\" width=\""
          << fmt6(bar) << "\" height=\"" << fmt6(y0 - y_of_count(a.buckets.profile[i])) << "\" fill=\"" << kProfileColour
          << "\"/>\n";
    }
    svg << "<text x=\"" << fmt6(left + bar) << "\" y=\"" << fmt6(y0 + 14) << "\" text-anchor=\"middle\">"
        << fmt6(Rational(k, a.buckets.k_max).to_double()) << "</text>\n";
    svg << "</g>\n";
  }
  svg << "<rect x=\"" << fmt6(x0) << "\" y=\"" << fmt6(y0 + 30) << "\" width=\"10\" height=\"10\" fill=\"" << kAllColour
      << "\"/><text x=\"" << fmt6(x0 + 14) << "\" y=\"" << fmt6(y0 + 39) << "\">All scenarios</text>\n";
  svg << "<rect x=\"" << fmt6(x0 + 120) << "\" y=\"" << fmt6(y0 + 30) << "\" width=\"10\" height=\"10\" fill=\""
      << kProfileColour << "\"/><text x=\"" << fmt6(x0 + 134) << "\" y=\"" << fmt6(y0 + 39)
      << "\">Profile specific scenarios</text>\n";
  svg << "</g>\n";

  // Right panel: V per feature against cd.
  const double x1 = x0 + kPanelWidth + kGap;
  svg << "<g class=\"variance-panel\">\n";
  svg << "<line x1=\"" << fmt6(x1) << "\" y1=\"" << fmt6(y0) << "\" x2=\"" << fmt6(x1 + kPanelWidth) << "\" y2=\""
      << fmt6(y0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fmt6(x1) << "\" y1=\"" << fmt6(kMarginTop) << "\" x2=\"" << fmt6(x1) << "\" y2=\"" << fmt6(y0)
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double frac = t / 4.0;
    svg << "<text x=\"" << fmt6(x1 - 6) << "\" y=\"" << fmt6(y0 - kPanelHeight * frac + 4) << "\" text-anchor=\"end\">"
        << fmt6(frac) << "</text>\n";
    svg << "<text x=\"" << fmt6(x1 + kPanelWidth * frac) << "\" y=\"" << fmt6(y0 + 14) << "\" text-anchor=\"middle\">"
        << fmt6(frac) << "</text>\n";
  }
  for (std::size_t c = 0; c < a.curves.size(); ++c) {
    const auto& curve = a.curves[c];
    const char* colour = kPalette[c % kPalette.size()];
    svg << "<polyline class=\"variance-line\" data-feature=\"" << curve.feature_id << "\" fill=\"none\" stroke=\""
        << colour << "\" points=\"";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      if (i != 0) svg << ' ';
      svg << fmt6(x1 + kPanelWidth * curve.points[i].cd.to_double()) << ','
          << fmt6(y0 - kPanelHeight * curve.points[i].v);
    }
    svg << "\"/>\n";
    const double ly = kMarginTop + 14.0 * static_cast<double>(c);
    svg << "<line x1=\"" << fmt6(x1 + kPanelWidth + 10) << "\" y1=\"" << fmt6(ly) << "\" x2=\""
        << fmt6(x1 + kPanelWidth + 24) << "\" y2=\"" << fmt6(ly) << "\" stroke=\"" << colour << "\"/><text x=\""
        << fmt6(x1 + kPanelWidth + 28) << "\" y=\"" << fmt6(ly + 4) << "\">" << escape_xml(curve.feature_name)
        << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void export_analysis(const ProfileAnalysis& analysis, ExportFormat format, const std::filesystem::path& destination) {
  std::string body;
  switch (format) {
    case ExportFormat::kCsv:
      body = render_csv(analysis);
      break;
    case ExportFormat::kJson:
      body = render_json(analysis);
      break;
    case ExportFormat::kSvg:
      body = render_svg(analysis);
      break;
  }
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + destination.string());
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + destination.string());
}

}  // namespace crossing
