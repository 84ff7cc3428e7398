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

// Command-line front end: schema summaries, bucket counts, diversity tables,
// exports, session sampling, the reproduction check and the HTTP service.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "crossing/analysis.hpp"
#include "crossing/enumeration.hpp"
#include "crossing/sampler.hpp"
#include "crossing/service.hpp"

namespace fs = std::filesystem;
using namespace crossing;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitMismatch = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

ScenarioSpace load_space(const std::string& path) {
  if (path.empty()) return builtin_crosswalk_space();
  return deserialize_space(read_file(path));
}

// A builtin profile id, or the path of a profile document.
Profile load_profile(const std::string& ref, const ScenarioSpace& space) {
  Profile p;
  if (auto builtin = find_builtin_profile(ref)) {
    p = *builtin;
  } else if (fs::exists(ref)) {
    p = deserialize_profile(read_file(ref));
  } else {
    throw std::invalid_argument("unknown profile '" + ref + "' (not a builtin id or a readable file)");
  }
  if (auto report = validate_profile(p, space); !report.ok()) throw ValidationError(report);
  return p;
}

std::string fixed(double x, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << x;
  return out.str();
}

int cmd_schema(const std::string& space_path) {
  const ScenarioSpace space = load_space(space_path);
  std::cout << "Features (" << space.feature_count() << "):\n";
  for (const auto& f : space.features()) {
    std::cout << "  " << std::setw(3) << f.id << "  " << std::left << std::setw(32) << f.name << std::right << " group "
              << f.group << "  {";
    for (ValueIndex i = 0; i < f.value_count(); ++i) {
      if (i != 0) std::cout << ", ";
      std::cout << f.values[i].to_string();
      if (!f.labels.empty()) std::cout << " (" << f.labels[i] << ")";
    }
    std::cout << "}\n";
  }
  std::cout << "Groups (" << space.groups().size() << "):\n";
  for (const auto& g : space.groups()) std::cout << "  " << std::setw(3) << g.id << "  " << g.name << "\n";
  std::cout << "Total combinations: " << space.total_combinations() << "\n";
  std::cout << "Fingerprint: " << space_fingerprint(space) << "\n";
  return kExitOk;
}

int cmd_counts(const std::string& profile_ref, bool fast, const std::string& space_path) {
  const ScenarioSpace space = load_space(space_path);
  const Profile profile = load_profile(profile_ref, space);
  std::optional<BucketCounts> counts;
  if (fast) {
    counts = count_by_bucket_fast(space, profile);
    if (!counts) std::cerr << "note: constraint shape not supported by fast counting; enumerating\n";
  }
  if (!counts) counts = count_by_bucket_bruteforce(space, profile);

  std::cout << std::setw(4) << "k" << std::setw(10) << "cd" << std::setw(16) << "count_all" << std::setw(16)
            << "count_profile" << "\n";
  for (std::int64_t k = 0; k <= counts->k_max; ++k) {
    const auto i = static_cast<std::size_t>(k);
    std::cout << std::setw(4) << k << std::setw(10) << fixed(Rational(k, counts->k_max).to_double(), 3) << std::setw(16)
              << counts->all[i] << std::setw(16) << counts->profile[i] << "\n";
  }
  std::cout << profile.id << ": " << count_summary(counts->total_profile(), counts->total_all()) << "\n";
  if (profile.approximate) std::cout << "note: " << profile.id << " is an approximate preset\n";
  return kExitOk;
}

int cmd_variance(const std::string& profile_ref, bool exclude_constrained, const std::string& space_path) {
  const ScenarioSpace space = load_space(space_path);
  const Profile profile = load_profile(profile_ref, space);
  const ProfileAnalysis a = analyze(space, profile, {true, exclude_constrained});
  std::cout << std::setw(8) << "cd";
  for (const auto& c : a.curves) std::cout << std::setw(8) << ("f" + std::to_string(c.feature_id));
  std::cout << "\n";
  for (std::int64_t k = 0; k <= a.buckets.k_max; ++k) {
    if (a.buckets.profile[static_cast<std::size_t>(k)] == 0) continue;
    std::cout << std::setw(8) << fixed(Rational(k, a.buckets.k_max).to_double(), 3);
    for (const auto& c : a.curves) {
      auto it = std::find_if(c.points.begin(), c.points.end(), [k](const VariancePoint& p) { return p.k == k; });
      std::cout << std::setw(8) << (it == c.points.end() ? "-" : fixed(it->v, 3));
    }
    std::cout << "\n";
  }
  if (!a.excluded_features.empty()) {
    std::cout << "excluded (fixed by constraint):";
    for (auto f : a.excluded_features) std::cout << " f" << f;
    std::cout << "\n";
  }
  return kExitOk;
}

std::vector<ExportFormat> parse_formats(const std::string& list) {
  std::vector<ExportFormat> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto format = parse_export_format(item);
    if (!format) throw UsageError("unknown format '" + item + "' (expected csv, json, svg)");
    out.push_back(*format);
  }
  if (out.empty()) throw UsageError("no export format given");
  return out;
}

void write_exports(const ProfileAnalysis& a, const fs::path& dir, const std::vector<ExportFormat>& formats) {
  fs::create_directories(dir);
  for (auto format : formats) {
    const fs::path path = dir / (a.profile_id + "." + std::string(extension(format)));
    export_analysis(a, format, path);
    std::cout << "wrote " << path.string() << "\n";
  }
}

int cmd_analyze(const std::string& profile_ref, const std::string& out_dir, const std::string& formats,
                bool exclude_constrained, const std::string& space_path) {
  const auto parsed = parse_formats(formats);
  const ScenarioSpace space = load_space(space_path);
  const Profile profile = load_profile(profile_ref, space);
  const ProfileAnalysis a = analyze(space, profile, {true, exclude_constrained});
  write_exports(a, out_dir, parsed);
  std::cout << profile.id << ": " << count_summary(a.total_profile, a.total_all) << "\n";
  return kExitOk;
}

int cmd_sample(const std::string& profile_ref, const std::string& cd_list, std::size_t n, std::uint64_t seed,
               const std::string& space_path) {
  const ScenarioSpace space = load_space(space_path);
  const Profile profile = load_profile(profile_ref, space);
  std::vector<Rational> targets;
  std::stringstream in(cd_list);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      targets.push_back(Rational::parse(item));
    } catch (const std::exception&) {
      throw UsageError("invalid difficulty '" + item + "'");
    }
  }
  if (targets.empty()) throw UsageError("--cd needs at least one value");
  const SessionPlan plan = build_path(space, profile, targets, n, seed);
  for (const auto& s : plan.substitutions) {
    std::cerr << "warning: no " << profile.id << " scenarios at cd " << s.requested.to_string() << "; using cd "
              << s.used.to_string() << " (" << fixed(s.used.to_double(), 3) << ")\n";
  }
  std::cout << session_plan_to_json(plan, space).dump(2) << "\n";
  return kExitOk;
}

struct ReproRow {
  std::string profile;
  std::string expected;
  std::string observed;
  bool pass;
};

int cmd_paper_repro(const std::string& out_dir) {
  const ScenarioSpace space = builtin_crosswalk_space();
  const std::map<std::string, std::uint64_t> expected = {
      {"profile-1", 290304}, {"profile-3", 16384}, {"profile-4", 147456}};
  constexpr std::uint64_t kExpectedTotal = 331776;

  std::vector<ReproRow> rows;
  std::vector<std::uint64_t> staged;
  bool all_ok = true;
  for (const auto& profile : builtin_profile_catalog()) {
    const ProfileAnalysis fast = analyze(space, profile, {true, true});
    const BucketCounts brute = count_by_bucket_bruteforce(space, profile);
    const bool paths_agree = brute == fast.buckets;
    write_exports(fast, out_dir, {ExportFormat::kCsv, ExportFormat::kJson, ExportFormat::kSvg});

    ReproRow row{profile.id, "", count_summary(fast.total_profile, fast.total_all), paths_agree};
    row.pass = row.pass && fast.total_all == kExpectedTotal;
    if (auto it = expected.find(profile.id); it != expected.end()) {
      row.expected = count_summary(it->second, kExpectedTotal);
      row.pass = row.pass && fast.total_profile == it->second;
    } else if (profile.approximate) {
      row.expected = "approximate preset";
      staged.push_back(fast.total_profile);
      std::cout << "notice: " << profile.id << " is an approximate preset; its count is not compared\n";
    } else {
      row.expected = "-";
    }
    all_ok = all_ok && row.pass;
    rows.push_back(std::move(row));
  }
  // Staged presets must grow easy -> medium -> hard.
  bool staged_ok = staged.size() == 3 && staged[0] < staged[1] && staged[1] < staged[2];
  all_ok = all_ok && staged_ok;

  std::cout << "\n" << std::left << std::setw(20) << "profile" << std::setw(26) << "expected" << std::setw(26)
            << "observed" << "result\n";
  for (const auto& r : rows) {
    std::cout << std::setw(20) << r.profile << std::setw(26) << r.expected << std::setw(26) << r.observed
              << (r.pass ? "PASS" : "FAIL") << "\n";
  }
  std::cout << std::setw(72) << "staged presets increase easy -> hard" << (staged_ok ? "PASS" : "FAIL") << "\n"
            << std::right;
  return all_ok ? kExitOk : kExitMismatch;
}

int cmd_serve(const std::string& addr, const std::string& store_dir, const std::string& space_path,
              const std::string& static_dir, bool no_cors) {
  ServiceConfig config;
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw UsageError("--addr must be host:port");
  config.host = addr.substr(0, colon);
  try {
    config.port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("invalid port in --addr");
  }
  config.cors = !no_cors;
  if (!static_dir.empty()) config.static_dir = static_dir;

  const bool builtin = space_path.empty();
  Service service(load_space(space_path), store_dir, config);
  if (builtin) service.seed_builtin_profiles();
  const int port = service.bind();
  std::cerr << "serving on " << config.host << ":" << port << " (store " << store_dir
            << "); the API is unauthenticated\n";
  service.listen();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalized crossing-scenario generation: scoring, counting, diversity and sampling"};
  app.require_subcommand(1);

  std::string space_path, profile_ref, out_dir, formats = "csv,json,svg", cd_list, store_dir, addr, static_dir;
  bool fast = false, exclude_constrained = false, no_cors = false;
  std::size_t n = 1;
  std::uint64_t seed = 0;

  auto* schema = app.add_subcommand("schema", "Print the active scenario space");
  schema->add_option("--space", space_path, "Space document (default: builtin crosswalk space)");

  auto* counts = app.add_subcommand("counts", "Per-bucket scenario counts for a profile");
  counts->add_option("--profile", profile_ref, "Builtin profile id or profile document")->required();
  counts->add_flag("--fast", fast, "Count by convolution instead of enumeration");
  counts->add_option("--space", space_path, "Space document");

  auto* variance = app.add_subcommand("variance", "Per-feature diversity V by consistent difficulty");
  variance->add_option("--profile", profile_ref, "Builtin profile id or profile document")->required();
  variance->add_flag("--exclude-constrained", exclude_constrained, "Omit features fixed by the constraint");
  variance->add_option("--space", space_path, "Space document");

  auto* analyze_cmd = app.add_subcommand("analyze", "Export the full analysis of a profile");
  analyze_cmd->add_option("--profile", profile_ref, "Builtin profile id or profile document")->required();
  analyze_cmd->add_option("--out", out_dir, "Output directory")->required();
  analyze_cmd->add_option("--format", formats, "Comma-separated list of csv, json, svg");
  analyze_cmd->add_flag("--exclude-constrained", exclude_constrained, "Omit features fixed by the constraint");
  analyze_cmd->add_option("--space", space_path, "Space document");

  auto* sample = app.add_subcommand("sample", "Sample a diverse session plan");
  sample->add_option("--profile", profile_ref, "Builtin profile id or profile document")->required();
  sample->add_option("--cd", cd_list, "Target difficulty, or a comma-separated list")->required();
  sample->add_option("--n", n, "Scenarios per difficulty level")->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Random seed");
  sample->add_option("--space", space_path, "Space document");

  auto* repro = app.add_subcommand("paper-repro", "Run every builtin profile and check the reference counts");
  std::string repro_out = "repro-out";
  repro->add_option("--out", repro_out, "Directory for the exported artifacts");

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  addr = "127.0.0.1:8080";
  store_dir = "profiles";
  serve->add_option("--addr", addr, "Bind address host:port")->envname("CROSSING_ADDR");
  serve->add_option("--store", store_dir, "Profile store directory")->envname("CROSSING_STORE");
  serve->add_option("--space", space_path, "Space document")->envname("CROSSING_SPACE");
  serve->add_option("--static", static_dir, "Directory of console assets to serve at /");
  serve->add_flag("--no-cors", no_cors, "Do not send CORS headers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*schema) return cmd_schema(space_path);
    if (*counts) return cmd_counts(profile_ref, fast, space_path);
    if (*variance) return cmd_variance(profile_ref, exclude_constrained, space_path);
    if (*analyze_cmd) return cmd_analyze(profile_ref, out_dir, formats, exclude_constrained, space_path);
    if (*sample) return cmd_sample(profile_ref, cd_list, n, seed, space_path);
    if (*repro) return cmd_paper_repro(repro_out);
    if (*serve) return cmd_serve(addr, store_dir, space_path, static_dir, no_cors);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DocumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
