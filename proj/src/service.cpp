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

#include "crossing/service.hpp"

#include <httplib.h>

#include <atomic>
#include <future>
#include <map>
#include <mutex>

#include "crossing/analysis.hpp"
#include "crossing/enumeration.hpp"
#include "crossing/sampler.hpp"

namespace crossing {

using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultPageSize = 50;
constexpr std::uint64_t kMaxPageSize = 1000;

struct HttpError {
  int status;
  json body;
};

[[noreturn]] void fail(int status, const std::string& message) { throw HttpError{status, {{"error", message}}}; }

json report_json(const ValidationReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    json item = {{"message", v.message}};
    if (v.feature_id) item["feature"] = *v.feature_id;
    if (v.group_id) item["group"] = *v.group_id;
    violations.push_back(std::move(item));
  }
  return violations;
}

bool query_flag(const httplib::Request& req, const char* name, bool fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string value = req.get_param_value(name);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(400, std::string("query parameter ") + name + " must be true or false");
}

std::uint64_t query_uint(const httplib::Request& req, const char* name, std::uint64_t fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string value = req.get_param_value(name);
  std::size_t used = 0;
  try {
    if (!value.empty() && value.front() != '-') {
      auto parsed = std::stoull(value, &used);
      if (used == value.size()) return parsed;
    }
  } catch (const std::exception&) {
  }
  fail(400, std::string("query parameter ") + name + " must be a non-negative integer");
}

Rational rational_from_json(const json& value) {
  if (value.is_string()) return Rational::parse(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  if (value.is_number_float()) return Rational::parse(value.dump());
  throw std::invalid_argument("difficulty target must be a number or a \"p/q\" string");
}

}  // namespace

struct Service::Impl {
  ScenarioSpace space;
  std::string fingerprint;
  ProfileStore store;
  ServiceConfig config;
  httplib::Server server;
  int bound_port = -1;

  std::mutex cache_mutex;
  std::map<std::string, std::string> analysis_cache;

  std::mutex jobs_mutex;
  std::map<std::string, std::shared_future<std::string>> jobs;
  std::map<std::string, std::string> job_keys;  // cache key -> token
  std::atomic<std::uint64_t> next_job{1};

  Impl(ScenarioSpace space_in, std::filesystem::path store_dir, ServiceConfig config_in)
      : space(std::move(space_in)),
        fingerprint(space_fingerprint(space)),
        store(std::move(store_dir)),
        config(std::move(config_in)) {
    routes();
  }

  Profile require_profile(const std::string& id) {
    if (!ProfileStore::valid_id(id)) fail(404, "unknown profile " + id);
    auto p = store.get(id);
    if (!p) fail(404, "unknown profile " + id);
    return *p;
  }

  Profile parse_profile_body(const std::string& body) {
    Profile p;
    try {
      p = deserialize_profile(body);
    } catch (const ValidationError& e) {
      throw HttpError{422, {{"error", "invalid profile"}, {"violations", report_json(e.report())}}};
    } catch (const DocumentError& e) {
      json err = {{"error", e.what()}, {"field", e.field()}};
      if (e.line() != 0) {
        err["line"] = e.line();
        err["column"] = e.column();
      }
      throw HttpError{422, err};
    }
    if (!ProfileStore::valid_id(p.id)) fail(422, "invalid profile id '" + p.id + "'");
    if (auto report = validate_profile(p, space); !report.ok()) {
      throw HttpError{422, {{"error", "invalid profile"}, {"violations", report_json(report)}}};
    }
    return p;
  }

  std::string analysis_body(const Profile& profile, bool fast, bool exclude) {
    AnalysisOptions options{fast, exclude};
    return render_json(analyze(space, profile, options));
  }

  // Either the finished analysis or the job token of a background run.
  std::pair<std::optional<std::string>, std::string> analysis(const Profile& profile, bool fast, bool exclude) {
    const std::string key = fingerprint + "|" + profile.id + "|" + std::to_string(profile.version) + "|" +
                            (fast ? "fast" : "enum") + "|" + (exclude ? "x" : "-");
    {
      std::lock_guard guard(cache_mutex);
      if (auto it = analysis_cache.find(key); it != analysis_cache.end()) return {it->second, ""};
    }
    const bool enumerates = !fast || !fast_counting_supported(space, profile);
    if (!enumerates || space.total_combinations() <= config.async_threshold) {
      std::string body = analysis_body(profile, fast, exclude);
      std::lock_guard guard(cache_mutex);
      return {analysis_cache.emplace(key, std::move(body)).first->second, ""};
    }
    std::lock_guard guard(jobs_mutex);
    if (auto it = job_keys.find(key); it != job_keys.end()) return {std::nullopt, it->second};
    const std::string token = "job-" + std::to_string(next_job.fetch_add(1));
    jobs.emplace(token, std::async(std::launch::async, [this, profile, fast, exclude, key] {
                          std::string body = analysis_body(profile, fast, exclude);
                          std::lock_guard cache_guard(cache_mutex);
                          analysis_cache.emplace(key, body);
                          return body;
                        }).share());
    job_keys.emplace(key, token);
    return {std::nullopt, token};
  }

  template <typename Handler>
  httplib::Server::Handler wrap(Handler handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const HttpError& e) {
        res.status = e.status;
        res.set_content(e.body.dump(), "application/json");
      } catch (const NotFoundError& e) {
        res.status = 404;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      } catch (const ConflictError& e) {
        res.status = 409;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      } catch (const EmptyBucketError& e) {
        res.status = 422;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      } catch (const std::invalid_argument& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      } catch (const std::out_of_range& e) {
        res.status = 400;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
      if (config.cors) res.set_header("Access-Control-Allow-Origin", "*");
    };
  }

  static void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void routes() {
    server.Options(R"(/api/.*)", [this](const httplib::Request&, httplib::Response& res) {
      if (config.cors) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
      }
      res.status = 204;
    });

    server.Get("/api/schema", wrap([this](const httplib::Request&, httplib::Response& res) {
                 json doc = space_to_json(space);
                 doc["fingerprint"] = fingerprint;
                 doc["total_combinations"] = space.total_combinations();
                 send(res, 200, doc);
               }));

    server.Get("/api/profiles", wrap([this](const httplib::Request&, httplib::Response& res) {
                 json out = json::array();
                 for (const auto& p : store.list()) out.push_back(profile_to_json(p));
                 send(res, 200, out);
               }));

    server.Post("/api/profiles", wrap([this](const httplib::Request& req, httplib::Response& res) {
                  Profile created = store.create(parse_profile_body(req.body));
                  send(res, 201, profile_to_json(created));
                }));

    server.Get(R"(/api/profiles/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 send(res, 200, profile_to_json(require_profile(req.matches[1])));
               }));

    server.Put(R"(/api/profiles/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 require_profile(id);
                 json doc;
                 try {
                   doc = parse_document(req.body);
                 } catch (const DocumentError& e) {
                   fail(422, e.what());
                 }
                 if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_unsigned()) {
                   fail(422, "update requires the current version");
                 }
                 const auto expected = doc["version"].get<std::uint64_t>();
                 Profile p = parse_profile_body(req.body);
                 if (p.id != id) fail(422, "profile id does not match the URL");
                 send(res, 200, profile_to_json(store.update(std::move(p), expected)));
               }));

    server.Delete(R"(/api/profiles/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
                    const std::string id = req.matches[1];
                    require_profile(id);
                    std::optional<std::uint64_t> expected;
                    if (req.has_param("version")) expected = query_uint(req, "version", 0);
                    store.remove(id, expected);
                    res.status = 204;
                  }));

    server.Get(R"(/api/profiles/([^/]+)/analysis)", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 Profile profile = require_profile(req.matches[1]);
                 const bool fast = query_flag(req, "fast", true);
                 const bool exclude = query_flag(req, "exclude_constrained", false);
                 auto [body, token] = analysis(profile, fast, exclude);
                 if (body) {
                   res.status = 200;
                   res.set_content(*body, "application/json");
                 } else {
                   send(res, 202, {{"status", "in_progress"}, {"job", token}});
                 }
               }));

    server.Get(R"(/api/jobs/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
                 std::shared_future<std::string> job;
                 {
                   std::lock_guard guard(jobs_mutex);
                   auto it = jobs.find(req.matches[1]);
                   if (it == jobs.end()) fail(404, "unknown job");
                   job = it->second;
                 }
                 if (job.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
                   send(res, 202, {{"status", "in_progress"}, {"job", std::string(req.matches[1])}});
                   return;
                 }
                 send(res, 200, {{"status", "done"}, {"result", json::parse(job.get())}});
               }));

    server.Get(R"(/api/profiles/([^/]+)/buckets/([^/]+))",
               wrap([this](const httplib::Request& req, httplib::Response& res) {
                 Profile profile = require_profile(req.matches[1]);
                 const std::string k_text = req.matches[2];
                 std::int64_t k = 0;
                 try {
                   std::size_t used = 0;
                   k = std::stoll(k_text, &used);
                   if (used != k_text.size()) throw std::invalid_argument(k_text);
                 } catch (const std::exception&) {
                   fail(400, "bucket index must be an integer");
                 }
                 const std::uint64_t offset = query_uint(req, "offset", 0);
                 const std::uint64_t limit = std::min(query_uint(req, "limit", kDefaultPageSize), kMaxPageSize);
                 const ScoreModel model(space, profile);
                 if (k < 0 || k > model.k_max()) fail(400, "bucket index outside [0, " + std::to_string(model.k_max()) + "]");
                 json scenarios = json::array();
                 for (const auto& s : bucket_members(space, profile, k, offset, limit)) {
                   scenarios.push_back({{"assignment", s.assignment}, {"labels", scenario_labels(s, space)}});
                 }
                 send(res, 200,
                      {{"profile", profile.id},
                       {"version", profile.version},
                       {"k", k},
                       {"cd", Rational(k, model.k_max()).to_string()},
                       {"offset", offset},
                       {"limit", limit},
                       {"scenarios", scenarios}});
               }));

    server.Post(R"(/api/profiles/([^/]+)/sessions)", wrap([this](const httplib::Request& req, httplib::Response& res) {
                  Profile profile = require_profile(req.matches[1]);
                  json doc;
                  try {
                    doc = parse_document(req.body);
                  } catch (const DocumentError& e) {
                    fail(422, e.what());
                  }
                  if (!doc.is_object() || !doc.contains("cd_targets") || !doc["cd_targets"].is_array()) {
                    fail(422, "cd_targets must be an array");
                  }
                  std::vector<Rational> targets;
                  for (const auto& t : doc["cd_targets"]) {
                    try {
                      targets.push_back(rational_from_json(t));
                    } catch (const std::exception& e) {
                      fail(422, e.what());
                    }
                  }
                  const json per_level = doc.value("per_level", json(1));
                  const json seed = doc.value("seed", json(0));
                  if (!per_level.is_number_unsigned() || per_level.get<std::uint64_t>() == 0) {
                    fail(422, "per_level must be a positive integer");
                  }
                  if (!seed.is_number_unsigned()) fail(422, "seed must be a non-negative integer");
                  SessionPlan plan = build_path(space, profile, std::move(targets), per_level.get<std::size_t>(),
                                                seed.get<std::uint64_t>());
                  send(res, 200, session_plan_to_json(plan, space));
                }));

    if (config.static_dir) server.set_mount_point("/", config.static_dir->string());
  }
};

Service::Service(ScenarioSpace space, std::filesystem::path store_dir, ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(space), std::move(store_dir), std::move(config))) {}

Service::~Service() { stop(); }

void Service::seed_builtin_profiles() {
  for (const auto& p : builtin_profile_catalog()) {
    if (validate_profile(p, impl_->space).ok()) impl_->store.seed(p);
  }
}

int Service::bind() {
  if (impl_->config.port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(impl_->config.host);
  } else if (impl_->server.bind_to_port(impl_->config.host, impl_->config.port)) {
    impl_->bound_port = impl_->config.port;
  }
  if (impl_->bound_port < 0) {
    throw std::runtime_error("cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
  }
  return impl_->bound_port;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace crossing
