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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "crossing/feature_model.hpp"
#include "crossing/store.hpp"

namespace crossing {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  /// Permissive CORS headers for a console served from another origin.
  bool cors = true;
  /// Analyses that must enumerate more scenarios than this run as background jobs.
  std::uint64_t async_threshold = 2'000'000;
  /// Optional directory of console assets served at "/".
  std::optional<std::filesystem::path> static_dir;
};

/// JSON API over the engine:
///   GET    /api/schema
///   GET    /api/profiles                     POST /api/profiles
///   GET    /api/profiles/{id}                PUT  /api/profiles/{id}   DELETE /api/profiles/{id}
///   GET    /api/profiles/{id}/analysis?fast=true|false&exclude_constrained=true|false
///   GET    /api/profiles/{id}/buckets/{k}?offset=&limit=
///   POST   /api/profiles/{id}/sessions       {"cd_targets": [...], "per_level": n, "seed": s}
///   GET    /api/jobs/{token}
/// Unauthenticated; intended for a single operator.
class Service {
 public:
  Service(ScenarioSpace space, std::filesystem::path store_dir, ServiceConfig config = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Writes every builtin profile missing from the store.
  void seed_builtin_profiles();

  /// Binds config.host:config.port (port 0 picks a free port) and returns the bound port.
  int bind();
  /// Serves until stop(); call bind() first.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace crossing
