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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossing/feature_model.hpp"

namespace crossing {

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One JSON document per profile under a root directory. Writes go to a
/// temporary file that is fsynced and renamed over the target, so a reader
/// (or a crash) only ever sees a complete old or new document. Writers to
/// the same profile serialize; updates use optimistic concurrency on the
/// version number.
class ProfileStore {
 public:
  explicit ProfileStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  std::vector<Profile> list() const;
  std::optional<Profile> get(const std::string& id) const;
  /// id -> version
  std::map<std::string, std::uint64_t> index() const;

  /// Stores with version 1. Throws ConflictError if the id exists.
  Profile create(Profile profile);
  /// Stores with version expected_version + 1. Throws NotFoundError, or
  /// ConflictError when the stored version differs from expected_version.
  Profile update(Profile profile, std::uint64_t expected_version);
  /// Throws NotFoundError; ConflictError on a version mismatch when one is given.
  void remove(const std::string& id, std::optional<std::uint64_t> expected_version = std::nullopt);
  /// Creates the profile unless the id already exists; keeps its version.
  bool seed(const Profile& profile);

  static bool valid_id(const std::string& id);

 private:
  std::filesystem::path path_for(const std::string& id) const;
  std::mutex& lock_for(const std::string& id);
  void write_atomically(const Profile& profile) const;
  std::optional<Profile> read(const std::filesystem::path& path) const;

  std::filesystem::path root_;
  std::mutex locks_guard_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace crossing
