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

#include "crossing/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>
#include <utility>

namespace crossing {
namespace fs = std::filesystem;

namespace {

constexpr const char* kTempMarker = ".tmp-";
constexpr auto kStaleTempAge = std::chrono::minutes(5);

std::string system_error_text(const std::string& what) { return what + ": " + std::strerror(errno); }

class FileDescriptor {
 public:
  explicit FileDescriptor(int fd) : fd_(fd) {}
  ~FileDescriptor() {
    if (fd_ >= 0) ::close(fd_);
  }
  FileDescriptor(const FileDescriptor&) = delete;
  FileDescriptor& operator=(const FileDescriptor&) = delete;
  int get() const { return fd_; }
  int release() { return std::exchange(fd_, -1); }

 private:
  int fd_;
};

// Cross-process write lock on <root>/.lock, held for the scope.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& root) : fd_(::open((root / ".lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644)) {
    if (fd_.get() < 0) throw std::runtime_error(system_error_text("cannot open store lock"));
    while (::flock(fd_.get(), LOCK_EX) != 0) {
      if (errno != EINTR) throw std::runtime_error(system_error_text("cannot lock store"));
    }
  }
  ~DirectoryLock() { ::flock(fd_.get(), LOCK_UN); }

 private:
  FileDescriptor fd_;
};

}  // namespace

ProfileStore::ProfileStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  // Temp files left by a crashed writer.
  const auto now = fs::file_time_type::clock::now();
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (name.find(kTempMarker) == std::string::npos) continue;
    std::error_code ec;
    auto written = fs::last_write_time(entry.path(), ec);
    if (!ec && now - written > kStaleTempAge) fs::remove(entry.path(), ec);
  }
}

bool ProfileStore::valid_id(const std::string& id) {
  static const std::regex pattern("^[A-Za-z0-9][A-Za-z0-9_-]{0,63}$");
  return std::regex_match(id, pattern);
}

fs::path ProfileStore::path_for(const std::string& id) const {
  if (!valid_id(id)) throw std::invalid_argument("invalid profile id '" + id + "'");
  return root_ / (id + ".json");
}

std::mutex& ProfileStore::lock_for(const std::string& id) {
  std::lock_guard guard(locks_guard_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::optional<Profile> ProfileStore::read(const fs::path& path) const {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream text;
  text << in.rdbuf();
  return deserialize_profile(text.str());
}

void ProfileStore::write_atomically(const Profile& profile) const {
  static std::atomic<std::uint64_t> counter{0};
  const fs::path target = path_for(profile.id);
  const fs::path temp = root_ / ("." + profile.id + ".json" + kTempMarker + std::to_string(::getpid()) + "-" +
                                 std::to_string(counter.fetch_add(1)));
  const std::string body = serialize_profile(profile);

  {
    FileDescriptor fd(::open(temp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
    if (fd.get() < 0) throw std::runtime_error(system_error_text("cannot create " + temp.string()));
    std::size_t written = 0;
    while (written < body.size()) {
      ssize_t n = ::write(fd.get(), body.data() + written, body.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw std::runtime_error(system_error_text("cannot write " + temp.string()));
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd.get()) != 0) throw std::runtime_error(system_error_text("fsync failed"));
  }
  if (::rename(temp.c_str(), target.c_str()) != 0) {
    std::error_code ec;
    fs::remove(temp, ec);
    throw std::runtime_error(system_error_text("cannot replace " + target.string()));
  }
  FileDescriptor dir(::open(root_.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
  if (dir.get() >= 0) ::fsync(dir.get());
}

std::vector<Profile> ProfileStore::list() const {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (name.empty() || name.front() == '.' || entry.path().extension() != ".json") continue;
    paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Profile> out;
  for (const auto& p : paths) {
    if (auto profile = read(p)) out.push_back(std::move(*profile));
  }
  return out;
}

std::optional<Profile> ProfileStore::get(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  return read(path_for(id));
}

std::map<std::string, std::uint64_t> ProfileStore::index() const {
  std::map<std::string, std::uint64_t> out;
  for (const auto& p : list()) out.emplace(p.id, p.version);
  return out;
}

Profile ProfileStore::create(Profile profile) {
  std::lock_guard guard(lock_for(profile.id));
  DirectoryLock dir_lock(root_);
  if (fs::exists(path_for(profile.id))) throw ConflictError("profile " + profile.id + " already exists");
  profile.version = 1;
  write_atomically(profile);
  return profile;
}

Profile ProfileStore::update(Profile profile, std::uint64_t expected_version) {
  std::lock_guard guard(lock_for(profile.id));
  DirectoryLock dir_lock(root_);
  auto current = read(path_for(profile.id));
  if (!current) throw NotFoundError("profile " + profile.id + " not found");
  if (current->version != expected_version) {
    throw ConflictError("profile " + profile.id + " is at version " + std::to_string(current->version) + ", not " +
                        std::to_string(expected_version));
  }
  profile.version = expected_version + 1;
  write_atomically(profile);
  return profile;
}

void ProfileStore::remove(const std::string& id, std::optional<std::uint64_t> expected_version) {
  std::lock_guard guard(lock_for(id));
  DirectoryLock dir_lock(root_);
  const fs::path path = path_for(id);
  auto current = read(path);
  if (!current) throw NotFoundError("profile " + id + " not found");
  if (expected_version && current->version != *expected_version) {
    throw ConflictError("profile " + id + " is at version " + std::to_string(current->version));
  }
  fs::remove(path);
}

bool ProfileStore::seed(const Profile& profile) {
  std::lock_guard guard(lock_for(profile.id));
  DirectoryLock dir_lock(root_);
  if (fs::exists(path_for(profile.id))) return false;
  write_atomically(profile);
  return true;
}

}  // namespace crossing
