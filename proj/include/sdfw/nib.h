// Copyright 2026 The SDFW Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Network Information Base: a versioned key/value store with prefix watches,
// in the style of a coordination service. Single replica, in process.
//
// Put() never calls watchers directly. Notifications are queued in global put
// order and handed out by Dispatch(), so watchers see each key's versions in
// increasing order with no gaps from their subscription point on.

#ifndef SDFW_NIB_H_
#define SDFW_NIB_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdfw {

struct NibRecord {
  std::string key;
  std::string value;
  std::uint64_t version = 0;
};

class Nib;

// Watch handle; unsubscribes on destruction.
class Subscription {
 public:
  Subscription() = default;
  Subscription(Subscription&& other) noexcept;
  Subscription& operator=(Subscription&& other) noexcept;
  Subscription(const Subscription&) = delete;
  Subscription& operator=(const Subscription&) = delete;
  ~Subscription();

  void Cancel();
  bool active() const { return nib_ != nullptr; }

 private:
  friend class Nib;
  Subscription(Nib* nib, std::uint64_t id) : nib_(nib), id_(id) {}

  Nib* nib_ = nullptr;
  std::uint64_t id_ = 0;
};

class Nib {
 public:
  using Watcher = std::function<void(const NibRecord&)>;

  Nib() = default;
  Nib(const Nib&) = delete;
  Nib& operator=(const Nib&) = delete;

  // Keys are absolute paths: "/a/b", no empty segments, no trailing '/'.
  static bool IsValidKey(std::string_view key);

  // Stores the value and returns its new version (1 for a fresh key).
  // Throws ValidationError on a malformed key.
  std::uint64_t Put(std::string_view key, std::string value);

  // Throws NotFoundError when absent.
  NibRecord Get(std::string_view key) const;
  std::optional<NibRecord> Find(std::string_view key) const;

  // Records under `prefix` ("/" for everything), in key order.
  std::vector<NibRecord> List(std::string_view prefix) const;

  // Receives every update put after this call to a key starting with
  // `prefix`. The Nib must outlive the subscription.
  [[nodiscard]] Subscription Watch(std::string prefix, Watcher watcher);

  // Delivers queued notifications in put order; watchers may put more, which
  // are delivered in the same call. Returns the number of callbacks made.
  std::size_t Dispatch();

  std::size_t pending() const { return queue_.size(); }

 private:
  friend class Subscription;

  struct WatchEntry {
    std::string prefix;
    Watcher watcher;
    std::uint64_t start_seq;  // sees updates with seq > start_seq
  };
  struct Pending {
    std::uint64_t seq;
    NibRecord record;
  };

  void Unwatch(std::uint64_t id);

  std::map<std::string, NibRecord, std::less<>> records_;
  std::map<std::uint64_t, WatchEntry> watches_;
  std::deque<Pending> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_watch_id_ = 1;
};

}  // namespace sdfw

#endif  // SDFW_NIB_H_
