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

#include "sdfw/nib.h"

#include <vector>

#include "sdfw/errors.h"

namespace sdfw {
namespace {

// Path-segment prefix: "/rules/1" covers "/rules/1" and "/rules/1/x" but not
// "/rules/10"; a prefix ending in '/' covers everything below it.
bool PrefixCovers(std::string_view prefix, std::string_view key) {
  if (!key.starts_with(prefix)) return false;
  if (key.size() == prefix.size() || prefix.ends_with('/')) return true;
  return key[prefix.size()] == '/';
}

}  // namespace

Subscription::Subscription(Subscription&& other) noexcept
    : nib_(other.nib_), id_(other.id_) {
  other.nib_ = nullptr;
}

Subscription& Subscription::operator=(Subscription&& other) noexcept {
  if (this != &other) {
    Cancel();
    nib_ = other.nib_;
    id_ = other.id_;
    other.nib_ = nullptr;
  }
  return *this;
}

Subscription::~Subscription() { Cancel(); }

void Subscription::Cancel() {
  if (nib_ != nullptr) {
    nib_->Unwatch(id_);
    nib_ = nullptr;
  }
}

bool Nib::IsValidKey(std::string_view key) {
  if (key.size() < 2 || key.front() != '/' || key.back() == '/') return false;
  return key.find("//") == std::string_view::npos;
}

std::uint64_t Nib::Put(std::string_view key, std::string value) {
  if (!IsValidKey(key)) {
    throw ValidationError("malformed NIB key '" + std::string(key) + "'");
  }
  auto it = records_.find(key);
  if (it == records_.end()) {
    it = records_.emplace(std::string(key), NibRecord{std::string(key), {}, 0}).first;
  }
  NibRecord& rec = it->second;
  rec.value = std::move(value);
  ++rec.version;
  queue_.push_back(Pending{++next_seq_, rec});
  return rec.version;
}

NibRecord Nib::Get(std::string_view key) const {
  auto rec = Find(key);
  if (!rec) throw NotFoundError("no NIB record at '" + std::string(key) + "'");
  return *rec;
}

std::optional<NibRecord> Nib::Find(std::string_view key) const {
  auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<NibRecord> Nib::List(std::string_view prefix) const {
  std::vector<NibRecord> out;
  for (const auto& [key, rec] : records_) {
    if (PrefixCovers(prefix, key)) out.push_back(rec);
  }
  return out;
}

Subscription Nib::Watch(std::string prefix, Watcher watcher) {
  const std::uint64_t id = next_watch_id_++;
  watches_.emplace(id, WatchEntry{std::move(prefix), std::move(watcher), next_seq_});
  return Subscription(this, id);
}

void Nib::Unwatch(std::uint64_t id) { watches_.erase(id); }

std::size_t Nib::Dispatch() {
  std::size_t calls = 0;
  while (!queue_.empty()) {
    const Pending p = std::move(queue_.front());
    queue_.pop_front();
    std::vector<std::uint64_t> ids;
    for (const auto& [id, w] : watches_) ids.push_back(id);
    for (std::uint64_t id : ids) {
      auto it = watches_.find(id);
      if (it == watches_.end()) continue;
      if (p.seq <= it->second.start_seq) continue;
      if (!PrefixCovers(it->second.prefix, p.record.key)) continue;
      // Copy: the callback may cancel its own subscription.
      Watcher w = it->second.watcher;
      w(p.record);
      ++calls;
    }
  }
  return calls;
}

}  // namespace sdfw
