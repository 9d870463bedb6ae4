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

// Address and time vocabulary shared by the whole library.

#ifndef SDFW_NET_H_
#define SDFW_NET_H_

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace sdfw {

// Simulation clock. Integer nanoseconds throughout.
using SimTime = std::chrono::nanoseconds;
using Duration = std::chrono::nanoseconds;

inline constexpr SimTime Seconds(double s) {
  return SimTime(static_cast<std::int64_t>(s * 1e9 + (s >= 0 ? 0.5 : -0.5)));
}
inline constexpr double ToSeconds(SimTime t) {
  return static_cast<double>(t.count()) / 1e9;
}

// IPv4 address held as a host-order 32-bit integer.
class Ipv4 {
 public:
  constexpr Ipv4() = default;
  constexpr explicit Ipv4(std::uint32_t value) : value_(value) {}
  constexpr Ipv4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
      : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) |
               (std::uint32_t{c} << 8) | std::uint32_t{d}) {}

  // Dotted-quad only; returns nullopt on anything else.
  static std::optional<Ipv4> Parse(std::string_view text);

  constexpr std::uint32_t value() const { return value_; }
  std::string ToString() const;

  friend constexpr auto operator<=>(Ipv4, Ipv4) = default;

 private:
  std::uint32_t value_ = 0;
};

std::ostream& operator<<(std::ostream& os, Ipv4 ip);

// 48-bit hardware address.
class MacAddr {
 public:
  constexpr MacAddr() = default;
  constexpr explicit MacAddr(std::uint64_t value)
      : value_(value & 0xFFFF'FFFF'FFFFull) {}

  // "aa:bb:cc:dd:ee:ff", lowercase or uppercase hex.
  static std::optional<MacAddr> Parse(std::string_view text);

  constexpr std::uint64_t value() const { return value_; }
  std::string ToString() const;

  friend constexpr auto operator<=>(MacAddr, MacAddr) = default;

 private:
  std::uint64_t value_ = 0;
};

using PortId = std::uint32_t;
using SwitchId = std::uint32_t;

}  // namespace sdfw

template <>
struct std::hash<sdfw::Ipv4> {
  std::size_t operator()(sdfw::Ipv4 ip) const noexcept {
    return std::hash<std::uint32_t>{}(ip.value());
  }
};

#endif  // SDFW_NET_H_
