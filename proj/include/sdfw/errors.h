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

#ifndef SDFW_ERRORS_H_
#define SDFW_ERRORS_H_

#include <stdexcept>
#include <string>

namespace sdfw {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad JSON, out-of-range fields, bad key paths.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Policy compilation failed (e.g. an Allow pair has no path).
class CompileError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Raised when a reserved action variant is executed.
class UnimplementedError : public Error {
 public:
  using Error::Error;
};

// Conntrack was handed something it cannot classify.
class ClassificationError : public Error {
 public:
  using Error::Error;
};

// Topology event referencing an unknown element, or a bad builder argument.
class TopologyError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdfw

#endif  // SDFW_ERRORS_H_
