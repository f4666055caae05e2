// Copyright 2026 The Duet Authors
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

#ifndef DUET_ERRORS_HPP_
#define DUET_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace duet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something malformed: wrong dimensions, bad file, bad flag.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A configuration references something that does not exist (unmapped body
// part, unknown reward term, ...).
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Metric requested on a sequence too short to define it.
class UndefinedMetric : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// A pipeline stage ran but could not produce a result.
class StageFailure : public Error {
 public:
  using Error::Error;
};

class Diverged : public StageFailure {
 public:
  Diverged(const std::string& what, std::size_t iteration)
      : StageFailure(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

// Root offset is undefined without at least one contact pair.
class NoContact : public StageFailure {
 public:
  using StageFailure::StageFailure;
};

}  // namespace duet

#endif  // DUET_ERRORS_HPP_
