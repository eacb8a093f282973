/*
 * Copyright 2026 The mfnav Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MFNAV_ERRORS_HPP_
#define MFNAV_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mfnav {

// Bad files, malformed specs, broken session directories. Maps to exit 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A loop candidate whose ICP refinement did not settle; the caller drops it.
class RejectedLoopError : public std::runtime_error {
 public:
  explicit RejectedLoopError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Planner could not connect start and goal. Maps to exit 4.
class UnreachableError : public std::runtime_error {
 public:
  explicit UnreachableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mfnav

#endif  // MFNAV_ERRORS_HPP_
