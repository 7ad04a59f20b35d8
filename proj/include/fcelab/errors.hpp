// Copyright 2026 The fcelab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FCELAB_ERRORS_HPP_
#define FCELAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fcelab {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An infoset whose member nodes disagree on the owner's view of history.
class PerfectRecallError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration or verifier support would exceed the profile cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

// Learner state grew past the configured row cap.
class MemoryCapError : public Error {
 public:
  using Error::Error;
};

// Trace or signal file could not be read back.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace fcelab

#endif  // FCELAB_ERRORS_HPP_
