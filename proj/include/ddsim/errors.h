// Copyright 2026 The ddsim Authors
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

#ifndef DDSIM_ERRORS_H
#define DDSIM_ERRORS_H

#include <stdexcept>
#include <string>

namespace ddsim {

/// A caller-supplied parameter is outside its documented domain.
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A time, window or index lies outside the object it refers to.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// An operation was handed an input that violates its precondition (e.g. untagged CDD program).
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

/// The sequence contains constructs the analysis does not model (e.g. non-pi pulses in toggle tracks).
struct UnsupportedSequence : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoPeakError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateCurve : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed text input (config files, serialized programs).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ddsim

#endif
