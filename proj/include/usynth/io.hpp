// Copyright 2026 The usynth Authors
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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "usynth/numerics.hpp"

namespace usynth {

/// Thrown for malformed input files.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// .umat text format: first line "rows cols", then rows*cols tokens "re,im"
// in row-major order separated by whitespace. Numbers are written with 17
// significant digits and the '.' decimal separator regardless of locale.

void write_umat(std::ostream& out, const ComplexMatrix& m);
void write_umat_file(const std::filesystem::path& path, const ComplexMatrix& m);

ComplexMatrix read_umat(std::istream& in);
ComplexMatrix read_umat_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double, locale independent.
std::string format_double(double value);

/// Fixed 17-significant-digit form, locale independent.
std::string format_double_exact(double value);

/// Locale independent parse of a whole token; throws ParseError.
double parse_double(std::string_view token);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace usynth
