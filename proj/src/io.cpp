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

#include "usynth/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace usynth {

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string format_double_exact(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view token) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("invalid number '" + std::string(token) + "'");
    }
    return value;
}

void write_umat(std::ostream& out, const ComplexMatrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                out << ' ';
            }
            out << format_double_exact(m(i, j).real()) << ',' << format_double_exact(m(i, j).imag());
        }
        out << '\n';
    }
}

void write_umat_file(const std::filesystem::path& path, const ComplexMatrix& m) {
    std::ostringstream os;
    write_umat(os, m);
    write_text_file(path, os.str());
}

ComplexMatrix read_umat(std::istream& in) {
    std::string rows_tok;
    std::string cols_tok;
    if (!(in >> rows_tok >> cols_tok)) {
        throw ParseError("umat: missing 'rows cols' header");
    }
    const double rows_d = parse_double(rows_tok);
    const double cols_d = parse_double(cols_tok);
    const auto rows = static_cast<Eigen::Index>(rows_d);
    const auto cols = static_cast<Eigen::Index>(cols_d);
    if (rows < 1 || cols < 1 || static_cast<double>(rows) != rows_d ||
        static_cast<double>(cols) != cols_d || rows > 4096 || cols > 4096) {
        throw ParseError("umat: invalid dimensions '" + rows_tok + " " + cols_tok + "'");
    }
    ComplexMatrix m(rows, cols);
    std::string token;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(in >> token)) {
                throw ParseError("umat: expected " + std::to_string(rows * cols) + " entries, got " +
                                 std::to_string(i * cols + j));
            }
            const auto comma = token.find(',');
            if (comma == std::string::npos) {
                throw ParseError("umat: entry '" + token + "' is not of the form re,im");
            }
            m(i, j) = Complex(parse_double(std::string_view(token).substr(0, comma)),
                              parse_double(std::string_view(token).substr(comma + 1)));
        }
    }
    if (in >> token) {
        throw ParseError("umat: trailing data '" + token + "'");
    }
    return m;
}

ComplexMatrix read_umat_file(const std::filesystem::path& path) {
    std::istringstream is(read_text_file(path));
    return read_umat(is);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

}  // namespace usynth
