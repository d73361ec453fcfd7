// Copyright 2026 The qmarkov developers
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

#ifndef QMARKOV_IO_HPP
#define QMARKOV_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "qmarkov/classical.hpp"
#include "qmarkov/process_tensor.hpp"

namespace qmarkov::io {

// All files are JSON with a "format_version" of "1" and a "kind" tag:
//
//   operator:            {"kind":"operator","factors":[{"name","dim"},...],
//                         "matrix":[[re,im],...]}   (row-major, dim^2 pairs)
//   distribution:        {"kind":"distribution","alphabet_sizes":[...],
//                         "table":[...]}
//   instrument_sequence: {"kind":"instrument_sequence","elements":
//                         [{"outcome","factors","matrix"},...]}
//
// Writing is deterministic: fixed key order, newline per entry, doubles
// rendered with 17 significant digits so values round-trip exactly.

inline constexpr const char* kFormatVersion = "1";

// Shortest-width rendering at 17 significant digits; throws on non-finite
// values.
std::string format_double(double value);

std::string operator_to_json(const LabeledOperator& op);
LabeledOperator operator_from_json(const std::string& text);

std::string distribution_to_json(const JointDistribution& dist);
JointDistribution distribution_from_json(const std::string& text);

std::string sequence_to_json(const InstrumentSequence& sequence);
InstrumentSequence sequence_from_json(const std::string& text);

// Peeks at the "kind" field of a parsed file.
std::string json_kind(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// FNV-1a, 64-bit; digest_hex renders it as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::string_view bytes);

}  // namespace qmarkov::io

#endif  // QMARKOV_IO_HPP
