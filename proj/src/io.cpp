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

#include "qmarkov/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qmarkov::io {

namespace {

using nlohmann::json;

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

void append_matrix(std::ostringstream& os, const Matrix& m) {
  os << "  \"matrix\": [\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex v = m(r, c);
      os << "    [" << format_double(v.real()) << ", " << format_double(v.imag())
         << "]";
      if (r + 1 < m.rows() || c + 1 < m.cols()) os << ",";
      os << "\n";
    }
  }
  os << "  ]";
}

void append_factors(std::ostringstream& os, const std::vector<FactorLabel>& factors,
                    std::string_view indent) {
  os << indent << "\"factors\": [";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) os << ", ";
    os << "{\"name\": \"" << escape(factors[i].name) << "\", \"dim\": "
       << factors[i].dim << "}";
  }
  os << "]";
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid JSON: ") + e.what());
  }
}

void check_header(const json& j, std::string_view kind) {
  if (!j.is_object()) throw Error("top-level JSON value must be an object");
  if (!j.contains("format_version") || j["format_version"] != kFormatVersion)
    throw Error("missing or unsupported format_version (expected \"1\")");
  if (!j.contains("kind") || j["kind"] != kind)
    throw Error("expected a file of kind \"" + std::string(kind) + "\"");
}

std::vector<FactorLabel> factors_from(const json& j) {
  if (!j.is_array()) throw Error("\"factors\" must be an array");
  std::vector<FactorLabel> factors;
  for (const auto& f : j) {
    if (!f.is_object() || !f.contains("name") || !f.contains("dim"))
      throw Error("each factor needs \"name\" and \"dim\"");
    if (!f["name"].is_string() || !f["dim"].is_number_integer())
      throw Error("factor \"name\" must be a string and \"dim\" an integer");
    factors.push_back({f["name"].get<std::string>(),
                       f["dim"].get<Eigen::Index>()});
  }
  return factors;
}

Matrix matrix_from(const json& j, Eigen::Index dim) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim * dim)
    throw Error("\"matrix\" must hold dim^2 [re, im] pairs");
  Matrix m(dim, dim);
  Eigen::Index k = 0;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number())
      throw Error("matrix entries must be [re, im] number pairs");
    m(k / dim, k % dim) = Complex(entry[0].get<double>(), entry[1].get<double>());
    ++k;
  }
  return m;
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) throw Error("cannot serialize a non-finite number");
  if (value == 0.0) value = 0.0;  // JSON parsers drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string operator_to_json(const LabeledOperator& op) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"format_version\": \"" << kFormatVersion << "\",\n";
  os << "  \"kind\": \"operator\",\n";
  append_factors(os, op.factors(), "  ");
  os << ",\n";
  append_matrix(os, op.matrix());
  os << "\n}\n";
  return os.str();
}

LabeledOperator operator_from_json(const std::string& text) {
  const json j = parse(text);
  check_header(j, "operator");
  if (!j.contains("factors") || !j.contains("matrix"))
    throw Error("operator file needs \"factors\" and \"matrix\"");
  std::vector<FactorLabel> factors = factors_from(j["factors"]);
  Eigen::Index dim = 1;
  for (const auto& f : factors) dim *= f.dim;
  return LabeledOperator(std::move(factors), matrix_from(j["matrix"], dim));
}

std::string distribution_to_json(const JointDistribution& dist) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"format_version\": \"" << kFormatVersion << "\",\n";
  os << "  \"kind\": \"distribution\",\n";
  os << "  \"alphabet_sizes\": [";
  for (std::size_t i = 0; i < dist.alphabet_sizes().size(); ++i) {
    if (i) os << ", ";
    os << dist.alphabet_sizes()[i];
  }
  os << "],\n";
  os << "  \"table\": [\n";
  for (std::size_t i = 0; i < dist.table().size(); ++i) {
    os << "    " << format_double(dist.table()[i]);
    if (i + 1 < dist.table().size()) os << ",";
    os << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

JointDistribution distribution_from_json(const std::string& text) {
  const json j = parse(text);
  check_header(j, "distribution");
  if (!j.contains("alphabet_sizes") || !j.contains("table"))
    throw Error("distribution file needs \"alphabet_sizes\" and \"table\"");
  if (!j["alphabet_sizes"].is_array() || !j["table"].is_array())
    throw Error("\"alphabet_sizes\" and \"table\" must be arrays");
  std::vector<int> sizes;
  for (const auto& d : j["alphabet_sizes"]) {
    if (!d.is_number_integer()) throw Error("alphabet sizes must be integers");
    sizes.push_back(d.get<int>());
  }
  std::vector<double> table;
  for (const auto& v : j["table"]) {
    if (!v.is_number()) throw Error("table entries must be numbers");
    table.push_back(v.get<double>());
  }
  return JointDistribution(std::move(sizes), std::move(table));
}

std::string sequence_to_json(const InstrumentSequence& sequence) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"format_version\": \"" << kFormatVersion << "\",\n";
  os << "  \"kind\": \"instrument_sequence\",\n";
  os << "  \"elements\": [\n";
  for (std::size_t i = 0; i < sequence.elements.size(); ++i) {
    const auto& el = sequence.elements[i];
    os << "    {\n";
    os << "      \"outcome\": \"" << escape(el.outcome) << "\",\n";
    append_factors(os, el.op.factors(), "      ");
    os << ",\n      \"matrix\": [";
    const Matrix& m = el.op.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (r || c) os << ", ";
        os << "[" << format_double(m(r, c).real()) << ", "
           << format_double(m(r, c).imag()) << "]";
      }
    os << "]\n    }";
    if (i + 1 < sequence.elements.size()) os << ",";
    os << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

InstrumentSequence sequence_from_json(const std::string& text) {
  const json j = parse(text);
  check_header(j, "instrument_sequence");
  if (!j.contains("elements") || !j["elements"].is_array())
    throw Error("sequence file needs an \"elements\" array");
  InstrumentSequence seq;
  for (const auto& e : j["elements"]) {
    if (!e.is_object() || !e.contains("outcome") || !e.contains("factors") ||
        !e.contains("matrix"))
      throw Error("each element needs \"outcome\", \"factors\" and \"matrix\"");
    if (!e["outcome"].is_string()) throw Error("element outcome must be a string");
    std::vector<FactorLabel> factors = factors_from(e["factors"]);
    Eigen::Index dim = 1;
    for (const auto& f : factors) dim *= f.dim;
    seq.elements.push_back({e["outcome"].get<std::string>(),
                            LabeledOperator(std::move(factors),
                                            matrix_from(e["matrix"], dim))});
  }
  if (seq.elements.empty()) throw Error("sequence file has no elements");
  return seq;
}

std::string json_kind(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error("file has no \"kind\" field");
  return j["kind"].get<std::string>();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed while writing '" + path.string() + "'");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string digest_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace qmarkov::io
