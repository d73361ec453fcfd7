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

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmarkov/io.hpp"
#include "qmarkov/markov_order.hpp"

namespace fs = std::filesystem;
using namespace qmarkov;

namespace {

// Exit codes, stable across releases: 0 = success or analyzed-true,
// 1 = analyzed-false (invalid file, no Markov order, zero-probability event,
// witness shows nothing), 2 = unusable input or usage error.
constexpr int kExitTrue = 0;
constexpr int kExitFalse = 1;
constexpr int kExitError = 2;

std::string json_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string jstr(std::string_view s) { return "\"" + json_escape(s) + "\""; }

struct LoadedFile {
  std::string path;
  std::string text;
  std::string digest;
};

LoadedFile load(const std::string& path) {
  LoadedFile f;
  f.path = path;
  f.text = io::read_text_file(path);
  f.digest = io::digest_hex(f.text);
  return f;
}

std::string input_json(const LoadedFile& f) {
  return "{\"path\": " + jstr(f.path) + ", \"digest\": " + jstr(f.digest) +
         "}";
}

std::vector<int> parse_step_list(const std::string& text) {
  std::vector<int> steps;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      steps.push_back(v);
    } catch (const std::exception&) {
      throw Error("cannot parse step list entry '" + tok + "'");
    }
  }
  if (steps.empty()) throw Error("step list is empty");
  return steps;
}

// History before the memory block, future after it; the cover check rejects
// memory steps that are missing from the process or out of order.
BlockPartition blocks_around_memory(const std::vector<int>& steps,
                                    const std::vector<int>& memory) {
  BlockPartition blocks;
  blocks.memory = memory;
  for (int s : steps) {
    if (s < memory.front()) blocks.history.push_back(s);
    if (s > memory.back()) blocks.future.push_back(s);
  }
  blocks.validate_cover(steps);
  return blocks;
}

// Named probing instruments; anything else is read as an instrument-sequence
// file already bound to the memory steps.
bool is_named_instrument(const std::string& spec) {
  return spec == "tetrahedral" || spec == "sharp" || spec == "sharp-z";
}

Instrument named_instrument(const std::string& spec, Eigen::Index dim) {
  if (spec == "tetrahedral") {
    if (dim != 2)
      throw Error("the tetrahedral instrument probes qubits, got dimension " +
                  std::to_string(dim));
    return tetrahedral_measurement();
  }
  if (spec == "sharp") return sharp_classical_instrument(dim);
  if (spec == "sharp-z") return computational_measurement(dim);
  throw Error("unknown instrument '" + spec + "'");
}

InstrumentSequence sequence_for(const ProcessTensor& process,
                                const BlockPartition& blocks,
                                const std::string& spec) {
  if (is_named_instrument(spec)) {
    std::vector<Instrument> per_step;
    for (int s : blocks.memory)
      per_step.push_back(named_instrument(spec, process.input_dim(s)));
    return memory_sequence(process, blocks, per_step);
  }
  return io::sequence_from_json(io::read_text_file(spec));
}

std::string step_list_str(const std::vector<int>& steps) {
  std::string out = "[";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(steps[i]);
  }
  return out + "]";
}

std::string partition_json(const BlockPartition& blocks) {
  return "{\"history\": " + step_list_str(blocks.history) +
         ", \"memory\": " + step_list_str(blocks.memory) +
         ", \"future\": " + step_list_str(blocks.future) + "}";
}

void emit(const std::string& text) { std::cout << text << "\n"; }

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& path, double tol, bool as_json) {
  const LoadedFile file = load(path);
  const std::string kind = io::json_kind(file.text);

  std::ostringstream text, json;
  json << "{\n  \"format_version\": \"" << io::kFormatVersion << "\",\n"
       << "  \"kind\": \"report\",\n  \"command\": \"validate\",\n"
       << "  \"input\": " << input_json(file) << ",\n"
       << "  \"file_kind\": " << jstr(kind) << ",\n"
       << "  \"tolerance\": " << io::format_double(tol) << ",\n";
  text << "file: " << file.path << "\ndigest: " << file.digest
       << "\nkind: " << kind << "\n";

  bool valid = false;
  try {
    if (kind == "operator") {
      const ProcessTensor process(io::operator_from_json(file.text));
      const ProcessReport report = validate_process(process);
      valid = report.ok(tol);
      text << "steps: " << step_list_str(process.step_indices()) << "\n"
           << "trace: " << io::format_double(process.op().trace().real())
           << " (expected " << io::format_double(process.expected_trace())
           << ")\n"
           << "hermiticity deviation: "
           << io::format_double(report.hermiticity_deviation) << "\n"
           << "minimum eigenvalue: " << io::format_double(report.min_eigenvalue)
           << "\ntrace deviation: " << io::format_double(report.trace_deviation)
           << "\ncausality:\n";
      json << "  \"steps\": " << step_list_str(process.step_indices()) << ",\n"
           << "  \"hermiticity_deviation\": "
           << io::format_double(report.hermiticity_deviation) << ",\n"
           << "  \"min_eigenvalue\": "
           << io::format_double(report.min_eigenvalue) << ",\n"
           << "  \"trace_deviation\": "
           << io::format_double(report.trace_deviation) << ",\n"
           << "  \"causality\": [";
      for (std::size_t i = 0; i < report.causality.size(); ++i) {
        const auto& level = report.causality[i];
        text << "  " << level.label << ": "
             << io::format_double(level.deviation) << "\n";
        json << (i ? ", " : "") << "{\"label\": " << jstr(level.label)
             << ", \"deviation\": " << io::format_double(level.deviation)
             << "}";
      }
      json << "],\n";
    } else if (kind == "instrument_sequence") {
      const InstrumentSequence seq = io::sequence_from_json(file.text);
      const SequenceReport report = validate_sequence(seq);
      valid = report.ok(tol);
      text << "elements: " << seq.elements.size() << "\n"
           << "hermiticity deviation: "
           << io::format_double(report.max_hermiticity_deviation) << "\n"
           << "minimum element eigenvalue: "
           << io::format_double(report.min_element_eigenvalue)
           << "\nnormalization:\n";
      json << "  \"elements\": " << seq.elements.size() << ",\n"
           << "  \"hermiticity_deviation\": "
           << io::format_double(report.max_hermiticity_deviation) << ",\n"
           << "  \"min_element_eigenvalue\": "
           << io::format_double(report.min_element_eigenvalue) << ",\n"
           << "  \"normalization\": [";
      for (std::size_t i = 0; i < report.normalization.size(); ++i) {
        const auto& level = report.normalization[i];
        text << "  " << level.label << ": "
             << io::format_double(level.deviation) << "\n";
        json << (i ? ", " : "") << "{\"label\": " << jstr(level.label)
             << ", \"deviation\": " << io::format_double(level.deviation)
             << "}";
      }
      json << "],\n";
    } else if (kind == "distribution") {
      const JointDistribution dist = io::distribution_from_json(file.text);
      valid = true;
      text << "steps: " << dist.steps() << "\nalphabet sizes: "
           << step_list_str(dist.alphabet_sizes()) << "\n";
      json << "  \"steps\": " << dist.steps() << ",\n"
           << "  \"alphabet_sizes\": " << step_list_str(dist.alphabet_sizes())
           << ",\n";
    } else {
      throw Error("no validator for files of kind '" + kind + "'");
    }
  } catch (const Error& e) {
    // The file parsed as JSON but its content does not form a valid object.
    if (as_json) {
      json << "  \"valid\": false,\n  \"reason\": " << jstr(e.what())
           << "\n}";
      emit(json.str());
    } else {
      text << "invalid: " << e.what() << "\nverdict: invalid\n";
      std::cout << text.str();
    }
    return kExitFalse;
  }

  if (as_json) {
    json << "  \"valid\": " << (valid ? "true" : "false") << "\n}";
    emit(json.str());
  } else {
    text << "verdict: " << (valid ? "valid" : "invalid") << " (tolerance "
         << io::format_double(tol) << ")\n";
    std::cout << text.str();
  }
  return valid ? kExitTrue : kExitFalse;
}

// ----------------------------------------------------------------- example

struct WrittenFile {
  std::string name;
  std::string kind;
  std::string digest;
};

WrittenFile write_example_file(const fs::path& dir, const std::string& name,
                               const std::string& kind,
                               const std::string& content) {
  io::write_text_file(dir / name, content);
  return {name, kind, io::digest_hex(content)};
}

JointDistribution flip_chain_table(int steps, double flip) {
  const std::size_t size = std::size_t{1} << steps;
  std::vector<double> table(size, 0.0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    double p = 0.5;
    for (int k = 1; k < steps; ++k) {
      const int prev = static_cast<int>(idx >> (steps - k)) & 1;
      const int cur = static_cast<int>(idx >> (steps - 1 - k)) & 1;
      p *= (cur == prev) ? (1.0 - flip) : flip;
    }
    table[idx] = p;
  }
  return JointDistribution(std::vector<int>(static_cast<std::size_t>(steps), 2),
                           std::move(table));
}

int cmd_example(const std::string& name, const std::string& output, int steps,
                double flip, bool as_json) {
  const fs::path dir(output);
  fs::create_directories(dir);

  std::vector<WrittenFile> files;
  std::vector<FactorLabel> factors;
  BlockPartition partition;

  if (name == "appendix-d") {
    const ProcessTensor process = tetrahedral_process();
    files.push_back(write_example_file(dir, name + "-process.json", "operator",
                                       io::operator_to_json(process.op())));
    files.push_back(write_example_file(dir, name + "-state.json", "operator",
                                       io::operator_to_json(tetrahedral_state())));
    factors = process.op().factors();
    partition = partition_at_cut(process.step_indices(), 2, 1);
  } else if (name == "markovian") {
    if (steps < 2) throw Error("a process needs at least 2 steps");
    Matrix initial = Matrix::Zero(2, 2);
    initial(0, 0) = 1.0;
    const std::vector<CpMap> channels(static_cast<std::size_t>(steps - 1),
                                      identity_map(2));
    const ProcessTensor process = markovian_process(initial, channels);
    files.push_back(write_example_file(dir, name + "-process.json", "operator",
                                       io::operator_to_json(process.op())));
    factors = process.op().factors();
    partition = partition_at_cut(process.step_indices(),
                                 static_cast<std::size_t>(steps) - 1, 1);
  } else if (name == "classical-chain") {
    if (steps < 2) throw Error("a chain needs at least 2 steps");
    if (flip < 0.0 || flip > 1.0) throw Error("flip probability must be in [0, 1]");
    const JointDistribution dist = flip_chain_table(steps, flip);
    const ProcessTensor process = embed_classical(dist);
    files.push_back(write_example_file(dir, name + "-distribution.json",
                                       "distribution",
                                       io::distribution_to_json(dist)));
    files.push_back(write_example_file(dir, name + "-process.json", "operator",
                                       io::operator_to_json(process.op())));
    factors = process.op().factors();
    partition = partition_at_cut(process.step_indices(),
                                 static_cast<std::size_t>(steps) - 1, 1);
  } else {
    throw Error("unknown example '" + name + "'");
  }

  std::ostringstream manifest;
  manifest << "{\n  \"format_version\": \"" << io::kFormatVersion << "\",\n"
           << "  \"kind\": \"manifest\",\n"
           << "  \"example\": " << jstr(name) << ",\n  \"files\": [";
  for (std::size_t i = 0; i < files.size(); ++i)
    manifest << (i ? ", " : "") << "{\"path\": " << jstr(files[i].name)
             << ", \"kind\": " << jstr(files[i].kind)
             << ", \"digest\": " << jstr(files[i].digest) << "}";
  manifest << "],\n  \"factors\": [";
  for (std::size_t i = 0; i < factors.size(); ++i)
    manifest << (i ? ", " : "") << "{\"name\": " << jstr(factors[i].name)
             << ", \"dim\": " << factors[i].dim << "}";
  manifest << "],\n  \"partition\": " << partition_json(partition) << "\n}\n";
  files.push_back(write_example_file(dir, name + "-manifest.json", "manifest",
                                     manifest.str()));

  if (as_json) {
    std::ostringstream json;
    json << "{\n  \"format_version\": \"" << io::kFormatVersion << "\",\n"
         << "  \"kind\": \"report\",\n  \"command\": \"example\",\n"
         << "  \"example\": " << jstr(name) << ",\n  \"files\": [";
    for (std::size_t i = 0; i < files.size(); ++i)
      json << (i ? ", " : "")
           << "{\"path\": " << jstr((dir / files[i].name).string())
           << ", \"kind\": " << jstr(files[i].kind)
           << ", \"digest\": " << jstr(files[i].digest) << "}";
    json << "]\n}";
    emit(json.str());
  } else {
    for (const auto& f : files)
      std::cout << "wrote " << (dir / f.name).string() << " (" << f.kind
                << ", digest " << f.digest << ")\n";
  }
  return kExitTrue;
}

// -------------------------------------------------------------------- born

int cmd_born(const std::string& process_path, const std::string& sequence_path,
             bool as_json) {
  const LoadedFile pfile = load(process_path);
  const LoadedFile sfile = load(sequence_path);
  const ProcessTensor process(io::operator_from_json(pfile.text));
  const InstrumentSequence sequence = io::sequence_from_json(sfile.text);

  const bool complete = validate_sequence(sequence).ok();
  const auto probs = born_probabilities(process, sequence);
  double total = 0.0;
  for (const auto& p : probs) total += p.probability;
  const bool normalized = std::abs(total - 1.0) <= 1e-10;

  if (as_json) {
    std::ostringstream json;
    json << "{\n  \"format_version\": \"" << io::kFormatVersion << "\",\n"
         << "  \"kind\": \"report\",\n  \"command\": \"born\",\n"
         << "  \"process\": " << input_json(pfile) << ",\n"
         << "  \"sequence\": " << input_json(sfile) << ",\n"
         << "  \"complete\": " << (complete ? "true" : "false") << ",\n"
         << "  \"outcomes\": [";
    for (std::size_t i = 0; i < probs.size(); ++i)
      json << (i ? ", " : "") << "{\"outcome\": " << jstr(probs[i].outcome)
           << ", \"probability\": " << io::format_double(probs[i].probability)
           << "}";
    json << "],\n  \"total\": " << io::format_double(total) << "\n}";
    emit(json.str());
  } else {
    for (const auto& p : probs)
      std::cout << "outcome " << p.outcome << ": "
                << io::format_double(p.probability) << "\n";
    std::cout << "total: " << io::format_double(total)
              << (complete ? " (complete sequence)\n"
                           : " (sequence does not sum to a deterministic strategy)\n");
  }
  return (complete && !normalized) ? kExitFalse : kExitTrue;
}

// --------------------------------------------------------------- condition

int cmd_condition(const std::string& process_path,
                  const std::string& sequence_path,
                  const std::optional<std::string>& outcome,
                  const std::optional<int>& element_index,
                  const std::string& output, bool as_json) {
  const LoadedFile pfile = load(process_path);
  const LoadedFile sfile = load(sequence_path);
  const ProcessTensor process(io::operator_from_json(pfile.text));
  const InstrumentSequence sequence = io::sequence_from_json(sfile.text);

  const SequenceElement* chosen = nullptr;
  if (element_index) {
    if (*element_index < 0 ||
        static_cast<std::size_t>(*element_index) >= sequence.elements.size())
      throw Error("element index out of range");
    chosen = &sequence.elements[static_cast<std::size_t>(*element_index)];
  } else if (outcome) {
    for (const auto& el : sequence.elements)
      if (el.outcome == *outcome) {
        if (chosen) throw Error("outcome '" + *outcome + "' is ambiguous");
        chosen = &el;
      }
    if (!chosen) throw Error("no element with outcome '" + *outcome + "'");
  } else {
    throw Error("pick the event with --outcome or --element");
  }

  ConditionalOutcome cond;
  try {
    cond = condition(process, *chosen);
  } catch (const ZeroProbabilityError& e) {
    std::cerr << "cannot condition: " << e.what() << "\n";
    return kExitFalse;
  }
  io::write_text_file(output, io::operator_to_json(cond.op));

  if (as_json) {
    std::ostringstream json;
    json << "{\n  \"format_version\": \"" << io::kFormatVersion << "\",\n"
         << "  \"kind\": \"report\",\n  \"command\": \"condition\",\n"
         << "  \"process\": " << input_json(pfile) << ",\n"
         << "  \"sequence\": " << input_json(sfile) << ",\n"
         << "  \"outcome\": " << jstr(cond.outcome) << ",\n"
         << "  \"probability\": " << io::format_double(cond.probability)
         << ",\n  \"output\": " << jstr(output) << "\n}";
    emit(json.str());
  } else {
    std::cout << "outcome " << cond.outcome << ": probability "
              << io::format_double(cond.probability) << "\nwrote " << output
              << "\n";
  }
  return kExitTrue;
}

// ------------------------------------------------------------ markov-order

std::string verdict_json(const MarkovOrderVerdict& verdict) {
  std::ostringstream json;
  json << "{\"holds\": " << (verdict.holds ? "true" : "false")
       << ", \"max_distance\": " << io::format_double(verdict.max_distance)
       << ", \"tolerance\": " << io::format_double(verdict.tolerance)
       << ", \"outcomes\": [";
  for (std::size_t i = 0; i < verdict.outcomes.size(); ++i) {
    const auto& o = verdict.outcomes[i];
    json << (i ? ", " : "") << "{\"outcome\": " << jstr(o.outcome)
         << ", \"probability\": " << io::format_double(o.probability)
         << ", \"distance\": " << io::format_double(o.distance)
         << ", \"skipped\": " << (o.skipped ? "true" : "false") << "}";
  }
  json << "]}";
  return json.str();
}

void print_verdict_text(const MarkovOrderVerdict& verdict) {
  for (const auto& o : verdict.outcomes) {
    if (o.skipped) {
      std::cout << "outcome " << o.outcome << ": skipped (probability "
                << io::format_double(o.probability) << ")\n";
    } else {
      std::cout << "outcome " << o.outcome << ": probability "
                << io::format_double(o.probability) << ", distance "
                << io::format_double(o.distance) << "\n";
    }
  }
  std::cout << "max distance: " << io::format_double(verdict.max_distance)
            << " (tolerance " << io::format_double(verdict.tolerance) << ")\n";
}

int cmd_markov_order(const std::string& process_path, const std::string& memory,
                     const std::string& instrument, double tol, bool as_json) {
  const LoadedFile pfile = load(process_path);
  const ProcessTensor process(io::operator_from_json(pfile.text));
  const BlockPartition blocks =
      blocks_around_memory(process.step_indices(), parse_step_list(memory));
  const InstrumentSequence sequence = sequence_for(process, blocks, instrument);
  const MarkovOrderVerdict verdict =
      has_markov_order(process, blocks, sequence, tol);

  if (as_json) {
    std::ostringstream json;
    json << "{\n  \"format_version\": \"" << io::kFormatVersion << "\",\n"
         << "  \"kind\": \"report\",\n  \"command\": \"markov-order\",\n"
         << "  \"process\": " << input_json(pfile) << ",\n"
         << "  \"instrument\": " << jstr(instrument) << ",\n"
         << "  \"partition\": " << partition_json(blocks) << ",\n"
         << "  \"verdict\": " << verdict_json(verdict) << "\n}";
    emit(json.str());
  } else {
    std::cout << "partition: history " << step_list_str(blocks.history)
              << " memory " << step_list_str(blocks.memory) << " future "
              << step_list_str(blocks.future) << "\ninstrument: " << instrument
              << "\n";
    print_verdict_text(verdict);
    std::cout << "markov order: " << (verdict.holds ? "holds" : "fails")
              << "\n";
  }
  return verdict.holds ? kExitTrue : kExitFalse;
}

// --------------------------------------------------------------------- cmi

int cmd_cmi(const std::optional<std::string>& process_path,
            const std::optional<std::string>& distribution_path,
            const std::string& memory, const std::string& base_name,
            bool as_json) {
  if (!process_path && !distribution_path)
    throw Error("give either --process or --distribution");
  const double base = base_name == "e" ? std::exp(1.0) : 2.0;
  const std::vector<int> memory_steps = parse_step_list(memory);

  LoadedFile file;
  double value = 0.0;
  BlockPartition blocks;
  if (process_path) {
    file = load(*process_path);
    const ProcessTensor process(io::operator_from_json(file.text));
    blocks = blocks_around_memory(process.step_indices(), memory_steps);
    value = quantum_cmi(process, blocks, base);
  } else {
    file = load(*distribution_path);
    const JointDistribution dist = io::distribution_from_json(file.text);
    std::vector<int> steps(static_cast<std::size_t>(dist.steps()));
    for (int s = 0; s < dist.steps(); ++s) steps[static_cast<std::size_t>(s)] = s;
    blocks = blocks_around_memory(steps, memory_steps);
    value = classical_cmi(dist, blocks, base);
  }

  if (as_json) {
    std::ostringstream json;
    json << "{\n  \"format_version\": \"" << io::kFormatVersion << "\",\n"
         << "  \"kind\": \"report\",\n  \"command\": \"cmi\",\n"
         << "  \"input\": " << input_json(file) << ",\n"
         << "  \"partition\": " << partition_json(blocks) << ",\n"
         << "  \"log_base\": " << jstr(base_name) << ",\n"
         << "  \"value\": " << io::format_double(value) << "\n}";
    emit(json.str());
  } else {
    std::cout << "partition: history " << step_list_str(blocks.history)
              << " memory " << step_list_str(blocks.memory) << " future "
              << step_list_str(blocks.future) << "\n"
              << "conditional mutual information (base " << base_name
              << "): " << io::format_double(value) << "\n";
  }
  return kExitTrue;
}

// ----------------------------------------------------------------- witness

Eigen::MatrixXd preset_coefficients(const std::string& mix, std::size_t n) {
  if (mix == "pairs") {
    // Lump consecutive outcomes two by two.
    const std::size_t cols = (n + 1) / 2;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(cols));
    for (std::size_t x = 0; x < n; ++x)
      c(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x / 2)) = 1.0;
    return c;
  }
  if (mix == "uniform") {
    return Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(n),
                                     1.0 / static_cast<double>(n));
  }
  throw Error("unknown mixing preset '" + mix + "'");
}

// Rows separated by ';', entries by ','.
Eigen::MatrixXd parse_coefficients(const std::string& text, std::size_t n) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row_text;
  while (std::getline(ss, row_text, ';')) {
    std::vector<double> row;
    std::stringstream rs(row_text);
    std::string tok;
    while (std::getline(rs, tok, ',')) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw Error("cannot parse coefficient '" + tok + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.size() != n)
    throw Error("need one coefficient row per instrument element (" +
                std::to_string(n) + ")");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != cols) throw Error("coefficient rows differ in length");
    for (std::size_t j = 0; j < cols; ++j)
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return c;
}

int cmd_witness(const std::string& process_path, const std::string& memory,
                const std::string& instrument_name, const std::string& mix,
                const std::optional<std::string>& coefficients, double tol,
                double threshold, bool as_json) {
  const LoadedFile pfile = load(process_path);
  const ProcessTensor process(io::operator_from_json(pfile.text));
  const std::vector<int> memory_steps = parse_step_list(memory);
  if (memory_steps.size() != 1)
    throw Error("the witness probes a single memory step");
  const BlockPartition blocks =
      blocks_around_memory(process.step_indices(), memory_steps);

  const Instrument instrument =
      named_instrument(instrument_name, process.input_dim(memory_steps[0]));
  const Eigen::MatrixXd coeff =
      coefficients ? parse_coefficients(*coefficients, instrument.elements.size())
                   : preset_coefficients(mix, instrument.elements.size());

  const WitnessReport report =
      mixing_witness(process, blocks, instrument, coeff, tol, threshold);

  if (as_json) {
    std::ostringstream json;
    json << "{\n  \"format_version\": \"" << io::kFormatVersion << "\",\n"
         << "  \"kind\": \"report\",\n  \"command\": \"witness\",\n"
         << "  \"process\": " << input_json(pfile) << ",\n"
         << "  \"instrument\": " << jstr(instrument_name) << ",\n"
         << "  \"partition\": " << partition_json(blocks) << ",\n"
         << "  \"threshold\": " << io::format_double(report.threshold) << ",\n"
         << "  \"coefficients_trivial\": "
         << (report.coefficients_trivial ? "true" : "false") << ",\n"
         << "  \"base\": " << verdict_json(report.base) << ",\n"
         << "  \"mixed\": " << verdict_json(report.mixed) << ",\n"
         << "  \"demonstrates\": " << (report.demonstrates() ? "true" : "false")
         << "\n}";
    emit(json.str());
  } else {
    std::cout << "base instrument (" << instrument_name << "):\n";
    print_verdict_text(report.base);
    std::cout << "mixed instrument:\n";
    print_verdict_text(report.mixed);
    if (report.coefficients_trivial)
      std::cout << "note: the coefficients only permute outcomes\n";
    std::cout << "witness threshold: " << io::format_double(report.threshold)
              << "\ndemonstrates instrument dependence: "
              << (report.demonstrates() ? "yes" : "no") << "\n";
  }
  return report.demonstrates() ? kExitTrue : kExitFalse;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-time quantum process analysis"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Check an operator, sequence, or distribution file");
  std::string validate_path;
  double validate_tol = kTolFactor;
  bool validate_json = false;
  validate->add_option("file", validate_path, "file to check")->required();
  validate->add_option("--tolerance", validate_tol, "largest accepted deviation");
  validate->add_flag("--json", validate_json, "machine-readable report");

  // example
  auto* example = app.add_subcommand("example", "Write a bundled example");
  std::string example_name, example_output = ".";
  int example_steps = 3;
  double example_flip = 0.3;
  bool example_json = false;
  example->add_option("name", example_name, "appendix-d, markovian, or classical-chain")
      ->required()
      ->check(CLI::IsMember({"appendix-d", "markovian", "classical-chain"}));
  example->add_option("--output", example_output, "directory to write into");
  example->add_option("--steps", example_steps, "number of time steps");
  example->add_option("--flip", example_flip, "chain flip probability");
  example->add_flag("--json", example_json, "machine-readable report");

  // born
  auto* born = app.add_subcommand("born", "Outcome probabilities of a probed process");
  std::string born_process, born_sequence;
  bool born_json = false;
  born->add_option("--process", born_process, "operator file")->required();
  born->add_option("--sequence", born_sequence, "instrument sequence file")->required();
  born->add_flag("--json", born_json, "machine-readable report");

  // condition
  auto* cond = app.add_subcommand("condition",
                                  "Condition a process on one probing event");
  std::string cond_process, cond_sequence, cond_output;
  std::optional<std::string> cond_outcome;
  std::optional<int> cond_element;
  bool cond_json = false;
  cond->add_option("--process", cond_process, "operator file")->required();
  cond->add_option("--sequence", cond_sequence, "instrument sequence file")->required();
  cond->add_option("--outcome", cond_outcome, "outcome label to condition on");
  cond->add_option("--element", cond_element, "element index to condition on");
  cond->add_option("--output", cond_output, "file for the conditioned operator")
      ->required();
  cond->add_flag("--json", cond_json, "machine-readable report");

  // markov-order
  auto* order = app.add_subcommand("markov-order",
                                   "Test conditional factorization over a memory block");
  std::string order_process, order_memory, order_instrument = "tetrahedral";
  double order_tol = kTolFactor;
  bool order_json = false;
  order->add_option("--process", order_process, "operator file")->required();
  order->add_option("--memory", order_memory, "memory steps, e.g. 1 or 1,2")
      ->required();
  order->add_option("--instrument", order_instrument,
                    "tetrahedral, sharp, sharp-z, or a sequence file");
  order->add_option("--tolerance", order_tol, "largest accepted distance");
  order->add_flag("--json", order_json, "machine-readable report");

  // cmi
  auto* cmi = app.add_subcommand("cmi", "Conditional mutual information");
  std::optional<std::string> cmi_process, cmi_distribution;
  std::string cmi_memory, cmi_base = "2";
  bool cmi_json = false;
  auto* cmi_p = cmi->add_option("--process", cmi_process, "operator file");
  auto* cmi_d = cmi->add_option("--distribution", cmi_distribution,
                                "distribution file");
  cmi_p->excludes(cmi_d);
  cmi_d->excludes(cmi_p);
  cmi->add_option("--memory", cmi_memory, "memory steps, e.g. 1 or 1,2")
      ->required();
  cmi->add_option("--log-base", cmi_base, "2 or e")
      ->check(CLI::IsMember({"2", "e"}));
  cmi->add_flag("--json", cmi_json, "machine-readable report");

  // witness
  auto* witness = app.add_subcommand(
      "witness", "Show that Markov order depends on the probing instrument");
  std::string witness_process, witness_memory, witness_instrument = "tetrahedral";
  std::string witness_mix = "pairs";
  std::optional<std::string> witness_coefficients;
  double witness_tol = kTolFactor, witness_threshold = 1e-3;
  bool witness_json = false;
  witness->add_option("--process", witness_process, "operator file")->required();
  witness->add_option("--memory", witness_memory, "single memory step")->required();
  witness->add_option("--instrument", witness_instrument,
                      "tetrahedral, sharp, or sharp-z");
  witness->add_option("--mix", witness_mix, "pairs or uniform")
      ->check(CLI::IsMember({"pairs", "uniform"}));
  witness->add_option("--coefficients", witness_coefficients,
                      "mixing rows, e.g. '0.5,0.5;0.5,0.5'");
  witness->add_option("--tolerance", witness_tol, "largest accepted distance");
  witness->add_option("--threshold", witness_threshold,
                      "distance that counts as broken factorization");
  witness->add_flag("--json", witness_json, "machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitTrue : kExitError;
  }

  try {
    if (validate->parsed())
      return cmd_validate(validate_path, validate_tol, validate_json);
    if (example->parsed())
      return cmd_example(example_name, example_output, example_steps,
                         example_flip, example_json);
    if (born->parsed()) return cmd_born(born_process, born_sequence, born_json);
    if (cond->parsed())
      return cmd_condition(cond_process, cond_sequence, cond_outcome,
                           cond_element, cond_output, cond_json);
    if (order->parsed())
      return cmd_markov_order(order_process, order_memory, order_instrument,
                              order_tol, order_json);
    if (cmi->parsed())
      return cmd_cmi(cmi_process, cmi_distribution, cmi_memory, cmi_base,
                     cmi_json);
    if (witness->parsed())
      return cmd_witness(witness_process, witness_memory, witness_instrument,
                         witness_mix, witness_coefficients, witness_tol,
                         witness_threshold, witness_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
