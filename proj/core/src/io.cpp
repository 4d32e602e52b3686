#include "rsi/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "rsi/rng.hpp"

namespace rsi {

using nlohmann::json;

namespace {

void append_double(std::ostream& os, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

json parse_document(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": parse error at byte " + std::to_string(e.byte) +
                      ": " + e.what());
  }
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing field \"" + key + "\"");
  return *it;
}

std::uint64_t as_index(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) {
    throw FormatError(where + ": expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

const json& as_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw FormatError(where + ": expected an array");
  return v;
}

}  // namespace

void write_instance(std::ostream& os, const ProgramSpace& space, std::string_view config_json) {
  os << "{\"n\": " << space.size() << ", \"optimal\": " << space.optimal();
  if (!config_json.empty()) os << ", \"config\": " << config_json;
  os << ", \"rows\": [";
  for (std::size_t i = 0; i < space.rows().size(); ++i) {
    const SparseRow& row = space.rows()[i];
    os << (i == 0 ? "\n" : ",\n") << "{\"support\": [";
    for (std::size_t k = 0; k < row.support.size(); ++k) {
      if (k) os << ", ";
      os << row.support[k];
    }
    os << "], \"weights\": [";
    for (std::size_t k = 0; k < row.weights.size(); ++k) {
      if (k) os << ", ";
      append_double(os, row.weights[k]);
    }
    os << "]}";
  }
  os << "\n]}\n";
}

void save_instance(const std::filesystem::path& path, const ProgramSpace& space,
                   std::string_view config_json) {
  std::ostringstream os;
  write_instance(os, space, config_json);
  write_file(path, os.str());
}

ProgramSpace parse_instance(std::string_view text) {
  const json doc = parse_document(text, "instance");
  const std::uint64_t n = as_index(member(doc, "n", "instance"), "instance.n");
  const std::uint64_t optimal = as_index(member(doc, "optimal", "instance"), "instance.optimal");
  const json& rows = as_array(member(doc, "rows", "instance"), "instance.rows");

  std::vector<SparseRow> parsed;
  parsed.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "instance.rows[" + std::to_string(i) + "]";
    const json& support = as_array(member(rows[i], "support", where), where + ".support");
    const json& weights = as_array(member(rows[i], "weights", where), where + ".weights");
    SparseRow row;
    row.support.reserve(support.size());
    row.weights.reserve(weights.size());
    for (std::size_t k = 0; k < support.size(); ++k) {
      const std::uint64_t idx = as_index(support[k], where + ".support[" + std::to_string(k) + "]");
      row.support.push_back(static_cast<ProgramIndex>(std::min<std::uint64_t>(idx, UINT32_MAX)));
    }
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (!weights[k].is_number()) {
        throw FormatError(where + ".weights[" + std::to_string(k) + "]: expected a number");
      }
      row.weights.push_back(weights[k].get<double>());
    }
    parsed.push_back(std::move(row));
  }
  ProgramSpace space(static_cast<std::size_t>(n), std::move(parsed),
                     static_cast<ProgramIndex>(std::min<std::uint64_t>(optimal, UINT32_MAX)));
  require_valid(space);
  return space;
}

ProgramSpace load_instance(const std::filesystem::path& path) {
  return parse_instance(read_file(path));
}

void write_scores(std::ostream& os, const ScoreTable& table, std::string_view config_json) {
  os << "{";
  if (!config_json.empty()) os << "\"config\": " << config_json << ", ";
  os << "\"scores\": [";
  for (std::size_t i = 0; i < table.scores.size(); ++i) {
    if (i) os << ", ";
    if (table.scores[i].is_infinite()) {
      os << "\"inf\"";
    } else {
      append_double(os, table.scores[i].value());
    }
  }
  os << "], \"settle_order\": [";
  for (std::size_t k = 0; k < table.settle_order.size(); ++k) {
    if (k) os << ", ";
    os << table.settle_order[k];
  }
  os << "]}\n";
}

void save_scores(const std::filesystem::path& path, const ScoreTable& table,
                 std::string_view config_json) {
  std::ostringstream os;
  write_scores(os, table, config_json);
  write_file(path, os.str());
}

ScoreTable parse_scores(std::string_view text) {
  const json doc = parse_document(text, "scores");
  const json& scores = as_array(member(doc, "scores", "scores"), "scores.scores");
  const json& order = as_array(member(doc, "settle_order", "scores"), "scores.settle_order");
  ScoreTable table;
  table.scores.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const json& v = scores[i];
    if (v.is_string() && v.get<std::string>() == "inf") {
      table.scores.push_back(Score::infinity());
    } else if (v.is_number() && v.get<double>() >= 0.0) {
      table.scores.push_back(Score::finite(v.get<double>()));
    } else {
      throw FormatError("scores.scores[" + std::to_string(i) +
                        "]: expected a nonnegative number or \"inf\"");
    }
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::uint64_t idx = as_index(order[k], "scores.settle_order[" + std::to_string(k) + "]");
    if (idx >= table.scores.size()) {
      throw FormatError("scores.settle_order[" + std::to_string(k) + "]: index out of range");
    }
    table.settle_order.push_back(static_cast<ProgramIndex>(idx));
  }
  return table;
}

ScoreTable load_scores(const std::filesystem::path& path) { return parse_scores(read_file(path)); }

std::string gen_config_json(const GenConfig& cfg) {
  json j = {{"engine", std::string(kEngineName)},
            {"l", cfg.l},
            {"n", cfg.n()},
            {"support_min", cfg.support_min},
            {"support_max", cfg.support_max},
            {"weights", std::string(to_string(cfg.weights))},
            {"seed", cfg.seed}};
  return j.dump();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return contents;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace rsi
