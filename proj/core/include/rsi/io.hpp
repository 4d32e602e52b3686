#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rsi/instance.hpp"
#include "rsi/scorer.hpp"

namespace rsi {

/// Unreadable or unwritable file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntactically or structurally malformed file; the message names the byte
/// offset or the offending field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Instance file:
///   {"n": int, "optimal": int, "rows": [{"support": [...], "weights": [...]}, ...]}
/// Weights are written with 17 significant digits, so load(save(x)) == x.
/// `config_json`, when non-empty, must be a JSON value and is embedded as
/// "config"; readers ignore it.
void write_instance(std::ostream& os, const ProgramSpace& space, std::string_view config_json = {});
void save_instance(const std::filesystem::path& path, const ProgramSpace& space,
                   std::string_view config_json = {});

/// Throws FormatError on malformed input and ValidationError if the decoded
/// space is invalid.
ProgramSpace parse_instance(std::string_view text);
ProgramSpace load_instance(const std::filesystem::path& path);

/// Score file: {"scores": [float | "inf", ...], "settle_order": [int, ...]}.
void write_scores(std::ostream& os, const ScoreTable& table, std::string_view config_json = {});
void save_scores(const std::filesystem::path& path, const ScoreTable& table,
                 std::string_view config_json = {});
ScoreTable parse_scores(std::string_view text);
ScoreTable load_scores(const std::filesystem::path& path);

/// The generator settings as a JSON object, engine name included.
std::string gen_config_json(const GenConfig& cfg);

/// Reads a whole file. Throws IoError.
std::string read_file(const std::filesystem::path& path);
/// Writes a whole file. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace rsi
