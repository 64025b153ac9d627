#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "knightian/json_io.hpp"
#include "knightian/toyvm.hpp"

namespace cli {

using knightian::io::Json;
using knightian::io::ObjectReader;

struct Context {
  std::string command;
  std::optional<std::uint64_t> seed;

  /// Throws ValidationError("MissingSeed") when no seed was given.
  std::uint64_t require_seed() const;
};

struct Result {
  Json body;
  /// Rows for --format csv; when absent the scalar fields of `body` are
  /// written as key,value lines.
  std::optional<Json> table;
};

struct Command {
  std::string family;
  std::string name;
  std::string summary;
  std::string schema;
  std::function<Result(const Context&, ObjectReader&)> run;
};

std::vector<Command> freestate_commands();
std::vector<Command> prior_commands();
std::vector<Command> soph_commands();
std::vector<Command> arena_commands();
std::vector<Command> gadgets_commands();

// Shared readers.
knightian::toyvm::MachineConfig read_machine(ObjectReader& r);
/// A bit string "0110", or {"ops": ["EMIT0", ...]}, or {"body": "0110"}.
knightian::toyvm::Program read_program(const Json& j, const std::string& where);
Json program_json(const knightian::toyvm::Program& p);
knightian::Bits read_bits(ObjectReader& r, const std::string& key);
knightian::Bits read_bits_or(ObjectReader& r, const std::string& key, const std::string& fallback);

}  // namespace cli
