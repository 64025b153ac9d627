#include "cli.hpp"

namespace cli {

using namespace knightian;

std::uint64_t Context::require_seed() const {
  if (!seed) throw ValidationError("MissingSeed", "'" + command + "' is stochastic; pass --seed or a \"seed\" key");
  return *seed;
}

toyvm::MachineConfig read_machine(ObjectReader& r) {
  const Json* m = r.optional("machine");
  return m ? io::machine_config_from_json(*m) : toyvm::MachineConfig{};
}

toyvm::Program read_program(const Json& j, const std::string& where) {
  if (j.is_string()) return toyvm::Program::decode(parse_bits(j.get<std::string>()));
  ObjectReader r(j, where);
  if (r.has("ops")) {
    const Json& ops = r.required("ops");
    r.finish();
    if (!ops.is_array()) throw io::SchemaError(where + ".ops must be an array of opcode names");
    std::vector<toyvm::Op> out;
    for (const auto& o : ops) {
      const auto name = io::convert<std::string>(o, where + ".ops");
      bool ok = false;
      for (int k = 0; k < 8; ++k) {
        if (name == toyvm::op_name(static_cast<toyvm::Op>(k))) {
          out.push_back(static_cast<toyvm::Op>(k));
          ok = true;
        }
      }
      if (!ok) throw io::SchemaError(where + ".ops: unknown opcode '" + name + "'");
    }
    return toyvm::Program::assemble(out);
  }
  const auto body = r.get<std::string>("body");
  r.finish();
  return toyvm::Program::from_body(parse_bits(body));
}

Json program_json(const toyvm::Program& p) {
  return Json{{"code", p.to_string()}, {"length", p.length()}, {"ops", p.disassemble()}};
}

Bits read_bits(ObjectReader& r, const std::string& key) { return parse_bits(r.get<std::string>(key)); }

Bits read_bits_or(ObjectReader& r, const std::string& key, const std::string& fallback) {
  return parse_bits(r.get_or<std::string>(key, fallback));
}

}  // namespace cli
