// knightian: batch front-end. One subcommand per experiment, JSON config in,
// JSON or CSV report out.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"

using namespace knightian;
using cli::Json;

namespace {

std::string csv_field(const Json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : (v.is_null() ? "" : v.dump());
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string to_csv(const cli::Result& res) {
  std::ostringstream out;
  if (res.table && res.table->is_array() && !res.table->empty()) {
    const Json& rows = *res.table;
    bool first = true;
    for (auto it = rows[0].begin(); it != rows[0].end(); ++it) {
      out << (first ? "" : ",") << csv_field(it.key());
      first = false;
    }
    out << "\n";
    for (const auto& row : rows) {
      first = true;
      for (auto it = rows[0].begin(); it != rows[0].end(); ++it) {
        out << (first ? "" : ",") << (row.contains(it.key()) ? csv_field(row[it.key()]) : "");
        first = false;
      }
      out << "\n";
    }
    return out.str();
  }
  out << "key,value\n";
  for (auto it = res.body.begin(); it != res.body.end(); ++it) {
    if (it.value().is_structured()) continue;
    out << csv_field(it.key()) << "," << csv_field(it.value()) << "\n";
  }
  return out.str();
}

struct Leaf {
  cli::Command cmd;
  CLI::App* app = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knightian uncertainty experiments: freestates, universal prediction, sophistication, "
               "prediction games and small gadgets."};
  app.set_version_flag("--version", std::string(KNIGHTIAN_VERSION));
  app.require_subcommand(1);

  std::string config_path, out_path, format = "json";
  std::optional<std::uint64_t> seed;
  bool show_schema = false;

  std::vector<Leaf> leaves;
  std::map<std::string, CLI::App*> families;
  const std::vector<std::pair<std::string, std::string>> family_help = {
      {"freestate", "Knightian states: intervals, witnesses, OR, mixtures, cloning"},
      {"solomonoff", "universal-prior prediction over toyvm-1 programs"},
      {"soph", "Kolmogorov complexity and sophistication by exhaustive search"},
      {"arena", "prediction games between predictors and subjects"},
      {"gadgets", "CHSH, anthropic rooms, Newcomb, causal graphs"},
  };
  for (const auto& [name, help] : family_help) {
    families[name] = app.add_subcommand(name, help);
    families[name]->require_subcommand(1);
  }
  std::vector<cli::Command> all;
  for (auto* f : {&cli::freestate_commands, &cli::prior_commands, &cli::soph_commands, &cli::arena_commands,
                  &cli::gadgets_commands}) {
    for (auto& c : (*f)()) all.push_back(std::move(c));
  }
  for (auto& c : all) {
    CLI::App* sub = families.at(c.family)->add_subcommand(c.name, c.summary);
    sub->add_option("--config,-c", config_path, "JSON config file");
    sub->add_option("--seed", seed, "64-bit seed (overrides a \"seed\" key in the config)");
    sub->add_option("--out,-o", out_path, "write the report here instead of stdout");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--schema", show_schema, "print the config schema and exit");
    leaves.push_back({c, sub});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const Leaf* leaf = nullptr;
  for (const auto& l : leaves) {
    if (l.app->parsed()) leaf = &l;
  }
  if (!leaf) {
    std::cerr << app.help();
    return 1;
  }
  const std::string command = leaf->cmd.family + " " + leaf->cmd.name;
  if (show_schema) {
    std::cout << command << " config: " << leaf->cmd.schema << "\n";
    return 0;
  }

  try {
    Json config = config_path.empty() ? Json::object() : io::parse_file(config_path);
    if (!config.is_object()) throw io::SchemaError("the config must be a JSON object");
    io::ObjectReader reader(config, "config");
    cli::Context ctx;
    ctx.command = command;
    if (reader.has("seed")) ctx.seed = reader.get<std::uint64_t>("seed");
    if (seed) ctx.seed = seed;

    cli::Result res = leaf->cmd.run(ctx, reader);
    reader.finish();

    std::string text;
    if (format == "csv") {
      text = to_csv(res);
    } else {
      Json report{{"tool", "knightian"},
                  {"version", KNIGHTIAN_VERSION},
                  {"machine", toyvm::kMachineVersion},
                  {"command", command}};
      report["seed"] = ctx.seed ? Json(*ctx.seed) : Json(nullptr);
      report["config"] = config;
      report["result"] = res.body;
      text = report.dump(2) + "\n";
    }
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw ValidationError("BadOutput", "cannot write '" + out_path + "'");
      f << text;
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == "UnknownKey" || e.kind() == "SchemaError" || e.kind() == "MissingSeed") {
      std::cerr << command << " config: " << leaf->cmd.schema << "\n";
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
