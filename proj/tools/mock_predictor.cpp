// Deterministic lookup-table predictor speaking the line-delimited JSON
// protocol on stdin/stdout. Used to exercise the co-training orchestrator
// without real models.
//
// Table file: {"<example id>": {"prefixed": [answers...], "plain": [answers...]}}
// Predict requests with a prefix answer from "prefixed", others from "plain";
// unknown ids answer with an empty list. Train requests are acknowledged.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

using json = nlohmann::json;

int main(int argc, char** argv) {
  CLI::App app{"Lookup-table mock predictor"};
  std::string table_path;
  app.add_option("--table", table_path, "answer table JSON")->required();
  CLI11_PARSE(app, argc, argv);

  json table;
  {
    std::ifstream in(table_path);
    if (!in) {
      std::cerr << "mock predictor: cannot read table: " << table_path << '\n';
      return 1;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    table = json::parse(buffer.str(), nullptr, false);
    if (table.is_discarded() || !table.is_object()) {
      std::cerr << "mock predictor: table is not a JSON object\n";
      return 1;
    }
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    const json request = json::parse(line, nullptr, false);
    if (request.is_discarded() || !request.is_object()) {
      std::cout << R"({"error":"bad request"})" << '\n' << std::flush;
      continue;
    }
    const std::string op = request.value("op", "");
    if (op == "train") {
      std::cout << R"({"ok":true})" << '\n' << std::flush;
    } else if (op == "predict") {
      const std::string id = request.value("id", "");
      const bool prefixed = request.contains("prefix") && !request["prefix"].is_null();
      json answers = json::array();
      if (table.contains(id)) {
        const json& entry = table[id];
        const char* key = prefixed ? "prefixed" : "plain";
        if (entry.contains(key) && entry[key].is_array()) answers = entry[key];
      }
      std::cout << json{{"id", id}, {"answers", answers}}.dump() << '\n' << std::flush;
    } else {
      std::cout << R"({"error":"unknown op"})" << '\n' << std::flush;
    }
  }
  return 0;
}
