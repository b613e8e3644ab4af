#include "acid/presets.hpp"

#include "acid/parse.hpp"

namespace acid {

namespace {

const char* kAgRules =
    "rule ?x + 0 -> ?x\n"
    "rule ?x + i(?x) -> 0\n"
    "rule i(?x + ?y) -> i(?y) + i(?x)\n"
    "rule i(i(?x)) -> ?x\n"
    "rule i(0) -> 0\n";

const char* kCtors =
    "ctor pub/1\n"
    "ctor sign/2\n"
    "ctor blind/2\n"
    "ctor enc/2\n"
    "ctor pair/2\n";

}  // namespace

Theory preset_theory(const std::string& name) {
  std::string text;
  if (name == "ag") {
    text = std::string("theory ag\nac + inverse i neutral 0\n") + kAgRules;
  } else if (name == "pure-ac") {
    text = "theory pure_ac\nac +\n";
  } else if (name == "ag+blind") {
    text = std::string("theory ag_blind\nac + inverse i neutral 0\n") +
           kCtors + kAgRules;
  } else {
    throw Error("unknown preset theory: " + name +
                " (expected ag, pure-ac, or ag+blind)");
  }
  return parse_theory(text);
}

std::vector<std::string> preset_names() { return {"ag", "pure-ac", "ag+blind"}; }

}  // namespace acid
