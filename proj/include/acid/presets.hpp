// Bundled theories selectable by name from the command line and tests.
#pragma once

#include <string>
#include <vector>

#include "acid/rewrite.hpp"

namespace acid {

// "ag" (abelian groups), "pure-ac" (one AC symbol, no rules), and "ag+blind"
// (abelian groups plus the pairing/encryption/signature/blinding
// constructors). Throws Error for unknown names.
Theory preset_theory(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace acid
