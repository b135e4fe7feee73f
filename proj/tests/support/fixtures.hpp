#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "relplan/core/error.hpp"

namespace relplan::testsupport {

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(RELPLAN_FIXTURE_DIR) + "/" + name);
    if (!in) throw Error("missing fixture: " + name);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace relplan::testsupport
