#pragma once

#include <fstream>
#include <string>

#include "json.hpp"

namespace testing {

inline std::string fixture(const std::string& name) { return std::string(SBMT_FIXTURES_DIR) + "/" + name; }

inline const nlohmann::json& oracle() {
  static const nlohmann::json j = [] {
    std::ifstream in(SBMT_ORACLE_JSON);
    return nlohmann::json::parse(in);
  }();
  return j;
}

}  // namespace testing
