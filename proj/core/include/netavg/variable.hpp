#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "netavg/error.hpp"

namespace netavg {

// Named categorical variable with a fixed, ordered level set.
struct Variable {
  std::string name;
  std::vector<std::string> levels;

  Variable() = default;
  Variable(std::string name_, std::vector<std::string> levels_)
      : name(std::move(name_)), levels(std::move(levels_)) {
    if (name.empty()) throw DataError("variable name must be non-empty");
    if (levels.size() < 2)
      throw DataError("variable " + name + " needs at least 2 levels, has " +
                      std::to_string(levels.size()));
    std::unordered_set<std::string> seen;
    for (const auto& level : levels)
      if (!seen.insert(level).second)
        throw DataError("variable " + name + " has duplicate level: " + level);
  }

  int cardinality() const { return static_cast<int>(levels.size()); }

  int level_index(const std::string& label) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (levels[i] == label) return static_cast<int>(i);
    return -1;
  }

  bool operator==(const Variable& other) const {
    return name == other.name && levels == other.levels;
  }
};

}  // namespace netavg
