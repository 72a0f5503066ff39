#include "glyphforge/resources.hpp"

#include <map>
#include <stdexcept>

namespace glyphforge::resources {

const std::map<std::string, std::string_view>& resource_table();

std::string_view get(const std::string& name) {
  const auto& table = resource_table();
  const auto it = table.find(name);
  if (it == table.end()) throw std::out_of_range("unknown resource: " + name);
  return it->second;
}

bool contains(const std::string& name) { return resource_table().count(name) != 0; }

}  // namespace glyphforge::resources
