#pragma once

#include <string>
#include <string_view>

namespace glyphforge::resources {

// Files compiled into the library: prompts/<name>.txt, fonts/<id>.bdf and
// latex_table.tsv. Throws std::out_of_range for unknown names.
std::string_view get(const std::string& name);
bool contains(const std::string& name);

}  // namespace glyphforge::resources
