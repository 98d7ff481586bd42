#pragma once

#include <string_view>

namespace dipolegate::embedded {

// Contents of the shipped data files, compiled into the library.
std::string_view presets_json();
std::string_view reference_values_json();

}  // namespace dipolegate::embedded
