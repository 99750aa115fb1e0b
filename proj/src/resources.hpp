#pragma once

#include <string_view>

// Word lists shipped under data/, compiled into the library.
namespace aspectscope::resources {

std::string_view english_stopwords();
std::string_view section_stopwords();
std::string_view abbreviations();
std::string_view questions();

}  // namespace aspectscope::resources
