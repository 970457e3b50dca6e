#pragma once

#include <string>
#include <string_view>

namespace weave::testing {

/// Checks that `html` has balanced tags (void elements excepted), that
/// every `<` opens a tag, comment or doctype, and that every `&` starts an
/// entity. Script and style bodies are skipped. Returns an empty string
/// when the document passes, otherwise a description of the first problem.
std::string check_html(std::string_view html);

}  // namespace weave::testing
