#pragma once

#include "weave/ast.hpp"

#include <set>
#include <string>
#include <string_view>

namespace weave {

/// Languages whose `` `lang expr` `` spans are inline evaluations rather
/// than code literals.
using LanguageSet = std::set<std::string, std::less<>>;

/// Segments body text into blocks. Prose contexts (paragraphs, headings,
/// table cells) hold their raw text as a single Text node; parse_document
/// runs the inline parser over them. Throws Error(UnterminatedFence).
Blocks parse_blocks(std::string_view body, int start_line = 1);

/// Inline markup of one prose context. Total: malformed markup stays text.
/// `line` is the source line of the first character, used for diagnostics.
Inlines parse_inlines(std::string_view text, const LanguageSet &languages, int line = 0);

/// Front matter, blocks and inlines, with chunk and inline-eval ordinals
/// assigned in document order.
SourceDocument parse_document(std::string_view source, const LanguageSet &languages);

/// Structural tags recognized as raw HTML blocks and inline tags.
bool is_block_html_tag(std::string_view name);
bool is_inline_html_tag(std::string_view name);

}  // namespace weave
