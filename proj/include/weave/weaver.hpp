#pragma once

#include "weave/ast.hpp"
#include "weave/chunks.hpp"
#include "weave/citations.hpp"
#include "weave/diagnostics.hpp"
#include "weave/result.hpp"

#include <map>
#include <string>
#include <vector>

namespace weave {

struct InlineSpan {
    int ordinal = 0;
    int line = 0;
    std::string lang;
    std::string expr;

    bool operator==(const InlineSpan &) const = default;
};

/// Every InlineEval of the document, in document order.
std::vector<InlineSpan> collect_inline_spans(const SourceDocument &doc);

/// A chunk execution or an inline evaluation, identified by its ordinal.
struct ExecStep {
    enum class Kind { Chunk, Inline };
    Kind kind;
    int ordinal;

    bool operator==(const ExecStep &) const = default;
};

/// Chunks and inline evaluations interleaved in document order.
std::vector<ExecStep> execution_order(const SourceDocument &doc);

/// Artifacts of `result` that the visibility table lets through, in order.
std::vector<Artifact> visible_artifacts(const ChunkOptions &opts, const ChunkResult &result);

struct WovenDocument {
    FrontMatter front;
    Blocks blocks;
};

struct WeaveInputs {
    const std::vector<ChunkPlan> *plans = nullptr;          // indexed by chunk ordinal
    const std::map<int, ChunkResult> *results = nullptr;    // by chunk ordinal
    const std::map<int, std::string> *inline_values = nullptr;
    CitationIndex *citations = nullptr;   // null when no bibliography is configured
};

/// Replaces chunks by echoed code and output blocks, inline evaluations by
/// their values, citations by author-year text; appends References and the
/// deferred-output Appendix. Unresolved citations are reported to `diags`.
WovenDocument weave(const SourceDocument &doc, const WeaveInputs &inputs, Diagnostics &diags);

}  // namespace weave
