#pragma once

#include "weave/ast.hpp"
#include "weave/markdown.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace weave {

enum class ResultsMode { Markup, Hide };

/// Chunk options as written; unset fields fall through to lower layers.
struct ChunkOptionSet {
    std::optional<bool> echo;
    std::optional<bool> include;
    std::optional<bool> message;
    std::optional<bool> warning;
    std::optional<bool> error;
    std::optional<ResultsMode> results;
    std::optional<double> fig_width;
    std::optional<double> fig_height;
    std::optional<bool> defer_output;

    /// Keys of `over` that are set win.
    ChunkOptionSet overlay(const ChunkOptionSet &over) const;

    bool operator==(const ChunkOptionSet &) const = default;
};

/// Effective options of one chunk.
struct ChunkOptions {
    std::string lang;
    std::optional<std::string> name;
    bool echo = true;
    bool include = true;
    bool message = true;
    bool warning = true;
    bool error = false;
    ResultsMode results = ResultsMode::Markup;
    double fig_width = 7.0;
    double fig_height = 5.0;
    bool defer_output = false;

    ChunkOptions with(const ChunkOptionSet &set) const;

    bool operator==(const ChunkOptions &) const = default;
};

/// Parsed `{lang name, key=value, ...}` header.
struct ChunkHeader {
    std::string lang;
    std::optional<std::string> name;
    ChunkOptionSet options;
    bool globals = false;   // `globals=TRUE`: options become the new global layer
    int line = 0;

    bool operator==(const ChunkHeader &) const = default;
};

/// A global option layer and the chunk that declared it.
struct GlobalOptions {
    int chunk_index = 0;
    ChunkOptionSet options;
};

/// Parses the text inside a chunk fence's braces. Throws UnknownOption,
/// BadValue or DuplicateKey at `line`.
ChunkHeader parse_chunk_header(std::string_view header, int line = 0);

/// Global directives declared by `globals=TRUE` chunks, in order.
std::vector<GlobalOptions> global_directives(const std::vector<ChunkHeader> &chunks);

/// Effective options per chunk: defaults, then the global layer in force at
/// that chunk, then the chunk's own options. Later directives override
/// earlier ones key by key.
std::vector<ChunkOptions> apply_global_options(const std::vector<ChunkHeader> &chunks,
                                               const std::vector<GlobalOptions> &directives,
                                               const ChunkOptions &defaults = {});

/// Throws DuplicateChunkName or UnknownLanguage.
void validate_chunks(const std::vector<ChunkHeader> &chunks, const LanguageSet &languages);

struct Visibility {
    bool code;
    bool output;
    bool messages;
    bool warnings;

    bool operator==(const Visibility &) const = default;
};

Visibility visibility(const ChunkOptions &opts);

/// One chunk of a document, ready to execute.
struct ChunkPlan {
    int ordinal = 0;
    int line = 0;
    std::string code;
    ChunkHeader header;
    ChunkOptions options;

    /// Chunk name, or its 1-based position when unnamed. Used for figure
    /// file names and diagnostics.
    std::string label() const;
};

/// Parses every chunk header of `doc` and resolves effective options.
/// `fig_width`/`fig_height` are the output format's figure defaults.
std::vector<ChunkPlan> plan_chunks(const SourceDocument &doc, double fig_width, double fig_height);

}  // namespace weave
