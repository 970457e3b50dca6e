#pragma once

#include "weave/chunks.hpp"
#include "weave/citations.hpp"
#include "weave/diagnostics.hpp"
#include "weave/kernel.hpp"
#include "weave/weaver.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace weave {

enum class FormatChoice { Header, Html, Slides, All };

using Logger = std::function<void(std::string_view)>;

struct RenderOptions {
    std::optional<std::filesystem::path> output_dir;   // defaults to the input's directory
    FormatChoice format = FormatChoice::Header;
    KernelRegistry kernels = KernelRegistry::with_builtins();
    Timeouts timeouts;
    bool strict = false;
    Logger log;   // progress lines; may be empty
};

/// A parsed and validated document, ready to execute.
struct PreparedDocument {
    SourceDocument doc;
    std::vector<ChunkPlan> plans;   // indexed by chunk ordinal
    std::vector<OutputSpec> outputs;
    std::optional<CitationIndex> citations;
    Diagnostics diagnostics;
};

/// Front matter (merged over `_header.yml` in `source_dir`), blocks, chunk
/// plans, bibliography. Throws class-1 errors, or IoError for an unreadable
/// bibliography. Under `strict`, upgradeable header warnings throw.
PreparedDocument prepare_document(std::string_view source, const std::filesystem::path &source_dir,
                                  const RenderOptions &options);

struct Execution {
    std::map<int, ChunkResult> results;          // by chunk ordinal
    std::map<int, std::string> inline_values;    // by inline ordinal
};

/// Runs chunks and inline expressions in document order, one fresh session
/// per language. Errors carry the chunk label and line. A failing chunk
/// without `error=TRUE` throws ChunkError.
Execution execute_document(const PreparedDocument &prepared, const RenderOptions &options,
                           const std::filesystem::path &figure_dir);

/// Weaves and, under `strict`, turns upgradeable warnings into errors.
WovenDocument weave_document(PreparedDocument &prepared, const Execution &execution, bool strict);

/// Throws the first warning that carries an upgrade kind.
void enforce_strict(const Diagnostics &diagnostics);

/// A directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const std::filesystem::path &path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

struct RenderOutcome {
    std::vector<std::filesystem::path> written;
    std::vector<Diagnostic> warnings;
};

/// The whole pipeline for one file. Errors are located in `input`.
RenderOutcome render_file(const std::filesystem::path &input, const RenderOptions &options);

/// Reads a text file; throws IoError.
std::string read_text_file(const std::filesystem::path &path);

}  // namespace weave
