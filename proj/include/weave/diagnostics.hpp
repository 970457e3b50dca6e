#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weave {

enum class ErrorKind {
    // parse / configuration (exit class 1)
    MalformedHeader,
    UnterminatedFence,
    UnknownOption,
    BadValue,
    DuplicateKey,
    DuplicateChunkName,
    UnknownLanguage,
    BibParseError,
    DuplicateBibKey,
    UnresolvedCitation,
    UnknownHeaderKey,
    NoSlides,
    Usage,
    // execution (exit class 2)
    KernelStartFailure,
    HandshakeTimeout,
    ExecTimeout,
    KernelCrash,
    KernelProtocolError,
    ChunkError,
    InlineEvalError,
    MultilineInlineResult,
    // I/O (exit class 3)
    IoError,
};

/// Process exit code for an error kind: 1 parse/config, 2 execution, 3 I/O.
int exit_class(ErrorKind kind);

const char *kind_name(ErrorKind kind);

/// Where a diagnostic points. `line` is 1-based in the source file; 0 means
/// unknown.
struct Location {
    std::string file;
    int line = 0;
    std::string chunk;
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, int line = 0);

    ErrorKind kind() const noexcept { return kind_; }
    int line() const noexcept { return location_.line; }
    const Location &location() const noexcept { return location_; }
    const std::string &message() const noexcept { return message_; }

    Error &at_line(int line);
    Error &in_file(std::string file);
    Error &in_chunk(std::string chunk);

    /// "file:line: error: in chunk 'name': message"
    std::string describe() const;

private:
    ErrorKind kind_;
    std::string message_;
    Location location_;
};

struct Diagnostic {
    int line = 0;
    std::string message;
    std::optional<ErrorKind> upgrade;   // error kind used when running strict
};

/// Warning sink shared by one render.
class Diagnostics {
public:
    void warn(int line, std::string message, std::optional<ErrorKind> upgrade = {});
    const std::vector<Diagnostic> &warnings() const noexcept { return warnings_; }
    bool empty() const noexcept { return warnings_.empty(); }

private:
    std::vector<Diagnostic> warnings_;
};

}  // namespace weave
