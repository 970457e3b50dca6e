#include "weave/diagnostics.hpp"

#include <fmt/format.h>

namespace weave {

int exit_class(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::KernelStartFailure:
    case ErrorKind::HandshakeTimeout:
    case ErrorKind::ExecTimeout:
    case ErrorKind::KernelCrash:
    case ErrorKind::KernelProtocolError:
    case ErrorKind::ChunkError:
    case ErrorKind::InlineEvalError:
    case ErrorKind::MultilineInlineResult:
        return 2;
    case ErrorKind::IoError:
        return 3;
    default:
        return 1;
    }
}

const char *kind_name(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::UnterminatedFence: return "UnterminatedFence";
    case ErrorKind::UnknownOption: return "UnknownOption";
    case ErrorKind::BadValue: return "BadValue";
    case ErrorKind::DuplicateKey: return "DuplicateKey";
    case ErrorKind::DuplicateChunkName: return "DuplicateChunkName";
    case ErrorKind::UnknownLanguage: return "UnknownLanguage";
    case ErrorKind::BibParseError: return "BibParseError";
    case ErrorKind::DuplicateBibKey: return "DuplicateBibKey";
    case ErrorKind::UnresolvedCitation: return "UnresolvedCitation";
    case ErrorKind::UnknownHeaderKey: return "UnknownHeaderKey";
    case ErrorKind::NoSlides: return "NoSlides";
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::KernelStartFailure: return "KernelStartFailure";
    case ErrorKind::HandshakeTimeout: return "HandshakeTimeout";
    case ErrorKind::ExecTimeout: return "ExecTimeout";
    case ErrorKind::KernelCrash: return "KernelCrash";
    case ErrorKind::KernelProtocolError: return "KernelProtocolError";
    case ErrorKind::ChunkError: return "ChunkError";
    case ErrorKind::InlineEvalError: return "InlineEvalError";
    case ErrorKind::MultilineInlineResult: return "MultilineInlineResult";
    case ErrorKind::IoError: return "IoError";
    }
    return "Error";
}

Error::Error(ErrorKind kind, std::string message, int line)
    : std::runtime_error(message), kind_(kind), message_(std::move(message))
{
    location_.line = line;
}

Error &Error::at_line(int line)
{
    location_.line = line;
    return *this;
}

Error &Error::in_file(std::string file)
{
    location_.file = std::move(file);
    return *this;
}

Error &Error::in_chunk(std::string chunk)
{
    location_.chunk = std::move(chunk);
    return *this;
}

std::string Error::describe() const
{
    std::string out;
    if (!location_.file.empty())
        out += location_.file + ":";
    if (location_.line > 0)
        out += fmt::format("{}:", location_.line);
    if (!out.empty())
        out += " ";
    out += "error: ";
    if (!location_.chunk.empty())
        out += fmt::format("in chunk '{}': ", location_.chunk);
    out += message_;
    return out;
}

void Diagnostics::warn(int line, std::string message, std::optional<ErrorKind> upgrade)
{
    warnings_.push_back({line, std::move(message), upgrade});
}

}  // namespace weave
