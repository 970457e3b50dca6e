#pragma once

#include <string>
#include <variant>
#include <vector>

namespace weave {

enum class Stream { Stdout, Value, Message, Warning, Error };
enum class FigureFormat { Png, Svg };

const char *stream_name(Stream s);
const char *figure_format_name(FigureFormat f);

struct Segment {
    Stream stream = Stream::Stdout;
    std::string text;

    bool operator==(const Segment &) const = default;
};

/// A figure file written by a kernel. `path` is relative to the session's
/// figure directory; sizes are in inches.
struct FigureRef {
    std::string path;
    FigureFormat format = FigureFormat::Svg;
    double width = 0;
    double height = 0;

    bool operator==(const FigureRef &) const = default;
};

struct StructuredTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool operator==(const StructuredTable &) const = default;
};

using Artifact = std::variant<Segment, FigureRef, StructuredTable>;

enum class ChunkStatus { Ok, Error };

/// Everything one chunk produced, in kernel emission order.
struct ChunkResult {
    std::vector<Artifact> artifacts;
    ChunkStatus status = ChunkStatus::Ok;

    std::vector<Segment> segments() const;
    std::vector<FigureRef> figures() const;
    std::vector<StructuredTable> tables() const;

    /// First error segment text, or empty.
    std::string error_text() const;

    bool operator==(const ChunkResult &) const = default;
};

}  // namespace weave
