#include "weave/result.hpp"

namespace weave {

const char *stream_name(Stream s)
{
    switch (s) {
    case Stream::Stdout: return "stdout";
    case Stream::Value: return "value";
    case Stream::Message: return "message";
    case Stream::Warning: return "warning";
    case Stream::Error: return "error";
    }
    return "stdout";
}

const char *figure_format_name(FigureFormat f)
{
    return f == FigureFormat::Png ? "png" : "svg";
}

namespace {

template <typename T>
std::vector<T> collect(const std::vector<Artifact> &artifacts)
{
    std::vector<T> out;
    for (const auto &a : artifacts)
        if (const auto *p = std::get_if<T>(&a))
            out.push_back(*p);
    return out;
}

}  // namespace

std::vector<Segment> ChunkResult::segments() const { return collect<Segment>(artifacts); }
std::vector<FigureRef> ChunkResult::figures() const { return collect<FigureRef>(artifacts); }
std::vector<StructuredTable> ChunkResult::tables() const { return collect<StructuredTable>(artifacts); }

std::string ChunkResult::error_text() const
{
    for (const auto &s : segments())
        if (s.stream == Stream::Error)
            return s.text;
    return {};
}

}  // namespace weave
