#pragma once

#include "weave/diagnostics.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace weave {

enum class OutputKind { HtmlDocument, HtmlSlides };
enum class Transition { Default, Slower, Faster };

const char *output_kind_name(OutputKind kind);
const char *transition_name(Transition t);

/// Output options as written in a header. Unset fields fall through to the
/// layer below when headers or option layers are merged.
struct OutputOptions {
    std::optional<bool> toc;
    std::optional<std::string> theme;
    std::optional<double> fig_width;
    std::optional<double> fig_height;
    std::optional<bool> widescreen;
    std::optional<Transition> transition;
    std::optional<std::string> text_size;
    std::optional<std::string> bullet;

    /// Field-wise overlay; set fields of `over` win.
    OutputOptions overlay(const OutputOptions &over) const;
    bool empty() const;

    bool operator==(const OutputOptions &) const = default;
};

/// A fully resolved output format. Figure sizes are in inches.
struct OutputSpec {
    OutputKind kind = OutputKind::HtmlDocument;
    bool toc = false;
    std::string theme = "default";
    double fig_width = 7.0;
    double fig_height = 5.0;
    bool widescreen = false;
    Transition transition = Transition::Default;
    std::string text_size;
    std::string bullet;

    static OutputSpec resolve(OutputKind kind, const OutputOptions &options);

    bool operator==(const OutputSpec &) const = default;
};

struct OutputEntry {
    OutputKind kind = OutputKind::HtmlDocument;
    OutputOptions options;
    std::map<std::string, std::string> extra;   // uninterpreted options

    bool operator==(const OutputEntry &) const = default;
};

struct FrontMatter {
    std::optional<std::string> title;
    std::optional<std::string> author;
    std::optional<std::string> date;   // verbatim
    std::optional<std::string> bibliography;
    std::optional<std::string> logo;

    /// Output options given at the top level of the header; they apply to
    /// every output format.
    OutputOptions common;

    /// Formats listed under `output:`. Empty means "not specified".
    std::vector<OutputEntry> output_entries;

    /// Header keys this renderer does not interpret, with their raw values.
    std::map<std::string, std::string> extra;

    /// Resolved output formats; never empty (defaults to one HTML document).
    std::vector<OutputSpec> outputs() const;

    bool operator==(const FrontMatter &) const = default;
};

struct ParsedHeader {
    FrontMatter front;
    std::string body;
    int body_start_line = 1;
};

/// Splits a `---`-fenced header off the top of `source` and parses it.
/// Throws Error(MalformedHeader) with the offending line.
ParsedHeader parse_front_matter(std::string_view source);

/// Parses header lines without fences. `first_line` is the source line
/// number of the first line of `text`.
FrontMatter parse_header_text(std::string_view text, int first_line = 1);

/// Reads `_header.yml` from `directory`, if present.
std::optional<FrontMatter> load_shared_header(const std::filesystem::path &directory);

inline constexpr const char *shared_header_name = "_header.yml";

/// Field-wise merge; local values win, a local `output:` list replaces the
/// shared one entirely.
FrontMatter merge_headers(const FrontMatter &shared, const FrontMatter &local);

/// Canonical header text (no fences) that parses back to an equal value.
std::string serialize_header(const FrontMatter &front);

/// Non-fatal header findings: unknown keys and slide-only options on
/// document outputs.
void report_header_warnings(const FrontMatter &front, Diagnostics &diagnostics);

std::string normalize_newlines(std::string_view text);

}  // namespace weave
