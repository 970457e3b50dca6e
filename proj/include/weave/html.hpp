#pragma once

#include "weave/weaver.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace weave {

struct RenderConfig {
    OutputSpec spec;   // spec.kind selects document or slides
    std::optional<std::string> title;
    std::optional<std::string> author;
    std::optional<std::string> date;
    std::optional<std::string> logo;   // image source as referenced from the HTML
    std::string figure_prefix;         // prepended to figure paths, e.g. "report_files/"
    std::string fallback_title = "Untitled";

    static RenderConfig from(const FrontMatter &front, const OutputSpec &spec, std::string_view stem);
};

std::string escape_html(std::string_view text);
std::string escape_attr(std::string_view text);

/// Lowercased, hyphenated id; returns "section" for text with no usable
/// characters.
std::string anchor_base(std::string_view text);

/// Assigns unique anchor ids in document order: "a", "a-1", "a-2", ...
class AnchorSet {
public:
    std::string claim(std::string_view heading_text);

private:
    std::set<std::string, std::less<>> used_;
};

/// HTML for the body blocks alone, one element per line.
std::string render_blocks(const Blocks &blocks, const RenderConfig &cfg);

/// Standalone HTML document.
std::string render_document(const WovenDocument &doc, const RenderConfig &cfg);

struct Slide {
    std::string id;
    std::vector<std::string> classes;
    Blocks blocks;   // starts with the slide's level-2 heading, if any
};

/// Splits at level-2 headings. Blocks before the first one form an untitled
/// slide. Throws NoSlides when there is no level-2 heading.
std::vector<Slide> split_slides(const Blocks &blocks);

/// Standalone HTML slideshow: a title slide then one section per slide.
std::string render_slides(const WovenDocument &doc, const RenderConfig &cfg);

bool contains_math(const Blocks &blocks);

struct OutputRequest {
    std::filesystem::path out_dir;
    std::string stem;
    std::filesystem::path figure_dir;   // where kernels wrote figure files
    std::filesystem::path source_dir;   // base for a relative logo path
    std::vector<OutputSpec> specs;
};

/// Writes `<stem>.html` for a document spec and `<stem>-slides.html` for a
/// slides spec, and copies referenced figures (and the logo) into
/// `<stem>_files/`. Returns the HTML paths written. Throws IoError, or
/// NoSlides for a slides spec without level-2 headings.
std::vector<std::filesystem::path> write_outputs(const WovenDocument &doc, const OutputRequest &request);

}  // namespace weave
