#include "weave/html.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

namespace weave {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view base_css = R"(body { margin: 0; font-family: var(--font); color: #222; background: #fff; line-height: 1.5; }
a { color: var(--accent); }
h1, h2, h3, h4, h5, h6 { font-family: var(--heading-font); color: var(--heading); }
.container { max-width: 50em; margin: 0 auto; padding: 1em 2em; }
.title-block .title { margin-bottom: 0.2em; }
.title-block .author, .title-block .date { margin: 0.2em 0; color: #555; }
#TOC { border: 1px solid #ddd; border-radius: 4px; padding: 0.5em 1em; margin: 1em 0; }
pre { background: #f7f7f7; border: 1px solid #ddd; border-radius: 4px; padding: 0.6em; overflow-x: auto; }
pre.chunk-output { background: #fff; }
.output-message { color: #31708f; }
.output-warning { color: #8a6d3b; }
.output-error { color: #a94442; }
table { border-collapse: collapse; margin: 1em 0; }
th, td { padding: 0.2em 0.8em; border-bottom: 1px solid #ddd; }
blockquote { margin: 1em 0; padding: 0 1em; border-left: 4px solid #ddd; color: #555; }
figure.chunk-figure { margin: 1em 0; }
hr.appendix { margin-top: 3em; }
.references p { padding-left: 2em; text-indent: -2em; }
)";

constexpr std::string_view slides_css = R"(body.slides { margin: 0; background: #e5e5e5; overflow: hidden; }
section.slide { display: none; box-sizing: border-box; position: absolute; top: 50%; left: 50%; width: 900px; height: 700px; margin: -350px 0 0 -450px; padding: 40px 60px; background: #fff; border-radius: 6px; font-size: var(--text-size); opacity: 0; transition: opacity var(--transition) ease-in-out; }
body.widescreen section.slide { width: 1100px; height: 620px; margin: -310px 0 0 -550px; }
section.slide.current { display: block; opacity: 1; }
section.slide ul { list-style-type: var(--bullet); }
section.slide.flexbox.current { display: flex; flex-direction: column; }
section.slide.vcenter { justify-content: center; }
section.slide.flexbox.vcenter > * { text-align: center; }
section.title-slide { display: none; flex-direction: column; justify-content: center; }
section.title-slide.current { display: flex; }
img.logo { max-height: 80px; }
img.slide-logo { position: absolute; left: 20px; bottom: 20px; max-height: 40px; }
.red2 { color: #a00; }
)";

struct Theme {
    std::string_view name;
    std::string_view accent;
    std::string_view heading;
    std::string_view font;
    std::string_view heading_font;
};

constexpr Theme themes[] = {
    {"default", "#0645ad", "#222", "Helvetica, Arial, sans-serif", "Helvetica, Arial, sans-serif"},
    {"cerulean", "#2fa4e7", "#317eac", "Helvetica, Arial, sans-serif", "Helvetica, Arial, sans-serif"},
    {"flatly", "#18bc9c", "#2c3e50", "Lato, Helvetica, Arial, sans-serif", "Lato, Helvetica, Arial, sans-serif"},
    {"journal", "#eb6864", "#222", "Georgia, serif", "'News Cycle', 'Arial Narrow', sans-serif"},
    {"readable", "#4582ec", "#333", "Georgia, serif", "'Raleway', Helvetica, sans-serif"},
    {"united", "#e95420", "#333", "Ubuntu, Tahoma, sans-serif", "Ubuntu, Tahoma, sans-serif"},
};

const Theme &find_theme(std::string_view name)
{
    for (const auto &t : themes)
        if (t.name == name)
            return t;
    return themes[0];
}

std::string theme_css(const OutputSpec &spec)
{
    const auto &t = find_theme(spec.theme);
    std::string css = fmt::format(":root {{ --accent: {}; --heading: {}; --font: {}; --heading-font: {};", t.accent,
                                  t.heading, t.font, t.heading_font);
    if (spec.kind == OutputKind::HtmlSlides) {
        const char *duration = spec.transition == Transition::Slower   ? "0.8s"
                               : spec.transition == Transition::Faster ? "0.2s"
                                                                       : "0.4s";
        css += fmt::format(" --transition: {}; --text-size: {}; --bullet: {};", duration,
                           spec.text_size.empty() ? "100%" : spec.text_size,
                           spec.bullet.empty() ? "disc" : spec.bullet);
    }
    css += " }\n";
    return css;
}

constexpr std::string_view mathjax = R"(<script>window.MathJax = { tex: { inlineMath: [['\\(', '\\)']], displayMath: [['\\[', '\\]']] } };</script>
<script id="MathJax-script" async src="https://cdn.jsdelivr.net/npm/mathjax@3/es5/tex-chtml.js"></script>
)";

constexpr std::string_view slide_script = R"(<script>
(function () {
  var slides = Array.prototype.slice.call(document.querySelectorAll('section.slide'));
  var current = 0;
  function show(i) {
    if (i < 0 || i >= slides.length) return;
    slides[current].classList.remove('current');
    current = i;
    slides[current].classList.add('current');
  }
  document.addEventListener('keydown', function (e) {
    if (e.key === 'ArrowRight' || e.key === 'PageDown' || e.key === ' ') show(current + 1);
    else if (e.key === 'ArrowLeft' || e.key === 'PageUp') show(current - 1);
  });
})();
</script>
)";

std::string pixels(double inches)
{
    return fmt::format("{}", static_cast<long long>(std::lround(inches * 96)));
}

const char *align_style(Align a)
{
    switch (a) {
    case Align::Left: return " style=\"text-align: left;\"";
    case Align::Right: return " style=\"text-align: right;\"";
    case Align::Center: return " style=\"text-align: center;\"";
    case Align::Default: break;
    }
    return "";
}

std::string class_attr(const std::vector<std::string> &classes)
{
    if (classes.empty())
        return {};
    std::string joined;
    for (const auto &c : classes) {
        if (!joined.empty())
            joined += ' ';
        joined += c;
    }
    return " class=\"" + escape_attr(joined) + "\"";
}

class HtmlWriter {
public:
    HtmlWriter(const RenderConfig &cfg, AnchorSet &anchors) : cfg_(cfg), anchors_(anchors) {}

    std::string blocks(const Blocks &bs)
    {
        std::string out;
        for (const auto &b : bs) {
            out += block(b);
            out += '\n';
        }
        return out;
    }

    std::string block(const Block &b)
    {
        return std::visit(
            overloaded{
                [&](const Heading &h) { return heading(h, true); },
                [&](const Paragraph &p) { return "<p>" + inlines(p.content) + "</p>"; },
                [&](const BulletList &l) { return list("ul", l.items); },
                [&](const OrderedList &l) { return list("ol", l.items); },
                [&](const BlockQuote &q) { return "<blockquote>\n" + blocks(q.blocks) + "</blockquote>"; },
                [&](const FencedCode &c) { return "<pre class=\"fixed\"><code>" + escape_html(c.text) + "</code></pre>"; },
                [&](const CodeChunk &c) { return "<pre class=\"chunk-source\"><code>" + escape_html(c.code) + "</code></pre>"; },
                [&](const Table &t) { return table(t); },
                [&](const RawHtml &r) { return r.text; },
                [&](const EchoedCode &c) {
                    return fmt::format("<pre class=\"chunk-source\"><code class=\"language-{}\">{}</code></pre>",
                                       escape_attr(c.lang), escape_html(c.text));
                },
                [&](const OutputBlock &o) { return output(o); },
                [&](const FigureBlock &f) {
                    return fmt::format(
                        "<figure class=\"chunk-figure\"><img src=\"{}\" width=\"{}\" height=\"{}\" alt=\"\"></figure>",
                        escape_attr(cfg_.figure_prefix + f.figure.path), pixels(f.width), pixels(f.height));
                },
                [&](const TableBlock &t) { return structured_table(t.table); },
                [&](const AppendixMarker &) { return std::string("<hr class=\"appendix\">"); },
                [&](const ReferenceList &r) {
                    std::string out = "<div class=\"references\">\n";
                    for (const auto &e : r.entries)
                        out += fmt::format("<p id=\"ref-{}\">{}</p>\n", escape_attr(e.key), escape_html(e.text));
                    return out + "</div>";
                },
            },
            b.node);
    }

    std::string heading(const Heading &h, bool with_classes)
    {
        return fmt::format("<h{0} id=\"{1}\"{2}>{3}</h{0}>", h.level, escape_attr(anchors_.claim(plain_text(h.content))),
                           with_classes ? class_attr(h.attrs) : "", inlines(h.content));
    }

    std::string inlines(const Inlines &nodes)
    {
        std::string out;
        for (const auto &n : nodes)
            out += inline_node(n);
        return out;
    }

private:
    std::string inline_node(const Inline &n)
    {
        return std::visit(
            overloaded{
                [&](const Text &t) { return escape_html(t.text); },
                [&](const Emph &e) { return "<em>" + inlines(e.children) + "</em>"; },
                [&](const Strong &e) { return "<strong>" + inlines(e.children) + "</strong>"; },
                [&](const Superscript &e) { return "<sup>" + inlines(e.children) + "</sup>"; },
                [&](const Subscript &e) { return "<sub>" + inlines(e.children) + "</sub>"; },
                [&](const Strikeout &e) { return "<del>" + inlines(e.children) + "</del>"; },
                [&](const Link &l) { return "<a href=\"" + escape_attr(l.url) + "\">" + inlines(l.children) + "</a>"; },
                [&](const Image &i) {
                    return "<img src=\"" + escape_attr(i.source) + "\" alt=\"" + escape_attr(i.alt) + "\">";
                },
                [&](const CodeLiteral &c) { return "<code>" + escape_html(c.text) + "</code>"; },
                [&](const InlineEval &e) { return "<code>" + escape_html(e.lang + " " + e.expr) + "</code>"; },
                [&](const Math &m) {
                    if (m.display)
                        return "<span class=\"math display\">\\[" + escape_html(m.tex) + "\\]</span>";
                    return "<span class=\"math inline\">\\(" + escape_html(m.tex) + "\\)</span>";
                },
                [&](const Citation &c) { return escape_html("[@" + c.key + "]"); },
                [&](const RawInline &r) { return r.html; },
            },
            n.node);
    }

    std::string list(const char *tag, const std::vector<Blocks> &items)
    {
        std::string out = fmt::format("<{}>\n", tag);
        for (const auto &item : items) {
            out += "<li>";
            for (std::size_t i = 0; i < item.size(); ++i) {
                if (i == 0 && item[i].is<Paragraph>()) {
                    out += inlines(item[i].as<Paragraph>().content);
                } else {
                    out += '\n';
                    out += block(item[i]);
                }
            }
            if (item.size() > 1 || (!item.empty() && !item[0].is<Paragraph>()))
                out += '\n';
            out += "</li>\n";
        }
        return out + fmt::format("</{}>", tag);
    }

    std::string table(const Table &t)
    {
        auto align = [&](std::size_t col) { return col < t.aligns.size() ? align_style(t.aligns[col]) : ""; };
        std::string out = "<table>\n";
        if (!t.header.empty()) {
            out += "<thead>\n<tr>";
            for (std::size_t c = 0; c < t.header.size(); ++c)
                out += fmt::format("<th{}>{}</th>", align(c), inlines(t.header[c]));
            out += "</tr>\n</thead>\n";
        }
        out += "<tbody>\n";
        for (const auto &row : t.rows) {
            out += "<tr>";
            for (std::size_t c = 0; c < row.size(); ++c)
                out += fmt::format("<td{}>{}</td>", align(c), inlines(row[c]));
            out += "</tr>\n";
        }
        return out + "</tbody>\n</table>";
    }

    std::string structured_table(const StructuredTable &t)
    {
        std::string out = "<table class=\"chunk-table\">\n<thead>\n<tr>";
        for (const auto &h : t.header)
            out += "<th>" + escape_html(h) + "</th>";
        out += "</tr>\n</thead>\n<tbody>\n";
        for (const auto &row : t.rows) {
            out += "<tr>";
            for (const auto &cell : row)
                out += "<td>" + escape_html(cell) + "</td>";
            out += "</tr>\n";
        }
        return out + "</tbody>\n</table>";
    }

    std::string output(const OutputBlock &o)
    {
        std::string out = "<pre class=\"chunk-output\"><code>";
        for (std::size_t i = 0; i < o.segments.size(); ++i) {
            if (i)
                out += '\n';
            out += fmt::format("<span class=\"output-{}\">{}</span>", stream_name(o.segments[i].stream),
                               escape_html(o.segments[i].text));
        }
        return out + "</code></pre>";
    }

    const RenderConfig &cfg_;
    AnchorSet &anchors_;
};

struct TocEntry {
    int level;
    std::string id;
    std::string text;
};

std::string toc_list(const std::vector<TocEntry> &entries, std::size_t &i, int parent_level)
{
    std::string out = "<ul>\n";
    while (i < entries.size() && entries[i].level > parent_level) {
        const auto &e = entries[i++];
        out += fmt::format("<li><a href=\"#{}\">{}</a>", escape_attr(e.id), escape_html(e.text));
        if (i < entries.size() && entries[i].level > e.level)
            out += "\n" + toc_list(entries, i, e.level);
        out += "</li>\n";
    }
    return out + "</ul>\n";
}

// Claims anchors in the same order as HtmlWriter so ids agree; only
// top-level headings are listed.
void collect_toc(const Blocks &blocks, AnchorSet &anchors, std::vector<TocEntry> &out, bool top = true)
{
    for (const auto &b : blocks) {
        if (b.is<Heading>()) {
            const auto &h = b.as<Heading>();
            auto text = plain_text(h.content);
            auto id = anchors.claim(text);
            if (top && h.level <= 3)
                out.push_back({h.level, std::move(id), std::move(text)});
        } else if (b.is<BulletList>()) {
            for (const auto &item : b.as<BulletList>().items)
                collect_toc(item, anchors, out, false);
        } else if (b.is<OrderedList>()) {
            for (const auto &item : b.as<OrderedList>().items)
                collect_toc(item, anchors, out, false);
        } else if (b.is<BlockQuote>()) {
            collect_toc(b.as<BlockQuote>().blocks, anchors, out, false);
        }
    }
}

std::string head(const RenderConfig &cfg, bool math, std::string_view extra_css, bool viewport)
{
    std::string out = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
                      "<meta name=\"generator\" content=\"weave\">\n";
    if (viewport)
        out += "<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n";
    out += fmt::format("<title>{}</title>\n", escape_html(cfg.title.value_or(cfg.fallback_title)));
    out += "<style>\n";
    out += base_css;
    out += extra_css;
    out += theme_css(cfg.spec);
    out += "</style>\n";
    if (math)
        out += mathjax;
    out += "</head>\n";
    return out;
}

std::string title_lines(const RenderConfig &cfg)
{
    std::string out;
    if (cfg.title)
        out += fmt::format("<h1 class=\"title\">{}</h1>\n", escape_html(*cfg.title));
    if (cfg.author)
        out += fmt::format("<p class=\"author\">{}</p>\n", escape_html(*cfg.author));
    if (cfg.date)
        out += fmt::format("<p class=\"date\">{}</p>\n", escape_html(*cfg.date));
    return out;
}

bool inlines_have_math(const Inlines &nodes)
{
    for (const auto &n : nodes) {
        bool found = std::visit(overloaded{
                                    [](const Math &) { return true; },
                                    [](const Emph &e) { return inlines_have_math(e.children); },
                                    [](const Strong &e) { return inlines_have_math(e.children); },
                                    [](const Superscript &e) { return inlines_have_math(e.children); },
                                    [](const Subscript &e) { return inlines_have_math(e.children); },
                                    [](const Strikeout &e) { return inlines_have_math(e.children); },
                                    [](const Link &l) { return inlines_have_math(l.children); },
                                    [](const auto &) { return false; },
                                },
                                n.node);
        if (found)
            return true;
    }
    return false;
}

void write_file(const fs::path &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out)
        out << content;
    if (!out)
        throw Error(ErrorKind::IoError, fmt::format("cannot write '{}'", path.string()));
}

void copy_into(const fs::path &from, const fs::path &to)
{
    std::error_code ec;
    fs::create_directories(to.parent_path(), ec);
    if (!ec)
        fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
    if (ec)
        throw Error(ErrorKind::IoError, fmt::format("cannot copy '{}' to '{}': {}", from.string(), to.string(),
                                                    ec.message()));
}

void collect_figures(const Blocks &blocks, std::vector<std::string> &out)
{
    for (const auto &b : blocks) {
        if (b.is<FigureBlock>())
            out.push_back(b.as<FigureBlock>().figure.path);
        else if (b.is<BulletList>())
            for (const auto &item : b.as<BulletList>().items)
                collect_figures(item, out);
        else if (b.is<OrderedList>())
            for (const auto &item : b.as<OrderedList>().items)
                collect_figures(item, out);
        else if (b.is<BlockQuote>())
            collect_figures(b.as<BlockQuote>().blocks, out);
    }
}

}  // namespace

RenderConfig RenderConfig::from(const FrontMatter &front, const OutputSpec &spec, std::string_view stem)
{
    RenderConfig cfg;
    cfg.spec = spec;
    cfg.title = front.title;
    cfg.author = front.author;
    cfg.date = front.date;
    cfg.logo = front.logo;
    cfg.figure_prefix = fmt::format("{}_files/", stem);
    cfg.fallback_title = std::string(stem);
    return cfg;
}

std::string escape_html(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string escape_attr(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string anchor_base(std::string_view text)
{
    std::string out;
    bool dash = false;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c >= 0x80) {
            if (dash && !out.empty())
                out += '-';
            dash = false;
            out += static_cast<char>(std::tolower(c));
        } else if (std::isspace(c) || c == '-' || c == '_') {
            dash = true;
        }
    }
    return out.empty() ? "section" : out;
}

std::string AnchorSet::claim(std::string_view heading_text)
{
    const auto base = anchor_base(heading_text);
    auto candidate = base;
    for (int n = 1; used_.count(candidate); ++n)
        candidate = fmt::format("{}-{}", base, n);
    used_.insert(candidate);
    return candidate;
}

std::string render_blocks(const Blocks &blocks, const RenderConfig &cfg)
{
    AnchorSet anchors;
    return HtmlWriter(cfg, anchors).blocks(blocks);
}

bool contains_math(const Blocks &blocks)
{
    for (const auto &b : blocks) {
        bool found = std::visit(overloaded{
                                    [](const Heading &h) { return inlines_have_math(h.content); },
                                    [](const Paragraph &p) { return inlines_have_math(p.content); },
                                    [](const BulletList &l) {
                                        for (const auto &item : l.items)
                                            if (contains_math(item))
                                                return true;
                                        return false;
                                    },
                                    [](const OrderedList &l) {
                                        for (const auto &item : l.items)
                                            if (contains_math(item))
                                                return true;
                                        return false;
                                    },
                                    [](const BlockQuote &q) { return contains_math(q.blocks); },
                                    [](const Table &t) {
                                        for (const auto &cell : t.header)
                                            if (inlines_have_math(cell))
                                                return true;
                                        for (const auto &row : t.rows)
                                            for (const auto &cell : row)
                                                if (inlines_have_math(cell))
                                                    return true;
                                        return false;
                                    },
                                    [](const auto &) { return false; },
                                },
                                b.node);
        if (found)
            return true;
    }
    return false;
}

std::string render_document(const WovenDocument &doc, const RenderConfig &cfg)
{
    std::string out = head(cfg, contains_math(doc.blocks), "", false);
    out += fmt::format("<body class=\"theme-{}\">\n<div class=\"container\">\n", escape_attr(cfg.spec.theme));
    if (cfg.title || cfg.author || cfg.date)
        out += "<header class=\"title-block\">\n" + title_lines(cfg) + "</header>\n";
    if (cfg.spec.toc) {
        AnchorSet toc_anchors;
        std::vector<TocEntry> entries;
        collect_toc(doc.blocks, toc_anchors, entries);
        if (!entries.empty()) {
            std::size_t i = 0;
            out += "<nav id=\"TOC\">\n";
            while (i < entries.size())
                out += toc_list(entries, i, 0);
            out += "</nav>\n";
        }
    }
    out += "<main>\n" + render_blocks(doc.blocks, cfg) + "</main>\n</div>\n</body>\n</html>\n";
    return out;
}

std::vector<Slide> split_slides(const Blocks &blocks)
{
    std::vector<Slide> slides;
    bool any_heading = false;
    for (const auto &b : blocks) {
        if (b.is<Heading>() && b.as<Heading>().level == 2) {
            any_heading = true;
            slides.push_back(Slide{{}, b.as<Heading>().attrs, {}});
        } else if (slides.empty()) {
            slides.emplace_back();
        }
        slides.back().blocks.push_back(b);
    }
    if (!any_heading)
        throw Error(ErrorKind::NoSlides, "slides output needs at least one level-2 (##) heading");
    return slides;
}

std::string render_slides(const WovenDocument &doc, const RenderConfig &cfg)
{
    auto slides = split_slides(doc.blocks);
    std::string body_class = "slides theme-" + cfg.spec.theme + (cfg.spec.widescreen ? " widescreen" : "");
    std::string out = head(cfg, contains_math(doc.blocks), slides_css, true);
    out += fmt::format("<body class=\"{}\">\n", escape_attr(body_class));

    std::string logo;
    if (cfg.logo)
        logo = fmt::format("<img class=\"logo slide-logo\" src=\"{}\" alt=\"logo\">\n", escape_attr(*cfg.logo));

    out += "<section class=\"slide title-slide current\" id=\"title-slide\">\n" + title_lines(cfg);
    if (cfg.logo)
        out += fmt::format("<img class=\"logo\" src=\"{}\" alt=\"logo\">\n", escape_attr(*cfg.logo));
    out += "</section>\n";

    AnchorSet anchors;
    HtmlWriter writer(cfg, anchors);
    int untitled = 0;
    for (const auto &slide : slides) {
        std::vector<std::string> classes{"slide"};
        classes.insert(classes.end(), slide.classes.begin(), slide.classes.end());
        std::string content;
        std::string id;
        for (std::size_t i = 0; i < slide.blocks.size(); ++i) {
            const auto &b = slide.blocks[i];
            if (i == 0 && b.is<Heading>() && b.as<Heading>().level == 2) {
                const auto &h = b.as<Heading>();
                id = anchors.claim(plain_text(h.content));
                content += fmt::format("<h2>{}</h2>\n", writer.inlines(h.content));
            } else {
                content += writer.block(b) + "\n";
            }
        }
        if (id.empty())
            id = anchors.claim(fmt::format("slide {}", ++untitled));
        out += fmt::format("<section{} id=\"{}\">\n", class_attr(classes), escape_attr(id));
        out += content + logo + "</section>\n";
    }
    out += slide_script;
    out += "</body>\n</html>\n";
    return out;
}

std::vector<fs::path> write_outputs(const WovenDocument &doc, const OutputRequest &request)
{
    std::error_code ec;
    fs::create_directories(request.out_dir, ec);
    if (ec)
        throw Error(ErrorKind::IoError,
                    fmt::format("cannot create output directory '{}': {}", request.out_dir.string(), ec.message()));

    const fs::path files_dir = request.out_dir / (request.stem + "_files");
    std::vector<std::string> figures;
    collect_figures(doc.blocks, figures);
    for (const auto &rel : figures)
        copy_into(request.figure_dir / rel, files_dir / rel);

    std::optional<std::string> logo_src;
    if (doc.front.logo) {
        fs::path logo = *doc.front.logo;
        fs::path source = logo.is_absolute() ? logo : request.source_dir / logo;
        if (fs::is_regular_file(source, ec)) {
            copy_into(source, files_dir / logo.filename());
            logo_src = request.stem + "_files/" + logo.filename().string();
        } else {
            logo_src = *doc.front.logo;
        }
    }

    std::vector<fs::path> written;
    for (const auto &spec : request.specs) {
        auto cfg = RenderConfig::from(doc.front, spec, request.stem);
        cfg.logo = logo_src;
        if (spec.kind == OutputKind::HtmlDocument) {
            auto path = request.out_dir / (request.stem + ".html");
            write_file(path, render_document(doc, cfg));
            written.push_back(path);
        } else {
            auto path = request.out_dir / (request.stem + "-slides.html");
            write_file(path, render_slides(doc, cfg));
            written.push_back(path);
        }
    }
    return written;
}

}  // namespace weave
