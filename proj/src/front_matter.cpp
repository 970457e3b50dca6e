#include "weave/front_matter.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <span>
#include <sstream>

namespace weave {

namespace {

constexpr std::array known_themes = {"default", "cerulean", "flatly", "journal", "readable", "united"};

struct HeaderLine {
    int number;
    int indent;
    std::string_view text;   // without indentation and trailing blanks
};

struct Scalar {
    std::string value;
    bool quoted = false;
};

[[noreturn]] void malformed(int line, const std::string &message)
{
    throw Error(ErrorKind::MalformedHeader, message, line);
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<HeaderLine> split_lines(std::string_view text, int first_line)
{
    std::vector<HeaderLine> lines;
    int number = first_line;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        int indent = 0;
        while (static_cast<std::size_t>(indent) < raw.size() && raw[indent] == ' ')
            ++indent;
        if (static_cast<std::size_t>(indent) < raw.size() && raw[indent] == '\t')
            malformed(number, "tab characters are not allowed for indentation");
        std::string_view body = trim(raw.substr(indent));
        if (!body.empty() && body.front() != '#')
            lines.push_back({number, indent, body});
        ++number;
        if (end == text.size())
            break;
        pos = end + 1;
    }
    return lines;
}

// Strips an unquoted trailing " # comment".
std::string_view strip_comment(std::string_view s)
{
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '#' && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t'))
            return trim(s.substr(0, i));
    }
    return s;
}

Scalar parse_scalar(std::string_view raw, int line)
{
    raw = trim(raw);
    Scalar out;
    if (raw.empty())
        return out;
    if (raw.front() == '"' || raw.front() == '\'') {
        const char quote = raw.front();
        out.quoted = true;
        std::size_t i = 1;
        bool closed = false;
        while (i < raw.size()) {
            char c = raw[i];
            if (quote == '"' && c == '\\' && i + 1 < raw.size()) {
                char n = raw[i + 1];
                switch (n) {
                case 'n': out.value += '\n'; break;
                case 't': out.value += '\t'; break;
                default: out.value += n; break;
                }
                i += 2;
                continue;
            }
            if (c == quote) {
                if (quote == '\'' && i + 1 < raw.size() && raw[i + 1] == '\'') {
                    out.value += '\'';
                    i += 2;
                    continue;
                }
                closed = true;
                ++i;
                break;
            }
            out.value += c;
            ++i;
        }
        if (!closed)
            malformed(line, "unterminated quoted string");
        auto rest = trim(raw.substr(i));
        if (!rest.empty() && rest.front() != '#')
            malformed(line, "unexpected text after quoted string");
        return out;
    }
    raw = strip_comment(raw);
    if (!raw.empty() && (raw.front() == '[' || raw.front() == '{'))
        malformed(line, "expected a scalar value");
    out.value = std::string(raw);
    return out;
}

bool parse_bool(const Scalar &s, std::string_view key, int line)
{
    if (!s.quoted) {
        auto v = lower(s.value);
        if (v == "true" || v == "yes")
            return true;
        if (v == "false" || v == "no")
            return false;
    }
    malformed(line, fmt::format("'{}' expects true or false, got '{}'", key, s.value));
}

double parse_positive(const Scalar &s, std::string_view key, int line)
{
    double value = 0;
    const auto *first = s.value.data();
    const auto *last = first + s.value.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (s.quoted || s.value.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
        malformed(line, fmt::format("'{}' expects a number, got '{}'", key, s.value));
    if (value <= 0)
        malformed(line, fmt::format("'{}' must be positive, got '{}'", key, s.value));
    return value;
}

std::optional<OutputKind> kind_from_name(std::string_view name)
{
    if (name == "html_document")
        return OutputKind::HtmlDocument;
    if (name == "html_slides" || name == "ioslides_presentation")
        return OutputKind::HtmlSlides;
    return std::nullopt;
}

OutputKind parse_kind(std::string_view name, int line)
{
    if (auto kind = kind_from_name(name))
        return *kind;
    malformed(line, fmt::format("unsupported output format '{}'", name));
}

/// Applies one output option. Returns false when `key` is not an output
/// option at all.
bool apply_output_option(OutputOptions &opts, std::string_view key, const Scalar &value, int line)
{
    if (key == "toc") {
        opts.toc = parse_bool(value, key, line);
    } else if (key == "theme") {
        if (std::find(known_themes.begin(), known_themes.end(), value.value) == known_themes.end())
            malformed(line, fmt::format("unknown theme '{}'", value.value));
        opts.theme = value.value;
    } else if (key == "fig_width") {
        opts.fig_width = parse_positive(value, key, line);
    } else if (key == "fig_height") {
        opts.fig_height = parse_positive(value, key, line);
    } else if (key == "widescreen") {
        opts.widescreen = parse_bool(value, key, line);
    } else if (key == "transition") {
        if (value.value == "default")
            opts.transition = Transition::Default;
        else if (value.value == "slower")
            opts.transition = Transition::Slower;
        else if (value.value == "faster")
            opts.transition = Transition::Faster;
        else
            malformed(line, fmt::format("unknown transition '{}'", value.value));
    } else if (key == "text_size") {
        opts.text_size = value.value;
    } else if (key == "bullet") {
        opts.bullet = value.value;
    } else {
        return false;
    }
    return true;
}

std::pair<std::string_view, std::string_view> split_key(const HeaderLine &line)
{
    auto colon = line.text.find(':');
    while (colon != std::string_view::npos && colon + 1 < line.text.size() && line.text[colon + 1] != ' ')
        colon = line.text.find(':', colon + 1);
    if (colon == std::string_view::npos)
        malformed(line.number, fmt::format("expected 'key: value', got '{}'", line.text));
    auto key = trim(line.text.substr(0, colon));
    if (key.empty())
        malformed(line.number, "empty key");
    return {key, line.text.substr(colon + 1)};
}

void parse_output_block(FrontMatter &front, std::span<const HeaderLine> nested)
{
    const int entry_indent = nested.front().indent;
    std::set<OutputKind> seen;
    std::size_t i = 0;
    while (i < nested.size()) {
        const auto &line = nested[i];
        if (line.indent != entry_indent)
            malformed(line.number, "inconsistent indentation under 'output'");
        auto [name, rest] = split_key(line);
        OutputEntry entry;
        entry.kind = parse_kind(name, line.number);
        if (!seen.insert(entry.kind).second)
            malformed(line.number, fmt::format("duplicate key '{}'", name));
        std::size_t j = i + 1;
        while (j < nested.size() && nested[j].indent > entry_indent)
            ++j;
        auto value = parse_scalar(rest, line.number);
        if (j > i + 1) {
            if (!value.value.empty())
                malformed(line.number, fmt::format("'{}' has both a value and nested options", name));
            std::set<std::string, std::less<>> keys;
            const int option_indent = nested[i + 1].indent;
            for (std::size_t k = i + 1; k < j; ++k) {
                const auto &opt = nested[k];
                if (opt.indent != option_indent)
                    malformed(opt.number, "output options nest at most one level");
                auto [key, raw] = split_key(opt);
                if (!keys.insert(std::string(key)).second)
                    malformed(opt.number, fmt::format("duplicate key '{}'", key));
                auto scalar = parse_scalar(raw, opt.number);
                if (!apply_output_option(entry.options, key, scalar, opt.number))
                    entry.extra[std::string(key)] = scalar.value;
            }
        } else if (!value.value.empty() && value.value != "default") {
            malformed(line.number, fmt::format("unexpected value '{}' for output format '{}'", value.value, name));
        }
        front.output_entries.push_back(std::move(entry));
        i = j;
    }
}

void parse_output_list(FrontMatter &front, std::string_view raw, int line)
{
    raw = strip_comment(trim(raw));
    if (raw.size() < 2 || raw.back() != ']')
        malformed(line, "unterminated output list");
    raw = raw.substr(1, raw.size() - 2);
    std::set<OutputKind> seen;
    while (!raw.empty()) {
        auto comma = raw.find(',');
        auto item = trim(raw.substr(0, comma));
        auto kind = parse_kind(parse_scalar(item, line).value, line);
        if (!seen.insert(kind).second)
            malformed(line, fmt::format("duplicate output format '{}'", item));
        front.output_entries.push_back({kind, {}, {}});
        if (comma == std::string_view::npos)
            break;
        raw = raw.substr(comma + 1);
    }
    if (front.output_entries.empty())
        malformed(line, "empty output list");
}

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c; break;
        }
    }
    out += '"';
    return out;
}

void write_options(std::ostringstream &out, const OutputOptions &o, std::string_view indent)
{
    if (o.toc)
        out << indent << "toc: " << (*o.toc ? "true" : "false") << '\n';
    if (o.theme)
        out << indent << "theme: " << *o.theme << '\n';
    if (o.fig_width)
        out << indent << fmt::format("fig_width: {}\n", *o.fig_width);
    if (o.fig_height)
        out << indent << fmt::format("fig_height: {}\n", *o.fig_height);
    if (o.widescreen)
        out << indent << "widescreen: " << (*o.widescreen ? "true" : "false") << '\n';
    if (o.transition)
        out << indent << "transition: " << transition_name(*o.transition) << '\n';
    if (o.text_size)
        out << indent << "text_size: " << quote(*o.text_size) << '\n';
    if (o.bullet)
        out << indent << "bullet: " << quote(*o.bullet) << '\n';
}

template <typename T>
std::optional<T> pick(const std::optional<T> &shared, const std::optional<T> &local)
{
    return local ? local : shared;
}

}  // namespace

const char *output_kind_name(OutputKind kind)
{
    return kind == OutputKind::HtmlSlides ? "html_slides" : "html_document";
}

const char *transition_name(Transition t)
{
    switch (t) {
    case Transition::Slower: return "slower";
    case Transition::Faster: return "faster";
    default: return "default";
    }
}

OutputOptions OutputOptions::overlay(const OutputOptions &over) const
{
    OutputOptions out;
    out.toc = pick(toc, over.toc);
    out.theme = pick(theme, over.theme);
    out.fig_width = pick(fig_width, over.fig_width);
    out.fig_height = pick(fig_height, over.fig_height);
    out.widescreen = pick(widescreen, over.widescreen);
    out.transition = pick(transition, over.transition);
    out.text_size = pick(text_size, over.text_size);
    out.bullet = pick(bullet, over.bullet);
    return out;
}

bool OutputOptions::empty() const
{
    return *this == OutputOptions{};
}

OutputSpec OutputSpec::resolve(OutputKind kind, const OutputOptions &o)
{
    OutputSpec spec;
    spec.kind = kind;
    spec.toc = o.toc.value_or(spec.toc);
    spec.theme = o.theme.value_or(spec.theme);
    spec.fig_width = o.fig_width.value_or(spec.fig_width);
    spec.fig_height = o.fig_height.value_or(spec.fig_height);
    spec.widescreen = o.widescreen.value_or(spec.widescreen);
    spec.transition = o.transition.value_or(spec.transition);
    spec.text_size = o.text_size.value_or(spec.text_size);
    spec.bullet = o.bullet.value_or(spec.bullet);
    return spec;
}

std::vector<OutputSpec> FrontMatter::outputs() const
{
    std::vector<OutputSpec> specs;
    if (output_entries.empty()) {
        specs.push_back(OutputSpec::resolve(OutputKind::HtmlDocument, common));
        return specs;
    }
    for (const auto &entry : output_entries)
        specs.push_back(OutputSpec::resolve(entry.kind, common.overlay(entry.options)));
    return specs;
}

std::string normalize_newlines(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
            continue;
        out += text[i];
    }
    return out;
}

FrontMatter parse_header_text(std::string_view text, int first_line)
{
    FrontMatter front;
    auto lines = split_lines(text, first_line);
    std::set<std::string, std::less<>> seen;
    std::size_t i = 0;
    while (i < lines.size()) {
        const auto &line = lines[i];
        if (line.indent != 0)
            malformed(line.number, "unexpected indentation");
        auto [key, rest] = split_key(line);
        if (!seen.insert(std::string(key)).second)
            malformed(line.number, fmt::format("duplicate key '{}'", key));
        std::size_t j = i + 1;
        while (j < lines.size() && lines[j].indent > 0)
            ++j;
        std::span<const HeaderLine> nested(lines.data() + i + 1, j - i - 1);

        if (key == "output") {
            auto trimmed = trim(rest);
            if (!nested.empty()) {
                if (!trimmed.empty() && trimmed.front() != '#')
                    malformed(line.number, "'output' has both a value and nested formats");
                parse_output_block(front, nested);
            } else if (!trimmed.empty() && trimmed.front() == '[') {
                parse_output_list(front, trimmed, line.number);
            } else {
                auto value = parse_scalar(rest, line.number);
                if (value.value.empty())
                    malformed(line.number, "'output' needs a format");
                front.output_entries.push_back({parse_kind(value.value, line.number), {}, {}});
            }
        } else {
            if (!nested.empty())
                malformed(nested.front().number, fmt::format("expected a scalar value for '{}'", key));
            auto value = parse_scalar(rest, line.number);
            if (key == "title")
                front.title = value.value;
            else if (key == "author")
                front.author = value.value;
            else if (key == "date")
                front.date = value.value;
            else if (key == "bibliography")
                front.bibliography = value.value;
            else if (key == "logo")
                front.logo = value.value;
            else if (!apply_output_option(front.common, key, value, line.number))
                front.extra[std::string(key)] = value.value;
        }
        i = j;
    }
    return front;
}

ParsedHeader parse_front_matter(std::string_view source)
{
    std::string text = normalize_newlines(source);
    ParsedHeader parsed;

    // Locate the first non-blank line.
    std::size_t pos = 0;
    int line_no = 1;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos)
            end = text.size();
        if (!trim(std::string_view(text).substr(pos, end - pos)).empty())
            break;
        pos = end + 1;
        ++line_no;
    }
    auto first_end = text.find('\n', pos);
    std::string_view first = pos < text.size()
        ? std::string_view(text).substr(pos, (first_end == std::string::npos ? text.size() : first_end) - pos)
        : std::string_view{};
    if (trim(first) != "---") {
        parsed.body = std::move(text);
        return parsed;
    }

    const int open_line = line_no;
    std::size_t header_start = first_end == std::string::npos ? text.size() : first_end + 1;
    std::size_t cursor = header_start;
    int current = open_line + 1;
    while (cursor < text.size()) {
        auto end = text.find('\n', cursor);
        if (end == std::string::npos)
            end = text.size();
        if (trim(std::string_view(text).substr(cursor, end - cursor)) == "---") {
            parsed.front = parse_header_text(std::string_view(text).substr(header_start, cursor - header_start),
                                             open_line + 1);
            parsed.body = end < text.size() ? text.substr(end + 1) : std::string{};
            parsed.body_start_line = current + 1;
            return parsed;
        }
        cursor = end + 1;
        ++current;
    }
    malformed(open_line, "header opened with '---' is never closed");
}

std::optional<FrontMatter> load_shared_header(const std::filesystem::path &directory)
{
    auto path = directory / shared_header_name;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, fmt::format("cannot read {}", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_header_text(normalize_newlines(buffer.str()));
    } catch (Error &e) {
        e.in_file(path.string());
        throw;
    }
}

FrontMatter merge_headers(const FrontMatter &shared, const FrontMatter &local)
{
    FrontMatter out;
    out.title = pick(shared.title, local.title);
    out.author = pick(shared.author, local.author);
    out.date = pick(shared.date, local.date);
    out.bibliography = pick(shared.bibliography, local.bibliography);
    out.logo = pick(shared.logo, local.logo);
    out.common = shared.common.overlay(local.common);
    out.output_entries = local.output_entries.empty() ? shared.output_entries : local.output_entries;
    out.extra = shared.extra;
    for (const auto &[key, value] : local.extra)
        out.extra[key] = value;
    return out;
}

std::string serialize_header(const FrontMatter &front)
{
    std::ostringstream out;
    auto scalar = [&](const char *key, const std::optional<std::string> &value) {
        if (value)
            out << key << ": " << quote(*value) << '\n';
    };
    scalar("title", front.title);
    scalar("author", front.author);
    scalar("date", front.date);
    scalar("bibliography", front.bibliography);
    scalar("logo", front.logo);
    write_options(out, front.common, "");
    if (!front.output_entries.empty()) {
        out << "output:\n";
        for (const auto &entry : front.output_entries) {
            out << "  " << output_kind_name(entry.kind) << ":";
            if (entry.options.empty() && entry.extra.empty()) {
                out << " default\n";
                continue;
            }
            out << '\n';
            write_options(out, entry.options, "    ");
            for (const auto &[key, value] : entry.extra)
                out << "    " << key << ": " << quote(value) << '\n';
        }
    }
    for (const auto &[key, value] : front.extra)
        out << key << ": " << quote(value) << '\n';
    return out.str();
}

void report_header_warnings(const FrontMatter &front, Diagnostics &diagnostics)
{
    for (const auto &[key, value] : front.extra)
        diagnostics.warn(0, fmt::format("unknown header key '{}' ignored", key), ErrorKind::UnknownHeaderKey);
    bool any_slides = false;
    for (const auto &entry : front.output_entries) {
        if (entry.kind == OutputKind::HtmlSlides) {
            any_slides = true;
        } else if (entry.options.widescreen || entry.options.transition) {
            diagnostics.warn(0, "slide-only options (widescreen, transition) are ignored for html_document");
        }
        for (const auto &[key, value] : entry.extra)
            diagnostics.warn(0, fmt::format("unknown option '{}' for {} ignored", key, output_kind_name(entry.kind)),
                             ErrorKind::UnknownHeaderKey);
    }
    if (!any_slides && front.logo)
        diagnostics.warn(0, "'logo' only applies to slides and is ignored");
    if (!any_slides && (front.common.widescreen || front.common.transition))
        diagnostics.warn(0, "slide-only options (widescreen, transition) are ignored for html_document");
}

}  // namespace weave
