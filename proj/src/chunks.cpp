#include "weave/chunks.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace weave {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool is_identifier(std::string_view s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

// Splits on commas outside quotes.
std::vector<std::string_view> split_commas(std::string_view s)
{
    std::vector<std::string_view> parts;
    char quote = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (quote) {
            if (c == quote)
                quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == ',') {
            parts.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    parts.push_back(trim(s.substr(start)));
    return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, int line)
{
    throw Error(ErrorKind::BadValue, fmt::format("bad value '{}' for chunk option '{}'", value, key), line);
}

bool parse_bool(std::string_view key, std::string_view value, int line)
{
    std::string v(value);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (v == "TRUE")
        return true;
    if (v == "FALSE")
        return false;
    bad_value(key, value, line);
}

double parse_real(std::string_view key, std::string_view value, int line)
{
    double out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out) || out <= 0)
        bad_value(key, value, line);
    return out;
}

std::string_view unquote(std::string_view v)
{
    if (v.size() >= 2 && (v.front() == '\'' || v.front() == '"') && v.back() == v.front())
        return v.substr(1, v.size() - 2);
    return v;
}

void set_option(ChunkHeader &h, std::string_view key, std::string_view value, int line)
{
    if (key == "echo")
        h.options.echo = parse_bool(key, value, line);
    else if (key == "include")
        h.options.include = parse_bool(key, value, line);
    else if (key == "message")
        h.options.message = parse_bool(key, value, line);
    else if (key == "warning")
        h.options.warning = parse_bool(key, value, line);
    else if (key == "error")
        h.options.error = parse_bool(key, value, line);
    else if (key == "defer_output")
        h.options.defer_output = parse_bool(key, value, line);
    else if (key == "globals")
        h.globals = parse_bool(key, value, line);
    else if (key == "fig_width")
        h.options.fig_width = parse_real(key, value, line);
    else if (key == "fig_height")
        h.options.fig_height = parse_real(key, value, line);
    else if (key == "results") {
        auto v = unquote(value);
        if (v == "markup")
            h.options.results = ResultsMode::Markup;
        else if (v == "hide")
            h.options.results = ResultsMode::Hide;
        else
            bad_value(key, value, line);
    } else {
        throw Error(ErrorKind::UnknownOption, fmt::format("unknown chunk option '{}'", key), line);
    }
}

template <typename T>
std::optional<T> pick(const std::optional<T> &under, const std::optional<T> &over)
{
    return over ? over : under;
}

}  // namespace

ChunkOptionSet ChunkOptionSet::overlay(const ChunkOptionSet &over) const
{
    ChunkOptionSet out;
    out.echo = pick(echo, over.echo);
    out.include = pick(include, over.include);
    out.message = pick(message, over.message);
    out.warning = pick(warning, over.warning);
    out.error = pick(error, over.error);
    out.results = pick(results, over.results);
    out.fig_width = pick(fig_width, over.fig_width);
    out.fig_height = pick(fig_height, over.fig_height);
    out.defer_output = pick(defer_output, over.defer_output);
    return out;
}

ChunkOptions ChunkOptions::with(const ChunkOptionSet &set) const
{
    ChunkOptions out = *this;
    out.echo = set.echo.value_or(echo);
    out.include = set.include.value_or(include);
    out.message = set.message.value_or(message);
    out.warning = set.warning.value_or(warning);
    out.error = set.error.value_or(error);
    out.results = set.results.value_or(results);
    out.fig_width = set.fig_width.value_or(fig_width);
    out.fig_height = set.fig_height.value_or(fig_height);
    out.defer_output = set.defer_output.value_or(defer_output);
    return out;
}

ChunkHeader parse_chunk_header(std::string_view header, int line)
{
    ChunkHeader h;
    h.line = line;
    auto parts = split_commas(trim(header));
    std::set<std::string, std::less<>> seen;

    auto key_value = [&](std::string_view part) {
        auto eq = part.find('=');
        std::string key(trim(part.substr(0, eq)));
        std::replace(key.begin(), key.end(), '.', '_');
        auto value = trim(part.substr(eq + 1));
        if (key.empty())
            bad_value(key, value, line);
        if (!seen.insert(key).second)
            throw Error(ErrorKind::DuplicateKey, fmt::format("chunk option '{}' given twice", key), line);
        set_option(h, key, value, line);
    };

    // First segment: `lang [name]` or `lang key=value`.
    auto first = parts.front();
    auto space = first.find_first_of(" \t");
    auto lang = first.substr(0, space);
    if (!is_identifier(lang))
        throw Error(ErrorKind::BadValue, fmt::format("chunk header '{}' does not start with a language", header), line);
    h.lang = std::string(lang);
    if (space != std::string_view::npos) {
        auto rest = trim(first.substr(space));
        if (rest.find('=') != std::string_view::npos) {
            key_value(rest);
        } else if (is_identifier(rest)) {
            h.name = std::string(rest);
        } else {
            throw Error(ErrorKind::BadValue, fmt::format("bad chunk name '{}'", rest), line);
        }
    }

    for (std::size_t i = 1; i < parts.size(); ++i) {
        auto part = parts[i];
        if (part.empty())
            throw Error(ErrorKind::BadValue, "empty chunk option", line);
        if (part.find('=') == std::string_view::npos) {
            if (i == 1 && !h.name && seen.empty() && is_identifier(part)) {
                h.name = std::string(part);
                continue;
            }
            throw Error(ErrorKind::BadValue, fmt::format("expected key=value, got '{}'", part), line);
        }
        key_value(part);
    }
    return h;
}

std::vector<GlobalOptions> global_directives(const std::vector<ChunkHeader> &chunks)
{
    std::vector<GlobalOptions> out;
    for (std::size_t i = 0; i < chunks.size(); ++i)
        if (chunks[i].globals)
            out.push_back({static_cast<int>(i), chunks[i].options});
    return out;
}

std::vector<ChunkOptions> apply_global_options(const std::vector<ChunkHeader> &chunks,
                                               const std::vector<GlobalOptions> &directives,
                                               const ChunkOptions &defaults)
{
    std::vector<ChunkOptions> out;
    out.reserve(chunks.size());
    ChunkOptionSet global;
    std::size_t next = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        while (next < directives.size() && directives[next].chunk_index <= static_cast<int>(i))
            global = global.overlay(directives[next++].options);
        ChunkOptions opts = defaults.with(global).with(chunks[i].options);
        opts.lang = chunks[i].lang;
        opts.name = chunks[i].name;
        out.push_back(std::move(opts));
    }
    return out;
}

void validate_chunks(const std::vector<ChunkHeader> &chunks, const LanguageSet &languages)
{
    std::map<std::string, int, std::less<>> names;
    for (const auto &c : chunks) {
        if (c.name) {
            auto [it, inserted] = names.emplace(*c.name, c.line);
            if (!inserted)
                throw Error(ErrorKind::DuplicateChunkName,
                            fmt::format("chunk name '{}' is used on line {} and line {}", *c.name, it->second, c.line),
                            c.line);
        }
        if (!languages.count(c.lang))
            throw Error(ErrorKind::UnknownLanguage, fmt::format("no kernel registered for language '{}'", c.lang),
                        c.line);
    }
}

Visibility visibility(const ChunkOptions &o)
{
    Visibility v;
    v.code = o.include && o.echo;
    v.output = o.include && o.results == ResultsMode::Markup;
    v.messages = v.output && o.message;
    v.warnings = v.output && o.warning;
    return v;
}

std::string ChunkPlan::label() const
{
    return header.name ? *header.name : std::to_string(ordinal + 1);
}

std::vector<ChunkPlan> plan_chunks(const SourceDocument &doc, double fig_width, double fig_height)
{
    std::vector<ChunkPlan> plans;
    auto visit = [&](auto &&self, const Blocks &blocks) -> void {
        for (const auto &b : blocks) {
            if (b.is<CodeChunk>()) {
                const auto &c = b.as<CodeChunk>();
                ChunkPlan plan;
                plan.ordinal = c.ordinal;
                plan.line = b.line;
                plan.code = c.code;
                plan.header = parse_chunk_header(c.options_raw, b.line);
                plans.push_back(std::move(plan));
            } else if (b.is<BulletList>()) {
                for (const auto &item : b.as<BulletList>().items)
                    self(self, item);
            } else if (b.is<OrderedList>()) {
                for (const auto &item : b.as<OrderedList>().items)
                    self(self, item);
            } else if (b.is<BlockQuote>()) {
                self(self, b.as<BlockQuote>().blocks);
            }
        }
    };
    visit(visit, doc.blocks);

    std::vector<ChunkHeader> headers;
    for (const auto &p : plans)
        headers.push_back(p.header);
    ChunkOptions defaults;
    defaults.fig_width = fig_width;
    defaults.fig_height = fig_height;
    auto effective = apply_global_options(headers, global_directives(headers), defaults);
    for (std::size_t i = 0; i < plans.size(); ++i)
        plans[i].options = effective[i];
    return plans;
}

}  // namespace weave
