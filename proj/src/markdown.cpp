#include "weave/markdown.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

namespace weave {

namespace {

// ---------------------------------------------------------------------------
// Character helpers

bool is_space(char c) { return c == ' ' || c == '\t'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s)
{
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

int indent_of(std::string_view s)
{
    int n = 0;
    for (char c : s) {
        if (c == ' ')
            ++n;
        else if (c == '\t')
            n += 4;
        else
            break;
    }
    return n;
}

std::string_view strip_indent(std::string_view s, int max)
{
    int removed = 0;
    while (!s.empty() && removed < max && (s.front() == ' ' || s.front() == '\t')) {
        removed += s.front() == '\t' ? 4 : 1;
        s.remove_prefix(1);
    }
    return s;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto &c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

constexpr std::array block_tags = {
    "address", "article", "aside",   "blockquote", "center", "details", "dd",     "div",      "dl",     "dt",
    "fieldset", "figcaption", "figure", "footer", "form", "h1",      "h2",     "h3",       "h4",     "h5",
    "h6",      "header",  "hr",      "iframe",     "li",     "main",    "nav",    "ol",       "p",      "pre",
    "script",  "section", "style",   "summary",    "table",  "tbody",   "td",     "tfoot",    "th",     "thead",
    "tr",      "ul",      "video",   "audio",      "canvas", "svg"};

constexpr std::array inline_tags = {"a",    "abbr", "b",    "br",  "cite", "code", "del", "em",     "font",
                                    "i",    "img",  "ins",  "kbd", "mark", "q",    "s",   "small",  "span",
                                    "strong", "sub", "sup", "u"};

template <std::size_t N>
bool contains(const std::array<const char *, N> &set, std::string_view name)
{
    auto l = lower(name);
    return std::any_of(set.begin(), set.end(), [&](const char *t) { return l == t; });
}

// Length of an HTML tag (`<name ...>` or `</name>`) starting at s[0] whose
// name satisfies `allowed`, or 0.
template <typename Pred>
std::size_t html_tag_length(std::string_view s, Pred allowed)
{
    if (s.size() < 2 || s[0] != '<')
        return 0;
    if (s.substr(0, 4) == "<!--") {
        auto end = s.find("-->", 4);
        return end == std::string_view::npos ? 0 : end + 3;
    }
    std::size_t i = 1;
    if (s[i] == '/')
        ++i;
    std::size_t name_start = i;
    while (i < s.size() && is_alnum(s[i]))
        ++i;
    if (i == name_start || !std::isalpha(static_cast<unsigned char>(s[name_start])))
        return 0;
    if (!allowed(s.substr(name_start, i - name_start)))
        return 0;
    if (i < s.size() && !(is_space(s[i]) || s[i] == '>' || s[i] == '/'))
        return 0;
    char quote = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (quote) {
            if (c == quote)
                quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            return i + 1;
        } else if (c == '<' || c == '\n') {
            return 0;
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Block-level line classification

struct Line {
    std::string_view text;
    int number;
};

struct FenceOpen {
    std::size_t ticks;
    std::string_view info;
};

std::optional<FenceOpen> fence_open(std::string_view s)
{
    if (indent_of(s) > 3)
        return std::nullopt;
    s = trim(s);
    std::size_t n = 0;
    while (n < s.size() && s[n] == '`')
        ++n;
    if (n < 3)
        return std::nullopt;
    auto info = trim(s.substr(n));
    if (info.find('`') != std::string_view::npos)
        return std::nullopt;
    return FenceOpen{n, info};
}

bool fence_close(std::string_view s, std::size_t ticks)
{
    s = trim(s);
    return s.size() >= ticks && std::all_of(s.begin(), s.end(), [](char c) { return c == '`'; });
}

// 1 for a `===` underline, 2 for `---`, else 0.
int underline_level(std::string_view s)
{
    if (indent_of(s) > 3)
        return 0;
    s = trim(s);
    if (s.size() < 3)
        return 0;
    if (std::all_of(s.begin(), s.end(), [](char c) { return c == '='; }))
        return 1;
    if (std::all_of(s.begin(), s.end(), [](char c) { return c == '-'; }))
        return 2;
    return 0;
}

struct Atx {
    int level;
    std::string_view text;
};

std::optional<Atx> atx_heading(std::string_view s)
{
    if (indent_of(s) > 3)
        return std::nullopt;
    s = trim(s);
    int level = 0;
    while (static_cast<std::size_t>(level) < s.size() && s[level] == '#')
        ++level;
    if (level < 1 || level > 6 || static_cast<std::size_t>(level) >= s.size() || !is_space(s[level]))
        return std::nullopt;
    return Atx{level, trim(s.substr(level))};
}

struct ListMarker {
    bool ordered;
    int number;        // ordered only; `#.` counts as 1
    int content_col;   // column where item content starts
    std::size_t marker_len;
};

std::optional<ListMarker> list_marker(std::string_view s)
{
    const int indent = indent_of(s);
    if (indent > 3)
        return std::nullopt;
    auto body = strip_indent(s, indent);
    if (body.size() >= 2 && (body[0] == '*' || body[0] == '-' || body[0] == '+') && is_space(body[1]))
        return ListMarker{false, 0, indent + 2, 2};
    if (body.size() >= 3 && body[0] == '#' && body[1] == '.' && is_space(body[2]))
        return ListMarker{true, 1, indent + 3, 3};
    std::size_t digits = 0;
    while (digits < body.size() && digits < 9 && is_digit(body[digits]))
        ++digits;
    if (digits > 0 && digits + 1 < body.size() && body[digits] == '.' && is_space(body[digits + 1]))
        return ListMarker{true, std::stoi(std::string(body.substr(0, digits))), indent + static_cast<int>(digits) + 2,
                          digits + 2};
    return std::nullopt;
}

bool quote_line(std::string_view s)
{
    return indent_of(s) <= 3 && !trim(s).empty() && trim(s).front() == '>';
}

bool html_block_start(std::string_view s)
{
    if (indent_of(s) > 0 || s.empty() || s[0] != '<')
        return false;
    if (s.substr(0, 4) == "<!--")
        return true;
    std::size_t i = 1;
    if (i < s.size() && s[i] == '/')
        ++i;
    std::size_t start = i;
    while (i < s.size() && is_alnum(s[i]))
        ++i;
    if (i == start)
        return false;
    if (i < s.size() && !(is_space(s[i]) || s[i] == '>' || s[i] == '/'))
        return false;
    return is_block_html_tag(s.substr(start, i - start));
}

struct Run {
    std::size_t begin;
    std::size_t end;   // exclusive
};

// Hyphen runs of a line made only of '-' and spaces.
std::vector<Run> dash_runs(std::string_view s)
{
    std::vector<Run> runs;
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    if (s.empty())
        return runs;
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == '-') {
            std::size_t j = i;
            while (j < s.size() && s[j] == '-')
                ++j;
            runs.push_back({i, j});
            i = j;
        } else if (s[i] == ' ') {
            ++i;
        } else {
            return {};
        }
    }
    return runs;
}

bool single_rule(std::string_view s)
{
    auto runs = dash_runs(s);
    return runs.size() == 1 && runs[0].end - runs[0].begin >= 3;
}

std::string join_lines(const std::vector<Line> &lines, std::size_t from, std::size_t to, bool trimmed)
{
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (i > from)
            out += '\n';
        out += trimmed ? trim(lines[i].text) : lines[i].text;
    }
    return out;
}

Inlines raw_inlines(std::string_view text)
{
    Inlines out;
    out.push_back(Text{std::string(text)});
    return out;
}

// ---------------------------------------------------------------------------
// Block parser

class BlockParser {
public:
    explicit BlockParser(std::vector<Line> lines) : lines_(std::move(lines)) {}

    Blocks parse()
    {
        Blocks blocks;
        while (pos_ < lines_.size()) {
            if (is_blank(text(pos_))) {
                ++pos_;
                continue;
            }
            blocks.push_back(next_block());
        }
        return blocks;
    }

private:
    std::string_view text(std::size_t i) const { return lines_[i].text; }
    bool has(std::size_t i) const { return i < lines_.size(); }

    Block make(Block::Node node, std::size_t first, std::size_t last) const
    {
        return Block{std::move(node), lines_[first].number, lines_[last].number};
    }

    bool table_at(std::size_t i) const
    {
        if (!has(i + 1) || is_blank(text(i)))
            return false;
        if (dash_runs(text(i)).empty() && dash_runs(text(i + 1)).size() >= 2)
            return true;
        return single_rule(text(i)) && has(i + 2) && !is_blank(text(i + 1)) && dash_runs(text(i + 1)).empty()
            && dash_runs(text(i + 2)).size() >= 2;
    }

    bool setext_at(std::size_t i) const
    {
        return has(i + 1) && !is_blank(text(i)) && underline_level(text(i + 1)) > 0 && !single_rule(text(i))
            && !fence_open(text(i));
    }

    // Lines that end a paragraph or a lazy list continuation.
    bool interrupts(std::size_t i) const
    {
        auto s = text(i);
        return fence_open(s) || atx_heading(s) || list_marker(s) || quote_line(s) || html_block_start(s);
    }

    Block next_block()
    {
        const std::size_t start = pos_;
        auto s = text(start);

        if (auto fence = fence_open(s))
            return fenced(*fence);
        if (auto atx = atx_heading(s)) {
            ++pos_;
            return make(atx_block(*atx), start, start);
        }
        if (auto marker = list_marker(s))
            return list(marker->ordered);
        if (quote_line(s))
            return quote();
        if (setext_at(start)) {
            pos_ += 2;
            Heading h;
            h.level = underline_level(text(start + 1));
            h.content = raw_inlines(trim(s));
            return make(std::move(h), start, start + 1);
        }
        if (table_at(start))
            return table();
        if (html_block_start(s)) {
            std::size_t end = start;
            while (has(end) && !is_blank(text(end)))
                ++end;
            pos_ = end;
            return make(RawHtml{join_lines(lines_, start, end, false)}, start, end - 1);
        }
        return paragraph();
    }

    Block fenced(const FenceOpen &fence)
    {
        const std::size_t start = pos_;
        std::size_t end = start + 1;
        while (has(end) && !fence_close(text(end), fence.ticks))
            ++end;
        if (!has(end))
            throw Error(ErrorKind::UnterminatedFence, "code fence is never closed", lines_[start].number);
        pos_ = end + 1;
        std::string body = join_lines(lines_, start + 1, end, false);
        auto info = fence.info;
        if (info.size() >= 2 && info.front() == '{' && info.back() == '}') {
            CodeChunk chunk;
            chunk.options_raw = std::string(trim(info.substr(1, info.size() - 2)));
            chunk.code = std::move(body);
            return make(std::move(chunk), start, end);
        }
        return make(FencedCode{std::move(body)}, start, end);
    }

    static Heading atx_block(const Atx &atx)
    {
        Heading h;
        h.level = atx.level;
        auto text = atx.text;
        if (!text.empty() && text.back() == '}') {
            auto open = text.rfind('{');
            if (open != std::string_view::npos) {
                auto inner = text.substr(open + 1, text.size() - open - 2);
                std::vector<std::string> classes;
                bool valid = !trim(inner).empty();
                std::size_t p = 0;
                while (valid && p < inner.size()) {
                    while (p < inner.size() && is_space(inner[p]))
                        ++p;
                    std::size_t q = p;
                    while (q < inner.size() && !is_space(inner[q]))
                        ++q;
                    auto token = inner.substr(p, q - p);
                    if (token.size() > 1 && token[0] == '.')
                        classes.emplace_back(token.substr(1));
                    else if (!token.empty() && token[0] != '#' && token.find('=') == std::string_view::npos)
                        valid = false;
                    p = q;
                }
                if (valid) {
                    h.attrs = std::move(classes);
                    text = trim(text.substr(0, open));
                }
            }
        }
        // Optional closing sequence of '#'.
        auto stripped = text;
        while (!stripped.empty() && stripped.back() == '#')
            stripped.remove_suffix(1);
        if (stripped.size() < text.size() && (stripped.empty() || is_space(stripped.back())))
            text = trim(stripped);
        h.content = raw_inlines(text);
        return h;
    }

    Block list(bool ordered)
    {
        const std::size_t start = pos_;
        std::vector<Blocks> items;
        int first_number = 1;
        std::size_t last = start;
        while (has(pos_)) {
            auto marker = list_marker(text(pos_));
            if (!marker || marker->ordered != ordered)
                break;
            if (items.empty())
                first_number = marker->number;
            const int width = marker->content_col;
            std::vector<Line> item;
            {
                auto s = text(pos_);
                auto body = strip_indent(s, indent_of(s));
                item.push_back({trim(body.substr(marker->marker_len)), lines_[pos_].number});
            }
            last = pos_;
            std::size_t j = pos_ + 1;
            while (has(j)) {
                auto s = text(j);
                if (is_blank(s)) {
                    std::size_t k = j;
                    while (has(k) && is_blank(text(k)))
                        ++k;
                    if (has(k) && indent_of(text(k)) >= std::min(width, 2)) {
                        for (; j < k; ++j)
                            item.push_back({std::string_view{}, lines_[j].number});
                        continue;
                    }
                    break;
                }
                const int ind = indent_of(s);
                if (ind >= std::min(width, 2)) {
                    item.push_back({strip_indent(s, width), lines_[j].number});
                } else if (interrupts(j) || underline_level(s) > 0 || table_at(j)) {
                    break;
                } else {
                    item.push_back({trim(s), lines_[j].number});
                }
                last = j;
                ++j;
            }
            items.push_back(BlockParser(std::move(item)).parse());
            pos_ = j;
            // A blank gap continues the list only when the next item follows.
            std::size_t k = pos_;
            while (has(k) && is_blank(text(k)))
                ++k;
            if (k != pos_) {
                auto next = has(k) ? list_marker(text(k)) : std::nullopt;
                if (!next || next->ordered != ordered)
                    break;
                pos_ = k;
            }
        }
        if (ordered)
            return make(OrderedList{first_number, std::move(items)}, start, last);
        return make(BulletList{std::move(items)}, start, last);
    }

    Block quote()
    {
        const std::size_t start = pos_;
        std::vector<Line> inner;
        while (has(pos_) && quote_line(text(pos_))) {
            auto s = trim(text(pos_));
            s.remove_prefix(1);
            if (!s.empty() && s.front() == ' ')
                s.remove_prefix(1);
            inner.push_back({s, lines_[pos_].number});
            ++pos_;
        }
        return make(BlockQuote{BlockParser(std::move(inner)).parse()}, start, pos_ - 1);
    }

    Block table()
    {
        const std::size_t start = pos_;
        std::size_t header_at = start;
        if (single_rule(text(start)) && dash_runs(text(start + 1)).empty())
            header_at = start + 1;
        const std::size_t rule_at = header_at + 1;
        auto runs = dash_runs(text(rule_at));

        auto column_range = [&](std::size_t col, std::size_t size) {
            std::size_t begin = col == 0 ? 0 : runs[col].begin;
            std::size_t end = col + 1 < runs.size() ? runs[col + 1].begin : size;
            begin = std::min(begin, size);
            end = std::min(std::max(end, begin), size);
            return std::pair{begin, end};
        };
        auto cells = [&](std::string_view row) {
            std::vector<Inlines> out;
            for (std::size_t c = 0; c < runs.size(); ++c) {
                auto [b, e] = column_range(c, row.size());
                out.push_back(raw_inlines(trim(row.substr(b, e - b))));
            }
            return out;
        };

        Table t;
        auto header = text(header_at);
        t.header = cells(header);
        for (std::size_t c = 0; c < runs.size(); ++c) {
            auto [b, e] = column_range(c, header.size());
            auto cell = header.substr(b, e - b);
            auto first = cell.find_first_not_of(" \t");
            auto last = cell.find_last_not_of(" \t");
            if (first == std::string_view::npos) {
                t.aligns.push_back(Align::Default);
                continue;
            }
            bool left = b + first == runs[c].begin;
            bool right = b + last + 1 == runs[c].end;
            if (left && right)
                t.aligns.push_back(Align::Default);
            else if (left)
                t.aligns.push_back(Align::Left);
            else if (right)
                t.aligns.push_back(Align::Right);
            else
                t.aligns.push_back(Align::Center);
        }

        std::size_t i = rule_at + 1;
        std::size_t last = rule_at;
        while (has(i) && !is_blank(text(i))) {
            if (!dash_runs(text(i)).empty()) {
                last = i++;
                break;
            }
            t.rows.push_back(cells(text(i)));
            last = i++;
        }
        pos_ = i;
        return make(std::move(t), start, last);
    }

    Block paragraph()
    {
        const std::size_t start = pos_;
        std::size_t end = start + 1;
        while (has(end) && !is_blank(text(end)) && !interrupts(end) && !setext_at(end) && !table_at(end))
            ++end;
        pos_ = end;
        return make(Paragraph{raw_inlines(join_lines(lines_, start, end, true))}, start, end - 1);
    }

    std::vector<Line> lines_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Inline parser

class InlineParser {
public:
    InlineParser(std::string_view text, const LanguageSet &languages, int line)
        : s_(text), languages_(languages), line_(line)
    {
    }

    Inlines parse()
    {
        Inlines out;
        std::string buffer;
        auto flush = [&] {
            if (!buffer.empty()) {
                out.push_back(Text{std::move(buffer)});
                buffer.clear();
            }
        };
        std::size_t i = 0;
        while (i < s_.size()) {
            const char c = s_[i];
            if (c == '\\' && i + 1 < s_.size() && is_punct(s_[i + 1])) {
                buffer += s_[i + 1];
                i += 2;
                continue;
            }
            std::optional<std::pair<Inline, std::size_t>> hit;
            switch (c) {
            case '`': hit = code_span(i); break;
            case '$': hit = math(i); break;
            case '!': hit = image(i); break;
            case '[': hit = bracket(i); break;
            case '*':
            case '_': hit = emphasis(i); break;
            case '^': hit = script(i, '^'); break;
            case '~': hit = tilde(i); break;
            case '<': hit = raw_tag(i); break;
            default: break;
            }
            if (hit) {
                flush();
                out.push_back(std::move(hit->first));
                i = hit->second;
                continue;
            }
            if (c == '`') {
                // An unmatched backtick run stays literal as a whole.
                std::size_t j = i;
                while (j < s_.size() && s_[j] == '`')
                    ++j;
                buffer.append(s_.substr(i, j - i));
                i = j;
                continue;
            }
            buffer += c;
            ++i;
        }
        flush();
        return out;
    }

private:
    using Hit = std::optional<std::pair<Inline, std::size_t>>;

    int line_at(std::size_t i) const
    {
        if (line_ <= 0)
            return 0;
        return line_ + static_cast<int>(std::count(s_.begin(), s_.begin() + static_cast<std::ptrdiff_t>(i), '\n'));
    }

    Inlines sub(std::size_t begin, std::size_t end) const
    {
        return InlineParser(s_.substr(begin, end - begin), languages_, line_at(begin)).parse();
    }

    // End of the backtick code span starting at i, or npos.
    std::size_t code_span_end(std::size_t i) const
    {
        std::size_t n = 0;
        while (i + n < s_.size() && s_[i + n] == '`')
            ++n;
        std::size_t j = i + n;
        while (j < s_.size()) {
            if (s_[j] != '`') {
                ++j;
                continue;
            }
            std::size_t m = 0;
            while (j + m < s_.size() && s_[j + m] == '`')
                ++m;
            if (m == n)
                return j + m;
            j += m;
        }
        return std::string_view::npos;
    }

    // Finds `delim` starting at or after `from`, skipping escapes and code
    // spans. `accept` vets each candidate position.
    template <typename Accept>
    std::size_t find_closer(std::size_t from, std::string_view delim, Accept accept) const
    {
        std::size_t j = from;
        while (j < s_.size()) {
            if (s_[j] == '\\') {
                j += 2;
                continue;
            }
            if (s_[j] == '`') {
                auto end = code_span_end(j);
                if (end != std::string_view::npos) {
                    j = end;
                    continue;
                }
            }
            if (s_.compare(j, delim.size(), delim) == 0 && accept(j))
                return j;
            ++j;
        }
        return std::string_view::npos;
    }

    Hit code_span(std::size_t i) const
    {
        auto end = code_span_end(i);
        if (end == std::string_view::npos)
            return std::nullopt;
        std::size_t n = 0;
        while (s_[i + n] == '`')
            ++n;
        auto content = s_.substr(i + n, end - n - (i + n));
        if (content.size() >= 2 && content.front() == ' ' && content.back() == ' ' && !is_blank(content))
            content = content.substr(1, content.size() - 2);
        auto space = content.find(' ');
        if (space != std::string_view::npos && space > 0) {
            auto lang = content.substr(0, space);
            auto expr = trim(content.substr(space + 1));
            if (!expr.empty() && languages_.count(lang) > 0) {
                InlineEval eval;
                eval.lang = std::string(lang);
                eval.expr = std::string(expr);
                eval.line = line_at(i);
                return std::pair{Inline(std::move(eval)), end};
            }
        }
        return std::pair{Inline(CodeLiteral{std::string(content)}), end};
    }

    Hit math(std::size_t i) const
    {
        if (i + 1 < s_.size() && s_[i + 1] == '$') {
            auto close = s_.find("$$", i + 2);
            if (close == std::string_view::npos || close == i + 2)
                return std::nullopt;
            return std::pair{Inline(Math{std::string(s_.substr(i + 2, close - i - 2)), true}), close + 2};
        }
        if (i + 1 >= s_.size() || is_space(s_[i + 1]) || s_[i + 1] == '\n')
            return std::nullopt;
        for (std::size_t j = i + 1; j < s_.size(); ++j) {
            if (s_[j] == '\\') {
                ++j;
                continue;
            }
            if (s_[j] != '$')
                continue;
            if (is_space(s_[j - 1]) || s_[j - 1] == '\n')
                continue;
            if (j + 1 < s_.size() && is_digit(s_[j + 1]))
                continue;
            return std::pair{Inline(Math{std::string(s_.substr(i + 1, j - i - 1)), false}), j + 1};
        }
        return std::nullopt;
    }

    // Index just past the `]` matching the `[` at i, or npos.
    std::size_t bracket_end(std::size_t i) const
    {
        int depth = 0;
        for (std::size_t j = i; j < s_.size(); ++j) {
            if (s_[j] == '\\') {
                ++j;
                continue;
            }
            if (s_[j] == '`') {
                auto end = code_span_end(j);
                if (end != std::string_view::npos) {
                    j = end - 1;
                    continue;
                }
            }
            if (s_[j] == '[')
                ++depth;
            else if (s_[j] == ']' && --depth == 0)
                return j + 1;
        }
        return std::string_view::npos;
    }

    // `(destination)` starting at i; returns (url, index past ')').
    std::optional<std::pair<std::string, std::size_t>> destination(std::size_t i) const
    {
        if (i >= s_.size() || s_[i] != '(')
            return std::nullopt;
        int depth = 0;
        for (std::size_t j = i; j < s_.size(); ++j) {
            if (s_[j] == '\n')
                return std::nullopt;
            if (s_[j] == '(')
                ++depth;
            else if (s_[j] == ')' && --depth == 0) {
                auto inner = trim(s_.substr(i + 1, j - i - 1));
                // Drop an optional "title".
                auto space = inner.find(' ');
                if (space != std::string_view::npos) {
                    auto rest = trim(inner.substr(space));
                    if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"')
                        inner = inner.substr(0, space);
                }
                if (inner.size() >= 2 && inner.front() == '<' && inner.back() == '>')
                    inner = inner.substr(1, inner.size() - 2);
                return std::pair{std::string(inner), j + 1};
            }
        }
        return std::nullopt;
    }

    Hit image(std::size_t i) const
    {
        if (i + 1 >= s_.size() || s_[i + 1] != '[')
            return std::nullopt;
        auto close = bracket_end(i + 1);
        if (close == std::string_view::npos)
            return std::nullopt;
        auto dest = destination(close);
        if (!dest)
            return std::nullopt;
        auto alt = s_.substr(i + 2, close - 1 - (i + 2));
        return std::pair{Inline(Image{std::string(alt), dest->first}), dest->second};
    }

    Hit bracket(std::size_t i) const
    {
        if (i + 1 < s_.size() && s_[i + 1] == '@') {
            std::size_t j = i + 2;
            while (j < s_.size() && (is_alnum(s_[j]) || s_[j] == '_' || s_[j] == '-' || s_[j] == ':' || s_[j] == '.'))
                ++j;
            if (j > i + 2 && j < s_.size() && s_[j] == ']')
                return std::pair{Inline(Citation{std::string(s_.substr(i + 2, j - i - 2)), line_at(i)}), j + 1};
        }
        auto close = bracket_end(i);
        if (close == std::string_view::npos)
            return std::nullopt;
        auto dest = destination(close);
        if (!dest)
            return std::nullopt;
        Link link;
        link.children = sub(i + 1, close - 1);
        link.url = dest->first;
        return std::pair{Inline(std::move(link)), dest->second};
    }

    bool flanking_open(std::size_t i, std::size_t width) const
    {
        if (i + width >= s_.size() || std::isspace(static_cast<unsigned char>(s_[i + width])))
            return false;
        // Intraword underscores are literal.
        if (s_[i] == '_' && i > 0 && is_alnum(s_[i - 1]))
            return false;
        return true;
    }

    bool flanking_close(std::size_t j, std::size_t width, char delim) const
    {
        if (j == 0 || std::isspace(static_cast<unsigned char>(s_[j - 1])))
            return false;
        if (delim == '_' && j + width < s_.size() && is_alnum(s_[j + width]))
            return false;
        return true;
    }

    Hit emphasis(std::size_t i) const
    {
        const char d = s_[i];
        const std::string two(2, d);
        if (i + 1 < s_.size() && s_[i + 1] == d && flanking_open(i, 2)) {
            auto close = find_closer(i + 2, two, [&](std::size_t j) {
                if (j + 2 < s_.size() && s_[j + 2] == d)
                    return false;
                return j > i + 2 && flanking_close(j, 2, d);
            });
            if (close != std::string_view::npos) {
                auto children = sub(i + 2, close);
                if (!children.empty())
                    return std::pair{Inline(Strong{std::move(children)}), close + 2};
            }
        }
        if (!flanking_open(i, 1) || (i + 1 < s_.size() && s_[i + 1] == d))
            return std::nullopt;
        const std::string one(1, d);
        auto close = find_closer(i + 1, one, [&](std::size_t j) {
            if (j + 1 < s_.size() && s_[j + 1] == d)
                return false;
            if (s_[j - 1] == d)
                return false;
            return j > i + 1 && flanking_close(j, 1, d);
        });
        if (close == std::string_view::npos)
            return std::nullopt;
        auto children = sub(i + 1, close);
        if (children.empty())
            return std::nullopt;
        return std::pair{Inline(Emph{std::move(children)}), close + 1};
    }

    // ^sup^ and ~sub~: no whitespace inside.
    Hit script(std::size_t i, char d) const
    {
        std::size_t j = i + 1;
        while (j < s_.size() && s_[j] != d) {
            if (std::isspace(static_cast<unsigned char>(s_[j])))
                return std::nullopt;
            if (s_[j] == '\\')
                ++j;
            ++j;
        }
        if (j >= s_.size() || j == i + 1)
            return std::nullopt;
        auto children = sub(i + 1, j);
        if (children.empty())
            return std::nullopt;
        if (d == '^')
            return std::pair{Inline(Superscript{std::move(children)}), j + 1};
        return std::pair{Inline(Subscript{std::move(children)}), j + 1};
    }

    Hit tilde(std::size_t i) const
    {
        if (i + 1 < s_.size() && s_[i + 1] == '~') {
            if (i + 2 >= s_.size() || std::isspace(static_cast<unsigned char>(s_[i + 2])))
                return std::nullopt;
            auto close = find_closer(i + 2, "~~", [&](std::size_t j) {
                return j > i + 2 && !std::isspace(static_cast<unsigned char>(s_[j - 1]));
            });
            if (close == std::string_view::npos)
                return std::nullopt;
            auto children = sub(i + 2, close);
            if (children.empty())
                return std::nullopt;
            return std::pair{Inline(Strikeout{std::move(children)}), close + 2};
        }
        return script(i, '~');
    }

    Hit raw_tag(std::size_t i) const
    {
        auto n = html_tag_length(s_.substr(i), [](std::string_view name) { return is_inline_html_tag(name); });
        if (n == 0)
            return std::nullopt;
        return std::pair{Inline(RawInline{std::string(s_.substr(i, n))}), i + n};
    }

    std::string_view s_;
    const LanguageSet &languages_;
    int line_;
};

// ---------------------------------------------------------------------------
// Document assembly

class InlinePass {
public:
    InlinePass(const LanguageSet &languages) : languages_(languages) {}

    void blocks(Blocks &bs)
    {
        for (auto &b : bs)
            block(b);
    }

    int chunks = 0;
    int evals = 0;

private:
    Inlines prose(const Inlines &raw, int line)
    {
        std::string text;
        for (const auto &node : raw)
            if (node.is<Text>())
                text += node.as<Text>().text;
        auto parsed = parse_inlines(text, languages_, line);
        number(parsed);
        return parsed;
    }

    void number(Inlines &inlines)
    {
        for (auto &node : inlines) {
            std::visit(overloaded{
                           [&](InlineEval &e) { e.ordinal = evals++; },
                           [&](Link &l) { number(l.children); },
                           [&](Emph &e) { number(e.children); },
                           [&](Strong &e) { number(e.children); },
                           [&](Superscript &e) { number(e.children); },
                           [&](Subscript &e) { number(e.children); },
                           [&](Strikeout &e) { number(e.children); },
                           [](auto &) {},
                       },
                       node.node);
        }
    }

    void block(Block &b)
    {
        const int line = b.line;
        std::visit(overloaded{
                       [&](Heading &h) { h.content = prose(h.content, line); },
                       [&](Paragraph &p) { p.content = prose(p.content, line); },
                       [&](BulletList &l) {
                           for (auto &item : l.items)
                               blocks(item);
                       },
                       [&](OrderedList &l) {
                           for (auto &item : l.items)
                               blocks(item);
                       },
                       [&](BlockQuote &q) { blocks(q.blocks); },
                       [&](CodeChunk &c) { c.ordinal = chunks++; },
                       [&](Table &t) {
                           for (auto &cell : t.header)
                               cell = prose(cell, line);
                           for (auto &row : t.rows)
                               for (auto &cell : row)
                                   cell = prose(cell, line);
                       },
                       [](auto &) {},
                   },
                   b.node);
    }

    const LanguageSet &languages_;
};

}  // namespace

bool is_block_html_tag(std::string_view name) { return contains(block_tags, name); }
bool is_inline_html_tag(std::string_view name) { return contains(inline_tags, name); }

Blocks parse_blocks(std::string_view body, int start_line)
{
    std::vector<Line> lines;
    int number = start_line;
    std::size_t pos = 0;
    while (pos < body.size()) {
        auto end = body.find('\n', pos);
        if (end == std::string_view::npos)
            end = body.size();
        auto line = body.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back({line, number++});
        pos = end + 1;
    }
    return BlockParser(std::move(lines)).parse();
}

Inlines parse_inlines(std::string_view text, const LanguageSet &languages, int line)
{
    return InlineParser(text, languages, line).parse();
}

SourceDocument parse_document(std::string_view source, const LanguageSet &languages)
{
    auto header = parse_front_matter(source);
    SourceDocument doc;
    doc.front = std::move(header.front);
    doc.body_start_line = header.body_start_line;
    doc.blocks = parse_blocks(header.body, header.body_start_line);
    InlinePass pass(languages);
    pass.blocks(doc.blocks);
    doc.chunk_count = pass.chunks;
    doc.inline_eval_count = pass.evals;
    return doc;
}

std::string plain_text(const Inlines &inlines)
{
    std::string out;
    for (const auto &node : inlines) {
        std::visit(overloaded{
                       [&](const Text &t) { out += t.text; },
                       [&](const Emph &e) { out += plain_text(e.children); },
                       [&](const Strong &e) { out += plain_text(e.children); },
                       [&](const Superscript &e) { out += plain_text(e.children); },
                       [&](const Subscript &e) { out += plain_text(e.children); },
                       [&](const Strikeout &e) { out += plain_text(e.children); },
                       [&](const Link &l) { out += plain_text(l.children); },
                       [&](const Image &i) { out += i.alt; },
                       [&](const CodeLiteral &c) { out += c.text; },
                       [&](const InlineEval &e) { out += e.expr; },
                       [&](const Math &m) { out += m.tex; },
                       [&](const Citation &c) { out += "@" + c.key; },
                       [](const RawInline &) {},
                   },
                   node.node);
    }
    return out;
}

}  // namespace weave
