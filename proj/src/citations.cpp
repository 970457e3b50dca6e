#include "weave/citations.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace weave {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string collapse_space(std::string_view s)
{
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = !out.empty();
            continue;
        }
        if (space)
            out += ' ';
        space = false;
        out += c;
    }
    return out;
}

std::string strip_braces(std::string_view s)
{
    std::string out;
    for (char c : s)
        if (c != '{' && c != '}')
            out += c;
    return collapse_space(out);
}

class BibParser {
public:
    explicit BibParser(std::string_view text) : s_(text) {}

    std::vector<BibEntry> entries()
    {
        std::vector<BibEntry> out;
        while (seek_entry()) {
            const int entry_line = line_at(pos_);
            ++pos_;   // '@'
            auto type = lower(identifier("entry type"));
            skip_space();
            if (pos_ >= s_.size() || (s_[pos_] != '{' && s_[pos_] != '('))
                fail("expected '{' after @" + type);
            const char close = s_[pos_] == '{' ? '}' : ')';
            if (type == "comment" || type == "string" || type == "preamble") {
                skip_balanced(close);
                continue;
            }
            ++pos_;
            out.push_back(entry(type, close, entry_line));
        }
        return out;
    }

private:
    [[noreturn]] void fail(const std::string &message) const
    {
        throw Error(ErrorKind::BibParseError, message, line_at(pos_));
    }

    int line_at(std::size_t pos) const
    {
        pos = std::min(pos, s_.size());
        return 1 + static_cast<int>(std::count(s_.begin(), s_.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
    }

    bool seek_entry()
    {
        while (pos_ < s_.size() && s_[pos_] != '@')
            ++pos_;
        return pos_ < s_.size();
    }

    void skip_space()
    {
        while (pos_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            } else if (s_[pos_] == '%') {
                while (pos_ < s_.size() && s_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view identifier(const char *what)
    {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < s_.size()) {
            unsigned char c = static_cast<unsigned char>(s_[pos_]);
            if (!(std::isalnum(c) || c == '_' || c == '-' || c == ':' || c == '.' || c == '/' || c == '+'))
                break;
            ++pos_;
        }
        if (pos_ == start)
            fail(fmt::format("expected {}", what));
        return s_.substr(start, pos_ - start);
    }

    // Positioned on the opening delimiter; leaves pos_ after the match.
    void skip_balanced(char close)
    {
        const std::size_t open_at = pos_;
        const char open = s_[pos_];
        int depth = 0;
        while (pos_ < s_.size()) {
            char c = s_[pos_++];
            if (c == open)
                ++depth;
            else if (c == close && --depth == 0)
                return;
        }
        pos_ = open_at;
        fail("unbalanced delimiters");
    }

    std::string braced()
    {
        const std::size_t start = ++pos_;
        int depth = 1;
        while (pos_ < s_.size()) {
            char c = s_[pos_++];
            if (c == '{')
                ++depth;
            else if (c == '}' && --depth == 0)
                return std::string(s_.substr(start, pos_ - start - 1));
        }
        pos_ = start - 1;
        fail("unterminated '{' in field value");
    }

    std::string quoted()
    {
        const std::size_t start = ++pos_;
        int depth = 0;
        while (pos_ < s_.size()) {
            char c = s_[pos_++];
            if (c == '{')
                ++depth;
            else if (c == '}')
                --depth;
            else if (c == '"' && depth == 0)
                return std::string(s_.substr(start, pos_ - start - 1));
        }
        pos_ = start - 1;
        fail("unterminated '\"' in field value");
    }

    std::string value()
    {
        skip_space();
        if (pos_ >= s_.size())
            fail("missing field value");
        if (s_[pos_] == '{')
            return strip_braces(braced());
        if (s_[pos_] == '"')
            return strip_braces(quoted());
        return std::string(identifier("field value"));
    }

    BibEntry entry(const std::string &type, char close, int entry_line)
    {
        BibEntry e;
        e.entry_type = type;
        e.line = entry_line;
        skip_space();
        std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != close && !std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
        e.key = std::string(s_.substr(start, pos_ - start));
        if (e.key.empty())
            fail("entry has no key");

        std::set<std::string> seen;
        for (;;) {
            skip_space();
            if (pos_ >= s_.size())
                fail(fmt::format("entry '{}' is not closed", e.key));
            if (s_[pos_] == close) {
                ++pos_;
                return e;
            }
            if (s_[pos_] != ',')
                fail(fmt::format("expected ',' in entry '{}'", e.key));
            ++pos_;
            skip_space();
            if (pos_ < s_.size() && s_[pos_] == close)
                continue;
            auto name = lower(identifier("field name"));
            skip_space();
            if (pos_ >= s_.size() || s_[pos_] != '=')
                fail(fmt::format("expected '=' after field '{}'", name));
            ++pos_;
            auto v = value();
            if (!seen.insert(name).second)
                fail(fmt::format("field '{}' given twice in entry '{}'", name, e.key));
            if (name == "author")
                e.author = std::move(v);
            else if (name == "year")
                e.year = std::move(v);
            else if (name == "title")
                e.title = std::move(v);
            else
                e.extra[name] = std::move(v);
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string join_present(std::initializer_list<std::string_view> parts)
{
    std::string out;
    for (auto p : parts) {
        if (p.empty())
            continue;
        if (!out.empty())
            out += ' ';
        out += p;
    }
    return out;
}

}  // namespace

CitationIndex CitationIndex::parse(std::string_view text)
{
    CitationIndex index;
    for (auto &e : BibParser(text).entries()) {
        auto it = index.entries_.find(e.key);
        if (it != index.entries_.end())
            throw Error(ErrorKind::DuplicateBibKey,
                        fmt::format("bibliography key '{}' is defined on line {} and line {}", e.key, it->second.line,
                                    e.line),
                        e.line);
        auto key = e.key;
        index.entries_.emplace(std::move(key), std::move(e));
    }
    return index;
}

CitationIndex CitationIndex::load(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, fmt::format("cannot read bibliography '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (Error &e) {
        e.in_file(path.string());
        throw;
    }
}

const BibEntry *CitationIndex::find(std::string_view key) const
{
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

bool CitationIndex::cite(std::string_view key)
{
    if (!find(key))
        return false;
    if (std::find(cited_.begin(), cited_.end(), key) == cited_.end())
        cited_.emplace_back(key);
    return true;
}

std::vector<ReferenceEntry> CitationIndex::references() const
{
    std::vector<ReferenceEntry> out;
    for (const auto &key : cited_)
        out.push_back({key, reference_text(*find(key))});
    return out;
}

std::string first_surname(std::string_view author)
{
    std::string first = collapse_space(author);
    if (auto pos = first.find(" and "); pos != std::string::npos)
        first.resize(pos);
    if (auto comma = first.find(','); comma != std::string::npos)
        return collapse_space(first.substr(0, comma));
    auto space = first.rfind(' ');
    return space == std::string::npos ? first : first.substr(space + 1);
}

std::string citation_text(const BibEntry &entry)
{
    auto body = join_present({first_surname(entry.author), entry.year});
    return "(" + (body.empty() ? entry.key : body) + ")";
}

std::string reference_text(const BibEntry &entry)
{
    auto head = join_present({first_surname(entry.author), entry.year});
    std::string out = (head.empty() ? entry.key : head) + ".";
    if (!entry.title.empty()) {
        out += ' ';
        out += entry.title;
        char last = entry.title.back();
        if (last != '.' && last != '?' && last != '!')
            out += '.';
    }
    return out;
}

Inline format_citation(CitationIndex &index, std::string_view key, Diagnostics &diags, int line)
{
    if (index.cite(key))
        return Text{citation_text(*index.find(key))};
    diags.warn(line, fmt::format("unresolved citation '@{}'", key), ErrorKind::UnresolvedCitation);
    return Text{fmt::format("[@{}]", key)};
}

}  // namespace weave
