#include "html_check.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <vector>

namespace weave::testing {

namespace {

const std::set<std::string, std::less<>> void_elements = {"area", "base", "br", "col", "embed", "hr", "img",
                                                          "input", "link", "meta", "source", "track", "wbr"};

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool entity_at(std::string_view s, std::size_t i)
{
    std::size_t j = i + 1;
    if (j < s.size() && s[j] == '#') {
        ++j;
        std::size_t start = j;
        while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j])))
            ++j;
        return j > start && j < s.size() && s[j] == ';';
    }
    std::size_t start = j;
    while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j])))
        ++j;
    return j > start && j < s.size() && s[j] == ';';
}

}  // namespace

std::string check_html(std::string_view html)
{
    std::vector<std::string> open;
    std::size_t i = 0;
    auto where = [&](std::size_t pos) { return " at offset " + std::to_string(pos); };

    while (i < html.size()) {
        const char c = html[i];
        if (c == '&') {
            if (!entity_at(html, i))
                return "bare '&'" + where(i);
            ++i;
            continue;
        }
        if (c != '<') {
            ++i;
            continue;
        }
        if (html.substr(i, 4) == "<!--") {
            auto end = html.find("-->", i + 4);
            if (end == std::string_view::npos)
                return "unterminated comment" + where(i);
            i = end + 3;
            continue;
        }
        if (html.substr(i, 2) == "<!") {
            auto end = html.find('>', i);
            if (end == std::string_view::npos)
                return "unterminated declaration" + where(i);
            i = end + 1;
            continue;
        }
        const bool closing = i + 1 < html.size() && html[i + 1] == '/';
        std::size_t name_start = i + (closing ? 2 : 1);
        std::size_t j = name_start;
        while (j < html.size() && (std::isalnum(static_cast<unsigned char>(html[j])) || html[j] == '-'))
            ++j;
        if (j == name_start || !std::isalpha(static_cast<unsigned char>(html[name_start])))
            return "bare '<'" + where(i);
        const auto name = lower(html.substr(name_start, j - name_start));

        // Find the end of the tag, respecting quoted attribute values.
        char quote = 0;
        while (j < html.size()) {
            char d = html[j];
            if (quote) {
                if (d == quote)
                    quote = 0;
            } else if (d == '"' || d == '\'') {
                quote = d;
            } else if (d == '>') {
                break;
            } else if (d == '<') {
                return "'<' inside tag <" + name + ">" + where(j);
            }
            ++j;
        }
        if (j >= html.size())
            return "unterminated tag <" + name + ">" + where(i);
        const bool self_closing = html[j - 1] == '/';
        i = j + 1;

        if (closing) {
            if (open.empty())
                return "unexpected </" + name + ">" + where(name_start);
            if (open.back() != name)
                return "</" + name + "> closes <" + open.back() + ">" + where(name_start);
            open.pop_back();
            continue;
        }
        if (void_elements.count(name) || self_closing)
            continue;
        if (name == "script" || name == "style") {
            auto end = lower(html.substr(i)).find("</" + name);
            if (end == std::string::npos)
                return "unterminated <" + name + ">" + where(i);
            i += end;
        }
        open.push_back(name);
    }
    if (!open.empty())
        return "unclosed <" + open.back() + ">";
    return {};
}

}  // namespace weave::testing
