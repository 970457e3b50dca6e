#pragma once

#include "weave/ast.hpp"
#include "weave/diagnostics.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace weave {

struct BibEntry {
    std::string key;
    std::string entry_type;   // lowercased, e.g. "article"
    std::string author;
    std::string year;
    std::string title;
    std::map<std::string, std::string> extra;   // other fields, names lowercased
    int line = 0;

    bool operator==(const BibEntry &) const = default;
};

/// Bibliography entries plus the keys cited so far, in first-use order.
class CitationIndex {
public:
    /// Parses bibliography text. Throws BibParseError or DuplicateBibKey.
    static CitationIndex parse(std::string_view text);

    /// Throws IoError when the file cannot be read.
    static CitationIndex load(const std::filesystem::path &path);

    const BibEntry *find(std::string_view key) const;
    const std::map<std::string, BibEntry, std::less<>> &entries() const noexcept { return entries_; }
    const std::vector<std::string> &cited() const noexcept { return cited_; }

    /// Records `key` as cited; returns false for unknown keys.
    bool cite(std::string_view key);

    /// One line per cited key, first-citation order.
    std::vector<ReferenceEntry> references() const;

private:
    std::map<std::string, BibEntry, std::less<>> entries_;
    std::vector<std::string> cited_;
};

/// Surname of the first author: "Smith, A" and "Alice Smith" give "Smith".
std::string first_surname(std::string_view author);

/// "(Smith 2014)"
std::string citation_text(const BibEntry &entry);

/// "Smith 2014. Title."
std::string reference_text(const BibEntry &entry);

/// Resolves `[@key]` to Text. Unknown keys stay verbatim and raise a warning
/// that strict mode upgrades to UnresolvedCitation.
Inline format_citation(CitationIndex &index, std::string_view key, Diagnostics &diags, int line = 0);

}  // namespace weave
