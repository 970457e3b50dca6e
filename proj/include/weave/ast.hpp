#pragma once

#include "weave/front_matter.hpp"
#include "weave/result.hpp"

#include <concepts>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace weave {

// ---------------------------------------------------------------------------
// Inline nodes

struct Inline;
using Inlines = std::vector<Inline>;

struct Text {
    std::string text;
    bool operator==(const Text &) const = default;
};
struct Emph {
    Inlines children;
    bool operator==(const Emph &) const = default;
};
struct Strong {
    Inlines children;
    bool operator==(const Strong &) const = default;
};
struct Superscript {
    Inlines children;
    bool operator==(const Superscript &) const = default;
};
struct Subscript {
    Inlines children;
    bool operator==(const Subscript &) const = default;
};
struct Strikeout {
    Inlines children;
    bool operator==(const Strikeout &) const = default;
};
struct Link {
    Inlines children;
    std::string url;
    bool operator==(const Link &) const = default;
};
struct Image {
    std::string alt;
    std::string source;
    bool operator==(const Image &) const = default;
};
struct CodeLiteral {
    std::string text;
    bool operator==(const CodeLiteral &) const = default;
};
/// `` `lang expr` `` in prose. `ordinal` numbers inline evaluations in
/// document order, starting at 0.
struct InlineEval {
    std::string lang;
    std::string expr;
    int ordinal = 0;
    int line = 0;
    bool operator==(const InlineEval &) const = default;
};
struct Math {
    std::string tex;
    bool display = false;
    bool operator==(const Math &) const = default;
};
/// `[@key]`
struct Citation {
    std::string key;
    int line = 0;
    bool operator==(const Citation &) const = default;
};
/// An allowlisted inline HTML tag passed through verbatim.
struct RawInline {
    std::string html;
    bool operator==(const RawInline &) const = default;
};

struct Inline {
    using Node = std::variant<Text, Emph, Strong, Superscript, Subscript, Strikeout, Link, Image, CodeLiteral,
                              InlineEval, Math, Citation, RawInline>;
    Node node;

    template <typename T>
        requires std::constructible_from<Node, T &&> && (!std::same_as<std::remove_cvref_t<T>, Inline>)
    Inline(T &&value) : node(std::forward<T>(value)) {}

    template <typename T>
    bool is() const { return std::holds_alternative<T>(node); }
    template <typename T>
    const T &as() const { return std::get<T>(node); }
    template <typename T>
    T &as() { return std::get<T>(node); }

    bool operator==(const Inline &) const = default;
};

// ---------------------------------------------------------------------------
// Block nodes

struct Block;
using Blocks = std::vector<Block>;

enum class Align { Default, Left, Right, Center };

struct Heading {
    int level = 1;
    Inlines content;
    std::vector<std::string> attrs;   // class names from a trailing {.a .b}
    bool operator==(const Heading &) const = default;
};
struct Paragraph {
    Inlines content;
    bool operator==(const Paragraph &) const = default;
};
struct BulletList {
    std::vector<Blocks> items;
    bool operator==(const BulletList &) const = default;
};
struct OrderedList {
    int start = 1;
    std::vector<Blocks> items;
    bool operator==(const OrderedList &) const = default;
};
struct BlockQuote {
    Blocks blocks;
    bool operator==(const BlockQuote &) const = default;
};
/// Plain fenced block shown in a fixed-width box.
struct FencedCode {
    std::string text;
    bool operator==(const FencedCode &) const = default;
};
/// Executable chunk. `ordinal` numbers chunks in document order from 0.
struct CodeChunk {
    std::string options_raw;
    std::string code;
    int ordinal = 0;
    bool operator==(const CodeChunk &) const = default;
};
struct Table {
    std::vector<Align> aligns;
    std::vector<Inlines> header;
    std::vector<std::vector<Inlines>> rows;
    bool operator==(const Table &) const = default;
};
struct RawHtml {
    std::string text;
    bool operator==(const RawHtml &) const = default;
};

// Woven-only blocks, produced from chunk results.
struct EchoedCode {
    std::string lang;
    std::string text;
    bool operator==(const EchoedCode &) const = default;
};
struct OutputBlock {
    std::vector<Segment> segments;
    bool operator==(const OutputBlock &) const = default;
};
struct FigureBlock {
    FigureRef figure;
    double width = 0;    // inches
    double height = 0;
    bool operator==(const FigureBlock &) const = default;
};
struct TableBlock {
    StructuredTable table;
    bool operator==(const TableBlock &) const = default;
};
struct AppendixMarker {
    bool operator==(const AppendixMarker &) const = default;
};
struct ReferenceEntry {
    std::string key;
    std::string text;
    bool operator==(const ReferenceEntry &) const = default;
};
struct ReferenceList {
    std::vector<ReferenceEntry> entries;
    bool operator==(const ReferenceList &) const = default;
};

struct Block {
    using Node = std::variant<Heading, Paragraph, BulletList, OrderedList, BlockQuote, FencedCode, CodeChunk, Table,
                              RawHtml, EchoedCode, OutputBlock, FigureBlock, TableBlock, AppendixMarker,
                              ReferenceList>;
    Node node;
    int line = 0;       // first source line (1-based), 0 for generated blocks
    int end_line = 0;   // last source line, inclusive

    template <typename T>
    bool is() const { return std::holds_alternative<T>(node); }
    template <typename T>
    const T &as() const { return std::get<T>(node); }
    template <typename T>
    T &as() { return std::get<T>(node); }

    bool operator==(const Block &) const = default;
};

struct SourceDocument {
    FrontMatter front;
    Blocks blocks;
    int body_start_line = 1;
    int chunk_count = 0;
    int inline_eval_count = 0;
};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// Concatenated text of an inline list, markup dropped.
std::string plain_text(const Inlines &inlines);

}  // namespace weave
