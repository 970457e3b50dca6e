#include "weave/front_matter.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace weave;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto &&fn)
{
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Usage;
}

int line_of(auto &&fn)
{
    try {
        fn();
    } catch (const Error &e) {
        return e.line();
    }
    FAIL("expected an error");
    return -1;
}

struct ScratchDir {
    fs::path path;
    ScratchDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("weave-fm-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~ScratchDir() { fs::remove_all(path); }
    void write(const std::string &name, const std::string &text) const { std::ofstream(path / name) << text; }
};

}  // namespace

TEST_SUITE("front_matter") {

TEST_CASE("homework header gives title and one html document")
{
    auto h = parse_front_matter("---\ntitle: \"HW 1\"\noutput: html_document\n---\nHi");
    CHECK(h.front.title == "HW 1");
    REQUIRE(h.front.outputs().size() == 1);
    CHECK(h.front.outputs()[0].kind == OutputKind::HtmlDocument);
    CHECK(h.body == "Hi");
    CHECK(h.body_start_line == 5);
}

TEST_CASE("text without delimiters is all body")
{
    auto h = parse_front_matter("Just text");
    CHECK(h.front == FrontMatter{});
    CHECK(h.body == "Just text");
    CHECK(h.body_start_line == 1);
    CHECK(h.front.outputs() == std::vector<OutputSpec>{OutputSpec{}});
}

TEST_CASE("opening fence without a closing fence is malformed")
{
    CHECK(kind_of([] { parse_front_matter("---\ntitle: x\n"); }) == ErrorKind::MalformedHeader);
    CHECK(line_of([] { parse_front_matter("\n\n---\ntitle: x\n"); }) == 3);
}

TEST_CASE("leading blank lines before the fence are allowed")
{
    auto h = parse_front_matter("\n\n---\ntitle: x\n---\nbody\n");
    CHECK(h.front.title == "x");
    CHECK(h.body_start_line == 6);
}

TEST_CASE("crlf input is normalized")
{
    auto h = parse_front_matter("---\r\ntitle: x\r\n---\r\nbody\r\n");
    CHECK(h.front.title == "x");
    CHECK(h.body == "body\n");
}

TEST_CASE("duplicate top-level keys are rejected with the second line")
{
    CHECK(kind_of([] { parse_front_matter("---\ntitle: a\ntitle: b\n---\n"); }) == ErrorKind::MalformedHeader);
    CHECK(line_of([] { parse_front_matter("---\ntitle: a\ntitle: b\n---\n"); }) == 3);
}

TEST_CASE("nested value where a scalar is expected is rejected")
{
    CHECK(kind_of([] { parse_front_matter("---\ntitle:\n  sub: 1\n---\n"); }) == ErrorKind::MalformedHeader);
}

TEST_CASE("quoted and bare scalars, comments")
{
    auto f = parse_header_text("title: 'It''s'   # a comment\nauthor: Jane Q. Public\ndate: \"2014-01-01\"\n");
    CHECK(f.title == "It's");
    CHECK(f.author == "Jane Q. Public");
    CHECK(f.date == "2014-01-01");
}

TEST_CASE("date is kept verbatim")
{
    CHECK(parse_header_text("date: last Tuesday, maybe\n").date == "last Tuesday, maybe");
}

TEST_CASE("nested output block with options")
{
    auto f = parse_header_text("output:\n  html_document:\n    toc: true\n    theme: united\n    fig_width: 6\n");
    auto outs = f.outputs();
    REQUIRE(outs.size() == 1);
    CHECK(outs[0].toc);
    CHECK(outs[0].theme == "united");
    CHECK(outs[0].fig_width == 6.0);
    CHECK(outs[0].fig_height == 5.0);
}

TEST_CASE("several outputs render simultaneously, in header order")
{
    auto f = parse_header_text("output:\n  html_document: default\n  html_slides:\n    widescreen: true\n");
    auto outs = f.outputs();
    REQUIRE(outs.size() == 2);
    CHECK(outs[0].kind == OutputKind::HtmlDocument);
    CHECK(outs[1].kind == OutputKind::HtmlSlides);
    CHECK(outs[1].widescreen);
}

TEST_CASE("flow list of output kinds")
{
    auto outs = parse_header_text("output: [html_document, html_slides]\n").outputs();
    REQUIRE(outs.size() == 2);
    CHECK(outs[1].kind == OutputKind::HtmlSlides);
}

TEST_CASE("ioslides_presentation is accepted as slides")
{
    auto outs = parse_header_text("output: ioslides_presentation\n").outputs();
    REQUIRE(outs.size() == 1);
    CHECK(outs[0].kind == OutputKind::HtmlSlides);
}

TEST_CASE("top-level output options apply to every format")
{
    auto outs = parse_header_text("toc: true\noutput: [html_document, html_slides]\n").outputs();
    CHECK(outs[0].toc);
    CHECK(outs[1].toc);
}

TEST_CASE("format options override top-level options")
{
    auto outs = parse_header_text("fig_width: 3\noutput:\n  html_document:\n    fig_width: 8\n").outputs();
    CHECK(outs[0].fig_width == 8.0);
}

TEST_CASE("invalid header values")
{
    CHECK(kind_of([] { parse_header_text("fig_width: -1\n"); }) == ErrorKind::MalformedHeader);
    CHECK(kind_of([] { parse_header_text("fig_height: 0\n"); }) == ErrorKind::MalformedHeader);
    CHECK(kind_of([] { parse_header_text("fig_width: wide\n"); }) == ErrorKind::MalformedHeader);
    CHECK(kind_of([] { parse_header_text("toc: sometimes\n"); }) == ErrorKind::MalformedHeader);
    CHECK(kind_of([] { parse_header_text("theme: neon\n"); }) == ErrorKind::MalformedHeader);
    CHECK(kind_of([] { parse_header_text("transition: instant\n"); }) == ErrorKind::MalformedHeader);
    CHECK(kind_of([] { parse_header_text("output: pdf_document\n"); }) == ErrorKind::MalformedHeader);
    CHECK(kind_of([] { parse_header_text("title: \"open\n"); }) == ErrorKind::MalformedHeader);
}

TEST_CASE("transition speeds")
{
    CHECK(parse_header_text("transition: slower\n").outputs()[0].transition == Transition::Slower);
    CHECK(parse_header_text("transition: faster\n").outputs()[0].transition == Transition::Faster);
    CHECK(parse_header_text("transition: default\n").outputs()[0].transition == Transition::Default);
}

TEST_CASE("unknown keys are preserved and reported")
{
    auto f = parse_header_text("title: x\nsubtitle: y\n");
    CHECK(f.extra.at("subtitle") == "y");
    Diagnostics d;
    report_header_warnings(f, d);
    REQUIRE(d.warnings().size() == 1);
    CHECK(d.warnings()[0].upgrade == ErrorKind::UnknownHeaderKey);
}

TEST_CASE("slide-only options on a document are ignored with a warning")
{
    auto f = parse_header_text("output:\n  html_document:\n    widescreen: true\n");
    CHECK(f.outputs()[0].kind == OutputKind::HtmlDocument);
    Diagnostics d;
    report_header_warnings(f, d);
    REQUIRE(d.warnings().size() == 1);
    CHECK_FALSE(d.warnings()[0].upgrade.has_value());
}

TEST_CASE("shared header is read from _header.yml")
{
    ScratchDir dir;
    CHECK_FALSE(load_shared_header(dir.path).has_value());
    dir.write("_header.yml", "toc: true\n");
    auto shared = load_shared_header(dir.path);
    REQUIRE(shared.has_value());
    CHECK(shared->outputs()[0].toc);
    dir.write("_header.yml", "fig_width: -1\n");
    CHECK(kind_of([&] { load_shared_header(dir.path); }) == ErrorKind::MalformedHeader);
}

TEST_CASE("merge: disjoint fields union")
{
    auto m = merge_headers(parse_header_text("toc: true\n"), parse_header_text("title: A\n"));
    CHECK(m.title == "A");
    CHECK(m.outputs()[0].toc);
}

TEST_CASE("merge: local scalar wins")
{
    CHECK(merge_headers(parse_header_text("title: S\n"), parse_header_text("title: L\n")).title == "L");
}

TEST_CASE("merge: local output list replaces the shared list")
{
    auto m = merge_headers(parse_header_text("output: html_slides\n"), parse_header_text("output: html_document\n"));
    REQUIRE(m.outputs().size() == 1);
    CHECK(m.outputs()[0].kind == OutputKind::HtmlDocument);
}

namespace {

std::string random_header(std::mt19937 &rng)
{
    const char *titles[] = {"A", "Report: one", "It's \"quoted\"", "#hash", "x y z", "  padded"};
    const char *themes[] = {"default", "cerulean", "flatly", "journal", "readable", "united"};
    auto pick = [&](auto &arr) { return arr[rng() % std::size(arr)]; };
    auto coin = [&] { return rng() % 2 == 0; };

    FrontMatter f;
    if (coin())
        f.title = pick(titles);
    if (coin())
        f.author = pick(titles);
    if (coin())
        f.date = "2014";
    if (coin())
        f.bibliography = "refs.bib";
    if (coin())
        f.logo = "logo.png";
    if (coin())
        f.common.toc = coin();
    if (coin())
        f.common.fig_width = 1 + static_cast<double>(rng() % 80) / 8;
    const bool slides_first = coin();
    int n = static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
        OutputEntry e;
        e.kind = (i == 0) == slides_first ? OutputKind::HtmlSlides : OutputKind::HtmlDocument;
        if (coin())
            e.options.theme = pick(themes);
        if (coin())
            e.options.widescreen = coin();
        if (coin())
            e.options.transition = coin() ? Transition::Slower : Transition::Faster;
        if (coin())
            e.options.fig_height = 0.5 + static_cast<double>(rng() % 20) / 4;
        f.output_entries.push_back(e);
    }
    if (coin())
        f.extra["subtitle"] = pick(titles);
    return serialize_header(f);
}

}  // namespace

TEST_CASE("round trip: serialize then parse is the identity")
{
    std::mt19937 rng(7);
    for (int i = 0; i < 500; ++i) {
        auto text = random_header(rng);
        auto parsed = parse_header_text(text);
        INFO(text);
        CHECK(parse_header_text(serialize_header(parsed)) == parsed);
    }
}

TEST_CASE("merge is idempotent and defaults are its left identity")
{
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        auto f = parse_header_text(random_header(rng));
        CHECK(merge_headers(f, f) == f);
        CHECK(merge_headers(FrontMatter{}, f) == f);
    }
}

TEST_CASE("parse_front_matter is total on random input")
{
    std::mt19937 rng(3);
    const std::string alphabet = "-:# \n\t\"'abc[],{}0123456789.\r";
    for (int i = 0; i < 3000; ++i) {
        std::string s = rng() % 2 ? "---\n" : "";
        int len = static_cast<int>(rng() % 60);
        for (int k = 0; k < len; ++k)
            s += alphabet[rng() % alphabet.size()];
        try {
            parse_front_matter(s);
        } catch (const Error &e) {
            CHECK(e.kind() == ErrorKind::MalformedHeader);
        }
    }
}

}
