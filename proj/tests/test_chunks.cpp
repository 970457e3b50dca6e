#include "weave/chunks.hpp"

#include <doctest.h>

#include <random>

using namespace weave;

namespace {

template <typename F>
ErrorKind kind_of(F &&f)
{
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Usage;
}

std::vector<ChunkHeader> headers(std::initializer_list<const char *> texts)
{
    std::vector<ChunkHeader> out;
    int line = 1;
    for (const char *t : texts)
        out.push_back(parse_chunk_header(t, line++));
    return out;
}

}  // namespace

TEST_SUITE("chunks") {

TEST_CASE("language only")
{
    auto h = parse_chunk_header("r");
    CHECK(h.lang == "r");
    CHECK_FALSE(h.name.has_value());
    CHECK(h.options == ChunkOptionSet{});
}

TEST_CASE("language, name and options")
{
    auto h = parse_chunk_header("r setup, message=FALSE, fig.width=4.5", 12);
    CHECK(h.lang == "r");
    CHECK(h.name == "setup");
    CHECK(h.options.message == false);
    CHECK(h.options.fig_width == 4.5);
    CHECK(h.line == 12);
}

TEST_CASE("name given after the first comma")
{
    CHECK(parse_chunk_header("calc, cars, echo=FALSE").name == "cars");
}

TEST_CASE("dotted and underscored option keys are the same key")
{
    CHECK(parse_chunk_header("r, fig.height=2").options.fig_height == 2);
    CHECK(parse_chunk_header("r, fig_height=2").options.fig_height == 2);
    CHECK(kind_of([] { parse_chunk_header("r, fig.height=2, fig_height=3"); }) == ErrorKind::DuplicateKey);
}

TEST_CASE("option directly after the language")
{
    auto h = parse_chunk_header("r echo=FALSE");
    CHECK_FALSE(h.name);
    CHECK(h.options.echo == false);
}

TEST_CASE("results values, quoted or bare")
{
    CHECK(parse_chunk_header("r, results='hide'").options.results == ResultsMode::Hide);
    CHECK(parse_chunk_header("r, results=\"markup\"").options.results == ResultsMode::Markup);
    CHECK(parse_chunk_header("r, results=hide").options.results == ResultsMode::Hide);
    CHECK(kind_of([] { parse_chunk_header("r, results='asis'"); }) == ErrorKind::BadValue);
}

TEST_CASE("booleans are case-insensitive TRUE or FALSE")
{
    CHECK(parse_chunk_header("r, echo=true").options.echo == true);
    CHECK(kind_of([] { parse_chunk_header("r, echo=yes"); }) == ErrorKind::BadValue);
    CHECK(kind_of([] { parse_chunk_header("r, echo=T"); }) == ErrorKind::BadValue);
}

TEST_CASE("figure sizes must be positive finite numbers")
{
    CHECK(kind_of([] { parse_chunk_header("r, fig.width=0"); }) == ErrorKind::BadValue);
    CHECK(kind_of([] { parse_chunk_header("r, fig.width=-2"); }) == ErrorKind::BadValue);
    CHECK(kind_of([] { parse_chunk_header("r, fig.width=wide"); }) == ErrorKind::BadValue);
    CHECK(kind_of([] { parse_chunk_header("r, fig.width=inf"); }) == ErrorKind::BadValue);
}

TEST_CASE("unknown option")
{
    try {
        parse_chunk_header("r, cache=TRUE", 40);
        FAIL("expected UnknownOption");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::UnknownOption);
        CHECK(e.line() == 40);
        CHECK(e.message().find("cache") != std::string::npos);
    }
}

TEST_CASE("malformed headers")
{
    CHECK(kind_of([] { parse_chunk_header(""); }) == ErrorKind::BadValue);
    CHECK(kind_of([] { parse_chunk_header("1r"); }) == ErrorKind::BadValue);
    CHECK(kind_of([] { parse_chunk_header("r, , echo=TRUE"); }) == ErrorKind::BadValue);
    CHECK(kind_of([] { parse_chunk_header("r, a, b"); }) == ErrorKind::BadValue);
    CHECK(kind_of([] { parse_chunk_header("r, =TRUE"); }) == ErrorKind::BadValue);
}

TEST_CASE("duplicate option key")
{
    CHECK(kind_of([] { parse_chunk_header("r, echo=TRUE, echo=FALSE"); }) == ErrorKind::DuplicateKey);
}

TEST_CASE("defaults")
{
    ChunkOptions d;
    CHECK(d.echo);
    CHECK(d.include);
    CHECK(d.message);
    CHECK(d.warning);
    CHECK_FALSE(d.error);
    CHECK(d.results == ResultsMode::Markup);
    CHECK(d.fig_width == 7);
    CHECK(d.fig_height == 5);
    CHECK_FALSE(d.defer_output);
}

TEST_CASE("a globals chunk applies to itself and later chunks")
{
    auto hs = headers({"calc", "calc, globals=TRUE, echo=FALSE", "calc", "calc, echo=TRUE"});
    auto opts = apply_global_options(hs, global_directives(hs));
    CHECK(opts[0].echo);
    CHECK_FALSE(opts[1].echo);
    CHECK_FALSE(opts[2].echo);
    CHECK(opts[3].echo);
}

TEST_CASE("later global directives override key by key")
{
    auto hs = headers({"calc, globals=TRUE, echo=FALSE, message=FALSE", "calc", "calc, globals=TRUE, echo=TRUE",
                       "calc"});
    auto opts = apply_global_options(hs, global_directives(hs));
    CHECK_FALSE(opts[1].echo);
    CHECK_FALSE(opts[1].message);
    CHECK(opts[3].echo);
    CHECK_FALSE(opts[3].message);
}

TEST_CASE("chunk options win over globals, globals over defaults")
{
    ChunkOptions defaults;
    defaults.fig_width = 3;
    auto hs = headers({"calc, globals=TRUE, fig.height=2", "calc, fig.height=9", "calc"});
    auto opts = apply_global_options(hs, global_directives(hs), defaults);
    CHECK(opts[0].fig_height == 2);
    CHECK(opts[1].fig_height == 9);
    CHECK(opts[2].fig_height == 2);
    CHECK(opts[2].fig_width == 3);
    CHECK(opts[2].lang == "calc");
}

TEST_CASE("layering law on random stacks")
{
    std::mt19937 rng(17);
    auto maybe_bool = [&]() -> std::optional<bool> {
        switch (rng() % 3) {
        case 0: return std::nullopt;
        case 1: return true;
        default: return false;
        }
    };
    for (int round = 0; round < 500; ++round) {
        ChunkOptionSet g, c;
        g.echo = maybe_bool();
        c.echo = maybe_bool();
        g.warning = maybe_bool();
        c.warning = maybe_bool();
        ChunkOptions defaults;
        defaults.echo = rng() % 2;
        defaults.warning = rng() % 2;
        ChunkHeader h{"calc", {}, c, false, 1};
        auto got = apply_global_options({h}, {{0, g}}, defaults)[0];
        bool expect_echo = c.echo ? *c.echo : g.echo ? *g.echo : defaults.echo;
        bool expect_warning = c.warning ? *c.warning : g.warning ? *g.warning : defaults.warning;
        CHECK(got.echo == expect_echo);
        CHECK(got.warning == expect_warning);
    }
}

TEST_CASE("visibility truth table over echo, include, results and message")
{
    struct Row {
        bool echo, include, hide, message;
        Visibility expect;
    };
    // code = echo && include; output = include && !hide; messages = output && message
    const Row rows[] = {
        {false, false, false, false, {false, false, false, false}},
        {false, false, false, true, {false, false, false, false}},
        {false, false, true, false, {false, false, false, false}},
        {false, false, true, true, {false, false, false, false}},
        {false, true, false, false, {false, true, false, true}},
        {false, true, false, true, {false, true, true, true}},
        {false, true, true, false, {false, false, false, false}},
        {false, true, true, true, {false, false, false, false}},
        {true, false, false, false, {false, false, false, false}},
        {true, false, false, true, {false, false, false, false}},
        {true, false, true, false, {false, false, false, false}},
        {true, false, true, true, {false, false, false, false}},
        {true, true, false, false, {true, true, false, true}},
        {true, true, false, true, {true, true, true, true}},
        {true, true, true, false, {true, false, false, false}},
        {true, true, true, true, {true, false, false, false}},
    };
    for (const auto &r : rows) {
        ChunkOptions o;
        o.echo = r.echo;
        o.include = r.include;
        o.results = r.hide ? ResultsMode::Hide : ResultsMode::Markup;
        o.message = r.message;
        CAPTURE(r.echo);
        CAPTURE(r.include);
        CAPTURE(r.hide);
        CAPTURE(r.message);
        CHECK(visibility(o) == r.expect);
    }
}

TEST_CASE("warning=FALSE hides only warnings")
{
    ChunkOptions o;
    o.warning = false;
    CHECK(visibility(o) == Visibility{true, true, true, false});
}

TEST_CASE("duplicate chunk names name both lines")
{
    auto hs = headers({"calc a", "calc b", "calc a"});
    try {
        validate_chunks(hs, {"calc"});
        FAIL("expected DuplicateChunkName");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::DuplicateChunkName);
        CHECK(e.line() == 3);
        CHECK(e.message().find("line 1") != std::string::npos);
    }
}

TEST_CASE("unnamed chunks never collide")
{
    CHECK_NOTHROW(validate_chunks(headers({"calc", "calc", "calc"}), {"calc"}));
}

TEST_CASE("unknown language")
{
    CHECK(kind_of([] { validate_chunks(headers({"calc", "julia"}), {"calc"}); }) == ErrorKind::UnknownLanguage);
}

TEST_CASE("plan_chunks labels, lines and figure defaults")
{
    auto doc = parse_document("intro\n\n```{calc}\n1\n```\n\n- item\n\n  ```{calc named, fig.width=2}\n  2\n  ```\n",
                              {"calc"});
    auto plans = plan_chunks(doc, 9, 4);
    REQUIRE(plans.size() == 2);
    CHECK(plans[0].label() == "1");
    CHECK(plans[0].line == 3);
    CHECK(plans[0].code == "1");
    CHECK(plans[0].options.fig_width == 9);
    CHECK(plans[0].options.fig_height == 4);
    CHECK(plans[1].label() == "named");
    CHECK(plans[1].options.fig_width == 2);
    CHECK(plans[1].ordinal == 1);
}

}
