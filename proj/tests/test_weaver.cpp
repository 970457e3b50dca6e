#include "weave/weaver.hpp"

#include <doctest.h>

#include <random>

using namespace weave;

namespace {

struct Fixture {
    SourceDocument doc;
    std::vector<ChunkPlan> plans;
    std::map<int, ChunkResult> results;
    std::map<int, std::string> values;
    Diagnostics diags;

    explicit Fixture(std::string_view source) : doc(parse_document(source, {"calc"})), plans(plan_chunks(doc, 7, 5)) {}

    WovenDocument run(CitationIndex *citations = nullptr)
    {
        WeaveInputs in{&plans, &results, &values, citations};
        return weave::weave(doc, in, diags);
    }
};

// One artifact of every kind, in a fixed emission order.
ChunkResult everything()
{
    ChunkResult r;
    r.artifacts = {Segment{Stream::Stdout, "out"},     Segment{Stream::Message, "msg"},
                   Segment{Stream::Warning, "warn"},   FigureRef{"c-1.svg", FigureFormat::Svg, 7, 5},
                   StructuredTable{{"h"}, {{"1"}}},     Segment{Stream::Value, "42"}};
    return r;
}

std::vector<std::string> kinds(const Blocks &blocks)
{
    std::vector<std::string> out;
    for (const auto &b : blocks)
        out.push_back(std::visit(overloaded{
                                     [](const Heading &) { return std::string("heading"); },
                                     [](const Paragraph &) { return std::string("para"); },
                                     [](const EchoedCode &) { return std::string("code"); },
                                     [](const OutputBlock &) { return std::string("output"); },
                                     [](const FigureBlock &) { return std::string("figure"); },
                                     [](const TableBlock &) { return std::string("table"); },
                                     [](const AppendixMarker &) { return std::string("appendix"); },
                                     [](const ReferenceList &) { return std::string("refs"); },
                                     [](const auto &) { return std::string("other"); },
                                 },
                                 b.node));
    return out;
}

// Flattened visible artifact sequence of woven blocks.
std::vector<Artifact> artifacts_of(const Blocks &blocks)
{
    std::vector<Artifact> out;
    for (const auto &b : blocks) {
        if (b.is<OutputBlock>())
            for (const auto &s : b.as<OutputBlock>().segments)
                out.push_back(s);
        else if (b.is<FigureBlock>())
            out.push_back(b.as<FigureBlock>().figure);
        else if (b.is<TableBlock>())
            out.push_back(b.as<TableBlock>().table);
    }
    return out;
}

}  // namespace

TEST_SUITE("weaver") {

TEST_CASE("prose without chunks, inline code or citations is unchanged")
{
    const char *src = "# Title\n\nSome *text* with `code`.\n\n- a\n- b\n\n> quote\n";
    Fixture f(src);
    auto woven = f.run();
    CHECK(woven.blocks == f.doc.blocks);
    CHECK(f.diags.empty());
}

TEST_CASE("default chunk: code then grouped output, figure and table in emission order")
{
    Fixture f("```{calc}\nx\n```\n");
    f.results[0] = everything();
    auto b = f.run().blocks;
    CHECK(kinds(b) == std::vector<std::string>{"code", "output", "figure", "table", "output"});
    CHECK(b[0].as<EchoedCode>() == EchoedCode{"calc", "x"});
    CHECK(b[1].as<OutputBlock>().segments.size() == 3);
    CHECK(b[4].as<OutputBlock>().segments[0].text == "42");
    CHECK(b[0].line == 1);
}

TEST_CASE("visibility matches the options for every combination")
{
    for (int mask = 0; mask < 32; ++mask) {
        ChunkOptions o;
        o.echo = mask & 1;
        o.include = mask & 2;
        o.results = (mask & 4) ? ResultsMode::Hide : ResultsMode::Markup;
        o.message = mask & 8;
        o.warning = mask & 16;
        auto visible = visible_artifacts(o, everything());
        auto v = visibility(o);
        std::size_t expect = 0;
        if (v.output)
            expect += 4;   // stdout, figure, table, value
        if (v.messages)
            ++expect;
        if (v.warnings)
            ++expect;
        CAPTURE(mask);
        CHECK(visible.size() == expect);
    }
}

TEST_CASE("include=FALSE leaves nothing, echo=FALSE drops only the code")
{
    Fixture f("```{calc, include=FALSE}\nx\n```\n\n```{calc, echo=FALSE}\ny\n```\n");
    f.results[0] = everything();
    f.results[1] = everything();
    auto b = f.run().blocks;
    CHECK(kinds(b) == std::vector<std::string>{"output", "figure", "table", "output"});
}

TEST_CASE("figure blocks use the chunk's figure size")
{
    Fixture f("```{calc, fig.width=3, fig.height=2}\nplot([1])\n```\n");
    ChunkResult r;
    r.artifacts = {FigureRef{"1-1.svg", FigureFormat::Svg, 9, 9}};
    f.results[0] = r;
    auto b = f.run().blocks;
    REQUIRE(kinds(b) == std::vector<std::string>{"code", "figure"});
    CHECK(b[1].as<FigureBlock>().width == 3);
    CHECK(b[1].as<FigureBlock>().height == 2);
}

TEST_CASE("deferred output moves to the appendix and is conserved")
{
    std::mt19937 rng(23);
    for (int round = 0; round < 200; ++round) {
        std::string src;
        int n = 1 + static_cast<int>(rng() % 6);
        std::vector<bool> deferred;
        for (int i = 0; i < n; ++i) {
            bool d = rng() % 2;
            deferred.push_back(d);
            src += "Para " + std::to_string(i) + "\n\n```{calc" + (d ? ", defer_output=TRUE" : "") + "}\nx\n```\n\n";
        }
        Fixture plain(src);
        std::string undeferred = src;
        for (std::size_t p; (p = undeferred.find(", defer_output=TRUE")) != std::string::npos;)
            undeferred.erase(p, 19);
        Fixture base(undeferred);
        for (int i = 0; i < n; ++i) {
            ChunkResult r;
            r.artifacts = {Segment{Stream::Stdout, "chunk " + std::to_string(i)},
                           FigureRef{std::to_string(i) + "-1.svg", FigureFormat::Svg, 7, 5}};
            plain.results[i] = r;
            base.results[i] = r;
        }
        auto woven = plain.run().blocks;
        auto reference = base.run().blocks;

        auto all = artifacts_of(woven);
        auto expect = artifacts_of(reference);
        CHECK(all.size() == expect.size());

        auto marker = std::find_if(woven.begin(), woven.end(), [](const Block &b) { return b.is<AppendixMarker>(); });
        const bool any = std::count(deferred.begin(), deferred.end(), true) > 0;
        CHECK((marker != woven.end()) == any);
        Blocks body(woven.begin(), marker);
        Blocks appendix(marker, woven.end());
        // body keeps undeferred artifacts in order, appendix keeps deferred ones in order
        std::vector<Artifact> body_expect, appendix_expect;
        for (int i = 0; i < n; ++i)
            for (std::size_t k = 0; k < 2; ++k)
                (deferred[static_cast<std::size_t>(i)] ? appendix_expect : body_expect)
                    .push_back(expect[static_cast<std::size_t>(i) * 2 + k]);
        CHECK(artifacts_of(body) == body_expect);
        CHECK(artifacts_of(appendix) == appendix_expect);
        if (any) {
            REQUIRE(appendix.size() >= 2);
            CHECK(plain_text(appendix[1].as<Heading>().content) == "Appendix");
        }
    }
}

TEST_CASE("deferred chunk keeps its echoed code in place")
{
    Fixture f("```{calc, defer_output=TRUE}\nx\n```\n\ntext\n");
    f.results[0] = everything();
    auto k = kinds(f.run().blocks);
    CHECK(k == std::vector<std::string>{"code", "para", "appendix", "heading", "output", "figure", "table",
                                        "output"});
}

TEST_CASE("inline evaluations become text")
{
    Fixture f("There are `calc n` cars.\n");
    f.values[0] = "50";
    auto b = f.run().blocks;
    CHECK(plain_text(b[0].as<Paragraph>().content) == "There are 50 cars.");
}

TEST_CASE("missing inline value is an error")
{
    Fixture f("`calc n`\n");
    CHECK_THROWS_AS(f.run(), Error);
}

TEST_CASE("execution order interleaves chunks and inline code")
{
    Fixture f("`calc a`\n\n```{calc}\n1\n```\n\n- `calc b`\n\n  ```{calc}\n  2\n  ```\n\n> `calc c`\n");
    using K = ExecStep::Kind;
    CHECK(execution_order(f.doc) == std::vector<ExecStep>{{K::Inline, 0}, {K::Chunk, 0}, {K::Inline, 1},
                                                          {K::Chunk, 1}, {K::Inline, 2}});
    auto spans = collect_inline_spans(f.doc);
    REQUIRE(spans.size() == 3);
    CHECK(spans[1] == InlineSpan{1, 7, "calc", "b"});
}

TEST_CASE("citations resolve and append references")
{
    auto idx = CitationIndex::parse("@misc{b, author={Bo Bee}, year={2001}, title={B}}\n"
                                    "@misc{a, author={Al Aye}, year={2000}, title={A}}\n");
    Fixture f("See [@b] and [@a] and [@b] and [@zzz].\n\n```{calc, defer_output=TRUE}\n1\n```\n");
    f.results[0].artifacts = {Segment{Stream::Value, "1"}};
    auto b = f.run(&idx).blocks;
    CHECK(plain_text(b[0].as<Paragraph>().content) == "See (Bee 2001) and (Aye 2000) and (Bee 2001) and [@zzz].");
    CHECK(kinds(b) == std::vector<std::string>{"para", "code", "heading", "refs", "appendix", "heading", "output"});
    const auto &refs = b[3].as<ReferenceList>().entries;
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].key == "b");
    CHECK(refs[1].key == "a");
    REQUIRE(f.diags.warnings().size() == 1);
    CHECK(f.diags.warnings()[0].upgrade == ErrorKind::UnresolvedCitation);
}

TEST_CASE("citations without a bibliography warn and stay verbatim")
{
    Fixture f("See [@x].\n");
    auto b = f.run().blocks;
    CHECK(plain_text(b[0].as<Paragraph>().content) == "See [@x].");
    CHECK(f.diags.warnings().size() == 1);
    CHECK(kinds(b) == std::vector<std::string>{"para"});
}

}
