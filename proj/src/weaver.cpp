#include "weave/weaver.hpp"

#include <fmt/format.h>

namespace weave {

namespace {

template <typename F>
void for_each_inline(const Inlines &inlines, F &&f)
{
    for (const auto &node : inlines) {
        f(node);
        std::visit(overloaded{
                       [&](const Emph &e) { for_each_inline(e.children, f); },
                       [&](const Strong &e) { for_each_inline(e.children, f); },
                       [&](const Superscript &e) { for_each_inline(e.children, f); },
                       [&](const Subscript &e) { for_each_inline(e.children, f); },
                       [&](const Strikeout &e) { for_each_inline(e.children, f); },
                       [&](const Link &l) { for_each_inline(l.children, f); },
                       [](const auto &) {},
                   },
                   node.node);
    }
}

// Calls on_inlines for every prose run and on_chunk for every chunk, in
// document order.
template <typename OnInlines, typename OnChunk>
void walk(const Blocks &blocks, OnInlines &&on_inlines, OnChunk &&on_chunk)
{
    for (const auto &b : blocks) {
        std::visit(overloaded{
                       [&](const Heading &h) { on_inlines(h.content); },
                       [&](const Paragraph &p) { on_inlines(p.content); },
                       [&](const BulletList &l) {
                           for (const auto &item : l.items)
                               walk(item, on_inlines, on_chunk);
                       },
                       [&](const OrderedList &l) {
                           for (const auto &item : l.items)
                               walk(item, on_inlines, on_chunk);
                       },
                       [&](const BlockQuote &q) { walk(q.blocks, on_inlines, on_chunk); },
                       [&](const Table &t) {
                           for (const auto &cell : t.header)
                               on_inlines(cell);
                           for (const auto &row : t.rows)
                               for (const auto &cell : row)
                                   on_inlines(cell);
                       },
                       [&](const CodeChunk &c) { on_chunk(c); },
                       [](const auto &) {},
                   },
                   b.node);
    }
}

bool shown(const Artifact &a, const Visibility &v)
{
    if (const auto *s = std::get_if<Segment>(&a)) {
        switch (s->stream) {
        case Stream::Message: return v.messages;
        case Stream::Warning: return v.warnings;
        default: return v.output;
        }
    }
    return v.output;
}

class Weaver {
public:
    Weaver(const WeaveInputs &in, Diagnostics &diags) : in_(in), diags_(diags) {}

    Blocks blocks(const Blocks &source)
    {
        Blocks out;
        for (const auto &b : source)
            block(b, out);
        return out;
    }

    void finish(Blocks &out)
    {
        if (in_.citations && !in_.citations->cited().empty()) {
            out.push_back(generated(Heading{2, {Text{"References"}}, {}}));
            out.push_back(generated(ReferenceList{in_.citations->references()}));
        }
        if (!appendix_.empty()) {
            out.push_back(generated(AppendixMarker{}));
            out.push_back(generated(Heading{2, {Text{"Appendix"}}, {}}));
            for (auto &b : appendix_)
                out.push_back(std::move(b));
        }
    }

private:
    static Block generated(Block::Node node) { return Block{std::move(node), 0, 0}; }

    void block(const Block &b, Blocks &out)
    {
        Block copy{b.node, b.line, b.end_line};
        std::visit(overloaded{
                       [&](Heading &h) { h.content = inlines(h.content); },
                       [&](Paragraph &p) { p.content = inlines(p.content); },
                       [&](BulletList &l) {
                           for (auto &item : l.items)
                               item = blocks(item);
                       },
                       [&](OrderedList &l) {
                           for (auto &item : l.items)
                               item = blocks(item);
                       },
                       [&](BlockQuote &q) { q.blocks = blocks(q.blocks); },
                       [&](Table &t) {
                           for (auto &cell : t.header)
                               cell = inlines(cell);
                           for (auto &row : t.rows)
                               for (auto &cell : row)
                                   cell = inlines(cell);
                       },
                       [](auto &) {},
                   },
                   copy.node);
        if (copy.is<CodeChunk>())
            chunk(copy, out);
        else
            out.push_back(std::move(copy));
    }

    void chunk(const Block &b, Blocks &out)
    {
        const auto &c = b.as<CodeChunk>();
        const auto &plan = in_.plans->at(static_cast<std::size_t>(c.ordinal));
        const auto vis = visibility(plan.options);
        if (vis.code)
            out.push_back(Block{EchoedCode{plan.options.lang, c.code}, b.line, b.end_line});

        auto it = in_.results->find(c.ordinal);
        if (it == in_.results->end())
            return;
        Blocks &target = plan.options.defer_output ? appendix_ : out;
        bool grouping = false;   // target.back() is this chunk's open output block
        for (auto &artifact : visible_artifacts(plan.options, it->second)) {
            std::visit(overloaded{
                           [&](Segment &s) {
                               if (!grouping)
                                   target.push_back(generated(OutputBlock{}));
                               target.back().as<OutputBlock>().segments.push_back(std::move(s));
                               grouping = true;
                           },
                           [&](FigureRef &f) {
                               target.push_back(generated(
                                   FigureBlock{std::move(f), plan.options.fig_width, plan.options.fig_height}));
                               grouping = false;
                           },
                           [&](StructuredTable &t) {
                               target.push_back(generated(TableBlock{std::move(t)}));
                               grouping = false;
                           },
                       },
                       artifact);
        }
    }

    Inlines inlines(const Inlines &source)
    {
        Inlines out;
        for (const auto &node : source) {
            std::visit(overloaded{
                           [&](const InlineEval &e) { out.push_back(Text{inline_value(e)}); },
                           [&](const Citation &c) { out.push_back(citation(c)); },
                           [&](const Emph &e) { out.push_back(Emph{inlines(e.children)}); },
                           [&](const Strong &e) { out.push_back(Strong{inlines(e.children)}); },
                           [&](const Superscript &e) { out.push_back(Superscript{inlines(e.children)}); },
                           [&](const Subscript &e) { out.push_back(Subscript{inlines(e.children)}); },
                           [&](const Strikeout &e) { out.push_back(Strikeout{inlines(e.children)}); },
                           [&](const Link &l) { out.push_back(Link{inlines(l.children), l.url}); },
                           [&](const auto &other) { out.push_back(other); },
                       },
                       node.node);
        }
        return out;
    }

    std::string inline_value(const InlineEval &e)
    {
        if (in_.inline_values) {
            auto it = in_.inline_values->find(e.ordinal);
            if (it != in_.inline_values->end())
                return it->second;
        }
        throw Error(ErrorKind::InlineEvalError, fmt::format("inline `{} {}` was not evaluated", e.lang, e.expr),
                    e.line);
    }

    Inline citation(const Citation &c)
    {
        if (in_.citations)
            return format_citation(*in_.citations, c.key, diags_, c.line);
        diags_.warn(c.line, fmt::format("citation '@{}' but no bibliography is configured", c.key),
                    ErrorKind::UnresolvedCitation);
        return Text{fmt::format("[@{}]", c.key)};
    }

    const WeaveInputs &in_;
    Diagnostics &diags_;
    Blocks appendix_;
};

}  // namespace

std::vector<InlineSpan> collect_inline_spans(const SourceDocument &doc)
{
    std::vector<InlineSpan> spans;
    walk(
        doc.blocks,
        [&](const Inlines &run) {
            for_each_inline(run, [&](const Inline &node) {
                if (node.is<InlineEval>()) {
                    const auto &e = node.as<InlineEval>();
                    spans.push_back({e.ordinal, e.line, e.lang, e.expr});
                }
            });
        },
        [](const CodeChunk &) {});
    return spans;
}

std::vector<ExecStep> execution_order(const SourceDocument &doc)
{
    std::vector<ExecStep> steps;
    walk(
        doc.blocks,
        [&](const Inlines &run) {
            for_each_inline(run, [&](const Inline &node) {
                if (node.is<InlineEval>())
                    steps.push_back({ExecStep::Kind::Inline, node.as<InlineEval>().ordinal});
            });
        },
        [&](const CodeChunk &c) { steps.push_back({ExecStep::Kind::Chunk, c.ordinal}); });
    return steps;
}

std::vector<Artifact> visible_artifacts(const ChunkOptions &opts, const ChunkResult &result)
{
    const auto vis = visibility(opts);
    std::vector<Artifact> out;
    for (const auto &a : result.artifacts)
        if (shown(a, vis))
            out.push_back(a);
    return out;
}

WovenDocument weave(const SourceDocument &doc, const WeaveInputs &inputs, Diagnostics &diags)
{
    static const std::vector<ChunkPlan> no_plans;
    static const std::map<int, ChunkResult> no_results;
    WeaveInputs in = inputs;
    if (!in.plans)
        in.plans = &no_plans;
    if (!in.results)
        in.results = &no_results;

    Weaver w(in, diags);
    WovenDocument out{doc.front, w.blocks(doc.blocks)};
    w.finish(out.blocks);
    return out;
}

}  // namespace weave
