#include "weave/render.hpp"

#include "weave/html.hpp"
#include "weave/markdown.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace weave {

namespace fs = std::filesystem;

namespace {

OutputSpec spec_for(const FrontMatter &front, const std::vector<OutputSpec> &declared, OutputKind kind)
{
    for (const auto &s : declared)
        if (s.kind == kind)
            return s;
    return OutputSpec::resolve(kind, front.common);
}

std::vector<OutputSpec> choose_outputs(const FrontMatter &front, FormatChoice choice)
{
    auto declared = front.outputs();
    switch (choice) {
    case FormatChoice::Header: return declared;
    case FormatChoice::Html: return {spec_for(front, declared, OutputKind::HtmlDocument)};
    case FormatChoice::Slides: return {spec_for(front, declared, OutputKind::HtmlSlides)};
    case FormatChoice::All:
        return {spec_for(front, declared, OutputKind::HtmlDocument), spec_for(front, declared, OutputKind::HtmlSlides)};
    }
    return declared;
}

void log(const RenderOptions &options, std::string_view line)
{
    if (options.log)
        options.log(line);
}

}  // namespace

std::string read_text_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, fmt::format("cannot read '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void enforce_strict(const Diagnostics &diagnostics)
{
    for (const auto &d : diagnostics.warnings())
        if (d.upgrade)
            throw Error(*d.upgrade, d.message, d.line);
}

PreparedDocument prepare_document(std::string_view source, const fs::path &source_dir, const RenderOptions &options)
{
    PreparedDocument p;
    const auto languages = options.kernels.languages();
    p.doc = parse_document(source, languages);
    if (auto shared = load_shared_header(source_dir))
        p.doc.front = merge_headers(*shared, p.doc.front);

    report_header_warnings(p.doc.front, p.diagnostics);
    if (options.strict)
        enforce_strict(p.diagnostics);

    p.outputs = choose_outputs(p.doc.front, options.format);
    p.plans = plan_chunks(p.doc, p.outputs.front().fig_width, p.outputs.front().fig_height);
    std::vector<ChunkHeader> headers;
    for (const auto &plan : p.plans)
        headers.push_back(plan.header);
    validate_chunks(headers, languages);

    if (p.doc.front.bibliography) {
        fs::path bib = *p.doc.front.bibliography;
        if (bib.is_relative())
            bib = source_dir / bib;
        p.citations = CitationIndex::load(bib);
    }
    return p;
}

Execution execute_document(const PreparedDocument &prepared, const RenderOptions &options,
                           const fs::path &figure_dir)
{
    Execution ex;
    std::map<std::string, std::unique_ptr<Session>, std::less<>> sessions;
    auto session_for = [&](const std::string &lang) -> Session & {
        auto it = sessions.find(lang);
        if (it == sessions.end()) {
            log(options, fmt::format("starting kernel for '{}'", lang));
            auto s = std::make_unique<Session>(lang, options.kernels.open(lang), figure_dir, options.timeouts);
            it = sessions.emplace(lang, std::move(s)).first;
        }
        return *it->second;
    };

    std::map<int, InlineSpan> spans;
    for (auto &span : collect_inline_spans(prepared.doc))
        spans.emplace(span.ordinal, span);

    for (const auto &step : execution_order(prepared.doc)) {
        if (step.kind == ExecStep::Kind::Chunk) {
            const auto &plan = prepared.plans.at(static_cast<std::size_t>(step.ordinal));
            const auto label = plan.label();
            try {
                log(options, fmt::format("chunk '{}' (line {})", label, plan.line));
                auto result = session_for(plan.options.lang).execute_chunk(plan.code, plan.options, label);
                if (result.status == ChunkStatus::Error && !plan.options.error)
                    throw Error(ErrorKind::ChunkError, result.error_text());
                ex.results.emplace(step.ordinal, std::move(result));
            } catch (Error &e) {
                if (e.line() == 0)
                    e.at_line(plan.line);
                if (e.location().chunk.empty())
                    e.in_chunk(label);
                throw;
            }
        } else {
            const auto &span = spans.at(step.ordinal);
            try {
                ex.inline_values.emplace(step.ordinal, session_for(span.lang).evaluate_inline(span.expr));
            } catch (Error &e) {
                if (e.line() == 0)
                    e.at_line(span.line);
                throw;
            }
        }
    }
    for (auto &[lang, session] : sessions)
        session->shutdown();
    return ex;
}

WovenDocument weave_document(PreparedDocument &prepared, const Execution &execution, bool strict)
{
    WeaveInputs in;
    in.plans = &prepared.plans;
    in.results = &execution.results;
    in.inline_values = &execution.inline_values;
    in.citations = prepared.citations ? &*prepared.citations : nullptr;
    auto woven = weave(prepared.doc, in, prepared.diagnostics);
    if (strict)
        enforce_strict(prepared.diagnostics);
    return woven;
}

TempDir::TempDir()
{
    auto pattern = (fs::temp_directory_path() / "weave-XXXXXX").string();
    if (!::mkdtemp(pattern.data()))
        throw Error(ErrorKind::IoError, fmt::format("cannot create a temporary directory: {}", std::strerror(errno)));
    path_ = pattern;
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

RenderOutcome render_file(const fs::path &input, const RenderOptions &options)
{
    try {
        const auto source = read_text_file(input);
        const auto source_dir = input.has_parent_path() ? input.parent_path() : fs::path(".");
        auto prepared = prepare_document(source, source_dir, options);

        TempDir figures;
        auto execution = execute_document(prepared, options, figures.path());
        auto woven = weave_document(prepared, execution, options.strict);

        OutputRequest request;
        request.out_dir = options.output_dir.value_or(source_dir);
        request.stem = input.stem().string();
        request.figure_dir = figures.path();
        request.source_dir = source_dir;
        request.specs = prepared.outputs;

        RenderOutcome outcome;
        outcome.written = write_outputs(woven, request);
        outcome.warnings = prepared.diagnostics.warnings();
        return outcome;
    } catch (Error &e) {
        if (e.location().file.empty())
            e.in_file(input.string());
        throw;
    }
}

}  // namespace weave
