#include "weave/cli.hpp"

#include "weave/render.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cctype>

extern char **environ;

namespace weave {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view env_prefix = "WEAVE_KERNEL_";

struct CommonFlags {
    std::string input;
    std::vector<std::string> kernels;
    bool strict = false;
    bool verbose = false;
};

void add_common(CLI::App &cmd, CommonFlags &flags)
{
    cmd.add_option("input", flags.input, "Source document")->required();
    cmd.add_option("--kernel", flags.kernels, "Register an external kernel as LANG=COMMAND (repeatable)");
    cmd.add_flag("--strict", flags.strict, "Treat unresolved citations and unknown header keys as errors");
    cmd.add_flag("--verbose", flags.verbose, "Report progress and every warning");
}

void register_kernels(KernelRegistry &registry, const std::vector<std::string> &specs, const Environment &env)
{
    for (const auto &[name, command] : env) {
        if (name.size() <= env_prefix.size() || name.compare(0, env_prefix.size(), env_prefix) != 0 || command.empty())
            continue;
        std::string lang = name.substr(env_prefix.size());
        std::transform(lang.begin(), lang.end(), lang.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        registry.add_command(lang, command);
    }
    for (const auto &spec : specs) {
        auto eq = spec.find('=');
        if (eq == 0 || eq == std::string::npos || eq + 1 == spec.size())
            throw Error(ErrorKind::Usage, fmt::format("--kernel expects LANG=COMMAND, got '{}'", spec));
        registry.add_command(spec.substr(0, eq), spec.substr(eq + 1));
    }
}

void print_warnings(std::ostream &err, const std::string &file, const std::vector<Diagnostic> &warnings, bool verbose)
{
    for (const auto &w : warnings) {
        if (!verbose && w.upgrade == ErrorKind::UnknownHeaderKey)
            continue;
        err << file << ':';
        if (w.line > 0)
            err << w.line << ':';
        err << " warning: " << w.message << '\n';
    }
}

std::string yes_no(bool b)
{
    return b ? "TRUE" : "FALSE";
}

void print_chunk_table(std::ostream &out, const std::vector<ChunkPlan> &plans)
{
    out << fmt::format("{:<6}{:<6}{:<8}{:<16}{:<6}{:<8}{:<8}{:<8}{:<8}{:<6}{:<8}{:<8}{}\n", "chunk", "line", "lang",
                       "name", "echo", "include", "results", "message", "warning", "error", "fig_w", "fig_h", "defer");
    for (const auto &p : plans) {
        const auto &o = p.options;
        out << fmt::format("{:<6}{:<6}{:<8}{:<16}{:<6}{:<8}{:<8}{:<8}{:<8}{:<6}{:<8}{:<8}{}\n", p.ordinal + 1, p.line,
                           o.lang, o.name.value_or("-"), yes_no(o.echo), yes_no(o.include),
                           o.results == ResultsMode::Markup ? "markup" : "hide", yes_no(o.message), yes_no(o.warning),
                           yes_no(o.error), calc::format_number(o.fig_width), calc::format_number(o.fig_height),
                           yes_no(o.defer_output));
    }
}

}  // namespace

Environment current_environment()
{
    Environment env;
    for (char **e = environ; e && *e; ++e) {
        std::string_view entry(*e);
        auto eq = entry.find('=');
        if (eq != std::string_view::npos)
            env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
    }
    return env;
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err, const Environment &env)
{
    CLI::App app{"Render literate documents with executable code chunks to HTML", "weave"};
    app.require_subcommand(1);

    CommonFlags render_flags;
    std::string output_dir;
    std::string format = "header";
    double timeout_secs = 0;
    auto *render = app.add_subcommand("render", "Execute a document and write HTML outputs");
    add_common(*render, render_flags);
    render->add_option("--output-dir", output_dir, "Directory for outputs (default: next to the input)");
    render->add_option("--format", format, "html, slides or all (default: as the header says)")
        ->check(CLI::IsMember({"html", "slides", "all", "header"}));
    render->add_option("--timeout-secs", timeout_secs, "Per-chunk execution timeout in seconds")
        ->check(CLI::PositiveNumber);

    CommonFlags check_flags;
    auto *check = app.add_subcommand("check", "Parse and validate a document without running it");
    add_common(*check, check_flags);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "weave: " << e.what() << '\n';
        return exit_class(ErrorKind::Usage);
    }

    const bool rendering = render->parsed();
    const auto &flags = rendering ? render_flags : check_flags;
    const fs::path input = flags.input;
    RenderOptions options;
    options.strict = flags.strict;
    if (flags.verbose)
        options.log = [&err](std::string_view line) { err << "weave: " << line << '\n'; };

    try {
        register_kernels(options.kernels, flags.kernels, env);
        if (rendering) {
            if (!output_dir.empty())
                options.output_dir = output_dir;
            if (format == "html")
                options.format = FormatChoice::Html;
            else if (format == "slides")
                options.format = FormatChoice::Slides;
            else if (format == "all")
                options.format = FormatChoice::All;
            if (timeout_secs > 0)
                options.timeouts.exec = Millis{static_cast<long long>(timeout_secs * 1000)};

            auto outcome = render_file(input, options);
            print_warnings(err, input.string(), outcome.warnings, flags.verbose);
            for (const auto &path : outcome.written)
                out << path.string() << '\n';
        } else {
            try {
                const auto source = read_text_file(input);
                auto prepared = prepare_document(source, input.has_parent_path() ? input.parent_path() : fs::path("."),
                                                 options);
                print_chunk_table(out, prepared.plans);
                print_warnings(err, input.string(), prepared.diagnostics.warnings(), flags.verbose);
            } catch (Error &e) {
                if (e.location().file.empty())
                    e.in_file(input.string());
                throw;
            }
        }
    } catch (const Error &e) {
        err << e.describe() << '\n';
        return exit_class(e.kind());
    }
    return 0;
}

}  // namespace weave
