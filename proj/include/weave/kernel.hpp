#pragma once

#include "weave/calc.hpp"
#include "weave/chunks.hpp"
#include "weave/diagnostics.hpp"
#include "weave/markdown.hpp"
#include "weave/protocol.hpp"
#include "weave/result.hpp"

#include <sys/types.h>

#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace weave {

using Millis = std::chrono::milliseconds;

struct Timeouts {
    Millis handshake{10'000};
    Millis exec{30'000};
};

/// A line-oriented duplex channel to one kernel.
class Transport {
public:
    enum class Status { Line, Timeout, Closed };

    struct Received {
        Status status;
        std::string line;
    };

    virtual ~Transport() = default;

    /// Sends one message line (a newline is appended). Throws
    /// Error(KernelCrash) when the kernel can no longer be written to.
    virtual void send(std::string_view line) = 0;

    /// Waits up to `timeout` for the next complete line.
    virtual Received receive(Millis timeout) = 0;

    /// Releases the kernel; safe to call repeatedly.
    virtual void close() = 0;
};

/// Runs the calc kernel in-process.
class BuiltinTransport : public Transport {
public:
    void send(std::string_view line) override;
    Received receive(Millis timeout) override;
    void close() override;

private:
    calc::CalcKernel kernel_;
    std::deque<std::string> pending_;
    bool closed_ = false;
};

/// Runs `/bin/sh -c <command>` with pipes on stdin and stdout. The child's
/// stderr is inherited.
class SubprocessTransport : public Transport {
public:
    /// Throws Error(KernelStartFailure) if the process cannot be spawned.
    explicit SubprocessTransport(const std::string &command, Millis grace = Millis{2'000});
    ~SubprocessTransport() override;

    SubprocessTransport(const SubprocessTransport &) = delete;
    SubprocessTransport &operator=(const SubprocessTransport &) = delete;

    void send(std::string_view line) override;
    Received receive(Millis timeout) override;
    void close() override;

    pid_t pid() const noexcept { return pid_; }

private:
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    bool eof_ = false;
    Millis grace_;
};

using TransportFactory = std::function<std::unique_ptr<Transport>()>;

/// Maps chunk languages to the kernels that run them.
class KernelRegistry {
public:
    /// A registry that knows only the builtin `calc` kernel.
    static KernelRegistry with_builtins();

    void add(std::string lang, TransportFactory factory);
    void add_command(std::string lang, std::string command);

    bool contains(std::string_view lang) const;
    LanguageSet languages() const;

    /// Throws Error(KernelStartFailure) for an unregistered language.
    std::unique_ptr<Transport> open(std::string_view lang) const;

private:
    std::map<std::string, TransportFactory, std::less<>> factories_;
};

/// One kernel's workspace for the duration of a render.
class Session {
public:
    enum class State { Starting, Ready, Busy, Dead };

    /// Performs the hello handshake. Throws KernelStartFailure,
    /// HandshakeTimeout or KernelProtocolError.
    Session(std::string lang, std::unique_ptr<Transport> transport, std::filesystem::path figure_dir,
            Timeouts timeouts = {});
    ~Session();

    Session(const Session &) = delete;
    Session &operator=(const Session &) = delete;

    /// Runs one chunk. Artifacts keep kernel emission order; figure paths are
    /// made relative to the figure directory. Throws KernelCrash,
    /// ExecTimeout or KernelProtocolError; a chunk that merely fails returns
    /// status Error.
    ChunkResult execute_chunk(std::string_view code, const ChunkOptions &opts, std::string_view label);

    /// Throws InlineEvalError or MultilineInlineResult, plus the transport
    /// errors of execute_chunk.
    std::string evaluate_inline(std::string_view expr);

    /// Idempotent.
    void shutdown() noexcept;

    State state() const noexcept { return state_; }
    const std::string &lang() const noexcept { return lang_; }
    const std::vector<std::string> &kernel_languages() const noexcept { return kernel_langs_; }
    const std::filesystem::path &figure_dir() const noexcept { return figure_dir_; }

private:
    std::string receive_line(std::chrono::steady_clock::time_point deadline, ErrorKind on_timeout,
                             std::string_view waiting_for);
    [[noreturn]] void fail(ErrorKind kind, std::string message);
    FigureRef accept_figure(const KernelMessage &m) const;

    std::string lang_;
    std::unique_ptr<Transport> transport_;
    std::filesystem::path figure_dir_;
    Timeouts timeouts_;
    State state_ = State::Starting;
    std::int64_t next_id_ = 1;
    std::vector<std::string> kernel_langs_;
};

}  // namespace weave
