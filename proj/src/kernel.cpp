#include "weave/kernel.hpp"

#include "weave/diagnostics.hpp"
#include "weave/protocol.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char **environ;

namespace weave {

using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------- builtin

void BuiltinTransport::send(std::string_view line)
{
    if (closed_)
        throw Error(ErrorKind::KernelCrash, "kernel is closed");
    for (auto &reply : kernel_.handle(line))
        pending_.push_back(std::move(reply));
    if (kernel_.finished())
        closed_ = true;
}

Transport::Received BuiltinTransport::receive(Millis)
{
    if (pending_.empty())
        return {closed_ ? Status::Closed : Status::Timeout, {}};
    Received r{Status::Line, std::move(pending_.front())};
    pending_.pop_front();
    return r;
}

void BuiltinTransport::close()
{
    closed_ = true;
    pending_.clear();
}

// ------------------------------------------------------------- subprocess

namespace {

void close_fd(int &fd)
{
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

// Waits for `pid` to exit without reaping it, so its process group id
// stays reserved until the caller is done signalling the group.
bool exited(pid_t pid, Millis within)
{
    const auto deadline = Clock::now() + within;
    for (;;) {
        siginfo_t info{};
        int r = ::waitid(P_PID, static_cast<id_t>(pid), &info, WEXITED | WNOHANG | WNOWAIT);
        if ((r == 0 && info.si_pid == pid) || (r < 0 && errno != EINTR))
            return true;
        if (Clock::now() >= deadline)
            return false;
        std::this_thread::sleep_for(Millis{5});
    }
}

}  // namespace

SubprocessTransport::SubprocessTransport(const std::string &command, Millis grace) : grace_(grace)
{
    std::signal(SIGPIPE, SIG_IGN);

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0)
        throw Error(ErrorKind::KernelStartFailure, fmt::format("pipe: {}", std::strerror(errno)));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw Error(ErrorKind::KernelStartFailure, fmt::format("pipe: {}", std::strerror(errno)));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

    std::string shell = "/bin/sh";
    std::string flag = "-c";
    std::string cmd = command;
    char *argv[] = {shell.data(), flag.data(), cmd.data(), nullptr};
    posix_spawnattr_t attrs;
    posix_spawnattr_init(&attrs);
    posix_spawnattr_setflags(&attrs, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attrs, 0);
    int rc = ::posix_spawn(&pid_, shell.c_str(), &actions, &attrs, argv, environ);
    posix_spawnattr_destroy(&attrs);
    posix_spawn_file_actions_destroy(&actions);

    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    if (rc != 0) {
        pid_ = -1;
        close_fd(to_child_);
        close_fd(from_child_);
        throw Error(ErrorKind::KernelStartFailure, fmt::format("cannot run '{}': {}", command, std::strerror(rc)));
    }
}

SubprocessTransport::~SubprocessTransport()
{
    close();
}

void SubprocessTransport::send(std::string_view line)
{
    std::string data(line);
    data += '\n';
    std::size_t written = 0;
    while (written < data.size()) {
        if (to_child_ < 0)
            throw Error(ErrorKind::KernelCrash, "kernel is closed");
        ssize_t n = ::write(to_child_, data.data() + written, data.size() - written);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw Error(ErrorKind::KernelCrash, fmt::format("cannot write to kernel: {}", std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }
}

Transport::Received SubprocessTransport::receive(Millis timeout)
{
    const auto deadline = Clock::now() + timeout;
    for (;;) {
        auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            Received r{Status::Line, buffer_.substr(0, nl)};
            buffer_.erase(0, nl + 1);
            if (!r.line.empty() && r.line.back() == '\r')
                r.line.pop_back();
            return r;
        }
        if (eof_ || from_child_ < 0)
            return {Status::Closed, {}};

        auto left = std::chrono::duration_cast<Millis>(deadline - Clock::now());
        if (left.count() < 0)
            return {Status::Timeout, {}};
        pollfd pfd{from_child_, POLLIN, 0};
        int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (ready < 0) {
            if (errno == EINTR)
                continue;
            return {Status::Closed, {}};
        }
        if (ready == 0)
            return {Status::Timeout, {}};

        char chunk[4096];
        ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN)
                continue;
            eof_ = true;
        } else if (n == 0) {
            eof_ = true;
        } else {
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }
}

void SubprocessTransport::close()
{
    close_fd(to_child_);
    if (pid_ > 0) {
        if (!exited(pid_, grace_)) {
            ::kill(-pid_, SIGTERM);
            if (!exited(pid_, grace_)) {
                ::kill(-pid_, SIGKILL);
                exited(pid_, Millis{5'000});
            }
        }
        // Anything the kernel left running in its group goes with it.
        ::kill(-pid_, SIGKILL);
        int status = 0;
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
        pid_ = -1;
    }
    close_fd(from_child_);
}

// --------------------------------------------------------------- registry

KernelRegistry KernelRegistry::with_builtins()
{
    KernelRegistry r;
    r.add("calc", [] { return std::make_unique<BuiltinTransport>(); });
    return r;
}

void KernelRegistry::add(std::string lang, TransportFactory factory)
{
    factories_[std::move(lang)] = std::move(factory);
}

void KernelRegistry::add_command(std::string lang, std::string command)
{
    add(std::move(lang), [command = std::move(command)] { return std::make_unique<SubprocessTransport>(command); });
}

bool KernelRegistry::contains(std::string_view lang) const
{
    return factories_.find(lang) != factories_.end();
}

LanguageSet KernelRegistry::languages() const
{
    LanguageSet out;
    for (const auto &[lang, factory] : factories_)
        out.insert(lang);
    return out;
}

std::unique_ptr<Transport> KernelRegistry::open(std::string_view lang) const
{
    auto it = factories_.find(lang);
    if (it == factories_.end())
        throw Error(ErrorKind::KernelStartFailure, fmt::format("no kernel registered for language '{}'", lang));
    return it->second();
}

// ---------------------------------------------------------------- session

Session::Session(std::string lang, std::unique_ptr<Transport> transport, std::filesystem::path figure_dir,
                 Timeouts timeouts)
    : lang_(std::move(lang)), transport_(std::move(transport)), figure_dir_(std::move(figure_dir)),
      timeouts_(timeouts)
{
    KernelMessage hello{MessageType::Hello, 0};
    hello.payload["version"] = protocol_version;
    hello.payload["figure_dir"] = figure_dir_.string();
    try {
        transport_->send(encode(hello));
    } catch (const Error &e) {
        fail(ErrorKind::KernelStartFailure, fmt::format("kernel for '{}' did not start: {}", lang_, e.message()));
    }

    auto line = receive_line(Clock::now() + timeouts_.handshake, ErrorKind::HandshakeTimeout, "hello");
    KernelMessage reply;
    try {
        reply = decode(line);
        if (reply.type != MessageType::Hello)
            fail(ErrorKind::KernelProtocolError,
                 fmt::format("expected hello, kernel sent '{}'", message_type_name(reply.type)));
        if (reply.integer_field("version") != protocol_version)
            fail(ErrorKind::KernelProtocolError,
                 fmt::format("kernel speaks protocol version {}, host speaks {}", reply.integer_field("version"),
                             protocol_version));
        const auto &langs = reply.field("langs");
        if (!langs.is_array())
            fail(ErrorKind::KernelProtocolError, "hello field 'langs' must be a list");
        for (const auto &l : langs) {
            if (!l.is_string())
                fail(ErrorKind::KernelProtocolError, "hello field 'langs' must contain strings");
            kernel_langs_.push_back(l.get<std::string>());
        }
    } catch (const Error &e) {
        if (state_ != State::Dead)
            fail(e.kind(), e.message());
        throw;
    }
    state_ = State::Ready;
}

Session::~Session()
{
    shutdown();
}

void Session::fail(ErrorKind kind, std::string message)
{
    state_ = State::Dead;
    if (transport_)
        transport_->close();
    throw Error(kind, std::move(message));
}

std::string Session::receive_line(Clock::time_point deadline, ErrorKind on_timeout, std::string_view waiting_for)
{
    auto left = std::chrono::duration_cast<Millis>(deadline - Clock::now());
    auto r = transport_->receive(std::max(left, Millis{0}));
    switch (r.status) {
    case Transport::Status::Line:
        return std::move(r.line);
    case Transport::Status::Timeout:
        fail(on_timeout, fmt::format("kernel for '{}' sent no {} within {} ms", lang_, waiting_for,
                                     on_timeout == ErrorKind::HandshakeTimeout ? timeouts_.handshake.count()
                                                                               : timeouts_.exec.count()));
    case Transport::Status::Closed:
        break;
    }
    fail(state_ == State::Starting ? ErrorKind::KernelStartFailure : ErrorKind::KernelCrash,
         fmt::format("kernel for '{}' exited before sending {}", lang_, waiting_for));
}

FigureRef Session::accept_figure(const KernelMessage &m) const
{
    namespace fs = std::filesystem;
    FigureRef f;
    fs::path path = m.string_field("path");
    if (path.is_relative())
        path = figure_dir_ / path;
    auto rel = path.lexically_normal().lexically_relative(figure_dir_.lexically_normal());
    if (rel.empty() || *rel.begin() == "..")
        throw Error(ErrorKind::KernelProtocolError,
                    fmt::format("figure '{}' is outside the figure directory", path.string()));
    std::error_code ec;
    if (!fs::is_regular_file(path, ec))
        throw Error(ErrorKind::KernelProtocolError, fmt::format("figure '{}' does not exist", path.string()));
    f.path = rel.generic_string();

    auto format = m.string_field("format");
    if (format == "svg")
        f.format = FigureFormat::Svg;
    else if (format == "png")
        f.format = FigureFormat::Png;
    else
        throw Error(ErrorKind::KernelProtocolError, fmt::format("unsupported figure format '{}'", format));
    f.width = m.number_field("width");
    f.height = m.number_field("height");
    return f;
}

namespace {

Stream parse_stream(const std::string &name)
{
    for (Stream s : {Stream::Stdout, Stream::Value, Stream::Message, Stream::Warning, Stream::Error})
        if (name == stream_name(s))
            return s;
    throw Error(ErrorKind::KernelProtocolError, fmt::format("unknown output stream '{}'", name));
}

}  // namespace

ChunkResult Session::execute_chunk(std::string_view code, const ChunkOptions &opts, std::string_view label)
{
    if (state_ != State::Ready)
        throw Error(ErrorKind::KernelCrash, fmt::format("kernel for '{}' is not running", lang_));

    const auto id = next_id_++;
    KernelMessage exec{MessageType::Exec, id};
    exec.payload["code"] = std::string(code);
    exec.payload["fig_width"] = opts.fig_width;
    exec.payload["fig_height"] = opts.fig_height;
    exec.payload["label"] = std::string(label);

    state_ = State::Busy;
    try {
        transport_->send(encode(exec));
    } catch (const Error &e) {
        fail(ErrorKind::KernelCrash, e.message());
    }

    ChunkResult result;
    const auto deadline = Clock::now() + timeouts_.exec;
    try {
        for (;;) {
            auto m = decode(receive_line(deadline, ErrorKind::ExecTimeout, "done"));
            if (m.id != id)
                throw Error(ErrorKind::KernelProtocolError,
                            fmt::format("kernel answered request {} while {} was outstanding", m.id, id));
            switch (m.type) {
            case MessageType::Output:
                result.artifacts.push_back(Segment{parse_stream(m.string_field("stream")), m.string_field("text")});
                break;
            case MessageType::Value:
                result.artifacts.push_back(Segment{Stream::Value, m.string_field("text")});
                break;
            case MessageType::Figure:
                result.artifacts.push_back(accept_figure(m));
                break;
            case MessageType::Table: {
                StructuredTable t;
                try {
                    t.header = m.field("header").get<std::vector<std::string>>();
                    t.rows = m.field("rows").get<std::vector<std::vector<std::string>>>();
                } catch (const nlohmann::json::exception &) {
                    throw Error(ErrorKind::KernelProtocolError, "table header and rows must hold strings");
                }
                result.artifacts.push_back(std::move(t));
                break;
            }
            case MessageType::Done: {
                auto status = m.string_field("status");
                if (status == "ok") {
                    result.status = ChunkStatus::Ok;
                } else if (status == "error") {
                    result.status = ChunkStatus::Error;
                    if (result.error_text().empty())
                        result.artifacts.push_back(Segment{Stream::Error, "Error: chunk failed"});
                } else {
                    throw Error(ErrorKind::KernelProtocolError, fmt::format("unknown done status '{}'", status));
                }
                state_ = State::Ready;
                return result;
            }
            default:
                throw Error(ErrorKind::KernelProtocolError,
                            fmt::format("unexpected '{}' message during exec", message_type_name(m.type)));
            }
        }
    } catch (const Error &e) {
        if (state_ != State::Dead)
            fail(e.kind(), e.message());
        throw;
    }
}

std::string Session::evaluate_inline(std::string_view expr)
{
    if (state_ != State::Ready)
        throw Error(ErrorKind::KernelCrash, fmt::format("kernel for '{}' is not running", lang_));

    const auto id = next_id_++;
    KernelMessage eval{MessageType::Eval, id};
    eval.payload["expr"] = std::string(expr);

    state_ = State::Busy;
    try {
        transport_->send(encode(eval));
    } catch (const Error &e) {
        fail(ErrorKind::KernelCrash, e.message());
    }

    KernelMessage m;
    try {
        m = decode(receive_line(Clock::now() + timeouts_.exec, ErrorKind::ExecTimeout, "eval_result"));
        if (m.id != id)
            throw Error(ErrorKind::KernelProtocolError,
                        fmt::format("kernel answered request {} while {} was outstanding", m.id, id));
        if (m.type != MessageType::EvalResult)
            throw Error(ErrorKind::KernelProtocolError,
                        fmt::format("expected eval_result, kernel sent '{}'", message_type_name(m.type)));
        m.string_field("status");
    } catch (const Error &e) {
        if (state_ != State::Dead)
            fail(e.kind(), e.message());
        throw;
    }
    state_ = State::Ready;

    if (m.string_field("status") != "ok")
        throw Error(ErrorKind::InlineEvalError,
                    fmt::format("inline `{} {}` failed: {}", lang_, expr,
                                m.has("message") ? m.string_field("message") : std::string("unknown error")));
    auto text = m.string_field("text");
    if (text.find('\n') != std::string::npos)
        throw Error(ErrorKind::MultilineInlineResult,
                    fmt::format("inline `{} {}` produced more than one line", lang_, expr));
    return text;
}

void Session::shutdown() noexcept
{
    if (!transport_)
        return;
    if (state_ == State::Ready) {
        try {
            transport_->send(encode(KernelMessage{MessageType::Shutdown, next_id_++}));
        } catch (...) {
        }
    }
    transport_->close();
    transport_.reset();
    state_ = State::Dead;
}

}  // namespace weave
