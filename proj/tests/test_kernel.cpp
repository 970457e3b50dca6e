#include "weave/kernel.hpp"

#include "mock_transport.hpp"

#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <signal.h>
#include <unistd.h>

using namespace weave;
using namespace weave::testing;

namespace fs = std::filesystem;

namespace {

using Replies = std::vector<Transport::Received>;

// A kernel that greets properly and answers exec/eval with `on_request`.
std::unique_ptr<ScriptedTransport> kernel(std::function<Replies(const KernelMessage &)> on_request,
                                          std::vector<std::string> *sent = nullptr)
{
    return std::make_unique<ScriptedTransport>(
        [on_request](const KernelMessage &m) -> Replies {
            if (m.type == MessageType::Hello)
                return {line(hello_reply(m))};
            if (m.type == MessageType::Shutdown)
                return {closed()};
            return on_request(m);
        },
        sent);
}

KernelMessage msg(MessageType type, std::int64_t id, nlohmann::ordered_json payload = nlohmann::ordered_json::object())
{
    KernelMessage m{type, id};
    m.payload = std::move(payload);
    return m;
}

KernelMessage done(std::int64_t id, const char *status = "ok")
{
    return msg(MessageType::Done, id, {{"status", status}});
}

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

struct FigureDir {
    fs::path path = fs::temp_directory_path() / "weave-kernel-test";
    FigureDir()
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~FigureDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("handshake sends version and figure directory")
{
    std::vector<std::string> sent;
    FigureDir dir;
    Session s("mock", kernel([](auto &) { return Replies{}; }, &sent), dir.path);
    CHECK(s.state() == Session::State::Ready);
    CHECK(s.kernel_languages() == std::vector<std::string>{"mock"});
    auto hello = decode(sent.at(0));
    CHECK(hello.type == MessageType::Hello);
    CHECK(hello.integer_field("version") == protocol_version);
    CHECK(hello.string_field("figure_dir") == dir.path.string());
}

TEST_CASE("handshake failures")
{
    auto with = [](Replies replies) {
        return [replies] {
            Session s("mock", std::make_unique<ScriptedTransport>([replies](auto &) { return replies; }), ".");
        };
    };
    CHECK(kind_of(with({timeout()})) == ErrorKind::HandshakeTimeout);
    CHECK(kind_of(with({closed()})) == ErrorKind::KernelStartFailure);
    CHECK(kind_of(with({raw_line("garbage")})) == ErrorKind::KernelProtocolError);
    CHECK(kind_of(with({line(msg(MessageType::Done, 0, {{"status", "ok"}}))})) == ErrorKind::KernelProtocolError);
    CHECK(kind_of(with({line(msg(MessageType::Hello, 0, {{"version", 2}, {"langs", {"x"}}}))})) ==
          ErrorKind::KernelProtocolError);
    CHECK(kind_of(with({line(msg(MessageType::Hello, 0, {{"version", 1}, {"langs", "x"}}))})) ==
          ErrorKind::KernelProtocolError);
}

TEST_CASE("artifacts keep emission order")
{
    FigureDir dir;
    std::ofstream(dir.path / "c-1.svg") << "<svg/>";
    Session s("mock", kernel([&](const KernelMessage &m) -> Replies {
                  return {line(msg(MessageType::Output, m.id, {{"stream", "stdout"}, {"text", "a"}})),
                          line(msg(MessageType::Figure, m.id,
                                   {{"path", (dir.path / "c-1.svg").string()}, {"format", "svg"}, {"width", 3},
                                    {"height", 2}})),
                          line(msg(MessageType::Table, m.id, {{"header", {"h"}}, {"rows", {{"1"}}}})),
                          line(msg(MessageType::Value, m.id, {{"text", "42"}})), line(done(m.id))};
              }),
              dir.path);
    auto r = s.execute_chunk("x", ChunkOptions{}, "c");
    REQUIRE(r.artifacts.size() == 4);
    CHECK(std::get<Segment>(r.artifacts[0]) == Segment{Stream::Stdout, "a"});
    CHECK(std::get<FigureRef>(r.artifacts[1]) == FigureRef{"c-1.svg", FigureFormat::Svg, 3, 2});
    CHECK(std::get<StructuredTable>(r.artifacts[2]).rows[0][0] == "1");
    CHECK(std::get<Segment>(r.artifacts[3]) == Segment{Stream::Value, "42"});
    CHECK(r.status == ChunkStatus::Ok);
    CHECK(s.state() == Session::State::Ready);
}

TEST_CASE("exec request carries code, figure size and label")
{
    std::vector<std::string> sent;
    Session s("mock", kernel([](const KernelMessage &m) { return Replies{line(done(m.id))}; }, &sent), ".");
    ChunkOptions o;
    o.fig_width = 4;
    o.fig_height = 2.5;
    s.execute_chunk("plot(x)", o, "pressure");
    auto exec = decode(sent.at(1));
    CHECK(exec.type == MessageType::Exec);
    CHECK(exec.id == 1);
    CHECK(exec.string_field("code") == "plot(x)");
    CHECK(exec.number_field("fig_width") == 4);
    CHECK(exec.number_field("fig_height") == 2.5);
    CHECK(exec.string_field("label") == "pressure");
}

TEST_CASE("a failing chunk is a result, not an exception")
{
    Session s("mock", kernel([](const KernelMessage &m) -> Replies {
                  return {line(msg(MessageType::Output, m.id, {{"stream", "error"}, {"text", "Error: bad"}})),
                          line(done(m.id, "error"))};
              }),
              ".");
    auto r = s.execute_chunk("x", ChunkOptions{}, "1");
    CHECK(r.status == ChunkStatus::Error);
    CHECK(r.error_text() == "Error: bad");
    CHECK(s.state() == Session::State::Ready);
}

TEST_CASE("error status without an error segment gets a synthesized one")
{
    Session s("mock", kernel([](const KernelMessage &m) { return Replies{line(done(m.id, "error"))}; }), ".");
    CHECK(s.execute_chunk("x", ChunkOptions{}, "1").error_text() == "Error: chunk failed");
}

TEST_CASE("session faults kill the session")
{
    struct Case {
        const char *name;
        std::function<Replies(const KernelMessage &)> reply;
        ErrorKind expect;
    };
    FigureDir dir;
    const Case cases[] = {
        {"wrong id", [](auto &m) { return Replies{line(done(m.id + 7))}; }, ErrorKind::KernelProtocolError},
        {"timeout", [](auto &) { return Replies{timeout()}; }, ErrorKind::ExecTimeout},
        {"closed", [](auto &) { return Replies{closed()}; }, ErrorKind::KernelCrash},
        {"garbage", [](auto &) { return Replies{raw_line("{oops")}; }, ErrorKind::KernelProtocolError},
        {"bad stream",
         [](auto &m) { return Replies{line(msg(MessageType::Output, m.id, {{"stream", "x"}, {"text", ""}}))}; },
         ErrorKind::KernelProtocolError},
        {"bad status", [](auto &m) { return Replies{line(done(m.id, "maybe"))}; }, ErrorKind::KernelProtocolError},
        {"eval_result during exec",
         [](auto &m) { return Replies{line(msg(MessageType::EvalResult, m.id, {{"status", "ok"}, {"text", ""}}))}; },
         ErrorKind::KernelProtocolError},
        {"figure outside dir",
         [](auto &m) {
             return Replies{line(msg(MessageType::Figure, m.id,
                                     {{"path", "/etc/passwd"}, {"format", "svg"}, {"width", 1}, {"height", 1}}))};
         },
         ErrorKind::KernelProtocolError},
        {"missing figure",
         [](auto &m) {
             return Replies{line(msg(MessageType::Figure, m.id,
                                     {{"path", "nope.svg"}, {"format", "svg"}, {"width", 1}, {"height", 1}}))};
         },
         ErrorKind::KernelProtocolError},
    };
    for (const auto &c : cases) {
        CAPTURE(c.name);
        auto t = kernel(c.reply);
        auto *raw = t.get();
        Session s("mock", std::move(t), dir.path);
        CHECK(kind_of([&] { s.execute_chunk("x", ChunkOptions{}, "1"); }) == c.expect);
        CHECK(s.state() == Session::State::Dead);
        CHECK(raw->close_calls >= 1);
        CHECK(kind_of([&] { s.execute_chunk("x", ChunkOptions{}, "1"); }) == ErrorKind::KernelCrash);
    }
}

TEST_CASE("inline evaluation")
{
    auto eval_reply = [](nlohmann::ordered_json payload) {
        return [payload](const KernelMessage &m) {
            return Replies{line(msg(MessageType::EvalResult, m.id, payload))};
        };
    };
    {
        Session s("mock", kernel(eval_reply({{"status", "ok"}, {"text", "50"}})), ".");
        CHECK(s.evaluate_inline("nrow(cars)") == "50");
        CHECK(s.state() == Session::State::Ready);
    }
    {
        Session s("mock", kernel(eval_reply({{"status", "ok"}, {"text", "1\n2"}})), ".");
        CHECK(kind_of([&] { s.evaluate_inline("x"); }) == ErrorKind::MultilineInlineResult);
    }
    {
        Session s("mock", kernel(eval_reply({{"status", "error"}, {"message", "no such object"}})), ".");
        try {
            s.evaluate_inline("y");
            FAIL("expected InlineEvalError");
        } catch (const Error &e) {
            CHECK(e.kind() == ErrorKind::InlineEvalError);
            CHECK(e.message().find("no such object") != std::string::npos);
        }
        CHECK(s.state() == Session::State::Ready);
    }
    {
        Session s("mock", kernel([](auto &m) { return Replies{line(done(m.id))}; }), ".");
        CHECK(kind_of([&] { s.evaluate_inline("y"); }) == ErrorKind::KernelProtocolError);
    }
}

TEST_CASE("shutdown is idempotent and sends one shutdown message")
{
    std::vector<std::string> sent;
    Session s("mock", kernel([](auto &) { return Replies{}; }, &sent), ".");
    s.shutdown();
    s.shutdown();
    REQUIRE(sent.size() == 2);
    CHECK(decode(sent[1]).type == MessageType::Shutdown);
    CHECK(kind_of([&] { s.evaluate_inline("1"); }) == ErrorKind::KernelCrash);
}

TEST_CASE("registry")
{
    auto r = KernelRegistry::with_builtins();
    CHECK(r.contains("calc"));
    CHECK_FALSE(r.contains("r"));
    CHECK(kind_of([&] { r.open("r"); }) == ErrorKind::KernelStartFailure);
    r.add_command("r", "true");
    CHECK(r.languages() == LanguageSet{"calc", "r"});
}

TEST_CASE("builtin calc kernel through a session")
{
    FigureDir dir;
    Session s("calc", KernelRegistry::with_builtins().open("calc"), dir.path);
    s.execute_chunk("n = 50", ChunkOptions{}, "1");
    CHECK(s.evaluate_inline("n") == "50");
    auto r = s.execute_chunk("plot([1, 2, 3])", ChunkOptions{}, "fig");
    REQUIRE(r.figures().size() == 1);
    CHECK(r.figures()[0].path == "fig-1.svg");
    CHECK(r.figures()[0].width == 7);
}

TEST_CASE("subprocess that exits immediately fails to start")
{
    CHECK(kind_of([] { Session s("x", std::make_unique<SubprocessTransport>("exit 3"), "."); }) ==
          ErrorKind::KernelStartFailure);
}

TEST_CASE("subprocess that never answers times out and is reaped")
{
    Timeouts t;
    t.handshake = Millis{200};
    auto transport = std::make_unique<SubprocessTransport>("sleep 30", Millis{100});
    const pid_t pid = transport->pid();
    auto start = std::chrono::steady_clock::now();
    CHECK(kind_of([&] { Session s("x", std::move(transport), ".", t); }) == ErrorKind::HandshakeTimeout);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
    CHECK(::kill(pid, 0) != 0);
}

TEST_CASE("subprocess chunk that hangs hits the exec timeout")
{
    Timeouts t;
    t.exec = Millis{300};
    FigureDir dir;
    // Answers hello, then goes silent.
    Session s("x",
              std::make_unique<SubprocessTransport>(
                  R"(read line; echo '{"type":"hello","id":0,"version":1,"langs":["x"]}'; sleep 30)", Millis{100}),
              dir.path, t);
    CHECK(kind_of([&] { s.execute_chunk("x", ChunkOptions{}, "1"); }) == ErrorKind::ExecTimeout);
    CHECK(s.state() == Session::State::Dead);
}

TEST_CASE("subprocess crash mid-chunk")
{
    FigureDir dir;
    Session s("x",
              std::make_unique<SubprocessTransport>(
                  R"(read line; echo '{"type":"hello","id":0,"version":1,"langs":["x"]}'; read line; exit 1)"),
              dir.path);
    CHECK(kind_of([&] { s.execute_chunk("x", ChunkOptions{}, "1"); }) == ErrorKind::KernelCrash);
}

TEST_CASE("closing a subprocess also stops what it started")
{
    FigureDir dir;
    auto pidfile = dir.path / "child.pid";
    {
        SubprocessTransport t("sleep 30 & echo $! > '" + pidfile.string() + "'; cat > /dev/null", Millis{100});
        for (int i = 0; i < 200 && !fs::exists(pidfile); ++i)
            t.receive(Millis{10});
        t.close();
    }
    pid_t child = 0;
    std::ifstream(pidfile) >> child;
    REQUIRE(child > 0);
    // An orphan may linger as a zombie until init reaps it.
    auto running = [&] {
        std::ifstream stat("/proc/" + std::to_string(child) + "/stat");
        std::string pid, comm, state;
        return stat >> pid >> comm >> state && state != "Z";
    };
    for (int i = 0; i < 100 && running(); ++i)
        ::usleep(10'000);
    CHECK_FALSE(running());
}

}
