#include "weave/calc.hpp"

#include "weave/diagnostics.hpp"
#include "weave/protocol.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

namespace weave::calc {

namespace {

enum class Tok { Number, String, Ident, Op, Separator, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0;
};

std::vector<Token> tokenize(std::string_view src)
{
    std::vector<Token> out;
    int depth = 0;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n')
                ++i;
            continue;
        }
        if (c == '\n' || c == ';') {
            if (depth == 0 && (out.empty() || out.back().kind != Tok::Separator))
                out.push_back({Tok::Separator, std::string(1, c)});
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.'))
                ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-'))
                    ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k])))
                        ++k;
                    j = k;
                }
            }
            double value = 0;
            auto [ptr, ec] = std::from_chars(src.data() + i, src.data() + j, value);
            if (ec != std::errc() || ptr != src.data() + j)
                throw CalcError(fmt::format("syntax error: bad number '{}'", src.substr(i, j - i)));
            out.push_back({Tok::Number, std::string(src.substr(i, j - i)), value});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '.'))
                ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i))});
            i = j;
            continue;
        }
        if (c == '"' || c == '\'') {
            std::string text;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < src.size()) {
                if (src[j] == '\\' && j + 1 < src.size()) {
                    char n = src[j + 1];
                    text += n == 'n' ? '\n' : n == 't' ? '\t' : n;
                    j += 2;
                    continue;
                }
                if (src[j] == c) {
                    closed = true;
                    ++j;
                    break;
                }
                text += src[j++];
            }
            if (!closed)
                throw CalcError("syntax error: unterminated string");
            out.push_back({Tok::String, std::move(text)});
            i = j;
            continue;
        }
        if (std::string_view("+-*/%^()[],=").find(c) != std::string_view::npos) {
            if (c == '(' || c == '[')
                ++depth;
            if ((c == ')' || c == ']') && depth > 0)
                --depth;
            out.push_back({Tok::Op, std::string(1, c)});
            ++i;
            continue;
        }
        throw CalcError(fmt::format("syntax error: unexpected character '{}'", c));
    }
    out.push_back({Tok::End, ""});
    return out;
}

double as_number(const Value &v, std::string_view what)
{
    if (v.kind != Value::Kind::Number)
        throw CalcError(fmt::format("{} expects a number", what));
    return v.number;
}

void flatten(const Value &v, std::vector<double> &out, std::string_view what)
{
    if (v.kind == Value::Kind::List) {
        for (const auto &item : v.items)
            flatten(item, out, what);
    } else {
        out.push_back(as_number(v, what));
    }
}

std::vector<double> numbers(const std::vector<Value> &args, std::string_view what)
{
    std::vector<double> out;
    for (const auto &a : args)
        flatten(a, out, what);
    return out;
}

Value checked(double n)
{
    if (!std::isfinite(n))
        throw CalcError("numeric overflow");
    return Value::of(n);
}

std::string join_text(const std::vector<Value> &args)
{
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            out += ' ';
        out += format_value(args[i]);
    }
    return out;
}

class Evaluator {
public:
    Evaluator(std::vector<Token> tokens, std::map<std::string, Value, std::less<>> &vars, Emitter *emitter)
        : toks_(std::move(tokens)), vars_(vars), emitter_(emitter)
    {
    }

    Value program()
    {
        Value last;
        while (peek().kind != Tok::End) {
            if (peek().kind == Tok::Separator) {
                ++pos_;
                continue;
            }
            last = statement();
            if (peek().kind != Tok::Separator && peek().kind != Tok::End)
                throw CalcError(fmt::format("syntax error: unexpected '{}'", peek().text));
        }
        return last;
    }

    Value single_expression()
    {
        while (peek().kind == Tok::Separator)
            ++pos_;
        if (peek().kind == Tok::End)
            throw CalcError("syntax error: empty expression");
        Value v = expression();
        while (peek().kind == Tok::Separator)
            ++pos_;
        if (peek().kind != Tok::End)
            throw CalcError(fmt::format("syntax error: unexpected '{}'", peek().text));
        return v;
    }

private:
    const Token &peek(std::size_t ahead = 0) const
    {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }

    bool accept_op(char op)
    {
        if (peek().kind == Tok::Op && peek().text[0] == op) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect_op(char op)
    {
        if (!accept_op(op))
            throw CalcError(fmt::format("syntax error: expected '{}'", op));
    }

    Value statement()
    {
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::Op && peek(1).text == "=") {
            std::string name = peek().text;
            pos_ += 2;
            vars_[name] = expression();
            return Value{};
        }
        return expression();
    }

    Value expression()
    {
        Value left = term();
        while (peek().kind == Tok::Op && (peek().text == "+" || peek().text == "-")) {
            char op = peek().text[0];
            ++pos_;
            Value right = term();
            if (op == '+' && (left.kind == Value::Kind::String || right.kind == Value::Kind::String)) {
                left = Value::of(format_value(left) + format_value(right));
                continue;
            }
            double a = as_number(left, std::string(1, op));
            double b = as_number(right, std::string(1, op));
            left = checked(op == '+' ? a + b : a - b);
        }
        return left;
    }

    Value term()
    {
        Value left = unary();
        while (peek().kind == Tok::Op && (peek().text == "*" || peek().text == "/" || peek().text == "%")) {
            char op = peek().text[0];
            ++pos_;
            Value right = unary();
            double a = as_number(left, std::string(1, op));
            double b = as_number(right, std::string(1, op));
            if ((op == '/' || op == '%') && b == 0)
                throw CalcError("division by zero");
            left = checked(op == '*' ? a * b : op == '/' ? a / b : std::fmod(a, b));
        }
        return left;
    }

    Value unary()
    {
        if (accept_op('-'))
            return checked(-as_number(unary(), "-"));
        if (accept_op('+'))
            return checked(as_number(unary(), "+"));
        return power();
    }

    Value power()
    {
        Value base = primary();
        if (accept_op('^')) {
            Value exponent = unary();
            return checked(std::pow(as_number(base, "^"), as_number(exponent, "^")));
        }
        return base;
    }

    std::vector<Value> arguments(char close)
    {
        std::vector<Value> args;
        if (accept_op(close))
            return args;
        do {
            args.push_back(expression());
        } while (accept_op(','));
        expect_op(close);
        return args;
    }

    Value primary()
    {
        const Token t = peek();
        switch (t.kind) {
        case Tok::Number:
            ++pos_;
            return Value::of(t.number);
        case Tok::String:
            ++pos_;
            return Value::of(t.text);
        case Tok::Ident: {
            ++pos_;
            if (accept_op('('))
                return call(t.text, arguments(')'));
            auto it = vars_.find(t.text);
            if (it == vars_.end())
                throw CalcError(fmt::format("undefined variable '{}'", t.text));
            return it->second;
        }
        case Tok::Op:
            if (accept_op('(')) {
                Value v = expression();
                expect_op(')');
                return v;
            }
            if (accept_op('['))
                return Value::list(arguments(']'));
            throw CalcError(fmt::format("syntax error: unexpected '{}'", t.text));
        case Tok::Separator:
        case Tok::End:
            break;
        }
        throw CalcError("syntax error: unexpected end of input");
    }

    Emitter &emitter(std::string_view fn)
    {
        if (!emitter_)
            throw CalcError(fmt::format("'{}' is not allowed in an inline expression", fn));
        return *emitter_;
    }

    Value call(const std::string &fn, std::vector<Value> args)
    {
        auto arity = [&](std::size_t lo, std::size_t hi) {
            if (args.size() < lo || args.size() > hi)
                throw CalcError(fmt::format("wrong number of arguments to '{}'", fn));
        };
        auto unary_math = [&](double (*f)(double)) {
            arity(1, 1);
            return checked(f(as_number(args[0], fn)));
        };

        if (fn == "print") {
            emitter(fn).output(Stream::Stdout, join_text(args));
            return Value{};
        }
        if (fn == "message") {
            emitter(fn).output(Stream::Message, join_text(args));
            return Value{};
        }
        if (fn == "warn" || fn == "warning") {
            emitter(fn).output(Stream::Warning, join_text(args));
            return Value{};
        }
        if (fn == "stop")
            throw CalcError(join_text(args));
        if (fn == "plot") {
            arity(1, 2);
            PlotRequest req;
            if (args.size() == 2) {
                flatten(args[0], req.xs, fn);
                flatten(args[1], req.ys, fn);
                if (req.xs.size() != req.ys.size())
                    throw CalcError("plot: x and y differ in length");
            } else {
                flatten(args[0], req.ys, fn);
                for (std::size_t i = 0; i < req.ys.size(); ++i)
                    req.xs.push_back(static_cast<double>(i + 1));
            }
            if (req.ys.empty())
                throw CalcError("plot: nothing to plot");
            emitter(fn).plot(req);
            return Value{};
        }
        if (fn == "table") {
            if (args.empty() || args[0].kind != Value::Kind::List)
                throw CalcError("table expects a header list followed by row lists");
            StructuredTable t;
            for (const auto &h : args[0].items)
                t.header.push_back(format_value(h));
            for (std::size_t r = 1; r < args.size(); ++r) {
                if (args[r].kind != Value::Kind::List || args[r].items.size() != t.header.size())
                    throw CalcError("table rows must be lists as long as the header");
                std::vector<std::string> row;
                for (const auto &cell : args[r].items)
                    row.push_back(format_value(cell));
                t.rows.push_back(std::move(row));
            }
            emitter(fn).table(t);
            return Value{};
        }
        if (fn == "sqrt") {
            arity(1, 1);
            double x = as_number(args[0], fn);
            if (x < 0)
                throw CalcError("sqrt of a negative number");
            return checked(std::sqrt(x));
        }
        if (fn == "abs")
            return unary_math([](double x) { return std::fabs(x); });
        if (fn == "floor")
            return unary_math([](double x) { return std::floor(x); });
        if (fn == "ceiling" || fn == "ceil")
            return unary_math([](double x) { return std::ceil(x); });
        if (fn == "exp")
            return unary_math([](double x) { return std::exp(x); });
        if (fn == "log") {
            arity(1, 1);
            double x = as_number(args[0], fn);
            if (x <= 0)
                throw CalcError("log of a non-positive number");
            return checked(std::log(x));
        }
        if (fn == "round") {
            arity(1, 2);
            double x = as_number(args[0], fn);
            double digits = args.size() == 2 ? as_number(args[1], fn) : 0;
            double scale = std::pow(10.0, digits);
            return checked(std::round(x * scale) / scale);
        }
        if (fn == "length") {
            arity(1, 1);
            if (args[0].kind == Value::Kind::List)
                return Value::of(static_cast<double>(args[0].items.size()));
            if (args[0].kind == Value::Kind::String)
                return Value::of(static_cast<double>(args[0].text.size()));
            return Value::of(1);
        }
        if (fn == "sum" || fn == "mean" || fn == "min" || fn == "max") {
            auto xs = numbers(args, fn);
            if (xs.empty()) {
                if (fn == "sum")
                    return Value::of(0);
                throw CalcError(fmt::format("{} of nothing", fn));
            }
            if (fn == "min")
                return Value::of(*std::min_element(xs.begin(), xs.end()));
            if (fn == "max")
                return Value::of(*std::max_element(xs.begin(), xs.end()));
            double total = 0;
            for (double x : xs)
                total += x;
            return checked(fn == "sum" ? total : total / static_cast<double>(xs.size()));
        }
        if (fn == "seq") {
            arity(2, 2);
            double from = as_number(args[0], fn);
            double to = as_number(args[1], fn);
            if (std::fabs(to - from) > 100000)
                throw CalcError("seq: range too long");
            std::vector<Value> items;
            double step = from <= to ? 1 : -1;
            for (double x = from; step > 0 ? x <= to : x >= to; x += step)
                items.push_back(Value::of(x));
            return Value::list(std::move(items));
        }
        throw CalcError(fmt::format("unknown function '{}'", fn));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::map<std::string, Value, std::less<>> &vars_;
    Emitter *emitter_;
};

std::string fixed(double v)
{
    return fmt::format("{:.2f}", v);
}

}  // namespace

Value Value::of(double n)
{
    Value v;
    v.kind = Kind::Number;
    v.number = n;
    return v;
}

Value Value::of(std::string s)
{
    Value v;
    v.kind = Kind::String;
    v.text = std::move(s);
    return v;
}

Value Value::list(std::vector<Value> items)
{
    Value v;
    v.kind = Kind::List;
    v.items = std::move(items);
    return v;
}

std::string format_number(double n)
{
    if (n == 0)
        return "0";
    if (std::floor(n) == n && std::fabs(n) < 1e15)
        return fmt::format("{:.0f}", n);
    return fmt::format("{:.15g}", n);
}

std::string format_value(const Value &v)
{
    switch (v.kind) {
    case Value::Kind::None: return "none";
    case Value::Kind::Number: return format_number(v.number);
    case Value::Kind::String: return v.text;
    case Value::Kind::List: {
        std::string out = "[";
        for (std::size_t i = 0; i < v.items.size(); ++i) {
            if (i)
                out += ", ";
            out += format_value(v.items[i]);
        }
        return out + "]";
    }
    }
    return {};
}

Value Interpreter::run(std::string_view code, Emitter &emitter)
{
    return Evaluator(tokenize(code), vars_, &emitter).program();
}

Value Interpreter::evaluate(std::string_view expr)
{
    return Evaluator(tokenize(expr), vars_, nullptr).single_expression();
}

std::string render_plot_svg(const PlotRequest &request, double width_in, double height_in)
{
    const double w = std::round(width_in * 96);
    const double h = std::round(height_in * 96);
    const double margin_x = w * 0.1;
    const double margin_y = h * 0.1;
    std::vector<double> xs = request.xs;
    if (xs.empty())
        for (std::size_t i = 0; i < request.ys.size(); ++i)
            xs.push_back(static_cast<double>(i + 1));
    const std::size_t n = std::min(xs.size(), request.ys.size());
    auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n));
    auto [ymin, ymax] = std::minmax_element(request.ys.begin(), request.ys.begin() + static_cast<std::ptrdiff_t>(n));
    auto scale = [](double v, double lo, double hi, double from, double to) {
        if (hi == lo)
            return (from + to) / 2;
        return from + (v - lo) / (hi - lo) * (to - from);
    };
    std::string points;
    for (std::size_t i = 0; i < n; ++i) {
        if (i)
            points += ' ';
        double px = scale(xs[i], *xmin, *xmax, margin_x, w - margin_x);
        double py = scale(request.ys[i], *ymin, *ymax, h - margin_y, margin_y);
        points += fixed(px) + "," + fixed(py);
    }
    std::string svg;
    svg += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
                       format_number(w), format_number(h));
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += fmt::format("<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"{}\"/>\n", points);
    svg += "</svg>\n";
    return svg;
}

namespace {

class LineEmitter : public Emitter {
public:
    LineEmitter(std::int64_t id, std::filesystem::path dir, std::string label, double w, double h)
        : id_(id), dir_(std::move(dir)), label_(std::move(label)), width_(w), height_(h)
    {
    }

    void output(Stream stream, const std::string &text) override
    {
        KernelMessage m{MessageType::Output, id_};
        m.payload["stream"] = stream_name(stream);
        m.payload["text"] = text;
        lines.push_back(encode(m));
    }

    void plot(const PlotRequest &request) override
    {
        auto name = fmt::format("{}-{}.svg", label_, ++figures_);
        auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        out << render_plot_svg(request, width_, height_);
        if (!out)
            throw CalcError(fmt::format("cannot write figure {}", path.string()));
        KernelMessage m{MessageType::Figure, id_};
        m.payload["path"] = path.string();
        m.payload["format"] = "svg";
        m.payload["width"] = width_;
        m.payload["height"] = height_;
        lines.push_back(encode(m));
    }

    void table(const StructuredTable &t) override
    {
        KernelMessage m{MessageType::Table, id_};
        m.payload["header"] = t.header;
        m.payload["rows"] = t.rows;
        lines.push_back(encode(m));
    }

    std::vector<std::string> lines;

private:
    std::int64_t id_;
    std::filesystem::path dir_;
    std::string label_;
    double width_;
    double height_;
    int figures_ = 0;
};

}  // namespace

std::vector<std::string> CalcKernel::handle(std::string_view line)
{
    auto request = decode(line);
    std::vector<std::string> out;
    if (!greeted_ && request.type != MessageType::Hello)
        throw Error(ErrorKind::KernelProtocolError, "first message must be hello");

    switch (request.type) {
    case MessageType::Hello: {
        if (request.integer_field("version") != protocol_version)
            throw Error(ErrorKind::KernelProtocolError, "unsupported protocol version");
        figure_dir_ = request.string_field("figure_dir");
        greeted_ = true;
        KernelMessage reply{MessageType::Hello, request.id};
        reply.payload["version"] = protocol_version;
        reply.payload["langs"] = {"calc"};
        out.push_back(encode(reply));
        break;
    }
    case MessageType::Exec: {
        auto code = request.string_field("code");
        double w = request.has("fig_width") ? request.number_field("fig_width") : 7.0;
        double h = request.has("fig_height") ? request.number_field("fig_height") : 5.0;
        std::string label = request.has("label") ? request.string_field("label") : std::to_string(request.id);
        LineEmitter emitter(request.id, figure_dir_, label, w, h);
        const char *status = "ok";
        try {
            Value v = interp_.run(code, emitter);
            if (v.kind != Value::Kind::None) {
                KernelMessage m{MessageType::Value, request.id};
                m.payload["text"] = format_value(v);
                emitter.lines.push_back(encode(m));
            }
        } catch (const CalcError &e) {
            emitter.output(Stream::Error, fmt::format("Error: {}", e.what()));
            status = "error";
        }
        out = std::move(emitter.lines);
        KernelMessage done{MessageType::Done, request.id};
        done.payload["status"] = status;
        out.push_back(encode(done));
        break;
    }
    case MessageType::Eval: {
        KernelMessage reply{MessageType::EvalResult, request.id};
        try {
            reply.payload["status"] = "ok";
            reply.payload["text"] = format_value(interp_.evaluate(request.string_field("expr")));
        } catch (const CalcError &e) {
            reply.payload = nlohmann::ordered_json::object();
            reply.payload["status"] = "error";
            reply.payload["message"] = e.what();
        }
        out.push_back(encode(reply));
        break;
    }
    case MessageType::Shutdown:
        finished_ = true;
        break;
    default:
        throw Error(ErrorKind::KernelProtocolError,
                    fmt::format("kernel cannot handle '{}' messages", message_type_name(request.type)));
    }
    return out;
}

}  // namespace weave::calc
