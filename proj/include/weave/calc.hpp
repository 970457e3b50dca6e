#pragma once

#include "weave/result.hpp"

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/// The builtin "calc" kernel: a small deterministic expression language.
///
///   x = 2            assignment
///   x + 3            expression; the chunk's last expression is its value
///   print(a, b)      stdout line
///   message(t)       message stream
///   warn(t)          warning stream
///   stop(t)          raise an error
///   plot(ys) / plot(xs, ys)   SVG polyline figure
///   table(header, row...)     structured table
///
/// Numbers are IEEE doubles printed with up to 15 significant digits.
namespace weave::calc {

struct Value {
    enum class Kind { None, Number, String, List };

    Kind kind = Kind::None;
    double number = 0;
    std::string text;
    std::vector<Value> items;

    static Value of(double n);
    static Value of(std::string s);
    static Value list(std::vector<Value> items);

    bool operator==(const Value &) const = default;
};

std::string format_number(double n);

/// Single-line rendering of a value; strings render without quotes.
std::string format_value(const Value &v);

class CalcError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PlotRequest {
    std::vector<double> xs;
    std::vector<double> ys;
};

/// Receives side effects of a running program in emission order.
class Emitter {
public:
    virtual ~Emitter() = default;
    virtual void output(Stream stream, const std::string &text) = 0;
    virtual void plot(const PlotRequest &request) = 0;
    virtual void table(const StructuredTable &table) = 0;
};

class Interpreter {
public:
    /// Runs newline/semicolon separated statements. Returns the value of the
    /// last statement when it is an expression with a value. Throws
    /// CalcError; emissions made before the error have been delivered.
    Value run(std::string_view code, Emitter &emitter);

    /// Evaluates a single expression against the current variables.
    Value evaluate(std::string_view expr);

    const std::map<std::string, Value, std::less<>> &variables() const noexcept { return vars_; }

private:
    std::map<std::string, Value, std::less<>> vars_;
};

/// Deterministic SVG polyline plot sized at 96 px per inch.
std::string render_plot_svg(const PlotRequest &request, double width_in, double height_in);

/// Protocol endpoint for the calc interpreter: one request line in, zero or
/// more response lines out. Throws Error(KernelProtocolError) on a
/// malformed request.
class CalcKernel {
public:
    std::vector<std::string> handle(std::string_view line);
    bool finished() const noexcept { return finished_; }
    const Interpreter &interpreter() const noexcept { return interp_; }

private:
    Interpreter interp_;
    std::filesystem::path figure_dir_;
    bool greeted_ = false;
    bool finished_ = false;
};

}  // namespace weave::calc
