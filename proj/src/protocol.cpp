#include "weave/protocol.hpp"

#include "weave/diagnostics.hpp"

#include <fmt/format.h>

#include <array>

namespace weave {

namespace {

constexpr std::array<std::pair<MessageType, const char *>, 10> type_names = {{
    {MessageType::Hello, "hello"},
    {MessageType::Exec, "exec"},
    {MessageType::Output, "output"},
    {MessageType::Figure, "figure"},
    {MessageType::Table, "table"},
    {MessageType::Value, "value"},
    {MessageType::Done, "done"},
    {MessageType::Eval, "eval"},
    {MessageType::EvalResult, "eval_result"},
    {MessageType::Shutdown, "shutdown"},
}};

[[noreturn]] void protocol_error(const std::string &message)
{
    throw Error(ErrorKind::KernelProtocolError, message);
}

}  // namespace

const char *message_type_name(MessageType type)
{
    for (const auto &[t, name] : type_names)
        if (t == type)
            return name;
    return "?";
}

std::string encode(const KernelMessage &message)
{
    nlohmann::ordered_json j;
    j["type"] = message_type_name(message.type);
    j["id"] = message.id;
    for (const auto &[key, value] : message.payload.items())
        if (key != "type" && key != "id")
            j[key] = value;
    return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

KernelMessage decode(std::string_view line)
{
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception &e) {
        protocol_error(fmt::format("malformed message: {}", e.what()));
    }
    if (!j.is_object())
        protocol_error("message is not an object");
    if (!j.contains("type") || !j["type"].is_string())
        protocol_error("message has no type");
    if (!j.contains("id") || !j["id"].is_number_integer())
        protocol_error("message has no integer id");

    KernelMessage m;
    const auto type = j["type"].get<std::string>();
    bool known = false;
    for (const auto &[t, name] : type_names) {
        if (type == name) {
            m.type = t;
            known = true;
        }
    }
    if (!known)
        protocol_error(fmt::format("unknown message type '{}'", type));
    m.id = j["id"].get<std::int64_t>();
    for (const auto &[key, value] : j.items())
        if (key != "type" && key != "id")
            m.payload[key] = value;
    return m;
}

bool KernelMessage::has(std::string_view name) const
{
    return payload.contains(std::string(name));
}

const nlohmann::ordered_json &KernelMessage::field(std::string_view name) const
{
    auto it = payload.find(std::string(name));
    if (it == payload.end())
        protocol_error(fmt::format("'{}' message lacks field '{}'", message_type_name(type), name));
    return *it;
}

std::string KernelMessage::string_field(std::string_view name) const
{
    const auto &f = field(name);
    if (!f.is_string())
        protocol_error(fmt::format("field '{}' of '{}' must be a string", name, message_type_name(type)));
    return f.get<std::string>();
}

double KernelMessage::number_field(std::string_view name) const
{
    const auto &f = field(name);
    if (!f.is_number())
        protocol_error(fmt::format("field '{}' of '{}' must be a number", name, message_type_name(type)));
    return f.get<double>();
}

std::int64_t KernelMessage::integer_field(std::string_view name) const
{
    const auto &f = field(name);
    if (!f.is_number_integer())
        protocol_error(fmt::format("field '{}' of '{}' must be an integer", name, message_type_name(type)));
    return f.get<std::int64_t>();
}

}  // namespace weave
