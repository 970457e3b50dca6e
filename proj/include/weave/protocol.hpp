#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace weave {

inline constexpr int protocol_version = 1;

enum class MessageType { Hello, Exec, Output, Figure, Table, Value, Done, Eval, EvalResult, Shutdown };

const char *message_type_name(MessageType type);

/// One protocol message: a single line of JSON with `type`, `id` and
/// type-specific payload fields.
struct KernelMessage {
    MessageType type = MessageType::Hello;
    std::int64_t id = 0;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();

    /// Payload accessors; throw Error(KernelProtocolError) when the field is
    /// missing or has the wrong type.
    std::string string_field(std::string_view name) const;
    double number_field(std::string_view name) const;
    std::int64_t integer_field(std::string_view name) const;
    const nlohmann::ordered_json &field(std::string_view name) const;
    bool has(std::string_view name) const;
};

/// Encodes without the trailing newline.
std::string encode(const KernelMessage &message);

/// Throws Error(KernelProtocolError) for anything that is not a well-formed
/// message line.
KernelMessage decode(std::string_view line);

}  // namespace weave
