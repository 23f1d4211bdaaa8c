#pragma once

#include <nlohmann/json.hpp>

#include "logeff/error.hpp"
#include "logeff/event.hpp"

namespace logeff {

inline Value value_from_json(const nlohmann::json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    throw Error(ErrorKind::MalformedRecord,
                "field \"" + path + "\" is not a scalar (string|integer|boolean)");
}

inline nlohmann::json value_to_json(const Value& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
    return std::get<bool>(v);
}

}  // namespace logeff
