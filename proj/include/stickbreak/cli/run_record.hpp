#ifndef STICKBREAK_CLI_RUN_RECORD_HPP
#define STICKBREAK_CLI_RUN_RECORD_HPP

#include <string>

#include <json.hpp>

namespace stickbreak::cli
{

inline constexpr const char *tool_version = "1.0.0";

struct RunRecord {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::string version = tool_version;
    std::string timestamp; // ISO 8601, UTC
    nlohmann::json payload;
};

// Lowercase hex SHA-256.
std::string sha256_hex(const std::string &bytes);

// Current UTC time, e.g. "2026-01-31T12:00:00Z".
std::string utc_timestamp();

// Serialised form carries "checksum": sha256 of payload.dump().
nlohmann::json to_json(const RunRecord &r);

// Throws std::invalid_argument on missing fields or a checksum mismatch.
RunRecord run_record_from_json(const nlohmann::json &j);

} // namespace stickbreak::cli

#endif
