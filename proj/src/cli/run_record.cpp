#include <stickbreak/cli/run_record.hpp>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <stdexcept>

#include <openssl/evp.h>

namespace stickbreak::cli
{

using nlohmann::json;

std::string sha256_hex(const std::string &bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

json to_json(const RunRecord &r)
{
    return {{"command", r.command},     {"parameters", r.parameters}, {"version", r.version},
            {"timestamp", r.timestamp}, {"payload", r.payload},       {"checksum", sha256_hex(r.payload.dump())}};
}

RunRecord run_record_from_json(const json &j)
{
    for (const char *key : {"command", "parameters", "version", "timestamp", "payload", "checksum"}) {
        if (!j.is_object() || !j.contains(key)) {
            throw std::invalid_argument(std::string("run record lacks '") + key + "'");
        }
    }
    RunRecord r;
    r.command = j.at("command").get<std::string>();
    r.parameters = j.at("parameters");
    r.version = j.at("version").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.payload = j.at("payload");
    if (sha256_hex(r.payload.dump()) != j.at("checksum").get<std::string>()) {
        throw std::invalid_argument("run record checksum does not match its payload");
    }
    return r;
}

} // namespace stickbreak::cli
