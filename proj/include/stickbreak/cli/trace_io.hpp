#ifndef STICKBREAK_CLI_TRACE_IO_HPP
#define STICKBREAK_CLI_TRACE_IO_HPP

#include <stdexcept>
#include <string>

#include <json.hpp>

#include <stickbreak/lexmerge.hpp>
#include <stickbreak/qnum.hpp>
#include <stickbreak/verify.hpp>

namespace stickbreak::cli
{

// Input that does not follow the trace schema.
struct malformed_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Coefficients as JSON integers when they fit in 64 bits, decimal strings
// otherwise.
nlohmann::json qnumber_to_json(const QNumber &x);
QNumber qnumber_from_json(unsigned m, const nlohmann::json &j);

// {n, m, collections, merges: [{step, left_index, right_index}],
//  disc_coeffs: [{max, min}]}
nlohmann::json trace_to_json(const Trace &t);

// A parsed trace plus the discrepancy coefficients stored alongside it.
struct StoredTrace {
    Trace trace;
    std::vector<std::pair<QNumber, QNumber>> disc_coeffs;
};

// Throws malformed_input on schema violations, invalid baskets, or merge
// records that do not line up with the collections.
StoredTrace trace_from_json(const nlohmann::json &j);

// The stored disc_coeffs agree with the ones recomputed from the collections.
CheckReport check_stored_discs(const StoredTrace &s);

} // namespace stickbreak::cli

#endif
