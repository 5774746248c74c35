#include <stickbreak/cli/trace_io.hpp>

#include <limits>

namespace stickbreak::cli
{

using nlohmann::json;

namespace
{

const json &field(const json &obj, const char *name)
{
    if (!obj.is_object() || !obj.contains(name)) {
        throw malformed_input(std::string("missing field '") + name + "'");
    }
    return obj.at(name);
}

unsigned as_unsigned(const json &j, const char *what)
{
    if (!j.is_number_integer() || j.get<long long>() < 0
        || j.get<long long>() > std::numeric_limits<unsigned>::max()) {
        throw malformed_input(std::string(what) + " must be a non-negative integer");
    }
    return j.get<unsigned>();
}

const json &as_array(const json &j, const char *what)
{
    if (!j.is_array()) {
        throw malformed_input(std::string(what) + " must be an array");
    }
    return j;
}

Basket basket_from_json(unsigned m, const json &j)
{
    std::vector<int> elems;
    for (const auto &e : as_array(j, "basket")) {
        if (!e.is_number_integer()) {
            throw malformed_input("basket elements must be integers");
        }
        const auto v = e.get<long long>();
        if (v < 0 || v >= static_cast<long long>(m)) {
            throw malformed_input("basket element " + std::to_string(v) + " outside 0.." + std::to_string(m - 1));
        }
        elems.push_back(static_cast<int>(v));
    }
    try {
        return Basket(m, std::move(elems));
    } catch (const std::invalid_argument &e) {
        throw malformed_input(e.what());
    }
}

} // namespace

json qnumber_to_json(const QNumber &x)
{
    json out = json::array();
    for (const auto &c : x.coeffs()) {
        if (c.fits_slong_p()) {
            out.push_back(c.get_si());
        } else {
            out.push_back(c.get_str());
        }
    }
    return out;
}

QNumber qnumber_from_json(unsigned m, const json &j)
{
    if (!j.is_array() || j.size() != m) {
        throw malformed_input("coefficient vector must have exactly m = " + std::to_string(m) + " entries");
    }
    std::vector<BigInt> coeffs;
    coeffs.reserve(m);
    for (const auto &c : j) {
        if (c.is_number_integer()) {
            coeffs.emplace_back(std::to_string(c.get<long long>()));
        } else if (c.is_string()) {
            BigInt v;
            if (v.set_str(c.get<std::string>(), 10) != 0) {
                throw malformed_input("coefficient '" + c.get<std::string>() + "' is not a decimal integer");
            }
            coeffs.push_back(std::move(v));
        } else {
            throw malformed_input("coefficients must be integers or decimal strings");
        }
    }
    return QNumber(m, std::move(coeffs));
}

json trace_to_json(const Trace &t)
{
    json cols = json::array();
    for (const auto &c : t.collections) {
        json col = json::array();
        for (const auto &b : c.baskets()) {
            col.push_back(b.elements());
        }
        cols.push_back(std::move(col));
    }
    json merges = json::array();
    for (const auto &r : t.merges) {
        merges.push_back({{"step", r.stage + 1}, {"left_index", r.left_index}, {"right_index", r.right_index}});
    }
    json discs = json::array();
    for (const auto &d : t.discs) {
        discs.push_back({{"max", qnumber_to_json(d.max_length)}, {"min", qnumber_to_json(d.min_length)}});
    }
    return {{"n", t.n}, {"m", t.m}, {"collections", cols}, {"merges", merges}, {"disc_coeffs", discs}};
}

StoredTrace trace_from_json(const json &j)
{
    if (!j.is_object()) {
        throw malformed_input("trace must be a JSON object");
    }
    const unsigned n = as_unsigned(field(j, "n"), "n");
    const unsigned m = as_unsigned(field(j, "m"), "m");
    if (n == 0) {
        throw malformed_input("n must be positive");
    }
    if (m != half_order(n)) {
        throw malformed_input("m must equal ceil(n/2) = " + std::to_string(half_order(n)));
    }

    std::vector<BasketCollection> collections;
    for (const auto &col : as_array(field(j, "collections"), "collections")) {
        std::vector<Basket> baskets;
        for (const auto &b : as_array(col, "collection")) {
            baskets.push_back(basket_from_json(m, b));
        }
        collections.emplace_back(n, static_cast<unsigned>(collections.size()), std::move(baskets));
    }

    std::vector<std::pair<std::size_t, std::size_t>> indices;
    for (const auto &r : as_array(field(j, "merges"), "merges")) {
        const unsigned step = as_unsigned(field(r, "step"), "step");
        if (step != indices.size() + 1) {
            throw malformed_input("merge steps must be numbered 1, 2, ...");
        }
        indices.emplace_back(as_unsigned(field(r, "left_index"), "left_index"),
                             as_unsigned(field(r, "right_index"), "right_index"));
    }

    StoredTrace out;
    try {
        out.trace = make_trace(n, std::move(collections), std::move(indices));
    } catch (const std::invalid_argument &e) {
        throw malformed_input(e.what());
    }
    for (const auto &d : as_array(field(j, "disc_coeffs"), "disc_coeffs")) {
        out.disc_coeffs.emplace_back(qnumber_from_json(m, field(d, "max")), qnumber_from_json(m, field(d, "min")));
    }
    if (out.disc_coeffs.size() != out.trace.collections.size()) {
        throw malformed_input("disc_coeffs needs one entry per collection");
    }
    return out;
}

CheckReport check_stored_discs(const StoredTrace &s)
{
    CheckReport rep;
    rep.check = "stored_discs";
    rep.n = s.trace.n;
    rep.stage_last = s.trace.collections.empty() ? 0 : static_cast<unsigned>(s.trace.collections.size() - 1);
    for (std::size_t i = 0; i < s.disc_coeffs.size() && i < s.trace.discs.size(); ++i) {
        const auto &d = s.trace.discs[i];
        const auto &[mx, mn] = s.disc_coeffs[i];
        if (!(mx == d.max_length) || !(mn == d.min_length)) {
            rep.status = check_status::fail;
            rep.witness = "stage " + std::to_string(i) + ": stored max/min " + mx.to_string() + " / "
                          + mn.to_string() + ", recomputed " + d.max_length.to_string() + " / "
                          + d.min_length.to_string();
            return rep;
        }
    }
    return rep;
}

} // namespace stickbreak::cli
