#include <stickbreak/cli/commands.hpp>

#include <algorithm>
#include <charconv>
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <stickbreak/cli/run_record.hpp>
#include <stickbreak/cli/trace_io.hpp>
#include <stickbreak/lexmerge.hpp>
#include <stickbreak/optimizer.hpp>
#include <stickbreak/strategies.hpp>
#include <stickbreak/verify.hpp>

namespace stickbreak::cli
{

using nlohmann::json;

namespace
{

// Raised for bad arguments detected after parsing; maps to exit_usage.
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// 12 significant digits, '.' separator regardless of locale.
std::string num(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, r.ptr);
}

std::string num(long double v) { return num(static_cast<double>(v)); }

void write_file(const std::string &path, const std::string &content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw usage_error("cannot open '" + path + "' for writing");
    }
    f << content;
    if (!f) {
        throw usage_error("failed writing '" + path + "'");
    }
}

json report_to_json(const CheckReport &r)
{
    return {{"check", r.check},         {"n", r.n},
            {"stage_first", r.stage_first}, {"stage_last", r.stage_last},
            {"status", to_string(r.status)}, {"witness", r.witness},
            {"detail", r.detail}};
}

std::set<std::string> parse_checks(const std::vector<std::string> &names, bool allow_stored)
{
    const auto &known = check_names();
    std::set<std::string> out;
    for (const auto &name : names) {
        if (name.empty()) {
            continue;
        }
        const bool ok = std::find(known.begin(), known.end(), name) != known.end()
                        || (allow_stored && name == "stored_discs");
        if (!ok) {
            throw usage_error("unknown check '" + name + "'");
        }
        out.insert(name);
    }
    return out;
}

struct Outcome {
    int code = exit_pass;
    json payload;
};

Outcome cmd_lexmerge(unsigned n, bool emit_trace, const std::string &json_path, std::ostream &out)
{
    if (n == 0) {
        throw usage_error("--n must be at least 1");
    }
    const auto t = run(n);
    for (std::size_t i = 0; i < t.collections.size(); ++i) {
        const auto &c = t.collections[i];
        if (emit_trace) {
            out << "B_" << i << " = " << c.to_string() << '\n';
        } else {
            out << "stage " << i << ": " << c.size() << " baskets, disc " << num(t.discs[i].value()) << '\n';
        }
    }
    const auto certified = check_disc_value(t);
    const auto worst = t.discs[t.max_disc_stage()];
    out << "disc(LM_" << n << ") = " << worst.max_length.to_string() << " / " << worst.min_length.to_string()
        << " = 2^(1-1/" << t.m << ") ~ " << num(worst.value()) << '\n';
    out << "exact certificate: " << to_string(certified.status) << '\n';
    if (!certified.passed()) {
        out << "  " << certified.witness << '\n';
    }
    auto payload = trace_to_json(t);
    if (!json_path.empty()) {
        write_file(json_path, payload.dump() + "\n");
        out << "trace written to " << json_path << '\n';
    }
    return {certified.passed() ? exit_pass : exit_fail, std::move(payload)};
}

void print_reports(const std::vector<CheckReport> &reports, std::ostream &out)
{
    // One summary line per check, then every failure with its witness.
    std::map<std::string, std::array<std::size_t, 3>> tally;
    for (const auto &r : reports) {
        ++tally[r.check][static_cast<std::size_t>(r.status)];
    }
    for (const auto &[check, counts] : tally) {
        const char *verdict = counts[2] ? "FAIL" : "PASS";
        out << check << ": " << verdict << " (pass " << counts[0] << ", vacuous " << counts[1] << ", fail " << counts[2]
            << ")\n";
    }
    for (const auto &r : reports) {
        if (!r.passed()) {
            out << "FAIL " << r.check << " n=" << r.n << " stages " << r.stage_first << ".." << r.stage_last << ": "
                << r.witness << '\n';
        }
    }
}

Outcome cmd_verify(unsigned from, unsigned to, const std::vector<std::string> &check_list,
                   const std::string &trace_path, std::ostream &out)
{
    std::vector<CheckReport> reports;
    if (!trace_path.empty()) {
        auto checks = parse_checks(check_list, true);
        std::ifstream f(trace_path, std::ios::binary);
        if (!f) {
            throw usage_error("cannot read '" + trace_path + "'");
        }
        json j;
        try {
            j = json::parse(f);
        } catch (const json::exception &e) {
            throw malformed_input(std::string("not valid JSON: ") + e.what());
        }
        const auto stored = trace_from_json(j);
        const bool all = checks.empty();
        const bool want_stored = checks.erase("stored_discs") > 0 || all;
        if (all || !checks.empty()) {
            reports = verify_trace(stored.trace, checks);
        }
        if (want_stored) {
            reports.push_back(check_stored_discs(stored));
        }
        out << "trace " << trace_path << " (n = " << stored.trace.n << ")\n";
    } else {
        const auto checks = parse_checks(check_list, false);
        if (from == 0 || from > to) {
            throw usage_error("need 1 <= --from <= --to");
        }
        for (unsigned n = from; n <= to; ++n) {
            auto r = verify_all(n, checks);
            reports.insert(reports.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
        }
        out << "n = " << from << ".." << to << '\n';
    }
    print_reports(reports, out);
    json payload = json::array();
    bool ok = true;
    for (const auto &r : reports) {
        payload.push_back(report_to_json(r));
        ok = ok && r.passed();
    }
    return {ok ? exit_pass : exit_fail, std::move(payload)};
}

std::string bounds_csv(const std::vector<BoundsRow> &rows, bool with_optimal)
{
    std::ostringstream s;
    s << "n,lower_bound,lexmerge,dbe_bound" << (with_optimal ? ",optimal" : "") << '\n';
    for (const auto &r : rows) {
        s << r.n << ',' << num(r.lower_bound) << ',' << num(r.lexmerge_value) << ',' << num(r.dbe_bound);
        if (with_optimal) {
            s << ',' << (r.optimal ? num(*r.optimal) : "");
        }
        s << '\n';
    }
    return s.str();
}

Outcome cmd_bounds(unsigned from, unsigned to, const std::string &csv_path, bool with_optimal,
                   const OptimizeOptions &opt, double tol, std::ostream &out)
{
    if (from == 0 || from > to) {
        throw usage_error("need 1 <= --from <= --to");
    }
    std::function<std::optional<double>(unsigned)> optimal;
    if (with_optimal) {
        optimal = [&](unsigned n) -> std::optional<double> {
            if (n > opt.cap) {
                return std::nullopt;
            }
            return optimize(n, tol, opt).disc;
        };
    }
    const auto rows = bounds_table(from, to, optimal);
    const auto csv = bounds_csv(rows, with_optimal);
    if (csv_path.empty()) {
        out << csv;
    } else {
        write_file(csv_path, csv);
        out << rows.size() << " rows written to " << csv_path << '\n';
    }
    json payload = json::array();
    for (const auto &r : rows) {
        json row{{"n", r.n}, {"lower_bound", r.lower_bound}, {"lexmerge", r.lexmerge_value}, {"dbe_bound", r.dbe_bound}};
        if (r.optimal) {
            row["optimal"] = *r.optimal;
        }
        payload.push_back(std::move(row));
    }
    return {exit_pass, std::move(payload)};
}

std::string schedule_words(const SplitSchedule &s)
{
    std::string out;
    for (std::size_t i = 0; i < s.choices.size(); ++i) {
        out += (i ? " " : "") + std::to_string(s.choices[i]);
    }
    return out;
}

Outcome cmd_optimize(unsigned n, double tol, const OptimizeOptions &opt, const std::string &csv_path,
                     std::ostream &out)
{
    if (n == 0) {
        throw usage_error("--n must be at least 1");
    }
    if (!(tol > 0 && tol < 1)) {
        throw usage_error("--tol must lie in (0, 1)");
    }
    ConjectureReport rep;
    try {
        rep = conjecture_report(n, tol, opt);
    } catch (const optimizer_cap_exceeded &e) {
        throw usage_error(e.what());
    }
    const auto &res = rep.result;
    out << "n = " << n << ", tol = " << num(tol) << '\n';
    out << "schedules: " << res.raw_schedules << " raw, " << res.distinct_schedules << " up to child swaps\n";
    out << "disc(" << n << ") ~ " << num(res.disc) << '\n';
    out << "best schedule: " << res.best.to_string() << '\n';
    out << "witness leaves:";
    for (const auto &l : res.witness.leaf_lengths) {
        out << ' ' << num(l.get_d());
    }
    out << "\nwitness disc: " << num(res.witness.achieved_disc) << '\n';
    out << "splits stay below the minimum: " << (res.splits_below_min ? "yes" : "no") << '\n';
    out << "lower bound 2^(1-1/ceil(n/3)) = " << num(rep.lower_bound) << '\n';
    out << "conjectured 2^(1-1/ceil(n/2)) = " << num(rep.conjectured) << '\n';
    out << "verdict: " << to_string(rep.outcome) << '\n';
    if (rep.outcome == verdict::below_conjecture) {
        out << "************************************************************\n"
            << "FINDING: disc(" << n << ") is below the conjectured value by more than tol\n"
            << "************************************************************\n";
    }
    if (rep.is_violation()) {
        out << "INTERNAL ERROR: value outside the proven bounds\n";
    }
    if (!csv_path.empty()) {
        std::ostringstream s;
        s << "n,tol,disc,lower_bound,conjectured,verdict,schedule\n"
          << n << ',' << num(tol) << ',' << num(res.disc) << ',' << num(rep.lower_bound) << ','
          << num(rep.conjectured) << ',' << to_string(rep.outcome) << ',' << schedule_words(res.best) << '\n';
        write_file(csv_path, s.str());
    }
    json leaves = json::array();
    for (const auto &l : res.witness.leaf_lengths) {
        leaves.push_back(l.get_str());
    }
    json payload{{"n", n},
                 {"tol", tol},
                 {"disc", res.disc},
                 {"schedule", res.best.choices},
                 {"witness_leaves", leaves},
                 {"raw_schedules", res.raw_schedules},
                 {"distinct_schedules", res.distinct_schedules},
                 {"splits_below_min", res.splits_below_min},
                 {"lower_bound", rep.lower_bound},
                 {"conjectured", rep.conjectured},
                 {"verdict", to_string(rep.outcome)}};
    return {rep.is_violation() ? exit_fail : exit_pass, std::move(payload)};
}

Outcome cmd_dbe(unsigned n, bool prefix, std::ostream &out)
{
    if (n == 0) {
        throw usage_error("--n must be at least 1");
    }
    const auto pts = dbe_points(n);
    Strategy s;
    try {
        s = strategy_from_points(pts);
    } catch (const degenerate_points &e) {
        out << "degenerate point set: " << e.what() << '\n';
        return {exit_fail, json::object()};
    }
    out << "points:";
    for (auto p : pts.points) {
        out << ' ' << num(p);
    }
    out << "\ngaps:";
    for (double g : s.partition(n)) {
        out << ' ' << num(g);
    }
    const double d = disc_of(s);
    out << "\ndisc = " << num(d) << '\n';
    out << "ub_dbe = " << num(ub_dbe(n)) << '\n';
    json payload{{"n", n}, {"disc", d}, {"ub_dbe", ub_dbe(n)}};
    bool ok = d < 2;
    if (prefix) {
        const auto stages = stage_discs(s);
        double running = 1;
        json prefixes = json::array();
        for (std::size_t t = 0; t < stages.size(); ++t) {
            running = std::max(running, stages[t]);
            out << "prefix " << t + 1 << ": " << num(running) << '\n';
            prefixes.push_back(running);
            ok = ok && running < 2;
        }
        payload["prefix_disc"] = std::move(prefixes);
        out << "all prefix values < 2: " << (ok ? "yes" : "no") << '\n';
    }
    return {ok ? exit_pass : exit_fail, std::move(payload)};
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Exact lex-merge interval splitting: verification, bounds and search"};
    app.require_subcommand(1);
    std::string record_path;
    app.add_option("--record", record_path, "Write a JSON run record with checksum to this path");

    unsigned n = 1, from = 1, to = 1;
    bool emit_trace = false, with_optimal = false, prefix = false, split_largest = false;
    std::string json_path, csv_path, trace_path;
    std::vector<std::string> checks;
    double tol = 1e-6;
    OptimizeOptions opt;

    auto *lm = app.add_subcommand("lexmerge", "Run lex-merge and certify its discrepancy");
    lm->add_option("--n", n, "Strategy length")->required();
    lm->add_flag("--trace", emit_trace, "Print every collection");
    lm->add_option("--json", json_path, "Write the trace as JSON");

    auto *vf = app.add_subcommand("verify", "Check the structural properties of lex-merge traces");
    vf->add_option("--from", from, "First n");
    vf->add_option("--to", to, "Last n");
    vf->add_option("--checks", checks, "Comma-separated subset of checks")->delimiter(',');
    vf->add_option("--trace-json", trace_path, "Audit a stored trace instead of generating one");

    auto *bd = app.add_subcommand("bounds", "Tabulate the discrepancy bounds");
    bd->add_option("--from", from, "First n")->required();
    bd->add_option("--to", to, "Last n")->required();
    bd->add_option("--csv", csv_path, "Write the table to this CSV file");
    bd->add_flag("--with-optimal", with_optimal, "Add exhaustively optimised disc(n) where n <= cap");
    bd->add_option("--tol", tol, "Optimiser tolerance");
    bd->add_option("--jobs", opt.jobs, "Optimiser worker threads");
    bd->add_option("--cap", opt.cap, "Largest n the optimiser will attempt");

    auto *op = app.add_subcommand("optimize", "Compute disc(n) by exhaustive search over split schedules");
    op->add_option("--n", n, "Strategy length")->required();
    op->add_option("--tol", tol, "Bisection tolerance");
    op->add_option("--jobs", opt.jobs, "Worker threads");
    op->add_option("--cap", opt.cap, "Largest n allowed ((n-1)! schedules)");
    op->add_option("--csv", csv_path, "Write the result row to this CSV file");
    op->add_flag("--split-largest", split_largest, "Only consider strategies that always split a longest piece");

    auto *db = app.add_subcommand("dbe", "Evaluate the de Bruijn-Erdos point strategy");
    db->add_option("--n", n, "Number of points")->required();
    db->add_flag("--prefix-disc", prefix, "Print the running discrepancy of every prefix");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return exit_pass;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
    auto *sub = app.get_subcommands().front();
    json params{{"args", args}};
    try {
        Outcome result;
        opt.feasibility.require_split_largest = split_largest;
        if (sub == lm) {
            result = cmd_lexmerge(n, emit_trace, json_path, out);
        } else if (sub == vf) {
            if (trace_path.empty() && vf->count("--from") + vf->count("--to") != 2) {
                throw usage_error("verify needs --from and --to, or --trace-json");
            }
            result = cmd_verify(from, to, checks, trace_path, out);
        } else if (sub == bd) {
            result = cmd_bounds(from, to, csv_path, with_optimal, opt, tol, out);
        } else if (sub == op) {
            result = cmd_optimize(n, tol, opt, csv_path, out);
        } else {
            result = cmd_dbe(n, prefix, out);
        }
        if (!record_path.empty()) {
            RunRecord rec{sub->get_name(), params, tool_version, utc_timestamp(), std::move(result.payload)};
            write_file(record_path, to_json(rec).dump(1) + "\n");
        }
        return result.code;
    } catch (const usage_error &e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const malformed_input &e) {
        err << "malformed input: " << e.what() << '\n';
        return exit_usage;
    }
}

} // namespace stickbreak::cli
