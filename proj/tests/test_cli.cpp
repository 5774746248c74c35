#include <doctest.h>

#include <clocale>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

#include <stickbreak/cli/commands.hpp>
#include <stickbreak/cli/run_record.hpp>
#include <stickbreak/cli/trace_io.hpp>
#include <stickbreak/verify.hpp>

using namespace stickbreak;
using namespace stickbreak::cli;
namespace fs = std::filesystem;

namespace
{

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args)
{
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Scratch directory removed at scope exit.
struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("stickbreak_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string &name) const { return (path / name).string(); }
    static int &counter()
    {
        static int c = 0;
        return c;
    }
};

std::string slurp(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void spit(const std::string &path, const std::string &content) { std::ofstream(path, std::ios::binary) << content; }

std::string g12(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

bool contains(const std::string &hay, const std::string &needle) { return hay.find(needle) != std::string::npos; }

} // namespace

TEST_CASE("lexmerge prints the LM_7 trace")
{
    const auto r = invoke({"lexmerge", "--n", "7", "--trace"});
    CHECK(r.code == exit_pass);
    CHECK(contains(r.out, "B_0 = {[0],[0],[1],[1],[2],[2],[3]}\n"
                          "B_1 = {[1],[1],[2],[2],[3],[0,0]}\n"
                          "B_2 = {[2],[2],[3],[0,0],[1,1]}\n"
                          "B_3 = {[3],[0,0],[1,1],[2,2]}\n"
                          "B_4 = {[1,1],[2,2],[0,0,3]}\n"
                          "B_5 = {[0,0,3],[1,1,2,2]}\n"
                          "B_6 = {[0,0,1,1,2,2,3]}\n"));
    CHECK(contains(r.out, "disc(LM_7) = q^3 / 1"));
    CHECK(contains(r.out, "exact certificate: PASS"));
}

TEST_CASE("lexmerge with one piece")
{
    const auto r = invoke({"lexmerge", "--n", "1"});
    CHECK(r.code == exit_pass);
    CHECK(contains(r.out, "stage 0: 1 baskets, disc 1\n"));
    CHECK_FALSE(contains(r.out, "stage 1"));
}

TEST_CASE("usage errors exit 2")
{
    CHECK(invoke({}).code == exit_usage);
    CHECK(invoke({"frobnicate"}).code == exit_usage);
    CHECK(invoke({"lexmerge"}).code == exit_usage);
    CHECK(invoke({"lexmerge", "--n", "abc"}).code == exit_usage);
    CHECK(invoke({"lexmerge", "--n", "0"}).code == exit_usage);
    CHECK(invoke({"verify"}).code == exit_usage);
    CHECK(invoke({"verify", "--from", "5", "--to", "3"}).code == exit_usage);
    CHECK(invoke({"verify", "--from", "1", "--to", "3", "--checks", "p1,nonsense"}).code == exit_usage);
    CHECK(invoke({"bounds", "--from", "0", "--to", "3"}).code == exit_usage);
    CHECK(invoke({"optimize", "--n", "9"}).code == exit_usage);
    CHECK(invoke({"optimize", "--n", "3", "--tol", "0"}).code == exit_usage);
    CHECK(invoke({"dbe", "--n", "0"}).code == exit_usage);
    const auto h = invoke({"--help"});
    CHECK(h.code == exit_pass);
    CHECK(contains(h.out, "lexmerge"));
}

TEST_CASE("verify a range with selected checks")
{
    const auto r = invoke({"verify", "--from", "7", "--to", "7", "--checks", "p1,p2,p3"});
    CHECK(r.code == exit_pass);
    CHECK(contains(r.out, "p1: PASS"));
    CHECK(contains(r.out, "p2: PASS"));
    CHECK(contains(r.out, "p3: PASS"));
    CHECK_FALSE(contains(r.out, "monotonicity"));
    CHECK(invoke({"verify", "--from", "1", "--to", "30"}).code == exit_pass);
}

TEST_CASE("stored traces round-trip through JSON")
{
    for (unsigned n : {1U, 2U, 3U, 7U, 16U, 51U, 128U}) {
        const auto t = run(n);
        const auto text = trace_to_json(t).dump();
        const auto back = trace_from_json(nlohmann::json::parse(text));
        CHECK(back.trace.collections == t.collections);
        CHECK(check_stored_discs(back).passed());
        for (const auto &r : verify_trace(back.trace)) {
            INFO("n=" << n << " " << r.check << ": " << r.witness);
            CHECK(r.passed());
        }
    }
}

TEST_CASE("large coefficients survive as strings")
{
    QNumber x(3, {BigInt("98765432109876543210987654321"), BigInt(-5), BigInt(0)});
    const auto j = qnumber_to_json(x);
    CHECK(j[0].is_string());
    CHECK(j[1].is_number_integer());
    CHECK(qnumber_from_json(3, j) == x);
    CHECK_THROWS_AS(qnumber_from_json(3, nlohmann::json::array({1, 2})), malformed_input);
    CHECK_THROWS_AS(qnumber_from_json(2, nlohmann::json::array({"12x", 2})), malformed_input);
}

TEST_CASE("verify audits a written trace")
{
    TempDir dir;
    const auto path = dir.file("t200.json");
    REQUIRE(invoke({"lexmerge", "--n", "200", "--json", path}).code == exit_pass);
    const auto r = invoke({"verify", "--trace-json", path});
    CHECK(r.code == exit_pass);
    CHECK(contains(r.out, "stored_discs: PASS"));
    CHECK_FALSE(contains(r.out, "FAIL"));
}

TEST_CASE("a corrupted basket element is caught with a witness")
{
    TempDir dir;
    const auto path = dir.file("t7.json");
    REQUIRE(invoke({"lexmerge", "--n", "7", "--json", path}).code == exit_pass);
    auto j = nlohmann::json::parse(slurp(path));
    REQUIRE(j["collections"][4][0] == nlohmann::json::array({1, 1}));
    j["collections"][4][0] = nlohmann::json::array({1, 2});
    spit(path, j.dump());
    const auto r = invoke({"verify", "--trace-json", path});
    CHECK(r.code == exit_fail);
    CHECK(contains(r.out, "FAIL conservation"));
    CHECK(contains(r.out, "stage 4"));
}

TEST_CASE("tampered discrepancy coefficients are caught")
{
    TempDir dir;
    const auto path = dir.file("t9.json");
    REQUIRE(invoke({"lexmerge", "--n", "9", "--json", path}).code == exit_pass);
    auto j = nlohmann::json::parse(slurp(path));
    j["disc_coeffs"][2]["max"][0] = 17;
    spit(path, j.dump());
    const auto r = invoke({"verify", "--trace-json", path});
    CHECK(r.code == exit_fail);
    CHECK(contains(r.out, "FAIL stored_discs"));
}

TEST_CASE("malformed traces exit 2")
{
    TempDir dir;
    const auto path = dir.file("bad.json");
    auto good = trace_to_json(run(5));
    auto attempt = [&](const std::string &text) {
        spit(path, text);
        return invoke({"verify", "--trace-json", path}).code;
    };
    CHECK(attempt("{ not json") == exit_usage);
    CHECK(attempt("[]") == exit_usage);
    auto j = good;
    j.erase("merges");
    CHECK(attempt(j.dump()) == exit_usage);
    j = good;
    j["m"] = 7;
    CHECK(attempt(j.dump()) == exit_usage);
    j = good;
    j["collections"][0][0] = nlohmann::json::array({9});
    CHECK(attempt(j.dump()) == exit_usage);
    j = good;
    j["collections"][0][0] = nlohmann::json::array({"0"});
    CHECK(attempt(j.dump()) == exit_usage);
    j = good;
    j["merges"][0]["step"] = 3;
    CHECK(attempt(j.dump()) == exit_usage);
    j = good;
    j["disc_coeffs"].erase(0);
    CHECK(attempt(j.dump()) == exit_usage);
    CHECK(invoke({"verify", "--trace-json", dir.file("missing.json")}).code == exit_usage);
    CHECK(attempt(good.dump()) == exit_pass);
}

TEST_CASE("bounds table format")
{
    const auto r = invoke({"bounds", "--from", "1", "--to", "10"});
    CHECK(r.code == exit_pass);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "n,lower_bound,lexmerge,dbe_bound");
    for (int i = 0; i < 4; ++i) {
        std::getline(lines, row);
    }
    const double dbe4 = std::log(5.0 / 4.0) / std::log(8.0 / 7.0);
    CHECK(row == "4," + g12(std::sqrt(2.0)) + "," + g12(std::sqrt(2.0)) + "," + g12(dbe4));
    CHECK(row == "4,1.41421356237,1.41421356237,1.67109431669");

    const auto o = invoke({"bounds", "--from", "3", "--to", "5", "--with-optimal"});
    CHECK(contains(o.out, "n,lower_bound,lexmerge,dbe_bound,optimal\n"));
    const std::string prefix = "\n4,1.41421356237,1.41421356237,1.67109431669,";
    const auto at = o.out.find(prefix);
    REQUIRE(at != std::string::npos);
    const double optimal4 = std::stod(o.out.substr(at + prefix.size()));
    CHECK(std::fabs(optimal4 - std::sqrt(2.0)) <= 1e-6);
}

TEST_CASE("CSV output is byte-stable and locale-independent")
{
    TempDir dir;
    const auto a = dir.file("a.csv"), b = dir.file("b.csv"), c = dir.file("c.csv");
    REQUIRE(invoke({"bounds", "--from", "1", "--to", "300", "--csv", a}).code == exit_pass);
    REQUIRE(invoke({"bounds", "--from", "1", "--to", "300", "--csv", b}).code == exit_pass);
    CHECK(slurp(a) == slurp(b));
    for (const char *name : {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE"}) {
        if (std::setlocale(LC_ALL, name)) {
            REQUIRE(invoke({"bounds", "--from", "1", "--to", "300", "--csv", c}).code == exit_pass);
            CHECK(slurp(a) == slurp(c));
            std::setlocale(LC_ALL, "C");
            break;
        }
    }
    const auto oa = dir.file("oa.csv"), ob = dir.file("ob.csv");
    REQUIRE(invoke({"optimize", "--n", "5", "--csv", oa}).code == exit_pass);
    REQUIRE(invoke({"optimize", "--n", "5", "--csv", ob}).code == exit_pass);
    CHECK(slurp(oa) == slurp(ob));
    CHECK(slurp(oa).rfind("n,tol,disc,lower_bound,conjectured,verdict,schedule\n5,", 0) == 0);
}

TEST_CASE("optimize reports")
{
    const auto three = invoke({"optimize", "--n", "3", "--tol", "1e-7"});
    CHECK(three.code == exit_pass);
    CHECK(contains(three.out, "disc(3) ~ 1.414213"));
    CHECK(contains(three.out, "verdict: consistent"));
    CHECK_FALSE(contains(three.out, "FINDING"));

    const auto four = invoke({"optimize", "--n", "4", "--tol", "1e-7"});
    CHECK(four.code == exit_pass);
    CHECK(contains(four.out, "lower bound 2^(1-1/ceil(n/3)) = 1.41421356237"));
    CHECK(contains(four.out, "conjectured 2^(1-1/ceil(n/2)) = 1.41421356237"));
    CHECK(contains(four.out, "disc(4) ~ 1.414213"));
}

TEST_CASE("optimize output is identical across worker counts")
{
    const auto one = invoke({"optimize", "--n", "6", "--jobs", "1"});
    const auto four = invoke({"optimize", "--n", "6", "--jobs", "4"});
    CHECK(one.code == exit_pass);
    CHECK(one.out == four.out);
}

TEST_CASE("dbe command")
{
    const auto three = invoke({"dbe", "--n", "3"});
    CHECK(three.code == exit_pass);
    CHECK(contains(three.out, "points: 0 0.584962500721 0.321928094887\n"));
    CHECK(contains(invoke({"dbe", "--n", "1"}).out, "disc = 1\n"));
    const auto big = invoke({"dbe", "--n", "1000", "--prefix-disc"});
    CHECK(big.code == exit_pass);
    CHECK(contains(big.out, "prefix 1000: "));
    CHECK(contains(big.out, "all prefix values < 2: yes"));
}

TEST_CASE("run records carry a verifiable checksum")
{
    TempDir dir;
    const auto path = dir.file("rec.json");
    REQUIRE(invoke({"--record", path, "lexmerge", "--n", "9"}).code == exit_pass);
    const auto j = nlohmann::json::parse(slurp(path));
    const auto rec = run_record_from_json(j);
    CHECK(rec.command == "lexmerge");
    CHECK(rec.version == tool_version);
    CHECK(rec.timestamp.size() == 20);
    const auto back = trace_from_json(rec.payload);
    CHECK(back.trace.collections == run(9).collections);

    auto tampered = j;
    tampered["payload"]["n"] = 10;
    CHECK_THROWS(run_record_from_json(tampered));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
