#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

using namespace thetaval;
using thetaval::cli::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;

    json doc() const { return json::parse(out); }
};

Run run(const std::vector<std::string> &args)
{
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("verify")
{
    const Run r = run({"verify", "r3"});
    REQUIRE(r.code == 0);
    const json d = r.doc();
    CHECK(d["prec_bits"] == 512);
    REQUIRE(d["entries"].size() == 1);
    const json &row = d["entries"][0];
    CHECK(row["id"] == "r3");
    CHECK(row["status"] == "verified");
    CHECK(row["agreement_digits"].get<long>() >= 100);
    CHECK(row["runtime_ms"] == 0);
    CHECK(row["escalated"] == false);
    CHECK(row["lhs_mid_decimal"].get<std::string>().rfind("0.920590346252050823", 0) == 0);

    const Run missing = run({"verify", "nonexistent_id"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("nonexistent_id") != std::string::npos);
    CHECK(run({"verify"}).code == 2);
    CHECK(run({"verify", "r3", "--all"}).code == 2);
    CHECK(run({"verify", "r3", "--prec", "32"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("verify all with ordered parallel output")
{
    const Run serial = run({"verify", "--all", "--prec", "384"});
    const Run parallel = run({"verify", "--all", "--prec", "384", "--jobs", "4"});
    REQUIRE(serial.code == 0);
    CHECK(serial.out == parallel.out);
    const json d = serial.doc();
    const Catalog c = build_catalog();
    REQUIRE(d["entries"].size() == c.entries.size());
    for (std::size_t i = 0; i < c.entries.size(); ++i) {
        CHECK(d["entries"][i]["id"] == c.entries[i].id);
        CHECK(d["entries"][i]["status"] == "verified");
    }
}

TEST_CASE("eval")
{
    const Run r = run({"eval", "phi(qpoint(+1, 1))"});
    REQUIRE(r.code == 0);
    const json d = r.doc();
    CHECK(d["status"] == "ok");
    CHECK(d["value"].get<std::string>().rfind("1.0864348112133080145", 0) == 0);
    CHECK(d["digits"].get<long>() >= 100);

    const Run g = run({"eval", "gamma(1/2)^2 - pi"});
    REQUIRE(g.code == 0);
    CHECK(g.doc()["radius_exponent"].get<long>() < -100);

    CHECK(run({"eval", "phi(qpoint(+1, -3))"}).code == 2);
    CHECK(run({"eval", "1 +"}).code == 2);
    const Run div = run({"eval", "1 / (2 - 2)"});
    CHECK(div.code == 1);
    CHECK(div.doc()["status"] == "error");
}

TEST_CASE("sweep")
{
    const Run deg3 = run({"sweep", "deg3", "--grid", "0.05,0.1,0.2,0.3,0.4", "--prec", "384"});
    REQUIRE(deg3.code == 0);
    const json d = deg3.doc();
    REQUIRE(d["points"].size() == 5);
    CHECK(d["points"][0]["point"] == "1/20");
    for (const json &p : d["points"]) {
        CHECK(p["status"] == "pass");
        for (const json &res : p["residuals"]) {
            CHECK(res["contains_zero"] == true);
        }
    }

    CHECK(run({"sweep", "jims", "--grid", "0.3,0.6,0.9"}).code == 0);
    CHECK(run({"sweep", "deg15", "--grid", "1/10,1/5", "--prec", "256"}).code == 0);
    CHECK(run({"sweep", "septic", "--grid", "0.2", "--prec", "256"}).code == 0);
    CHECK(run({"sweep", "yi_product", "--grid", "1,2", "--prec", "256"}).code == 0);
    CHECK(run({"sweep", "deg3", "--grid", "1.5"}).code == 2);
    CHECK(run({"sweep", "deg3", "--grid", "0"}).code == 2);
    CHECK(run({"sweep", "yi_product", "--grid", "-1"}).code == 2);
    CHECK(run({"sweep", "deg3", "--grid", "abc"}).code == 2);
    CHECK(run({"sweep", "deg7", "--grid", "0.1"}).code == 2);
}

TEST_CASE("complete")
{
    const Run r = run({"complete", "--prec", "512"});
    REQUIRE(r.code == 0);
    const json d = r.doc();
    CHECK(d["status"] == "verified");
    CHECK(d["agreement_digits"].get<long>() >= 100);
    CHECK(d["permutation_index"] == 5);
    CHECK(d["identity"]["id"] == "ln7");
    CHECK(d["identity"]["rhs_text"] == render(build_catalog().find("ln7")->rhs));
    CHECK(d["misprint"]["agreement_digits"].get<long>() < 5);

    const Run low = run({"complete", "--prec", "64"});
    CHECK(low.code == 0);
    CHECK(low.doc()["status"] == "verified");
}

TEST_CASE("determinism and precision sources")
{
    const std::vector<std::string> args{"verify", "r5", "g9", "--prec", "256"};
    CHECK(run(args).out == run(args).out);

    ::setenv("THETAVAL_PREC_BITS", "320", 1);
    CHECK(run({"verify", "r5"}).doc()["prec_bits"] == 320);
    CHECK(run({"verify", "r5", "--prec", "256"}).doc()["prec_bits"] == 256);
    ::setenv("THETAVAL_PREC_BITS", "lots", 1);
    CHECK(run({"verify", "r5"}).code == 2);
    ::unsetenv("THETAVAL_PREC_BITS");

    CHECK(run({"verify", "r5", "--digits", "100"}).doc()["prec_bits"] == 333);
}

TEST_CASE("output file and catalog listing")
{
    const auto path = std::filesystem::temp_directory_path() / "thetaval_cli_test.json";
    const Run r = run({"catalog", "--out", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    std::filesystem::remove(path);
    const json d = json::parse(text.str());
    REQUIRE(d["entries"].size() == 19);
    CHECK(d["entries"][0]["id"] == "classical_1");
    CHECK_FALSE(d["entries"][0]["provenance"].get<std::string>().empty());
    CHECK(text.str().back() == '\n');
}
