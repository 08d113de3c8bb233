#include "doctest.h"

#include "bifree/cli/cli.hpp"
#include "bifree/cli/io.hpp"
#include "bifree/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bifree;
using bifree::io::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() / ("bifree_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& body)
{
    std::ofstream f(path);
    f << body;
}

}  // namespace

TEST_CASE("gaussian fisher text and json")
{
    auto r = run({"gaussian", "fisher", "--matrix", "[[1,0.5],[0.5,1]]"});
    CHECK(r.code == 0);
    CHECK(r.out == "2.6666666667\n");
    auto j = run({"--format", "json", "gaussian", "fisher", "--matrix", "[[1,0.5],[0.5,1]]"});
    CHECK(json::parse(j.out)["fisher"].get<double>() == doctest::Approx(8.0 / 3.0).epsilon(1e-11));
    CHECK(run({"gaussian", "fisher", "--matrix", "[[1,1],[1,1]]"}).out == "inf\n");
    CHECK(run({"gaussian", "fisher", "--matrix", "[[1,0],[0,1]]", "--t", "1"}).out == "1.0000000000\n");
}

TEST_CASE("lattice, dq and error exit codes")
{
    auto r = run({"lattice", "--chi", "lrlr"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["count"] == 14);
    CHECK(j["partitions"].size() == 14);
    CHECK(j["mobius_0_to_1"] == -5);
    CHECK(run({"dq", "--side", "left", "--index", "1", "X1 X1 Y1"}).out == "Y1 ⊗ X1 + X1 Y1 ⊗ 1\n");
    CHECK(run({"dq", "--side", "right", "--flipped", "X1 Y1", "--mode", "free"}).out == "1 ⊗ X1\n");

    CHECK(run({"lattice", "--chi", "lrlr", "--bogus"}).code == cli::kExitValidation);
    CHECK(run({}).code == cli::kExitValidation);
    CHECK(run({"--help"}).code == cli::kExitOk);
    auto bad = run({"gaussian", "fisher", "--matrix", "[[1,0.5],[0.4,1]]"});
    CHECK(bad.code == cli::kExitValidation);
    CHECK(bad.out.empty());
    CHECK(bad.err.find("error") != std::string::npos);
    CHECK(run({"lattice", "--chi", "lxr"}).code == cli::kExitValidation);
    CHECK(run({"gaussian", "entropy", "--quad", "--matrix", "[[1,1],[1,1]]"}).code == cli::kExitConvergence);
}

TEST_CASE("output files need --force to overwrite")
{
    TempDir dir;
    const auto path = dir.file("f.txt");
    CHECK(run({"gaussian", "fisher", "--matrix", "[[2]]", "--out", path}).code == 0);
    CHECK(run({"gaussian", "fisher", "--matrix", "[[4]]", "--out", path}).code == cli::kExitValidation);
    CHECK(io::read_file(path) == "0.5000000000\n");
    CHECK(run({"gaussian", "fisher", "--matrix", "[[4]]", "--out", path, "--force"}).code == 0);
    CHECK(io::read_file(path) == "0.2500000000\n");
}

TEST_CASE("cumulant and moment files round-trip")
{
    TempDir dir;
    const auto cov = dir.file("cov.json");
    write(cov, R"({"n": 1, "m": 1, "matrix": [["1", "1/3"], ["1/3", 2]]})");
    const auto spec = dir.file("spec.json"), table = dir.file("table.json"), spec2 = dir.file("spec2.json");
    REQUIRE(run({"cumulants", "--covariance", cov, "--degree", "4", "--out", spec}).code == 0);
    auto s = io::read_json_file(spec);
    CHECK(s["entries"].size() == 4);
    CHECK(io::spec_to_json(io::spec_from_json(s)) == s);

    REQUIRE(run({"moments", "--spec", spec, "--degree", "4", "--out", table}).code == 0);
    auto t = io::read_json_file(table);
    CHECK(io::table_to_json(io::table_from_json(t)) == t);
    REQUIRE(run({"cumulants", "--table", table, "--degree", "4", "--out", spec2}).code == 0);
    CHECK(io::read_json_file(spec2) == s);

    auto m = run({"moments", "--table", table, "--word", "Y1 X1 Y1 X1"});
    CHECK(m.out == "Y1 X1 Y1 X1: 19/9\n");
    auto direct = run({"moments", "--covariance", cov, "--word", "X1 Y1 X1 Y1", "--format", "json"});
    CHECK(json::parse(direct.out)["moments"][0]["value"] == "19/9");
    auto k = run({"cumulants", "--covariance", cov, "--word", "X1 Y1"});
    CHECK(k.out == "X1 Y1: 1/3\n");
    CHECK(run({"cumulants", "--spec", spec, "--table", table, "--word", "X1"}).code == cli::kExitValidation);
}

TEST_CASE("conjugate-check exit status")
{
    const std::string m = "[[1,0.5],[0.5,1]]";
    auto pass = run({"conjugate-check", "--matrix", m, "--xi", "4/3*X1 - 2/3*Y1", "--degree", "5"});
    CHECK(pass.code == 0);
    CHECK(pass.out.rfind("PASS", 0) == 0);
    auto fail = run({"conjugate-check", "--matrix", m, "--xi", "X1"});
    CHECK(fail.code == cli::kExitCheckFailed);
    CHECK(fail.out == "FAIL at word Y1: phi(Z xi) = 1/2, (phi x phi)(dZ) = 0\n");
    CHECK(run({"conjugate-check", "--matrix", m, "--side", "right", "--xi", "4/3*Y1 - 2/3*X1"}).code == 0);
}

TEST_CASE("gaussian entropy, dimension and moments")
{
    auto e = json::parse(run({"--format", "json", "gaussian", "entropy", "--quad", "--matrix", "[[1,0.5],[0.5,1]]"}).out);
    CHECK(std::abs(e["entropy"].get<double>() - e["quadrature"].get<double>()) < 1e-6);
    CHECK(run({"gaussian", "entropy", "--matrix", "[[1,1],[1,1]]"}).out == "-inf\n");
    auto d = json::parse(run({"--format", "json", "gaussian", "dimension", "--limit", "--matrix", "[[1,1],[1,1]]"}).out);
    CHECK(d["dimension"] == 1);
    CHECK(std::abs(d["limit"].get<double>() - 1.0) < 1e-3);
    auto ambiguous = run({"gaussian", "dimension", "--matrix", "[[1,0],[0,2e-8]]"});
    CHECK(ambiguous.err.find("warning") != std::string::npos);
    CHECK(run({"--quiet", "gaussian", "dimension", "--matrix", "[[1,0],[0,2e-8]]"}).err.empty());
    auto mom = json::parse(run({"--format", "json", "gaussian", "moments", "--matrix", "[[1,0.5],[0.5,1]]", "--pattern", "X1 Y1 X1 Y1"}).out);
    CHECK(mom["exact"] == "5/4");
    CHECK(mom["fock"].get<double>() == doctest::Approx(1.25));
    CHECK(run({"gaussian", "moments", "--matrix", "[[1]]", "--pattern", "X1 X1", "--depth", "1"}).code == cli::kExitValidation);
}

TEST_CASE("bipartite grids")
{
    TempDir dir;
    const auto grid = dir.file("mu.csv");
    REQUIRE(run({"bipartite", "make-semicircular", "--c", "0.5", "--points", "128", "--out", grid}).code == 0);
    auto from_file = json::parse(run({"--format", "json", "bipartite", "fisher", "--grid", grid}).out);
    auto direct = json::parse(run({"--format", "json", "bipartite", "fisher", "--c", "0.5", "--points", "128"}).out);
    CHECK(from_file["fisher"].get<double>() == doctest::Approx(direct["fisher"].get<double>()).epsilon(1e-10));
    CHECK(std::abs(direct["relative_error"].get<double>()) < 0.06);

    const auto doc = dir.file("mu.json");
    REQUIRE(run({"--format", "json", "bipartite", "make-semicircular", "--c", "0.5", "--points", "128", "--out", doc}).code == 0);
    std::ifstream in(doc);
    auto g = io::read_grid(in);
    CHECK(g.spec().nx == 128);
    CHECK(std::abs(g.mass() - 1.0) < 1e-9);

    auto field = run({"bipartite", "conjugate", "--c", "0", "--points", "16"});
    CHECK(field.code == 0);
    CHECK(field.out.rfind("x,y,f,xi_left,xi_right,masked\n", 0) == 0);
    CHECK(std::count(field.out.begin(), field.out.end(), '\n') == 1 + 16 * 16);

    const auto bad = dir.file("bad.csv");
    write(bad, "{\"xmin\":0,\"xmax\":1,\"ymin\":0,\"ymax\":1,\"nx\":3,\"ny\":3}\n1,2,3\n4,5\n");
    CHECK(run({"bipartite", "fisher", "--grid", bad}).code == cli::kExitValidation);
    CHECK(run({"bipartite", "fisher", "--c", "1.0"}).code == cli::kExitValidation);
    CHECK(run({"bipartite", "fisher"}).code == cli::kExitValidation);

    const auto lshape = dir.file("l.json");
    json l = {{"xmin", 0}, {"xmax", 1}, {"ymin", 0}, {"ymax", 1}, {"nx", 8}, {"ny", 8}};
    std::vector<std::vector<double>> rows(8, std::vector<double>(8, 1.0));
    for (int i = 4; i < 8; ++i)
        for (int j = 4; j < 8; ++j) rows[i][j] = 0.0;
    l["values"] = rows;
    write(lshape, l.dump());
    auto warned = run({"bipartite", "fisher", "--grid", lshape});
    CHECK(warned.code == 0);
    CHECK(warned.err.find("far from a product") != std::string::npos);
}

TEST_CASE("selftest")
{
    auto r = run({"selftest"});
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    for (const auto& item : cli::run_selftest()) CHECK_MESSAGE(item.pass, item.name << ": " << item.detail);
}

TEST_CASE("json value parsing")
{
    CHECK(io::rational_from_json(json::parse("0.1")) == Rational(1, 10));
    CHECK(io::rational_from_json(json("-3/4")) == Rational(-3, 4));
    CHECK(io::rational_from_json(json(7)) == 7);
    CHECK_THROWS_AS(io::rational_from_json(json::array()), ValidationError);
    CHECK(io::format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(io::double_to_json(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK_THROWS_AS(io::table_from_json(json::parse(R"({"n":1,"m":1,"moments":[{"word":"X2","value":"1"}]})")), ValidationError);
    CHECK_THROWS_AS(io::spec_from_json(json::parse(R"({"n":1,"m":1,"entries":[{"pattern":[["q",1]],"value":"1"}]})")), ValidationError);
}
