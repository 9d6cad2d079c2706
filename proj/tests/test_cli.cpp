#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef CUTVOL_CLI_PATH
#error "CUTVOL_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

RunResult run(const std::string& args, const std::string& out_file = "") {
    const std::string out = out_file.empty() ? "cli_stdout.tmp" : out_file;
    const std::string cmd = std::string(CUTVOL_CLI_PATH) + " " + args +
                            (out_file.empty() ? " > " + out : "") + " 2> cli_stderr.tmp";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read_file(out);
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

const char* kBallFile = "cli_ball.body";
const char* kTubeFile = "cli_tube.body";

struct Fixture {
    Fixture() {
        write_file(kBallFile, "body ball radius=1.0 center=0,0,0\n");
        write_file(kTubeFile, "body tube m=1 eps=0.3 psi=quadratic diag=1\n");
    }
};
Fixture fixture;

}  // namespace

TEST_CASE("volume: schema, determinism, trailing newline, digit round-trip") {
    const std::string args = std::string("volume --body ") + kBallFile +
                             " --plane '1,0,0;-0.5' --samples 200000 --seed 0";
    const RunResult a = run(args + " --out cli_a.csv", "cli_a.csv");
    CHECK(a.exit_code == 0);
    const auto rows = lines_of(a.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "quantity,value,std_error,samples,seed,generator");
    CHECK(rows[1].substr(0, 6) == "Vplus,");
    CHECK(rows[2].substr(0, 7) == "Vminus,");
    CHECK(a.out.back() == '\n');
    // byte-identical on a second run
    const RunResult b = run(args + " --out cli_b.csv", "cli_b.csv");
    CHECK(a.out == b.out);
    // serial kernel gives the same bytes
    const RunResult s = run(args + " --serial --out cli_s.csv", "cli_s.csv");
    CHECK(a.out == s.out);
    // 17 significant digits round-trip through parsing
    std::stringstream ss(rows[1].substr(6));
    std::string value_str;
    std::getline(ss, value_str, ',');
    const double parsed = std::strtod(value_str.c_str(), nullptr);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", parsed);
    CHECK(value_str == buf);
    std::remove("cli_a.csv");
    std::remove("cli_b.csv");
    std::remove("cli_s.csv");
}

TEST_CASE("cap matches the hemisphere value") {
    const RunResult r = run("cap --dim 3 --radius 1 --t 0");
    CHECK(r.exit_code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "N,R,t,volume");
    const double v = std::strtod(rows[1].substr(rows[1].rfind(',') + 1).c_str(), nullptr);
    CHECK(v == doctest::Approx(2.0943951023931953).epsilon(1e-12));
}

TEST_CASE("exit codes: parse errors 1, domain errors 2") {
    write_file("cli_bad.body", "body cube side=1\n");
    CHECK(run(std::string("volume --body cli_bad.body --plane '1,0,0;0'")).exit_code == 1);
    write_file("cli_bad.body", "body tube m=1 eps=1.5 psi=quadratic diag=1\n");
    CHECK(run(std::string("volume --body cli_bad.body --plane '1,0,0,0;0'")).exit_code == 1);
    CHECK(run(std::string("volume --body does_not_exist.body --plane '1,0,0;0'")).exit_code == 1);
    // degenerate plane: domain error
    CHECK(run(std::string("volume --body ") + kBallFile + " --plane '0,0,0;1' --samples 10")
              .exit_code == 2);
    // tangent base plane for the probe: domain error
    CHECK(run(std::string("probe --body ") + kBallFile +
              " --plane '1,0,0;-1' --radius 0.01 --count 20 --degree-max 1")
              .exit_code == 2);
    std::remove("cli_bad.body");
}

TEST_CASE("tube-verify reports beta independence and close z-scores") {
    const RunResult r = run(std::string("tube-verify --body ") + kTubeFile +
                            " --gamma 0.1 --alpha 1,0,0 --beta 0.05 --samples 400000");
    CHECK(r.exit_code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].substr(0, 12) == "gamma,valid,");
    CHECK(rows[1].find(",PASS") != std::string::npos);
    CHECK(rows[1].find("true") != std::string::npos);  // inside the validity domain
    // z-scores live in the two columns before the PASS flag
    std::vector<std::string> cells;
    std::stringstream ss(rows[1]);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 11);
    CHECK(std::fabs(std::strtod(cells[8].c_str(), nullptr)) < 3.0);
    CHECK(std::fabs(std::strtod(cells[9].c_str(), nullptr)) < 3.0);
}

TEST_CASE("section reports the slab estimate and the tube closed form") {
    const RunResult r = run(std::string("section --body ") + kTubeFile +
                            " --plane '1,0,0,0;-0.1' --samples 400000");
    CHECK(r.exit_code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "method,value,std_error");
    CHECK(rows[1].substr(0, 5) == "slab,");
    CHECK(rows[2].substr(0, 12) == "closed_form,");
    const double slab = std::strtod(rows[1].substr(5).c_str(), nullptr);
    const double closed = std::strtod(rows[2].substr(12).c_str(), nullptr);
    CHECK(std::fabs(slab - closed) / closed < 0.2);  // coarse agreement at low n
}

TEST_CASE("tangency CSV schema") {
    const RunResult r =
        run(std::string("tangency --body ") + kBallFile + " --direction 0,0,1 --starts 16");
    CHECK(r.exit_code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 3);  // header + two support planes
    CHECK(rows[0] ==
          "dir_1,dir_2,dir_3,offset,u_1,u_2,u_3,index_plus,index_minus,verdict_plus,"
          "verdict_minus,morse_margin");
    CHECK(rows[1].find(",true") != std::string::npos);
}

TEST_CASE("scan emits the verdict") {
    const RunResult r =
        run(std::string("scan --body ") + kBallFile + " --directions 5 --starts 16");
    CHECK(r.exit_code == 0);
    const auto rows = lines_of(r.out);
    CHECK(rows[0] == "key,value");
    CHECK(rows.back() == "verdict,no obstruction found by this scan");
}

TEST_CASE("probe emits per-degree rows") {
    const RunResult r = run(std::string("probe --body ") + kBallFile +
                            " --plane '1,0,0;-0.5' --radius 0.05 --count 150 --degree-max 3");
    CHECK(r.exit_code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "degree,columns,sigma_ratio,verdict");
    CHECK(rows[3].find("relation-found") != std::string::npos);
}

TEST_CASE("sweep: exact pencil for the ball, Monte Carlo when forced") {
    const RunResult exact = run(std::string("sweep --body ") + kBallFile +
                                " --plane '1,0,0;0' --lambda-min -0.5 --lambda-max 0.5 "
                                "--steps 5");
    CHECK(exact.exit_code == 0);
    const auto rows = lines_of(exact.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == "lambda,Vplus,Vminus,stderr");
    // exact oracle: stderr column is zero and Vplus decreases along the pencil
    double prev = 1e99;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<std::string> cells;
        std::stringstream ss(rows[i]);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 4);
        CHECK(std::strtod(cells[3].c_str(), nullptr) == 0.0);
        const double vplus = std::strtod(cells[1].c_str(), nullptr);
        CHECK(vplus < prev);
        prev = vplus;
    }
    const RunResult mc = run(std::string("sweep --body ") + kBallFile +
                             " --plane '1,0,0;0' --lambda-min 0 --lambda-max 0.2 --steps 2 "
                             "--samples 100000 --mc");
    const auto mc_rows = lines_of(mc.out);
    REQUIRE(mc_rows.size() == 3);
    CHECK(mc_rows[1].rfind(",0") != mc_rows[1].size() - 2);  // stderr nonzero
}

TEST_CASE("sweep falls back to Monte Carlo outside the tube validity domain") {
    // a steep pencil: the closed form is invalid, so stderr must be nonzero
    const RunResult r = run(std::string("sweep --body ") + kTubeFile +
                            " --plane '0.05,0,0,1;0' --lambda-min 0 --lambda-max 0.05 "
                            "--steps 2 --samples 50000");
    CHECK(r.exit_code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 3);
    const std::string err = rows[1].substr(rows[1].rfind(',') + 1);
    CHECK(std::strtod(err.c_str(), nullptr) > 0.0);
}

TEST_CASE("probe refuses Monte Carlo noise below the tolerance floor") {
    write_file("cli_mc_disk.body",
               "body implicit dim=2 poly=1,2,0;1,0,2;-1,0,0 box=-1.2,-1.2;1.2,1.2\n");
    const RunResult r = run("probe --body cli_mc_disk.body --plane '1,0;-0.4' "
                            "--radius 0.03 --count 30 --degree-max 1 --rank-tol 1e-9 "
                            "--mc-samples 65536");
    CHECK(r.exit_code == 2);
    std::remove("cli_mc_disk.body");
}

TEST_CASE("--help documents the sign convention for every command") {
    for (const char* sub : {"volume", "section", "cap", "tube-verify", "tangency", "scan",
                            "probe", "sweep"}) {
        const RunResult r = run(std::string(sub) + " --help");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("gamma = -b") != std::string::npos);
        CHECK(r.out.find("1 - eps") != std::string::npos);  // tube validity check
    }
}
