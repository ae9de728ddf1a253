#include "pucci/app/cli.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pucci;
using namespace pucci::app;

namespace {

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "pucci_lab_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = temp_path(name);
    std::ofstream(path) << text;
    return path;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "pucci_lab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_command(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

RunRecord record_with_p(double p) {
    RunRecord r;
    r.config = {{"command", "classify"}, {"p", p}};
    r.results = {{"kind", "Crossing"}, {"R", 1.0 / p}};
    return r;
}

}  // namespace

TEST_CASE("config files: minimal constants run is valid") {
    const auto c = load_config(write_temp("min.json", R"({"command": "constants", "lambda": 1, "Lambda": 2, "n": 5})"));
    CHECK(c.command == Command::Constants);
    CHECK(c.Lambda == 2.0);
    CHECK(c.n == 5);
}

TEST_CASE("config files: field-named rejections") {
    const auto expect_field = [](const std::string& text, const std::string& field) {
        try {
            load_config(write_temp("bad.json", text));
            FAIL("accepted: " << text);
        } catch (const UsageError& e) {
            CHECK(e.field() == field);
        }
    };
    expect_field(R"({"command": "shoot", "p": 0.5})", "p");
    expect_field(R"({"command": "shoot", "pair": "exp-one", "g": "1", "f": "1"})", "pair");
    expect_field(R"({"command": "constants", "Lambda": 0.5})", "Lambda");
    expect_field(R"({"command": "constants", "colour": 1})", "colour");
    expect_field(R"({"command": "fly"})", "command");
}

TEST_CASE("config files: malformed JSON is a usage error") {
    const auto path = write_temp("broken.json", R"({"command": "constants",)");
    CHECK_THROWS_AS(load_config(path), UsageError);
    const auto r = run({"run", path});
    CHECK(r.code == 2);
}

TEST_CASE("table export: header, rows, ordering") {
    SECTION("one record gives one header and one row") {
        const auto path = temp_path("one.csv");
        export_table({record_with_p(3.0)}, path, "csv");
        std::ifstream is(path);
        const std::string text((std::istreambuf_iterator<char>(is)), {});
        CHECK(line_count(text) == 2);
        CHECK(text.rfind("config.command,config.p,results.kind,results.R\n", 0) == 0);
    }
    SECTION("empty list writes the header only") {
        CHECK(render_table({}, "csv") == "config.command\n");
    }
    SECTION("rows follow the swept parameter") {
        const auto text = render_table({record_with_p(5.0), record_with_p(2.0), record_with_p(3.5)}, "csv");
        std::istringstream is(text);
        std::string line;
        std::getline(is, line);
        std::vector<std::string> ps;
        while (std::getline(is, line)) ps.push_back(line.substr(line.find(',') + 1, 3));
        CHECK(ps == std::vector<std::string>{"2,C", "3.5", "5,C"});
    }
    SECTION("records of different shapes are refused") {
        RunRecord other = record_with_p(1.5);
        other.results["extra"] = 1;
        CHECK_THROWS_AS(render_table({record_with_p(2.0), other}, "csv"), InvalidInput);
    }
    SECTION("doubles survive a text roundtrip") {
        const double v = 0.1 + 0.2;
        CHECK(std::stod(format_real(v)) == v);
    }
}

TEST_CASE("command line: exit codes and outputs") {
    SECTION("constants") {
        const auto r = run({"constants", "--lambda", "1", "--Lambda", "2", "--n", "5"});
        REQUIRE(r.code == 0);
        const auto j = json::parse(r.out);
        CHECK(j["results"]["p_s_plus"].get<double>() == Catch::Approx(3.0).epsilon(1e-14));
        CHECK(j["results"]["p_p_plus"].get<double>() == Catch::Approx(5.0).epsilon(1e-14));
    }
    SECTION("sublinear exponent is a usage error") {
        const auto r = run({"shoot", "--p", "0.5"});
        CHECK(r.code == 2);
        CHECK(r.err.find("p") != std::string::npos);
    }
    SECTION("unknown option and unknown pair") {
        CHECK(run({"shoot", "--q", "3"}).code == 2);
        CHECK(run({"shoot", "--pair", "nope"}).code == 2);
        CHECK(run({}).code == 2);
    }
    SECTION("refused input exits 2, numerical failure exits 1") {
        // n = 2, lambda = Lambda: N_plus = 2 and the M+ search is refused
        CHECK(run({"critical", "--n", "2"}).code == 2);
        // h = v on B_{1/2}: no amplitude brackets the radius
        const auto r = run({"ball", "--g", "0", "--f", "t", "--R", "0.5", "--n", "3"});
        CHECK(r.code == 1);
    }
    SECTION("verify") {
        const auto r = run({"verify", "--suite", "lemma21", "--seed", "7"});
        CHECK(r.code == 0);
        CHECK(json::parse(r.out)["results"]["passed"].get<bool>());
    }
    SECTION("version") {
        const auto r = run({"--version"});
        CHECK(r.code == 0);
        CHECK(r.out == "pucci_lab 1.0.0 (interface 1)\n");
    }
}

TEST_CASE("command line: output directory") {
    const auto dir = temp_path("out_ball");
    std::filesystem::remove_all(dir);
    const auto r = run({"--out", dir, "ball", "--g", "0", "--f", "t+t^2", "--R", "2", "--n", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto j = json::parse(std::ifstream(dir + "/ball.json"));
    CHECK(j["results"]["rho"].get<double>() == Catch::Approx(2.0).epsilon(1e-9));
    std::ifstream profile(dir + "/ball_profile.csv");
    std::string header;
    std::getline(profile, header);
    CHECK(header == "r,v,u");
}

TEST_CASE("command line: run config and flags agree") {
    const auto path = write_temp("shoot.json", R"({"command": "shoot", "p": 3, "n": 3, "rmax": 100})");
    auto a = json::parse(run({"run", path}).out);
    auto b = json::parse(run({"shoot", "--p", "3", "--n", "3", "--rmax", "100"}).out);
    CHECK(a["config"] == b["config"]);
    CHECK(a["results"] == b["results"]);
}

TEST_CASE("command line: sweeps are independent of the worker count") {
    const std::vector<std::string> base{"--format", "csv", "classify", "--p-grid", "2:6:9", "--n", "3", "--rmax", "1e5"};
    auto one = base;
    one.insert(one.begin(), {"--jobs", "1"});
    auto four = base;
    four.insert(four.begin(), {"--jobs", "4"});
    const auto r1 = run(one);
    const auto r4 = run(four);
    REQUIRE(r1.code == 0);
    CHECK(r1.out == r4.out);
    CHECK(line_count(r1.out) == 10);
}

TEST_CASE("command line: ball records the hypothesis check") {
    const auto r = run({"ball", "--g", "0", "--f", "t^2", "--R", "1", "--p", "2", "--pstar", "5"});
    REQUIRE(r.code == 0);
    const auto h = json::parse(r.out)["results"]["hypotheses"];
    CHECK(h["p_star_source"] == "supplied");
    CHECK(h["c_star"].get<double>() == 0.0);
    CHECK(h["plausible"].get<bool>());
    CHECK(run({"ball", "--g", "0", "--f", "t^2", "--R", "1", "--pstar", "0.5"}).code == 2);
}
