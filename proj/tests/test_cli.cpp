#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ivboot/cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "ivboot");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = ivboot::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const std::vector<std::string> kQuick{"--reps", "20", "--boot-reps", "100", "--grid", "0.8:0.2:1.2"};

std::vector<std::string> with_quick(std::vector<std::string> head) {
    head.insert(head.end(), kQuick.begin(), kQuick.end());
    return head;
}

} // namespace

TEST_CASE("help lists every flag", "[cli]") {
    for (const char* sub : {"simulate", "power", "test", "reproduce-table", "diagnose"}) {
        const auto r = invoke({sub, "--help"});
        CHECK(r.code == 0);
        for (const char* flag : {"--config", "--table", "--reps", "--boot-reps", "--alpha", "--seed", "--error",
                                 "--concentration", "--n", "--q", "--grid", "--out", "--format", "--threads"}) {
            CHECK(r.out.find(flag) != std::string::npos);
        }
        CHECK(r.out.find("default") != std::string::npos);
    }
    CHECK(invoke({"test", "--help"}).out.find("--beta0") != std::string::npos);
}

TEST_CASE("validation failures exit with 1", "[cli]") {
    CHECK(invoke({"power", "--config", "missing.json"}).code == 1);
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"power", "--bogus"}).code == 1);
    CHECK(invoke({"power", "simulate"}).code == 1);
    CHECK(invoke({"power", "--error", "cauchy"}).code == 1);
    CHECK(invoke({"power", "--format", "xml"}).code == 1);
    CHECK(invoke({"reproduce-table", "--reps", "10"}).code == 1);
    const auto r = invoke({"power", "--alpha", "2"});
    CHECK(r.code == 1);
    CHECK(r.err.find("alpha") != std::string::npos);
}

TEST_CASE("test subcommand reports all five tests", "[cli]") {
    const auto r = invoke({"test", "--beta0", "1.0", "--seed", "7", "--format", "json", "--boot-reps", "200"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const char* name : {"LR", "BLR", "CLR", "AR", "LM"}) {
        REQUIRE(j.contains(name));
        CHECK(j[name].contains("reject"));
    }
    const auto csv = invoke({"test", "--beta0", "1.0", "--seed", "7", "--boot-reps", "200"});
    CHECK(csv.out.rfind("test,statistic,critical_value,reject\n", 0) == 0);
}

TEST_CASE("outputs are byte-identical across thread counts", "[cli]") {
    const auto dir = std::filesystem::temp_directory_path() / "ivboot_cli_test";
    std::filesystem::create_directories(dir);
    for (const char* sub : {"power", "simulate", "diagnose"}) {
        std::vector<std::string> base{sub, "--seed", "5"};
        if (std::string(sub) == "diagnose") base.insert(base.end(), {"--reps", "2000"});
        else base = with_quick(base);
        auto one = base;
        one.insert(one.end(), {"--threads", "1", "--out", (dir / "a.txt").string()});
        auto many = base;
        many.insert(many.end(), {"--threads", "4", "--out", (dir / "b.txt").string()});
        REQUIRE(invoke(one).code == 0);
        REQUIRE(invoke(many).code == 0);
        const auto a = slurp(dir / "a.txt");
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(dir / "b.txt"));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("config file and flag precedence", "[cli]") {
    const auto path = std::filesystem::temp_directory_path() / "ivboot_cli_config.json";
    {
        std::ofstream f(path);
        f << R"({"n": 120, "q": 3, "reps": 15, "boot_reps": 100, "beta_grid": [0.9, 1.1]})";
    }
    const auto r = invoke({"power", "--config", path.string(), "--format", "json", "--q", "4"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["config"]["n"] == 120);
    CHECK(j["config"]["q"] == 4);
    CHECK(j["rows"].size() == 2);
    {
        std::ofstream f(path);
        f << R"({"n": 120, "unknown": 1})";
    }
    CHECK(invoke({"power", "--config", path.string()}).code == 1);
    {
        std::ofstream f(path);
        f << "{ not json";
    }
    CHECK(invoke({"power", "--config", path.string()}).code == 1);
    std::filesystem::remove(path);
}

TEST_CASE("power CSV layout", "[cli]") {
    const auto r = invoke(with_quick({"power", "--seed", "9"}));
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("offset,LR,BLR,CLR,AR,LM\n0.8,", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
}

TEST_CASE("reproduce-table emits a comparison report", "[cli]") {
    const auto dir = std::filesystem::temp_directory_path() / "ivboot_cli_repro";
    std::filesystem::create_directories(dir);
    const auto r = invoke({"reproduce-table", "--table", "1", "--reps", "20", "--boot-reps", "100", "--out",
                           (dir / "t.csv").string(), "--report", (dir / "r.json").string()});
    CHECK((r.code == 0 || r.code == 2));
    const auto rep = nlohmann::json::parse(slurp(dir / "r.json"));
    CHECK(rep["cells"].size() == 51);
    CHECK(rep["pass"].get<bool>() == (r.code == 0));
    CHECK(slurp(dir / "t.csv").rfind("offset,LR,BLR,CLR,AR,LM\n", 0) == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("diagnose subcommand", "[cli]") {
    const auto r = invoke({"diagnose", "--check", "deviation"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.contains("deviation"));
    CHECK_FALSE(j.contains("gar"));
    CHECK(invoke({"diagnose", "--check", "nothing"}).code == 1);
}
