#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string cli() { return SPOTDIFF_CLI_PATH; }

std::string tmp_path(const std::string& name) {
    return (fs::temp_directory_path() / ("spotdiff_cli_" + name)).string();
}

int run(const std::string& args, const std::string& stdin_file = "") {
    std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    if (!stdin_file.empty()) cmd += " < " + stdin_file;
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("generate is deterministic and creates missing directories") {
    const std::string out1 = tmp_path("gen1");
    const std::string out2 = tmp_path("gen2/nested");  // exercised directory creation
    fs::remove_all(out1);
    fs::remove_all(tmp_path("gen2"));
    CHECK(run("generate --pairs 10 --seed 11 --out " + out1) == 0);
    CHECK(run("generate --pairs 10 --seed 11 --out " + out2) == 0);
    CHECK(slurp(out1 + "/scenes.jsonl") == slurp(out2 + "/scenes.jsonl"));
    CHECK(slurp(out1 + "/dialogs.jsonl") == slurp(out2 + "/dialogs.jsonl"));
    CHECK(slurp(out1 + "/manifest.json") == slurp(out2 + "/manifest.json"));

    // at most two dialogs per pair
    std::istringstream dialogs(slurp(out1 + "/dialogs.jsonl"));
    std::string line;
    int n = 0;
    while (std::getline(dialogs, line))
        if (!line.empty()) ++n;
    CHECK(n <= 20);
    CHECK(n > 0);
}

TEST_CASE("invalid configuration exits with code 2") {
    const std::string cfg = tmp_path("bad_config.json");
    {
        std::ofstream out(cfg);
        out << R"({"pairs": 4, "split": [0.9, 0.3, 0.1]})";
    }
    CHECK(run("generate --config " + cfg + " --out " + tmp_path("never")) == 2);

    const std::string cfg2 = tmp_path("bad_config2.json");
    {
        std::ofstream out(cfg2);
        out << R"({"objects_min": 9, "objects_max": 3})";
    }
    CHECK(run("generate --config " + cfg2 + " --out " + tmp_path("never")) == 2);
    CHECK_FALSE(fs::exists(tmp_path("never")));
}

TEST_CASE("stats, eval and validate succeed on a generated dataset") {
    const std::string out = tmp_path("full");
    fs::remove_all(out);
    REQUIRE(run("generate --pairs 8 --seed 3 --out " + out) == 0);
    CHECK(run("stats --dataset " + out) == 0);
    CHECK(run("stats --json --dataset " + out) == 0);
    CHECK(run("eval --dataset " + out + " --seed 1") == 0);
    CHECK(run("eval --dataset " + out + " --seed 1 --epsilon 0.2") == 0);
    CHECK(run("validate --dataset " + out) == 0);
    CHECK(run("validate --pairs 5 --seed 21") == 0);
    CHECK(run("stats --dataset " + tmp_path("missing_dir")) == 1);
}

TEST_CASE("play runs a scripted session to completion") {
    const std::string script = tmp_path("play_script.txt");
    {
        std::ofstream out(script);
        // one count question, then guess the first object
        out << "1\n1\n0\n1\n";
    }
    CHECK(run("play --seed 7", script) == 0);
    // EOF mid-session aborts with a failure code
    const std::string empty = tmp_path("play_empty.txt");
    {
        std::ofstream out(empty);
    }
    CHECK(run("play --seed 7", empty) == 1);
}
