#include <gtest/gtest.h>

#include <sstream>

#include "cpsync/commands.hpp"
#include "cpsync/errors.hpp"
#include "environment.hpp"

using namespace cpsync;
namespace fs = std::filesystem;

namespace {

fs::path write_manifest(const std::string& name, const Json& manifest) {
    const fs::path dir = cptest::scratch_dir(name);
    fs::create_directories(dir / "fx");
    write_text_file((dir / "manifest.json").string(), manifest.dump());
    return dir / "manifest.json";
}

}  // namespace

TEST(Manifest, ResolvesRelativePaths) {
    const auto path = write_manifest(
        "manifest-ok", {{"problems", {"p/one", "/abs/two"}}, {"fixtures", "fx"}, {"config", {{"K", 5}, {"seed", 9}}}});
    const RunManifest m = load_manifest(path.string());
    const fs::path base = path.parent_path();
    EXPECT_EQ(m.problems, (std::vector<std::string>{(base / "p/one").string(), "/abs/two"}));
    EXPECT_EQ(m.fixtures, (base / "fx").string());
    EXPECT_EQ(m.output_dir, (base / "runs").string());
    EXPECT_EQ(m.provider, "replay");
    EXPECT_EQ(m.config.K, 5);
    EXPECT_EQ(m.config.seed, 9u);
}

TEST(Manifest, Errors) {
    EXPECT_THROW(load_manifest(write_manifest("manifest-empty", {{"problems", Json::array()}}).string()), ConfigError);
    EXPECT_THROW(load_manifest(write_manifest("manifest-fx", {{"problems", {"a"}}, {"fixtures", "missing"}}).string()),
                 ConfigError);
    EXPECT_THROW(load_manifest(write_manifest("manifest-key", {{"problems", {"a"}}, {"fixtures", "fx"}, {"config", {{"Q", 1}}}})
                                   .string()),
                 ConfigError);
    const fs::path dir = cptest::scratch_dir("manifest-bad-json");
    write_text_file((dir / "m.json").string(), "{not json");
    EXPECT_THROW(load_manifest((dir / "m.json").string()), ConfigError);
}

TEST(Commands, SolveReportsConfigErrors) {
    CommandOptions o;
    o.provider = "replay";
    o.fixtures = "/nonexistent/fixtures";
    std::ostringstream out;
    std::ostringstream err;
    EXPECT_EQ(cmd_solve((cptest::fixture_dir() / "problems" / "nqueens4").string(), o, out, err), 1);
    EXPECT_NE(err.str().find("ConfigError"), std::string::npos) << err.str();

    o.provider = "telepathy";
    err.str("");
    EXPECT_EQ(cmd_solve((cptest::fixture_dir() / "problems" / "nqueens4").string(), o, out, err), 1);
    EXPECT_NE(err.str().find("unknown provider mode"), std::string::npos) << err.str();
}

TEST(Commands, AblateRejectsUnknownConfig) {
    const auto path = write_manifest("ablate-bad", {{"problems", {"a"}}, {"fixtures", "fx"}});
    std::ostringstream out;
    std::ostringstream err;
    EXPECT_EQ(cmd_ablate(path.string(), "7", {}, out, err), 1);
    EXPECT_NE(err.str().find("unknown ablation config"), std::string::npos) << err.str();
}

TEST(Commands, DefaultMiniZincFromEnvironment) {
    ::setenv("CPSYNC_MINIZINC", "service:node mz.cjs", 1);
    EXPECT_EQ(default_minizinc_command(), "service:node mz.cjs");
    ::unsetenv("CPSYNC_MINIZINC");
    EXPECT_EQ(default_minizinc_command(), "minizinc");
}
