#pragma once

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>

#include <unistd.h>

#include "cpsync/minizinc.hpp"

namespace cptest {

/// Source tree root (for committed fixtures).
inline std::filesystem::path source_dir() { return CPSYNC_SOURCE_DIR; }
inline std::filesystem::path fixture_dir() { return source_dir() / "tests" / "fixtures"; }

/// MiniZinc command used by tests: $CPSYNC_MINIZINC, else the one found at
/// configure time. Empty when none was found.
inline std::string minizinc_spec() {
    if (const char* env = std::getenv("CPSYNC_MINIZINC"); env && *env) return env;
    return CPSYNC_TEST_MINIZINC;
}

/// Skips the current gtest when no MiniZinc is configured.
#define CPSYNC_REQUIRE_MINIZINC() \
    if (cptest::minizinc_spec().empty()) GTEST_SKIP() << "no MiniZinc configured (set CPSYNC_MINIZINC)"

/// One shared toolchain per test process, so the server starts once.
inline cpsync::Toolchain& shared_toolchain() {
    static std::unique_ptr<cpsync::Toolchain> toolchain = cpsync::make_toolchain(minizinc_spec());
    return *toolchain;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("cpsync-test-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace cptest
