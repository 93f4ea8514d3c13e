#include <gtest/gtest.h>

#include <algorithm>

#include "cpsync/minizinc.hpp"
#include "criteria.hpp"
#include "environment.hpp"
#include "nqueens.hpp"

using namespace cpsync;
namespace nq = cptest::nq;

namespace {

SolveOutcome solve(const std::string& model, const std::string& dzn) {
    return cptest::shared_toolchain().solve(mzn::strip_output_items(model), dzn, {"gecode", 30});
}

}  // namespace

TEST(MiniZinc, CompileErrorReportsLocation) {
    CPSYNC_REQUIRE_MINIZINC();
    const auto bad = cptest::shared_toolchain().compile_check(nq::kModelSyntaxError);
    EXPECT_FALSE(bad.ok);
    EXPECT_NE(bad.message.find("syntax error"), std::string::npos);
    EXPECT_TRUE(cptest::shared_toolchain().compile_check(nq::kModelForall).ok);
}

TEST(MiniZinc, FourQueensSolutionIsInBruteForceSet) {
    CPSYNC_REQUIRE_MINIZINC();
    const auto out = solve(nq::kModelForall, "n = 4;\n");
    ASSERT_EQ(out.status, SolveStatus::Satisfied) << out.message;
    const auto q = out.assignment.at("q").get<std::vector<int>>();
    const auto brute = cptest::brute_force_solutions(4);
    EXPECT_NE(std::find(brute.begin(), brute.end(), q), brute.end());
}

TEST(MiniZinc, ThreeQueensIsUnsatisfiable) {
    CPSYNC_REQUIRE_MINIZINC();
    EXPECT_TRUE(cptest::brute_force_solutions(3).empty());
    EXPECT_EQ(solve(nq::kModelForall, "n = 3;\n").status, SolveStatus::Unsatisfiable);
}

TEST(MiniZinc, OutputItemsAreStrippedBeforeSolving) {
    CPSYNC_REQUIRE_MINIZINC();
    const auto out = solve(nq::kModelGlobalsWithOutput, "n = 4;\n");
    ASSERT_EQ(out.status, SolveStatus::Satisfied) << out.message;
    EXPECT_TRUE(out.assignment.contains("q"));
}

TEST(MiniZinc, SolverEnumerationMatchesBruteForce) {
    CPSYNC_REQUIRE_MINIZINC();
    for (int n : {4, 5, 6}) {
        EXPECT_EQ(cptest::solver_solutions(cptest::shared_toolchain(), n), cptest::brute_force_solutions(n)) << n;
    }
}

TEST(MiniZinc, OptimizationReportsObjective) {
    CPSYNC_REQUIRE_MINIZINC();
    const auto out = solve("var 1..5: x;\nvar 1..5: y;\nconstraint x + y >= 7;\nsolve minimize 2 * x + y;\n", "");
    ASSERT_EQ(out.status, SolveStatus::Optimal) << out.message;
    ASSERT_TRUE(out.objective);
    EXPECT_EQ(*out.objective, 9);
    EXPECT_EQ(out.assignment, Json::parse(R"({"x": 2, "y": 5})"));
}

TEST(MiniZinc, SetsAreSortedArrays) {
    CPSYNC_REQUIRE_MINIZINC();
    const auto out = solve("var set of 1..5: s;\nconstraint card(s) = 3 /\\ 1 in s /\\ 5 in s /\\ not (2 in s);\n"
                           "constraint 4 in s;\nsolve satisfy;\n",
                           "");
    ASSERT_EQ(out.status, SolveStatus::Satisfied) << out.message;
    EXPECT_EQ(out.assignment.at("s"), Json::parse("[1, 4, 5]"));
}

TEST(MiniZinc, RuntimeErrorIsError) {
    CPSYNC_REQUIRE_MINIZINC();
    const auto out = solve("int: n;\narray[1..n] of int: w;\nvar 1..n: x;\nsolve satisfy;\n", "n = 3;\nw = [1, 2];\n");
    EXPECT_EQ(out.status, SolveStatus::Error);
    EXPECT_FALSE(out.message.empty());
}

TEST(MiniZinc, OutputInterfaceDescribesArrays) {
    CPSYNC_REQUIRE_MINIZINC();
    const Json iface = cptest::shared_toolchain().output_interface(nq::kModelForall, "n = 4;\n");
    ASSERT_TRUE(iface.contains("q")) << iface.dump();
    EXPECT_EQ(iface["q"].value("dim", 0), 1);
}
