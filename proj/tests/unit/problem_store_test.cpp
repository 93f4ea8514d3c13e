#include <filesystem>

#include <gtest/gtest.h>

#include "cpsync/errors.hpp"
#include "cpsync/problem_store.hpp"
#include "environment.hpp"
#include "nqueens.hpp"

using namespace cpsync;
namespace fs = std::filesystem;

TEST(ProblemStore, SaveLoadRoundTrip) {
    const auto dir = cptest::scratch_dir("bundle");
    const ProblemBundle b = cptest::nqueens_bundle(5);
    save_bundle(b, (dir / "b").string());
    EXPECT_EQ(load_bundle((dir / "b").string()), b);
    const ProblemBundle cop = cptest::toy_cop_bundle();
    save_bundle(cop, (dir / "c").string());
    EXPECT_EQ(load_bundle((dir / "c").string()), cop);
}

TEST(ProblemStore, CommittedBundlesLoad) {
    const auto b = load_bundle((cptest::fixture_dir() / "problems" / "nqueens4").string());
    EXPECT_EQ(b.id, "nqueens4");
    ASSERT_TRUE(b.eval_assets);
    EXPECT_EQ(b.eval_assets->mapped_vars, std::vector<std::string>{"q"});
    EXPECT_EQ(b.input_data.builtin_params["n"], 4);
}

TEST(ProblemStore, MissingDescriptionNamed) {
    const auto dir = cptest::scratch_dir("missing");
    save_bundle(cptest::nqueens_bundle(4), dir.string());
    fs::remove(dir / "description.md");
    try {
        load_bundle(dir.string());
        FAIL();
    } catch (const MissingField& e) {
        EXPECT_EQ(std::string(e.what()), "description");
    }
}

TEST(ProblemStore, DataMismatchNamesKey) {
    ProblemBundle b = cptest::nqueens_bundle(4);
    b.input_data.builtin_params["n"] = 5;
    try {
        validate_bundle(b);
        FAIL();
    } catch (const DataMismatch& e) {
        EXPECT_EQ(std::string(e.what()), "n");
    }
}

TEST(ProblemStore, DeclaredParameterMissingFromParams) {
    ProblemBundle b = cptest::nqueens_bundle(4);
    b.input_data.builtin_params = Json::object();
    EXPECT_THROW(validate_bundle(b), MissingField);
}

TEST(ProblemStore, CopNeedsSense) {
    ProblemBundle b = cptest::toy_cop_bundle();
    b.eval_assets->objective_sense.reset();
    EXPECT_THROW(validate_bundle(b), MissingField);
}

TEST(ProblemStore, DeclaredParameters) {
    const std::string spec = "\"n\": board size\n- `m`: rows\n(3) \"cap\": capacity\nplain text: ignored\n\"n\": again\n";
    EXPECT_EQ(declared_parameters(spec), (std::vector<std::string>{"n", "m", "cap"}));
}

TEST(ProblemStore, OutputSpecJsonRoundTrip) {
    OutputSpec spec;
    spec["route"] = {"Visit order", {"?"}, ElementKind::Int};
    spec["grid"] = {"Cells", {"n", "n*2"}, ElementKind::Bool};
    EXPECT_EQ(output_spec_from_json(output_spec_to_json(spec)), spec);
}

TEST(ProblemStore, DescribeOutputSpec) {
    OutputSpec spec;
    spec["queens"] = {"Row per column", {"n"}, ElementKind::Int};
    EXPECT_EQ(describe_output_spec(spec), "(1) `queens`: \"Row per column\", \"size\": \"[n]\", \"type\": \"int\"\n");
}
