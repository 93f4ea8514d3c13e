#include <gtest/gtest.h>

#include "cpsync/checking_pipeline.hpp"
#include "fake_toolchain.hpp"
#include "nqueens.hpp"

using namespace cpsync;
namespace nq = cptest::nq;

namespace {

struct Fixture {
    Fixture() : bundle(cptest::nqueens_bundle(4)), pipeline(toolchain, sandbox, bundle, {}) {
        cptest::register_nqueens(sandbox);
    }

    CheckerProgram checker(int index, const std::string& source) {
        CheckerProgram c;
        c.agent_index = index;
        c.source = source;
        return c;
    }

    cptest::FakeToolchain toolchain;
    cptest::NativeSandbox sandbox;
    ProblemBundle bundle;
    CheckingPipeline pipeline;
};

std::string code(const std::string& body) { return "```\n" + body + "```"; }

std::vector<Gate> gates_of(const CandidateModel& c) {
    std::vector<Gate> out;
    for (const auto& g : c.gate_history) out.push_back(g.gate);
    return out;
}

}  // namespace

TEST(Gates, G1CompileFailureCarriesMessage) {
    Fixture f;
    const auto g = f.pipeline.g1_syntax("% FAIL_G1\n");
    EXPECT_FALSE(g.passed());
    EXPECT_NE(g.feedback.find("syntax error"), std::string::npos);
    EXPECT_TRUE(f.pipeline.g1_syntax("ok").passed());
}

TEST(Gates, G2StatusesAndFeedback) {
    Fixture f;
    const auto unsat = f.pipeline.g2_solve("% FAIL_G2_UNSAT\n");
    EXPECT_EQ(unsat.failure_kind, "UNSATISFIABLE");
    EXPECT_EQ(unsat.feedback, "UNSATISFIABLE");
    const auto error = f.pipeline.g2_solve("% FAIL_G2_ERROR\n");
    EXPECT_EQ(error.failure_kind, "ERROR");
    EXPECT_NE(error.feedback.find("Index set mismatch"), std::string::npos);
    EXPECT_EQ(f.pipeline.g2_solve("% FAIL_G2_TIMEOUT\n").failure_kind, "TIMEOUT");
    const auto ok = f.pipeline.g2_solve("ok");
    ASSERT_TRUE(ok.passed());
    EXPECT_EQ(*ok.artifacts, Json::parse(R"({"q": [2, 4, 1, 3]})"));
}

TEST(Gates, G2StripsOutputItems) {
    struct Spy : cptest::FakeToolchain {
        std::string seen;
        SolveOutcome solve(const std::string& src, const std::string& dzn, const SolveOptions& o) override {
            seen = src;
            return FakeToolchain::solve(src, dzn, o);
        }
    } spy;
    cptest::NativeSandbox sandbox;
    const auto bundle = cptest::nqueens_bundle(4);
    CheckingPipeline pipeline(spy, sandbox, bundle, {});
    pipeline.g2_solve(nq::kModelGlobalsWithOutput);
    EXPECT_EQ(spy.seen.find("output ["), std::string::npos);
}

TEST(Gates, G3ValidatesFormatterOutput) {
    Fixture f;
    const Json assignment = {{"q", {2, 4, 1, 3}}};
    const auto good = f.pipeline.g3_format({nq::kFormatter, {}}, assignment);
    ASSERT_TRUE(good.passed());
    EXPECT_EQ(*good.artifacts, Json::parse(R"({"queens": [2, 4, 1, 3]})"));
    const auto wrong = f.pipeline.g3_format({nq::kFormatterWrongKey, {}}, assignment);
    EXPECT_EQ(wrong.feedback, "missing key: queens; unexpected key: board");
    const auto crash = f.pipeline.g3_format({nq::kFormatterDivZero, {}}, assignment);
    EXPECT_FALSE(crash.passed());
    EXPECT_NE(crash.feedback.find("ZeroDivisionError"), std::string::npos);
    EXPECT_NE(crash.feedback.find("Traceback"), std::string::npos);
}

TEST(Gates, G4MajorityWithErrorsAsNonPass) {
    Fixture f;
    const std::vector<CheckerProgram> checkers = {f.checker(1, nq::kChecker), f.checker(2, nq::kCheckerSets),
                                                  f.checker(3, nq::kCheckerBroken)};
    std::vector<CheckerVerdict> verdicts;
    EXPECT_TRUE(f.pipeline.g4_semantic(checkers, {{"queens", {2, 4, 1, 3}}}, &verdicts).passed());
    EXPECT_EQ(verdicts[2].verdict, VerdictKind::Error);

    const auto bad = f.pipeline.g4_semantic(checkers, {{"queens", {1, 2, 3, 4}}}, &verdicts);
    EXPECT_FALSE(bad.passed());
    EXPECT_NE(bad.feedback.find("checker 1 (fail): Diagonal conflict"), std::string::npos);
    EXPECT_NE(bad.feedback.find("checker 3 (error): KeyError"), std::string::npos);

    const std::vector<CheckerProgram> split = {f.checker(1, nq::kChecker), f.checker(2, nq::kCheckerBroken)};
    EXPECT_FALSE(f.pipeline.g4_semantic(split, {{"queens", {2, 4, 1, 3}}}).passed());
}

TEST(Gates, DefectiveCheckerYieldsErrorWithoutSandbox) {
    Fixture f;
    CheckerProgram broken;
    broken.agent_index = 2;
    broken.health = CheckerHealth::Defective;
    broken.defect = "NoCodeBlock";
    const auto v = f.pipeline.run_checker(broken, {{"queens", {2, 4, 1, 3}}});
    EXPECT_EQ(v.verdict, VerdictKind::Error);
    EXPECT_EQ(f.sandbox.calls(), 0);
}

namespace {

/// Modeling replies come from `models` in order; formatter replies are kFormatter;
/// feedback decisions accept with `revised` while any remain.
struct ScriptedCascade {
    ScriptedCascade(std::vector<std::string> models, std::vector<std::string> revisions, int r)
        : gateway(std::make_unique<ScriptedProvider>([this](const ChatRequest& req, int) { return reply(req); })),
          prompts(PromptLibrary::builtin()),
          agents(gateway, prompts, counters),
          models_(std::move(models)),
          revisions_(std::move(revisions)),
          r_(r) {}

    std::string reply(const ChatRequest& req) {
        if (req.tag.rfind("modeling/formatter", 0) == 0) return code(nq::kFormatter);
        if (req.messages.back().content.rfind("The code you generated was evaluated", 0) == 0) {
            if (next_revision_ < revisions_.size()) {
                return Json({{"reason", "fix"}, {"decision", "accept"}, {"revised_code", revisions_[next_revision_++]}})
                    .dump();
            }
            return R"({"reason": "checker is wrong", "decision": "reject"})";
        }
        return code(models_.at(next_model_++));
    }

    CandidateModel run(Fixture& f, const std::vector<CheckerProgram>& checkers) {
        CheckingPipeline pipeline(f.toolchain, f.sandbox, f.bundle, {r_, "gecode", 30, true});
        CandidateModel c = agents.generate_model({{VariantKind::Original, "d", false}, 0.0}, f.bundle, 1, r_);
        result = pipeline.run_cascade(c, checkers, agents);
        return c;
    }

    LlmGateway gateway;
    PromptLibrary prompts;
    CallCounters counters;
    Agents agents;
    CascadeResult result;

  private:
    std::vector<std::string> models_;
    std::vector<std::string> revisions_;
    std::size_t next_model_ = 0;
    std::size_t next_revision_ = 0;
    int r_;
};

}  // namespace

TEST(Cascade, AcceptedFeedbackReentersAtG1) {
    Fixture f;
    const std::vector<CheckerProgram> checkers = {f.checker(1, nq::kChecker)};
    ScriptedCascade s({"% assignment: {\"q\": [1, 2, 3, 4]}\n"}, {"% fixed\n"}, 4);
    const auto c = s.run(f, checkers);
    EXPECT_EQ(gates_of(c), (std::vector<Gate>{Gate::G1, Gate::G2, Gate::G3, Gate::G4, Gate::G1, Gate::G2, Gate::G3, Gate::G4}));
    EXPECT_EQ(c.gate_history[4].revision, 1);
    ASSERT_TRUE(s.result.survivor);
    EXPECT_EQ(s.result.survivor->revision, 1);
    EXPECT_EQ(s.result.survivor->note, "G4: pass");
}

TEST(Cascade, RejectedFeedbackKeepsSurvivor) {
    Fixture f;
    ScriptedCascade s({"% assignment: {\"q\": [1, 2, 3, 4]}\n"}, {}, 4);
    const auto c = s.run(f, {f.checker(1, nq::kChecker)});
    EXPECT_TRUE(c.alive);
    ASSERT_TRUE(s.result.survivor);
    EXPECT_EQ(s.result.survivor->note, "G4: fail (feedback rejected)");
    EXPECT_FALSE(s.result.survivor->g4->passed());
}

TEST(Cascade, SurvivorIsLastRevisionThatPassedG1ToG3) {
    Fixture f;
    // Revision 1 accepted from G4 feedback fails G1 and the budget (r = 1) runs out.
    ScriptedCascade s({"% assignment: {\"q\": [1, 2, 3, 4]}\n"}, {"% FAIL_G1\n"}, 1);
    const auto c = s.run(f, {f.checker(1, nq::kChecker)});
    EXPECT_FALSE(c.alive);
    EXPECT_EQ(c.death_reason, "BudgetExhausted");
    ASSERT_TRUE(s.result.survivor);
    EXPECT_EQ(s.result.survivor->revision, 0);
    EXPECT_EQ(s.result.survivor->note, "G4: fail (feedback accepted)");
}

TEST(Cascade, NoSemanticGateWithoutCheckers) {
    Fixture f;
    ScriptedCascade s({"ok\n"}, {}, 4);
    const auto c = s.run(f, {});
    EXPECT_EQ(gates_of(c), (std::vector<Gate>{Gate::G1, Gate::G2, Gate::G3}));
    EXPECT_EQ(s.result.survivor->note, "G4: not run");
}

TEST(Cascade, FormatterGeneratedOnceAtFirstG2Pass) {
    Fixture f;
    ScriptedCascade s({"% FAIL_G2_UNSAT\n", "ok\n"}, {}, 4);
    const auto c = s.run(f, {});
    EXPECT_EQ(c.formatter_history.size(), 1u);
    EXPECT_EQ(s.counters.modeling.load(), 3);
}
