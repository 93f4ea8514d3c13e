#pragma once

#include <string>
#include <vector>

#include "cpsync/problem_store.hpp"
#include "native_sandbox.hpp"

namespace cptest {

/// Row of the queen in each column, 1-based.
using Placement = std::vector<int>;

/// All n^n placements in lexicographic order.
std::vector<Placement> all_placements(int n);
bool is_solution(const Placement& q);
std::vector<Placement> brute_force_solutions(int n);

namespace nq {

extern const char* const kModelGlobals;
extern const char* const kModelGlobalsWithOutput;
extern const char* const kModelForall;
extern const char* const kModelAbs;
extern const char* const kModelNoDiagonal;
extern const char* const kModelSyntaxError;

extern const char* const kChecker;
extern const char* const kCheckerSets;
extern const char* const kCheckerBroken;

extern const char* const kFormatter;
extern const char* const kFormatterWrongKey;
extern const char* const kFormatterDivZero;

extern const char* const kMapping;

extern const char* const kDescription;
extern const char* const kInputSpec;

}  // namespace nq

/// Binds every program above to its native handler.
void register_nqueens(NativeSandbox& sandbox);

/// N-Queens bundle for board size n with evaluation assets.
cpsync::ProblemBundle nqueens_bundle(int n);

/// minimize x with x in 1..5; identity mapping.
cpsync::ProblemBundle toy_cop_bundle();

}  // namespace cptest
