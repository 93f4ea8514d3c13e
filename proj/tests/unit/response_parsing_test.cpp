#include <gtest/gtest.h>

#include "cpsync/response_parsing.hpp"

using namespace cpsync::parsing;

TEST(CodeBlock, FirstFenceWins) {
    const auto code = first_code_block("text\n```MiniZinc\nvar 1..3: x;\n```\nmore\n```\nsecond\n```\n");
    ASSERT_TRUE(code);
    EXPECT_EQ(*code, "var 1..3: x;\n");
}

TEST(CodeBlock, NoneWithoutFence) { EXPECT_FALSE(first_code_block("just prose")); }

TEST(JsonObject, WholeTextFencedOrEmbedded) {
    EXPECT_EQ((*first_json_object(R"({"a": 1})"))["a"], 1);
    EXPECT_EQ((*first_json_object("```json\n{\"a\": 2}\n```"))["a"], 2);
    EXPECT_EQ((*first_json_object("My answer is {\"selection\": 3, \"note\": \"x}y\"} ok"))["selection"], 3);
    EXPECT_FALSE(first_json_object("no json {here"));
}

TEST(TaggedTasks, OrderedById) {
    const auto tasks = tagged_tasks("<task2>b</task2> <task1>a</task1> <task3>unclosed");
    ASSERT_EQ(tasks.size(), 2u);
    EXPECT_EQ(tasks[0], std::make_pair(1, std::string("a")));
    EXPECT_EQ(tasks[1], std::make_pair(2, std::string("b")));
}

TEST(DefinesFunction, ChecksNameAndArity) {
    EXPECT_TRUE(defines_function("def semantic_checker(data_dict, output_dict):\n    pass\n", "semantic_checker", 2));
    EXPECT_TRUE(defines_function("import math\ndef transformer(a, b) -> dict:\n    return {}\n", "transformer", 2));
    EXPECT_FALSE(defines_function("def transformer(a):\n    pass\n", "transformer", 2));
    EXPECT_FALSE(defines_function("def transformer(*args):\n    pass\n", "transformer", 2));
    EXPECT_FALSE(defines_function("def checker(a, b):\n    pass\n", "semantic_checker", 2));
    EXPECT_FALSE(defines_function("class X:\n    def transformer(a, b):\n        pass\n", "transformer", 2));
}
