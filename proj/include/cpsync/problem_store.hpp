#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpsync/canonical.hpp"

namespace cpsync {

enum class ElementKind { Int, Float, String, Bool };
enum class ProblemKind { CSP, COP };
enum class ObjectiveSense { Minimize, Maximize };

std::string to_string(ElementKind kind);
std::string to_string(ProblemKind kind);
std::string to_string(ObjectiveSense sense);

/// One key of the required output format.
///
/// `shape` holds one dimension expression per nesting level; an empty shape
/// is a scalar. Expressions are integer arithmetic over integer parameters
/// (`n`, `n*m`, `(n+1)/2`), `len(p)` for the length of array parameter `p`,
/// or `?` for a dimension whose length is not fixed.
struct OutputField {
    std::string description;
    std::vector<std::string> shape;
    ElementKind element_kind = ElementKind::Int;

    bool operator==(const OutputField&) const = default;
};

using OutputSpec = std::map<std::string, OutputField>;

struct InputData {
    std::string dzn_text;
    Json builtin_params = Json::object();

    bool operator==(const InputData&) const = default;
};

struct EvalAssets {
    std::string reference_model;
    std::vector<std::string> mapped_vars;
    /// Sandbox program defining `transformer(data_dict, output_dict)` that
    /// returns the reference-variable assignment. Empty means identity
    /// mapping (the output already uses the reference encoding).
    std::string mapping_program;
    ProblemKind problem_kind = ProblemKind::CSP;
    std::optional<ObjectiveSense> objective_sense;
    /// A formatted solution known to be correct; used to measure how often
    /// synthesized checkers reject ground truth.
    std::optional<Json> reference_solution;

    bool operator==(const EvalAssets&) const = default;
};

struct ProblemBundle {
    std::string id;
    std::string description_nl;
    std::string input_spec;
    OutputSpec output_spec;
    InputData input_data;
    std::optional<EvalAssets> eval_assets;

    bool operator==(const ProblemBundle&) const = default;
};

/// Loads and validates a bundle directory:
///
///   manifest.json      {"id", "kind"?, "sense"?, "files": {...}, "mapped_vars"?}
///   description.md     natural-language problem statement
///   input_spec.md      parameter semantics; parameters are lines of the form
///                      `"name": ...` or `` `name`: ... ``
///   output_spec.json   key -> {description, shape, element_kind}
///   data.dzn           MiniZinc data
///   params.json        the same data as a JSON object
///   ref_model.mzn      optional reference model
///   mapping.src        optional solution-mapping program
///
/// Throws MissingField (naming the item) or DataMismatch (naming the key).
ProblemBundle load_bundle(const std::string& directory);

/// Writes `bundle` in the layout load_bundle reads.
void save_bundle(const ProblemBundle& bundle, const std::string& directory);

/// Checks every bundle invariant; throws like load_bundle.
void validate_bundle(const ProblemBundle& bundle);

/// Parameter names declared in input-spec text.
std::vector<std::string> declared_parameters(const std::string& input_spec);

Json output_spec_to_json(const OutputSpec& spec);
OutputSpec output_spec_from_json(const Json& json);

/// Human-readable listing of the output keys in the style the prompts use.
std::string describe_output_spec(const OutputSpec& spec);

}  // namespace cpsync
