#include "cpsync/problem_store.hpp"

#include <filesystem>
#include <regex>
#include <set>

#include "cpsync/dzn.hpp"
#include "cpsync/errors.hpp"

namespace fs = std::filesystem;

namespace cpsync {

std::string to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::Int: return "int";
        case ElementKind::Float: return "float";
        case ElementKind::String: return "string";
        case ElementKind::Bool: return "bool";
    }
    return "int";
}

std::string to_string(ProblemKind kind) { return kind == ProblemKind::CSP ? "CSP" : "COP"; }

std::string to_string(ObjectiveSense sense) { return sense == ObjectiveSense::Minimize ? "min" : "max"; }

namespace {

ElementKind element_kind_from(const std::string& s) {
    if (s == "int") return ElementKind::Int;
    if (s == "float") return ElementKind::Float;
    if (s == "string") return ElementKind::String;
    if (s == "bool") return ElementKind::Bool;
    throw MissingField("output_spec.element_kind (unknown kind '" + s + "')");
}

const std::map<std::string, std::string>& default_files() {
    static const std::map<std::string, std::string> files = {
        {"description", "description.md"},
        {"input_spec", "input_spec.md"},
        {"output_spec", "output_spec.json"},
        {"data", "data.dzn"},
        {"params", "params.json"},
        {"reference_model", "ref_model.mzn"},
        {"mapping", "mapping.src"},
        {"reference_solution", "reference_solution.json"},
    };
    return files;
}

std::string file_for(const Json& manifest, const std::string& item) {
    if (manifest.contains("files") && manifest["files"].contains(item)) {
        return manifest["files"][item].get<std::string>();
    }
    return default_files().at(item);
}

std::string read_required(const fs::path& dir, const Json& manifest, const std::string& item) {
    const fs::path path = dir / file_for(manifest, item);
    if (!fs::is_regular_file(path)) throw MissingField(item);
    return read_text_file(path.string());
}

std::optional<std::string> read_optional(const fs::path& dir, const Json& manifest, const std::string& item) {
    const fs::path path = dir / file_for(manifest, item);
    if (!fs::is_regular_file(path)) {
        if (manifest.contains("files") && manifest["files"].contains(item)) throw MissingField(item);
        return std::nullopt;
    }
    return read_text_file(path.string());
}

Json parse_json_item(const std::string& text, const std::string& item) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw MissingField(item + " (invalid JSON: " + e.what() + ")");
    }
}

}  // namespace

Json output_spec_to_json(const OutputSpec& spec) {
    Json out = Json::object();
    for (const auto& [key, field] : spec) {
        out[key] = {{"description", field.description},
                    {"shape", field.shape},
                    {"element_kind", to_string(field.element_kind)}};
    }
    return out;
}

OutputSpec output_spec_from_json(const Json& json) {
    if (!json.is_object()) throw MissingField("output_spec");
    OutputSpec spec;
    for (const auto& [key, entry] : json.items()) {
        if (!entry.is_object()) throw MissingField("output_spec." + key);
        OutputField field;
        field.description = entry.value("description", "");
        if (entry.contains("shape")) {
            for (const auto& dim : entry["shape"]) {
                field.shape.push_back(dim.is_string() ? dim.get<std::string>() : dim.dump());
            }
        }
        field.element_kind = element_kind_from(entry.value("element_kind", "int"));
        spec.emplace(key, std::move(field));
    }
    return spec;
}

std::string describe_output_spec(const OutputSpec& spec) {
    std::string out;
    int index = 1;
    for (const auto& [key, field] : spec) {
        std::string shape = "[";
        for (std::size_t i = 0; i < field.shape.size(); ++i) {
            if (i) shape += ", ";
            shape += field.shape[i];
        }
        shape += "]";
        out += "(" + std::to_string(index++) + ") `" + key + "`: " + Json(field.description).dump() +
               ", \"size\": \"" + shape + "\", \"type\": \"" + to_string(field.element_kind) + "\"\n";
    }
    return out;
}

std::vector<std::string> declared_parameters(const std::string& input_spec) {
    static const std::regex line_re(R"(^\s*(?:[-*]\s*)?(?:\(\d+\)\s*)?[`"]([A-Za-z_][A-Za-z0-9_]*)[`"]\s*:)");
    std::vector<std::string> names;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= input_spec.size()) {
        std::size_t end = input_spec.find('\n', start);
        if (end == std::string::npos) end = input_spec.size();
        const std::string line = input_spec.substr(start, end - start);
        std::smatch m;
        if (std::regex_search(line, m, line_re) && seen.insert(m[1]).second) names.push_back(m[1]);
        start = end + 1;
    }
    return names;
}

void validate_bundle(const ProblemBundle& bundle) {
    if (bundle.id.empty()) throw MissingField("id");
    if (bundle.description_nl.empty()) throw MissingField("description");
    if (bundle.output_spec.empty()) throw MissingField("output_spec");
    if (!bundle.input_data.builtin_params.is_object()) throw MissingField("params");

    const Json dzn_params = dzn::parse(bundle.input_data.dzn_text);
    for (const auto& name : declared_parameters(bundle.input_spec)) {
        if (!bundle.input_data.builtin_params.contains(name)) throw MissingField("params." + name);
        if (!dzn_params.contains(name)) throw MissingField("data." + name);
    }
    for (const auto& [name, value] : bundle.input_data.builtin_params.items()) {
        if (dzn_params.contains(name) && !dzn::values_equal(value, dzn_params.at(name))) {
            throw DataMismatch(name);
        }
    }

    if (bundle.eval_assets) {
        const auto& assets = *bundle.eval_assets;
        if (assets.reference_model.empty()) throw MissingField("reference_model");
        if (assets.mapped_vars.empty()) throw MissingField("mapped_vars");
        if (assets.problem_kind == ProblemKind::COP && !assets.objective_sense) throw MissingField("sense");
    }
}

ProblemBundle load_bundle(const std::string& directory) {
    const fs::path dir(directory);
    if (!fs::is_directory(dir)) throw MissingField("bundle directory " + directory);
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::is_regular_file(manifest_path)) throw MissingField("manifest.json");
    const Json manifest = parse_json_item(read_text_file(manifest_path.string()), "manifest.json");

    ProblemBundle bundle;
    if (!manifest.contains("id") || !manifest["id"].is_string()) throw MissingField("id");
    bundle.id = manifest["id"].get<std::string>();
    bundle.description_nl = read_required(dir, manifest, "description");
    bundle.input_spec = read_required(dir, manifest, "input_spec");
    bundle.output_spec = output_spec_from_json(parse_json_item(read_required(dir, manifest, "output_spec"), "output_spec"));
    bundle.input_data.dzn_text = read_required(dir, manifest, "data");
    bundle.input_data.builtin_params = parse_json_item(read_required(dir, manifest, "params"), "params");

    if (auto ref = read_optional(dir, manifest, "reference_model")) {
        EvalAssets assets;
        assets.reference_model = *ref;
        assets.mapping_program = read_optional(dir, manifest, "mapping").value_or("");
        if (manifest.contains("mapped_vars")) {
            assets.mapped_vars = manifest["mapped_vars"].get<std::vector<std::string>>();
        }
        const std::string kind = manifest.value("kind", "");
        if (kind == "CSP") assets.problem_kind = ProblemKind::CSP;
        else if (kind == "COP") assets.problem_kind = ProblemKind::COP;
        else throw MissingField("kind");
        if (manifest.contains("sense")) {
            const std::string sense = manifest["sense"].get<std::string>();
            if (sense == "min") assets.objective_sense = ObjectiveSense::Minimize;
            else if (sense == "max") assets.objective_sense = ObjectiveSense::Maximize;
            else throw MissingField("sense");
        }
        if (auto sol = read_optional(dir, manifest, "reference_solution")) {
            assets.reference_solution = parse_json_item(*sol, "reference_solution");
        }
        bundle.eval_assets = std::move(assets);
    }

    validate_bundle(bundle);
    return bundle;
}

void save_bundle(const ProblemBundle& bundle, const std::string& directory) {
    const fs::path dir(directory);
    fs::create_directories(dir);
    Json manifest = {{"id", bundle.id}};
    write_text_file((dir / "description.md").string(), bundle.description_nl);
    write_text_file((dir / "input_spec.md").string(), bundle.input_spec);
    write_text_file((dir / "output_spec.json").string(), pretty_dump(output_spec_to_json(bundle.output_spec)));
    write_text_file((dir / "data.dzn").string(), bundle.input_data.dzn_text);
    write_text_file((dir / "params.json").string(), pretty_dump(bundle.input_data.builtin_params));
    if (bundle.eval_assets) {
        const auto& assets = *bundle.eval_assets;
        manifest["kind"] = to_string(assets.problem_kind);
        if (assets.objective_sense) manifest["sense"] = to_string(*assets.objective_sense);
        manifest["mapped_vars"] = assets.mapped_vars;
        write_text_file((dir / "ref_model.mzn").string(), assets.reference_model);
        if (!assets.mapping_program.empty()) {
            write_text_file((dir / "mapping.src").string(), assets.mapping_program);
        }
        if (assets.reference_solution) {
            write_text_file((dir / "reference_solution.json").string(), pretty_dump(*assets.reference_solution));
        }
    }
    write_text_file((dir / "manifest.json").string(), pretty_dump(manifest));
}

}  // namespace cpsync
