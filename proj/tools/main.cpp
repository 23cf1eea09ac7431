#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dmorse/io.hpp"
#include "dmorse/pathfind.hpp"

namespace {

using dmorse::CellComplex;
using dmorse::CellId;
using dmorse::GradientField;
using dmorse::MorseFunction;
using Json = dmorse::io::Json;

struct InputOptions {
    std::string input;
    std::string format = "off"; // off | facets | grid | field-json
    std::string values;         // csv path, for off/facets inputs
    std::string field;          // optional field document to reuse
    bool allow_high_dimension = false;
};

struct LoadedData {
    CellComplex complex;
    std::optional<std::vector<double>> vertex_values;
    std::optional<GradientField> field;
};

void add_input_options(CLI::App* cmd, InputOptions& opts) {
    cmd->add_option("--input", opts.input, "input path")->required();
    cmd->add_option("--format", opts.format, "off | facets | grid | field-json")
        ->check(CLI::IsMember({"off", "facets", "grid", "field-json"}));
    cmd->add_option("--values", opts.values, "vertex scalar csv (vertex_id,value)");
    cmd->add_option("--field", opts.field, "gradient field json to reuse");
    cmd->add_flag("--allow-high-dimension", opts.allow_high_dimension,
                  "lift the dimension-6 cap on grid inputs");
}

LoadedData load(const InputOptions& opts) {
    LoadedData data;
    std::ifstream in(opts.input, std::ios::binary);
    if (!in)
        throw dmorse::MalformedInputError("cannot read " + opts.input);

    if (opts.format == "off" || opts.format == "facets") {
        const auto facets = opts.format == "off" ? dmorse::io::parse_off(in)
                                                 : dmorse::io::parse_facets(in);
        data.complex = dmorse::build_simplicial(facets);
    } else if (opts.format == "grid") {
        const dmorse::io::GridData grid = dmorse::io::parse_grid(in);
        if (grid.extents.size() > 6 && !opts.allow_high_dimension)
            throw dmorse::MalformedInputError(
                "grid dimension exceeds 6; pass --allow-high-dimension to override");
        data.complex = dmorse::build_cubical(grid.extents, opts.allow_high_dimension);
        data.vertex_values = grid.vertex_values;
    } else { // field-json: complex plus field in one document
        const Json doc = Json::parse(dmorse::io::read_text_file(opts.input));
        if (!doc.contains("complex"))
            throw dmorse::MalformedInputError("field-json input needs a 'complex' section");
        data.complex = dmorse::io::complex_from_json(doc.at("complex"));
        if (doc.contains("field"))
            data.field = dmorse::io::field_from_json(data.complex, doc.at("field"));
    }

    if (!opts.values.empty()) {
        std::ifstream values_in(opts.values, std::ios::binary);
        if (!values_in)
            throw dmorse::MalformedInputError("cannot read " + opts.values);
        const auto rows = dmorse::io::parse_values_csv(values_in);
        data.vertex_values = dmorse::io::vertex_values_for(data.complex, rows);
    }
    if (!opts.field.empty()) {
        const Json doc = Json::parse(dmorse::io::read_text_file(opts.field));
        data.field =
            dmorse::io::field_from_json(data.complex, doc.contains("field") ? doc.at("field") : doc);
    }
    return data;
}

GradientField require_field(const LoadedData& data, bool boundary_first) {
    if (data.field.has_value())
        return *data.field;
    if (!data.vertex_values.has_value())
        throw dmorse::MalformedInputError(
            "no gradient field: provide --values, a grid raster, or --field");
    if (boundary_first) {
        const dmorse::BoundarySubcomplex boundary = dmorse::boundary_subcomplex(data.complex);
        if (!boundary.empty())
            return dmorse::extend_from_vertex_values(data.complex, *data.vertex_values, &boundary);
    }
    return dmorse::extend_from_vertex_values(data.complex, *data.vertex_values);
}

void emit(const std::string& output, const Json& j) {
    const std::string text = j.dump(2) + "\n";
    if (output.empty())
        std::cout << text;
    else
        dmorse::io::write_text_file(output, text);
}

int run_guarded(const std::string& output, const std::function<Json()>& body) {
    try {
        emit(output, body());
        return 0;
    } catch (const dmorse::MalformedInputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        Json j;
        j["error"]["kind"] = "pipeline";
        j["error"]["message"] = e.what();
        emit(output, j);
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete gradient decomposition toolkit"};
    app.require_subcommand(1);

    InputOptions input;
    std::string output;
    bool with_boundary = false;
    bool with_ascending = true;
    bool with_repair = false;
    double simplify_threshold = -1.0;
    int threads = 1;
    std::vector<CellId> route_cells;

    auto* decompose = app.add_subcommand("decompose", "build regions and labels");
    add_input_options(decompose, input);
    decompose->add_option("--output", output, "output path (default stdout)");
    decompose->add_flag("--boundary,!--no-boundary", with_boundary,
                        "process boundary-critical cells");
    decompose->add_flag("--ascending,!--no-ascending", with_ascending,
                        "build ascending regions (default on)");
    decompose->add_flag("--repair", with_repair, "push merge points before decomposing");
    decompose->add_option("--simplify", simplify_threshold,
                          "cancel critical pairs below this value difference first");
    decompose->add_option("--threads", threads, "worker threads per dimension layer")
        ->check(CLI::PositiveNumber);

    auto* simplify_cmd = app.add_subcommand("simplify", "cancel low-value critical pairs");
    add_input_options(simplify_cmd, input);
    simplify_cmd->add_option("--output", output, "output path (default stdout)");
    simplify_cmd->add_option("--simplify", simplify_threshold, "value-difference threshold")
        ->required();

    auto* route_cmd = app.add_subcommand("route", "path between extrema through a saddle");
    add_input_options(route_cmd, input);
    route_cmd->add_option("--output", output, "output path (default stdout)");
    route_cmd->add_option("--route", route_cells, "start and target cell ids")
        ->expected(2)
        ->required();
    route_cmd->add_flag("--boundary,!--no-boundary", with_boundary,
                        "process boundary-critical cells");
    route_cmd->add_option("--threads", threads, "worker threads per dimension layer");

    auto* stats_cmd = app.add_subcommand("stats", "complex size statistics");
    add_input_options(stats_cmd, input);
    stats_cmd->add_option("--output", output, "output path (default stdout)");

    auto* validate_cmd = app.add_subcommand("validate", "check a gradient field");
    add_input_options(validate_cmd, input);
    validate_cmd->add_option("--output", output, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (decompose->parsed()) {
        return run_guarded(output, [&]() {
            LoadedData data = load(input);
            GradientField field = require_field(data, with_boundary);
            if (simplify_threshold >= 0.0) {
                if (!data.vertex_values.has_value())
                    throw dmorse::MalformedInputError("--simplify needs vertex values");
                const MorseFunction f =
                    dmorse::function_from_vertex_values(data.complex, *data.vertex_values);
                field = dmorse::simplify(data.complex, field, simplify_threshold, f);
            }
            CellComplex complex = data.complex;
            Json repair_section;
            if (with_repair) {
                dmorse::RepairResult repaired = dmorse::repair_to_disks(complex, field);
                complex = std::move(repaired.complex);
                field = std::move(repaired.field);
                repair_section["steps"] = repaired.report.steps;
                repair_section["residual_merges"] = repaired.report.residual.size();
                repair_section["exhausted"] = repaired.report.exhausted;
            }

            dmorse::DecompositionOptions options;
            options.with_boundary = with_boundary;
            options.with_ascending = with_ascending;
            options.threads = threads;
            if (data.vertex_values.has_value())
                options.vertex_values = &*data.vertex_values;
            const dmorse::Decomposition decomposition =
                dmorse::morse_smale(complex, field, options);

            const dmorse::BoundarySubcomplex boundary =
                with_boundary ? dmorse::boundary_subcomplex(complex) : dmorse::BoundarySubcomplex{};
            Json j = dmorse::io::decomposition_to_json(complex, field, decomposition,
                                                       with_boundary ? &boundary : nullptr);
            j["complex"] = dmorse::io::complex_to_json(complex);
            if (with_repair)
                j["repair"] = std::move(repair_section);
            return j;
        });
    }

    if (simplify_cmd->parsed()) {
        return run_guarded(output, [&]() {
            LoadedData data = load(input);
            const GradientField field = require_field(data, false);
            if (!data.vertex_values.has_value())
                throw dmorse::MalformedInputError("simplify needs vertex values");
            const MorseFunction f =
                dmorse::function_from_vertex_values(data.complex, *data.vertex_values);
            const GradientField out =
                dmorse::simplify(data.complex, field, simplify_threshold, f);
            Json j;
            j["complex"] = dmorse::io::complex_to_json(data.complex);
            j["field"] = dmorse::io::field_to_json(out);
            return j;
        });
    }

    if (route_cmd->parsed()) {
        return run_guarded(output, [&]() {
            LoadedData data = load(input);
            const GradientField field = require_field(data, with_boundary);
            dmorse::DecompositionOptions options;
            options.with_boundary = with_boundary;
            options.threads = threads;
            if (data.vertex_values.has_value())
                options.vertex_values = &*data.vertex_values;
            const dmorse::Decomposition decomposition =
                dmorse::morse_smale(data.complex, field, options);
            const dmorse::CostFn cost =
                data.vertex_values.has_value()
                    ? dmorse::value_cost(
                          dmorse::function_from_vertex_values(data.complex, *data.vertex_values))
                    : dmorse::hop_cost();
            const dmorse::Route route = dmorse::route_to_maximum(
                data.complex, field, decomposition, route_cells[0], route_cells[1], cost);
            return dmorse::io::route_to_json(route);
        });
    }

    if (stats_cmd->parsed()) {
        return run_guarded(output, [&]() {
            LoadedData data = load(input);
            if (data.field.has_value() || data.vertex_values.has_value()) {
                const GradientField field = require_field(data, false);
                return dmorse::io::stats_to_json(dmorse::stats(data.complex, &field));
            }
            return dmorse::io::stats_to_json(dmorse::stats(data.complex));
        });
    }

    if (validate_cmd->parsed()) {
        return run_guarded(output, [&]() {
            LoadedData data = load(input);
            const GradientField field = require_field(data, false);
            const dmorse::FieldReport report = dmorse::validate_field(data.complex, field);
            return dmorse::io::report_to_json(report);
        });
    }
    return 0;
}
