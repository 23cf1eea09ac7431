#include "dmorse/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dmorse {
namespace io {

namespace {

/// Lines of a stream with comments ('#' to end of line) stripped and blank
/// lines dropped, each paired with its 1-based line number.
std::vector<std::pair<int, std::string>> content_lines(std::istream& in) {
    std::vector<std::pair<int, std::string>> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream probe(line);
        std::string token;
        if (probe >> token)
            out.emplace_back(number, line);
    }
    return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw MalformedInputError("line " + std::to_string(line) + ": " + what);
}

} // namespace

std::vector<std::vector<std::int64_t>> parse_off(std::istream& in) {
    const auto lines = content_lines(in);
    if (lines.empty())
        throw MalformedInputError("empty OFF input");

    std::size_t at = 0;
    {
        std::istringstream probe(lines[at].second);
        std::string word;
        probe >> word;
        if (word == "OFF" || word == "off")
            ++at;
    }
    if (at >= lines.size())
        fail(lines.back().first, "missing counts line");

    long n_vertices = 0, n_facets = 0, n_edges = 0;
    {
        std::istringstream counts(lines[at].second);
        if (!(counts >> n_vertices >> n_facets))
            fail(lines[at].first, "expected vertex and facet counts");
        counts >> n_edges; // optional, ignored
        ++at;
    }
    if (n_vertices < 0 || n_facets <= 0)
        fail(lines[at - 1].first, "counts must be positive");

    // Vertex coordinate lines carry no combinatorial content here.
    if (at + static_cast<std::size_t>(n_vertices) > lines.size())
        fail(lines.back().first, "fewer coordinate lines than the vertex count");
    at += static_cast<std::size_t>(n_vertices);

    std::vector<std::vector<std::int64_t>> facets;
    for (long i = 0; i < n_facets; ++i) {
        if (at >= lines.size())
            fail(lines.back().first, "fewer facet lines than the facet count");
        std::istringstream row(lines[at].second);
        long arity = 0;
        if (!(row >> arity) || arity <= 0)
            fail(lines[at].first, "facet line must start with its vertex count");
        std::vector<std::int64_t> facet;
        for (long j = 0; j < arity; ++j) {
            std::int64_t vid;
            if (!(row >> vid))
                fail(lines[at].first, "facet line is shorter than announced");
            if (vid < 0 || vid >= n_vertices)
                fail(lines[at].first, "vertex index out of range");
            facet.push_back(vid);
        }
        facets.push_back(std::move(facet));
        ++at;
    }
    return facets;
}

std::vector<std::vector<std::int64_t>> parse_facets(std::istream& in) {
    const auto lines = content_lines(in);
    std::vector<std::vector<std::int64_t>> facets;
    for (const auto& [number, text] : lines) {
        std::istringstream row(text);
        std::vector<std::int64_t> facet;
        std::int64_t vid;
        while (row >> vid) {
            if (vid < 0)
                fail(number, "negative vertex id");
            facet.push_back(vid);
        }
        if (!row.eof())
            fail(number, "unexpected token in facet line");
        facets.push_back(std::move(facet));
    }
    if (facets.empty())
        throw MalformedInputError("no facets in input");
    return facets;
}

GridData parse_grid(std::istream& in) {
    std::string word;
    if (!(in >> word) || (word != "grid"))
        throw MalformedInputError("grid input must start with a 'grid' header");
    int d = 0;
    if (!(in >> d) || d <= 0)
        throw MalformedInputError("grid header needs a positive dimension");

    GridData data;
    std::size_t n_vertices = 1;
    for (int i = 0; i < d; ++i) {
        int extent = 0;
        if (!(in >> extent) || extent <= 0)
            throw MalformedInputError("grid extents must be positive");
        data.extents.push_back(extent);
        n_vertices *= static_cast<std::size_t>(extent) + 1;
    }
    data.vertex_values.reserve(n_vertices);
    double value;
    while (in >> value)
        data.vertex_values.push_back(value);
    if (data.vertex_values.size() != n_vertices)
        throw MalformedInputError("grid raster has " + std::to_string(data.vertex_values.size()) +
                                  " values, expected " + std::to_string(n_vertices));
    return data;
}

std::vector<std::pair<std::int64_t, double>> parse_values_csv(std::istream& in) {
    std::vector<std::pair<std::int64_t, double>> rows;
    const auto lines = content_lines(in);
    for (const auto& [number, text] : lines) {
        std::string left, right;
        const auto comma = text.find(',');
        if (comma == std::string::npos)
            fail(number, "expected 'vertex_id,value'");
        left = text.substr(0, comma);
        right = text.substr(comma + 1);
        try {
            const std::int64_t vid = std::stoll(left);
            const double value = std::stod(right);
            rows.emplace_back(vid, value);
        } catch (const std::exception&) {
            if (rows.empty())
                continue; // header line
            fail(number, "cannot parse row");
        }
    }
    if (rows.empty())
        throw MalformedInputError("no value rows in csv input");
    return rows;
}

std::vector<double> vertex_values_for(const CellComplex& k,
                                      const std::vector<std::pair<std::int64_t, double>>& rows) {
    std::vector<CellId> vertices;
    for (CellId c = 0; c < k.size(); ++c)
        if (k.dim(c) == 0)
            vertices.push_back(c);

    std::vector<double> values(vertices.size());
    std::vector<char> have(vertices.size(), 0);
    for (const auto& [vid, value] : rows) {
        CellId cell = kNoCell;
        if (k.label_kind() == LabelKind::Simplicial) {
            cell = k.find_label({vid});
        } else if (vid >= 0 && static_cast<std::size_t>(vid) < vertices.size()) {
            cell = vertices[static_cast<std::size_t>(vid)];
        }
        if (cell == kNoCell || k.dim(cell) != 0)
            throw MalformedInputError("value row references unknown vertex " + std::to_string(vid));
        const auto slot = static_cast<std::size_t>(
            std::lower_bound(vertices.begin(), vertices.end(), cell) - vertices.begin());
        values[slot] = value;
        have[slot] = 1;
    }
    for (std::size_t i = 0; i < have.size(); ++i)
        if (!have[i])
            throw MalformedInputError("no value for vertex cell " + std::to_string(vertices[i]));
    return values;
}

Json field_to_json(const GradientField& v) {
    Json j;
    Json pairs = Json::array();
    for (const auto& [tail, head] : v.pairs())
        pairs.push_back(Json::array({tail, head}));
    j["pairs"] = std::move(pairs);
    j["critical"] = v.critical();
    return j;
}

GradientField field_from_json(const CellComplex& k, const Json& j) {
    if (!j.contains("pairs"))
        throw MalformedInputError("field document lacks 'pairs'");
    std::vector<std::pair<CellId, CellId>> pairs;
    for (const auto& entry : j.at("pairs")) {
        if (!entry.is_array() || entry.size() != 2)
            throw MalformedInputError("field pair must be [tail, head]");
        pairs.emplace_back(entry[0].get<CellId>(), entry[1].get<CellId>());
    }
    GradientField v = GradientField::from_pairs(k, pairs);
    if (j.contains("critical")) {
        const auto declared = j.at("critical").get<std::vector<CellId>>();
        if (declared != v.critical())
            throw MalformedInputError("declared critical set does not match the pairs");
    }
    return v;
}

Json complex_to_json(const CellComplex& k) {
    Json j;
    Json cells = Json::array();
    for (CellId c = 0; c < k.size(); ++c)
        cells.push_back(Json::array({c, k.dim(c)}));
    j["cells"] = std::move(cells);
    Json faces = Json::array();
    for (CellId c = 0; c < k.size(); ++c)
        faces.push_back(k.faces(c));
    j["faces"] = std::move(faces);
    return j;
}

CellComplex complex_from_json(const Json& j) {
    if (!j.contains("cells") || !j.contains("faces"))
        throw MalformedInputError("complex document needs 'cells' and 'faces'");
    const auto& cells = j.at("cells");
    std::vector<int> dims(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& entry = cells[i];
        const auto id = entry[0].get<std::size_t>();
        if (id != i)
            throw MalformedInputError("cell ids must be dense and ascending");
        dims[i] = entry[1].get<int>();
    }
    std::vector<std::vector<CellId>> faces;
    for (const auto& entry : j.at("faces"))
        faces.push_back(entry.get<std::vector<CellId>>());
    // Adjacency-list input is trusted beyond the structural checks.
    return CellComplex::from_parts(std::move(dims), std::move(faces), ComplexCheck::Structural);
}

Json stats_to_json(const ComplexStats& s) {
    Json j;
    j["m"] = s.total_cells;
    j["n"] = s.dimension;
    j["m_d"] = s.cells_per_dim;
    j["r_d"] = s.mean_faces;
    j["p_d"] = s.mean_cofaces;
    j["p_max"] = s.max_mean_cofaces;
    j["c_t"] = s.total_critical;
    j["c_d"] = s.critical_per_dim;
    j["euler"] = s.euler_characteristic();
    return j;
}

Json decomposition_to_json(const CellComplex& k, const GradientField& v,
                           const Decomposition& d, const BoundarySubcomplex* boundary) {
    Json j;

    Json critical = Json::array();
    for (CellId c : v.critical()) {
        Json entry;
        entry["id"] = c;
        entry["dim"] = k.dim(c);
        entry["kind"] = "interior";
        critical.push_back(std::move(entry));
    }
    for (const Region& r : d.descending) {
        if (!r.via_boundary)
            continue;
        Json entry;
        entry["id"] = r.critical;
        entry["dim"] = k.dim(r.critical);
        entry["kind"] = "boundary";
        critical.push_back(std::move(entry));
    }
    j["critical"] = std::move(critical);
    j["field"] = field_to_json(v);

    Json regions = Json::array();
    auto emit_region = [&](const Region& r) {
        Json entry;
        entry["critical"] = r.critical;
        entry["kind"] = r.kind == RegionKind::Descending ? "descending" : "ascending";
        entry["via_boundary"] = r.via_boundary;
        entry["cells"] = r.cells;
        regions.push_back(std::move(entry));
    };
    for (const Region& r : d.descending)
        emit_region(r);
    for (const Region& r : d.ascending)
        emit_region(r);
    j["regions"] = std::move(regions);

    Json labels = Json::array();
    for (CellId c = 0; c < k.size(); ++c) {
        Json entry;
        entry["cell"] = c;
        Json pairs = Json::array();
        for (const auto& [down, up] : d.label(c))
            pairs.push_back(Json::array({down, up}));
        entry["pairs"] = std::move(pairs);
        labels.push_back(std::move(entry));
    }
    j["ms_labels"] = std::move(labels);

    Json s = stats_to_json(stats(k, &v));
    s["pair_visits"] = d.build_stats.pair_visits;
    s["completion_checks"] = d.build_stats.completion_checks;
    s["frame_steps"] = d.build_stats.frame_steps;
    s["overlap_flags"] = d.build_stats.overlaps.size();
    if (boundary != nullptr)
        s["boundary_cells"] = boundary->to_parent.size();
    j["stats"] = std::move(s);
    return j;
}

Json route_to_json(const Route& r) {
    Json j;
    j["cells"] = r.cells;
    j["waypoints"] = r.waypoints;
    j["cost"] = r.cost;
    return j;
}

Json report_to_json(const FieldReport& r) {
    Json j;
    j["ok"] = r.ok;
    Json violations = Json::array();
    for (const FieldViolation& v : r.violations) {
        Json entry;
        switch (v.kind) {
        case FieldViolation::Kind::Partition: entry["kind"] = "partition"; break;
        case FieldViolation::Kind::Grading: entry["kind"] = "grading"; break;
        case FieldViolation::Kind::Incidence: entry["kind"] = "incidence"; break;
        case FieldViolation::Kind::Cycle: entry["kind"] = "cycle"; break;
        }
        entry["message"] = v.message;
        entry["cells"] = v.cells;
        violations.push_back(std::move(entry));
    }
    j["violations"] = std::move(violations);
    if (!r.cycle.empty())
        j["cycle"] = r.cycle;
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MalformedInputError("cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw MalformedInputError("cannot write " + path);
    out << content;
}

} // namespace io
} // namespace dmorse
