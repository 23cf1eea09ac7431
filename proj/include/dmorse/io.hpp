#ifndef DMORSE_IO_HPP
#define DMORSE_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmorse/pathfind.hpp"
#include "dmorse/regions.hpp"

namespace dmorse {
namespace io {

using Json = nlohmann::ordered_json;

/// Facets of an OFF-style file: optional "OFF" marker, a counts line, that
/// many coordinate lines, then one facet per line as `k v1 ... vk`.
std::vector<std::vector<std::int64_t>> parse_off(std::istream& in);

/// Plain facet list: one facet per line, whitespace-separated vertex ids.
std::vector<std::vector<std::int64_t>> parse_facets(std::istream& in);

/// Grid raster: header `grid d e1 ... ed` followed by one scalar per vertex
/// in row-major order (first axis outermost).
struct GridData {
    std::vector<int> extents;
    std::vector<double> vertex_values;
};
GridData parse_grid(std::istream& in);

/// `vertex_id,value` lines; '#' comments and an optional header are skipped.
std::vector<std::pair<std::int64_t, double>> parse_values_csv(std::istream& in);

/// Resolve csv rows against a complex: vertices are matched by simplicial
/// label (their original id) when labeled, else by 0-cell index.
std::vector<double> vertex_values_for(const CellComplex& k,
                                      const std::vector<std::pair<std::int64_t, double>>& rows);

Json field_to_json(const GradientField& v);
GradientField field_from_json(const CellComplex& k, const Json& j);

/// Self-contained complex document: cells with dimensions plus the face
/// lists.  The generic loader applies only structural checks.
Json complex_to_json(const CellComplex& k);
CellComplex complex_from_json(const Json& j);

Json stats_to_json(const ComplexStats& s);
Json decomposition_to_json(const CellComplex& k, const GradientField& v,
                           const Decomposition& d, const BoundarySubcomplex* boundary = nullptr);
Json route_to_json(const Route& r);
Json report_to_json(const FieldReport& r);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace io
} // namespace dmorse

#endif // DMORSE_IO_HPP
