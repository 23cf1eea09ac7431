#ifndef DMORSE_TESTS_FIXTURES_HPP
#define DMORSE_TESTS_FIXTURES_HPP

#include <vector>

#include "dmorse/morse.hpp"
#include "dmorse/cell_complex.hpp"

namespace fixtures {

using dmorse::CellComplex;
using dmorse::CellId;
using dmorse::GradientField;

using Facets = std::vector<std::vector<std::int64_t>>;

/// Unit square split into two triangles along the 0-3 diagonal.
/// Vertex ids: 0=(0,0), 1=(1,0), 2=(0,1), 3=(1,1).
inline Facets unit_square_facets() { return {{0, 1, 3}, {0, 2, 3}}; }

inline std::vector<double> unit_square_xy_values() { return {0.0, 1.0, 1.0, 2.0}; }

/// k-by-k grid of unit squares, each split along its low-to-high diagonal.
inline Facets triangulated_grid_facets(int k) {
    Facets facets;
    auto vid = [k](int x, int y) { return static_cast<std::int64_t>(y) * (k + 1) + x; };
    for (int y = 0; y < k; ++y) {
        for (int x = 0; x < k; ++x) {
            facets.push_back({vid(x, y), vid(x + 1, y), vid(x + 1, y + 1)});
            facets.push_back({vid(x, y), vid(x, y + 1), vid(x + 1, y + 1)});
        }
    }
    return facets;
}

inline std::vector<double> grid_xy_values(int k) {
    std::vector<double> values;
    for (int y = 0; y <= k; ++y)
        for (int x = 0; x <= k; ++x)
            values.push_back(static_cast<double>(x + y) / k);
    return values;
}

/// Circle triangulated with n vertices and n edges.
inline Facets cycle_facets(int n) {
    Facets facets;
    for (int i = 0; i < n; ++i)
        facets.push_back({i, (i + 1) % n});
    return facets;
}

inline Facets octahedron_facets() {
    // 0 = north pole, 5 = south pole, 1..4 = equator.
    return {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 1, 4},
            {1, 2, 5}, {2, 3, 5}, {3, 4, 5}, {1, 4, 5}};
}

/// The standard 7-vertex torus triangulation (every pair of vertices forms
/// an edge; 14 triangles).
inline Facets torus_facets() {
    Facets facets;
    for (int i = 0; i < 7; ++i) {
        facets.push_back({i, (i + 1) % 7, (i + 3) % 7});
        facets.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return facets;
}

inline CellId edge(const CellComplex& k, std::int64_t a, std::int64_t b) {
    return a < b ? k.find_label({a, b}) : k.find_label({b, a});
}

inline CellId triangle(const CellComplex& k, std::int64_t a, std::int64_t b, std::int64_t c) {
    std::vector<std::int64_t> key{a, b, c};
    std::sort(key.begin(), key.end());
    return k.find_label(key);
}

/// Circle field with two minima (vertices 0, 2) and two critical edges.
struct TwoMinimaCircle {
    CellComplex complex;
    GradientField field;
    CellId min_a, min_b;     // vertices 0 and 2
    CellId saddle_a, saddle_b; // edges {1,2} and {0,3}
};

inline TwoMinimaCircle two_minima_circle() {
    TwoMinimaCircle fx;
    fx.complex = dmorse::build_simplicial(cycle_facets(4));
    const CellId e01 = edge(fx.complex, 0, 1);
    const CellId e23 = edge(fx.complex, 2, 3);
    fx.field = GradientField::from_pairs(fx.complex, {{1, e01}, {3, e23}});
    fx.min_a = 0;
    fx.min_b = 2;
    fx.saddle_a = edge(fx.complex, 1, 2);
    fx.saddle_b = edge(fx.complex, 0, 3);
    return fx;
}

/// A matching function for the two-minima circle: classify() reproduces the
/// field and the spurious pair (saddle_a, min_b) has value gap 0.1.
inline std::vector<double> two_minima_circle_values(const TwoMinimaCircle& fx) {
    std::vector<double> values(static_cast<std::size_t>(fx.complex.size()));
    values[0] = 0.0;                                            // min_a
    values[1] = 0.4;
    values[2] = 0.35;                                           // min_b
    values[3] = 0.8;
    values[static_cast<std::size_t>(edge(fx.complex, 0, 1))] = 0.38;
    values[static_cast<std::size_t>(edge(fx.complex, 2, 3))] = 0.75;
    values[static_cast<std::size_t>(fx.saddle_a)] = 0.45;       // gap to min_b: 0.1
    values[static_cast<std::size_t>(fx.saddle_b)] = 0.9;
    return values;
}

/// Octahedron field whose saddle region has exactly one merge point: the two
/// descent paths from the critical equator edge {1,2} run around the equator
/// and coalesce at vertex 3, continuing through the spoke to the south pole.
struct MergeFixture {
    CellComplex complex;
    GradientField field;
    CellId saddle;      // edge {1,2}
    CellId merge_cell;  // vertex 3
};

inline MergeFixture merge_fixture() {
    MergeFixture fx;
    fx.complex = dmorse::build_simplicial(octahedron_facets());
    const CellComplex& k = fx.complex;
    std::vector<std::pair<CellId, CellId>> pairs = {
        {1, edge(k, 1, 4)},                            // a -> ad
        {4, edge(k, 3, 4)},                            // d -> dc
        {2, edge(k, 2, 3)},                            // b -> bc
        {3, edge(k, 3, 5)},                            // c -> cS (the spoke)
        {0, edge(k, 0, 1)},                            // N -> Na
        {edge(k, 0, 2), triangle(k, 0, 1, 2)},
        {edge(k, 0, 3), triangle(k, 0, 2, 3)},
        {edge(k, 0, 4), triangle(k, 0, 3, 4)},
        {edge(k, 1, 5), triangle(k, 1, 2, 5)},
        {edge(k, 2, 5), triangle(k, 2, 3, 5)},
        {edge(k, 4, 5), triangle(k, 1, 4, 5)},
    };
    fx.field = GradientField::from_pairs(k, pairs);
    fx.saddle = edge(k, 1, 2);
    fx.merge_cell = 3;
    return fx;
}

/// 5-by-5 vertex grid with two interior peaks and a pass between them.
inline std::vector<int> two_peak_extents() { return {4, 4}; }

inline std::vector<double> two_peak_values() {
    // Row-major, first axis outermost: value(x, y) at index x * 5 + y.
    // Peaks at (1,2) and (3,2); the cheap pass sits at (2,2).
    return {
        0.2, 0.9, 0.7, 0.5, 0.0,  // x = 0
        0.3, 4.1, 9.0, 4.0, 0.1,  // x = 1
        0.4, 3.1, 6.0, 3.0, 0.2,  // x = 2
        0.5, 3.6, 8.0, 3.5, 0.3,  // x = 3
        0.1, 1.0, 0.8, 0.6, 0.4,  // x = 4
    };
}

/// Synthetic quadratic bowl on a grid: value = squared distance from the
/// grid center.
inline std::vector<double> bowl_values(const std::vector<int>& extents) {
    std::vector<double> values;
    std::vector<int> coord(extents.size(), 0);
    while (true) {
        double sum = 0.0;
        for (std::size_t i = 0; i < extents.size(); ++i) {
            const double offset = coord[i] - extents[i] / 2.0;
            sum += offset * offset;
        }
        values.push_back(sum);
        int axis = static_cast<int>(extents.size()) - 1;
        while (axis >= 0) {
            if (++coord[static_cast<std::size_t>(axis)] <= extents[static_cast<std::size_t>(axis)])
                break;
            coord[static_cast<std::size_t>(axis)] = 0;
            --axis;
        }
        if (axis < 0)
            break;
    }
    return values;
}

} // namespace fixtures

#endif // DMORSE_TESTS_FIXTURES_HPP
