#ifndef DMORSE_TESTS_GENERATORS_HPP
#define DMORSE_TESTS_GENERATORS_HPP

#include <random>
#include <vector>

#include "support/fixtures.hpp"

namespace generators {

using Rng = std::mt19937_64;
using fixtures::Facets;

/// Split `times` random triangles into three around a fresh vertex.  Keeps
/// the surface type of the triangulation.
inline Facets subdivide(Facets facets, Rng& rng, int times) {
    std::int64_t next_vertex = 0;
    for (const auto& f : facets)
        for (std::int64_t v : f)
            next_vertex = std::max(next_vertex, v + 1);

    for (int step = 0; step < times; ++step) {
        std::uniform_int_distribution<std::size_t> pick(0, facets.size() - 1);
        const std::size_t at = pick(rng);
        const auto f = facets[at];
        facets.erase(facets.begin() + static_cast<std::ptrdiff_t>(at));
        const std::int64_t v = next_vertex++;
        facets.push_back({f[0], f[1], v});
        facets.push_back({f[1], f[2], v});
        facets.push_back({f[0], f[2], v});
    }
    return facets;
}

inline Facets random_sphere(Rng& rng, int subdivisions) {
    return subdivide(fixtures::octahedron_facets(), rng, subdivisions);
}

inline Facets random_torus(Rng& rng, int subdivisions) {
    return subdivide(fixtures::torus_facets(), rng, subdivisions);
}

inline std::vector<double> random_values(Rng& rng, std::size_t n) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> values(n);
    for (double& v : values)
        v = dist(rng);
    return values;
}

inline std::vector<int> random_extents(Rng& rng, int dimension, int max_extent) {
    std::uniform_int_distribution<int> dist(1, max_extent);
    std::vector<int> extents(static_cast<std::size_t>(dimension));
    for (int& e : extents)
        e = dist(rng);
    return extents;
}

} // namespace generators

#endif // DMORSE_TESTS_GENERATORS_HPP
