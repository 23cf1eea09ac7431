#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "dmorse/regions.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace dmorse;

namespace {

std::set<CellId> cell_set(const Region& r) {
    return {r.cells.begin(), r.cells.end()};
}

const Region& region_of(const std::vector<Region>& regions, CellId critical) {
    for (const Region& r : regions)
        if (r.critical == critical)
            return r;
    REQUIRE(false);
    static Region dummy;
    return dummy;
}

std::size_t vertex_count(const CellComplex& k) {
    std::size_t n = 0;
    for (CellId c = 0; c < k.size(); ++c)
        n += k.dim(c) == 0;
    return n;
}

GradientField random_field(const CellComplex& k, generators::Rng& rng) {
    return extend_from_vertex_values(k, generators::random_values(rng, vertex_count(k)));
}

void check_region_invariants(const CellComplex& k, const GradientField& v,
                             const std::vector<Region>& regions) {
    for (const Region& r : regions) {
        CHECK(r.contains(r.critical));
        const int p = k.dim(r.critical);
        for (CellId c : r.frame) {
            CHECK(r.contains(c));
            CHECK((k.dim(c) == p || k.dim(c) == p - 1));
        }
        for (CellId c : r.cells) {
            if (!r.via_boundary)
                CHECK(k.dim(c) <= p);
            if (c != r.critical)
                CHECK_FALSE(v.is_critical(c)); // no foreign critical cells
        }
    }
}

} // namespace

TEST_CASE("frame of a minimum is empty") {
    const auto fx = fixtures::two_minima_circle();
    CHECK(descending_frame(fx.complex, fx.field, fx.min_a).empty());
    CHECK_THROWS_AS(descending_frame(fx.complex, fx.field, 1), ContractError);
}

TEST_CASE("frames of the circle saddles are their arcs") {
    const auto fx = fixtures::two_minima_circle();
    const CellComplex& k = fx.complex;
    const auto frame_a = descending_frame(k, fx.field, fx.saddle_a);
    CHECK(std::set<CellId>(frame_a.begin(), frame_a.end()) ==
          std::set<CellId>{1, fixtures::edge(k, 0, 1)});
    const auto frame_b = descending_frame(k, fx.field, fx.saddle_b);
    CHECK(std::set<CellId>(frame_b.begin(), frame_b.end()) ==
          std::set<CellId>{3, fixtures::edge(k, 2, 3)});
}

TEST_CASE("frame of the single maximum covers the whole circle") {
    auto fx = fixtures::two_minima_circle();
    const GradientField v = cancel(fx.complex, fx.field, fx.saddle_a, fx.min_b);
    const auto frame = descending_frame(fx.complex, v, fx.saddle_b);
    CHECK(frame.size() == 6u); // three vertices and three edges swept twice around
}

TEST_CASE("regions of the dimension function are singletons") {
    const CellComplex k = build_simplicial(fixtures::unit_square_facets());
    const GradientField v = GradientField::from_pairs(k, {});
    const auto regions = descending_regions(k, v);
    REQUIRE(static_cast<int>(regions.size()) == k.size());
    for (const Region& r : regions)
        CHECK(r.cells == std::vector<CellId>{r.critical});
}

TEST_CASE("interior pipeline of the x+y square is a single singleton region") {
    const CellComplex k = build_simplicial(fixtures::unit_square_facets());
    const GradientField v = extend_from_vertex_values(k, fixtures::unit_square_xy_values());
    const auto regions = descending_regions(k, v);
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].critical == 0);
    CHECK(regions[0].cells == std::vector<CellId>{0});
}

TEST_CASE("two-minima circle decomposes into two singletons and two arcs") {
    const auto fx = fixtures::two_minima_circle();
    const CellComplex& k = fx.complex;
    const auto regions = descending_regions(k, fx.field);
    REQUIRE(regions.size() == 4);
    CHECK(cell_set(region_of(regions, fx.min_a)) == std::set<CellId>{fx.min_a});
    CHECK(cell_set(region_of(regions, fx.min_b)) == std::set<CellId>{fx.min_b});
    CHECK(cell_set(region_of(regions, fx.saddle_a)) ==
          std::set<CellId>{fx.saddle_a, 1, fixtures::edge(k, 0, 1)});
    CHECK(cell_set(region_of(regions, fx.saddle_b)) ==
          std::set<CellId>{fx.saddle_b, 3, fixtures::edge(k, 2, 3)});
    check_region_invariants(k, fx.field, regions);
}

TEST_CASE("completion requires the lower regions") {
    const auto fx = fixtures::merge_fixture();
    const auto frame = descending_frame(fx.complex, fx.field, fx.saddle);
    CHECK_THROWS_AS(
        complete_region(fx.complex, fx.field, fx.saddle, frame, {}), ContractError);

    // With the vertex regions supplied the build goes through.
    std::vector<Region> lower;
    for (CellId c : fx.field.critical())
        if (fx.complex.dim(c) == 0) {
            Region r;
            r.critical = c;
            r.cells = {c};
            lower.push_back(r);
        }
    const Region region = complete_region(fx.complex, fx.field, fx.saddle, frame, lower);
    CHECK(region.contains(fx.saddle));
    CHECK(region.cells.size() == frame.size() + 1);
}

TEST_CASE("within-dimension processing order does not change the regions") {
    generators::Rng rng(29);
    for (int round = 0; round < 6; ++round) {
        CellComplex k;
        if (round % 2 == 0)
            k = build_simplicial(generators::random_sphere(rng, 10));
        else
            k = build_cubical(generators::random_extents(rng, 2, 6));
        const GradientField v = random_field(k, rng);

        RegionOptions forward, backward;
        backward.same_dim_descending_ids = true;
        auto lhs = descending_regions(k, v, forward);
        auto rhs = descending_regions(k, v, backward);
        std::sort(lhs.begin(), lhs.end(),
                  [](const Region& a, const Region& b) { return a.critical < b.critical; });
        std::sort(rhs.begin(), rhs.end(),
                  [](const Region& a, const Region& b) { return a.critical < b.critical; });
        REQUIRE(lhs.size() == rhs.size());
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            CHECK(lhs[i].critical == rhs[i].critical);
            CHECK(lhs[i].cells == rhs[i].cells);
        }
    }
}

TEST_CASE("threaded region building matches the serial result") {
    generators::Rng rng(31);
    const CellComplex k = build_cubical({6, 6});
    const GradientField v = random_field(k, rng);
    const auto serial = descending_regions(k, v);
    RegionOptions opts;
    opts.threads = 4;
    const auto parallel = descending_regions(k, v, opts);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].critical == parallel[i].critical);
        CHECK(serial[i].cells == parallel[i].cells);
    }
}

TEST_CASE("boundary regions of the x+y square sweep everything but the minimum") {
    const CellComplex k = build_simplicial(fixtures::unit_square_facets());
    const std::vector<double> values = fixtures::unit_square_xy_values();
    const BoundarySubcomplex boundary = boundary_subcomplex(k);
    const GradientField v = extend_from_vertex_values(k, values, &boundary);
    REQUIRE(v.critical() == std::vector<CellId>{0});

    const GradientField vb = derive_boundary_field(k, boundary, v, &values);
    const auto interior = descending_regions(k, v);
    const auto extra = boundary_regions(k, v, vb, boundary, interior);

    REQUIRE(extra.size() == 1);
    const Region& mu = extra[0];
    CHECK(mu.via_boundary);
    CHECK(k.dim(mu.critical) == 1);
    // The region is the entire square without the minimum vertex.
    std::set<CellId> expected;
    for (CellId c = 1; c < k.size(); ++c)
        expected.insert(c);
    CHECK(cell_set(mu) == expected);
}

TEST_CASE("boundary pipeline on the interval keeps only the minimum out") {
    const CellComplex k = build_simplicial({{0, 1}});
    const std::vector<double> values{0.0, 1.0};
    const BoundarySubcomplex boundary = boundary_subcomplex(k);
    REQUIRE(boundary.complex.size() == 2); // two isolated vertices
    const GradientField v = extend_from_vertex_values(k, values, &boundary);
    const GradientField vb = derive_boundary_field(k, boundary, v, &values);
    const auto interior = descending_regions(k, v);
    const auto extra = boundary_regions(k, v, vb, boundary, interior);
    REQUIRE(extra.size() == 1);
    CHECK(extra[0].critical == 1);
    CHECK(cell_set(extra[0]) == std::set<CellId>{1, fixtures::edge(k, 0, 1)});
}

TEST_CASE("closed complexes produce no boundary regions") {
    const auto fx = fixtures::merge_fixture();
    const BoundarySubcomplex boundary = boundary_subcomplex(fx.complex);
    CHECK(boundary.empty());
    const auto interior = descending_regions(fx.complex, fx.field);
    const GradientField vb = derive_boundary_field(fx.complex, boundary, fx.field, nullptr);
    CHECK(boundary_regions(fx.complex, fx.field, vb, boundary, interior).empty());
}

TEST_CASE("incompatible boundary fields are rejected") {
    const CellComplex k = build_simplicial(fixtures::unit_square_facets());
    const std::vector<double> values = fixtures::unit_square_xy_values();
    const BoundarySubcomplex boundary = boundary_subcomplex(k);
    const GradientField v = extend_from_vertex_values(k, values, &boundary);
    // A boundary field missing every pair contradicts the global pairs that
    // lie inside the boundary.
    const GradientField empty_vb = GradientField::from_pairs(boundary.complex, {});
    const auto interior = descending_regions(k, v);
    CHECK_THROWS_AS(boundary_regions(k, v, empty_vb, boundary, interior), ContractError);
}

TEST_CASE("ascending regions of the dimension function are singletons") {
    const CellComplex k = build_simplicial(fixtures::unit_square_facets());
    const GradientField v = GradientField::from_pairs(k, {});
    const auto regions = ascending_regions(k, v);
    REQUIRE(static_cast<int>(regions.size()) == k.size());
    for (const Region& r : regions) {
        CHECK(r.kind == RegionKind::Ascending);
        CHECK(r.cells == std::vector<CellId>{r.critical});
    }
}

TEST_CASE("ascending regions of the two-minima circle") {
    const auto fx = fixtures::two_minima_circle();
    const CellComplex& k = fx.complex;
    const auto regions = ascending_regions(k, fx.field);
    REQUIRE(regions.size() == 4);
    CHECK(cell_set(region_of(regions, fx.min_a)) ==
          std::set<CellId>{fx.min_a, 1, fixtures::edge(k, 0, 1)});
    CHECK(cell_set(region_of(regions, fx.min_b)) ==
          std::set<CellId>{fx.min_b, 3, fixtures::edge(k, 2, 3)});
    CHECK(cell_set(region_of(regions, fx.saddle_a)) == std::set<CellId>{fx.saddle_a});
    CHECK(cell_set(region_of(regions, fx.saddle_b)) == std::set<CellId>{fx.saddle_b});
}

TEST_CASE("critical index flips under the duality") {
    generators::Rng rng(37);
    const CellComplex k = build_simplicial(generators::random_sphere(rng, 8));
    const GradientField v = random_field(k, rng);
    const CellComplex kd = dual(k);
    std::vector<std::pair<CellId, CellId>> reversed;
    for (const auto& [tail, head] : v.pairs())
        reversed.emplace_back(head, tail);
    const GradientField vd = GradientField::from_pairs(kd, reversed);
    CHECK(vd.critical() == v.critical());
    for (CellId c : v.critical())
        CHECK(kd.dim(c) == k.dimension() - k.dim(c));
    CHECK(validate_field(kd, vd).ok);
}

TEST_CASE("morse-smale labels of the two-minima circle") {
    const auto fx = fixtures::two_minima_circle();
    const CellComplex& k = fx.complex;
    const Decomposition d = morse_smale(k, fx.field);

    using Label = std::vector<std::pair<CellId, CellId>>;
    CHECK(d.label(fx.min_a) == Label{{fx.min_a, fx.min_a}});
    CHECK(d.label(fx.min_b) == Label{{fx.min_b, fx.min_b}});
    CHECK(d.label(fx.saddle_a) == Label{{fx.saddle_a, fx.saddle_a}});
    CHECK(d.label(fx.saddle_b) == Label{{fx.saddle_b, fx.saddle_b}});
    CHECK(d.label(1) == Label{{fx.saddle_a, fx.min_a}});
    CHECK(d.label(fixtures::edge(k, 0, 1)) == Label{{fx.saddle_a, fx.min_a}});
    CHECK(d.label(3) == Label{{fx.saddle_b, fx.min_b}});
    CHECK(d.label(fixtures::edge(k, 2, 3)) == Label{{fx.saddle_b, fx.min_b}});

    CHECK(d.uncovered(RegionKind::Descending).empty());
    CHECK(d.uncovered(RegionKind::Ascending).empty());
}

TEST_CASE("morse-smale with the dimension function labels every cell by itself") {
    const CellComplex k = build_simplicial({{0, 1, 2}});
    const Decomposition d = morse_smale(k, GradientField::from_pairs(k, {}));
    for (CellId c = 0; c < k.size(); ++c) {
        const auto label = d.label(c);
        REQUIRE(label.size() == 1);
        CHECK(label[0] == std::pair<CellId, CellId>{c, c});
    }
}

TEST_CASE("coverage of both kinds on the bounded square pipeline") {
    const CellComplex k = build_simplicial(fixtures::triangulated_grid_facets(3));
    const std::vector<double> values = fixtures::grid_xy_values(3);
    const BoundarySubcomplex boundary = boundary_subcomplex(k);
    const GradientField v = extend_from_vertex_values(k, values, &boundary);

    DecompositionOptions opts;
    opts.with_boundary = true;
    opts.vertex_values = &values;
    const Decomposition d = morse_smale(k, v, opts);
    CHECK(d.uncovered(RegionKind::Descending).empty());
    CHECK(d.uncovered(RegionKind::Ascending).empty());
}

TEST_CASE("merge detection on the octahedron fixture") {
    const auto fx = fixtures::merge_fixture();
    const CellComplex& k = fx.complex;
    REQUIRE(validate_field(k, fx.field).ok);

    const auto regions = descending_regions(k, fx.field);
    const Region& saddle_region = region_of(regions, fx.saddle);
    const auto merges = detect_merges(k, fx.field, saddle_region);
    REQUIRE(merges.size() == 1);
    CHECK(merges[0].cell == fx.merge_cell);
    CHECK(merges[0].incoming ==
          std::vector<CellId>{fixtures::edge(k, 2, 3), fixtures::edge(k, 3, 4)});

    // The saddle region is a loop plus a whisker: not collapsible.
    CHECK_FALSE(oracles::collapses_to(k, saddle_region.cells, fx.saddle));
}

TEST_CASE("top regions have no merges") {
    generators::Rng rng(43);
    const CellComplex k = build_simplicial(generators::random_sphere(rng, 8));
    const GradientField v = random_field(k, rng);
    const auto regions = descending_regions(k, v);
    for (const Region& r : regions)
        if (k.dim(r.critical) == k.dimension())
            CHECK(detect_merges(k, v, r).empty());
}

TEST_CASE("dimension-function regions have no merges") {
    const CellComplex k = build_simplicial(fixtures::octahedron_facets());
    const GradientField v = GradientField::from_pairs(k, {});
    for (const Region& r : descending_regions(k, v))
        CHECK(detect_merges(k, v, r).empty());
}

TEST_CASE("one push moves the merge point off the saddle region") {
    const auto fx = fixtures::merge_fixture();
    const CellComplex& k = fx.complex;
    const auto regions = descending_regions(k, fx.field);
    const auto merges = detect_merges(k, fx.field, region_of(regions, fx.saddle));
    REQUIRE(merges.size() == 1);

    const PushResult pushed = push_merge(k, fx.field, merges[0]);
    CHECK(pushed.complex.size() == k.size() + 4);
    CHECK(validate_field(pushed.complex, pushed.field).ok);
    CHECK(pushed.field.critical() == fx.field.critical()); // critical set unchanged
    CHECK(pushed.complex.dim(pushed.tail_copy) == 0);
    CHECK(pushed.complex.dim(pushed.connector) == 1);
    CHECK(pushed.field.partner_up(pushed.connector) == pushed.connector_head);

    const auto regions2 = descending_regions(pushed.complex, pushed.field);
    const Region& saddle_region = region_of(regions2, fx.saddle);
    CHECK(detect_merges(pushed.complex, pushed.field, saddle_region).empty());
    CHECK(oracles::collapses_to(pushed.complex, saddle_region.cells, fx.saddle));
}

TEST_CASE("repair terminates with an unchanged critical set and disk regions") {
    const auto fx = fixtures::merge_fixture();
    const RepairResult repaired = repair_to_disks(fx.complex, fx.field);
    CHECK_FALSE(repaired.report.exhausted);
    CHECK(repaired.report.residual.empty());
    CHECK(repaired.report.steps >= 1);
    CHECK(repaired.field.critical() == fx.field.critical());

    const auto regions = descending_regions(repaired.complex, repaired.field);
    for (const Region& r : regions) {
        CHECK(detect_merges(repaired.complex, repaired.field, r).empty());
        CHECK(oracles::collapses_to(repaired.complex, r.cells, r.critical));
    }
}

TEST_CASE("repair on a merge-free field does nothing") {
    const CellComplex k = build_simplicial(fixtures::octahedron_facets());
    const GradientField v = GradientField::from_pairs(k, {});
    const RepairResult repaired = repair_to_disks(k, v);
    CHECK(repaired.report.steps == 0);
    CHECK(repaired.complex.size() == k.size());
}

TEST_CASE("repair refuses bounded complexes") {
    const CellComplex k = build_simplicial(fixtures::unit_square_facets());
    const GradientField v = extend_from_vertex_values(k, fixtures::unit_square_xy_values());
    CHECK_THROWS_AS(repair_to_disks(k, v), ContractError);
}

TEST_CASE("region properties on random closed surfaces") {
    generators::Rng rng(53);
    for (int round = 0; round < 6; ++round) {
        const CellComplex k = build_simplicial(
            round % 2 == 0 ? generators::random_sphere(rng, 10)
                           : generators::random_torus(rng, 8));
        const GradientField v = random_field(k, rng);
        const Decomposition d = morse_smale(k, v);
        check_region_invariants(k, v, d.descending);
        CHECK(d.uncovered(RegionKind::Descending).empty());
        CHECK(d.uncovered(RegionKind::Ascending).empty());

        // Top regions are pairwise disjoint and collapse onto their cells.
        std::set<CellId> seen;
        for (const Region& r : d.descending) {
            if (k.dim(r.critical) != k.dimension())
                continue;
            for (CellId c : r.cells) {
                CHECK(seen.insert(c).second);
            }
            CHECK(oracles::collapses_to(k, r.cells, r.critical));
        }
    }
}
