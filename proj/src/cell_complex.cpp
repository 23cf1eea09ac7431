#include "dmorse/cell_complex.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "dmorse/morse.hpp"

namespace dmorse {

namespace {

std::string cell_str(CellId c) { return std::to_string(c); }

} // namespace

long long ComplexStats::euler_characteristic() const {
    long long chi = 0;
    for (std::size_t d = 0; d < cells_per_dim.size(); ++d)
        chi += (d % 2 == 0 ? 1 : -1) * static_cast<long long>(cells_per_dim[d]);
    return chi;
}

CellComplex CellComplex::from_parts(std::vector<int> dims,
                                    std::vector<std::vector<CellId>> faces,
                                    ComplexCheck check,
                                    LabelKind label_kind,
                                    std::vector<std::vector<std::int64_t>> labels) {
    const auto n_cells = dims.size();
    if (faces.size() != n_cells)
        throw MalformedInputError("cell/face table size mismatch");
    if (!labels.empty() && labels.size() != n_cells)
        throw MalformedInputError("label table size mismatch");

    CellComplex k;
    k.dims_ = std::move(dims);
    k.faces_ = std::move(faces);
    k.label_kind_ = labels.empty() ? LabelKind::None : label_kind;
    k.labels_ = std::move(labels);
    if (k.labels_.empty())
        k.labels_.resize(n_cells);

    k.dimension_ = -1;
    for (std::size_t c = 0; c < n_cells; ++c) {
        if (k.dims_[c] < 0)
            throw MalformedInputError("negative cell dimension at cell " + cell_str(static_cast<CellId>(c)));
        k.dimension_ = std::max(k.dimension_, k.dims_[c]);
    }

    k.cells_per_dim_.assign(static_cast<std::size_t>(k.dimension_) + 1, 0);
    if (n_cells == 0)
        k.cells_per_dim_.clear();
    for (std::size_t c = 0; c < n_cells; ++c)
        ++k.cells_per_dim_[static_cast<std::size_t>(k.dims_[c])];

    // Grading, id range, duplicate faces.
    for (std::size_t c = 0; c < n_cells; ++c) {
        auto& fl = k.faces_[c];
        std::sort(fl.begin(), fl.end());
        if (std::adjacent_find(fl.begin(), fl.end()) != fl.end())
            throw MalformedInputError("duplicate face entry on cell " + cell_str(static_cast<CellId>(c)));
        for (CellId f : fl) {
            if (f < 0 || static_cast<std::size_t>(f) >= n_cells)
                throw MalformedInputError("face id out of range on cell " + cell_str(static_cast<CellId>(c)));
            if (k.dims_[static_cast<std::size_t>(f)] != k.dims_[c] - 1)
                throw MalformedInputError("face relation violates dimension grading between cells " +
                                          cell_str(static_cast<CellId>(c)) + " and " + cell_str(f));
        }
        if (check == ComplexCheck::Full && k.dims_[c] >= 1 && fl.size() < 2)
            throw MalformedInputError("cell " + cell_str(static_cast<CellId>(c)) +
                                      " of positive dimension has fewer than 2 faces");
    }

    k.cofaces_.assign(n_cells, {});
    for (std::size_t c = 0; c < n_cells; ++c)
        for (CellId f : k.faces_[c])
            k.cofaces_[static_cast<std::size_t>(f)].push_back(static_cast<CellId>(c));
    for (auto& cl : k.cofaces_)
        std::sort(cl.begin(), cl.end());

    if (k.label_kind_ != LabelKind::None) {
        for (std::size_t c = 0; c < n_cells; ++c) {
            if (!k.labels_[c].empty())
                k.label_index_.emplace(k.labels_[c], static_cast<CellId>(c));
        }
    }
    return k;
}

CellId CellComplex::find_label(const std::vector<std::int64_t>& key) const {
    auto it = label_index_.find(key);
    return it == label_index_.end() ? kNoCell : it->second;
}

CellComplex build_simplicial(const std::vector<std::vector<std::int64_t>>& facets) {
    if (facets.empty())
        throw MalformedInputError("facet list is empty");

    // Collect every sub-simplex of every facet, keyed by its sorted vertex
    // tuple for canonical identity.
    std::set<std::vector<std::int64_t>> simplices;
    for (const auto& facet : facets) {
        if (facet.empty())
            throw MalformedInputError("empty facet");
        std::vector<std::int64_t> verts = facet;
        for (std::int64_t v : verts)
            if (v < 0)
                throw MalformedInputError("negative vertex id in facet");
        std::sort(verts.begin(), verts.end());
        if (std::adjacent_find(verts.begin(), verts.end()) != verts.end())
            throw MalformedInputError("facet contains a repeated vertex");

        const std::size_t nv = verts.size();
        // Every nonempty subset is a face of the facet.
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << nv); ++mask) {
            std::vector<std::int64_t> sub;
            for (std::size_t i = 0; i < nv; ++i)
                if (mask & (std::uint64_t{1} << i))
                    sub.push_back(verts[i]);
            simplices.insert(std::move(sub));
        }
    }

    // Ids ascend by (dimension, vertex tuple).
    std::vector<std::vector<std::int64_t>> ordered(simplices.begin(), simplices.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) {
                         if (a.size() != b.size())
                             return a.size() < b.size();
                         return a < b;
                     });

    std::map<std::vector<std::int64_t>, CellId> ids;
    for (std::size_t i = 0; i < ordered.size(); ++i)
        ids.emplace(ordered[i], static_cast<CellId>(i));

    std::vector<int> dims(ordered.size());
    std::vector<std::vector<CellId>> faces(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const auto& verts = ordered[i];
        dims[i] = static_cast<int>(verts.size()) - 1;
        if (verts.size() > 1) {
            for (std::size_t drop = 0; drop < verts.size(); ++drop) {
                std::vector<std::int64_t> sub;
                sub.reserve(verts.size() - 1);
                for (std::size_t j = 0; j < verts.size(); ++j)
                    if (j != drop)
                        sub.push_back(verts[j]);
                faces[i].push_back(ids.at(sub));
            }
        }
    }
    return CellComplex::from_parts(std::move(dims), std::move(faces),
                                   ComplexCheck::Full, LabelKind::Simplicial,
                                   std::move(ordered));
}

CellComplex build_cubical(const std::vector<int>& extents, bool allow_high_dimension) {
    if (extents.empty())
        throw MalformedInputError("cubical extents are empty");
    if (extents.size() > 6 && !allow_high_dimension)
        throw MalformedInputError("cubical dimension " + std::to_string(extents.size()) +
                                  " exceeds the practical cap of 6");
    for (int e : extents)
        if (e <= 0)
            throw MalformedInputError("cubical extent must be positive");

    const int d = static_cast<int>(extents.size());

    // A cell is (anchor, mask): the mask marks axes along which the cell
    // spans [anchor_i, anchor_i+1]; other axes are pinned at anchor_i.
    struct Cube {
        std::vector<std::int64_t> anchor;
        std::uint32_t mask;
    };
    std::vector<Cube> cubes;

    std::vector<std::int64_t> anchor(static_cast<std::size_t>(d), 0);
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        // Enumerate anchors in row-major order for this mask.
        std::fill(anchor.begin(), anchor.end(), 0);
        while (true) {
            bool ok = true;
            for (int i = 0; i < d; ++i) {
                const std::int64_t limit = (mask & (1u << i)) ? extents[static_cast<std::size_t>(i)] - 1
                                                              : extents[static_cast<std::size_t>(i)];
                if (anchor[static_cast<std::size_t>(i)] > limit) { ok = false; break; }
            }
            if (ok)
                cubes.push_back({anchor, mask});

            int axis = d - 1;
            while (axis >= 0) {
                ++anchor[static_cast<std::size_t>(axis)];
                const std::int64_t limit = (mask & (1u << axis)) ? extents[static_cast<std::size_t>(axis)] - 1
                                                                 : extents[static_cast<std::size_t>(axis)];
                if (anchor[static_cast<std::size_t>(axis)] <= limit)
                    break;
                anchor[static_cast<std::size_t>(axis)] = 0;
                --axis;
            }
            if (axis < 0)
                break;
        }
    }

    auto popcount = [](std::uint32_t m) {
        int n = 0;
        while (m) { n += static_cast<int>(m & 1u); m >>= 1; }
        return n;
    };

    // Ids ascend by (dimension, mask, anchor); vertices come out in plain
    // row-major order, which the grid raster format relies on.
    std::stable_sort(cubes.begin(), cubes.end(), [&](const Cube& a, const Cube& b) {
        const int da = popcount(a.mask), db = popcount(b.mask);
        if (da != db) return da < db;
        if (a.mask != b.mask) return a.mask < b.mask;
        return a.anchor < b.anchor;
    });

    std::map<std::vector<std::int64_t>, CellId> ids;
    std::vector<std::vector<std::int64_t>> labels(cubes.size());
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        labels[i] = cubes[i].anchor;
        labels[i].push_back(static_cast<std::int64_t>(cubes[i].mask));
        ids.emplace(labels[i], static_cast<CellId>(i));
    }

    std::vector<int> dims(cubes.size());
    std::vector<std::vector<CellId>> faces(cubes.size());
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        dims[i] = popcount(cubes[i].mask);
        for (int axis = 0; axis < d; ++axis) {
            if (!(cubes[i].mask & (1u << axis)))
                continue;
            // Pin this axis at either end to get the two codim-1 faces.
            for (int side = 0; side <= 1; ++side) {
                std::vector<std::int64_t> key = cubes[i].anchor;
                key[static_cast<std::size_t>(axis)] += side;
                key.push_back(static_cast<std::int64_t>(cubes[i].mask & ~(1u << axis)));
                faces[i].push_back(ids.at(key));
            }
        }
    }
    return CellComplex::from_parts(std::move(dims), std::move(faces),
                                   ComplexCheck::Full, LabelKind::Cubical,
                                   std::move(labels));
}

CellComplex dual(const CellComplex& k) {
    const int n = k.dimension();
    std::vector<int> dims(static_cast<std::size_t>(k.size()));
    std::vector<std::vector<CellId>> faces(static_cast<std::size_t>(k.size()));
    for (CellId c = 0; c < k.size(); ++c) {
        dims[static_cast<std::size_t>(c)] = n - k.dim(c);
        faces[static_cast<std::size_t>(c)] = k.cofaces(c);
    }
    // Purely combinatorial: duals of bounded complexes may have 1-face cells.
    return CellComplex::from_parts(std::move(dims), std::move(faces),
                                   ComplexCheck::Structural);
}

BoundarySubcomplex boundary_subcomplex(const CellComplex& k) {
    const int n = k.dimension();
    std::vector<char> selected(static_cast<std::size_t>(k.size()), 0);

    for (CellId c = 0; c < k.size(); ++c) {
        if (k.dim(c) != n - 1)
            continue;
        const std::size_t nc = k.cofaces(c).size();
        if (nc > 2)
            throw NotPseudoManifoldError("cell " + cell_str(c) + " of codimension 1 has " +
                                         std::to_string(nc) + " top cofaces");
        if (nc == 1)
            selected[static_cast<std::size_t>(c)] = 1;
    }

    // Close under faces.
    std::vector<CellId> stack;
    for (CellId c = 0; c < k.size(); ++c)
        if (selected[static_cast<std::size_t>(c)])
            stack.push_back(c);
    while (!stack.empty()) {
        const CellId c = stack.back();
        stack.pop_back();
        for (CellId f : k.faces(c)) {
            if (!selected[static_cast<std::size_t>(f)]) {
                selected[static_cast<std::size_t>(f)] = 1;
                stack.push_back(f);
            }
        }
    }

    BoundarySubcomplex out;
    out.from_parent.assign(static_cast<std::size_t>(k.size()), kNoCell);
    for (CellId c = 0; c < k.size(); ++c) {
        if (selected[static_cast<std::size_t>(c)]) {
            out.from_parent[static_cast<std::size_t>(c)] =
                static_cast<CellId>(out.to_parent.size());
            out.to_parent.push_back(c);
        }
    }

    std::vector<int> dims(out.to_parent.size());
    std::vector<std::vector<CellId>> faces(out.to_parent.size());
    std::vector<std::vector<std::int64_t>> labels(out.to_parent.size());
    for (std::size_t i = 0; i < out.to_parent.size(); ++i) {
        const CellId parent = out.to_parent[i];
        dims[i] = k.dim(parent);
        labels[i] = k.label(parent);
        for (CellId f : k.faces(parent))
            faces[i].push_back(out.from_parent[static_cast<std::size_t>(f)]);
    }
    out.complex = CellComplex::from_parts(std::move(dims), std::move(faces),
                                          ComplexCheck::Full, k.label_kind(),
                                          std::move(labels));
    return out;
}

ComplexStats stats(const CellComplex& k, const GradientField* field) {
    ComplexStats s;
    s.total_cells = k.size();
    s.dimension = k.dimension();
    s.cells_per_dim = k.cells_per_dim();
    const std::size_t nd = s.cells_per_dim.size();
    s.mean_faces.assign(nd, 0.0);
    s.mean_cofaces.assign(nd, 0.0);

    for (CellId c = 0; c < k.size(); ++c) {
        const auto d = static_cast<std::size_t>(k.dim(c));
        s.mean_faces[d] += static_cast<double>(k.faces(c).size());
        s.mean_cofaces[d] += static_cast<double>(k.cofaces(c).size());
    }
    for (std::size_t d = 0; d < nd; ++d) {
        if (s.cells_per_dim[d] > 0) {
            s.mean_faces[d] /= s.cells_per_dim[d];
            s.mean_cofaces[d] /= s.cells_per_dim[d];
        }
        s.max_mean_cofaces = std::max(s.max_mean_cofaces, s.mean_cofaces[d]);
    }

    s.critical_per_dim.assign(nd, 0);
    if (field != nullptr) {
        for (CellId c : field->critical()) {
            ++s.critical_per_dim[static_cast<std::size_t>(k.dim(c))];
            ++s.total_critical;
        }
    }
    return s;
}

} // namespace dmorse
