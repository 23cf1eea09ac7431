#ifndef DMORSE_CELL_COMPLEX_HPP
#define DMORSE_CELL_COMPLEX_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmorse/errors.hpp"

namespace dmorse {

/// Dense cell identifier, unique within one complex.  Ids are assigned in a
/// canonical order by the builders (ascending dimension, then a per-builder
/// canonical key), so identical inputs always produce identical ids.
using CellId = std::int32_t;

inline constexpr CellId kNoCell = -1;

class GradientField; // morse.hpp

/// What the per-cell label payload means.
enum class LabelKind {
    None,       ///< no labels stored
    Simplicial, ///< label = sorted tuple of original vertex ids
    Cubical     ///< label = anchor coordinates followed by a direction bitmask
};

/// How much structure to verify when assembling a complex.
enum class ComplexCheck {
    Full,       ///< grading, transpose consistency, >= 2 faces per positive-dim cell
    Structural  ///< grading and transpose consistency only (duals may have 1-face cells)
};

/// A finite regular cell complex, stored abstractly: per-cell dimension plus
/// the codimension-1 face relation and its transpose.  Immutable once built;
/// safe for concurrent reads.
class CellComplex {
public:
    CellComplex() = default;

    /// Assemble from raw parts.  `faces[c]` lists the codimension-1 faces of
    /// cell c.  Cofaces are derived.  Throws MalformedInputError when the
    /// requested checks fail.
    static CellComplex from_parts(std::vector<int> dims,
                                  std::vector<std::vector<CellId>> faces,
                                  ComplexCheck check = ComplexCheck::Full,
                                  LabelKind label_kind = LabelKind::None,
                                  std::vector<std::vector<std::int64_t>> labels = {});

    int size() const { return static_cast<int>(dims_.size()); }
    int dimension() const { return dimension_; }
    int dim(CellId c) const { return dims_[static_cast<std::size_t>(c)]; }

    const std::vector<CellId>& faces(CellId c) const {
        return faces_[static_cast<std::size_t>(c)];
    }
    const std::vector<CellId>& cofaces(CellId c) const {
        return cofaces_[static_cast<std::size_t>(c)];
    }

    /// Number of cells of each dimension, indexed 0..dimension().
    const std::vector<int>& cells_per_dim() const { return cells_per_dim_; }

    LabelKind label_kind() const { return label_kind_; }
    const std::vector<std::int64_t>& label(CellId c) const {
        return labels_[static_cast<std::size_t>(c)];
    }
    const std::vector<std::vector<std::int64_t>>& labels() const { return labels_; }

    /// Look a cell up by its label; kNoCell when absent or unlabeled.
    CellId find_label(const std::vector<std::int64_t>& key) const;

    bool valid_cell(CellId c) const { return c >= 0 && c < size(); }

private:
    std::vector<int> dims_;
    std::vector<std::vector<CellId>> faces_;
    std::vector<std::vector<CellId>> cofaces_;
    std::vector<int> cells_per_dim_;
    int dimension_ = -1;
    LabelKind label_kind_ = LabelKind::None;
    std::vector<std::vector<std::int64_t>> labels_;
    std::map<std::vector<std::int64_t>, CellId> label_index_;
};

/// Size statistics of a complex, optionally with critical-cell counts of an
/// attached gradient field.
struct ComplexStats {
    int total_cells = 0;                  ///< m
    int dimension = -1;                   ///< n
    std::vector<int> cells_per_dim;       ///< m_d
    std::vector<double> mean_faces;       ///< r_d, mean codim-1 face count
    std::vector<double> mean_cofaces;     ///< p_d, mean codim-1 coface count
    double max_mean_cofaces = 0.0;        ///< p_max
    int total_critical = 0;               ///< c_t (0 when no field given)
    std::vector<int> critical_per_dim;    ///< c_d

    /// Alternating sum of cells_per_dim.
    long long euler_characteristic() const;
};

/// Build a simplicial complex from facet vertex lists.  All sub-simplices are
/// generated; identity is the sorted vertex tuple.  Cell ids go by ascending
/// (dimension, vertex tuple).
CellComplex build_simplicial(const std::vector<std::vector<std::int64_t>>& facets);

/// Build a grid cubical complex.  `extents[i]` counts top-dimensional cubes
/// along axis i, so the grid has extents[i]+1 vertex positions per axis and
/// prod(2*extents[i]+1) cells in total.  Dimensions above 6 are rejected
/// unless `allow_high_dimension`.
CellComplex build_cubical(const std::vector<int>& extents,
                          bool allow_high_dimension = false);

/// The combinatorial dual: same cell ids, dimension p becomes n-p, and the
/// face relation is transposed.  No geometric realization is implied; for a
/// complex with boundary the result can have cells with a single face.
CellComplex dual(const CellComplex& k);

/// Boundary subcomplex of an n-complex where every (n-1)-cell has one or two
/// n-cofaces.  Generated by the (n-1)-cells with exactly one n-coface
/// together with all of their iterated faces.
struct BoundarySubcomplex {
    CellComplex complex;             ///< the boundary as its own complex
    std::vector<CellId> to_parent;   ///< boundary id -> parent id (injective)
    std::vector<CellId> from_parent; ///< parent id -> boundary id or kNoCell

    bool empty() const { return complex.size() == 0; }
};

BoundarySubcomplex boundary_subcomplex(const CellComplex& k);

/// Exact size statistics; critical counts filled when a field is given.
ComplexStats stats(const CellComplex& k, const GradientField* field = nullptr);

} // namespace dmorse

#endif // DMORSE_CELL_COMPLEX_HPP
