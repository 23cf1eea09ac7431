#ifndef DMORSE_MORSE_HPP
#define DMORSE_MORSE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmorse/cell_complex.hpp"

namespace dmorse {

/// A real value per cell.  Whether it satisfies the local pairing conditions
/// is checked by ab_counts/classify, not by construction.
class MorseFunction {
public:
    explicit MorseFunction(std::vector<double> values) : values_(std::move(values)) {}

    double operator()(CellId c) const { return values_[static_cast<std::size_t>(c)]; }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

/// The local counts that decide whether a cell is regular or critical:
/// `upper_faces`  = number of codim-1 faces with value >= the cell's value,
/// `lower_cofaces` = number of codim-1 cofaces with value <= the cell's value.
/// Both must be at most 1, and never both 1, for a well-formed function.
struct AbCounts {
    int lower_cofaces = 0; ///< a
    int upper_faces = 0;   ///< b
};

AbCounts ab_counts(const CellComplex& k, const MorseFunction& f, CellId cell);

/// A discrete gradient vector field: an injective pairing of regular cells
/// (tail of dimension p to head of dimension p+1) whose unpaired cells form
/// the critical set.  Immutable value type.
class GradientField {
public:
    GradientField() = default;

    /// Build from (tail, head) pairs.  Verifies incidence, grading and
    /// injectivity; acyclicity is checked separately by validate_field.
    static GradientField from_pairs(const CellComplex& k,
                                    const std::vector<std::pair<CellId, CellId>>& pairs);

    /// Build without any verification (for constructing deliberately broken
    /// fields in validation tests).
    static GradientField from_pairs_unchecked(const CellComplex& k,
                                              const std::vector<std::pair<CellId, CellId>>& pairs);

    int size() const { return static_cast<int>(pair_up_.size()); }

    /// Head paired above a tail cell, or kNoCell.
    CellId partner_up(CellId c) const { return pair_up_[static_cast<std::size_t>(c)]; }
    /// Tail paired below a head cell, or kNoCell.
    CellId partner_down(CellId c) const { return pair_down_[static_cast<std::size_t>(c)]; }

    bool in_a(CellId c) const { return partner_up(c) != kNoCell; }
    bool in_b(CellId c) const { return partner_down(c) != kNoCell; }
    bool is_critical(CellId c) const { return !in_a(c) && !in_b(c); }

    /// Critical cells in ascending id order.
    const std::vector<CellId>& critical() const { return critical_; }
    /// All (tail, head) pairs, ascending by tail.
    std::vector<std::pair<CellId, CellId>> pairs() const;
    std::size_t pair_count() const { return n_pairs_; }

private:
    std::vector<CellId> pair_up_;
    std::vector<CellId> pair_down_;
    std::vector<CellId> critical_;
    std::size_t n_pairs_ = 0;

    static GradientField assemble(const CellComplex& k,
                                  const std::vector<std::pair<CellId, CellId>>& pairs,
                                  bool check);
};

/// Derive the gradient field of a well-formed cell function: cells with both
/// counts zero are critical, the rest pair with their unique witness.
/// Throws NotMorseError when a count exceeds 1 or both counts are 1.
GradientField classify(const CellComplex& k, const MorseFunction& f);

/// Structured validation of a field against its complex.
struct FieldViolation {
    enum class Kind { Partition, Grading, Incidence, Cycle };
    Kind kind;
    std::string message;
    std::vector<CellId> cells;
};

struct FieldReport {
    bool ok = true;
    std::vector<FieldViolation> violations;
    /// Cells of the first closed path found, when a cycle exists.
    std::vector<CellId> cycle;
};

/// Checks pairing structure and acyclicity.  Never throws on bad fields.
FieldReport validate_field(const CellComplex& k, const GradientField& v);

/// Extend per-vertex scalar data to a gradient field on the whole complex by
/// processing each vertex's lower star (ties between equal values broken by
/// vertex id).  When `boundary` is given, the part of each lower star lying
/// in the boundary subcomplex is paired first, so the result restricts to a
/// field on the boundary.
GradientField extend_from_vertex_values(const CellComplex& k,
                                        const std::vector<double>& vertex_values,
                                        const BoundarySubcomplex* boundary = nullptr);

/// Cell function induced by vertex data: each cell takes the maximum value
/// over its vertices.  Used for value-ordered simplification and route costs.
MorseFunction function_from_vertex_values(const CellComplex& k,
                                          const std::vector<double>& vertex_values);

/// One alternating descent path tau_0 < sigma_0 > tau_1 < ... ending at a
/// cell without onward continuation.
struct VPath {
    std::vector<CellId> cells;

    CellId terminal() const { return cells.empty() ? kNoCell : cells.back(); }
};

struct VPathSet {
    std::vector<VPath> paths;
    bool truncated = false; ///< the enumeration bound was hit
};

/// All maximal descent paths from `start` (a tail cell) or from the faces of
/// `start` (a critical cell), in deterministic order, up to `max_paths`.
VPathSet enumerate_vpaths(const CellComplex& k, const GradientField& v,
                          CellId start, std::size_t max_paths = 1u << 20);

/// Number of descent paths from the faces of `sigma` ending at `tau`,
/// saturated at 2 once ambiguity is established.
std::size_t count_connecting_paths(const CellComplex& k, const GradientField& v,
                                   CellId sigma, CellId tau);

/// Cancel the critical pair (sigma, tau) of adjacent dimension joined by a
/// unique descent path: the arrows along the path are reversed and both cells
/// become regular.  Throws CancelError when the path is absent or ambiguous.
GradientField cancel(const CellComplex& k, const GradientField& v,
                     CellId sigma, CellId tau);

/// Repeatedly cancel uniquely-connected critical pairs whose value difference
/// is below `threshold`, smallest difference first.
GradientField simplify(const CellComplex& k, const GradientField& v,
                       double threshold, const MorseFunction& f);

} // namespace dmorse

#endif // DMORSE_MORSE_HPP
