#ifndef DMORSE_REGIONS_HPP
#define DMORSE_REGIONS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dmorse/cell_complex.hpp"
#include "dmorse/morse.hpp"

namespace dmorse {

enum class RegionKind { Descending, Ascending };

/// All cells swept by descent paths leaving (or, for ascending regions,
/// entering) one critical cell.
struct Region {
    CellId critical = kNoCell;
    RegionKind kind = RegionKind::Descending;
    std::vector<CellId> cells; ///< sorted ascending; contains `critical`
    std::vector<CellId> frame; ///< sorted; the top two dimension layers
    bool via_boundary = false; ///< built through the boundary pipeline

    bool contains(CellId c) const;
};

/// Operation counters and overlap diagnostics for one batch of region builds.
struct RegionBuildStats {
    std::uint64_t frame_steps = 0;       ///< pair traversals during frame sweeps
    std::uint64_t completion_checks = 0; ///< coface inspections during completion
    std::uint64_t pair_visits = 0;       ///< pair verdicts computed
    /// (region critical, cell) events where a coface was only found in
    /// same-or-higher-dimensional foreign regions and the pair was kept.
    std::vector<std::pair<CellId, CellId>> overlaps;

    void merge(const RegionBuildStats& other);
};

/// Region build tuning.  `same_dim_descending_ids` reverses the processing
/// order of equal-dimension critical cells; results must not depend on it.
struct RegionOptions {
    int threads = 1;
    bool same_dim_descending_ids = false;
};

/// The frame of a critical p-cell: every regular p- and (p-1)-cell reached
/// by a breadth-first sweep along descent paths starting in its boundary.
std::vector<CellId> descending_frame(const CellComplex& k, const GradientField& v,
                                     CellId critical_cell);

/// Complete one region given its frame and all regions of strictly lower
/// dimension.  Throws ContractError when a lower region is missing.
Region complete_region(const CellComplex& k, const GradientField& v, CellId critical_cell,
                       const std::vector<CellId>& frame,
                       const std::vector<Region>& lower_regions,
                       RegionBuildStats* stats = nullptr);

/// One descending region per critical cell, built in ascending dimension
/// order; equal-dimension regions see only strictly lower ones.
std::vector<Region> descending_regions(const CellComplex& k, const GradientField& v,
                                       const RegionOptions& options = {},
                                       RegionBuildStats* stats = nullptr);

/// A gradient field on the boundary subcomplex compatible with the global
/// field: derived from vertex data when available, otherwise by restricting
/// the global pairs that stay inside the boundary.
GradientField derive_boundary_field(const CellComplex& k, const BoundarySubcomplex& boundary,
                                    const GradientField& v,
                                    const std::vector<double>* vertex_values = nullptr);

/// Descending regions of boundary-critical cells: cells critical for the
/// boundary field but paired into the interior by the global field.  Built in
/// two stages (inside the boundary, then interior sweeps from the pairs
/// leaving it).  `interior` must hold the finished interior regions.
std::vector<Region> boundary_regions(const CellComplex& k, const GradientField& v,
                                     const GradientField& boundary_field,
                                     const BoundarySubcomplex& boundary,
                                     const std::vector<Region>& interior,
                                     RegionBuildStats* stats = nullptr);

/// Ascending regions: descending regions of the reversed field on the dual
/// complex, mapped back through the id-preserving duality.
std::vector<Region> ascending_regions(const CellComplex& k, const GradientField& v,
                                      const RegionOptions& options = {},
                                      RegionBuildStats* stats = nullptr);

/// Full decomposition: regions of both kinds, per-cell membership, and the
/// (descending owner, ascending owner) label pairs.
struct Decomposition {
    std::vector<Region> descending;
    std::vector<Region> ascending;

    /// Per cell: indices into `descending` / `ascending`.
    std::vector<std::vector<std::int32_t>> descending_membership;
    std::vector<std::vector<std::int32_t>> ascending_membership;

    RegionBuildStats build_stats;

    /// Owner critical cells of every region containing `c`.
    std::vector<CellId> descending_owners(CellId c) const;
    std::vector<CellId> ascending_owners(CellId c) const;
    /// All (descending owner, ascending owner) pairs of `c`.
    std::vector<std::pair<CellId, CellId>> label(CellId c) const;
    /// Cells not contained in any region of the given kind.
    std::vector<CellId> uncovered(RegionKind kind) const;
};

struct DecompositionOptions {
    bool with_boundary = false;   ///< run the boundary pipeline when the boundary is nonempty
    bool with_ascending = true;
    const std::vector<double>* vertex_values = nullptr; ///< for deriving the boundary field
    int threads = 1;
};

Decomposition morse_smale(const CellComplex& k, const GradientField& v,
                          const DecompositionOptions& options = {});

/// A cell where two descent paths of one region coalesce and continue
/// through the same pair.
struct MergePoint {
    CellId cell = kNoCell;          ///< the tail both paths continue through
    int region_index = 0;
    std::vector<CellId> incoming;   ///< the distinct predecessor cells, sorted
};

std::vector<MergePoint> detect_merges(const CellComplex& k, const GradientField& v,
                                      const Region& region, int region_index = 0);

/// Result of one push-out subdivision step: the merge cell and its pair are
/// doubled, a connecting pair is added, and the merge moves one step along
/// the descent; the critical set is untouched.
struct PushResult {
    CellComplex complex;
    GradientField field;
    CellId tail_copy = kNoCell;      ///< duplicate of the merge cell
    CellId head_copy = kNoCell;      ///< duplicate of its pair head
    CellId connector = kNoCell;      ///< new cell joining the two copies
    CellId connector_head = kNoCell; ///< its new pair head
};

PushResult push_merge(const CellComplex& k, const GradientField& v, const MergePoint& merge);

/// Push every reachable merge of every region toward the region boundary,
/// in ascending dimension order, until none remain or the step budget is
/// exhausted.  Requires a complex without boundary.
struct RepairReport {
    std::vector<std::pair<CellId, int>> pushes_per_region; ///< (critical, count), nonzero only
    std::vector<MergePoint> residual;                      ///< merges that could not be pushed
    int steps = 0;
    bool exhausted = false;
};

struct RepairResult {
    CellComplex complex;
    GradientField field;
    RepairReport report;
};

RepairResult repair_to_disks(const CellComplex& k, const GradientField& v, int max_steps = 0);

} // namespace dmorse

#endif // DMORSE_REGIONS_HPP
