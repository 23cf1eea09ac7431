#ifndef DMORSE_PATHFIND_HPP
#define DMORSE_PATHFIND_HPP

#include <functional>
#include <vector>

#include "dmorse/regions.hpp"

namespace dmorse {

/// Cost of moving between two face-incident cells.
using CostFn = std::function<double(CellId, CellId)>;

/// Unit cost per step.
CostFn hop_cost();

/// Absolute value difference between consecutive cells.
CostFn value_cost(const MorseFunction& f);

/// Where a deterministic descent from a cell ends up.
struct DescentResult {
    CellId terminal = kNoCell;
    VPath path; ///< the walked cells, starting at the query cell
};

/// Follow the field downward from `start`, entering each pair at its tail
/// and leaving heads through their least-id remaining face, until a critical
/// cell is reached.
DescentResult steepest_descent(const CellComplex& k, const GradientField& v, CellId start);

/// A path between extrema: descend to a saddle shared by two neighboring
/// top regions, ascend to the next top cell, repeat.
struct Route {
    std::vector<CellId> cells;     ///< face-incident consecutive cells
    std::vector<CellId> waypoints; ///< start-region top cell, saddles, ..., target
    double cost = 0.0;
};

/// Build a route from `start` to the critical top cell `target`.  The
/// decomposition must carry ascending regions.  Throws NoRouteError when the
/// saddle graph does not connect the two.
Route route_to_maximum(const CellComplex& k, const GradientField& v,
                       const Decomposition& decomposition, CellId start, CellId target,
                       const CostFn& cost);

} // namespace dmorse

#endif // DMORSE_PATHFIND_HPP
