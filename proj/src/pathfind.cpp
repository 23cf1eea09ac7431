#include "dmorse/pathfind.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>

namespace dmorse {

CostFn hop_cost() {
    return [](CellId, CellId) { return 1.0; };
}

CostFn value_cost(const MorseFunction& f) {
    std::vector<double> values = f.values();
    return [values](CellId from, CellId to) {
        return std::abs(values[static_cast<std::size_t>(to)] -
                        values[static_cast<std::size_t>(from)]);
    };
}

DescentResult steepest_descent(const CellComplex& k, const GradientField& v, CellId start) {
    if (!k.valid_cell(start))
        throw ContractError("descent start cell out of range");

    DescentResult result;
    CellId cur = start;
    result.path.cells.push_back(cur);

    // Each iteration either enters a pair at its tail or leaves a head
    // through a side face; both are steps of one descent path, so the walk
    // cannot revisit a cell on a valid field.
    const std::size_t guard = 2 * static_cast<std::size_t>(k.size()) + 2;
    while (result.path.cells.size() < guard) {
        if (v.is_critical(cur))
            break;
        if (v.in_a(cur)) {
            cur = v.partner_up(cur);
            result.path.cells.push_back(cur);
            continue;
        }
        const CellId tail = v.partner_down(cur);
        CellId next = kNoCell;
        for (CellId f : k.faces(cur)) {
            if (f != tail) {
                next = f;
                break; // faces are sorted: least id wins
            }
        }
        if (next == kNoCell)
            break; // no onward continuation
        cur = next;
        result.path.cells.push_back(cur);
    }
    result.terminal = cur;
    return result;
}

namespace {

/// Moves that follow the field downward.
std::vector<CellId> descent_moves(const CellComplex& k, const GradientField& v, CellId u) {
    std::vector<CellId> out;
    if (v.is_critical(u)) {
        out = k.faces(u);
    } else if (v.in_a(u)) {
        out.push_back(v.partner_up(u));
    } else {
        const CellId tail = v.partner_down(u);
        for (CellId f : k.faces(u))
            if (f != tail)
                out.push_back(f);
    }
    return out;
}

/// Exact reverses of the descent moves.
std::vector<CellId> ascent_moves(const CellComplex& k, const GradientField& v, CellId u) {
    std::vector<CellId> out;
    if (v.in_b(u))
        out.push_back(v.partner_down(u));
    for (CellId c : k.cofaces(u)) {
        if (v.is_critical(c))
            out.push_back(c);
        else if (v.in_b(c) && v.partner_down(c) != u)
            out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct Leg {
    std::vector<CellId> cells;
    double cost = 0.0;
    bool found = false;
};

template <typename Moves>
Leg shortest_leg(const CellComplex& k, CellId from, CellId to, const CostFn& cost,
                 const Moves& moves) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(k.size()), inf);
    std::vector<CellId> parent(static_cast<std::size_t>(k.size()), kNoCell);

    using Item = std::pair<double, CellId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    dist[static_cast<std::size_t>(from)] = 0.0;
    queue.push({0.0, from});

    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[static_cast<std::size_t>(u)])
            continue;
        if (u == to)
            break;
        for (CellId w : moves(u)) {
            const double nd = d + cost(u, w);
            double& slot = dist[static_cast<std::size_t>(w)];
            if (nd < slot || (nd == slot && parent[static_cast<std::size_t>(w)] != kNoCell &&
                              u < parent[static_cast<std::size_t>(w)])) {
                slot = nd;
                parent[static_cast<std::size_t>(w)] = u;
                queue.push({nd, w});
            }
        }
    }

    Leg leg;
    if (dist[static_cast<std::size_t>(to)] == inf)
        return leg;
    leg.found = true;
    leg.cost = dist[static_cast<std::size_t>(to)];
    CellId walk = to;
    while (walk != kNoCell) {
        leg.cells.push_back(walk);
        walk = walk == from ? kNoCell : parent[static_cast<std::size_t>(walk)];
    }
    std::reverse(leg.cells.begin(), leg.cells.end());
    return leg;
}

void append_leg(Route& route, const Leg& leg) {
    for (CellId c : leg.cells) {
        if (!route.cells.empty() && route.cells.back() == c)
            continue;
        route.cells.push_back(c);
    }
    route.cost += leg.cost;
}

} // namespace

Route route_to_maximum(const CellComplex& k, const GradientField& v,
                       const Decomposition& decomposition, CellId start, CellId target,
                       const CostFn& cost) {
    const int n = k.dimension();
    if (!k.valid_cell(start) || !k.valid_cell(target))
        throw ContractError("route endpoints out of range");
    if (!v.is_critical(target) || k.dim(target) != n)
        throw ContractError("route target must be a critical cell of maximal dimension");

    auto descent = [&](CellId u) { return descent_moves(k, v, u); };
    auto ascent = [&](CellId u) { return ascent_moves(k, v, u); };

    // Top regions covering the start cell.
    std::set<CellId> start_maxima;
    for (std::int32_t idx : decomposition.descending_membership[static_cast<std::size_t>(start)]) {
        const Region& r = decomposition.descending[static_cast<std::size_t>(idx)];
        if (!r.via_boundary && k.dim(r.critical) == n)
            start_maxima.insert(r.critical);
    }

    if (start_maxima.count(target)) {
        const Leg leg = shortest_leg(k, start, target, cost, ascent);
        if (!leg.found)
            throw NoRouteError("no ascent from cell " + std::to_string(start) +
                               " to its own top cell " + std::to_string(target));
        Route route;
        append_leg(route, leg);
        route.waypoints = {target};
        return route;
    }
    if (start_maxima.empty())
        throw NoRouteError("start cell " + std::to_string(start) +
                           " is not covered by any top region");
    if (decomposition.ascending.empty())
        throw ContractError("routing requires ascending regions in the decomposition");

    // Two top cells neighbor each other through a saddle whose ascending
    // region meets both of their descending regions.
    std::map<CellId, std::set<std::pair<CellId, CellId>>> edges; // max -> (saddle, other max)
    for (const Region& asc : decomposition.ascending) {
        if (k.dim(asc.critical) != n - 1)
            continue;
        std::set<CellId> touched;
        for (CellId c : asc.cells) {
            for (std::int32_t idx :
                 decomposition.descending_membership[static_cast<std::size_t>(c)]) {
                const Region& r = decomposition.descending[static_cast<std::size_t>(idx)];
                if (!r.via_boundary && k.dim(r.critical) == n)
                    touched.insert(r.critical);
            }
        }
        for (CellId a : touched)
            for (CellId b : touched)
                if (a != b)
                    edges[a].insert({asc.critical, b});
    }

    // Hop distances to the target over the neighbor graph.
    std::map<CellId, int> hops;
    hops[target] = 0;
    std::deque<CellId> queue{target};
    while (!queue.empty()) {
        const CellId cur = queue.front();
        queue.pop_front();
        auto it = edges.find(cur);
        if (it == edges.end())
            continue;
        for (const auto& [saddle, next] : it->second) {
            if (!hops.count(next)) {
                hops[next] = hops.at(cur) + 1;
                queue.push_back(next);
            }
        }
    }

    CellId current_max = kNoCell;
    for (CellId m : start_maxima) {
        if (!hops.count(m))
            continue;
        if (current_max == kNoCell || hops.at(m) < hops.at(current_max) ||
            (hops.at(m) == hops.at(current_max) && m < current_max))
            current_max = m;
    }
    if (current_max == kNoCell)
        throw NoRouteError("no saddle chain connects the start region to cell " +
                           std::to_string(target));

    Route route;
    route.cells.push_back(start);
    route.waypoints.push_back(current_max);
    CellId position = start;

    while (current_max != target) {
        // Among hop-optimal next regions, take the crossing with the
        // cheapest descent + ascent legs.
        const int want = hops.at(current_max) - 1;
        Leg best_down, best_up;
        CellId best_saddle = kNoCell, best_next = kNoCell;
        for (const auto& [saddle, next] : edges.at(current_max)) {
            if (!hops.count(next) || hops.at(next) != want)
                continue;
            const Leg down = shortest_leg(k, position, saddle, cost, descent);
            if (!down.found)
                continue;
            const Leg up = shortest_leg(k, saddle, next, cost, ascent);
            if (!up.found)
                continue;
            const double total = down.cost + up.cost;
            if (best_saddle == kNoCell || total < best_down.cost + best_up.cost ||
                (total == best_down.cost + best_up.cost && saddle < best_saddle)) {
                best_down = down;
                best_up = up;
                best_saddle = saddle;
                best_next = next;
            }
        }
        if (best_saddle == kNoCell)
            throw NoRouteError("saddle crossing out of region " + std::to_string(current_max) +
                               " is unreachable at cell resolution");
        append_leg(route, best_down);
        route.waypoints.push_back(best_saddle);
        append_leg(route, best_up);
        route.waypoints.push_back(best_next);
        position = best_next;
        current_max = best_next;
    }
    return route;
}

} // namespace dmorse
