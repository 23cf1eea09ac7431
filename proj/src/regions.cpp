#include "dmorse/regions.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <thread>
#include <unordered_map>

namespace dmorse {

bool Region::contains(CellId c) const {
    return std::binary_search(cells.begin(), cells.end(), c);
}

void RegionBuildStats::merge(const RegionBuildStats& other) {
    frame_steps += other.frame_steps;
    completion_checks += other.completion_checks;
    pair_visits += other.pair_visits;
    overlaps.insert(overlaps.end(), other.overlaps.begin(), other.overlaps.end());
}

namespace {

/// Which already-built regions contain a given cell.
class MembershipIndex {
public:
    explicit MembershipIndex(int n_cells) : entries_(static_cast<std::size_t>(n_cells)) {}

    void add(const Region& region, int owner_dim) {
        for (CellId c : region.cells)
            entries_[static_cast<std::size_t>(c)].push_back({region.critical, owner_dim});
    }

    struct Entry {
        CellId owner;
        int owner_dim;
    };
    const std::vector<Entry>& at(CellId c) const {
        return entries_[static_cast<std::size_t>(c)];
    }

private:
    std::vector<std::vector<Entry>> entries_;
};

/// Builds one region: a breadth-first frame sweep along descent paths,
/// followed by the recursive pair-completion that decides which lower pairs
/// hang below the frame.  Buffers are reusable across builds; for
/// boundary-stage unions the accumulated region survives several sweeps.
class RegionEngine {
public:
    RegionEngine(const CellComplex& k, const GradientField& v, const MembershipIndex& membership,
                 RegionBuildStats& stats)
        : k_(k), v_(v), membership_(membership), stats_(stats),
          in_region_(static_cast<std::size_t>(k.size()), 0),
          in_frame_(static_cast<std::size_t>(k.size()), 0),
          queued_(static_cast<std::size_t>(k.size()), 0) {}

    void reset() {
        for (CellId c : added_)
            in_region_[static_cast<std::size_t>(c)] = 0;
        added_.clear();
        reset_sweep_state();
    }

    /// Clear per-sweep scratch but keep the accumulated region.
    void reset_sweep_state() {
        for (CellId c : frame_dirty_)
            in_frame_[static_cast<std::size_t>(c)] = 0;
        frame_dirty_.clear();
        for (CellId c : queued_dirty_)
            queued_[static_cast<std::size_t>(c)] = 0;
        queued_dirty_.clear();
        verdict_.clear();
    }

    void add_cell(CellId c) {
        if (!in_region_[static_cast<std::size_t>(c)]) {
            in_region_[static_cast<std::size_t>(c)] = 1;
            added_.push_back(c);
        }
    }

    bool in_region(CellId c) const { return in_region_[static_cast<std::size_t>(c)] != 0; }
    const std::vector<CellId>& added() const { return added_; }

    /// Sweep the frame of `anchor`: all tails and heads on descent paths
    /// starting in its boundary.  Returns the frame cells in sweep order.
    std::vector<CellId> sweep_frame(CellId anchor) {
        std::vector<CellId> frame;
        std::deque<CellId> queue;
        for (CellId f : k_.faces(anchor))
            if (v_.in_a(f))
                queue.push_back(f);

        auto mark_frame = [&](CellId c) {
            if (!in_frame_[static_cast<std::size_t>(c)]) {
                in_frame_[static_cast<std::size_t>(c)] = 1;
                frame_dirty_.push_back(c);
                frame.push_back(c);
                add_cell(c);
            }
        };

        while (!queue.empty()) {
            const CellId tail = queue.front();
            queue.pop_front();
            if (in_frame_[static_cast<std::size_t>(tail)])
                continue;
            ++stats_.frame_steps;
            mark_frame(tail);
            const CellId head = v_.partner_up(tail);
            mark_frame(head);
            for (CellId next : k_.faces(head))
                if (next != tail && v_.in_a(next) && !in_frame_[static_cast<std::size_t>(next)])
                    queue.push_back(next);
        }
        return frame;
    }

    /// Run the completion for the region anchored at `anchor` of build
    /// dimension `p`.  Every cell currently in the region seeds candidates.
    void complete(CellId anchor, int p) {
        anchor_ = anchor;
        p_ = p;

        std::deque<CellId> worklist;
        auto enqueue = [&](CellId tail) {
            if (!queued_[static_cast<std::size_t>(tail)]) {
                queued_[static_cast<std::size_t>(tail)] = 1;
                queued_dirty_.push_back(tail);
                worklist.push_back(tail);
            }
        };
        auto seed_from = [&](CellId c) {
            for (CellId f : k_.faces(c)) {
                if (v_.in_b(f)) {
                    enqueue(v_.partner_down(f));
                } else if (v_.in_a(f) && k_.dim(v_.partner_up(f)) < p_) {
                    enqueue(f);
                }
            }
        };

        for (CellId c = 0; c < k_.size(); ++c)
            if (in_region(c))
                seed_from(c);
        seed_from(anchor);

        while (!worklist.empty()) {
            const CellId tail = worklist.front();
            worklist.pop_front();
            if (verdict_.count(tail))
                continue;
            if (in_region(tail) && in_region(v_.partner_up(tail)))
                continue;
            run_check(tail, [&](CellId c) { seed_from(c); });
        }
    }

private:
    enum class Verdict : char { InProgress, Included, Excluded };

    /// Decide one pair (tail, head = V(tail)), recursing into undecided
    /// coface pairs with an explicit stack.  The recursion only moves against
    /// the descent direction, so re-entering an in-progress pair would mean a
    /// closed path and is treated as a logic error.
    template <typename SeedFn>
    void run_check(CellId root_tail, SeedFn on_added) {
        struct Frame {
            CellId tail;
            CellId head;
            std::size_t idx;
        };
        std::vector<Frame> stack;
        auto push = [&](CellId tail) {
            verdict_[tail] = Verdict::InProgress;
            stack.push_back({tail, v_.partner_up(tail), 0});
            ++stats_.pair_visits;
        };
        push(root_tail);

        auto finish = [&](Verdict result) {
            const Frame frame = stack.back();
            stack.pop_back();
            verdict_[frame.tail] = result;
            if (result == Verdict::Included) {
                add_cell(frame.tail);
                add_cell(frame.head);
                on_added(frame.tail);
                on_added(frame.head);
            }
        };

        while (!stack.empty()) {
            Frame& frame = stack.back();
            const auto& cofaces = k_.cofaces(frame.tail);
            bool suspended = false;
            Verdict result = Verdict::Included;

            while (frame.idx < cofaces.size()) {
                const CellId gamma = cofaces[frame.idx];
                ++stats_.completion_checks;
                if (gamma == frame.head || in_region(gamma) || gamma == anchor_) {
                    ++frame.idx;
                    continue;
                }

                const auto& entries = membership_.at(gamma);
                bool in_lower = false;
                for (const auto& e : entries) {
                    if (e.owner_dim < p_ && e.owner != anchor_) {
                        in_lower = true;
                        break;
                    }
                }
                if (in_lower) {
                    result = Verdict::Excluded;
                    break;
                }

                CellId child = kNoCell;
                if (v_.in_b(gamma))
                    child = v_.partner_down(gamma);
                else if (v_.in_a(gamma) && k_.dim(v_.partner_up(gamma)) < p_)
                    child = gamma;

                if (child != kNoCell) {
                    auto it = verdict_.find(child);
                    if (it == verdict_.end()) {
                        push(child);
                        suspended = true;
                        break; // resume this coface once the child is decided
                    }
                    if (it->second == Verdict::InProgress)
                        throw std::logic_error("region completion re-entered an in-progress pair");
                    if (it->second == Verdict::Included) {
                        ++frame.idx;
                        continue;
                    }
                }
                // Not includable from here.  A foreign region of equal or
                // higher dimension keeps the pair but is flagged as overlap.
                if (!entries.empty()) {
                    stats_.overlaps.emplace_back(anchor_, gamma);
                    ++frame.idx;
                    continue;
                }
                result = Verdict::Excluded;
                break;
            }

            if (suspended)
                continue;
            finish(result);
        }
    }

    const CellComplex& k_;
    const GradientField& v_;
    const MembershipIndex& membership_;
    RegionBuildStats& stats_;

    std::vector<char> in_region_;
    std::vector<char> in_frame_;
    std::vector<char> queued_;
    std::vector<CellId> added_;
    std::vector<CellId> frame_dirty_;
    std::vector<CellId> queued_dirty_;
    std::unordered_map<CellId, Verdict> verdict_;

    CellId anchor_ = kNoCell;
    int p_ = 0;
};

Region finalize_region(CellId critical, RegionKind kind, bool via_boundary,
                       std::vector<CellId> cells, std::vector<CellId> frame) {
    Region r;
    r.critical = critical;
    r.kind = kind;
    r.via_boundary = via_boundary;
    std::sort(cells.begin(), cells.end());
    std::sort(frame.begin(), frame.end());
    r.cells = std::move(cells);
    r.frame = std::move(frame);
    return r;
}

Region build_one_region(const CellComplex& k, const GradientField& v,
                        const MembershipIndex& membership, CellId critical_cell,
                        RegionBuildStats& stats) {
    RegionEngine engine(k, v, membership, stats);
    engine.add_cell(critical_cell);
    std::vector<CellId> frame = engine.sweep_frame(critical_cell);
    engine.complete(critical_cell, k.dim(critical_cell));
    return finalize_region(critical_cell, RegionKind::Descending, false,
                           engine.added(), std::move(frame));
}

std::vector<CellId> sorted_critical(const CellComplex& k, const GradientField& v,
                                    bool descending_ids) {
    std::vector<CellId> crit = v.critical();
    std::stable_sort(crit.begin(), crit.end(), [&](CellId a, CellId b) {
        if (k.dim(a) != k.dim(b))
            return k.dim(a) < k.dim(b);
        return descending_ids ? a > b : a < b;
    });
    return crit;
}

} // namespace

std::vector<CellId> descending_frame(const CellComplex& k, const GradientField& v,
                                     CellId critical_cell) {
    if (!k.valid_cell(critical_cell) || !v.is_critical(critical_cell))
        throw ContractError("frame sweeps start at a critical cell");
    RegionBuildStats stats;
    MembershipIndex empty(k.size());
    RegionEngine engine(k, v, empty, stats);
    std::vector<CellId> frame = engine.sweep_frame(critical_cell);
    std::sort(frame.begin(), frame.end());
    return frame;
}

Region complete_region(const CellComplex& k, const GradientField& v, CellId critical_cell,
                       const std::vector<CellId>& frame,
                       const std::vector<Region>& lower_regions,
                       RegionBuildStats* stats) {
    if (!k.valid_cell(critical_cell) || !v.is_critical(critical_cell))
        throw ContractError("completion starts at a critical cell");
    const int p = k.dim(critical_cell);

    // Every critical cell of strictly lower dimension must come with its
    // finished region.
    std::set<CellId> have;
    for (const Region& r : lower_regions)
        have.insert(r.critical);
    for (CellId c : v.critical())
        if (k.dim(c) < p && !have.count(c))
            throw ContractError("region of lower critical cell " + std::to_string(c) +
                                " has not been built yet");

    MembershipIndex membership(k.size());
    for (const Region& r : lower_regions)
        membership.add(r, k.dim(r.critical));

    RegionBuildStats local;
    RegionEngine engine(k, v, membership, local);
    engine.add_cell(critical_cell);
    for (CellId c : frame)
        engine.add_cell(c);
    engine.complete(critical_cell, p);
    if (stats != nullptr)
        stats->merge(local);
    return finalize_region(critical_cell, RegionKind::Descending, false,
                           engine.added(), frame);
}

std::vector<Region> descending_regions(const CellComplex& k, const GradientField& v,
                                       const RegionOptions& options,
                                       RegionBuildStats* stats) {
    const std::vector<CellId> crit = sorted_critical(k, v, options.same_dim_descending_ids);

    std::vector<Region> regions;
    regions.reserve(crit.size());
    MembershipIndex membership(k.size());
    RegionBuildStats total;

    std::size_t begin = 0;
    while (begin < crit.size()) {
        std::size_t end = begin;
        const int d = k.dim(crit[begin]);
        while (end < crit.size() && k.dim(crit[end]) == d)
            ++end;

        // Regions of one dimension see only the frozen lower-dimensional
        // membership, so they can be built concurrently.
        const std::size_t count = end - begin;
        std::vector<Region> group(count);
        std::vector<RegionBuildStats> group_stats(count);

        const int threads = std::max(1, options.threads);
        if (threads == 1 || count <= 1) {
            for (std::size_t i = 0; i < count; ++i)
                group[i] = build_one_region(k, v, membership, crit[begin + i], group_stats[i]);
        } else {
            auto worker = [&](std::size_t offset, std::size_t stride) {
                for (std::size_t i = offset; i < count; i += stride)
                    group[i] = build_one_region(k, v, membership, crit[begin + i], group_stats[i]);
            };
            std::vector<std::thread> pool;
            const std::size_t stride = static_cast<std::size_t>(threads);
            for (std::size_t t = 1; t < stride; ++t)
                pool.emplace_back(worker, t, stride);
            worker(0, stride);
            for (auto& th : pool)
                th.join();
        }

        for (std::size_t i = 0; i < count; ++i) {
            membership.add(group[i], d);
            total.merge(group_stats[i]);
            regions.push_back(std::move(group[i]));
        }
        begin = end;
    }

    if (stats != nullptr)
        stats->merge(total);
    return regions;
}

GradientField derive_boundary_field(const CellComplex& k, const BoundarySubcomplex& boundary,
                                    const GradientField& v,
                                    const std::vector<double>* vertex_values) {
    if (boundary.empty())
        return GradientField::from_pairs(boundary.complex, {});

    if (vertex_values != nullptr) {
        // Vertex index within the parent complex (0-cells in id order).
        std::vector<std::size_t> vertex_index(static_cast<std::size_t>(k.size()), 0);
        std::size_t count = 0;
        for (CellId c = 0; c < k.size(); ++c)
            if (k.dim(c) == 0)
                vertex_index[static_cast<std::size_t>(c)] = count++;
        if (vertex_values->size() != count)
            throw MalformedInputError("need one value per vertex");

        std::vector<double> restricted;
        for (CellId b = 0; b < boundary.complex.size(); ++b)
            if (boundary.complex.dim(b) == 0)
                restricted.push_back(
                    (*vertex_values)[vertex_index[static_cast<std::size_t>(boundary.to_parent[static_cast<std::size_t>(b)])]]);
        return extend_from_vertex_values(boundary.complex, restricted);
    }

    // No values: keep exactly the global pairs that stay inside the boundary.
    std::vector<std::pair<CellId, CellId>> pairs;
    for (const auto& [tail, head] : v.pairs()) {
        const CellId bt = boundary.from_parent[static_cast<std::size_t>(tail)];
        const CellId bh = boundary.from_parent[static_cast<std::size_t>(head)];
        if (bt != kNoCell && bh != kNoCell)
            pairs.emplace_back(bt, bh);
    }
    return GradientField::from_pairs(boundary.complex, pairs);
}

std::vector<Region> boundary_regions(const CellComplex& k, const GradientField& v,
                                     const GradientField& boundary_field,
                                     const BoundarySubcomplex& boundary,
                                     const std::vector<Region>& interior,
                                     RegionBuildStats* stats) {
    std::vector<Region> out;
    if (boundary.empty())
        return out;
    if (boundary_field.size() != boundary.complex.size())
        throw ContractError("boundary field does not match the boundary subcomplex");

    // The global field must restrict to the boundary field: any global pair
    // lying entirely inside the boundary has to be a boundary pair too.
    for (const auto& [tail, head] : v.pairs()) {
        const CellId bt = boundary.from_parent[static_cast<std::size_t>(tail)];
        const CellId bh = boundary.from_parent[static_cast<std::size_t>(head)];
        if (bt != kNoCell && bh != kNoCell && boundary_field.partner_up(bt) != bh)
            throw ContractError("global pair (" + std::to_string(tail) + ", " +
                                std::to_string(head) +
                                ") lies in the boundary but is absent from the boundary field");
    }

    RegionBuildStats total;
    std::vector<Region> inner = descending_regions(boundary.complex, boundary_field, {}, &total);
    std::map<CellId, const Region*> inner_by_critical;
    for (const Region& r : inner)
        inner_by_critical[r.critical] = &r;

    MembershipIndex membership(k.size());
    for (const Region& r : interior)
        membership.add(r, k.dim(r.critical));

    std::vector<CellId> crit = sorted_critical(boundary.complex, boundary_field, false);
    for (CellId nu_b : crit) {
        const CellId nu = boundary.to_parent[static_cast<std::size_t>(nu_b)];
        if (v.is_critical(nu))
            continue; // already handled by the interior pipeline
        const CellId global_head = v.partner_up(nu);
        if (global_head == kNoCell ||
            boundary.from_parent[static_cast<std::size_t>(global_head)] != kNoCell)
            throw ContractError("boundary-critical cell " + std::to_string(nu) +
                                " is not paired into the interior by the global field");

        const int p = k.dim(nu);
        RegionBuildStats local;
        RegionEngine engine(k, v, membership, local);
        engine.add_cell(nu);

        // Stage one: the region inside the boundary, mapped up.
        const Region& stage1 = *inner_by_critical.at(nu_b);
        for (CellId b : stage1.cells)
            engine.add_cell(boundary.to_parent[static_cast<std::size_t>(b)]);
        std::vector<CellId> frame;
        frame.reserve(stage1.frame.size());
        for (CellId b : stage1.frame)
            frame.push_back(boundary.to_parent[static_cast<std::size_t>(b)]);

        // Stage two: every p-cell of stage one that the global field pairs
        // with an interior cell starts an interior sweep from that cell.
        std::vector<CellId> interior_heads;
        for (CellId b : stage1.cells) {
            const CellId c = boundary.to_parent[static_cast<std::size_t>(b)];
            if (k.dim(c) != p || !v.in_a(c))
                continue;
            const CellId head = v.partner_up(c);
            if (boundary.from_parent[static_cast<std::size_t>(head)] == kNoCell)
                interior_heads.push_back(head);
        }
        std::sort(interior_heads.begin(), interior_heads.end());

        for (CellId head : interior_heads) {
            engine.reset_sweep_state();
            engine.sweep_frame(head);
            engine.add_cell(head);
            engine.complete(head, k.dim(head));
        }

        Region region = finalize_region(nu, RegionKind::Descending, true,
                                        engine.added(), std::move(frame));
        membership.add(region, p);
        total.merge(local);
        out.push_back(std::move(region));
    }

    if (stats != nullptr)
        stats->merge(total);
    return out;
}

std::vector<Region> ascending_regions(const CellComplex& k, const GradientField& v,
                                      const RegionOptions& options,
                                      RegionBuildStats* stats) {
    const CellComplex k_dual = dual(k);
    std::vector<std::pair<CellId, CellId>> reversed;
    reversed.reserve(v.pair_count());
    for (const auto& [tail, head] : v.pairs())
        reversed.emplace_back(head, tail); // arrows flip under duality
    const GradientField v_dual = GradientField::from_pairs(k_dual, reversed);

    std::vector<Region> regions = descending_regions(k_dual, v_dual, options, stats);
    for (Region& r : regions)
        r.kind = RegionKind::Ascending; // cell ids are shared with the primal complex
    return regions;
}

std::vector<CellId> Decomposition::descending_owners(CellId c) const {
    std::vector<CellId> out;
    for (std::int32_t idx : descending_membership[static_cast<std::size_t>(c)])
        out.push_back(descending[static_cast<std::size_t>(idx)].critical);
    return out;
}

std::vector<CellId> Decomposition::ascending_owners(CellId c) const {
    std::vector<CellId> out;
    for (std::int32_t idx : ascending_membership[static_cast<std::size_t>(c)])
        out.push_back(ascending[static_cast<std::size_t>(idx)].critical);
    return out;
}

std::vector<std::pair<CellId, CellId>> Decomposition::label(CellId c) const {
    std::vector<std::pair<CellId, CellId>> out;
    for (CellId d : descending_owners(c))
        for (CellId a : ascending_owners(c))
            out.emplace_back(d, a);
    return out;
}

std::vector<CellId> Decomposition::uncovered(RegionKind kind) const {
    const auto& membership =
        kind == RegionKind::Descending ? descending_membership : ascending_membership;
    std::vector<CellId> out;
    for (std::size_t c = 0; c < membership.size(); ++c)
        if (membership[c].empty())
            out.push_back(static_cast<CellId>(c));
    return out;
}

Decomposition morse_smale(const CellComplex& k, const GradientField& v,
                          const DecompositionOptions& options) {
    Decomposition decomposition;
    RegionOptions region_options;
    region_options.threads = options.threads;

    decomposition.descending =
        descending_regions(k, v, region_options, &decomposition.build_stats);

    if (options.with_boundary) {
        const BoundarySubcomplex boundary = boundary_subcomplex(k);
        if (!boundary.empty()) {
            const GradientField boundary_field =
                derive_boundary_field(k, boundary, v, options.vertex_values);
            std::vector<Region> extra =
                boundary_regions(k, v, boundary_field, boundary, decomposition.descending,
                                 &decomposition.build_stats);
            for (Region& r : extra)
                decomposition.descending.push_back(std::move(r));
        }
    }

    if (options.with_ascending)
        decomposition.ascending =
            ascending_regions(k, v, region_options, &decomposition.build_stats);

    decomposition.descending_membership.assign(static_cast<std::size_t>(k.size()), {});
    for (std::size_t i = 0; i < decomposition.descending.size(); ++i)
        for (CellId c : decomposition.descending[i].cells)
            decomposition.descending_membership[static_cast<std::size_t>(c)].push_back(
                static_cast<std::int32_t>(i));
    decomposition.ascending_membership.assign(static_cast<std::size_t>(k.size()), {});
    for (std::size_t i = 0; i < decomposition.ascending.size(); ++i)
        for (CellId c : decomposition.ascending[i].cells)
            decomposition.ascending_membership[static_cast<std::size_t>(c)].push_back(
                static_cast<std::int32_t>(i));
    return decomposition;
}

std::vector<MergePoint> detect_merges(const CellComplex& k, const GradientField& v,
                                      const Region& region, int region_index) {
    // Re-run the frame sweep, recording how many distinct swept cells feed
    // each onward tail.
    std::map<CellId, std::set<CellId>> incoming;
    std::set<CellId> seen;
    std::deque<CellId> queue;
    for (CellId f : k.faces(region.critical))
        if (v.in_a(f))
            queue.push_back(f);

    while (!queue.empty()) {
        const CellId tail = queue.front();
        queue.pop_front();
        if (seen.count(tail))
            continue;
        seen.insert(tail);
        const CellId head = v.partner_up(tail);
        for (CellId next : k.faces(head)) {
            if (next == tail)
                continue;
            if (v.in_a(next)) {
                incoming[next].insert(head);
                if (!seen.count(next))
                    queue.push_back(next);
            }
        }
    }

    std::vector<MergePoint> merges;
    for (const auto& [cell, preds] : incoming) {
        if (preds.size() >= 2) {
            MergePoint mp;
            mp.cell = cell;
            mp.region_index = region_index;
            mp.incoming.assign(preds.begin(), preds.end());
            merges.push_back(std::move(mp));
        }
    }
    return merges;
}

namespace {

/// Find two vertex-disjoint alternating paths (sharing only the start) in
/// the incidence graph of a star: `first` from `from` to `to_a`, `second`
/// from `from` to `to_b`.  Deterministic lexicographic search.
struct StarPaths {
    std::vector<CellId> first;
    std::vector<CellId> second;
};

std::optional<StarPaths> find_disjoint_star_paths(
    const std::map<CellId, std::vector<CellId>>& adjacency, CellId from, CellId to_a,
    CellId to_b) {
    // Depth-first enumeration of simple paths from -> to_a in ascending
    // neighbor order; for each, try a breadth-first path from -> to_b
    // avoiding it.
    constexpr int kMaxCandidates = 4096;
    int candidates = 0;

    std::vector<CellId> path{from};
    std::set<CellId> on_path{from};
    std::optional<StarPaths> found;

    auto try_second = [&]() -> std::optional<std::vector<CellId>> {
        std::map<CellId, CellId> parent;
        std::deque<CellId> queue{from};
        std::set<CellId> visited{from};
        while (!queue.empty()) {
            const CellId cur = queue.front();
            queue.pop_front();
            if (cur == to_b) {
                std::vector<CellId> second{to_b};
                CellId walk = to_b;
                while (walk != from) {
                    walk = parent.at(walk);
                    second.push_back(walk);
                }
                std::reverse(second.begin(), second.end());
                return second;
            }
            for (CellId next : adjacency.at(cur)) {
                if (visited.count(next))
                    continue;
                if (next != to_b && on_path.count(next))
                    continue;
                if (next == to_b && on_path.count(next))
                    continue;
                visited.insert(next);
                parent[next] = cur;
                queue.push_back(next);
            }
        }
        return std::nullopt;
    };

    std::function<bool()> dfs = [&]() -> bool {
        const CellId cur = path.back();
        if (cur == to_a) {
            if (++candidates > kMaxCandidates)
                return true; // give up; caller reports cannot-push
            if (auto second = try_second()) {
                found = StarPaths{path, *second};
                return true;
            }
            return false;
        }
        for (CellId next : adjacency.at(cur)) {
            if (on_path.count(next))
                continue;
            if (next == to_b)
                continue; // keep the second endpoint free for the second path
            path.push_back(next);
            on_path.insert(next);
            if (dfs())
                return true;
            path.pop_back();
            on_path.erase(next);
        }
        return false;
    };
    dfs();
    return found;
}

} // namespace

PushResult push_merge(const CellComplex& k, const GradientField& v, const MergePoint& merge) {
    const CellId tau = merge.cell;
    if (!k.valid_cell(tau) || !v.in_a(tau))
        throw ContractError("merge cell must be a pair tail");
    if (merge.incoming.size() < 2)
        throw ContractError("merge point needs at least two incoming cells");
    const CellId sigma = v.partner_up(tau);
    const int p = k.dim(sigma);

    // Open star of the merge cell.
    std::set<CellId> star;
    {
        std::deque<CellId> queue{tau};
        std::set<CellId> seen{tau};
        while (!queue.empty()) {
            const CellId cur = queue.front();
            queue.pop_front();
            for (CellId up : k.cofaces(cur)) {
                if (seen.insert(up).second) {
                    star.insert(up);
                    queue.push_back(up);
                }
            }
        }
    }
    for (CellId c : star)
        if (k.dim(c) > p + 1)
            throw CannotPushError("star of cell " + std::to_string(tau) +
                                  " reaches dimension " + std::to_string(k.dim(c)) +
                                  "; only stars up to one level above the pair are supported");

    // Incidence graph between the star's p- and (p+1)-cells.
    std::map<CellId, std::vector<CellId>> adjacency;
    for (CellId c : star)
        adjacency[c] = {};
    for (CellId c : star) {
        if (k.dim(c) != p + 1)
            continue;
        for (CellId f : k.faces(c)) {
            if (star.count(f)) {
                adjacency[c].push_back(f);
                adjacency[f].push_back(c);
            }
        }
    }
    for (auto& [cell, nbrs] : adjacency)
        std::sort(nbrs.begin(), nbrs.end());

    const CellId pred1 = merge.incoming[0];
    const CellId pred2 = merge.incoming[1];
    const auto paths = find_disjoint_star_paths(adjacency, pred1, sigma, pred2);
    if (!paths.has_value())
        throw CannotPushError("no disjoint star paths between cells " + std::to_string(pred1) +
                              ", " + std::to_string(sigma) + " and " + std::to_string(pred2));

    // Assemble the modified complex: two copies of the merge pair, a
    // connector between the copies, and a new cell pairing with it.
    std::vector<int> dims;
    std::vector<std::vector<CellId>> faces;
    dims.reserve(static_cast<std::size_t>(k.size()) + 4);
    faces.reserve(static_cast<std::size_t>(k.size()) + 4);
    for (CellId c = 0; c < k.size(); ++c) {
        dims.push_back(k.dim(c));
        faces.push_back(k.faces(c));
    }
    const CellId tau_copy = static_cast<CellId>(dims.size());
    dims.push_back(p - 1);
    faces.push_back(k.faces(tau));
    const CellId sigma_copy = static_cast<CellId>(dims.size());
    dims.push_back(p);
    {
        std::vector<CellId> fl = k.faces(sigma);
        std::replace(fl.begin(), fl.end(), tau, tau_copy);
        faces.push_back(std::move(fl));
    }
    const CellId connector = static_cast<CellId>(dims.size());
    dims.push_back(p);
    faces.push_back({tau, tau_copy});
    const CellId connector_head = static_cast<CellId>(dims.size());
    dims.push_back(p + 1);
    faces.push_back({connector, sigma, sigma_copy});

    // The first path hands its side of the star to the copy of the merge
    // cell; its final step continues into the copied head.
    for (CellId c : paths->first) {
        if (k.dim(c) == p && c != sigma)
            std::replace(faces[static_cast<std::size_t>(c)].begin(),
                         faces[static_cast<std::size_t>(c)].end(), tau, tau_copy);
    }
    const CellId last_upper = paths->first[paths->first.size() - 2];
    std::replace(faces[static_cast<std::size_t>(last_upper)].begin(),
                 faces[static_cast<std::size_t>(last_upper)].end(), sigma, sigma_copy);
    const CellId first_upper = paths->second[1];
    faces[static_cast<std::size_t>(first_upper)].push_back(connector);

    std::vector<std::vector<std::int64_t>> labels = k.labels();
    labels.resize(dims.size());

    PushResult result;
    result.complex = CellComplex::from_parts(std::move(dims), std::move(faces),
                                             ComplexCheck::Full, k.label_kind(),
                                             std::move(labels));
    auto pairs = v.pairs();
    pairs.emplace_back(tau_copy, sigma_copy);
    pairs.emplace_back(connector, connector_head);
    result.field = GradientField::from_pairs(result.complex, pairs);
    result.tail_copy = tau_copy;
    result.head_copy = sigma_copy;
    result.connector = connector;
    result.connector_head = connector_head;

    const FieldReport check = validate_field(result.complex, result.field);
    if (!check.ok)
        throw std::logic_error("push-out produced an invalid field");
    return result;
}

RepairResult repair_to_disks(const CellComplex& k, const GradientField& v, int max_steps) {
    if (!boundary_subcomplex(k).empty())
        throw ContractError("merge repair requires a complex without boundary");
    if (max_steps <= 0)
        max_steps = 10 * k.size();

    RepairResult result;
    result.complex = k;
    result.field = v;

    std::map<CellId, int> pushes;
    const std::vector<CellId> crit = sorted_critical(k, v, false);

    for (CellId s : crit) {
        while (true) {
            std::vector<Region> regions = descending_regions(result.complex, result.field);
            const Region* region = nullptr;
            int index = 0;
            for (std::size_t i = 0; i < regions.size(); ++i) {
                if (regions[i].critical == s) {
                    region = &regions[i];
                    index = static_cast<int>(i);
                    break;
                }
            }
            std::vector<MergePoint> merges =
                detect_merges(result.complex, result.field, *region, index);
            if (merges.empty())
                break;

            if (result.report.steps >= max_steps) {
                result.report.exhausted = true;
                for (auto& m : merges)
                    result.report.residual.push_back(std::move(m));
                break;
            }

            bool pushed = false;
            for (const MergePoint& merge : merges) {
                try {
                    PushResult step = push_merge(result.complex, result.field, merge);
                    result.complex = std::move(step.complex);
                    result.field = std::move(step.field);
                    ++result.report.steps;
                    ++pushes[s];
                    pushed = true;
                    break;
                } catch (const CannotPushError&) {
                    continue;
                }
            }
            if (!pushed) {
                for (auto& m : merges)
                    result.report.residual.push_back(std::move(m));
                break;
            }
        }
        if (result.report.exhausted)
            break;
    }

    for (const auto& [cell, count] : pushes)
        result.report.pushes_per_region.emplace_back(cell, count);
    return result;
}

} // namespace dmorse
