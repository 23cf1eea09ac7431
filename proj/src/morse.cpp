#include "dmorse/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

namespace dmorse {

namespace {

constexpr std::uint64_t kPathCountCap = std::uint64_t{1} << 62;

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    return (a > kPathCountCap - b) ? kPathCountCap : a + b;
}

} // namespace

AbCounts ab_counts(const CellComplex& k, const MorseFunction& f, CellId cell) {
    AbCounts counts;
    const double value = f(cell);
    for (CellId face : k.faces(cell))
        if (f(face) >= value)
            ++counts.upper_faces;
    for (CellId coface : k.cofaces(cell))
        if (f(coface) <= value)
            ++counts.lower_cofaces;
    return counts;
}

GradientField GradientField::assemble(const CellComplex& k,
                                      const std::vector<std::pair<CellId, CellId>>& pairs,
                                      bool check) {
    GradientField v;
    v.pair_up_.assign(static_cast<std::size_t>(k.size()), kNoCell);
    v.pair_down_.assign(static_cast<std::size_t>(k.size()), kNoCell);
    for (const auto& [tail, head] : pairs) {
        if (!k.valid_cell(tail) || !k.valid_cell(head))
            throw MalformedInputError("pair references a cell outside the complex");
        if (check) {
            if (k.dim(head) != k.dim(tail) + 1)
                throw MalformedInputError("pair (" + std::to_string(tail) + ", " +
                                          std::to_string(head) + ") violates dimension grading");
            const auto& fl = k.faces(head);
            if (!std::binary_search(fl.begin(), fl.end(), tail))
                throw MalformedInputError("pair tail " + std::to_string(tail) +
                                          " is not a face of head " + std::to_string(head));
            if (v.pair_up_[static_cast<std::size_t>(tail)] != kNoCell ||
                v.pair_down_[static_cast<std::size_t>(tail)] != kNoCell ||
                v.pair_up_[static_cast<std::size_t>(head)] != kNoCell ||
                v.pair_down_[static_cast<std::size_t>(head)] != kNoCell)
                throw MalformedInputError("cell used by more than one pair");
        }
        v.pair_up_[static_cast<std::size_t>(tail)] = head;
        v.pair_down_[static_cast<std::size_t>(head)] = tail;
        ++v.n_pairs_;
    }
    for (CellId c = 0; c < k.size(); ++c)
        if (v.is_critical(c))
            v.critical_.push_back(c);
    return v;
}

GradientField GradientField::from_pairs(const CellComplex& k,
                                        const std::vector<std::pair<CellId, CellId>>& pairs) {
    return assemble(k, pairs, true);
}

GradientField GradientField::from_pairs_unchecked(const CellComplex& k,
                                                  const std::vector<std::pair<CellId, CellId>>& pairs) {
    return assemble(k, pairs, false);
}

std::vector<std::pair<CellId, CellId>> GradientField::pairs() const {
    std::vector<std::pair<CellId, CellId>> out;
    out.reserve(n_pairs_);
    for (CellId c = 0; c < size(); ++c)
        if (pair_up_[static_cast<std::size_t>(c)] != kNoCell)
            out.emplace_back(c, pair_up_[static_cast<std::size_t>(c)]);
    return out;
}

GradientField classify(const CellComplex& k, const MorseFunction& f) {
    if (f.size() != static_cast<std::size_t>(k.size()))
        throw MalformedInputError("function value count does not match cell count");

    std::vector<std::pair<CellId, CellId>> pairs;
    for (CellId c = 0; c < k.size(); ++c) {
        const AbCounts counts = ab_counts(k, f, c);
        if (counts.lower_cofaces > 1 || counts.upper_faces > 1)
            throw NotMorseError("cell " + std::to_string(c) + " has " +
                                    std::to_string(counts.lower_cofaces) + " lower cofaces and " +
                                    std::to_string(counts.upper_faces) +
                                    " upper faces; at most one of each is allowed",
                                c);
        if (counts.lower_cofaces == 1 && counts.upper_faces == 1)
            throw NotMorseError("cell " + std::to_string(c) +
                                    " has both a lower coface and an upper face, which is "
                                    "impossible for consistent input",
                                c);
        if (counts.lower_cofaces == 1) {
            // Tail: pair with the unique coface the function descends into.
            for (CellId coface : k.cofaces(c)) {
                if (f(coface) <= f(c)) {
                    pairs.emplace_back(c, coface);
                    break;
                }
            }
        }
    }

    GradientField v = GradientField::from_pairs(k, pairs);

    // Heads found through tails must be exactly the cells with an upper face.
    for (CellId c = 0; c < k.size(); ++c) {
        const AbCounts counts = ab_counts(k, f, c);
        const bool head = v.in_b(c);
        if (head != (counts.upper_faces == 1))
            throw NotMorseError("pairing is inconsistent at cell " + std::to_string(c), c);
    }
    return v;
}

FieldReport validate_field(const CellComplex& k, const GradientField& v) {
    FieldReport report;
    auto add = [&report](FieldViolation::Kind kind, std::string msg, std::vector<CellId> cells) {
        report.ok = false;
        report.violations.push_back({kind, std::move(msg), std::move(cells)});
    };

    if (v.size() != k.size()) {
        add(FieldViolation::Kind::Partition, "field size does not match complex", {});
        return report;
    }

    for (CellId c = 0; c < k.size(); ++c) {
        if (v.in_a(c) && v.in_b(c))
            add(FieldViolation::Kind::Partition,
                "cell " + std::to_string(c) + " is both a pair tail and a pair head", {c});
        if (v.in_a(c)) {
            const CellId head = v.partner_up(c);
            if (!k.valid_cell(head)) {
                add(FieldViolation::Kind::Incidence,
                    "pair head out of range for tail " + std::to_string(c), {c});
                continue;
            }
            if (v.partner_down(head) != c)
                add(FieldViolation::Kind::Partition,
                    "pairing of cells " + std::to_string(c) + " and " + std::to_string(head) +
                        " is not mutual", {c, head});
            if (k.dim(head) != k.dim(c) + 1)
                add(FieldViolation::Kind::Grading,
                    "pair (" + std::to_string(c) + ", " + std::to_string(head) +
                        ") violates dimension grading", {c, head});
            else {
                const auto& fl = k.faces(head);
                if (!std::binary_search(fl.begin(), fl.end(), c))
                    add(FieldViolation::Kind::Incidence,
                        "pair tail " + std::to_string(c) + " is not a face of head " +
                            std::to_string(head), {c, head});
            }
        }
    }
    if (!report.ok)
        return report;

    // Acyclicity: depth-first search over tail -> head -> next tail steps.
    enum : char { White, Gray, Black };
    std::vector<char> color(static_cast<std::size_t>(k.size()), White);

    struct Frame {
        CellId tail;
        std::size_t idx;
    };
    for (CellId root = 0; root < k.size(); ++root) {
        if (!v.in_a(root) || color[static_cast<std::size_t>(root)] != White)
            continue;
        std::vector<Frame> stack{{root, 0}};
        color[static_cast<std::size_t>(root)] = Gray;
        while (!stack.empty()) {
            const CellId tail = stack.back().tail;
            const CellId head = v.partner_up(tail);
            const auto& fl = k.faces(head);
            bool descended = false;
            while (stack.back().idx < fl.size()) {
                const CellId next = fl[stack.back().idx++];
                if (next == tail || !v.in_a(next))
                    continue;
                char& col = color[static_cast<std::size_t>(next)];
                if (col == Gray) {
                    // Found a closed path; reconstruct it.
                    report.ok = false;
                    std::size_t pos = 0;
                    while (pos < stack.size() && stack[pos].tail != next)
                        ++pos;
                    std::vector<CellId> cycle;
                    for (std::size_t i = pos; i < stack.size(); ++i) {
                        cycle.push_back(stack[i].tail);
                        cycle.push_back(v.partner_up(stack[i].tail));
                    }
                    cycle.push_back(next);
                    report.cycle = cycle;
                    report.violations.push_back({FieldViolation::Kind::Cycle,
                                                 "closed path through cell " + std::to_string(next),
                                                 cycle});
                    return report;
                }
                if (col == White) {
                    col = Gray;
                    stack.push_back({next, 0});
                    descended = true;
                    break;
                }
            }
            if (!descended) {
                color[static_cast<std::size_t>(tail)] = Black;
                stack.pop_back();
            }
        }
    }
    return report;
}

namespace {

/// Shared machinery of the lower-star extension: pair cells of one star
/// subset greedily, smallest key first, pairing a cell with its unique
/// available face whenever there is exactly one.
class StarProcessor {
public:
    StarProcessor(const CellComplex& k,
                  const std::vector<std::vector<std::int32_t>>& keys,
                  std::vector<std::pair<CellId, CellId>>& pairs_out)
        : k_(k), keys_(keys), pairs_(pairs_out) {}

    /// `cells` must be sorted by key.  `allowed_pair` filters tail candidates
    /// for a given head.  Cells already decided elsewhere must not appear.
    void run(const std::vector<CellId>& cells,
             const std::vector<char>& in_set,
             const std::vector<char>& in_boundary,
             bool forbid_boundary_pairs) {
        auto pair_allowed = [&](CellId face, CellId cell) {
            if (!forbid_boundary_pairs)
                return true;
            return !(in_boundary[static_cast<std::size_t>(face)] &&
                     in_boundary[static_cast<std::size_t>(cell)]);
        };

        std::map<CellId, int> avail; // available (unpaired, allowed) face count
        std::map<CellId, char> state; // 0 open, 1 paired, 2 critical
        for (CellId c : cells)
            state[c] = 0;

        auto count_avail = [&](CellId c) {
            int n = 0;
            for (CellId f : k_.faces(c))
                if (in_set[static_cast<std::size_t>(f)] && state.at(f) == 0 && pair_allowed(f, c))
                    ++n;
            return n;
        };
        auto the_avail_face = [&](CellId c) -> CellId {
            for (CellId f : k_.faces(c))
                if (in_set[static_cast<std::size_t>(f)] && state.at(f) == 0 && pair_allowed(f, c))
                    return f;
            return kNoCell;
        };

        auto key_less = [&](CellId a, CellId b) {
            const auto& ka = keys_[static_cast<std::size_t>(a)];
            const auto& kb = keys_[static_cast<std::size_t>(b)];
            if (ka != kb)
                return ka < kb;
            return a < b;
        };
        using Queue = std::set<CellId, decltype(key_less)>;
        Queue one_free(key_less);
        Queue zero_free(key_less);

        for (CellId c : cells) {
            avail[c] = count_avail(c);
            if (avail[c] == 0)
                zero_free.insert(c);
            else if (avail[c] == 1)
                one_free.insert(c);
        }

        auto settle = [&](CellId decided) {
            // A cell just became unavailable; update its cofaces in the set.
            for (CellId c : k_.cofaces(decided)) {
                if (!in_set[static_cast<std::size_t>(c)] || state.at(c) != 0)
                    continue;
                const int n = count_avail(c);
                if (n != avail[c]) {
                    one_free.erase(c);
                    zero_free.erase(c);
                    avail[c] = n;
                    if (n == 0)
                        zero_free.insert(c);
                    else if (n == 1)
                        one_free.insert(c);
                }
            }
        };

        while (!one_free.empty() || !zero_free.empty()) {
            while (!one_free.empty()) {
                const CellId c = *one_free.begin();
                one_free.erase(one_free.begin());
                if (state.at(c) != 0)
                    continue;
                if (count_avail(c) != 1) {
                    if (count_avail(c) == 0)
                        zero_free.insert(c);
                    continue;
                }
                const CellId tail = the_avail_face(c);
                state[c] = 1;
                state[tail] = 1;
                one_free.erase(tail);
                zero_free.erase(tail);
                pairs_.emplace_back(tail, c);
                settle(tail);
                settle(c);
            }
            if (!zero_free.empty()) {
                const CellId c = *zero_free.begin();
                zero_free.erase(zero_free.begin());
                if (state.at(c) != 0)
                    continue;
                if (count_avail(c) != 0) {
                    one_free.insert(c);
                    continue;
                }
                state[c] = 2; // critical
                settle(c);
            }
        }
    }

private:
    const CellComplex& k_;
    const std::vector<std::vector<std::int32_t>>& keys_;
    std::vector<std::pair<CellId, CellId>>& pairs_;
};

} // namespace

GradientField extend_from_vertex_values(const CellComplex& k,
                                        const std::vector<double>& vertex_values,
                                        const BoundarySubcomplex* boundary) {
    // Vertices are the 0-cells in id order.
    std::vector<CellId> vertices;
    for (CellId c = 0; c < k.size(); ++c)
        if (k.dim(c) == 0)
            vertices.push_back(c);
    if (vertex_values.size() != vertices.size())
        throw MalformedInputError("need one value per vertex: got " +
                                  std::to_string(vertex_values.size()) + " for " +
                                  std::to_string(vertices.size()) + " vertices");

    // Rank vertices by (value, id): a symbolic perturbation making all
    // values distinct.
    std::vector<std::size_t> order(vertices.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (vertex_values[a] != vertex_values[b])
            return vertex_values[a] < vertex_values[b];
        return vertices[a] < vertices[b];
    });
    std::vector<std::int32_t> rank_of(static_cast<std::size_t>(k.size()), -1);
    for (std::size_t i = 0; i < order.size(); ++i)
        rank_of[static_cast<std::size_t>(vertices[order[i]])] = static_cast<std::int32_t>(i);

    // Per-cell key: vertex ranks sorted descending.  Computed bottom-up.
    std::vector<std::vector<CellId>> by_dim(static_cast<std::size_t>(k.dimension()) + 1);
    for (CellId c = 0; c < k.size(); ++c)
        by_dim[static_cast<std::size_t>(k.dim(c))].push_back(c);

    std::vector<std::vector<std::int32_t>> keys(static_cast<std::size_t>(k.size()));
    for (CellId c : by_dim[0])
        keys[static_cast<std::size_t>(c)] = {rank_of[static_cast<std::size_t>(c)]};
    for (std::size_t d = 1; d < by_dim.size(); ++d) {
        for (CellId c : by_dim[d]) {
            std::set<std::int32_t, std::greater<std::int32_t>> ranks;
            for (CellId f : k.faces(c))
                for (std::int32_t r : keys[static_cast<std::size_t>(f)])
                    ranks.insert(r);
            keys[static_cast<std::size_t>(c)].assign(ranks.begin(), ranks.end());
        }
    }

    // Group cells into lower stars by their highest-ranked vertex.
    std::vector<std::vector<CellId>> star(vertices.size());
    for (CellId c = 0; c < k.size(); ++c) {
        const std::int32_t top = keys[static_cast<std::size_t>(c)].front();
        star[static_cast<std::size_t>(top)].push_back(c);
    }

    std::vector<char> in_boundary(static_cast<std::size_t>(k.size()), 0);
    if (boundary != nullptr && !boundary->empty()) {
        for (CellId parent : boundary->to_parent)
            in_boundary[static_cast<std::size_t>(parent)] = 1;
    }

    std::vector<std::pair<CellId, CellId>> pairs;
    std::vector<char> in_set(static_cast<std::size_t>(k.size()), 0);

    auto key_sort = [&](std::vector<CellId>& cells) {
        std::sort(cells.begin(), cells.end(), [&](CellId a, CellId b) {
            const auto& ka = keys[static_cast<std::size_t>(a)];
            const auto& kb = keys[static_cast<std::size_t>(b)];
            if (ka != kb)
                return ka < kb;
            return a < b;
        });
    };

    StarProcessor processor(k, keys, pairs);
    for (std::size_t rank = 0; rank < star.size(); ++rank) {
        auto& cells = star[rank];
        if (cells.empty())
            continue;
        key_sort(cells);

        const bool split = boundary != nullptr && !boundary->empty() &&
                           in_boundary[static_cast<std::size_t>(vertices[order[rank]])];
        if (split) {
            // Pair the boundary part of the star first so the result
            // restricts to a field on the boundary subcomplex; the leftover
            // boundary cells may then pair into the interior, but never with
            // each other.
            std::vector<CellId> phase1;
            for (CellId c : cells)
                if (in_boundary[static_cast<std::size_t>(c)])
                    phase1.push_back(c);
            const std::size_t pairs_before = pairs.size();
            for (CellId c : phase1)
                in_set[static_cast<std::size_t>(c)] = 1;
            processor.run(phase1, in_set, in_boundary, false);
            for (CellId c : phase1)
                in_set[static_cast<std::size_t>(c)] = 0;

            std::set<CellId> decided;
            for (std::size_t i = pairs_before; i < pairs.size(); ++i) {
                decided.insert(pairs[i].first);
                decided.insert(pairs[i].second);
            }
            std::vector<CellId> phase2;
            for (CellId c : cells)
                if (!decided.count(c))
                    phase2.push_back(c);
            for (CellId c : phase2)
                in_set[static_cast<std::size_t>(c)] = 1;
            processor.run(phase2, in_set, in_boundary, true);
            for (CellId c : phase2)
                in_set[static_cast<std::size_t>(c)] = 0;
        } else {
            for (CellId c : cells)
                in_set[static_cast<std::size_t>(c)] = 1;
            processor.run(cells, in_set, in_boundary, false);
            for (CellId c : cells)
                in_set[static_cast<std::size_t>(c)] = 0;
        }
    }
    return GradientField::from_pairs(k, pairs);
}

MorseFunction function_from_vertex_values(const CellComplex& k,
                                          const std::vector<double>& vertex_values) {
    std::vector<CellId> vertices;
    for (CellId c = 0; c < k.size(); ++c)
        if (k.dim(c) == 0)
            vertices.push_back(c);
    if (vertex_values.size() != vertices.size())
        throw MalformedInputError("need one value per vertex");

    std::vector<double> values(static_cast<std::size_t>(k.size()),
                               -std::numeric_limits<double>::infinity());
    std::vector<std::vector<CellId>> by_dim(static_cast<std::size_t>(k.dimension()) + 1);
    for (CellId c = 0; c < k.size(); ++c)
        by_dim[static_cast<std::size_t>(k.dim(c))].push_back(c);
    for (std::size_t i = 0; i < vertices.size(); ++i)
        values[static_cast<std::size_t>(vertices[i])] = vertex_values[i];
    for (std::size_t d = 1; d < by_dim.size(); ++d)
        for (CellId c : by_dim[d])
            for (CellId f : k.faces(c))
                values[static_cast<std::size_t>(c)] =
                    std::max(values[static_cast<std::size_t>(c)], values[static_cast<std::size_t>(f)]);
    return MorseFunction(std::move(values));
}

VPathSet enumerate_vpaths(const CellComplex& k, const GradientField& v,
                          CellId start, std::size_t max_paths) {
    if (!k.valid_cell(start))
        throw ContractError("start cell out of range");
    if (v.in_b(start))
        throw ContractError("paths start at a tail cell or at the faces of a critical cell");

    VPathSet out;
    const std::size_t max_len = 2 * static_cast<std::size_t>(k.size()) + 2;

    // Depth-first enumeration, faces in ascending id order.  `path` always
    // ends with the [tail, head] of the frame on top of the stack.
    std::vector<CellId> path;
    auto emit_through = [&](CellId terminal) {
        if (out.paths.size() >= max_paths) {
            out.truncated = true;
            return;
        }
        VPath p;
        p.cells = path;
        p.cells.push_back(terminal);
        out.paths.push_back(std::move(p));
    };
    auto emit_as_is = [&]() {
        if (out.paths.size() >= max_paths) {
            out.truncated = true;
            return;
        }
        VPath p;
        p.cells = path;
        out.paths.push_back(std::move(p));
    };

    auto walk = [&](CellId first_tail) {
        struct Frame {
            CellId tail;
            std::size_t idx;
            bool dead_end; // no face of the head other than the tail itself
        };
        std::vector<Frame> stack;

        if (!v.in_a(first_tail)) {
            emit_through(first_tail);
            return;
        }
        stack.push_back({first_tail, 0, true});
        path.push_back(first_tail);
        path.push_back(v.partner_up(first_tail));

        while (!stack.empty() && !out.truncated) {
            const CellId tail = stack.back().tail;
            const CellId head = v.partner_up(tail);
            const auto& fl = k.faces(head);
            bool descended = false;
            while (stack.back().idx < fl.size()) {
                const CellId next = fl[stack.back().idx++];
                if (next == tail)
                    continue;
                stack.back().dead_end = false;
                if (v.in_a(next)) {
                    if (path.size() >= max_len) {
                        out.truncated = true; // length guard; field likely invalid
                        break;
                    }
                    stack.push_back({next, 0, true});
                    path.push_back(next);
                    path.push_back(v.partner_up(next));
                    descended = true;
                    break;
                }
                emit_through(next);
                if (out.truncated)
                    break;
            }
            if (descended)
                continue;
            if (stack.back().idx >= fl.size() && !out.truncated) {
                if (stack.back().dead_end)
                    emit_as_is(); // path ends at the head itself
                stack.pop_back();
                path.pop_back();
                path.pop_back();
            }
        }
    };

    if (v.is_critical(start)) {
        for (CellId face : k.faces(start)) {
            if (out.truncated)
                break;
            walk(face);
        }
    } else {
        walk(start);
    }
    return out;
}

namespace {

/// Path counts from each level-p cell to the target tau, saturated.
class PathCounter {
public:
    PathCounter(const CellComplex& k, const GradientField& v, CellId tau)
        : k_(k), v_(v), tau_(tau) {}

    std::uint64_t count(CellId c) {
        auto it = memo_.find(c);
        if (it != memo_.end())
            return it->second;

        // Iterative post-order evaluation.
        std::vector<CellId> stack{c};
        while (!stack.empty()) {
            const CellId cur = stack.back();
            if (memo_.count(cur)) {
                stack.pop_back();
                continue;
            }
            if (cur == tau_) {
                memo_[cur] = 1;
                stack.pop_back();
                continue;
            }
            if (!v_.in_a(cur)) {
                memo_[cur] = 0;
                stack.pop_back();
                continue;
            }
            const CellId head = v_.partner_up(cur);
            bool ready = true;
            for (CellId next : k_.faces(head)) {
                if (next == cur)
                    continue;
                if (!memo_.count(next)) {
                    stack.push_back(next);
                    ready = false;
                }
            }
            if (!ready)
                continue;
            std::uint64_t total = 0;
            for (CellId next : k_.faces(head)) {
                if (next == cur)
                    continue;
                total = saturating_add(total, memo_.at(next));
            }
            memo_[cur] = total;
            stack.pop_back();
        }
        return memo_.at(c);
    }

private:
    const CellComplex& k_;
    const GradientField& v_;
    CellId tau_;
    std::unordered_map<CellId, std::uint64_t> memo_;
};

} // namespace

std::size_t count_connecting_paths(const CellComplex& k, const GradientField& v,
                                   CellId sigma, CellId tau) {
    if (k.dim(sigma) != k.dim(tau) + 1)
        throw ContractError("connecting paths require cells of adjacent dimension");
    PathCounter counter(k, v, tau);
    std::uint64_t total = 0;
    for (CellId face : k.faces(sigma))
        total = saturating_add(total, counter.count(face));
    return static_cast<std::size_t>(total);
}

GradientField cancel(const CellComplex& k, const GradientField& v,
                     CellId sigma, CellId tau) {
    if (!v.is_critical(sigma) || !v.is_critical(tau))
        throw ContractError("cancellation requires two critical cells");
    if (k.dim(sigma) != k.dim(tau) + 1)
        throw ContractError("cancellation requires critical cells of adjacent dimension");

    const std::size_t n_paths = count_connecting_paths(k, v, sigma, tau);
    if (n_paths == 0)
        throw CancelError("no connecting path between cells " + std::to_string(sigma) +
                              " and " + std::to_string(tau),
                          0);
    if (n_paths > 1)
        throw CancelError("cells " + std::to_string(sigma) + " and " + std::to_string(tau) +
                              " are joined by " + std::to_string(n_paths) +
                              " paths; cancellation needs exactly one",
                          n_paths);

    // Recover the unique path by following positive counts.
    PathCounter counter(k, v, tau);
    CellId cur = kNoCell;
    for (CellId face : k.faces(sigma)) {
        if (counter.count(face) > 0) {
            cur = face;
            break;
        }
    }

    std::vector<CellId> tails{cur};
    std::vector<CellId> heads;
    while (cur != tau) {
        const CellId head = v.partner_up(cur);
        heads.push_back(head);
        CellId next = kNoCell;
        for (CellId f : k.faces(head)) {
            if (f != cur && counter.count(f) > 0) {
                next = f;
                break;
            }
        }
        tails.push_back(next);
        cur = next;
    }

    // Reverse the arrows along the path: each tail now pairs with the head
    // one step closer to sigma.
    auto pairs = v.pairs();
    std::set<std::pair<CellId, CellId>> removed;
    for (std::size_t i = 0; i + 1 < tails.size(); ++i)
        removed.insert({tails[i], heads[i]});
    pairs.erase(std::remove_if(pairs.begin(), pairs.end(),
                               [&](const auto& p) { return removed.count(p) > 0; }),
                pairs.end());
    pairs.emplace_back(tails[0], sigma);
    for (std::size_t i = 1; i < tails.size(); ++i)
        pairs.emplace_back(tails[i], heads[i - 1]);

    GradientField out = GradientField::from_pairs(k, pairs);
    const FieldReport check = validate_field(k, out);
    if (!check.ok)
        throw std::logic_error("cancellation produced an invalid field");
    return out;
}

GradientField simplify(const CellComplex& k, const GradientField& v,
                       double threshold, const MorseFunction& f) {
    if (f.size() != static_cast<std::size_t>(k.size()))
        throw MalformedInputError("function value count does not match cell count");
    if (threshold < 0)
        throw ContractError("simplification threshold must be non-negative");

    GradientField current = v;
    while (true) {
        struct Candidate {
            double diff;
            CellId sigma, tau;
        };
        std::vector<Candidate> candidates;
        const auto& crit = current.critical();
        for (CellId sigma : crit) {
            for (CellId tau : crit) {
                if (k.dim(sigma) != k.dim(tau) + 1)
                    continue;
                const double diff = f(sigma) - f(tau);
                if (diff < threshold)
                    candidates.push_back({diff, sigma, tau});
            }
        }
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
            if (a.diff != b.diff)
                return a.diff < b.diff;
            if (a.sigma != b.sigma)
                return a.sigma < b.sigma;
            return a.tau < b.tau;
        });

        bool cancelled = false;
        for (const Candidate& c : candidates) {
            if (count_connecting_paths(k, current, c.sigma, c.tau) != 1)
                continue; // ambiguous or disconnected; skip
            current = cancel(k, current, c.sigma, c.tau);
            cancelled = true;
            break;
        }
        if (!cancelled)
            break;
    }
    return current;
}

} // namespace dmorse
