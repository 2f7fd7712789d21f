#include "nicholson/structure.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace nicholson {

namespace {

ZeroPattern pattern_from(int n, const std::vector<QuasiPeriodicSignal>& a) {
    ZeroPattern p;
    p.n = n;
    p.nonzero = bool_matrix_t::Constant(n, n, false);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            p.nonzero(i, j) = !a[static_cast<std::size_t>(i) * n + j].is_identically_zero();
        }
    }
    return p;
}

/// Tarjan strongly connected components on the graph with edge j -> i when
/// nonzero(i, j). Returns the component id per vertex (ids unordered).
std::vector<int> tarjan_scc(const ZeroPattern& p, int& component_count) {
    const int n = p.n;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (p.nonzero(i, j)) adj[static_cast<std::size_t>(j)].push_back(i);
        }
    }
    std::vector<int> index(static_cast<std::size_t>(n), -1);
    std::vector<int> lowlink(static_cast<std::size_t>(n), 0);
    std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
    std::vector<int> stack;
    std::vector<int> component(static_cast<std::size_t>(n), -1);
    int next_index = 0;
    component_count = 0;

    // Iterative DFS: frame = (vertex, next adjacency position).
    std::vector<std::pair<int, std::size_t>> frames;
    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] != -1) continue;
        frames.emplace_back(root, 0);
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos == 0) {
                index[static_cast<std::size_t>(v)] = next_index;
                lowlink[static_cast<std::size_t>(v)] = next_index;
                ++next_index;
                stack.push_back(v);
                on_stack[static_cast<std::size_t>(v)] = true;
            }
            bool descended = false;
            while (pos < adj[static_cast<std::size_t>(v)].size()) {
                const int w = adj[static_cast<std::size_t>(v)][pos];
                ++pos;
                if (index[static_cast<std::size_t>(w)] == -1) {
                    frames.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (on_stack[static_cast<std::size_t>(w)]) {
                    lowlink[static_cast<std::size_t>(v)] =
                        std::min(lowlink[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
                }
            }
            if (descended) continue;
            if (lowlink[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
                while (true) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = false;
                    component[static_cast<std::size_t>(w)] = component_count;
                    if (w == v) break;
                }
                ++component_count;
            }
            const int finished = v;
            frames.pop_back();
            if (!frames.empty()) {
                const int parent = frames.back().first;
                lowlink[static_cast<std::size_t>(parent)] =
                    std::min(lowlink[static_cast<std::size_t>(parent)],
                             lowlink[static_cast<std::size_t>(finished)]);
            }
        }
    }
    return component;
}

}  // namespace

ZeroPattern zero_pattern(const DelaySystem& sys) {
    check_structure(sys);
    return pattern_from(sys.n, sys.a);
}

ZeroPattern zero_pattern(const LinearDelaySystem& sys) {
    check_structure(sys);
    return pattern_from(sys.n, sys.a);
}

BlockStructure condense(const ZeroPattern& pattern) {
    const int n = pattern.n;
    if (n < 1) throw std::invalid_argument("condense: empty pattern");

    int k = 0;
    const std::vector<int> component = tarjan_scc(pattern, k);

    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    for (int v = 0; v < n; ++v) members[static_cast<std::size_t>(component[static_cast<std::size_t>(v)])].push_back(v);
    std::vector<int> min_member(static_cast<std::size_t>(k));
    for (int b = 0; b < k; ++b) {
        std::sort(members[static_cast<std::size_t>(b)].begin(), members[static_cast<std::size_t>(b)].end());
        min_member[static_cast<std::size_t>(b)] = members[static_cast<std::size_t>(b)].front();
    }

    // Condensation DAG edges follow the flow direction j -> i; sources first
    // gives the block lower triangular order.
    std::vector<int> indegree(static_cast<std::size_t>(k), 0);
    bool_matrix_t dag_edge = bool_matrix_t::Constant(k, k, false);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!pattern.nonzero(i, j)) continue;
            const int bi = component[static_cast<std::size_t>(i)];
            const int bj = component[static_cast<std::size_t>(j)];
            if (bi != bj && !dag_edge(bj, bi)) {
                dag_edge(bj, bi) = true;
                ++indegree[static_cast<std::size_t>(bi)];
            }
        }
    }

    // Kahn topological order, ties broken by smallest original patch index.
    using HeapItem = std::pair<int, int>;  // (min original index, block id)
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> ready;
    for (int b = 0; b < k; ++b) {
        if (indegree[static_cast<std::size_t>(b)] == 0) ready.emplace(min_member[static_cast<std::size_t>(b)], b);
    }
    BlockStructure out;
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(k));
    while (!ready.empty()) {
        const int b = ready.top().second;
        ready.pop();
        order.push_back(b);
        for (int c = 0; c < k; ++c) {
            if (dag_edge(b, c) && --indegree[static_cast<std::size_t>(c)] == 0) {
                ready.emplace(min_member[static_cast<std::size_t>(c)], c);
            }
        }
    }
    if (static_cast<int>(order.size()) != k) {
        throw std::logic_error("condense: condensation graph is not acyclic");
    }

    for (int b : order) {
        out.blocks.push_back(members[static_cast<std::size_t>(b)]);
        out.block_sizes.push_back(static_cast<int>(members[static_cast<std::size_t>(b)].size()));
        for (int v : members[static_cast<std::size_t>(b)]) out.permutation.push_back(v);
    }
    auto [I, J] = index_sets(out, pattern);
    out.I = std::move(I);
    out.J = std::move(J);
    return out;
}

std::pair<std::vector<int>, std::vector<int>> index_sets(const BlockStructure& structure,
                                                         const ZeroPattern& pattern) {
    const int n = pattern.n;
    if (static_cast<int>(structure.permutation.size()) != n) {
        throw std::invalid_argument("index_sets: permutation size inconsistent with pattern");
    }
    std::vector<int> block_of(static_cast<std::size_t>(n), -1);
    int total = 0;
    for (std::size_t b = 0; b < structure.blocks.size(); ++b) {
        for (int v : structure.blocks[b]) {
            if (v < 0 || v >= n || block_of[static_cast<std::size_t>(v)] != -1) {
                throw std::invalid_argument("index_sets: blocks do not partition the patches");
            }
            block_of[static_cast<std::size_t>(v)] = static_cast<int>(b);
            ++total;
        }
    }
    if (total != n) throw std::invalid_argument("index_sets: blocks do not cover all patches");

    const int k = structure.block_count();
    std::vector<bool> row_clean(static_cast<std::size_t>(k), true);
    std::vector<bool> col_clean(static_cast<std::size_t>(k), true);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!pattern.nonzero(i, j)) continue;
            const int bi = block_of[static_cast<std::size_t>(i)];
            const int bj = block_of[static_cast<std::size_t>(j)];
            if (bi == bj) continue;
            if (bi < bj) {
                throw std::invalid_argument("index_sets: permuted pattern is not block lower triangular");
            }
            row_clean[static_cast<std::size_t>(bi)] = false;
            col_clean[static_cast<std::size_t>(bj)] = false;
        }
    }
    std::vector<int> I;
    std::vector<int> J;
    for (int b = 0; b < k; ++b) {
        if (row_clean[static_cast<std::size_t>(b)]) I.push_back(b);
        if (col_clean[static_cast<std::size_t>(b)]) J.push_back(b);
    }
    return {I, J};
}

}  // namespace nicholson
