#pragma once

#include <vector>

#include "nicholson/model.hpp"
#include "nicholson/types.hpp"

namespace nicholson {

/**
 * Support of the constant matrix A-bar of migration suprema. Since the a_ij
 * are nonnegative, sup_t a_ij(t) = 0 exactly when a_ij is identically zero,
 * so block membership and the index sets depend on this pattern only.
 */
struct ZeroPattern {
    int n = 0;
    bool_matrix_t nonzero;  // nonzero(i, j) <=> a_ij not identically zero; diagonal false

    bool operator==(const ZeroPattern& other) const {
        return n == other.n && nonzero == other.nonzero;
    }
};

/**
 * Permutation to block lower triangular form with irreducible diagonal
 * blocks, together with the deciding index sets.
 *
 * permutation[r] is the original patch listed at permuted position r, so the
 * permuted pattern is P(r, c) = nonzero(permutation[r], permutation[c]).
 * Blocks are listed sources-first (decoupled blocks first); I collects the
 * blocks with a clean off-diagonal row, J those with a clean off-diagonal
 * column (both 0-based block indices; I = J = {0} when k = 1).
 */
struct BlockStructure {
    std::vector<int> permutation;           // size n, original indices in permuted order
    std::vector<int> block_sizes;           // n_1..n_k
    std::vector<std::vector<int>> blocks;   // original indices per block, in permuted order
    std::vector<int> I;
    std::vector<int> J;

    int block_count() const { return static_cast<int>(block_sizes.size()); }

    bool operator==(const BlockStructure&) const = default;
};

ZeroPattern zero_pattern(const DelaySystem& sys);
ZeroPattern zero_pattern(const LinearDelaySystem& sys);

/**
 * Strongly connected components of the migration graph (edge j -> i when
 * a_ij is not identically zero), listed in topological order sources first,
 * ties broken by smallest original index. Also fills the index sets.
 */
BlockStructure condense(const ZeroPattern& pattern);

/// Recomputes (I, J) for a given block partition; throws when the structure
/// is inconsistent with the pattern.
std::pair<std::vector<int>, std::vector<int>> index_sets(const BlockStructure& structure,
                                                         const ZeroPattern& pattern);

}  // namespace nicholson
