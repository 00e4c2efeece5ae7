#ifndef SLIMCHAIN_MERKLE_HPP
#define SLIMCHAIN_MERKLE_HPP

#include <slimchain/hash.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace slimchain {

/**
 * Bitcoin Merkle root: pairs are hashed with double SHA-256, a level with an
 * odd number of nodes pairs its last node with itself. Throws
 * std::invalid_argument on an empty list.
 */
Hash256 merkle_root(std::span<const Hash256> leaves);

/** All tree levels, leaves first, root last. */
std::vector<std::vector<Hash256>> merkle_levels(std::span<const Hash256> leaves);

/** Number of nodes on each level for a tree with @p leaves leaves (level 0 first). */
std::vector<std::uint32_t> merkle_level_widths(std::uint32_t leaves);

struct TreeNode {
    std::uint32_t level = 0;
    std::uint32_t index = 0;
    friend auto operator<=>(const TreeNode&, const TreeNode&) = default;
};

/**
 * Nodes that must be stored so the root can be recomputed from the given
 * leaves: siblings along the leaf-to-root paths that are not themselves
 * derivable from the kept leaves. Sorted by (level, index). @p kept must be
 * sorted, unique and < leaves.
 */
std::vector<TreeNode> copath_union(std::uint32_t leaves, std::span<const std::uint32_t> kept);

/**
 * Recompute the root from a partial tree. Returns nullopt when some node
 * needed on the way up is neither a known leaf nor a supplied node.
 */
std::optional<Hash256> partial_root(std::uint32_t leaves, const std::map<std::uint32_t, Hash256>& known_leaves,
                                    const std::map<TreeNode, Hash256>& nodes);

} // namespace slimchain

#endif // SLIMCHAIN_MERKLE_HPP
