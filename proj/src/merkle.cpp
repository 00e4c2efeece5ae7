#include <slimchain/merkle.hpp>

#include <algorithm>
#include <stdexcept>

namespace slimchain {

std::vector<std::vector<Hash256>> merkle_levels(std::span<const Hash256> leaves)
{
    if (leaves.empty()) throw std::invalid_argument("merkle tree needs at least one leaf");
    std::vector<std::vector<Hash256>> levels;
    levels.emplace_back(leaves.begin(), leaves.end());
    while (levels.back().size() > 1) {
        const auto& cur = levels.back();
        std::vector<Hash256> up;
        up.reserve((cur.size() + 1) / 2);
        for (std::size_t i = 0; i < cur.size(); i += 2) {
            const Hash256& right = i + 1 < cur.size() ? cur[i + 1] : cur[i];
            up.push_back(hash_pair(cur[i], right));
        }
        levels.push_back(std::move(up));
    }
    return levels;
}

Hash256 merkle_root(std::span<const Hash256> leaves)
{
    if (leaves.empty()) throw std::invalid_argument("merkle root of an empty list");
    std::vector<Hash256> cur(leaves.begin(), leaves.end());
    while (cur.size() > 1) {
        std::size_t out = 0;
        for (std::size_t i = 0; i < cur.size(); i += 2) {
            const Hash256& right = i + 1 < cur.size() ? cur[i + 1] : cur[i];
            cur[out++] = hash_pair(cur[i], right);
        }
        cur.resize(out);
    }
    return cur[0];
}

std::vector<std::uint32_t> merkle_level_widths(std::uint32_t leaves)
{
    std::vector<std::uint32_t> widths;
    if (leaves == 0) return widths;
    widths.push_back(leaves);
    while (widths.back() > 1) widths.push_back((widths.back() + 1) / 2);
    return widths;
}

std::vector<TreeNode> copath_union(std::uint32_t leaves, std::span<const std::uint32_t> kept)
{
    std::vector<TreeNode> needed;
    if (kept.empty() || leaves <= 1) return needed;
    const auto widths = merkle_level_widths(leaves);

    std::vector<std::uint32_t> known(kept.begin(), kept.end());
    for (std::size_t level = 0; level + 1 < widths.size(); ++level) {
        const std::uint32_t width = widths[level];
        std::vector<std::uint32_t> parents;
        for (std::size_t i = 0; i < known.size(); ++i) {
            const std::uint32_t idx = known[i];
            const std::uint32_t sib = idx ^ 1U;
            const bool sib_known = (i + 1 < known.size() && known[i + 1] == sib) || (i > 0 && known[i - 1] == sib);
            if (sib < width && !sib_known) needed.push_back({static_cast<std::uint32_t>(level), sib});
            const std::uint32_t parent = idx / 2;
            if (parents.empty() || parents.back() != parent) parents.push_back(parent);
        }
        known = std::move(parents);
    }
    std::sort(needed.begin(), needed.end());
    return needed;
}

std::optional<Hash256> partial_root(std::uint32_t leaves, const std::map<std::uint32_t, Hash256>& known_leaves,
                                    const std::map<TreeNode, Hash256>& nodes)
{
    if (leaves == 0 || known_leaves.empty()) return std::nullopt;
    const auto widths = merkle_level_widths(leaves);

    std::map<std::uint32_t, Hash256> cur = known_leaves;
    for (std::size_t level = 0; level + 1 < widths.size(); ++level) {
        const std::uint32_t width = widths[level];
        auto lookup = [&](std::uint32_t idx) -> const Hash256* {
            if (auto it = cur.find(idx); it != cur.end()) return &it->second;
            if (auto it = nodes.find(TreeNode{static_cast<std::uint32_t>(level), idx}); it != nodes.end()) return &it->second;
            return nullptr;
        };
        std::map<std::uint32_t, Hash256> up;
        for (const auto& [idx, hash] : cur) {
            if (idx >= width) return std::nullopt;
            const std::uint32_t parent = idx / 2;
            if (up.contains(parent)) continue;
            const std::uint32_t left = parent * 2;
            const std::uint32_t right = left + 1 < width ? left + 1 : left;
            const Hash256* l = lookup(left);
            const Hash256* r = lookup(right);
            if (!l || !r) return std::nullopt;
            up.emplace(parent, hash_pair(*l, *r));
        }
        cur = std::move(up);
    }
    if (cur.size() != 1 || cur.begin()->first != 0) return std::nullopt;
    return cur.begin()->second;
}

} // namespace slimchain
