#ifndef SLIMCHAIN_MINIMIZE_HPP
#define SLIMCHAIN_MINIMIZE_HPP

#include <slimchain/merkle.hpp>
#include <slimchain/slack.hpp>
#include <slimchain/wire.hpp>

#include <cstdint>
#include <string_view>
#include <vector>

namespace slimchain {

enum class MinimizeMode : std::uint8_t { hash_only = 0, copath = 1, full = 2 };

std::string_view mode_name(MinimizeMode m) noexcept;

struct KeptTx {
    std::uint32_t position = 0;
    Transaction tx;

    friend bool operator==(const KeptTx&, const KeptTx&) = default;
};

struct CopathNode {
    TreeNode node;
    Hash256 hash;

    friend bool operator==(const CopathNode& a, const CopathNode& b)
    {
        return a.node == b.node && a.hash == b.hash;
    }
};

/**
 * A block reduced to what is needed to authenticate its still-useful
 * transactions. hash_only keeps nothing but the block hash; copath keeps the
 * transactions with unspent outputs plus the Merkle nodes that cannot be
 * derived from them; full keeps every transaction.
 */
struct MinimizedBlock {
    Hash256 block_hash;
    Hash256 merkle_root;
    std::uint32_t tx_count = 0;
    MinimizeMode mode = MinimizeMode::hash_only;
    std::vector<KeptTx> kept;       ///< ascending positions
    std::vector<CopathNode> nodes;  ///< sorted by (level, index)
    std::uint64_t retained_bytes = 0;

    std::vector<std::uint32_t> positions() const;
    friend bool operator==(const MinimizedBlock&, const MinimizedBlock&) = default;
};

/** hash_only when nothing is unspent, otherwise copath mode without comparing costs. */
MinimizedBlock copath_block(const Block& block, const std::vector<bool>& unspent);

/**
 * hash_only when nothing is unspent; full when everything is unspent; copath
 * when its serialized record is smaller than the block; full otherwise. Throws std::invalid_argument when
 * the flag count differs from the transaction count.
 */
MinimizedBlock minimize_block(const Block& block, const std::vector<bool>& unspent);

/**
 * Recompute the root from the kept transactions and stored nodes and compare
 * it with the block's Merkle root. Throws std::invalid_argument if
 * @p position is not kept.
 */
bool verify_tx_in_minimized(const MinimizedBlock& mb, std::uint32_t position);

/** One root recomputation that checks every kept transaction at once. Throws for hash_only blocks. */
bool verify_minimized(const MinimizedBlock& mb);

inline constexpr std::uint8_t MINIMIZED_FORMAT_VERSION = 0x01;

/**
 * Copath record: format byte, mode, block hash, transaction encoding (0 = raw,
 * otherwise a compact format byte), tx count, kept count, kept positions,
 * kept transactions, node hashes. The node positions are implied by the
 * kept positions.
 */
Bytes encode_minimized(const MinimizedBlock& mb, SlackEncoder* encoder = nullptr);
std::size_t minimized_size(const MinimizedBlock& mb, SlackEncoder* encoder = nullptr);

/**
 * Inverse of encode_minimized. The Merkle root comes from @p header. With
 * @p unresolved, kept transactions holding unresolvable prevouts are listed by
 * position instead of aborting the decode.
 */
MinimizedBlock decode_minimized(ByteView payload, const BlockHeader& header, Height height,
                                const TxResolver* resolver = nullptr, const ScriptKvs* kvs = nullptr,
                                std::vector<std::uint32_t>* unresolved = nullptr);

} // namespace slimchain

#endif // SLIMCHAIN_MINIMIZE_HPP
