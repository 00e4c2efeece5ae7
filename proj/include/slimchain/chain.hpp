#ifndef SLIMCHAIN_CHAIN_HPP
#define SLIMCHAIN_CHAIN_HPP

#include <slimchain/wire.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace slimchain {

/** Confirmed position of a transaction: block height and index inside the block. */
struct TxLocation {
    Height height = 0;
    std::uint32_t tx_index = 0;

    friend auto operator<=>(const TxLocation&, const TxLocation&) = default;
    friend bool operator==(const TxLocation&, const TxLocation&) = default;
};

/** Maps between txids and confirmed positions. Used to compact and expand prevouts. */
class TxResolver {
public:
    virtual ~TxResolver() = default;
    virtual std::optional<TxLocation> locate(const Hash256& txid) const = 0;
    virtual std::optional<Hash256> txid_at(TxLocation loc) const = 0;
};

struct SpineLink {
    Height height = 0;
    Hash256 block_hash;
    Hash256 prev_hash;

    friend bool operator==(const SpineLink&, const SpineLink&) = default;
};

/** Height-ordered hash spine plus a txid locator for every connected block. */
class ChainIndex final : public TxResolver {
public:
    std::optional<TxLocation> locate(const Hash256& txid) const override;
    std::optional<Hash256> txid_at(TxLocation loc) const override;

    const std::vector<SpineLink>& spine() const noexcept { return m_spine; }
    std::size_t block_count() const noexcept { return m_spine.size(); }
    std::optional<Height> tip_height() const noexcept;
    const std::vector<Hash256>& txids_at(Height h) const { return m_block_txids.at(h); }
    std::size_t tx_count() const noexcept { return m_locator.size(); }
    /** Historic duplicate txids overwritten in the locator (last writer wins). */
    std::uint64_t duplicate_txids() const noexcept { return m_duplicate_txids; }

    void append(const Block& block, std::vector<Hash256> txids);

private:
    std::vector<SpineLink> m_spine;
    std::vector<std::vector<Hash256>> m_block_txids;
    std::unordered_map<Hash256, TxLocation> m_locator;
    std::uint64_t m_duplicate_txids = 0;
};

std::optional<TxLocation> locate_tx(const ChainIndex& index, const Hash256& txid);

struct UtxoEntry {
    OutPoint outpoint;
    std::uint64_t value = 0;
    Bytes script;
    Height creation_height = 0;
};

using UtxoSet = std::unordered_map<OutPoint, UtxoEntry>;

struct SpentRecord {
    OutPoint outpoint;
    Height creation_height = 0;
    Height spend_height = 0;

    std::uint64_t lifespan() const noexcept { return spend_height - creation_height; }
    friend bool operator==(const SpentRecord&, const SpentRecord&) = default;
};

/** Spent records plus creation heights of every output still unspent at the tip. */
struct LifespanLog {
    std::vector<SpentRecord> spent;
    std::vector<Height> unspent_creation_heights;
};

class ChainError : public std::runtime_error {
public:
    enum class Kind { continuity, missing_input, invalid_outpoint, bad_merkle_root, coinbase };

    ChainError(Kind kind, Height height, const std::string& what)
        : std::runtime_error("block " + std::to_string(height) + ": " + what), m_kind(kind), m_height(height) {}

    Kind kind() const noexcept { return m_kind; }
    Height height() const noexcept { return m_height; }

private:
    Kind m_kind;
    Height m_height;
};

/** True for outputs whose script starts with OP_RETURN. */
bool is_unspendable(const TxOut& out) noexcept;

struct ChainOptions {
    /** Keep OP_RETURN outputs out of the UTXO set (they still count as ledger bytes). */
    bool exclude_unspendable = false;
};

/**
 * Chain index, UTXO set and lifespan log built by connecting blocks in
 * height order. A failed connect_block leaves the state exactly as it was.
 */
class ChainState {
public:
    explicit ChainState(ChainOptions options = {}) : m_options(options) {}

    /** Connect @p block at @p height; returns the outputs it spent. Throws ChainError. */
    std::vector<SpentRecord> connect_block(const Block& block, Height height);

    const ChainIndex& index() const noexcept { return m_index; }
    const UtxoSet& utxos() const noexcept { return m_utxos; }
    const std::vector<SpentRecord>& spent_log() const noexcept { return m_spent; }
    std::uint64_t outputs_created() const noexcept { return m_created; }
    std::uint64_t unspendable_skipped() const noexcept { return m_unspendable_skipped; }
    std::size_t block_count() const noexcept { return m_index.block_count(); }
    const ChainOptions& options() const noexcept { return m_options; }

    LifespanLog lifespan_log() const;

    /** Per-transaction flag: does the transaction still own at least one UTXO? */
    std::vector<bool> unspent_flags(const Block& block, Height height) const;

private:
    ChainOptions m_options;
    ChainIndex m_index;
    UtxoSet m_utxos;
    std::vector<SpentRecord> m_spent;
    std::uint64_t m_created = 0;
    std::uint64_t m_unspendable_skipped = 0;
};

/** Fold connect_block over @p blocks starting at height 0. */
template <typename Range>
ChainState build_chain(const Range& blocks, ChainOptions options = {})
{
    ChainState state(options);
    Height h = 0;
    for (const Block& b : blocks) state.connect_block(b, h++);
    return state;
}

} // namespace slimchain

#endif // SLIMCHAIN_CHAIN_HPP
