#ifndef SLIMCHAIN_SLACK_HPP
#define SLIMCHAIN_SLACK_HPP

#include <slimchain/chain.hpp>
#include <slimchain/dedup.hpp>
#include <slimchain/wire.hpp>

#include <cstdint>

namespace slimchain {

/*
 * Compact transaction layout (format 1). Fixed-width fields whose common
 * values need a single bit are replaced by presence bits:
 *
 *   input count, output count     original varint bytes (width preserved)
 *   header bitmap                 4 tx bits + 3 bits per input, LSB first, padded to bytes
 *                                   tx bits: version in {1,2}, version == 2, has witness, lock_time == 0
 *                                   input bits: prevout form (2 bits), sequence == 0xFFFFFFFF
 *   [version]                     4 bytes unless version in {1,2}
 *   [lock_time]                   4 bytes unless zero
 *   [witness stack counts]        original varints, one per input, if has witness
 *   [reference bitmap]            one bit per script slot when script references are enabled
 *   inputs                        prevout by form: coinbase -> nothing,
 *                                   local -> LE32 height + LE16 tx index + varint output index,
 *                                   foreign -> original 36 bytes;
 *                                 script; [sequence]
 *   outputs                       value as minimal varint (LE64 when compaction is off); script
 *   witness items                 script slots
 *
 * A script slot is either the original length-prefixed bytes or an 8-byte
 * script-store key. Standalone compact transactions start with one format
 * byte: 0x10 | option bits.
 */

inline constexpr std::uint8_t COMPACT_FORMAT_VERSION = 0x10;
inline constexpr std::uint8_t CODEC_SLACK = 0x01;
inline constexpr std::uint8_t CODEC_REFS = 0x02;

struct CodecOptions {
    bool slack = true;
    const ScriptKvs* kvs = nullptr; ///< non-null enables script references

    std::uint8_t bits() const noexcept { return (slack ? CODEC_SLACK : 0) | (kvs ? CODEC_REFS : 0); }
    std::uint8_t format_byte() const noexcept { return COMPACT_FORMAT_VERSION | bits(); }
};

enum class PrevoutForm : std::uint8_t { coinbase = 0, local = 1, foreign = 2 };

struct SlackStats {
    std::uint64_t transactions = 0;
    std::uint64_t version_escapes = 0;
    std::uint64_t locktime_escapes = 0;
    std::uint64_t sequence_escapes = 0;
    std::uint64_t coinbase_prevouts = 0;
    std::uint64_t local_prevouts = 0;
    std::uint64_t foreign_prevouts = 0;
    std::uint64_t index_overflow_fallbacks = 0; ///< prevouts whose tx index does not fit in 2 bytes
    std::uint64_t script_refs = 0;

    void merge(const SlackStats& o);
};

/** A positional prevout the resolver cannot map back to a txid. */
class UnresolvedReference : public DecodeError {
public:
    UnresolvedReference(TxLocation loc, std::size_t offset)
        : DecodeError("prevout", offset,
                      "unresolvable prevout reference (height " + std::to_string(loc.height) + ", tx " +
                          std::to_string(loc.tx_index) + ")"),
          m_loc(loc) {}
    TxLocation location() const noexcept { return m_loc; }

private:
    TxLocation m_loc;
};

class SlackEncoder {
public:
    SlackEncoder(const TxResolver& resolver, CodecOptions options) : m_resolver(resolver), m_options(options) {}

    /** Append the compact body of @p tx (no format byte). */
    void append(Bytes& out, const Transaction& tx);
    std::size_t encoded_size(const Transaction& tx);

    const CodecOptions& options() const noexcept { return m_options; }
    const SlackStats& stats() const noexcept { return m_stats; }

private:
    const TxResolver& m_resolver;
    CodecOptions m_options;
    SlackStats m_stats;
    Bytes m_scratch;
};

/**
 * Read one compact body. @p option_bits selects the layout; @p kvs is required
 * when references are enabled. Unresolvable local prevouts throw
 * UnresolvedReference, unless @p unresolved is given: then they are appended
 * there, the prevout hash is left null and parsing continues.
 */
Transaction read_compact_tx(ByteReader& r, std::uint8_t option_bits, const TxResolver& resolver,
                            const ScriptKvs* kvs = nullptr, std::vector<TxLocation>* unresolved = nullptr);

/** Standalone compact transaction: format byte + body. */
Bytes slack_encode(const Transaction& tx, const TxResolver& locator, SlackStats* stats = nullptr);
/** Inverse of slack_encode: returns the original serialized transaction bytes. */
Bytes slack_decode(ByteView compact, const TxResolver& resolver, const ScriptKvs* kvs = nullptr);
Transaction slack_decode_tx(ByteView compact, const TxResolver& resolver, const ScriptKvs* kvs = nullptr);

/** Compact block body: format byte, original tx-count varint, compact transactions. The header lives elsewhere. */
Bytes encode_compact_block(const Block& block, SlackEncoder& encoder);
std::size_t compact_block_size(const Block& block, SlackEncoder& encoder);
/**
 * @p height lets references to earlier transactions of the same block resolve
 * while decoding. With @p unresolved_txs, transactions holding unresolvable
 * prevouts are listed by index instead of aborting the decode.
 */
Block decode_compact_block(ByteView payload, const BlockHeader& header, Height height, const TxResolver& resolver,
                           const ScriptKvs* kvs = nullptr, std::vector<std::uint32_t>* unresolved_txs = nullptr);

/** Resolver that also knows the transactions decoded so far from the block being expanded. */
class BlockOverlayResolver final : public TxResolver {
public:
    BlockOverlayResolver(const TxResolver& base, Height height) : m_base(base), m_height(height) {}

    void push(const Hash256& id, std::uint32_t index) { m_local.emplace_back(index, id); }
    std::optional<TxLocation> locate(const Hash256& txid) const override;
    std::optional<Hash256> txid_at(TxLocation loc) const override;

private:
    const TxResolver& m_base;
    Height m_height;
    std::vector<std::pair<std::uint32_t, Hash256>> m_local;
};

} // namespace slimchain

#endif // SLIMCHAIN_SLACK_HPP
