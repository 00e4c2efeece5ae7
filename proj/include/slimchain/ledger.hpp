#ifndef SLIMCHAIN_LEDGER_HPP
#define SLIMCHAIN_LEDGER_HPP

#include <slimchain/dedup.hpp>
#include <slimchain/wire.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slimchain {

enum class BodyKind : std::uint8_t { raw = 0, minimized = 1, compact = 2 };

std::string_view kind_name(BodyKind k) noexcept;

/** One height of the hash spine. Retained heights also keep their header. */
struct SpineEntry {
    Hash256 hash;
    std::optional<BlockHeader> header;

    std::uint64_t serialized_size() const noexcept { return 1 + Hash256::size + (header ? HEADER_SIZE : 0); }
    friend bool operator==(const SpineEntry&, const SpineEntry&) = default;
};

/**
 * A retained block body. raw: the full serialized block. compact: format
 * byte, tx count and compact transactions (header taken from the spine).
 * minimized: a copath record.
 */
struct BodyRecord {
    BodyKind kind = BodyKind::raw;
    Height height = 0;
    Bytes payload;

    std::uint64_t serialized_size() const noexcept;
    friend bool operator==(const BodyRecord&, const BodyRecord&) = default;
};

struct AppliedStrategies {
    std::optional<std::uint64_t> prune_blocks; ///< resolved threshold L
    bool minimize = false;
    bool slack = false;
    bool dedup = false;

    bool empty() const noexcept { return !prune_blocks && !minimize && !slack && !dedup; }
    friend bool operator==(const AppliedStrategies&, const AppliedStrategies&) = default;
};

/** In-memory image of a store: exactly what the store files hold. */
struct Ledger {
    NetworkMagic magic = MAINNET_MAGIC;
    AppliedStrategies strategies;
    std::vector<SpineEntry> spine;
    std::vector<BodyRecord> bodies; ///< ascending heights
    ScriptKvs kvs;

    std::optional<Height> tip() const noexcept;
    std::uint64_t spine_bytes() const noexcept;
    std::uint64_t body_bytes() const noexcept;
    std::uint64_t kvs_bytes() const { return kvs.serialized_size(); }
    /** Bytes of the spine, body and script files; the manifest is not counted. */
    std::uint64_t retained_bytes() const { return spine_bytes() + body_bytes() + kvs_bytes(); }
    std::size_t count(BodyKind k) const noexcept;
    std::size_t header_count() const noexcept;

    friend bool operator==(const Ledger&, const Ledger&) = default;
};

/** Ledger with every header and every raw body: the baseline every strategy is measured against. */
Ledger full_ledger(std::span<const Block> blocks, NetworkMagic magic = MAINNET_MAGIC);

} // namespace slimchain

#endif // SLIMCHAIN_LEDGER_HPP
