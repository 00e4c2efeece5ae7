#ifndef SLIMCHAIN_ANALYTICS_HPP
#define SLIMCHAIN_ANALYTICS_HPP

#include <slimchain/chain.hpp>
#include <slimchain/report.hpp>
#include <slimchain/wire.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace slimchain {

/** Inclusive range of block heights. */
struct HeightInterval {
    Height first = 0;
    Height last = 0;
};

// Lifespans ---------------------------------------------------------------------

/**
 * Empirical lifespan distribution of the outputs created in a height interval.
 * Outputs still unspent at the as-of height have unbounded lifespan: they sit
 * in the denominator but never in the numerator, so CDF(inf) = spent / total.
 */
class LifespanCdf {
public:
    LifespanCdf() = default;
    LifespanCdf(std::vector<std::uint64_t> lifespans, std::uint64_t unbounded);

    const std::vector<std::uint64_t>& lifespans() const noexcept { return m_sorted; }
    std::uint64_t spent() const noexcept { return m_sorted.size(); }
    std::uint64_t unbounded() const noexcept { return m_unbounded; }
    std::uint64_t total() const noexcept { return spent() + m_unbounded; }
    bool empty() const noexcept { return total() == 0; }

    /** Fraction of members spent within at most @p blocks blocks. */
    double at(std::uint64_t blocks) const;
    double spent_fraction() const;

private:
    std::vector<std::uint64_t> m_sorted;
    std::uint64_t m_unbounded = 0;
};

LifespanCdf lifespan_cdf(const LifespanLog& log, HeightInterval created_in, Height as_of);

/**
 * Left-continuous inverse CDF: the smallest lifespan L with CDF(L) >= p.
 * Returns nullopt when p exceeds CDF(inf). Throws std::invalid_argument for p outside (0, 1].
 */
std::optional<std::uint64_t> percentile(const LifespanCdf& cdf, double p);

// Composition ---------------------------------------------------------------------

enum class Bucket : std::size_t {
    block_header,  ///< 80-byte header plus the block's tx count varint
    tx_header,     ///< version, marker/flag, lock_time, input/output count varints
    txin_fixed,    ///< 36-byte prevout + 4-byte sequence
    txin_script,   ///< input script including its length prefix
    txout_fixed,   ///< 8-byte value
    txout_script,  ///< output script including its length prefix
    witness,       ///< witness stack counts, item length prefixes and item bytes
};
inline constexpr std::size_t BUCKET_COUNT = 7;
std::string_view bucket_name(Bucket b) noexcept;

/** Byte totals per data-type bucket; the buckets partition every serialized block byte. */
struct CompositionBreakdown {
    std::array<std::uint64_t, BUCKET_COUNT> bytes{};
    std::uint64_t blocks = 0;
    std::uint64_t transactions = 0;

    std::uint64_t operator[](Bucket b) const noexcept { return bytes[static_cast<std::size_t>(b)]; }
    std::uint64_t total() const noexcept;
    double fraction(Bucket b) const noexcept;

    void add_block(const Block& block);
    void add_transaction(const Transaction& tx);
    void merge(const CompositionBreakdown& other);

    friend bool operator==(const CompositionBreakdown&, const CompositionBreakdown&) = default;
};

inline constexpr Height MAINNET_SEGWIT_HEIGHT = 481'824;

/** Split at @p segwit_boundary: blocks below it go to .first, the rest to .second. Heights start at @p first_height. */
std::pair<CompositionBreakdown, CompositionBreakdown>
composition_breakdown(std::span<const Block> blocks, Height segwit_boundary = MAINNET_SEGWIT_HEIGHT, Height first_height = 0);

// Script duplication ------------------------------------------------------------------

/**
 * Duplication figures for one script location. "Duplicated" means a distinct
 * script seen at least twice; total/dedup bytes count only those scripts,
 * the all_* figures count every script.
 */
struct DedupLocationStats {
    std::uint64_t scripts = 0;                ///< occurrences of any script
    std::uint64_t distinct = 0;
    std::uint64_t duplicated_scripts = 0;     ///< distinct scripts occurring >= 2 times
    std::uint64_t duplicated_occurrences = 0;
    std::uint64_t total_bytes = 0;            ///< bytes of all occurrences of duplicated scripts
    std::uint64_t dedup_bytes = 0;            ///< one copy of each duplicated script
    std::uint64_t all_bytes = 0;
    std::uint64_t all_dedup_bytes = 0;

    /** Mean length over duplicated occurrences (0 when there are none). */
    double avg_length() const noexcept;

    friend bool operator==(const DedupLocationStats&, const DedupLocationStats&) = default;
};

struct DedupStats {
    DedupLocationStats input;  ///< input scripts and witness items
    DedupLocationStats output; ///< output scripts

    friend bool operator==(const DedupStats&, const DedupStats&) = default;
};

/** Exact multiset of script byte strings, per location. */
class ScriptCounter {
public:
    void add_block(const Block& block);
    void add_transaction(const Transaction& tx);
    void add_input_script(ByteView s);
    void add_output_script(ByteView s);
    DedupStats stats() const;

private:
    std::unordered_map<std::string, std::uint64_t> m_input;
    std::unordered_map<std::string, std::uint64_t> m_output;
};

DedupStats script_dedup_stats(std::span<const Block> blocks);

// Dormancy ---------------------------------------------------------------------------

struct DormancyStats {
    Height bucket_width = 1;
    std::uint64_t block_count = 0;
    std::vector<std::uint64_t> utxos;            ///< current UTXOs per creation-height bucket
    std::vector<std::uint64_t> blocks_with_utxo; ///< blocks in the bucket that created >= 1 current UTXO

    std::uint64_t total_utxos() const noexcept;
    /** Fraction of all blocks that created at least one current UTXO. */
    double fraction_blocks_with_utxo() const noexcept;
};

/** Bucket b covers heights [b*width, (b+1)*width). Throws std::invalid_argument for width 0. */
DormancyStats dormancy_stats(const UtxoSet& utxos, Height bucket_width, std::uint64_t block_count);

// Report tables -----------------------------------------------------------------------

RecordTable lifespan_table(const LifespanCdf& cdf, HeightInterval interval, Height as_of, std::span<const double> ps);
RecordTable composition_table(const CompositionBreakdown& pre, const CompositionBreakdown& post);
RecordTable dedup_table(const DedupStats& stats);
RecordTable dormancy_table(const DormancyStats& stats);

} // namespace slimchain

#endif // SLIMCHAIN_ANALYTICS_HPP
