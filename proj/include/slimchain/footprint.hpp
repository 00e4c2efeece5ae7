#ifndef SLIMCHAIN_FOOTPRINT_HPP
#define SLIMCHAIN_FOOTPRINT_HPP

#include <slimchain/chain.hpp>
#include <slimchain/ledger.hpp>
#include <slimchain/prune.hpp>
#include <slimchain/report.hpp>
#include <slimchain/slack.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace slimchain {

struct StrategySet {
    std::optional<PruneConfig> prune;
    bool minimize = false;
    bool slack = false;
    bool dedup = false;

    bool empty() const noexcept { return !prune && !minimize && !slack && !dedup; }
    /** "none", or the enabled strategies joined with '+' in the order prune, minimize, slack, dedup. */
    std::string label() const;
    /** Every subset of this set (including the empty one). */
    std::vector<StrategySet> subsets() const;
};

struct CompactionStats {
    PrunePlan prune;
    bool pruning = false;
    std::uint64_t hash_only_blocks = 0;
    std::uint64_t copath_blocks = 0;
    std::uint64_t full_blocks = 0;
    std::uint64_t raw_bodies = 0;
    std::uint64_t compact_bodies = 0;
    SlackStats slack;
    DedupSavings dedup;
    bool dedup_applied = false;
    std::vector<std::string> warnings;
};

struct CompactionResult {
    Ledger ledger;
    CompactionStats stats;
};

/**
 * Apply PRUNE, then MINIMIZE, then SLACK (and script dedup) to a connected
 * chain. @p state must be the ChainState built from exactly @p blocks.
 * Quantile pruning resolves its threshold from the lifespans of all outputs
 * created up to the tip and may throw QuantileUnreachable.
 *
 * Each retained body uses whichever encoding is smallest among those the
 * strategy set allows, so adding a strategy never grows a block's record.
 */
CompactionResult compact_chain(std::span<const Block> blocks, const ChainState& state, const StrategySet& strategies,
                               NetworkMagic magic = MAINNET_MAGIC);

/** 100 * (1 - retained / baseline); 0 for an empty baseline. */
double reduction_percent(double baseline, double retained) noexcept;

struct StorageRow {
    std::string strategy;
    std::uint64_t bytes = 0;
    double reduction_percent = 0.0;
};

struct StorageReport {
    std::uint64_t baseline_bytes = 0;
    std::vector<StorageRow> rows; ///< the empty set first, then by size

    const StorageRow* find(std::string_view strategy) const;
    /** Columns: strategy, bytes, reduction_percent (two decimals). */
    RecordTable table() const;
};

/** One row per subset of @p enabled. */
StorageReport estimate_footprint(std::span<const Block> blocks, const ChainState& state, const StrategySet& enabled,
                                 NetworkMagic magic = MAINNET_MAGIC);

/** Threshold in blocks for @p config on this chain. */
std::uint64_t resolve_prune_threshold(const PruneConfig& config, const ChainState& state);

} // namespace slimchain

#endif // SLIMCHAIN_FOOTPRINT_HPP
