#include <slimchain/footprint.hpp>

#include <slimchain/minimize.hpp>

#include <algorithm>

namespace slimchain {

std::string StrategySet::label() const
{
    std::string s;
    auto add = [&s](const char* name) {
        if (!s.empty()) s += '+';
        s += name;
    };
    if (prune) add("prune");
    if (minimize) add("minimize");
    if (slack) add("slack");
    if (dedup) add("dedup");
    return s.empty() ? "none" : s;
}

std::vector<StrategySet> StrategySet::subsets() const
{
    std::vector<StrategySet> out{StrategySet{}};
    auto extend = [&out](bool enabled, auto apply) {
        if (!enabled) return;
        const std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) {
            StrategySet s = out[i];
            apply(s);
            out.push_back(s);
        }
    };
    extend(prune.has_value(), [this](StrategySet& s) { s.prune = prune; });
    extend(slack, [](StrategySet& s) { s.slack = true; });
    extend(minimize, [](StrategySet& s) { s.minimize = true; });
    extend(dedup, [](StrategySet& s) { s.dedup = true; });
    return out;
}

std::uint64_t resolve_prune_threshold(const PruneConfig& config, const ChainState& state)
{
    if (std::holds_alternative<ExplicitThreshold>(config.mode)) return config.resolve(nullptr);
    const Height tip = state.index().tip_height().value_or(0);
    const LifespanCdf cdf = lifespan_cdf(state.lifespan_log(), HeightInterval{0, tip}, tip);
    return config.resolve(&cdf);
}

namespace {

struct Pass {
    Ledger ledger;
    CompactionStats stats;
    std::vector<const Transaction*> retained;
    std::vector<std::pair<Height, std::uint32_t>> retained_at;
};

// One sweep over the chain with fixed options. kvs may be null.
Pass run_pass(std::span<const Block> blocks, const ChainState& state, const StrategySet& set, const PrunePlan& plan,
              const ScriptKvs* kvs, bool track_retained)
{
    Pass pass;
    const bool codec = set.slack || kvs;
    const CodecOptions options{set.slack, kvs};
    SlackEncoder sizer(state.index(), options);
    SlackEncoder writer(state.index(), options);

    auto& l = pass.ledger;
    l.spine.reserve(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Height h = static_cast<Height>(i);
        const Block& b = blocks[i];
        if (plan.pruned(h)) {
            l.spine.push_back(SpineEntry{b.hash(), std::nullopt});
            continue;
        }

        const std::uint64_t raw = serialized_size(b);
        const std::uint64_t compact = codec ? compact_block_size(b, sizer) : raw;
        const bool full_compact = compact < raw;
        const std::uint64_t full_cost = std::min(raw, compact);

        if (set.minimize) {
            MinimizedBlock mb = copath_block(b, state.unspent_flags(b, h));
            if (mb.mode == MinimizeMode::hash_only) {
                ++pass.stats.hash_only_blocks;
                l.spine.push_back(SpineEntry{b.hash(), std::nullopt});
                continue;
            }
            const std::uint64_t cp_raw = minimized_size(mb);
            const std::uint64_t cp_compact = codec ? minimized_size(mb, &sizer) : cp_raw;
            const bool cp_use_compact = cp_compact < cp_raw;
            if (mb.kept.size() < mb.tx_count && std::min(cp_raw, cp_compact) < full_cost) {
                ++pass.stats.copath_blocks;
                if (cp_use_compact) ++pass.stats.compact_bodies;
                else ++pass.stats.raw_bodies;
                l.spine.push_back(SpineEntry{b.hash(), b.header});
                l.bodies.push_back(
                    BodyRecord{BodyKind::minimized, h, encode_minimized(mb, cp_use_compact ? &writer : nullptr)});
                if (track_retained) {
                    for (const KeptTx& k : mb.kept) {
                        pass.retained.push_back(&b.transactions[k.position]);
                        pass.retained_at.emplace_back(h, k.position);
                    }
                }
                continue;
            }
            ++pass.stats.full_blocks;
        }

        l.spine.push_back(SpineEntry{b.hash(), b.header});
        if (full_compact) {
            ++pass.stats.compact_bodies;
            l.bodies.push_back(BodyRecord{BodyKind::compact, h, encode_compact_block(b, writer)});
        } else {
            ++pass.stats.raw_bodies;
            l.bodies.push_back(BodyRecord{BodyKind::raw, h, encode_block(b)});
        }
        if (track_retained) {
            for (std::uint32_t t = 0; t < b.transactions.size(); ++t) {
                pass.retained.push_back(&b.transactions[t]);
                pass.retained_at.emplace_back(h, t);
            }
        }
    }
    pass.stats.slack = writer.stats();
    return pass;
}

} // namespace

CompactionResult compact_chain(std::span<const Block> blocks, const ChainState& state, const StrategySet& set,
                               NetworkMagic magic)
{
    if (state.block_count() != blocks.size()) {
        throw std::invalid_argument("chain state does not match the block list");
    }
    const Height tip = blocks.empty() ? 0 : static_cast<Height>(blocks.size() - 1);

    PrunePlan plan;
    plan.tip = tip;
    std::optional<std::uint64_t> threshold;
    if (set.prune) {
        threshold = resolve_prune_threshold(*set.prune, state);
        plan = plan_prune(tip, *threshold);
        threshold = plan.threshold;
    }

    Pass pass = run_pass(blocks, state, set, plan, nullptr, set.dedup);
    if (set.dedup) {
        DedupBuilder builder;
        for (std::size_t i = 0; i < pass.retained.size(); ++i) {
            builder.add_transaction(*pass.retained[i], pass.retained_at[i].first, pass.retained_at[i].second);
        }
        DedupResult dedup = std::move(builder).finish();
        pass.stats.dedup = dedup.savings;
        if (!dedup.kvs.empty()) {
            Pass with = run_pass(blocks, state, set, plan, &dedup.kvs, false);
            with.ledger.kvs = std::move(dedup.kvs);
            if (with.ledger.retained_bytes() < pass.ledger.retained_bytes()) {
                with.stats.dedup = pass.stats.dedup;
                with.stats.dedup_applied = true;
                pass = std::move(with);
            }
        }
    }

    CompactionResult result;
    result.ledger = std::move(pass.ledger);
    result.ledger.magic = magic;
    result.ledger.strategies = AppliedStrategies{threshold, set.minimize, set.slack, set.dedup};
    result.stats = std::move(pass.stats);
    result.stats.prune = plan;
    result.stats.pruning = set.prune.has_value();
    if (set.prune && plan.no_op) result.stats.warnings.push_back(plan.warning);
    if (set.dedup && !result.stats.dedup_applied) {
        result.stats.warnings.push_back("script dedup would not reduce the store; scripts kept inline");
    }
    return result;
}

double reduction_percent(double baseline, double retained) noexcept
{
    if (baseline <= 0.0) return 0.0;
    return 100.0 * (1.0 - retained / baseline);
}

const StorageRow* StorageReport::find(std::string_view strategy) const
{
    for (const StorageRow& r : rows) {
        if (r.strategy == strategy) return &r;
    }
    return nullptr;
}

RecordTable StorageReport::table() const
{
    RecordTable t({"strategy", "bytes", "reduction_percent"});
    for (const StorageRow& r : rows) t.add_row({r.strategy, r.bytes, Cell::fixed(r.reduction_percent, 2)});
    return t;
}

StorageReport estimate_footprint(std::span<const Block> blocks, const ChainState& state, const StrategySet& enabled,
                                 NetworkMagic magic)
{
    StrategySet resolved = enabled;
    if (enabled.prune) resolved.prune = PruneConfig::blocks(resolve_prune_threshold(*enabled.prune, state));

    StorageReport report;
    std::vector<std::pair<std::size_t, StorageRow>> rows;
    const auto subsets = resolved.subsets();
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        const auto r = compact_chain(blocks, state, subsets[i], magic);
        rows.emplace_back(i, StorageRow{subsets[i].label(), r.ledger.retained_bytes(), 0.0});
    }
    report.baseline_bytes = rows.front().second.bytes;
    for (auto& [i, row] : rows) row.reduction_percent = reduction_percent(report.baseline_bytes, row.bytes);
    std::stable_sort(rows.begin() + 1, rows.end(), [](const auto& a, const auto& b) {
        return a.second.bytes > b.second.bytes;
    });
    for (auto& [i, row] : rows) report.rows.push_back(std::move(row));
    return report;
}

} // namespace slimchain
