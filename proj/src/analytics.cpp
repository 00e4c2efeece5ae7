#include <slimchain/analytics.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace slimchain {

LifespanCdf::LifespanCdf(std::vector<std::uint64_t> lifespans, std::uint64_t unbounded)
    : m_sorted(std::move(lifespans)), m_unbounded(unbounded)
{
    std::sort(m_sorted.begin(), m_sorted.end());
}

double LifespanCdf::at(std::uint64_t blocks) const
{
    if (empty()) return 0.0;
    const auto within = std::upper_bound(m_sorted.begin(), m_sorted.end(), blocks) - m_sorted.begin();
    return static_cast<double>(within) / static_cast<double>(total());
}

double LifespanCdf::spent_fraction() const
{
    if (empty()) return 0.0;
    return static_cast<double>(spent()) / static_cast<double>(total());
}

LifespanCdf lifespan_cdf(const LifespanLog& log, HeightInterval created_in, Height as_of)
{
    if (created_in.first > created_in.last) throw std::invalid_argument("empty creation interval");
    if (created_in.last > as_of) throw std::invalid_argument("creation interval extends past the as-of height");

    auto in_interval = [&](Height h) { return h >= created_in.first && h <= created_in.last; };
    std::vector<std::uint64_t> lifespans;
    std::uint64_t unbounded = 0;
    for (const SpentRecord& r : log.spent) {
        if (!in_interval(r.creation_height)) continue;
        if (r.spend_height <= as_of) lifespans.push_back(r.lifespan());
        else ++unbounded;
    }
    for (Height h : log.unspent_creation_heights) {
        if (in_interval(h)) ++unbounded;
    }
    return LifespanCdf(std::move(lifespans), unbounded);
}

std::optional<std::uint64_t> percentile(const LifespanCdf& cdf, double p)
{
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("percentile must lie in (0, 1]");
    if (cdf.empty()) return std::nullopt;
    const double n = static_cast<double>(cdf.total());
    // Smallest member count k with k / n >= p, using the same division as CDF(L).
    auto reaches = [&](std::uint64_t k) { return static_cast<double>(k) / n >= p; };
    std::uint64_t k = static_cast<std::uint64_t>(std::ceil(p * n));
    k = std::clamp<std::uint64_t>(k, 1, cdf.total());
    while (k > 1 && reaches(k - 1)) --k;
    while (k < cdf.total() && !reaches(k)) ++k;
    if (k > cdf.spent()) return std::nullopt;
    return cdf.lifespans()[k - 1];
}

std::string_view bucket_name(Bucket b) noexcept
{
    switch (b) {
    case Bucket::block_header: return "block_header";
    case Bucket::tx_header: return "tx_header";
    case Bucket::txin_fixed: return "txin_fixed";
    case Bucket::txin_script: return "txin_script";
    case Bucket::txout_fixed: return "txout_fixed";
    case Bucket::txout_script: return "txout_script";
    case Bucket::witness: return "witness";
    }
    return "?";
}

std::uint64_t CompositionBreakdown::total() const noexcept
{
    return std::accumulate(bytes.begin(), bytes.end(), std::uint64_t{0});
}

double CompositionBreakdown::fraction(Bucket b) const noexcept
{
    const std::uint64_t t = total();
    return t == 0 ? 0.0 : static_cast<double>((*this)[b]) / static_cast<double>(t);
}

void CompositionBreakdown::add_transaction(const Transaction& tx)
{
    auto& by = bytes;
    auto add = [&by](Bucket b, std::uint64_t n) { by[static_cast<std::size_t>(b)] += n; };
    add(Bucket::tx_header, 8 + (tx.has_witness ? 2 : 0));
    add(Bucket::tx_header, effective_width(tx.inputs.size(), tx.input_count_width));
    add(Bucket::tx_header, effective_width(tx.outputs.size(), tx.output_count_width));
    for (const TxIn& in : tx.inputs) {
        add(Bucket::txin_fixed, 40);
        add(Bucket::txin_script, in.script.serialized_size());
    }
    for (const TxOut& out : tx.outputs) {
        add(Bucket::txout_fixed, 8);
        add(Bucket::txout_script, out.script.serialized_size());
    }
    if (tx.has_witness) {
        for (const WitnessStack& w : tx.witnesses) {
            add(Bucket::witness, effective_width(w.items.size(), w.count_width));
            for (const VarBytes& item : w.items) add(Bucket::witness, item.serialized_size());
        }
    }
    ++transactions;
}

void CompositionBreakdown::add_block(const Block& block)
{
    bytes[static_cast<std::size_t>(Bucket::block_header)] +=
        HEADER_SIZE + effective_width(block.transactions.size(), block.tx_count_width);
    for (const Transaction& tx : block.transactions) add_transaction(tx);
    ++blocks;
}

void CompositionBreakdown::merge(const CompositionBreakdown& other)
{
    for (std::size_t i = 0; i < BUCKET_COUNT; ++i) bytes[i] += other.bytes[i];
    blocks += other.blocks;
    transactions += other.transactions;
}

std::pair<CompositionBreakdown, CompositionBreakdown>
composition_breakdown(std::span<const Block> blocks, Height segwit_boundary, Height first_height)
{
    std::pair<CompositionBreakdown, CompositionBreakdown> out;
    Height h = first_height;
    for (const Block& b : blocks) {
        (h < segwit_boundary ? out.first : out.second).add_block(b);
        ++h;
    }
    return out;
}

double DedupLocationStats::avg_length() const noexcept
{
    return duplicated_occurrences == 0 ? 0.0
                                       : static_cast<double>(total_bytes) / static_cast<double>(duplicated_occurrences);
}

namespace {

std::string key_of(ByteView s)
{
    return std::string(reinterpret_cast<const char*>(s.data()), s.size());
}

DedupLocationStats summarize(const std::unordered_map<std::string, std::uint64_t>& counts)
{
    DedupLocationStats st;
    st.distinct = counts.size();
    for (const auto& [script, n] : counts) {
        st.scripts += n;
        st.all_bytes += n * script.size();
        st.all_dedup_bytes += script.size();
        if (n >= 2) {
            ++st.duplicated_scripts;
            st.duplicated_occurrences += n;
            st.total_bytes += n * script.size();
            st.dedup_bytes += script.size();
        }
    }
    return st;
}

} // namespace

void ScriptCounter::add_input_script(ByteView s) { ++m_input[key_of(s)]; }
void ScriptCounter::add_output_script(ByteView s) { ++m_output[key_of(s)]; }

void ScriptCounter::add_transaction(const Transaction& tx)
{
    for (const TxIn& in : tx.inputs) add_input_script(in.script.data);
    for (const TxOut& out : tx.outputs) add_output_script(out.script.data);
    if (tx.has_witness) {
        for (const WitnessStack& w : tx.witnesses)
            for (const VarBytes& item : w.items) add_input_script(item.data);
    }
}

void ScriptCounter::add_block(const Block& block)
{
    for (const Transaction& tx : block.transactions) add_transaction(tx);
}

DedupStats ScriptCounter::stats() const
{
    return DedupStats{summarize(m_input), summarize(m_output)};
}

DedupStats script_dedup_stats(std::span<const Block> blocks)
{
    ScriptCounter counter;
    for (const Block& b : blocks) counter.add_block(b);
    return counter.stats();
}

std::uint64_t DormancyStats::total_utxos() const noexcept
{
    return std::accumulate(utxos.begin(), utxos.end(), std::uint64_t{0});
}

double DormancyStats::fraction_blocks_with_utxo() const noexcept
{
    if (block_count == 0) return 0.0;
    const auto with = std::accumulate(blocks_with_utxo.begin(), blocks_with_utxo.end(), std::uint64_t{0});
    return static_cast<double>(with) / static_cast<double>(block_count);
}

DormancyStats dormancy_stats(const UtxoSet& utxos, Height bucket_width, std::uint64_t block_count)
{
    if (bucket_width == 0) throw std::invalid_argument("dormancy bucket width must be positive");
    DormancyStats st;
    st.bucket_width = bucket_width;
    st.block_count = block_count;
    Height max_height = 0;
    for (const auto& [op, e] : utxos) max_height = std::max(max_height, e.creation_height);
    const std::uint64_t span = std::max<std::uint64_t>(block_count, utxos.empty() ? 0 : std::uint64_t{max_height} + 1);
    const std::size_t buckets = static_cast<std::size_t>((span + bucket_width - 1) / bucket_width);
    st.utxos.assign(buckets, 0);
    st.blocks_with_utxo.assign(buckets, 0);

    std::vector<Height> heights;
    heights.reserve(utxos.size());
    for (const auto& [op, e] : utxos) {
        ++st.utxos[e.creation_height / bucket_width];
        heights.push_back(e.creation_height);
    }
    std::sort(heights.begin(), heights.end());
    heights.erase(std::unique(heights.begin(), heights.end()), heights.end());
    for (Height h : heights) ++st.blocks_with_utxo[h / bucket_width];
    return st;
}

RecordTable lifespan_table(const LifespanCdf& cdf, HeightInterval interval, Height as_of, std::span<const double> ps)
{
    RecordTable t({"created_first", "created_last", "as_of", "percentile", "lifespan_blocks", "spent", "unbounded"});
    for (double p : ps) {
        auto l = percentile(cdf, p);
        t.add_row({interval.first, interval.last, as_of, Cell::fixed(p, 4),
                   l ? Cell(*l) : Cell("unreachable"), cdf.spent(), cdf.unbounded()});
    }
    return t;
}

RecordTable composition_table(const CompositionBreakdown& pre, const CompositionBreakdown& post)
{
    RecordTable t({"period", "bucket", "bytes", "fraction"});
    for (const auto* part : {&pre, &post}) {
        const char* period = part == &pre ? "pre_segwit" : "post_segwit";
        for (std::size_t i = 0; i < BUCKET_COUNT; ++i) {
            const auto b = static_cast<Bucket>(i);
            t.add_row({period, std::string(bucket_name(b)), (*part)[b], Cell::fixed(part->fraction(b), 6)});
        }
    }
    return t;
}

RecordTable dedup_table(const DedupStats& stats)
{
    RecordTable t({"location", "duplicated_scripts", "duplicated_occurrences", "avg_length", "total_bytes",
                   "dedup_bytes", "scripts", "all_bytes", "all_dedup_bytes"});
    for (const auto* loc : {&stats.input, &stats.output}) {
        t.add_row({loc == &stats.input ? "txin_script+witness" : "txout_script", loc->duplicated_scripts,
                   loc->duplicated_occurrences, Cell::fixed(loc->avg_length(), 2), loc->total_bytes, loc->dedup_bytes,
                   loc->scripts, loc->all_bytes, loc->all_dedup_bytes});
    }
    return t;
}

RecordTable dormancy_table(const DormancyStats& stats)
{
    RecordTable t({"height_first", "height_last", "utxos", "blocks_with_utxo"});
    for (std::size_t b = 0; b < stats.utxos.size(); ++b) {
        const std::uint64_t first = std::uint64_t{b} * stats.bucket_width;
        t.add_row({first, first + stats.bucket_width - 1, stats.utxos[b], stats.blocks_with_utxo[b]});
    }
    return t;
}

} // namespace slimchain
