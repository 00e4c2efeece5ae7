#include <slimchain/fixture.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace slimchain {

namespace {

// Deterministic draws on top of mt19937_64; the standard distributions are not
// specified bit-exactly across library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : m_gen(seed) {}

    std::uint64_t next() { return m_gen(); }
    /** Uniform in (0, 1]. */
    double unit() { return (static_cast<double>(m_gen() >> 11) + 1.0) * 0x1.0p-53; }
    bool chance(double p) { return p > 0.0 && unit() <= p; }
    /** Uniform in [lo, hi]. */
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi)
    {
        const std::uint64_t span = hi - lo + 1;
        return span == 0 ? m_gen() : lo + m_gen() % span;
    }
    Bytes bytes(std::size_t n)
    {
        Bytes b(n);
        for (auto& x : b) x = static_cast<std::uint8_t>(m_gen());
        return b;
    }
    Hash256 hash()
    {
        Bytes b = bytes(32);
        return Hash256(b);
    }

private:
    std::mt19937_64 m_gen;
};

// Independent serializer: the generator writes its own bytes so the wire
// decoder is checked against something it did not produce. Every byte is
// charged to a composition bucket as it is written.
class Writer {
public:
    Writer(Bytes& out, CompositionBreakdown* comp) : m_out(out), m_comp(comp) {}

    void le(std::uint64_t v, int n, Bucket b)
    {
        for (int i = 0; i < n; ++i) m_out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        charge(b, n);
    }
    void varint(std::uint64_t v, std::uint8_t width, Bucket b)
    {
        switch (width) {
        case 1: m_out.push_back(static_cast<std::uint8_t>(v)); break;
        case 3: m_out.push_back(0xFD); break;
        case 5: m_out.push_back(0xFE); break;
        default: m_out.push_back(0xFF); break;
        }
        if (width > 1) {
            for (int i = 0; i < width - 1; ++i) m_out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
        charge(b, width);
    }
    void raw(ByteView data, Bucket b)
    {
        m_out.insert(m_out.end(), data.begin(), data.end());
        charge(b, data.size());
    }
    void blob(const VarBytes& s, Bucket b)
    {
        varint(s.data.size(), width_of(s.data.size(), s.len_width), b);
        raw(s.data, b);
    }

    static std::uint8_t width_of(std::uint64_t v, std::uint8_t stored)
    {
        if (stored) return stored;
        if (v < 0xFD) return 1;
        if (v <= 0xFFFF) return 3;
        if (v <= 0xFFFFFFFFULL) return 5;
        return 9;
    }

private:
    void charge(Bucket b, std::size_t n)
    {
        if (m_comp) m_comp->bytes[static_cast<std::size_t>(b)] += n;
    }

    Bytes& m_out;
    CompositionBreakdown* m_comp;
};

void write_tx(Writer& w, const Transaction& tx, bool with_witness)
{
    const bool wit = with_witness && tx.has_witness;
    w.le(tx.version, 4, Bucket::tx_header);
    if (wit) {
        w.le(0x00, 1, Bucket::tx_header);
        w.le(0x01, 1, Bucket::tx_header);
    }
    w.varint(tx.inputs.size(), Writer::width_of(tx.inputs.size(), tx.input_count_width), Bucket::tx_header);
    for (const TxIn& in : tx.inputs) {
        w.raw(in.prevout.hash.view(), Bucket::txin_fixed);
        w.le(in.prevout.index, 4, Bucket::txin_fixed);
        w.blob(in.script, Bucket::txin_script);
        w.le(in.sequence, 4, Bucket::txin_fixed);
    }
    w.varint(tx.outputs.size(), Writer::width_of(tx.outputs.size(), tx.output_count_width), Bucket::tx_header);
    for (const TxOut& o : tx.outputs) {
        w.le(o.value, 8, Bucket::txout_fixed);
        w.blob(o.script, Bucket::txout_script);
    }
    if (wit) {
        for (const WitnessStack& s : tx.witnesses) {
            w.varint(s.items.size(), Writer::width_of(s.items.size(), s.count_width), Bucket::witness);
            for (const VarBytes& item : s.items) w.blob(item, Bucket::witness);
        }
    }
    w.le(tx.lock_time, 4, Bucket::tx_header);
}

Hash256 fixture_txid(const Transaction& tx)
{
    Bytes legacy;
    Writer w(legacy, nullptr);
    write_tx(w, tx, false);
    return sha256(sha256(legacy).view());
}

Hash256 fixture_merkle(std::vector<Hash256> level)
{
    while (level.size() > 1) {
        if (level.size() % 2) level.push_back(level.back());
        std::vector<Hash256> up;
        for (std::size_t i = 0; i < level.size(); i += 2) {
            Bytes cat(level[i].view().begin(), level[i].view().end());
            cat.insert(cat.end(), level[i + 1].view().begin(), level[i + 1].view().end());
            up.push_back(sha256(sha256(cat).view()));
        }
        level = std::move(up);
    }
    return level.front();
}

std::uint8_t widened(std::uint64_t v, Rng& rng)
{
    const std::uint8_t canon = Writer::width_of(v, 0);
    const std::uint8_t options[] = {3, 5, 9};
    std::vector<std::uint8_t> wider;
    for (std::uint8_t w : options) {
        if (w > canon) wider.push_back(w);
    }
    return wider[rng.range(0, wider.size() - 1)];
}

struct Pending {
    OutPoint outpoint;
    std::uint64_t value = 0;
    Height created = 0;
};

class ScriptMultiset {
public:
    void add(const Bytes& s) { ++m_counts[s]; }
    DedupLocationStats stats() const
    {
        DedupLocationStats st;
        st.distinct = m_counts.size();
        for (const auto& [s, n] : m_counts) {
            st.scripts += n;
            st.all_bytes += n * s.size();
            st.all_dedup_bytes += s.size();
            if (n > 1) {
                ++st.duplicated_scripts;
                st.duplicated_occurrences += n;
                st.total_bytes += n * s.size();
                st.dedup_bytes += s.size();
            }
        }
        return st;
    }

private:
    std::map<Bytes, std::uint64_t> m_counts;
};

class Generator {
public:
    explicit Generator(const ChainPlan& plan) : m_plan(plan), m_rng(plan.seed), m_due(plan.n_blocks)
    {
        for (std::uint32_t i = 0; i < plan.popular_scripts; ++i) {
            m_out_pool.push_back(m_rng.bytes(m_rng.range(plan.output_script_min, plan.output_script_max)));
            m_in_pool.push_back(m_rng.bytes(m_rng.range(plan.input_script_min, plan.input_script_max)));
            m_wit_pool.push_back(m_rng.bytes(33));
        }
    }

    GeneratedChain run()
    {
        GeneratedChain g;
        g.magic = m_plan.magic;
        GroundTruth& t = g.truth;
        t.segwit_boundary = m_plan.segwit_height.value_or(m_plan.n_blocks / 2);
        Hash256 prev;
        for (Height h = 0; h < m_plan.n_blocks; ++h) {
            std::vector<Transaction> txs = make_block_txs(h, t);
            Bytes raw;
            CompositionBreakdown& comp = h < t.segwit_boundary ? t.pre : t.post;
            Writer w(raw, &comp);
            std::vector<Hash256> ids;
            for (const Transaction& tx : txs) ids.push_back(fixture_txid(tx));

            w.le(0x20000000, 4, Bucket::block_header);
            w.raw(prev.view(), Bucket::block_header);
            w.raw(fixture_merkle(ids).view(), Bucket::block_header);
            w.le(1231006505ULL + 600ULL * h, 4, Bucket::block_header);
            w.le(0x207fffff, 4, Bucket::block_header);
            w.le(m_rng.next() & 0xFFFFFFFFULL, 4, Bucket::block_header);
            std::uint8_t count_width = Writer::width_of(txs.size(), 0);
            if (m_rng.chance(m_plan.noncanonical_rate)) {
                count_width = widened(txs.size(), m_rng);
                ++t.noncanonical_varints;
            }
            w.varint(txs.size(), count_width, Bucket::block_header);
            g.raw_txs.emplace_back();
            for (const Transaction& tx : txs) {
                const std::size_t at = raw.size();
                write_tx(w, tx, true);
                g.raw_txs.back().emplace_back(raw.begin() + static_cast<std::ptrdiff_t>(at), raw.end());
            }
            comp.blocks += 1;
            comp.transactions += txs.size();
            prev = sha256(sha256(ByteView(raw).first(HEADER_SIZE)).view());

            const NetworkMagic& m = m_plan.magic;
            g.block_file.insert(g.block_file.end(), m.begin(), m.end());
            for (int i = 0; i < 4; ++i) g.block_file.push_back(static_cast<std::uint8_t>(raw.size() >> (8 * i)));
            g.block_file.insert(g.block_file.end(), raw.begin(), raw.end());
            g.raw_blocks.push_back(std::move(raw));
            t.txids.push_back(std::move(ids));
        }
        for (const auto& [op, created] : m_unspent) t.unspent_creation_heights.push_back(created);
        std::sort(t.unspent_creation_heights.begin(), t.unspent_creation_heights.end());
        t.utxo_count = m_unspent.size();
        t.dedup = DedupStats{m_in_scripts.stats(), m_out_scripts.stats()};
        return g;
    }

private:
    std::uint64_t draw_lifespan()
    {
        if (m_plan.lifespan == LifespanModel::fixed) return m_plan.fixed_lifespan;
        const double l = std::floor(std::log(m_rng.unit()) / std::log1p(-m_plan.geometric_p));
        return 1 + static_cast<std::uint64_t>(l);
    }

    // Register a new output; decide when (if ever) it is spent.
    void created(const OutPoint& op, const TxOut& out, Height h, GroundTruth& t)
    {
        ++t.outputs_created;
        m_unspent.emplace(op, h);
        if (!out.script.data.empty() && out.script.data[0] == 0x6A) return;
        if (m_rng.chance(m_plan.dormant_fraction)) return;
        const std::uint64_t life = draw_lifespan();
        t.planned_lifespans.push_back(life);
        const std::uint64_t at = h + life;
        if (at < m_plan.n_blocks) m_due[at].push_back(Pending{op, out.value, h});
    }

    Bytes output_script()
    {
        if (!m_out_pool.empty() && m_rng.chance(m_plan.duplicate_rate)) {
            return m_out_pool[m_rng.range(0, m_out_pool.size() - 1)];
        }
        Bytes s = m_rng.bytes(m_rng.range(m_plan.output_script_min, m_plan.output_script_max));
        // Only planned OP_RETURN outputs may start with 0x6a.
        if (!s.empty() && s[0] == 0x6A) s[0] = 0x76;
        return s;
    }

    Bytes input_script()
    {
        if (!m_in_pool.empty() && m_rng.chance(m_plan.duplicate_rate)) {
            return m_in_pool[m_rng.range(0, m_in_pool.size() - 1)];
        }
        return m_rng.bytes(m_rng.range(m_plan.input_script_min, m_plan.input_script_max));
    }

    std::vector<TxOut> split_outputs(std::uint64_t total, std::uint32_t n)
    {
        std::vector<TxOut> outs(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            outs[i].value = total / n + (i == 0 ? total % n : 0);
            outs[i].script.data = output_script();
        }
        return outs;
    }

    // Randomly widen one varint of the transaction.
    void maybe_widen(Transaction& tx, GroundTruth& t)
    {
        if (!m_rng.chance(m_plan.noncanonical_rate)) return;
        ++t.noncanonical_varints;
        switch (m_rng.range(0, tx.has_witness ? 3 : 2)) {
        case 0: tx.input_count_width = widened(tx.inputs.size(), m_rng); break;
        case 1: tx.output_count_width = widened(tx.outputs.size(), m_rng); break;
        case 2: {
            VarBytes& s = tx.outputs[m_rng.range(0, tx.outputs.size() - 1)].script;
            s.len_width = widened(s.data.size(), m_rng);
            break;
        }
        default: {
            WitnessStack& w = tx.witnesses[m_rng.range(0, tx.witnesses.size() - 1)];
            w.count_width = widened(w.items.size(), m_rng);
            break;
        }
        }
    }

    void record_scripts(const Transaction& tx)
    {
        for (const TxIn& in : tx.inputs) m_in_scripts.add(in.script.data);
        for (const TxOut& o : tx.outputs) m_out_scripts.add(o.script.data);
        if (tx.has_witness) {
            for (const WitnessStack& w : tx.witnesses)
                for (const VarBytes& item : w.items) m_in_scripts.add(item.data);
        }
    }

    void finish_tx(Transaction& tx, std::vector<Transaction>& txs, Height h, GroundTruth& t)
    {
        maybe_widen(tx, t);
        record_scripts(tx);
        const Hash256 id = fixture_txid(tx);
        for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) created(OutPoint{id, i}, tx.outputs[i], h, t);
        ++t.transactions;
        txs.push_back(std::move(tx));
    }

    std::vector<Transaction> make_block_txs(Height h, GroundTruth& t)
    {
        std::vector<Transaction> txs;

        Transaction cb;
        TxIn cin;
        cin.prevout = OutPoint::null();
        Bytes script{0x04};
        for (int i = 0; i < 4; ++i) script.push_back(static_cast<std::uint8_t>(h >> (8 * i)));
        Bytes extra = m_rng.bytes(m_rng.range(4, 20));
        script.insert(script.end(), extra.begin(), extra.end());
        cin.script.data = std::move(script);
        cb.inputs.push_back(std::move(cin));
        cb.outputs = split_outputs(50 * COIN, static_cast<std::uint32_t>(
                                                  m_rng.range(m_plan.coinbase_outputs_min, m_plan.coinbase_outputs_max)));
        finish_tx(cb, txs, h, t);

        std::vector<Pending> due = std::move(m_due[h]);
        if (due.empty()) return txs;
        const std::uint64_t target = m_rng.range(m_plan.txs_min, m_plan.txs_max);
        const std::size_t n_tx = static_cast<std::size_t>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(target, due.size())));
        std::size_t next = 0;
        for (std::size_t k = 0; k < n_tx; ++k) {
            const std::size_t take = due.size() / n_tx + (k < due.size() % n_tx ? 1 : 0);
            Transaction tx;
            const bool segwit = m_rng.chance(m_plan.segwit_fraction);
            tx.has_witness = segwit;
            if (m_rng.chance(m_plan.odd_version_rate)) {
                tx.version = static_cast<std::uint32_t>(m_rng.range(3, 0xFFFFFFFFULL));
                ++t.odd_versions;
            } else {
                tx.version = m_rng.chance(m_plan.version2_rate) ? 2 : 1;
            }
            if (m_rng.chance(m_plan.locktime_rate)) {
                tx.lock_time = static_cast<std::uint32_t>(m_rng.range(1, 0xFFFFFFFFULL));
                ++t.nonzero_locktimes;
            }
            std::uint64_t total = 0;
            for (std::size_t j = 0; j < take; ++j) {
                const Pending& p = due[next++];
                TxIn in;
                in.prevout = p.outpoint;
                if (!segwit) in.script.data = input_script();
                if (m_rng.chance(m_plan.sequence_rate)) {
                    in.sequence = m_rng.chance(0.5) ? 0xFFFFFFFE : static_cast<std::uint32_t>(m_rng.next());
                    if (in.sequence != SEQUENCE_FINAL) ++t.nondefault_sequences;
                }
                tx.inputs.push_back(std::move(in));
                if (segwit) {
                    WitnessStack w;
                    w.items.push_back(VarBytes{m_rng.bytes(m_rng.range(71, 72)), 0});
                    if (!m_wit_pool.empty() && m_rng.chance(m_plan.duplicate_rate)) {
                        w.items.push_back(VarBytes{m_wit_pool[m_rng.range(0, m_wit_pool.size() - 1)], 0});
                    } else {
                        w.items.push_back(VarBytes{m_rng.bytes(33), 0});
                    }
                    tx.witnesses.push_back(std::move(w));
                }
                total += p.value;
                m_unspent.erase(p.outpoint);
                t.spent.push_back(SpentRecord{p.outpoint, p.created, h});
            }
            tx.outputs = split_outputs(total, static_cast<std::uint32_t>(m_rng.range(m_plan.outputs_min, m_plan.outputs_max)));
            if (m_rng.chance(m_plan.op_return_rate)) {
                TxOut o;
                o.script.data = Bytes{0x6A};
                Bytes payload = m_rng.bytes(m_rng.range(8, 40));
                o.script.data.push_back(static_cast<std::uint8_t>(payload.size()));
                o.script.data.insert(o.script.data.end(), payload.begin(), payload.end());
                tx.outputs.push_back(std::move(o));
                ++t.op_return_outputs;
            }
            if (segwit) ++t.segwit_txs;
            finish_tx(tx, txs, h, t);
        }
        return txs;
    }

    const ChainPlan& m_plan;
    Rng m_rng;
    std::vector<std::vector<Pending>> m_due;
    std::map<OutPoint, Height> m_unspent;
    std::vector<Bytes> m_out_pool;
    std::vector<Bytes> m_in_pool;
    std::vector<Bytes> m_wit_pool;
    ScriptMultiset m_in_scripts;
    ScriptMultiset m_out_scripts;
};

void require(bool ok, const std::string& what)
{
    if (!ok) throw PlanError("unsatisfiable chain plan: " + what);
}

bool is_fraction(double x) { return x >= 0.0 && x <= 1.0; }

} // namespace

void ChainPlan::validate() const
{
    require(txs_min <= txs_max, "txs_min exceeds txs_max");
    require(outputs_min >= 1, "every transaction needs at least one output");
    require(outputs_min <= outputs_max, "outputs_min exceeds outputs_max");
    require(outputs_max <= 10'000, "outputs_max above 10000");
    require(coinbase_outputs_min >= 1, "the coinbase needs at least one output");
    require(coinbase_outputs_min <= coinbase_outputs_max, "coinbase_outputs_min exceeds coinbase_outputs_max");
    require(coinbase_outputs_max <= 100'000, "coinbase_outputs_max above 100000");
    if (lifespan == LifespanModel::geometric) {
        require(geometric_p > 0.0 && geometric_p < 1.0, "geometric p must lie in (0, 1)");
    } else {
        require(fixed_lifespan >= 1, "a fixed lifespan must be at least one block (spends follow creation)");
    }
    require(is_fraction(dormant_fraction), "dormant fraction must lie in [0, 1]");
    require(output_script_min <= output_script_max, "output script length range is empty");
    require(input_script_min <= input_script_max, "input script length range is empty");
    require(output_script_max <= 10'000 && input_script_max <= 10'000, "script lengths above 10000 bytes");
    require(is_fraction(duplicate_rate) && is_fraction(segwit_fraction) && is_fraction(op_return_rate) &&
                is_fraction(odd_version_rate) && is_fraction(version2_rate) && is_fraction(locktime_rate) &&
                is_fraction(sequence_rate) && is_fraction(noncanonical_rate),
            "rates must lie in [0, 1]");
}

GeneratedChain gen_chain(const ChainPlan& plan)
{
    plan.validate();
    return Generator(plan).run();
}

void write_truth_csv(std::ostream& out, const GroundTruth& t)
{
    out << "section,key,value\n";
    auto row = [&out](const std::string& section, const std::string& key, auto value) {
        out << section << ',' << key << ',' << value << '\n';
    };
    row("summary", "transactions", t.transactions);
    row("summary", "outputs_created", t.outputs_created);
    row("summary", "spent_outputs", t.spent.size());
    row("summary", "utxo_count", t.utxo_count);
    row("summary", "op_return_outputs", t.op_return_outputs);
    row("summary", "segwit_txs", t.segwit_txs);
    row("summary", "odd_versions", t.odd_versions);
    row("summary", "nonzero_locktimes", t.nonzero_locktimes);
    row("summary", "nondefault_sequences", t.nondefault_sequences);
    row("summary", "noncanonical_varints", t.noncanonical_varints);
    row("summary", "segwit_boundary", t.segwit_boundary);
    for (std::size_t b = 0; b < BUCKET_COUNT; ++b) {
        row("composition_pre", std::string(bucket_name(static_cast<Bucket>(b))), t.pre.bytes[b]);
    }
    for (std::size_t b = 0; b < BUCKET_COUNT; ++b) {
        row("composition_post", std::string(bucket_name(static_cast<Bucket>(b))), t.post.bytes[b]);
    }
    auto dedup_rows = [&row](const std::string& section, const DedupLocationStats& s) {
        row(section, "scripts", s.scripts);
        row(section, "distinct", s.distinct);
        row(section, "duplicated_scripts", s.duplicated_scripts);
        row(section, "duplicated_occurrences", s.duplicated_occurrences);
        row(section, "total_bytes", s.total_bytes);
        row(section, "dedup_bytes", s.dedup_bytes);
    };
    dedup_rows("dedup_input", t.dedup.input);
    dedup_rows("dedup_output", t.dedup.output);
    std::map<std::uint64_t, std::uint64_t> hist;
    for (const SpentRecord& r : t.spent) ++hist[r.lifespan()];
    for (const auto& [life, n] : hist) row("lifespan_histogram", std::to_string(life), n);
}

std::vector<Bytes> gen_loose_txs(std::uint64_t seed, std::size_t count)
{
    Rng rng(seed);
    std::vector<Bytes> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Transaction tx;
        const bool coinbase = rng.chance(0.1);
        tx.has_witness = !coinbase && rng.chance(0.4);
        const std::uint64_t pick = rng.range(0, 3);
        tx.version = pick == 0 ? static_cast<std::uint32_t>(rng.next()) : pick == 1 ? 2 : 1;
        tx.lock_time = rng.chance(0.3) ? static_cast<std::uint32_t>(rng.next()) : 0;
        const std::size_t n_in = coinbase ? 1 : rng.range(1, 4);
        for (std::size_t j = 0; j < n_in; ++j) {
            TxIn in;
            in.prevout = coinbase ? OutPoint::null() : OutPoint{rng.hash(), static_cast<std::uint32_t>(rng.range(0, 300))};
            if (!tx.has_witness || rng.chance(0.2)) in.script.data = rng.bytes(rng.range(0, 300));
            if (rng.chance(0.3)) in.sequence = static_cast<std::uint32_t>(rng.next());
            if (rng.chance(0.1)) in.script.len_width = widened(in.script.data.size(), rng);
            tx.inputs.push_back(std::move(in));
            if (tx.has_witness) {
                WitnessStack w;
                const std::size_t items = j == 0 ? rng.range(1, 4) : rng.range(0, 4);
                for (std::size_t k = 0; k < items; ++k) w.items.push_back(VarBytes{rng.bytes(rng.range(0, 300)), 0});
                if (rng.chance(0.1)) w.count_width = widened(w.items.size(), rng);
                tx.witnesses.push_back(std::move(w));
            }
        }
        const std::size_t n_out = rng.range(1, 4);
        for (std::size_t j = 0; j < n_out; ++j) {
            TxOut o;
            o.value = rng.range(0, MAX_MONEY);
            o.script.data = rng.bytes(rng.range(0, 300));
            if (rng.chance(0.1)) o.script.len_width = widened(o.script.data.size(), rng);
            tx.outputs.push_back(std::move(o));
        }
        if (rng.chance(0.1)) tx.input_count_width = widened(tx.inputs.size(), rng);
        if (rng.chance(0.1)) tx.output_count_width = widened(tx.outputs.size(), rng);
        Bytes raw;
        Writer w(raw, nullptr);
        write_tx(w, tx, true);
        out.push_back(std::move(raw));
    }
    return out;
}

} // namespace slimchain
