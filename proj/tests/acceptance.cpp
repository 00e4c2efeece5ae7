#include "helpers.hpp"

#include <slimchain/analytics.hpp>
#include <slimchain/dedup.hpp>
#include <slimchain/footprint.hpp>
#include <slimchain/minimize.hpp>
#include <slimchain/prune.hpp>
#include <slimchain/slack.hpp>
#include <slimchain/store.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <set>

using namespace slimchain;
using namespace testing_helpers;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (pass) detail = why;
        pass = false;
    }
};

int failures = 0;

void report(int n, const std::string& name, Outcome o)
{
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << n << "  " << name << "  " << o.detail << std::endl;
}

template <typename F>
void criterion(int n, const std::string& name, F&& f)
{
    Outcome o;
    try {
        f(o);
    } catch (const std::exception& e) {
        o.fail(std::string("exception: ") + e.what());
    }
    report(n, name, std::move(o));
}

// Shared corpus for the wire and SLACK criteria.
struct Corpus {
    Built chain;
    std::vector<Bytes> loose;
};

Corpus make_corpus()
{
    ChainPlan p = small_plan(1001, 1200);
    p.txs_min = 6;
    p.txs_max = 12;
    p.segwit_fraction = 0.4;
    p.noncanonical_rate = 0.05;
    p.odd_version_rate = 0.05;
    p.locktime_rate = 0.1;
    p.sequence_rate = 0.1;
    Corpus c{build(p), gen_loose_txs(1002, 2000)};
    return c;
}

std::set<TreeNode> brute_force_union(std::uint32_t n, const std::vector<std::uint32_t>& kept)
{
    std::vector<std::uint32_t> widths{n};
    while (widths.back() > 1) widths.push_back((widths.back() + 1) / 2);
    std::set<TreeNode> derivable;
    for (std::uint32_t leaf : kept) {
        std::uint32_t idx = leaf;
        for (std::uint32_t level = 0; level < widths.size(); ++level, idx /= 2) derivable.insert({level, idx});
    }
    std::set<TreeNode> needed;
    for (const TreeNode& d : derivable) {
        if (d.level + 1 == widths.size()) continue;
        const TreeNode sib{d.level, d.index ^ 1U};
        if (sib.index < widths[d.level] && !derivable.contains(sib)) needed.insert(sib);
    }
    return needed;
}

Block synthetic_block(std::uint32_t n, std::uint64_t salt)
{
    std::vector<Transaction> txs{coinbase_tx(static_cast<Height>(salt), {50})};
    for (std::uint32_t i = 1; i < n; ++i) {
        txs.push_back(spend_tx({OutPoint{sha256(Bytes{static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(salt)}), i}},
                               {1000 + i}));
    }
    return make_block(Hash256{}, txs, static_cast<std::uint32_t>(salt));
}

// True when one flipped committed byte is caught: either the record no longer decodes or the root differs.
bool tamper_detected(const MinimizedBlock& mb, std::mt19937_64& rng)
{
    std::size_t committed = mb.nodes.size() * Hash256::size;
    std::vector<Bytes> raw;
    for (const KeptTx& k : mb.kept) {
        raw.push_back(encode_transaction(k.tx, false));
        committed += raw.back().size();
    }
    std::size_t at = rng() % committed;
    const std::uint8_t mask = static_cast<std::uint8_t>(1U << (rng() % 8));
    MinimizedBlock bad = mb;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (at < raw[i].size()) {
            raw[i][at] ^= mask;
            try {
                bad.kept[i].tx = decode_transaction_exact(raw[i]);
            } catch (const DecodeError&) {
                return true;
            }
            return !verify_tx_in_minimized(bad, bad.kept[i].position);
        }
        at -= raw[i].size();
    }
    bad.nodes[at / Hash256::size].hash.data()[at % Hash256::size] ^= mask;
    return !verify_tx_in_minimized(bad, bad.kept.front().position);
}

std::optional<std::uint64_t> brute_percentile(std::vector<std::uint64_t> l, std::uint64_t unbounded, double p)
{
    const double n = static_cast<double>(l.size() + unbounded);
    if (l.empty() || static_cast<double>(l.size()) / n < p) return std::nullopt;
    const std::uint64_t max = *std::max_element(l.begin(), l.end());
    for (std::uint64_t L = 0; L <= max; ++L) {
        const auto within = std::count_if(l.begin(), l.end(), [&](std::uint64_t x) { return x <= L; });
        if (static_cast<double>(within) / n >= p) return L;
    }
    return std::nullopt;
}

Bytes slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::filesystem::path& p, const Bytes& data)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

std::uint64_t store_file_bytes(const std::filesystem::path& dir)
{
    return std::filesystem::file_size(dir / SPINE_FILE) + std::filesystem::file_size(dir / BODIES_FILE) +
           std::filesystem::file_size(dir / SCRIPTS_FILE);
}

} // namespace

int main()
{
    const Corpus corpus = make_corpus();

    criterion(1, "wire round-trip", [&](Outcome& o) {
        const auto t0 = Clock::now();
        std::uint64_t items = 0, legacy = 0, segwit = 0, coinbase = 0, ok = 0;
        auto check = [&](const Bytes& raw) {
            ++items;
            const Transaction tx = decode_transaction_exact(raw);
            ok += encode_transaction(tx) == raw;
            (tx.has_witness ? segwit : legacy) += 1;
            coinbase += tx.inputs[0].prevout.is_null();
        };
        for (const auto& block : corpus.chain.gen.raw_txs)
            for (const Bytes& raw : block) check(raw);
        for (const Bytes& raw : corpus.loose) check(raw);
        std::uint64_t blocks_ok = 0;
        for (const Bytes& raw : corpus.chain.gen.raw_blocks) blocks_ok += encode_block(decode_block(raw)) == raw;
        const double secs = seconds_since(t0);
        const std::uint64_t noncanonical = corpus.chain.gen.truth.noncanonical_varints;
        o.detail = std::to_string(ok) + "/" + std::to_string(items) + " txs, " + std::to_string(blocks_ok) + "/" +
                   std::to_string(corpus.chain.gen.raw_blocks.size()) + " blocks (legacy " + std::to_string(legacy) +
                   ", segwit " + std::to_string(segwit) + ", coinbase " + std::to_string(coinbase) +
                   ", non-canonical varints " + std::to_string(noncanonical) + "), " + std::to_string(secs) + " s";
        if (items < 10000) o.fail("corpus too small: " + o.detail);
        if (ok != items || blocks_ok != corpus.chain.gen.raw_blocks.size()) o.fail("mismatch: " + o.detail);
        if (!legacy || !segwit || !coinbase || !noncanonical) o.fail("missing case: " + o.detail);
        if (secs >= 30) o.fail("too slow: " + o.detail);
    });

    criterion(2, "SLACK losslessness", [&](Outcome& o) {
        const auto t0 = Clock::now();
        const ChainIndex& index = corpus.chain.state.index();
        const DedupResult dedup = dedup_scripts(corpus.chain.blocks);
        SlackEncoder plain(index, CodecOptions{true, nullptr});
        SlackEncoder refs(index, CodecOptions{true, &dedup.kvs});
        std::uint64_t items = 0, ok = 0;
        auto check = [&](const Bytes& raw) {
            ++items;
            const Transaction tx = decode_transaction_exact(raw);
            Bytes a, b;
            plain.append(a, tx);
            refs.append(b, tx);
            ByteReader ra(a), rb(b);
            const Transaction back_a = read_compact_tx(ra, CODEC_SLACK, index, nullptr, nullptr);
            const Transaction back_b = read_compact_tx(rb, CODEC_SLACK | CODEC_REFS, index, &dedup.kvs, nullptr);
            ok += ra.empty() && rb.empty() && encode_transaction(back_a) == raw && encode_transaction(back_b) == raw &&
                  slack_decode(slack_encode(tx, index), index) == raw;
        };
        for (const auto& block : corpus.chain.gen.raw_txs)
            for (const Bytes& raw : block) check(raw);
        for (const Bytes& raw : corpus.loose) check(raw);
        const SlackStats& s = plain.stats();
        const double secs = seconds_since(t0);
        o.detail = std::to_string(ok) + "/" + std::to_string(items) + " (version esc " + std::to_string(s.version_escapes) +
                   ", sequence esc " + std::to_string(s.sequence_escapes) + ", locktime esc " +
                   std::to_string(s.locktime_escapes) + ", foreign " + std::to_string(s.foreign_prevouts) + ", coinbase " +
                   std::to_string(s.coinbase_prevouts) + ", local " + std::to_string(s.local_prevouts) + ", script refs " +
                   std::to_string(refs.stats().script_refs) + "), " + std::to_string(secs) + " s";
        if (ok != items) o.fail("mismatch: " + o.detail);
        if (!s.version_escapes || !s.sequence_escapes || !s.locktime_escapes || !s.foreign_prevouts ||
            !s.coinbase_prevouts || !s.local_prevouts)
            o.fail("escape path not exercised: " + o.detail);
        if (secs >= 60) o.fail("too slow: " + o.detail);
    });

    criterion(3, "MINIMIZE correctness", [&](Outcome& o) {
        std::mt19937_64 rng(3003);
        // One block for every n in 1..32: fixture blocks where available, synthetic otherwise.
        ChainPlan p = small_plan(3003, 300);
        p.txs_min = 0;
        p.txs_max = 31;
        const Built chain = build(p);
        std::map<std::uint32_t, Block> by_n;
        for (const Block& b : chain.blocks) by_n.try_emplace(static_cast<std::uint32_t>(b.transactions.size()), b);
        std::uint64_t subsets = 0, verified = 0, tampers = 0, fixture_blocks = 0;
        for (std::uint32_t n = 1; n <= 32; ++n) {
            Block b;
            if (auto it = by_n.find(n); it != by_n.end()) {
                b = it->second;
                ++fixture_blocks;
            } else {
                b = synthetic_block(n, n);
            }
            auto run = [&](const std::vector<bool>& flags) {
                ++subsets;
                std::vector<std::uint32_t> kept;
                for (std::uint32_t i = 0; i < n; ++i) {
                    if (flags[i]) kept.push_back(i);
                }
                if (kept.empty()) {
                    if (minimize_block(b, flags).mode != MinimizeMode::hash_only) o.fail("empty subset not hash-only");
                    return;
                }
                const auto u = copath_union(n, kept);
                if (u.size() != brute_force_union(n, kept).size() ||
                    std::set<TreeNode>(u.begin(), u.end()) != brute_force_union(n, kept))
                    o.fail("union differs at n=" + std::to_string(n));
                const MinimizedBlock mb = copath_block(b, flags);
                for (std::uint32_t k : kept) {
                    ++verified;
                    if (!verify_tx_in_minimized(mb, k)) o.fail("kept tx fails at n=" + std::to_string(n));
                }
                ++tampers;
                if (!tamper_detected(mb, rng)) o.fail("tamper undetected at n=" + std::to_string(n));
            };
            if (n <= 8) {
                for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
                    std::vector<bool> flags(n);
                    for (std::uint32_t i = 0; i < n; ++i) flags[i] = mask >> i & 1U;
                    run(flags);
                }
            } else {
                for (int s = 0; s < 1000; ++s) {
                    std::vector<bool> flags(n);
                    const std::uint64_t density = 1 + rng() % 7;
                    for (std::uint32_t i = 0; i < n; ++i) flags[i] = rng() % 8 < density;
                    run(flags);
                }
            }
        }
        o.detail = std::to_string(subsets) + " subsets over n=1..32 (" + std::to_string(fixture_blocks) +
                   " fixture blocks), " + std::to_string(verified) + " verifications, " + std::to_string(tampers) +
                   " tampers detected";
    });

    criterion(4, "PRUNE threshold", [&](Outcome& o) {
        std::mt19937_64 rng(4004);
        std::uint64_t cases = 0, unreachable = 0;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<std::uint64_t> l(1 + rng() % 300);
            const std::uint64_t spread = 1 + rng() % 500;
            for (auto& x : l) x = rng() % spread;
            const std::uint64_t unbounded = trial % 3 == 0 ? 0 : rng() % 200;
            const LifespanCdf cdf(l, unbounded);
            for (double p : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 1.0,
                             static_cast<double>(rng() % 1000 + 1) / 1000.0}) {
                ++cases;
                const auto expected = brute_percentile(l, unbounded, p);
                const bool beyond = p > cdf.spent_fraction();
                if (beyond != !expected) o.fail("unreachable classification differs");
                try {
                    const std::uint64_t got = choose_prune_threshold(cdf, p);
                    if (!expected || got != *expected) o.fail("threshold differs in trial " + std::to_string(trial));
                } catch (const QuantileUnreachable&) {
                    ++unreachable;
                    if (expected) o.fail("reachable quantile reported unreachable");
                }
            }
        }
        std::vector<std::uint64_t> uniform(100);
        for (int i = 0; i < 100; ++i) uniform[i] = i + 1;
        const std::uint64_t u = choose_prune_threshold(LifespanCdf(uniform, 0), 0.9);
        if (u != 90) o.fail("uniform 1..100 at 0.9 gave " + std::to_string(u));
        o.detail = std::to_string(cases) + " quantiles over 100 multisets (" + std::to_string(unreachable) +
                   " unreachable), uniform 1..100 at 0.9 = " + std::to_string(u);
    });

    criterion(5, "storage table arithmetic", [&](Outcome& o) {
        struct Row {
            const char* name;
            double gb;
            double percent;
        };
        const Row rows[] = {{"snappy", 335.4, 9.7},  {"lzop", 325.3, 12.41},   {"lz4", 318.1, 14.35},
                            {"bzip2", 302.8, 18.47}, {"gzip", 300.9, 18.98},   {"zstd", 294.9, 20.59},
                            {"lzma", 279.6, 24.71},  {"prune", 51.20, 86.22},  {"slack", 265.1, 28.62},
                            {"minimize", 54.4, 85.3}, {"minimize+prune", 16.5, 95.56},
                            {"minimize+slack", 50.6, 86.37}, {"prune+slack", 42.4, 88.58},
                            {"prune+minimize+slack", 15.2, 95.90}};
        double worst = 0;
        for (const Row& r : rows) {
            const double got = reduction_percent(371.4, r.gb);
            worst = std::max(worst, std::abs(got - r.percent));
            if (std::abs(got - r.percent) > 0.1) o.fail(std::string(r.name) + " gives " + std::to_string(got));
        }
        if (reduction_percent(371.4, 371.4) != 0.0) o.fail("baseline is not 0%");
        char buf[160];
        std::snprintf(buf, sizeof buf, "%zu rows, worst deviation %.3f pp, 371.4->15.2 = %.2f%%, 371.4->51.20 = %.2f%%",
                      std::size(rows), worst, reduction_percent(371.4, 15.2), reduction_percent(371.4, 51.20));
        o.detail = buf;
    });

    criterion(6, "footprint exactness and monotonicity", [&](Outcome& o) {
        const auto t0 = Clock::now();
        ChainPlan p;
        p.seed = 6006;
        p.n_blocks = 10000;
        p.txs_min = p.txs_max = 10;
        p.geometric_p = 0.02;
        p.dormant_fraction = 0.05;
        const Built b = build(p);
        StrategySet all;
        all.prune = PruneConfig::quantile(0.5);
        all.minimize = all.slack = true;
        const StorageReport rep = estimate_footprint(b.blocks, b.state, all, p.magic);
        const double estimate_secs = seconds_since(t0);
        if (rep.rows.size() != 8) o.fail("expected 8 rows, got " + std::to_string(rep.rows.size()));

        std::map<std::string, std::uint64_t> written;
        TempDir dir;
        for (const StrategySet& s : all.subsets()) {
            const CompactionResult r = compact_chain(b.blocks, b.state, s, p.magic);
            const auto sub = dir / s.label();
            write_store(r.ledger, sub);
            written[s.label()] = store_file_bytes(sub);
            const StorageRow* row = rep.find(s.label());
            if (!row || row->bytes != written[s.label()])
                o.fail(s.label() + ": estimate " + (row ? std::to_string(row->bytes) : "missing") + " vs store " +
                       std::to_string(written[s.label()]));
        }
        std::uint64_t pairs = 0;
        for (const StrategySet& a : all.subsets()) {
            for (const StrategySet& c : all.subsets()) {
                const bool included = (!a.prune || c.prune) && (!a.minimize || c.minimize) && (!a.slack || c.slack);
                if (!included) continue;
                ++pairs;
                if (written[c.label()] > written[a.label()]) o.fail(c.label() + " retains more than " + a.label());
            }
        }
        std::uint64_t txs = 0;
        for (const Block& blk : b.blocks) txs += blk.transactions.size();
        char buf[200];
        std::snprintf(buf, sizeof buf, "%zu blocks, %llu txs, %llu inclusion pairs, none=%llu all=%llu (%.2f%%), build+estimate %.1f s",
                      b.blocks.size(), static_cast<unsigned long long>(txs), static_cast<unsigned long long>(pairs),
                      static_cast<unsigned long long>(written["none"]),
                      static_cast<unsigned long long>(written["prune+minimize+slack"]),
                      reduction_percent(static_cast<double>(written["none"]), static_cast<double>(written["prune+minimize+slack"])),
                      estimate_secs);
        if (o.pass) o.detail = buf;
        if (estimate_secs >= 120) o.fail(std::string("too slow: ") + buf);
    });

    criterion(7, "generator/analyzer oracle", [&](Outcome& o) {
        std::mt19937_64 rng(7007);
        auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        std::uint64_t txs = 0;
        for (int i = 0; i < 20; ++i) {
            ChainPlan p;
            p.seed = rng();
            p.n_blocks = 20 + static_cast<std::uint32_t>(rng() % 150);
            p.txs_min = static_cast<std::uint32_t>(rng() % 4);
            p.txs_max = p.txs_min + static_cast<std::uint32_t>(rng() % 10);
            p.outputs_max = 1 + static_cast<std::uint32_t>(rng() % 5);
            p.coinbase_outputs_max = 1 + static_cast<std::uint32_t>(rng() % 4);
            if (rng() % 4 == 0) {
                p.lifespan = LifespanModel::fixed;
                p.fixed_lifespan = 1 + static_cast<std::uint32_t>(rng() % 10);
            } else {
                p.geometric_p = uniform(0.02, 0.6);
            }
            p.dormant_fraction = uniform(0.0, 0.5);
            p.duplicate_rate = uniform(0.0, 0.8);
            p.segwit_fraction = uniform(0.0, 1.0);
            p.op_return_rate = uniform(0.0, 0.1);
            p.noncanonical_rate = uniform(0.0, 0.1);
            p.segwit_height = static_cast<Height>(rng() % p.n_blocks);
            const Built b = build(p);
            const GroundTruth& t = b.gen.truth;
            const std::string tag = "plan " + std::to_string(i) + ": ";
            if (b.state.utxos().size() != t.utxo_count) o.fail(tag + "UTXO count");
            const LifespanLog log = b.state.lifespan_log();
            if (log.spent != t.spent) o.fail(tag + "spent log");
            std::vector<Height> unspent = log.unspent_creation_heights;
            std::sort(unspent.begin(), unspent.end());
            if (unspent != t.unspent_creation_heights) o.fail(tag + "unspent heights");
            const auto [pre, post] = composition_breakdown(b.blocks, *p.segwit_height);
            if (pre != t.pre || post != t.post) o.fail(tag + "composition buckets");
            if (script_dedup_stats(b.blocks) != t.dedup) o.fail(tag + "dedup counts");
            txs += t.transactions;
        }
        o.detail = "20 plans, " + std::to_string(txs) + " transactions";
    });

    criterion(8, "store integrity", [&](Outcome& o) {
        std::mt19937_64 rng(8008);
        ChainPlan p = small_plan(8008, 300);
        p.txs_min = 3;
        p.txs_max = 9;
        const Built b = build(p);
        StrategySet all;
        all.prune = PruneConfig::quantile(0.5);
        all.minimize = all.slack = all.dedup = true;
        TempDir dir;
        std::vector<std::filesystem::path> stores;
        for (const StrategySet& s : all.subsets()) {
            const auto sub = dir / s.label();
            write_store(compact_chain(b.blocks, b.state, s, p.magic).ledger, sub);
            const IntegrityReport rep = integrity_check(sub);
            if (!rep.ok()) o.fail(s.label() + ": " + rep.failures[0].check + " " + rep.failures[0].detail);
            stores.push_back(sub);
        }
        std::uint64_t detected = 0;
        std::map<std::string, int> by_file;
        for (int i = 0; i < 50; ++i) {
            const auto& store = stores[rng() % stores.size()];
            std::vector<std::pair<std::filesystem::path, std::uint64_t>> files;
            std::uint64_t total = 0;
            for (const char* f : {SPINE_FILE, BODIES_FILE, SCRIPTS_FILE, MANIFEST_FILE}) {
                const std::uint64_t size = std::filesystem::file_size(store / f);
                files.emplace_back(store / f, size);
                total += size;
            }
            std::uint64_t at = rng() % total;
            std::size_t which = 0;
            while (at >= files[which].second) at -= files[which++].second;
            const Bytes original = slurp(files[which].first);
            Bytes bad = original;
            bad[at] ^= static_cast<std::uint8_t>(1 + rng() % 255);
            spit(files[which].first, bad);
            if (!integrity_check(store).ok()) ++detected;
            else o.fail("corruption at " + files[which].first.filename().string() + "+" + std::to_string(at) + " missed");
            ++by_file[files[which].first.filename().string()];
            spit(files[which].first, original);
        }
        std::string spread;
        for (const auto& [f, n] : by_file) spread += (spread.empty() ? "" : ", ") + f + " " + std::to_string(n);
        o.detail = std::to_string(stores.size()) + " stores verified, " + std::to_string(detected) +
                   "/50 corruptions detected (" + spread + ")";
    });

    criterion(9, "per-block strategy overhead", [&](Outcome& o) {
        ChainPlan p;
        p.seed = 9009;
        p.n_blocks = 2;
        p.coinbase_outputs_min = p.coinbase_outputs_max = 2000;
        p.lifespan = LifespanModel::fixed;
        p.fixed_lifespan = 1;
        p.txs_min = p.txs_max = 2000;
        p.outputs_min = p.outputs_max = 1;
        p.op_return_rate = 0.0;
        p.dormant_fraction = 0.0;
        const Built b = build(p);
        const Block& blk = b.blocks.back();
        const Height h = static_cast<Height>(b.blocks.size() - 1);
        if (blk.transactions.size() < 2000) o.fail("block has only " + std::to_string(blk.transactions.size()) + " txs");

        const auto t0 = Clock::now();
        const MinimizedBlock mb = minimize_block(blk, b.state.unspent_flags(blk, h));
        // Every output is unspent at the tip; also time a half-spent co-path record with full verification.
        std::vector<bool> half(blk.transactions.size());
        for (std::size_t i = 0; i < half.size(); ++i) half[i] = i % 2 == 0;
        const MinimizedBlock cp = copath_block(blk, half);
        if (!verify_minimized(cp)) o.fail("co-path verification failed");
        const double minimize_secs = seconds_since(t0);

        const auto t1 = Clock::now();
        SlackEncoder enc(b.state.index(), CodecOptions{true, nullptr});
        const Bytes body = encode_compact_block(blk, enc);
        const double slack_secs = seconds_since(t1);

        if (encode_block(decode_compact_block(body, blk.header, h, b.state.index())) != encode_block(blk))
            o.fail("compact block does not round-trip");
        char buf[160];
        std::snprintf(buf, sizeof buf, "%zu txs: minimize %.2f ms (%s, plus co-path of %zu kept), slack %.2f ms (%zu -> %zu bytes)",
                      blk.transactions.size(), minimize_secs * 1e3, std::string(mode_name(mb.mode)).c_str(), cp.kept.size(),
                      slack_secs * 1e3, static_cast<std::size_t>(serialized_size(blk)), body.size());
        if (o.pass) o.detail = buf;
        if (minimize_secs >= 1.0 || slack_secs >= 1.0) o.fail(std::string("too slow: ") + buf);
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
