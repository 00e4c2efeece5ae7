#include <slimchain/analytics.hpp>
#include <slimchain/chain.hpp>
#include <slimchain/fixture.hpp>
#include <slimchain/footprint.hpp>
#include <slimchain/store.hpp>
#include <slimchain/wire.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace slimchain;

namespace {

struct Common {
    std::string magic = magic_hex(MAINNET_MAGIC);
    std::string format = "csv";
    std::string output;
};

struct Strategies {
    std::uint64_t prune_blocks = 0;
    double prune_quantile = 0.0;
    bool minimize = false;
    bool slack = false;
    bool dedup = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_magic = true)
{
    if (with_magic) cmd->add_option("--magic", c.magic, "network magic as 8 hex digits")->capture_default_str();
    cmd->add_option("--format", c.format, "report format")
        ->check(CLI::IsMember({"csv", "ldjson"}))
        ->capture_default_str();
    cmd->add_option("--output", c.output, "write the report to this file instead of stdout");
}

void add_strategies(CLI::App* cmd, Strategies& s)
{
    auto* blocks = cmd->add_option("--prune-blocks", s.prune_blocks, "prune bodies older than N blocks")
                       ->check(CLI::PositiveNumber);
    auto* quantile = cmd->add_option("--prune-quantile", s.prune_quantile,
                                     "prune with the threshold covering this fraction of spends")
                         ->check(CLI::Range(0.0, 1.0));
    blocks->excludes(quantile);
    quantile->excludes(blocks);
    cmd->add_flag("--minimize", s.minimize, "keep only transactions with unspent outputs and their co-paths");
    cmd->add_flag("--slack", s.slack, "compact fixed-width fields");
    cmd->add_flag("--dedup-scripts", s.dedup, "move repeated scripts to a key-value store");
}

StrategySet to_set(const Strategies& s, const CLI::App* cmd)
{
    StrategySet set;
    if (cmd->count("--prune-blocks")) set.prune = PruneConfig::blocks(s.prune_blocks);
    if (cmd->count("--prune-quantile")) {
        if (!(s.prune_quantile > 0.0)) throw CLI::ValidationError("--prune-quantile", "must lie in (0, 1]");
        set.prune = PruneConfig::quantile(s.prune_quantile);
    }
    set.minimize = s.minimize;
    set.slack = s.slack;
    set.dedup = s.dedup;
    return set;
}

void emit(const RecordTable& table, const Common& c)
{
    const ReportFormat f = parse_report_format(c.format);
    if (c.output.empty()) {
        table.write(std::cout, f);
        std::cout.flush();
        return;
    }
    std::ofstream out(c.output, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + c.output + " for writing");
    table.write(out, f);
    if (!out) throw std::runtime_error("write to " + c.output + " failed");
}

struct LoadedChain {
    std::vector<Block> blocks;
    ChainState state;
};

LoadedChain load(const std::string& path, const Common& c)
{
    LoadedChain l;
    l.blocks = read_block_file(path, parse_magic(c.magic));
    l.state = build_chain(l.blocks);
    return l;
}

Height tip_of(const LoadedChain& l)
{
    if (l.blocks.empty()) throw std::runtime_error("the block file holds no blocks");
    return static_cast<Height>(l.blocks.size() - 1);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ledger usage analytics and storage-reduction strategies for Bitcoin-style block files"};
    app.require_subcommand(1);

    Common common;
    Strategies strategies;
    std::string input;
    std::string store_dir;

    auto* parse = app.add_subcommand("parse", "validate a block file and count its contents");
    parse->add_option("blocks", input, "block file")->required()->check(CLI::ExistingFile);
    add_common(parse, common);

    auto* stats = app.add_subcommand("stats", "usage analytics");
    stats->require_subcommand(1);

    HeightInterval interval{0, 0};
    std::optional<Height> first;
    std::optional<Height> last;
    std::optional<Height> as_of;
    std::vector<double> ps{0.5, 0.9, 0.95};
    auto* lifespan = stats->add_subcommand("lifespan", "UTXO lifespan percentiles");
    lifespan->add_option("blocks", input, "block file")->required()->check(CLI::ExistingFile);
    lifespan->add_option("--from", first, "first creation height (default 0)");
    lifespan->add_option("--to", last, "last creation height (default tip)");
    lifespan->add_option("--as-of", as_of, "height the chain is observed at (default tip)");
    lifespan->add_option("--percentiles", ps, "fractions in (0,1]")->delimiter(',')->check(CLI::Range(0.0, 1.0));
    add_common(lifespan, common);

    std::optional<Height> segwit_height;
    auto* composition = stats->add_subcommand("composition", "byte composition by data type");
    composition->add_option("blocks", input, "block file")->required()->check(CLI::ExistingFile);
    composition->add_option("--segwit-height", segwit_height, "split height (default 481824)");
    add_common(composition, common);

    auto* dedup = stats->add_subcommand("dedup", "script duplication");
    dedup->add_option("blocks", input, "block file")->required()->check(CLI::ExistingFile);
    add_common(dedup, common);

    Height bucket = 1000;
    auto* dormancy = stats->add_subcommand("dormancy", "current UTXOs by creation height");
    dormancy->add_option("blocks", input, "block file")->required()->check(CLI::ExistingFile);
    dormancy->add_option("--bucket", bucket, "bucket width in blocks")->check(CLI::PositiveNumber)->capture_default_str();
    add_common(dormancy, common);

    auto* compact = app.add_subcommand("compact", "apply strategies and write a store");
    compact->add_option("blocks", input, "block file")->required()->check(CLI::ExistingFile);
    compact->add_option("--store", store_dir, "store directory")->required();
    add_common(compact, common);
    add_strategies(compact, strategies);

    auto* estimate = app.add_subcommand("estimate", "storage footprint of every strategy subset");
    estimate->add_option("blocks", input, "block file")->required()->check(CLI::ExistingFile);
    add_common(estimate, common);
    add_strategies(estimate, strategies);

    auto* verify = app.add_subcommand("verify", "integrity check of a store");
    verify->add_option("store", store_dir, "store directory")->required()->check(CLI::ExistingDirectory);
    add_common(verify, common, false);

    ChainPlan plan;
    std::string chain_out;
    std::string truth_out;
    std::string lifespan_model = "geometric";
    auto* genchain = app.add_subcommand("genchain", "generate a deterministic synthetic chain");
    genchain->add_option("file", chain_out, "block file to write")->required();
    genchain->add_option("--truth", truth_out, "also write the ground-truth CSV here");
    genchain->add_option("--seed", plan.seed)->capture_default_str();
    genchain->add_option("--blocks", plan.n_blocks)->capture_default_str();
    genchain->add_option("--txs-min", plan.txs_min)->capture_default_str();
    genchain->add_option("--txs-max", plan.txs_max)->capture_default_str();
    genchain->add_option("--lifespan", lifespan_model)->check(CLI::IsMember({"geometric", "fixed"}))->capture_default_str();
    genchain->add_option("--geometric-p", plan.geometric_p)->capture_default_str();
    genchain->add_option("--fixed-lifespan", plan.fixed_lifespan)->capture_default_str();
    genchain->add_option("--dormant", plan.dormant_fraction, "fraction of outputs never spent")->capture_default_str();
    genchain->add_option("--duplicate-rate", plan.duplicate_rate)->capture_default_str();
    genchain->add_option("--segwit", plan.segwit_fraction, "fraction of segwit transactions")->capture_default_str();
    add_common(genchain, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*parse) {
            const LoadedChain l = load(input, common);
            std::uint64_t txs = 0, inputs = 0, outputs = 0, bytes = 0, segwit = 0;
            for (const Block& b : l.blocks) {
                bytes += b.raw_size_bytes;
                for (const Transaction& tx : b.transactions) {
                    ++txs;
                    inputs += tx.inputs.size();
                    outputs += tx.outputs.size();
                    segwit += tx.has_witness;
                }
            }
            RecordTable t({"metric", "value"});
            t.add_row({"blocks", std::uint64_t{l.blocks.size()}});
            t.add_row({"transactions", txs});
            t.add_row({"inputs", inputs});
            t.add_row({"outputs", outputs});
            t.add_row({"segwit_transactions", segwit});
            t.add_row({"block_bytes", bytes});
            t.add_row({"utxos", std::uint64_t{l.state.utxos().size()}});
            t.add_row({"spent_outputs", std::uint64_t{l.state.spent_log().size()}});
            t.add_row({"duplicate_txids", l.state.index().duplicate_txids()});
            emit(t, common);
        } else if (*lifespan) {
            const LoadedChain l = load(input, common);
            const Height tip = tip_of(l);
            interval = HeightInterval{first.value_or(0), last.value_or(tip)};
            const Height at = as_of.value_or(tip);
            const LifespanCdf cdf = lifespan_cdf(l.state.lifespan_log(), interval, at);
            emit(lifespan_table(cdf, interval, at, ps), common);
        } else if (*composition) {
            const auto blocks = read_block_file(input, parse_magic(common.magic));
            const auto [pre, post] = composition_breakdown(blocks, segwit_height.value_or(MAINNET_SEGWIT_HEIGHT));
            emit(composition_table(pre, post), common);
        } else if (*dedup) {
            const auto blocks = read_block_file(input, parse_magic(common.magic));
            emit(dedup_table(script_dedup_stats(blocks)), common);
        } else if (*dormancy) {
            const LoadedChain l = load(input, common);
            emit(dormancy_table(dormancy_stats(l.state.utxos(), bucket, l.blocks.size())), common);
        } else if (*compact) {
            const StrategySet set = to_set(strategies, compact);
            const NetworkMagic magic = parse_magic(common.magic);
            const LoadedChain l = load(input, common);
            const CompactionResult r = compact_chain(l.blocks, l.state, set, magic);
            for (const std::string& w : r.stats.warnings) std::cerr << "warning: " << w << '\n';
            const std::uint64_t baseline = full_ledger(l.blocks, magic).retained_bytes();
            const std::uint64_t written = write_store(r.ledger, store_dir);
            StorageReport rep;
            rep.baseline_bytes = baseline;
            rep.rows.push_back(StorageRow{"none", baseline, 0.0});
            if (!set.empty()) {
                rep.rows.push_back(StorageRow{set.label(), written, reduction_percent(baseline, written)});
            }
            emit(rep.table(), common);
        } else if (*estimate) {
            const StrategySet set = to_set(strategies, estimate);
            const LoadedChain l = load(input, common);
            emit(estimate_footprint(l.blocks, l.state, set, parse_magic(common.magic)).table(), common);
        } else if (*verify) {
            const IntegrityReport rep = integrity_check(std::filesystem::path(store_dir));
            RecordTable t({"item", "height", "detail"});
            t.add_row({"status", Cell::null(), rep.ok() ? "pass" : "fail"});
            t.add_row({"spine_entries", Cell::null(), std::to_string(rep.spine_entries)});
            t.add_row({"headers", Cell::null(), std::to_string(rep.headers)});
            t.add_row({"hash_only_heights", Cell::null(), std::to_string(rep.hash_only_heights)});
            t.add_row({"raw_bodies_verified", Cell::null(), std::to_string(rep.raw_bodies_verified)});
            t.add_row({"compact_bodies_verified", Cell::null(), std::to_string(rep.compact_bodies_verified)});
            t.add_row({"minimized_txs_verified", Cell::null(), std::to_string(rep.minimized_txs_verified)});
            t.add_row({"delegated_bodies", Cell::null(), std::to_string(rep.delegated_bodies)});
            t.add_row({"delegated_txs", Cell::null(), std::to_string(rep.delegated_txs)});
            for (const IntegrityFailure& f : rep.failures) {
                t.add_row({"failure:" + f.check, f.height ? Cell(std::uint64_t{*f.height}) : Cell::null(), f.detail});
            }
            emit(t, common);
            if (!rep.ok()) {
                std::cerr << "error: integrity check failed (" << rep.failures.size() << " problem(s))\n";
                return 1;
            }
        } else if (*genchain) {
            plan.lifespan = lifespan_model == "fixed" ? LifespanModel::fixed : LifespanModel::geometric;
            plan.magic = parse_magic(common.magic);
            const GeneratedChain g = gen_chain(plan);
            std::ofstream out(chain_out, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open " + chain_out + " for writing");
            out.write(reinterpret_cast<const char*>(g.block_file.data()),
                      static_cast<std::streamsize>(g.block_file.size()));
            if (!out) throw std::runtime_error("write to " + chain_out + " failed");
            if (!truth_out.empty()) {
                std::ofstream truth(truth_out, std::ios::trunc);
                if (!truth) throw std::runtime_error("cannot open " + truth_out + " for writing");
                write_truth_csv(truth, g.truth);
            }
            RecordTable t({"metric", "value"});
            t.add_row({"blocks", std::uint64_t{plan.n_blocks}});
            t.add_row({"transactions", g.truth.transactions});
            t.add_row({"outputs_created", g.truth.outputs_created});
            t.add_row({"spent_outputs", std::uint64_t{g.truth.spent.size()}});
            t.add_row({"utxos", g.truth.utxo_count});
            t.add_row({"file_bytes", std::uint64_t{g.block_file.size()}});
            emit(t, common);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
