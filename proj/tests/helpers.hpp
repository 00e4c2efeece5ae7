#ifndef SLIMCHAIN_TEST_HELPERS_HPP
#define SLIMCHAIN_TEST_HELPERS_HPP

#include <slimchain/chain.hpp>
#include <slimchain/fixture.hpp>
#include <slimchain/merkle.hpp>
#include <slimchain/wire.hpp>

#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing_helpers {

using namespace slimchain;

inline std::vector<Block> decode_chain(const GeneratedChain& g)
{
    std::vector<Block> blocks;
    for (const Bytes& raw : g.raw_blocks) blocks.push_back(decode_block(raw));
    return blocks;
}

inline ChainPlan small_plan(std::uint64_t seed, std::uint32_t blocks = 40)
{
    ChainPlan p;
    p.seed = seed;
    p.n_blocks = blocks;
    p.txs_min = 2;
    p.txs_max = 6;
    p.geometric_p = 0.15;
    p.dormant_fraction = 0.1;
    return p;
}

struct Built {
    GeneratedChain gen;
    std::vector<Block> blocks;
    ChainState state;
};

inline Built build(const ChainPlan& plan)
{
    Built b;
    b.gen = gen_chain(plan);
    b.blocks = decode_chain(b.gen);
    b.state = build_chain(b.blocks);
    return b;
}

class TempDir {
public:
    TempDir()
    {
        static std::mt19937_64 rng(std::random_device{}());
        m_path = std::filesystem::temp_directory_path() / ("slimchain-test-" + std::to_string(rng()));
        std::filesystem::create_directories(m_path);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(m_path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return m_path; }
    std::filesystem::path operator/(const std::string& name) const { return m_path / name; }

private:
    std::filesystem::path m_path;
};

// Minimal coinbase-only or spending transactions for hand-built chains.
inline Transaction coinbase_tx(Height h, std::vector<std::uint64_t> values)
{
    Transaction tx;
    TxIn in;
    in.prevout = OutPoint::null();
    in.script.data = {0x04, static_cast<std::uint8_t>(h), static_cast<std::uint8_t>(h >> 8), 0xAB, 0xCD};
    tx.inputs.push_back(in);
    for (std::uint64_t v : values) tx.outputs.push_back(TxOut{v, VarBytes{Bytes(25, static_cast<std::uint8_t>(v)), 0}});
    return tx;
}

inline Transaction spend_tx(std::vector<OutPoint> prevouts, std::vector<std::uint64_t> values)
{
    Transaction tx;
    for (const OutPoint& p : prevouts) tx.inputs.push_back(TxIn{p, VarBytes{Bytes(70, 0x30), 0}, SEQUENCE_FINAL});
    for (std::uint64_t v : values) tx.outputs.push_back(TxOut{v, VarBytes{Bytes(25, 0x76), 0}});
    return tx;
}

inline Block make_block(const Hash256& prev, std::vector<Transaction> txs, std::uint32_t nonce = 0)
{
    Block b;
    b.header.version = 1;
    b.header.prev_block_hash = prev;
    b.header.timestamp = 1231006505 + nonce;
    b.header.bits = 0x207fffff;
    b.header.nonce = nonce;
    b.transactions = std::move(txs);
    b.header.merkle_root = merkle_root(block_txids(b));
    b.raw_size_bytes = serialized_size(b);
    return b;
}

} // namespace testing_helpers

#endif
