#ifndef SLIMCHAIN_FIXTURE_HPP
#define SLIMCHAIN_FIXTURE_HPP

#include <slimchain/analytics.hpp>
#include <slimchain/chain.hpp>
#include <slimchain/wire.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace slimchain {

class PlanError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class LifespanModel { geometric, fixed };

/**
 * Recipe for a synthetic chain. Every output gets a planned lifespan when it
 * is created; it is spent exactly at creation + lifespan if that height is
 * inside the chain, and stays unspent otherwise. Dormant outputs and
 * OP_RETURN outputs are never spent.
 */
struct ChainPlan {
    std::uint64_t seed = 1;
    std::uint32_t n_blocks = 10;
    /** Regular transactions per block, drawn uniformly; capped by the number of spends due. */
    std::uint32_t txs_min = 2;
    std::uint32_t txs_max = 2;
    std::uint32_t outputs_min = 1;
    std::uint32_t outputs_max = 3;
    std::uint32_t coinbase_outputs_min = 1;
    std::uint32_t coinbase_outputs_max = 2;

    LifespanModel lifespan = LifespanModel::geometric;
    double geometric_p = 0.1;
    std::uint32_t fixed_lifespan = 3;
    double dormant_fraction = 0.0;

    std::uint32_t output_script_min = 22;
    std::uint32_t output_script_max = 40;
    std::uint32_t input_script_min = 60;
    std::uint32_t input_script_max = 110;
    double duplicate_rate = 0.25;   ///< chance a script is drawn from a shared pool
    std::uint32_t popular_scripts = 8;

    double segwit_fraction = 0.3;
    double op_return_rate = 0.02;
    double odd_version_rate = 0.02;
    double version2_rate = 0.3;
    double locktime_rate = 0.05;
    double sequence_rate = 0.05;
    double noncanonical_rate = 0.02;

    std::optional<Height> segwit_height; ///< composition split; defaults to n_blocks / 2
    NetworkMagic magic = REGTEST_MAGIC;

    /** Throws PlanError naming the first violated constraint. */
    void validate() const;
};

/** What the chain is known to contain, computed while generating it. */
struct GroundTruth {
    std::vector<SpentRecord> spent;              ///< in block, transaction, input order
    std::vector<Height> unspent_creation_heights; ///< ascending
    std::vector<std::uint64_t> planned_lifespans; ///< every finite lifespan drawn, in or beyond the horizon
    std::vector<std::vector<Hash256>> txids;      ///< per block
    std::uint64_t outputs_created = 0;
    std::uint64_t utxo_count = 0;
    std::uint64_t transactions = 0;
    std::uint64_t op_return_outputs = 0;
    std::uint64_t segwit_txs = 0;
    std::uint64_t odd_versions = 0;
    std::uint64_t nonzero_locktimes = 0;
    std::uint64_t nondefault_sequences = 0;
    std::uint64_t noncanonical_varints = 0;
    Height segwit_boundary = 0;
    CompositionBreakdown pre;
    CompositionBreakdown post;
    DedupStats dedup;
};

struct GeneratedChain {
    NetworkMagic magic = REGTEST_MAGIC;
    Bytes block_file;              ///< framed blocks, as found in blk*.dat
    std::vector<Bytes> raw_blocks;
    std::vector<std::vector<Bytes>> raw_txs; ///< per block, serialized with witness
    GroundTruth truth;
};

/** Same plan, same bytes. Throws PlanError for an unsatisfiable plan. */
GeneratedChain gen_chain(const ChainPlan& plan);

/** Ground truth as CSV rows: section,key,value. */
void write_truth_csv(std::ostream& out, const GroundTruth& truth);

/**
 * Standalone transactions with random (foreign) prevouts, a share of coinbase
 * shaped ones, and every escape path at high rates. Serialized with witness.
 */
std::vector<Bytes> gen_loose_txs(std::uint64_t seed, std::size_t count);

} // namespace slimchain

#endif // SLIMCHAIN_FIXTURE_HPP
