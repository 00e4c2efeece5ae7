#ifndef SLIMCHAIN_WIRE_HPP
#define SLIMCHAIN_WIRE_HPP

#include <slimchain/bytes.hpp>
#include <slimchain/hash.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace slimchain {

using Height = std::uint32_t;

inline constexpr std::uint64_t COIN = 100'000'000;
inline constexpr std::uint64_t MAX_MONEY = 21'000'000 * COIN;
inline constexpr std::uint32_t SEQUENCE_FINAL = 0xFFFFFFFF;
inline constexpr std::size_t HEADER_SIZE = 80;

/** Four bytes that open every frame in a block file, in file order. */
using NetworkMagic = std::array<std::uint8_t, 4>;
inline constexpr NetworkMagic MAINNET_MAGIC{0xF9, 0xBE, 0xB4, 0xD9};
inline constexpr NetworkMagic REGTEST_MAGIC{0xFA, 0xBF, 0xB5, 0xDA};

NetworkMagic parse_magic(std::string_view hex);
std::string magic_hex(const NetworkMagic& m);

/**
 * Length-prefixed byte string (script or witness item). The width of the
 * length prefix is kept so non-canonical encodings survive a round trip;
 * width 0 means "use the canonical width".
 */
struct VarBytes {
    Bytes data;
    std::uint8_t len_width = 0;

    std::size_t serialized_size() const;
    friend bool operator==(const VarBytes&, const VarBytes&) = default;
};

struct OutPoint {
    Hash256 hash;
    std::uint32_t index = 0;

    static OutPoint null() { return OutPoint{Hash256{}, 0xFFFFFFFF}; }
    bool is_null() const noexcept { return index == 0xFFFFFFFF && hash.is_null(); }

    friend auto operator<=>(const OutPoint&, const OutPoint&) = default;
    friend bool operator==(const OutPoint&, const OutPoint&) = default;
};

std::string to_string(const OutPoint& o);

struct TxIn {
    OutPoint prevout;
    VarBytes script;
    std::uint32_t sequence = SEQUENCE_FINAL;

    friend bool operator==(const TxIn&, const TxIn&) = default;
};

struct TxOut {
    std::uint64_t value = 0;
    VarBytes script;

    friend bool operator==(const TxOut&, const TxOut&) = default;
};

struct WitnessStack {
    std::vector<VarBytes> items;
    std::uint8_t count_width = 0;

    friend bool operator==(const WitnessStack&, const WitnessStack&) = default;
};

struct Transaction {
    std::uint32_t version = 1;
    bool has_witness = false;
    std::vector<TxIn> inputs;
    std::uint8_t input_count_width = 0;
    std::vector<TxOut> outputs;
    std::uint8_t output_count_width = 0;
    /** One stack per input; only serialized when has_witness is set. */
    std::vector<WitnessStack> witnesses;
    std::uint32_t lock_time = 0;

    bool is_coinbase() const noexcept { return inputs.size() == 1 && inputs[0].prevout.is_null(); }

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct BlockHeader {
    std::uint32_t version = 0;
    Hash256 prev_block_hash;
    Hash256 merkle_root;
    std::uint32_t timestamp = 0;
    std::uint32_t bits = 0;
    std::uint32_t nonce = 0;

    Hash256 hash() const;

    friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

struct Block {
    BlockHeader header;
    std::uint8_t tx_count_width = 0;
    std::vector<Transaction> transactions;
    std::uint64_t raw_size_bytes = 0;

    Hash256 hash() const { return header.hash(); }

    friend bool operator==(const Block&, const Block&) = default;
};

// Transactions ----------------------------------------------------------------

/** Decode one transaction from the front of @p in (segwit marker/flag aware). Returns the byte span consumed. */
std::pair<Transaction, std::size_t> decode_transaction(ByteView in, std::size_t base_offset = 0);
Transaction decode_transaction_exact(ByteView in);
Transaction read_transaction(ByteReader& r);

/** Serialize bit-exactly. With include_witness=false produces the legacy form hashed by txid. */
Bytes encode_transaction(const Transaction& tx, bool include_witness = true);
void append_transaction(Bytes& out, const Transaction& tx, bool include_witness = true);
std::size_t serialized_size(const Transaction& tx, bool include_witness = true);

/** Throws EncodeError if structural invariants (nonempty inputs/outputs, witness count) are violated. */
void check_transaction(const Transaction& tx);

Hash256 txid(const Transaction& tx);
Hash256 wtxid(const Transaction& tx);

// Headers and blocks -----------------------------------------------------------

BlockHeader read_header(ByteReader& r);
void append_header(Bytes& out, const BlockHeader& h);
BlockHeader decode_header(ByteView in);

/** Decode a whole block; @p in must contain exactly the block. raw_size_bytes is set to in.size(). */
Block decode_block(ByteView in, std::size_t base_offset = 0);
Bytes encode_block(const Block& b);
std::size_t serialized_size(const Block& b);

std::vector<Hash256> block_txids(const Block& b);
/** True iff the Merkle root over the block's txids equals header.merkle_root. */
bool merkle_root_matches(const Block& b);

// Block files ------------------------------------------------------------------

struct FramedBlock {
    Block block;
    std::uint64_t file_offset = 0; ///< offset of the frame's magic bytes
};

/**
 * Single-pass reader for blk*.dat style files: magic + LE32 length + block.
 * Runs of zero bytes between or after frames (pre-allocated file tails) are skipped.
 */
class BlockFileReader {
public:
    explicit BlockFileReader(std::istream& in, NetworkMagic magic = MAINNET_MAGIC) : m_in(in), m_magic(magic) {}

    std::optional<FramedBlock> next();
    std::uint64_t offset() const noexcept { return m_offset; }

private:
    std::istream& m_in;
    NetworkMagic m_magic;
    std::uint64_t m_offset = 0;
};

std::vector<Block> read_block_file(const std::filesystem::path& path, NetworkMagic magic = MAINNET_MAGIC);
void append_block_frame(Bytes& out, const Block& b, NetworkMagic magic);

} // namespace slimchain

template <>
struct std::hash<slimchain::OutPoint> {
    std::size_t operator()(const slimchain::OutPoint& o) const noexcept
    {
        return std::hash<slimchain::Hash256>{}(o.hash) ^ (std::size_t(o.index) * 0x9E3779B97F4A7C15ULL);
    }
};

#endif // SLIMCHAIN_WIRE_HPP
