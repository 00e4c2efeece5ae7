#include "helpers.hpp"

#include <slimchain/merkle.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace slimchain;
using namespace testing_helpers;

namespace {

// Genesis block, independently hashed with Python's hashlib.
const char* GENESIS_COINBASE =
    "01000000010000000000000000000000000000000000000000000000000000000000000000ffffffff4d04ffff001d0104455468652054"
    "696d65732030332f4a616e2f32303039204368616e63656c6c6f72206f6e206272696e6b206f66207365636f6e64206261696c6f7574"
    "20666f722062616e6b73ffffffff0100f2052a01000000434104678afdb0fe5548271967f1a67130b7105cd6a828e03909a67962e0ea"
    "1f61deb649f6bc3f4cef38c4f35504e51ec112de5c384df7ba0b8d578a4c702b6bf11d5fac00000000";
const char* GENESIS_TXID = "4a5e1e4baab89f3a32518a88c31bc87f618f76673e2cc77ab2127b7afdeda33b";
const char* GENESIS_HASH = "000000000019d6689c085ae165831e934ff763ae46a2a6c172b3f1b60a8ce26f";

Bytes genesis_block()
{
    Bytes b = from_hex("0100000000000000000000000000000000000000000000000000000000000000000000003ba3edfd7a7b12b27ac72c3e"
                       "67768f617fc81bc3888a51323a9fb8aa4b1e5e4a29ab5f49ffff001d1dac2b7c01");
    Bytes tx = from_hex(GENESIS_COINBASE);
    b.insert(b.end(), tx.begin(), tx.end());
    return b;
}

Transaction legacy_tx()
{
    Transaction tx;
    tx.inputs.push_back(TxIn{OutPoint{Hash256(Bytes(32, 0x11)), 1}, VarBytes{Bytes(10, 0x22), 0}, SEQUENCE_FINAL});
    tx.outputs.push_back(TxOut{5000, VarBytes{Bytes(25, 0x33), 0}});
    return tx;
}

} // namespace

TEST(Varint, DecodeExamples)
{
    auto [v0, n0] = decode_varint(Bytes{0x00});
    EXPECT_EQ(v0, (VarInt{0, 1}));
    EXPECT_EQ(n0, 1u);
    auto [v1, n1] = decode_varint(Bytes{0xFD, 0x26, 0x02});
    EXPECT_EQ(v1, (VarInt{550, 3}));
    EXPECT_EQ(n1, 3u);
    auto [v2, n2] = decode_varint(Bytes{0xFF, 1, 0, 0, 0, 0, 0, 0, 0});
    EXPECT_EQ(v2, (VarInt{1, 9}));
    EXPECT_EQ(n2, 9u);
}

TEST(Varint, EncodeExamples)
{
    EXPECT_EQ(encode_varint({0, 1}), (Bytes{0x00}));
    EXPECT_EQ(encode_varint({550, 3}), (Bytes{0xFD, 0x26, 0x02}));
    EXPECT_EQ(encode_varint({1, 9}), (Bytes{0xFF, 1, 0, 0, 0, 0, 0, 0, 0}));
}

TEST(Varint, TruncatedInputReportsOffset)
{
    try {
        decode_varint(Bytes{0xFE, 0x01});
        FAIL() << "expected a decode error";
    } catch (const DecodeError& e) {
        EXPECT_EQ(e.offset(), 0u) << "offset names the start of the truncated field";
    }
    EXPECT_THROW(decode_varint(Bytes{}), DecodeError);
}

TEST(Varint, WidthTooSmallIsEncodeError)
{
    EXPECT_THROW(encode_varint({0xFD, 1}), EncodeError);
    EXPECT_THROW(encode_varint({0x10000, 3}), EncodeError);
    EXPECT_THROW(encode_varint({1, 2}), EncodeError);
}

TEST(Varint, RoundTripAllValidWidths)
{
    const std::uint64_t values[] = {0, 1, 0xFC, 0xFD, 0xFFFF, 0x10000, 0xFFFFFFFFULL, 0x100000000ULL, ~0ULL};
    for (std::uint64_t v : values) {
        for (std::uint8_t w : {1, 3, 5, 9}) {
            if (!width_fits(v, w)) continue;
            const Bytes b = encode_varint({v, w});
            ASSERT_EQ(b.size(), w);
            auto [d, n] = decode_varint(b);
            EXPECT_EQ(d, (VarInt{v, w}));
            EXPECT_EQ(n, w);
        }
        EXPECT_EQ(canonical_width(v), encode_varint({v, canonical_width(v)}).size());
    }
}

TEST(Transaction, LegacyRoundTripAndNoMarker)
{
    const Transaction tx = legacy_tx();
    const Bytes raw = encode_transaction(tx);
    EXPECT_NE(raw[4], 0x00) << "legacy transaction must not carry a segwit marker";
    auto [d, used] = decode_transaction(raw);
    EXPECT_FALSE(d.has_witness);
    EXPECT_EQ(used, raw.size());
    EXPECT_EQ(encode_transaction(d), raw);
}

TEST(Transaction, SegwitMarkerFlagAndWitness)
{
    Transaction tx = legacy_tx();
    tx.has_witness = true;
    tx.witnesses.push_back(WitnessStack{{VarBytes{Bytes(72, 0x44), 0}, VarBytes{Bytes(33, 0x02), 0}}, 0});
    const Bytes raw = encode_transaction(tx);
    EXPECT_EQ(raw[4], 0x00);
    EXPECT_EQ(raw[5], 0x01);
    auto [d, used] = decode_transaction(raw);
    EXPECT_TRUE(d.has_witness);
    ASSERT_EQ(d.witnesses.size(), 1u);
    EXPECT_EQ(d.witnesses[0].items.size(), 2u);
    EXPECT_EQ(used, raw.size());
    EXPECT_EQ(encode_transaction(d), raw);
}

TEST(Transaction, CutMidScriptNamesScriptField)
{
    const Bytes raw = encode_transaction(legacy_tx());
    // version(4) + count(1) + prevout(36) + script length(1) + 4 of 10 script bytes
    const Bytes cut(raw.begin(), raw.begin() + 46);
    try {
        decode_transaction(cut);
        FAIL() << "expected a decode error";
    } catch (const DecodeError& e) {
        EXPECT_NE(e.field().find("script"), std::string::npos) << e.field();
    }
}

TEST(Transaction, RejectsBadSegwitFlagAndOverflowingValue)
{
    Bytes raw = encode_transaction(legacy_tx());
    Bytes bad = raw;
    bad.insert(bad.begin() + 4, {0x00, 0x02});
    EXPECT_THROW(decode_transaction(bad), DecodeError);

    Transaction tx = legacy_tx();
    tx.outputs[0].value = MAX_MONEY + 1;
    EXPECT_THROW(encode_transaction(tx), EncodeError);
    // Patch the value in place: version, input count, input (36 + 1 + 10 + 4), output count.
    const std::size_t value_at = 4 + 1 + 51 + 1;
    for (int i = 0; i < 8; ++i) raw[value_at + i] = static_cast<std::uint8_t>((MAX_MONEY + 1) >> (8 * i));
    EXPECT_THROW(decode_transaction(raw), DecodeError);
}

TEST(Transaction, NonCanonicalWidthsSurvive)
{
    Transaction tx = legacy_tx();
    tx.input_count_width = 3;
    tx.outputs[0].script.len_width = 5;
    const Bytes raw = encode_transaction(tx);
    EXPECT_EQ(raw.size(), serialized_size(legacy_tx()) + 2 + 4);
    EXPECT_EQ(encode_transaction(decode_transaction_exact(raw)), raw);
}

TEST(Transaction, InvariantViolationsAreEncodeErrors)
{
    Transaction tx = legacy_tx();
    tx.outputs.clear();
    EXPECT_THROW(encode_transaction(tx), EncodeError);
    tx = legacy_tx();
    tx.has_witness = true;
    EXPECT_THROW(encode_transaction(tx), EncodeError);
}

TEST(Txid, GenesisCoinbase)
{
    const Transaction tx = decode_transaction_exact(from_hex(GENESIS_COINBASE));
    EXPECT_EQ(txid(tx).hex(), GENESIS_TXID);
    EXPECT_TRUE(tx.is_coinbase());
}

TEST(Txid, GenesisBlockHashAndMerkle)
{
    const Block b = decode_block(genesis_block());
    EXPECT_EQ(b.hash().hex(), GENESIS_HASH);
    EXPECT_TRUE(merkle_root_matches(b));
    EXPECT_EQ(b.raw_size_bytes, 285u);
    EXPECT_EQ(encode_block(b), genesis_block());
}

TEST(Txid, ChangesWithOutputValueNotWitness)
{
    Transaction a = legacy_tx();
    Transaction b = a;
    b.outputs[0].value += 1;
    EXPECT_NE(txid(a), txid(b));

    Transaction w = a;
    w.has_witness = true;
    w.witnesses.push_back(WitnessStack{{VarBytes{Bytes(5, 9), 0}}, 0});
    EXPECT_EQ(txid(w), txid(a));
    Transaction w2 = w;
    w2.witnesses[0].items[0].data[0] ^= 0xFF;
    EXPECT_EQ(txid(w2), txid(a));
    EXPECT_NE(wtxid(w2), wtxid(w));
}

TEST(Merkle, SingleLeafIsRoot)
{
    const Hash256 h(Bytes(32, 7));
    EXPECT_EQ(merkle_root(std::vector<Hash256>{h}), h);
    EXPECT_THROW(merkle_root(std::vector<Hash256>{}), std::invalid_argument);
}

TEST(Merkle, PairMatchesIndependentHash)
{
    Bytes a(32), b(32);
    for (int i = 0; i < 32; ++i) {
        a[i] = static_cast<std::uint8_t>(i);
        b[i] = static_cast<std::uint8_t>(32 + i);
    }
    // dsha256(00..3f) computed with Python's hashlib.
    EXPECT_EQ(merkle_root(std::vector<Hash256>{Hash256(a), Hash256(b)}).wire_hex(),
              "01c9f464780a1b6af4eb400fe2f2896cfb2169f5a65701439e4c2c4e213903ef");
}

TEST(Merkle, OddLevelsDuplicateLastNode)
{
    std::vector<Hash256> leaves;
    for (int i = 0; i < 7; ++i) leaves.push_back(sha256(Bytes{static_cast<std::uint8_t>(i)}));
    for (std::size_t n = 1; n <= leaves.size(); ++n) {
        std::vector<Hash256> level(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(n));
        while (level.size() > 1) {
            if (level.size() % 2) level.push_back(level.back());
            std::vector<Hash256> up;
            for (std::size_t i = 0; i < level.size(); i += 2) {
                Bytes cat(level[i].view().begin(), level[i].view().end());
                cat.insert(cat.end(), level[i + 1].view().begin(), level[i + 1].view().end());
                up.push_back(double_sha256(cat));
            }
            level = up;
        }
        EXPECT_EQ(merkle_root(std::span(leaves.data(), n)), level[0]) << n;
    }
}

TEST(BlockStream, ReadsFramesInOrderAndSkipsPadding)
{
    const GeneratedChain g = gen_chain(small_plan(3, 3));
    Bytes padded = g.block_file;
    padded.resize(padded.size() + 4096, 0);
    for (const Bytes* data : std::vector<const Bytes*>{&g.block_file, &padded}) {
        std::istringstream in(std::string(data->begin(), data->end()));
        BlockFileReader reader(in, g.magic);
        std::vector<FramedBlock> frames;
        while (auto f = reader.next()) frames.push_back(std::move(*f));
        ASSERT_EQ(frames.size(), 3u);
        std::uint64_t offset = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_EQ(frames[i].file_offset, offset);
            EXPECT_EQ(frames[i].block.raw_size_bytes, g.raw_blocks[i].size());
            EXPECT_EQ(encode_block(frames[i].block), g.raw_blocks[i]);
            offset += 8 + g.raw_blocks[i].size();
        }
    }
}

TEST(BlockStream, WrongMagicIsFramingErrorAtOffset)
{
    const GeneratedChain g = gen_chain(small_plan(3, 3));
    Bytes bad = g.block_file;
    const std::size_t second = 8 + g.raw_blocks[0].size();
    bad[second] ^= 0xFF;
    std::istringstream in(std::string(bad.begin(), bad.end()));
    BlockFileReader reader(in, g.magic);
    ASSERT_TRUE(reader.next());
    try {
        reader.next();
        FAIL() << "expected a framing error";
    } catch (const FramingError& e) {
        EXPECT_EQ(e.offset(), second);
    }
}

TEST(BlockStream, TruncatedFrameIsError)
{
    const GeneratedChain g = gen_chain(small_plan(3, 2));
    Bytes cut(g.block_file.begin(), g.block_file.end() - 10);
    std::istringstream in(std::string(cut.begin(), cut.end()));
    BlockFileReader reader(in, g.magic);
    ASSERT_TRUE(reader.next());
    EXPECT_THROW(reader.next(), FramingError);
}

TEST(BlockStream, GeneratedBlocksHaveMatchingMerkleRoots)
{
    const GeneratedChain g = gen_chain(small_plan(11, 30));
    for (const Bytes& raw : g.raw_blocks) {
        const Block b = decode_block(raw);
        EXPECT_TRUE(merkle_root_matches(b));
        EXPECT_EQ(encode_block(b), raw);
    }
}
