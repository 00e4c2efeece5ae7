#include <slimchain/wire.hpp>

#include <slimchain/merkle.hpp>

#include <fstream>
#include <iterator>

namespace slimchain {

NetworkMagic parse_magic(std::string_view hex)
{
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    Bytes b = from_hex(hex);
    if (b.size() != 4) throw std::invalid_argument("network magic must be 4 bytes (8 hex digits)");
    return {b[0], b[1], b[2], b[3]};
}

std::string magic_hex(const NetworkMagic& m)
{
    return to_hex(m);
}

std::size_t VarBytes::serialized_size() const
{
    return effective_width(data.size(), len_width) + data.size();
}

std::string to_string(const OutPoint& o)
{
    return o.hash.hex() + ":" + std::to_string(o.index);
}

namespace {

VarBytes read_var_bytes(ByteReader& r, std::string_view field)
{
    VarInt len = r.varint(field);
    if (len.value > r.remaining()) r.fail(field, "length " + std::to_string(len.value) + " exceeds remaining input");
    ByteView body = r.bytes(static_cast<std::size_t>(len.value), field);
    return VarBytes{Bytes(body.begin(), body.end()), len.width};
}

void append_var_bytes(Bytes& out, const VarBytes& v)
{
    append_varint(out, VarInt{v.data.size(), v.len_width});
    put_bytes(out, v.data);
}

// Minimum plausible sizes, used to reject absurd counts before allocating.
constexpr std::size_t MIN_TXIN_SIZE = 41;
constexpr std::size_t MIN_TXOUT_SIZE = 9;

} // namespace

Transaction read_transaction(ByteReader& r)
{
    Transaction tx;
    tx.version = r.le32("version");

    if (r.peek() == 0x00) {
        if (r.peek(1) != 0x01) {
            r.fail("segwit flag", "zero input count or unknown segwit flag");
        }
        r.skip(2, "segwit marker");
        tx.has_witness = true;
    }

    VarInt n_in = r.varint("input count");
    if (n_in.value == 0) r.fail("input count", "transaction has no inputs");
    if (n_in.value > r.remaining() / MIN_TXIN_SIZE) r.fail("input count", "input count exceeds remaining input");
    tx.input_count_width = n_in.width;
    tx.inputs.resize(static_cast<std::size_t>(n_in.value));
    for (TxIn& in : tx.inputs) {
        in.prevout.hash = Hash256(r.bytes(32, "prevout hash"));
        in.prevout.index = r.le32("prevout index");
        in.script = read_var_bytes(r, "input script");
        in.sequence = r.le32("sequence");
    }

    VarInt n_out = r.varint("output count");
    if (n_out.value == 0) r.fail("output count", "transaction has no outputs");
    if (n_out.value > r.remaining() / MIN_TXOUT_SIZE) r.fail("output count", "output count exceeds remaining input");
    tx.output_count_width = n_out.width;
    tx.outputs.resize(static_cast<std::size_t>(n_out.value));
    for (TxOut& out : tx.outputs) {
        const std::size_t at = r.offset();
        out.value = r.le64("value");
        if (out.value > MAX_MONEY) throw DecodeError("value", at, "output value exceeds money supply");
        out.script = read_var_bytes(r, "output script");
    }

    if (tx.has_witness) {
        tx.witnesses.resize(tx.inputs.size());
        for (WitnessStack& w : tx.witnesses) {
            VarInt n_items = r.varint("witness count");
            if (n_items.value > r.remaining()) r.fail("witness count", "witness item count exceeds remaining input");
            w.count_width = n_items.width;
            w.items.reserve(static_cast<std::size_t>(n_items.value));
            for (std::uint64_t i = 0; i < n_items.value; ++i) w.items.push_back(read_var_bytes(r, "witness item"));
        }
    }

    tx.lock_time = r.le32("lock_time");
    return tx;
}

std::pair<Transaction, std::size_t> decode_transaction(ByteView in, std::size_t base_offset)
{
    ByteReader r(in, base_offset);
    Transaction tx = read_transaction(r);
    return {std::move(tx), r.position()};
}

Transaction decode_transaction_exact(ByteView in)
{
    auto [tx, used] = decode_transaction(in);
    if (used != in.size()) {
        throw DecodeError("transaction", used, "trailing bytes after transaction");
    }
    return tx;
}

void check_transaction(const Transaction& tx)
{
    if (tx.inputs.empty()) throw EncodeError("transaction has no inputs");
    if (tx.outputs.empty()) throw EncodeError("transaction has no outputs");
    if (tx.has_witness && tx.witnesses.size() != tx.inputs.size()) {
        throw EncodeError("witness stack count " + std::to_string(tx.witnesses.size()) + " does not match input count " +
                          std::to_string(tx.inputs.size()));
    }
    for (const TxOut& o : tx.outputs) {
        if (o.value > MAX_MONEY) throw EncodeError("output value exceeds money supply");
    }
}

void append_transaction(Bytes& out, const Transaction& tx, bool include_witness)
{
    check_transaction(tx);
    const bool witness = include_witness && tx.has_witness;
    put_le32(out, tx.version);
    if (witness) {
        put_u8(out, 0x00);
        put_u8(out, 0x01);
    }
    append_varint(out, VarInt{tx.inputs.size(), tx.input_count_width});
    for (const TxIn& in : tx.inputs) {
        put_bytes(out, in.prevout.hash.view());
        put_le32(out, in.prevout.index);
        append_var_bytes(out, in.script);
        put_le32(out, in.sequence);
    }
    append_varint(out, VarInt{tx.outputs.size(), tx.output_count_width});
    for (const TxOut& o : tx.outputs) {
        put_le64(out, o.value);
        append_var_bytes(out, o.script);
    }
    if (witness) {
        for (const WitnessStack& w : tx.witnesses) {
            append_varint(out, VarInt{w.items.size(), w.count_width});
            for (const VarBytes& item : w.items) append_var_bytes(out, item);
        }
    }
    put_le32(out, tx.lock_time);
}

Bytes encode_transaction(const Transaction& tx, bool include_witness)
{
    Bytes out;
    out.reserve(serialized_size(tx, include_witness));
    append_transaction(out, tx, include_witness);
    return out;
}

std::size_t serialized_size(const Transaction& tx, bool include_witness)
{
    const bool witness = include_witness && tx.has_witness;
    std::size_t n = 8 + (witness ? 2 : 0);
    n += effective_width(tx.inputs.size(), tx.input_count_width);
    for (const TxIn& in : tx.inputs) n += 36 + in.script.serialized_size() + 4;
    n += effective_width(tx.outputs.size(), tx.output_count_width);
    for (const TxOut& o : tx.outputs) n += 8 + o.script.serialized_size();
    if (witness) {
        for (const WitnessStack& w : tx.witnesses) {
            n += effective_width(w.items.size(), w.count_width);
            for (const VarBytes& item : w.items) n += item.serialized_size();
        }
    }
    return n;
}

Hash256 txid(const Transaction& tx)
{
    return double_sha256(encode_transaction(tx, false));
}

Hash256 wtxid(const Transaction& tx)
{
    return double_sha256(encode_transaction(tx, true));
}

BlockHeader read_header(ByteReader& r)
{
    BlockHeader h;
    h.version = r.le32("header version");
    h.prev_block_hash = Hash256(r.bytes(32, "prev_block_hash"));
    h.merkle_root = Hash256(r.bytes(32, "merkle_root"));
    h.timestamp = r.le32("timestamp");
    h.bits = r.le32("bits");
    h.nonce = r.le32("nonce");
    return h;
}

void append_header(Bytes& out, const BlockHeader& h)
{
    put_le32(out, h.version);
    put_bytes(out, h.prev_block_hash.view());
    put_bytes(out, h.merkle_root.view());
    put_le32(out, h.timestamp);
    put_le32(out, h.bits);
    put_le32(out, h.nonce);
}

BlockHeader decode_header(ByteView in)
{
    ByteReader r(in);
    BlockHeader h = read_header(r);
    if (!r.empty()) r.fail("header", "trailing bytes after header");
    return h;
}

Hash256 BlockHeader::hash() const
{
    Bytes buf;
    buf.reserve(HEADER_SIZE);
    append_header(buf, *this);
    return double_sha256(buf);
}

Block decode_block(ByteView in, std::size_t base_offset)
{
    ByteReader r(in, base_offset);
    Block b;
    b.header = read_header(r);
    VarInt n = r.varint("tx count");
    if (n.value == 0) r.fail("tx count", "block has no transactions");
    if (n.value > r.remaining() / 10) r.fail("tx count", "tx count exceeds remaining input");
    b.tx_count_width = n.width;
    b.transactions.reserve(static_cast<std::size_t>(n.value));
    for (std::uint64_t i = 0; i < n.value; ++i) b.transactions.push_back(read_transaction(r));
    if (!r.empty()) r.fail("block", "trailing bytes after last transaction");
    b.raw_size_bytes = in.size();
    return b;
}

Bytes encode_block(const Block& b)
{
    Bytes out;
    out.reserve(serialized_size(b));
    append_header(out, b.header);
    append_varint(out, VarInt{b.transactions.size(), b.tx_count_width});
    for (const Transaction& tx : b.transactions) append_transaction(out, tx);
    return out;
}

std::size_t serialized_size(const Block& b)
{
    std::size_t n = HEADER_SIZE + effective_width(b.transactions.size(), b.tx_count_width);
    for (const Transaction& tx : b.transactions) n += serialized_size(tx);
    return n;
}

std::vector<Hash256> block_txids(const Block& b)
{
    std::vector<Hash256> ids;
    ids.reserve(b.transactions.size());
    for (const Transaction& tx : b.transactions) ids.push_back(txid(tx));
    return ids;
}

bool merkle_root_matches(const Block& b)
{
    if (b.transactions.empty()) return false;
    return merkle_root(block_txids(b)) == b.header.merkle_root;
}

std::optional<FramedBlock> BlockFileReader::next()
{
    for (;;) {
        const std::uint64_t frame_start = m_offset;
        std::uint8_t head[8];
        m_in.read(reinterpret_cast<char*>(head), 4);
        const auto got = static_cast<std::size_t>(m_in.gcount());
        if (got == 0) return std::nullopt;

        bool all_zero = true;
        for (std::size_t i = 0; i < got; ++i) all_zero = all_zero && head[i] == 0;
        if (all_zero) {
            // Zero padding: consume until the next non-zero byte or end of file.
            m_offset += got;
            int c;
            while ((c = m_in.peek()) == 0) {
                m_in.get();
                ++m_offset;
            }
            if (c == std::char_traits<char>::eof()) return std::nullopt;
            continue;
        }
        if (got < 4) throw FramingError(frame_start, "truncated frame magic");
        if (!std::equal(m_magic.begin(), m_magic.end(), head)) {
            throw FramingError(frame_start, "wrong network magic " + to_hex(ByteView(head, 4)));
        }
        m_in.read(reinterpret_cast<char*>(head + 4), 4);
        if (m_in.gcount() != 4) throw FramingError(frame_start, "truncated frame length");
        const std::uint32_t len = read_le32(head + 4);

        Bytes body(len);
        m_in.read(reinterpret_cast<char*>(body.data()), len);
        if (static_cast<std::uint64_t>(m_in.gcount()) != len) {
            throw FramingError(frame_start, "frame length " + std::to_string(len) + " exceeds remaining bytes");
        }
        m_offset += 8 + std::uint64_t(len);
        return FramedBlock{decode_block(body, frame_start + 8), frame_start};
    }
}

std::vector<Block> read_block_file(const std::filesystem::path& path, NetworkMagic magic)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open block file " + path.string());
    BlockFileReader reader(in, magic);
    std::vector<Block> blocks;
    while (auto fb = reader.next()) blocks.push_back(std::move(fb->block));
    return blocks;
}

void append_block_frame(Bytes& out, const Block& b, NetworkMagic magic)
{
    Bytes body = encode_block(b);
    put_bytes(out, magic);
    put_le32(out, static_cast<std::uint32_t>(body.size()));
    put_bytes(out, body);
}

} // namespace slimchain
