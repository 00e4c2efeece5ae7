#include <slimchain/slack.hpp>

namespace slimchain {

void SlackStats::merge(const SlackStats& o)
{
    transactions += o.transactions;
    version_escapes += o.version_escapes;
    locktime_escapes += o.locktime_escapes;
    sequence_escapes += o.sequence_escapes;
    coinbase_prevouts += o.coinbase_prevouts;
    local_prevouts += o.local_prevouts;
    foreign_prevouts += o.foreign_prevouts;
    index_overflow_fallbacks += o.index_overflow_fallbacks;
    script_refs += o.script_refs;
}

std::optional<TxLocation> BlockOverlayResolver::locate(const Hash256& txid) const
{
    for (const auto& [idx, id] : m_local) {
        if (id == txid) return TxLocation{m_height, idx};
    }
    return m_base.locate(txid);
}

std::optional<Hash256> BlockOverlayResolver::txid_at(TxLocation loc) const
{
    if (loc.height == m_height) {
        for (const auto& [idx, id] : m_local) {
            if (idx == loc.tx_index) return id;
        }
    }
    return m_base.txid_at(loc);
}

namespace {

class BitWriter {
public:
    explicit BitWriter(std::size_t bits) : m_bytes((bits + 7) / 8, 0) {}
    void set(std::size_t bit, bool v)
    {
        if (v) m_bytes[bit / 8] |= static_cast<std::uint8_t>(1U << (bit % 8));
    }
    void set_field(std::size_t bit, unsigned value, unsigned width)
    {
        for (unsigned i = 0; i < width; ++i) set(bit + i, (value >> i) & 1U);
    }
    const Bytes& bytes() const noexcept { return m_bytes; }

private:
    Bytes m_bytes;
};

class BitReader {
public:
    explicit BitReader(ByteView bytes) : m_bytes(bytes) {}
    bool get(std::size_t bit) const { return (m_bytes[bit / 8] >> (bit % 8)) & 1U; }
    unsigned field(std::size_t bit, unsigned width) const
    {
        unsigned v = 0;
        for (unsigned i = 0; i < width; ++i) v |= unsigned(get(bit + i)) << i;
        return v;
    }

private:
    ByteView m_bytes;
};

constexpr std::size_t TX_BITS = 4;
constexpr std::size_t INPUT_BITS = 3;
constexpr std::size_t BIT_VERSION_COMMON = 0;
constexpr std::size_t BIT_VERSION_TWO = 1;
constexpr std::size_t BIT_WITNESS = 2;
constexpr std::size_t BIT_LOCKTIME_ZERO = 3;

std::size_t script_slot_count(const Transaction& tx)
{
    std::size_t n = tx.inputs.size() + tx.outputs.size();
    if (tx.has_witness) {
        for (const WitnessStack& w : tx.witnesses) n += w.items.size();
    }
    return n;
}

bool can_reference(const VarBytes& s, const ScriptKvs* kvs, ScriptKey& key)
{
    if (!kvs) return false;
    if (s.len_width != 0 && s.len_width != canonical_width(s.data.size())) return false;
    auto k = kvs->ref_for(s.data);
    if (!k) return false;
    key = *k;
    return true;
}

} // namespace

void SlackEncoder::append(Bytes& out, const Transaction& tx)
{
    check_transaction(tx);
    const bool slack = m_options.slack;
    const ScriptKvs* kvs = m_options.kvs;
    ++m_stats.transactions;

    append_varint(out, VarInt{tx.inputs.size(), effective_width(tx.inputs.size(), tx.input_count_width)});
    append_varint(out, VarInt{tx.outputs.size(), effective_width(tx.outputs.size(), tx.output_count_width)});

    const bool version_common = slack && (tx.version == 1 || tx.version == 2);
    const bool locktime_zero = slack && tx.lock_time == 0;
    if (!version_common) ++m_stats.version_escapes;
    if (!locktime_zero) ++m_stats.locktime_escapes;

    BitWriter header(TX_BITS + INPUT_BITS * tx.inputs.size());
    header.set(BIT_VERSION_COMMON, version_common);
    header.set(BIT_VERSION_TWO, version_common && tx.version == 2);
    header.set(BIT_WITNESS, tx.has_witness);
    header.set(BIT_LOCKTIME_ZERO, locktime_zero);

    std::vector<PrevoutForm> forms(tx.inputs.size(), PrevoutForm::foreign);
    std::vector<TxLocation> locs(tx.inputs.size());
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        const TxIn& in = tx.inputs[i];
        PrevoutForm form = PrevoutForm::foreign;
        if (slack) {
            if (in.prevout.is_null()) {
                form = PrevoutForm::coinbase;
            } else if (auto loc = m_resolver.locate(in.prevout.hash)) {
                if (loc->tx_index <= 0xFFFF) {
                    form = PrevoutForm::local;
                    locs[i] = *loc;
                } else {
                    ++m_stats.index_overflow_fallbacks;
                }
            }
        }
        switch (form) {
        case PrevoutForm::coinbase: ++m_stats.coinbase_prevouts; break;
        case PrevoutForm::local: ++m_stats.local_prevouts; break;
        case PrevoutForm::foreign: ++m_stats.foreign_prevouts; break;
        }
        forms[i] = form;
        const bool seq_default = slack && in.sequence == SEQUENCE_FINAL;
        if (!seq_default) ++m_stats.sequence_escapes;
        const std::size_t base = TX_BITS + INPUT_BITS * i;
        header.set_field(base, static_cast<unsigned>(form), 2);
        header.set(base + 2, seq_default);
    }
    put_bytes(out, header.bytes());

    if (!version_common) put_le32(out, tx.version);
    if (!locktime_zero) put_le32(out, tx.lock_time);
    if (tx.has_witness) {
        for (const WitnessStack& w : tx.witnesses) {
            append_varint(out, VarInt{w.items.size(), effective_width(w.items.size(), w.count_width)});
        }
    }

    // Script slots in layout order: input scripts, output scripts, witness items.
    std::vector<const VarBytes*> slots;
    slots.reserve(script_slot_count(tx));
    for (const TxIn& in : tx.inputs) slots.push_back(&in.script);
    for (const TxOut& o : tx.outputs) slots.push_back(&o.script);
    if (tx.has_witness) {
        for (const WitnessStack& w : tx.witnesses)
            for (const VarBytes& item : w.items) slots.push_back(&item);
    }
    std::vector<ScriptKey> keys(slots.size());
    std::vector<bool> is_ref(slots.size(), false);
    if (kvs) {
        BitWriter refs(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s) {
            is_ref[s] = can_reference(*slots[s], kvs, keys[s]);
            refs.set(s, is_ref[s]);
            if (is_ref[s]) ++m_stats.script_refs;
        }
        put_bytes(out, refs.bytes());
    }
    std::size_t slot = 0;
    auto put_slot = [&](const VarBytes& s) {
        if (is_ref[slot]) put_bytes(out, keys[slot]);
        else {
            append_varint(out, VarInt{s.data.size(), s.len_width});
            put_bytes(out, s.data);
        }
        ++slot;
    };

    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        const TxIn& in = tx.inputs[i];
        switch (forms[i]) {
        case PrevoutForm::coinbase: break;
        case PrevoutForm::local:
            put_le32(out, locs[i].height);
            put_le16(out, static_cast<std::uint16_t>(locs[i].tx_index));
            append_varint(out, in.prevout.index);
            break;
        case PrevoutForm::foreign:
            put_bytes(out, in.prevout.hash.view());
            put_le32(out, in.prevout.index);
            break;
        }
        put_slot(in.script);
        if (!(slack && in.sequence == SEQUENCE_FINAL)) put_le32(out, in.sequence);
    }
    for (const TxOut& o : tx.outputs) {
        if (slack) append_varint(out, o.value);
        else put_le64(out, o.value);
        put_slot(o.script);
    }
    if (tx.has_witness) {
        for (const WitnessStack& w : tx.witnesses)
            for (const VarBytes& item : w.items) put_slot(item);
    }
}

std::size_t SlackEncoder::encoded_size(const Transaction& tx)
{
    m_scratch.clear();
    append(m_scratch, tx);
    return m_scratch.size();
}

Transaction read_compact_tx(ByteReader& r, std::uint8_t option_bits, const TxResolver& resolver, const ScriptKvs* kvs,
                            std::vector<TxLocation>* unresolved)
{
    const bool refs = option_bits & CODEC_REFS;
    if (refs && !kvs) r.fail("script reference", "compact transaction uses script references but no script store given");

    Transaction tx;
    VarInt n_in = r.varint("input count");
    VarInt n_out = r.varint("output count");
    if (n_in.value == 0) r.fail("input count", "transaction has no inputs");
    if (n_out.value == 0) r.fail("output count", "transaction has no outputs");
    if (n_in.value > r.remaining() || n_out.value > r.remaining()) r.fail("input count", "count exceeds remaining input");
    tx.input_count_width = n_in.width;
    tx.output_count_width = n_out.width;
    tx.inputs.resize(static_cast<std::size_t>(n_in.value));
    tx.outputs.resize(static_cast<std::size_t>(n_out.value));

    const std::size_t header_bits = TX_BITS + INPUT_BITS * tx.inputs.size();
    BitReader header(r.bytes((header_bits + 7) / 8, "header bitmap"));
    const bool version_common = header.get(BIT_VERSION_COMMON);
    tx.has_witness = header.get(BIT_WITNESS);
    const bool locktime_zero = header.get(BIT_LOCKTIME_ZERO);

    tx.version = version_common ? (header.get(BIT_VERSION_TWO) ? 2U : 1U) : r.le32("version");
    tx.lock_time = locktime_zero ? 0 : r.le32("lock_time");

    std::size_t n_slots = tx.inputs.size() + tx.outputs.size();
    if (tx.has_witness) {
        tx.witnesses.resize(tx.inputs.size());
        for (WitnessStack& w : tx.witnesses) {
            VarInt n = r.varint("witness count");
            if (n.value > r.remaining()) r.fail("witness count", "witness item count exceeds remaining input");
            w.count_width = n.width;
            w.items.resize(static_cast<std::size_t>(n.value));
            n_slots += w.items.size();
        }
    }
    Bytes ref_bits;
    if (refs) {
        ByteView rb = r.bytes((n_slots + 7) / 8, "reference bitmap");
        ref_bits.assign(rb.begin(), rb.end());
    }
    BitReader ref_reader(ref_bits);
    std::size_t slot = 0;
    auto read_slot = [&](VarBytes& s, std::string_view field) {
        if (refs && ref_reader.get(slot)) {
            const std::size_t at = r.offset();
            ByteView k = r.bytes(SCRIPT_REF_WIDTH, "script reference");
            ScriptKey key;
            std::copy(k.begin(), k.end(), key.begin());
            const Bytes* script = kvs->find(key);
            if (!script) throw DecodeError("script reference", at, "unknown script key " + to_hex(key));
            s.data = *script;
            s.len_width = canonical_width(script->size());
        } else {
            VarInt len = r.varint(field);
            if (len.value > r.remaining()) r.fail(field, "script length exceeds remaining input");
            ByteView body = r.bytes(static_cast<std::size_t>(len.value), field);
            s.data.assign(body.begin(), body.end());
            s.len_width = len.width;
        }
        ++slot;
    };

    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        TxIn& in = tx.inputs[i];
        const std::size_t base = TX_BITS + INPUT_BITS * i;
        const unsigned form = header.field(base, 2);
        const std::size_t at = r.offset();
        switch (form) {
        case static_cast<unsigned>(PrevoutForm::coinbase):
            in.prevout = OutPoint::null();
            break;
        case static_cast<unsigned>(PrevoutForm::local): {
            TxLocation loc;
            loc.height = r.le32("prevout height");
            loc.tx_index = r.le16("prevout tx index");
            VarInt out_index = r.varint("prevout output index");
            if (out_index.value > 0xFFFFFFFFULL) r.fail("prevout output index", "output index exceeds 32 bits");
            auto id = resolver.txid_at(loc);
            if (!id) {
                if (!unresolved) throw UnresolvedReference(loc, at);
                unresolved->push_back(loc);
                id = Hash256{};
            }
            in.prevout = OutPoint{*id, static_cast<std::uint32_t>(out_index.value)};
            break;
        }
        case static_cast<unsigned>(PrevoutForm::foreign):
            in.prevout.hash = Hash256(r.bytes(32, "prevout hash"));
            in.prevout.index = r.le32("prevout index");
            break;
        default:
            r.fail("header bitmap", "invalid prevout form");
        }
        read_slot(in.script, "input script");
        in.sequence = header.get(base + 2) ? SEQUENCE_FINAL : r.le32("sequence");
    }
    const bool slack = option_bits & CODEC_SLACK;
    for (TxOut& o : tx.outputs) {
        const std::size_t at = r.offset();
        o.value = slack ? r.varint("value").value : r.le64("value");
        if (o.value > MAX_MONEY) throw DecodeError("value", at, "output value exceeds money supply");
        read_slot(o.script, "output script");
    }
    if (tx.has_witness) {
        for (WitnessStack& w : tx.witnesses)
            for (VarBytes& item : w.items) read_slot(item, "witness item");
    }
    return tx;
}

Bytes slack_encode(const Transaction& tx, const TxResolver& locator, SlackStats* stats)
{
    SlackEncoder enc(locator, CodecOptions{true, nullptr});
    Bytes out;
    out.push_back(enc.options().format_byte());
    enc.append(out, tx);
    if (stats) stats->merge(enc.stats());
    return out;
}

namespace {

std::uint8_t read_format_byte(ByteReader& r)
{
    const std::uint8_t tag = r.u8("format");
    if ((tag & 0xF0) != COMPACT_FORMAT_VERSION || (tag & 0x0C) != 0) {
        r.fail("format", "unsupported compact format byte " + std::to_string(tag));
    }
    return tag & 0x03;
}

} // namespace

Transaction slack_decode_tx(ByteView compact, const TxResolver& resolver, const ScriptKvs* kvs)
{
    ByteReader r(compact);
    const std::uint8_t bits = read_format_byte(r);
    Transaction tx = read_compact_tx(r, bits, resolver, kvs);
    if (!r.empty()) r.fail("compact transaction", "trailing bytes");
    return tx;
}

Bytes slack_decode(ByteView compact, const TxResolver& resolver, const ScriptKvs* kvs)
{
    return encode_transaction(slack_decode_tx(compact, resolver, kvs));
}

Bytes encode_compact_block(const Block& block, SlackEncoder& encoder)
{
    Bytes out;
    out.push_back(encoder.options().format_byte());
    append_varint(out, VarInt{block.transactions.size(),
                              effective_width(block.transactions.size(), block.tx_count_width)});
    for (const Transaction& tx : block.transactions) encoder.append(out, tx);
    return out;
}

std::size_t compact_block_size(const Block& block, SlackEncoder& encoder)
{
    std::size_t n = 1 + effective_width(block.transactions.size(), block.tx_count_width);
    for (const Transaction& tx : block.transactions) n += encoder.encoded_size(tx);
    return n;
}

Block decode_compact_block(ByteView payload, const BlockHeader& header, Height height, const TxResolver& resolver,
                           const ScriptKvs* kvs, std::vector<std::uint32_t>* unresolved_txs)
{
    ByteReader r(payload);
    const std::uint8_t bits = read_format_byte(r);
    Block b;
    b.header = header;
    VarInt n = r.varint("tx count");
    if (n.value == 0) r.fail("tx count", "block has no transactions");
    if (n.value > r.remaining()) r.fail("tx count", "tx count exceeds remaining input");
    b.tx_count_width = n.width;
    BlockOverlayResolver overlay(resolver, height);
    std::vector<TxLocation> missing;
    for (std::uint64_t i = 0; i < n.value; ++i) {
        const std::size_t before = missing.size();
        b.transactions.push_back(read_compact_tx(r, bits, overlay, kvs, unresolved_txs ? &missing : nullptr));
        if (missing.size() != before) unresolved_txs->push_back(static_cast<std::uint32_t>(i));
        else overlay.push(txid(b.transactions.back()), static_cast<std::uint32_t>(i));
    }
    if (!r.empty()) r.fail("compact block", "trailing bytes");
    b.raw_size_bytes = serialized_size(b);
    return b;
}

} // namespace slimchain
