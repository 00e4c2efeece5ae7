#include <slimchain/minimize.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

namespace slimchain {

std::string_view mode_name(MinimizeMode m) noexcept
{
    switch (m) {
    case MinimizeMode::hash_only: return "hash_only";
    case MinimizeMode::copath: return "copath";
    case MinimizeMode::full: return "full";
    }
    return "unknown";
}

std::vector<std::uint32_t> MinimizedBlock::positions() const
{
    std::vector<std::uint32_t> p;
    p.reserve(kept.size());
    for (const KeptTx& k : kept) p.push_back(k.position);
    return p;
}

namespace {

void check_flags(const Block& block, const std::vector<bool>& unspent)
{
    if (unspent.size() != block.transactions.size()) {
        throw std::invalid_argument("unspent flag count " + std::to_string(unspent.size()) +
                                    " differs from transaction count " + std::to_string(block.transactions.size()));
    }
}

class NoResolver final : public TxResolver {
public:
    std::optional<TxLocation> locate(const Hash256&) const override { return std::nullopt; }
    std::optional<Hash256> txid_at(TxLocation) const override { return std::nullopt; }
};

} // namespace

MinimizedBlock copath_block(const Block& block, const std::vector<bool>& unspent)
{
    check_flags(block, unspent);
    MinimizedBlock mb;
    mb.block_hash = block.hash();
    mb.merkle_root = block.header.merkle_root;
    mb.tx_count = static_cast<std::uint32_t>(block.transactions.size());
    for (std::uint32_t i = 0; i < mb.tx_count; ++i) {
        if (unspent[i]) mb.kept.push_back(KeptTx{i, block.transactions[i]});
    }
    if (mb.kept.empty()) {
        mb.mode = MinimizeMode::hash_only;
        mb.retained_bytes = Hash256::size;
        return mb;
    }
    mb.mode = MinimizeMode::copath;
    const auto pos = mb.positions();
    const auto needed = copath_union(mb.tx_count, pos);
    if (!needed.empty()) {
        const auto levels = merkle_levels(block_txids(block));
        for (const TreeNode& n : needed) mb.nodes.push_back(CopathNode{n, levels[n.level][n.index]});
    }
    mb.retained_bytes = minimized_size(mb);
    return mb;
}

MinimizedBlock minimize_block(const Block& block, const std::vector<bool>& unspent)
{
    MinimizedBlock mb = copath_block(block, unspent);
    if (mb.mode == MinimizeMode::hash_only) return mb;
    const std::uint64_t full = serialized_size(block);
    if (mb.kept.size() < mb.tx_count && mb.retained_bytes < full) return mb;
    mb.mode = MinimizeMode::full;
    mb.nodes.clear();
    mb.kept.clear();
    for (std::uint32_t i = 0; i < mb.tx_count; ++i) mb.kept.push_back(KeptTx{i, block.transactions[i]});
    mb.retained_bytes = full;
    return mb;
}

bool verify_tx_in_minimized(const MinimizedBlock& mb, std::uint32_t position)
{
    if (mb.mode == MinimizeMode::hash_only) throw std::invalid_argument("hash-only block keeps no transactions");
    const bool found = std::any_of(mb.kept.begin(), mb.kept.end(), [&](const KeptTx& k) { return k.position == position; });
    if (!found) throw std::invalid_argument("position " + std::to_string(position) + " is not kept");
    return verify_minimized(mb);
}

bool verify_minimized(const MinimizedBlock& mb)
{
    if (mb.mode == MinimizeMode::hash_only) throw std::invalid_argument("hash-only block keeps no transactions");
    std::map<std::uint32_t, Hash256> leaves;
    for (const KeptTx& k : mb.kept) leaves.emplace(k.position, txid(k.tx));
    std::map<TreeNode, Hash256> nodes;
    for (const CopathNode& n : mb.nodes) nodes.emplace(n.node, n.hash);
    auto root = partial_root(mb.tx_count, leaves, nodes);
    return root && *root == mb.merkle_root;
}

Bytes encode_minimized(const MinimizedBlock& mb, SlackEncoder* encoder)
{
    if (mb.mode != MinimizeMode::copath) throw EncodeError("only copath blocks have a minimized record");
    Bytes out;
    put_u8(out, MINIMIZED_FORMAT_VERSION);
    put_u8(out, static_cast<std::uint8_t>(mb.mode));
    put_bytes(out, mb.block_hash.view());
    put_u8(out, encoder ? encoder->options().format_byte() : 0);
    append_varint(out, mb.tx_count);
    append_varint(out, mb.kept.size());
    for (const KeptTx& k : mb.kept) append_varint(out, k.position);
    for (const KeptTx& k : mb.kept) {
        if (encoder) encoder->append(out, k.tx);
        else append_transaction(out, k.tx);
    }
    for (const CopathNode& n : mb.nodes) put_bytes(out, n.hash.view());
    return out;
}

std::size_t minimized_size(const MinimizedBlock& mb, SlackEncoder* encoder)
{
    if (mb.mode != MinimizeMode::copath) throw EncodeError("only copath blocks have a minimized record");
    std::size_t n = 3 + Hash256::size + canonical_width(mb.tx_count) + canonical_width(mb.kept.size());
    for (const KeptTx& k : mb.kept) {
        n += canonical_width(k.position);
        n += encoder ? encoder->encoded_size(k.tx) : serialized_size(k.tx);
    }
    return n + mb.nodes.size() * Hash256::size;
}

MinimizedBlock decode_minimized(ByteView payload, const BlockHeader& header, Height height, const TxResolver* resolver,
                                const ScriptKvs* kvs, std::vector<std::uint32_t>* unresolved)
{
    ByteReader r(payload);
    if (r.u8("minimized format") != MINIMIZED_FORMAT_VERSION) r.fail("minimized format", "unsupported version");
    MinimizedBlock mb;
    mb.merkle_root = header.merkle_root;
    const std::uint8_t mode = r.u8("minimized mode");
    if (mode != static_cast<std::uint8_t>(MinimizeMode::copath)) r.fail("minimized mode", "expected copath mode");
    mb.mode = MinimizeMode::copath;
    mb.block_hash = Hash256(r.bytes(Hash256::size, "block hash"));
    const std::uint8_t encoding = r.u8("tx encoding");
    if (encoding != 0 && ((encoding & 0xF0) != COMPACT_FORMAT_VERSION || (encoding & 0x0C) != 0)) {
        r.fail("tx encoding", "unknown transaction encoding");
    }
    const std::uint64_t n = r.varint("tx count").value;
    const std::uint64_t k = r.varint("kept count").value;
    if (n == 0 || n > 0xFFFFFFFFULL) r.fail("tx count", "invalid transaction count");
    if (k == 0 || k > n || k > r.remaining()) r.fail("kept count", "invalid kept count");
    mb.tx_count = static_cast<std::uint32_t>(n);
    std::vector<std::uint32_t> pos;
    for (std::uint64_t i = 0; i < k; ++i) {
        const std::uint64_t p = r.varint("kept position").value;
        if (p >= n || (!pos.empty() && p <= pos.back())) r.fail("kept position", "positions must ascend below tx count");
        pos.push_back(static_cast<std::uint32_t>(p));
    }

    NoResolver none;
    BlockOverlayResolver overlay(resolver ? *resolver : none, height);
    std::vector<TxLocation> missing;
    for (std::uint32_t p : pos) {
        KeptTx kt;
        kt.position = p;
        if (encoding == 0) {
            kt.tx = read_transaction(r);
        } else {
            const std::size_t before = missing.size();
            kt.tx = read_compact_tx(r, encoding & 0x03, overlay, kvs, unresolved ? &missing : nullptr);
            if (missing.size() != before) {
                unresolved->push_back(p);
                mb.kept.push_back(std::move(kt));
                continue;
            }
        }
        overlay.push(txid(kt.tx), p);
        mb.kept.push_back(std::move(kt));
    }
    for (const TreeNode& node : copath_union(mb.tx_count, pos)) {
        mb.nodes.push_back(CopathNode{node, Hash256(r.bytes(Hash256::size, "copath node"))});
    }
    if (!r.empty()) r.fail("minimized block", "trailing bytes");
    mb.retained_bytes = payload.size();
    return mb;
}

} // namespace slimchain
