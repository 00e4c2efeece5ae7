#include <slimchain/chain.hpp>

#include <slimchain/merkle.hpp>

#include <algorithm>

namespace slimchain {

std::optional<TxLocation> ChainIndex::locate(const Hash256& txid) const
{
    auto it = m_locator.find(txid);
    if (it == m_locator.end()) return std::nullopt;
    return it->second;
}

std::optional<Hash256> ChainIndex::txid_at(TxLocation loc) const
{
    if (loc.height >= m_block_txids.size()) return std::nullopt;
    const auto& ids = m_block_txids[loc.height];
    if (loc.tx_index >= ids.size()) return std::nullopt;
    return ids[loc.tx_index];
}

std::optional<Height> ChainIndex::tip_height() const noexcept
{
    if (m_spine.empty()) return std::nullopt;
    return static_cast<Height>(m_spine.size() - 1);
}

void ChainIndex::append(const Block& block, std::vector<Hash256> txids)
{
    const auto height = static_cast<Height>(m_spine.size());
    m_spine.push_back(SpineLink{height, block.hash(), block.header.prev_block_hash});
    for (std::uint32_t i = 0; i < txids.size(); ++i) {
        auto [it, inserted] = m_locator.insert_or_assign(txids[i], TxLocation{height, i});
        if (!inserted) ++m_duplicate_txids;
    }
    m_block_txids.push_back(std::move(txids));
}

std::optional<TxLocation> locate_tx(const ChainIndex& index, const Hash256& txid)
{
    return index.locate(txid);
}

bool is_unspendable(const TxOut& out) noexcept
{
    return !out.script.data.empty() && out.script.data[0] == 0x6A;
}

std::vector<SpentRecord> ChainState::connect_block(const Block& block, Height height)
{
    using Kind = ChainError::Kind;
    if (height != m_index.block_count()) {
        throw ChainError(Kind::continuity, height,
                         "expected next height " + std::to_string(m_index.block_count()));
    }
    if (height > 0 && block.header.prev_block_hash != m_index.spine().back().block_hash) {
        throw ChainError(Kind::continuity, height, "prev_block_hash does not match chain tip");
    }
    if (block.transactions.empty() || !block.transactions.front().is_coinbase()) {
        throw ChainError(Kind::coinbase, height, "first transaction is not a coinbase");
    }
    std::vector<Hash256> ids = block_txids(block);
    if (merkle_root(ids) != block.header.merkle_root) {
        throw ChainError(Kind::bad_merkle_root, height, "merkle root does not match transactions");
    }

    // Undo log so a failure part-way through leaves the set untouched.
    std::vector<std::pair<OutPoint, std::optional<UtxoEntry>>> undo;
    std::vector<SpentRecord> spent;
    std::uint64_t created = 0;
    std::uint64_t skipped = 0;

    auto rollback = [&] {
        for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
            if (it->second) m_utxos[it->first] = std::move(*it->second);
            else m_utxos.erase(it->first);
        }
    };

    try {
        for (std::uint32_t t = 0; t < block.transactions.size(); ++t) {
            const Transaction& tx = block.transactions[t];
            if (t > 0) {
                for (const TxIn& in : tx.inputs) {
                    if (in.prevout.hash.is_null()) {
                        throw ChainError(Kind::invalid_outpoint, height,
                                         "tx " + std::to_string(t) + " spends the null outpoint " + to_string(in.prevout));
                    }
                    auto it = m_utxos.find(in.prevout);
                    if (it == m_utxos.end()) {
                        throw ChainError(Kind::missing_input, height,
                                         "double-spend or unknown input " + to_string(in.prevout));
                    }
                    spent.push_back(SpentRecord{in.prevout, it->second.creation_height, height});
                    undo.emplace_back(in.prevout, std::move(it->second));
                    m_utxos.erase(it);
                }
            }
            for (std::uint32_t o = 0; o < tx.outputs.size(); ++o) {
                const TxOut& out = tx.outputs[o];
                if (m_options.exclude_unspendable && is_unspendable(out)) {
                    ++skipped;
                    continue;
                }
                OutPoint op{ids[t], o};
                std::optional<UtxoEntry> previous;
                if (auto it = m_utxos.find(op); it != m_utxos.end()) previous = it->second;
                m_utxos[op] = UtxoEntry{op, out.value, out.script.data, height};
                undo.emplace_back(op, std::move(previous));
                ++created;
            }
        }
    } catch (...) {
        rollback();
        throw;
    }

    m_index.append(block, std::move(ids));
    m_spent.insert(m_spent.end(), spent.begin(), spent.end());
    m_created += created;
    m_unspendable_skipped += skipped;
    return spent;
}

LifespanLog ChainState::lifespan_log() const
{
    LifespanLog log;
    log.spent = m_spent;
    log.unspent_creation_heights.reserve(m_utxos.size());
    for (const auto& [op, entry] : m_utxos) log.unspent_creation_heights.push_back(entry.creation_height);
    std::sort(log.unspent_creation_heights.begin(), log.unspent_creation_heights.end());
    return log;
}

std::vector<bool> ChainState::unspent_flags(const Block& block, Height height) const
{
    std::vector<bool> flags(block.transactions.size(), false);
    const auto& ids = m_index.txids_at(height);
    for (std::size_t t = 0; t < block.transactions.size(); ++t) {
        for (std::uint32_t o = 0; o < block.transactions[t].outputs.size(); ++o) {
            auto it = m_utxos.find(OutPoint{ids[t], o});
            if (it != m_utxos.end() && it->second.creation_height == height) {
                flags[t] = true;
                break;
            }
        }
    }
    return flags;
}

} // namespace slimchain
