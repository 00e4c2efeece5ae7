#include <slimchain/dedup.hpp>

#include <algorithm>
#include <tuple>

namespace slimchain {

ScriptKey script_key(ByteView script)
{
    const Hash256 h = sha256(script);
    ScriptKey k;
    std::copy_n(h.view().begin(), SCRIPT_REF_WIDTH, k.begin());
    return k;
}

bool ScriptKvs::insert(ByteView script)
{
    const ScriptKey k = script_key(script);
    auto it = m_entries.find(k);
    if (it != m_entries.end()) return std::equal(it->second.begin(), it->second.end(), script.begin(), script.end());
    m_entries.emplace(k, Bytes(script.begin(), script.end()));
    return true;
}

std::optional<ScriptKey> ScriptKvs::ref_for(ByteView script) const
{
    if (m_entries.empty()) return std::nullopt;
    const ScriptKey k = script_key(script);
    auto it = m_entries.find(k);
    if (it == m_entries.end() || !std::equal(it->second.begin(), it->second.end(), script.begin(), script.end())) {
        return std::nullopt;
    }
    return k;
}

const Bytes* ScriptKvs::find(const ScriptKey& key) const
{
    auto it = m_entries.find(key);
    return it == m_entries.end() ? nullptr : &it->second;
}

std::uint64_t ScriptKvs::serialized_size() const
{
    std::uint64_t n = 0;
    for (const auto& [k, s] : m_entries) n += k.size() + canonical_width(s.size()) + s.size();
    return n;
}

void DedupBuilder::add(const VarBytes& s, ScriptRef site)
{
    m_all_bytes += s.data.size();
    if (s.data.size() <= m_ref_width) return;
    if (s.len_width != 0 && s.len_width != canonical_width(s.data.size())) return;
    Tally& t = m_tally[s.data];
    ++t.count;
    t.sites.push_back(site);
}

void DedupBuilder::add_transaction(const Transaction& tx, Height height, std::uint32_t tx_index)
{
    for (std::uint32_t i = 0; i < tx.inputs.size(); ++i) {
        add(tx.inputs[i].script, ScriptRef{height, tx_index, ScriptSlot::input_script, i, {}});
    }
    for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) {
        add(tx.outputs[i].script, ScriptRef{height, tx_index, ScriptSlot::output_script, i, {}});
    }
    if (tx.has_witness) {
        std::uint32_t item = 0;
        for (const WitnessStack& w : tx.witnesses) {
            for (const VarBytes& v : w.items) add(v, ScriptRef{height, tx_index, ScriptSlot::witness_item, item++, {}});
        }
    }
}

void DedupBuilder::add_block(const Block& block, Height height)
{
    for (std::uint32_t i = 0; i < block.transactions.size(); ++i) add_transaction(block.transactions[i], height, i);
}

DedupResult DedupBuilder::finish() &&
{
    DedupResult r;
    r.savings.all_script_bytes = m_all_bytes;

    std::vector<const std::pair<const Bytes, Tally>*> chosen;
    std::map<ScriptKey, std::uint32_t> key_uses;
    for (const auto& entry : m_tally) {
        const std::uint64_t len = entry.first.size();
        const std::uint64_t count = entry.second.count;
        if (count < 2 || count * len <= len + count * m_ref_width) continue;
        chosen.push_back(&entry);
        ++key_uses[script_key(entry.first)];
    }
    for (const auto* entry : chosen) {
        const ScriptKey key = script_key(entry->first);
        if (key_uses[key] > 1) continue;
        r.kvs.insert(entry->first);
        const std::uint64_t len = entry->first.size();
        ++r.savings.rewritten_scripts;
        r.savings.rewritten_occurrences += entry->second.count;
        r.savings.original_bytes += entry->second.count * len;
        r.savings.stored_bytes += len;
        r.savings.reference_bytes += entry->second.count * m_ref_width;
        for (ScriptRef site : entry->second.sites) {
            site.key = key;
            r.references.push_back(site);
        }
    }
    std::sort(r.references.begin(), r.references.end(), [](const ScriptRef& a, const ScriptRef& b) {
        return std::tie(a.height, a.tx_index, a.slot, a.slot_index) < std::tie(b.height, b.tx_index, b.slot, b.slot_index);
    });
    return r;
}

DedupResult dedup_scripts(std::span<const Block> blocks, std::size_t ref_width)
{
    DedupBuilder b(ref_width);
    for (std::size_t h = 0; h < blocks.size(); ++h) b.add_block(blocks[h], static_cast<Height>(h));
    return std::move(b).finish();
}

} // namespace slimchain
