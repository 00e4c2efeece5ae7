#ifndef SLIMCHAIN_DEDUP_HPP
#define SLIMCHAIN_DEDUP_HPP

#include <slimchain/wire.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace slimchain {

/** Width of a script reference: a truncated SHA-256 of the script. */
inline constexpr std::size_t SCRIPT_REF_WIDTH = 8;
using ScriptKey = std::array<std::uint8_t, SCRIPT_REF_WIDTH>;

ScriptKey script_key(ByteView script);

/** Content-addressed script store: key = leading bytes of SHA-256(script). */
class ScriptKvs {
public:
    /** Insert; returns false (and leaves the store unchanged) if the key is already taken by a different script. */
    bool insert(ByteView script);
    /** Key for @p script if this exact script is stored. */
    std::optional<ScriptKey> ref_for(ByteView script) const;
    const Bytes* find(const ScriptKey& key) const;
    void erase(const ScriptKey& key) { m_entries.erase(key); }

    const std::map<ScriptKey, Bytes>& entries() const noexcept { return m_entries; }
    std::size_t size() const noexcept { return m_entries.size(); }
    bool empty() const noexcept { return m_entries.empty(); }
    /** Serialized size: key + length prefix + script per entry. */
    std::uint64_t serialized_size() const;

    friend bool operator==(const ScriptKvs&, const ScriptKvs&) = default;

private:
    std::map<ScriptKey, Bytes> m_entries;
};

enum class ScriptSlot : std::uint8_t { input_script, output_script, witness_item };

/** One script occurrence replaced by a reference. */
struct ScriptRef {
    Height height = 0;
    std::uint32_t tx_index = 0;
    ScriptSlot slot = ScriptSlot::output_script;
    std::uint32_t slot_index = 0; ///< input/output index; for witness items, running item index within the tx
    ScriptKey key{};
};

struct DedupSavings {
    std::uint64_t rewritten_scripts = 0;    ///< distinct scripts moved to the store
    std::uint64_t rewritten_occurrences = 0;
    std::uint64_t original_bytes = 0;       ///< bytes of every rewritten occurrence
    std::uint64_t stored_bytes = 0;         ///< one copy per rewritten script
    std::uint64_t reference_bytes = 0;      ///< occurrences x reference width
    std::uint64_t all_script_bytes = 0;     ///< every script byte seen, rewritten or not

    std::int64_t savings() const noexcept
    {
        return static_cast<std::int64_t>(original_bytes) -
               static_cast<std::int64_t>(stored_bytes + reference_bytes);
    }
};

struct DedupResult {
    ScriptKvs kvs;
    std::vector<ScriptRef> references;
    DedupSavings savings;
};

/** Incremental form of dedup_scripts: feed transactions, then finish once. */
class DedupBuilder {
public:
    explicit DedupBuilder(std::size_t ref_width = SCRIPT_REF_WIDTH) : m_ref_width(ref_width) {}

    void add_transaction(const Transaction& tx, Height height, std::uint32_t tx_index);
    void add_block(const Block& block, Height height);
    DedupResult finish() &&;

private:
    struct Tally {
        std::uint64_t count = 0;
        std::vector<ScriptRef> sites;
    };
    void add(const VarBytes& s, ScriptRef site);

    std::size_t m_ref_width;
    std::uint64_t m_all_bytes = 0;
    std::map<Bytes, Tally> m_tally;
};

/**
 * Move every script that would save space (occurs at least twice and
 * count*len > len + count*ref_width) into a key-value store and list the
 * rewritten occurrences. Scripts no longer than a reference stay inline, as
 * do occurrences with a non-canonical length prefix (a reference could not
 * restore the original width) and scripts whose truncated keys collide.
 */
DedupResult dedup_scripts(std::span<const Block> blocks, std::size_t ref_width = SCRIPT_REF_WIDTH);

} // namespace slimchain

#endif // SLIMCHAIN_DEDUP_HPP
