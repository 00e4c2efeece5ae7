#include <slimchain/ledger.hpp>

#include <algorithm>

namespace slimchain {

std::string_view kind_name(BodyKind k) noexcept
{
    switch (k) {
    case BodyKind::raw: return "raw";
    case BodyKind::minimized: return "minimized";
    case BodyKind::compact: return "compact";
    }
    return "unknown";
}

std::uint64_t BodyRecord::serialized_size() const noexcept
{
    return 1 + canonical_width(height) + canonical_width(payload.size()) + payload.size();
}

std::optional<Height> Ledger::tip() const noexcept
{
    if (spine.empty()) return std::nullopt;
    return static_cast<Height>(spine.size() - 1);
}

std::uint64_t Ledger::spine_bytes() const noexcept
{
    std::uint64_t n = 0;
    for (const SpineEntry& e : spine) n += e.serialized_size();
    return n;
}

std::uint64_t Ledger::body_bytes() const noexcept
{
    std::uint64_t n = 0;
    for (const BodyRecord& b : bodies) n += b.serialized_size();
    return n;
}

std::size_t Ledger::count(BodyKind k) const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(bodies.begin(), bodies.end(), [k](const BodyRecord& b) { return b.kind == k; }));
}

std::size_t Ledger::header_count() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(spine.begin(), spine.end(), [](const SpineEntry& e) { return e.header.has_value(); }));
}

Ledger full_ledger(std::span<const Block> blocks, NetworkMagic magic)
{
    Ledger l;
    l.magic = magic;
    l.spine.reserve(blocks.size());
    l.bodies.reserve(blocks.size());
    for (std::size_t h = 0; h < blocks.size(); ++h) {
        const Block& b = blocks[h];
        l.spine.push_back(SpineEntry{b.hash(), b.header});
        l.bodies.push_back(BodyRecord{BodyKind::raw, static_cast<Height>(h), encode_block(b)});
    }
    return l;
}

} // namespace slimchain
