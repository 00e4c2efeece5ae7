#ifndef SLIMCHAIN_HASH_HPP
#define SLIMCHAIN_HASH_HPP

#include <slimchain/bytes.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <string_view>

namespace slimchain {

/** 32-byte hash kept in wire (internal) byte order. hex() renders the conventional byte-reversed form. */
class Hash256 {
public:
    static constexpr std::size_t size = 32;

    constexpr Hash256() = default;
    explicit Hash256(ByteView b);

    /** Parse the display (byte-reversed) hex form, as printed by block explorers. */
    static Hash256 from_display_hex(std::string_view hex);

    std::string hex() const;
    std::string wire_hex() const { return to_hex(m_bytes); }

    bool is_null() const noexcept;

    const std::uint8_t* data() const noexcept { return m_bytes.data(); }
    std::uint8_t* data() noexcept { return m_bytes.data(); }
    ByteView view() const noexcept { return m_bytes; }
    std::uint8_t& operator[](std::size_t i) noexcept { return m_bytes[i]; }
    std::uint8_t operator[](std::size_t i) const noexcept { return m_bytes[i]; }

    friend auto operator<=>(const Hash256&, const Hash256&) = default;
    friend bool operator==(const Hash256&, const Hash256&) = default;

private:
    std::array<std::uint8_t, size> m_bytes{};
};

Hash256 sha256(ByteView data);
/** SHA-256 applied twice, the hash used for txids, block hashes and Merkle nodes. */
Hash256 double_sha256(ByteView data);
/** Merkle parent: double SHA-256 of left || right. */
Hash256 hash_pair(const Hash256& left, const Hash256& right);

} // namespace slimchain

template <>
struct std::hash<slimchain::Hash256> {
    std::size_t operator()(const slimchain::Hash256& h) const noexcept
    {
        std::size_t v;
        std::memcpy(&v, h.data(), sizeof(v));
        return v;
    }
};

#endif // SLIMCHAIN_HASH_HPP
