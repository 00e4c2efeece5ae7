#ifndef SLIMCHAIN_BYTES_HPP
#define SLIMCHAIN_BYTES_HPP

#include <slimchain/errors.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace slimchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/**
 * Bitcoin compact-size integer together with the width it was (or will be)
 * serialized with. Widths are 1, 3, 5 or 9 bytes; decoding accepts
 * non-canonical widths and keeps them so that re-encoding is bit-exact.
 */
struct VarInt {
    std::uint64_t value = 0;
    std::uint8_t width = 1;

    friend bool operator==(const VarInt&, const VarInt&) = default;
};

/** Smallest compact-size width able to hold @p value. */
std::uint8_t canonical_width(std::uint64_t value) noexcept;

/** True if @p width is a legal compact-size width and can hold @p value. */
bool width_fits(std::uint64_t value, std::uint8_t width) noexcept;

/** Resolve a stored width where 0 means "canonical". Throws EncodeError if the width cannot hold the value. */
std::uint8_t effective_width(std::uint64_t value, std::uint8_t width);

/** Decode a compact-size integer from the front of @p in. Returns the value and bytes consumed. */
std::pair<VarInt, std::size_t> decode_varint(ByteView in);

Bytes encode_varint(VarInt v);
void append_varint(Bytes& out, VarInt v);
inline void append_varint(Bytes& out, std::uint64_t value) { append_varint(out, VarInt{value, canonical_width(value)}); }

inline void put_u8(Bytes& out, std::uint8_t v) { out.push_back(v); }
void put_le16(Bytes& out, std::uint16_t v);
void put_le32(Bytes& out, std::uint32_t v);
void put_le64(Bytes& out, std::uint64_t v);
inline void put_bytes(Bytes& out, ByteView b) { out.insert(out.end(), b.begin(), b.end()); }

std::uint32_t read_le32(const std::uint8_t* p) noexcept;

/**
 * Bounds-checked cursor over a byte span. Every read names the field it is
 * reading so decode errors can say exactly what was truncated and where.
 * Offsets reported are absolute: base_offset + position.
 */
class ByteReader {
public:
    explicit ByteReader(ByteView data, std::size_t base_offset = 0) : m_data(data), m_base(base_offset) {}

    std::uint8_t u8(std::string_view field);
    std::uint16_t le16(std::string_view field);
    std::uint32_t le32(std::string_view field);
    std::uint64_t le64(std::string_view field);
    VarInt varint(std::string_view field);
    ByteView bytes(std::size_t n, std::string_view field);
    void skip(std::size_t n, std::string_view field) { (void)bytes(n, field); }

    /** Peek without consuming; returns -1 past the end. */
    int peek(std::size_t ahead = 0) const noexcept;

    std::size_t position() const noexcept { return m_pos; }
    std::size_t offset() const noexcept { return m_base + m_pos; }
    std::size_t remaining() const noexcept { return m_data.size() - m_pos; }
    bool empty() const noexcept { return m_pos >= m_data.size(); }
    ByteView rest() const noexcept { return m_data.subspan(m_pos); }

    [[noreturn]] void fail(std::string_view field, const std::string& what) const;

private:
    void need(std::size_t n, std::string_view field) const;

    ByteView m_data;
    std::size_t m_base;
    std::size_t m_pos = 0;
};

std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);

} // namespace slimchain

#endif // SLIMCHAIN_BYTES_HPP
