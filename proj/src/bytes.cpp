#include <slimchain/bytes.hpp>

#include <stdexcept>

namespace slimchain {

std::uint8_t canonical_width(std::uint64_t value) noexcept
{
    if (value < 0xFD) return 1;
    if (value <= 0xFFFF) return 3;
    if (value <= 0xFFFFFFFFULL) return 5;
    return 9;
}

bool width_fits(std::uint64_t value, std::uint8_t width) noexcept
{
    switch (width) {
    case 1: return value < 0xFD;
    case 3: return value <= 0xFFFF;
    case 5: return value <= 0xFFFFFFFFULL;
    case 9: return true;
    default: return false;
    }
}

std::uint8_t effective_width(std::uint64_t value, std::uint8_t width)
{
    if (width == 0) return canonical_width(value);
    if (!width_fits(value, width)) {
        throw EncodeError("varint width " + std::to_string(width) + " cannot hold value " + std::to_string(value));
    }
    return width;
}

std::pair<VarInt, std::size_t> decode_varint(ByteView in)
{
    ByteReader r(in);
    VarInt v = r.varint("varint");
    return {v, r.position()};
}

void append_varint(Bytes& out, VarInt v)
{
    const std::uint8_t w = effective_width(v.value, v.width);
    switch (w) {
    case 1:
        out.push_back(static_cast<std::uint8_t>(v.value));
        break;
    case 3:
        out.push_back(0xFD);
        put_le16(out, static_cast<std::uint16_t>(v.value));
        break;
    case 5:
        out.push_back(0xFE);
        put_le32(out, static_cast<std::uint32_t>(v.value));
        break;
    default:
        out.push_back(0xFF);
        put_le64(out, v.value);
        break;
    }
}

Bytes encode_varint(VarInt v)
{
    Bytes out;
    append_varint(out, v);
    return out;
}

void put_le16(Bytes& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_le32(Bytes& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_le64(Bytes& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t read_le32(const std::uint8_t* p) noexcept
{
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

void ByteReader::fail(std::string_view field, const std::string& what) const
{
    throw DecodeError(std::string(field), offset(), what);
}

void ByteReader::need(std::size_t n, std::string_view field) const
{
    if (remaining() < n) {
        fail(field, "truncated input: need " + std::to_string(n) + " bytes, have " + std::to_string(remaining()));
    }
}

std::uint8_t ByteReader::u8(std::string_view field)
{
    need(1, field);
    return m_data[m_pos++];
}

std::uint16_t ByteReader::le16(std::string_view field)
{
    need(2, field);
    std::uint16_t v = std::uint16_t(m_data[m_pos]) | std::uint16_t(m_data[m_pos + 1] << 8);
    m_pos += 2;
    return v;
}

std::uint32_t ByteReader::le32(std::string_view field)
{
    need(4, field);
    std::uint32_t v = read_le32(m_data.data() + m_pos);
    m_pos += 4;
    return v;
}

std::uint64_t ByteReader::le64(std::string_view field)
{
    need(8, field);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | m_data[m_pos + i];
    m_pos += 8;
    return v;
}

VarInt ByteReader::varint(std::string_view field)
{
    const std::size_t start = m_pos;
    const std::uint8_t prefix = u8(field);
    try {
        switch (prefix) {
        case 0xFD: return {le16(field), 3};
        case 0xFE: return {le32(field), 5};
        case 0xFF: return {le64(field), 9};
        default: return {prefix, 1};
        }
    } catch (const DecodeError&) {
        m_pos = start;
        fail(field, "truncated varint");
    }
}

ByteView ByteReader::bytes(std::size_t n, std::string_view field)
{
    need(n, field);
    ByteView out = m_data.subspan(m_pos, n);
    m_pos += n;
    return out;
}

int ByteReader::peek(std::size_t ahead) const noexcept
{
    return m_pos + ahead < m_data.size() ? m_data[m_pos + ahead] : -1;
}

std::string to_hex(ByteView b)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (std::uint8_t c : b) {
        s.push_back(digits[c >> 4]);
        s.push_back(digits[c & 0xF]);
    }
    return s;
}

Bytes from_hex(std::string_view hex)
{
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

} // namespace slimchain
