#include <slimchain/hash.hpp>

#include <openssl/sha.h>

#include <algorithm>
#include <stdexcept>

namespace slimchain {

Hash256::Hash256(ByteView b)
{
    if (b.size() != size) throw std::invalid_argument("Hash256 needs exactly 32 bytes");
    std::copy(b.begin(), b.end(), m_bytes.begin());
}

Hash256 Hash256::from_display_hex(std::string_view hex)
{
    Bytes b = from_hex(hex);
    if (b.size() != size) throw std::invalid_argument("hash hex must be 64 digits");
    std::reverse(b.begin(), b.end());
    return Hash256(b);
}

std::string Hash256::hex() const
{
    std::array<std::uint8_t, size> rev;
    std::reverse_copy(m_bytes.begin(), m_bytes.end(), rev.begin());
    return to_hex(rev);
}

bool Hash256::is_null() const noexcept
{
    return std::all_of(m_bytes.begin(), m_bytes.end(), [](std::uint8_t c) { return c == 0; });
}

Hash256 sha256(ByteView data)
{
    Hash256 out;
    SHA256(data.data(), data.size(), out.data());
    return out;
}

Hash256 double_sha256(ByteView data)
{
    Hash256 once = sha256(data);
    return sha256(once.view());
}

Hash256 hash_pair(const Hash256& left, const Hash256& right)
{
    std::uint8_t buf[64];
    std::memcpy(buf, left.data(), 32);
    std::memcpy(buf + 32, right.data(), 32);
    return double_sha256(ByteView(buf, 64));
}

} // namespace slimchain
