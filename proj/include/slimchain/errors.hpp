#ifndef SLIMCHAIN_ERRORS_HPP
#define SLIMCHAIN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slimchain {

/** Malformed or truncated serialized data. Carries the field being read and its absolute byte offset. */
class DecodeError : public std::runtime_error {
public:
    DecodeError(std::string field, std::size_t offset, const std::string& what)
        : std::runtime_error(what + " (field '" + field + "' at offset " + std::to_string(offset) + ")"),
          m_field(std::move(field)), m_offset(offset) {}

    const std::string& field() const noexcept { return m_field; }
    std::size_t offset() const noexcept { return m_offset; }

private:
    std::string m_field;
    std::size_t m_offset;
};

/** A value that cannot be serialized as requested (e.g. varint width too small). */
class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Block-file framing problem: wrong magic or a frame running past end of file. */
class FramingError : public std::runtime_error {
public:
    FramingError(std::size_t offset, const std::string& what)
        : std::runtime_error(what + " at file offset " + std::to_string(offset)), m_offset(offset) {}
    std::size_t offset() const noexcept { return m_offset; }

private:
    std::size_t m_offset;
};

} // namespace slimchain

#endif // SLIMCHAIN_ERRORS_HPP
