#ifndef SLIMCHAIN_STORE_HPP
#define SLIMCHAIN_STORE_HPP

#include <slimchain/ledger.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace slimchain {

inline constexpr std::uint32_t STORE_FORMAT_VERSION = 1;
inline constexpr const char* SPINE_FILE = "spine.dat";
inline constexpr const char* BODIES_FILE = "bodies.dat";
inline constexpr const char* SCRIPTS_FILE = "scripts.dat";
inline constexpr const char* MANIFEST_FILE = "MANIFEST";

class StoreError : public std::runtime_error {
public:
    enum class Kind { io, manifest_parse, unsupported_version, manifest_mismatch, unknown_kind, truncated, corrupt };

    StoreError(Kind kind, const std::string& what) : std::runtime_error(what), m_kind(kind) {}
    Kind kind() const noexcept { return m_kind; }

private:
    Kind m_kind;
};

// Spine entry: flags (bit 0 = header present), 32-byte hash, [80-byte header].
Bytes encode_spine(const std::vector<SpineEntry>& spine);
std::vector<SpineEntry> decode_spine(ByteView data);

// Body record: kind, height varint, length varint, payload.
Bytes encode_bodies(const std::vector<BodyRecord>& bodies);
std::vector<BodyRecord> decode_bodies(ByteView data);

// Script entry: 8-byte key, length varint, script.
Bytes encode_kvs(const ScriptKvs& kvs);
ScriptKvs decode_kvs(ByteView data);

/** key=value lines; the last line holds the SHA-256 of everything before it. */
std::string encode_manifest(const Ledger& ledger, const Bytes& spine, const Bytes& bodies, const Bytes& scripts);

/** Write the four store files into @p dir (created if needed). Returns the retained byte count. */
std::uint64_t write_store(const Ledger& ledger, const std::filesystem::path& dir);
/** Exact inverse of write_store. Throws StoreError. */
Ledger read_store(const std::filesystem::path& dir);

struct IntegrityFailure {
    std::optional<Height> height;
    std::string check;
    std::string detail;
};

struct IntegrityReport {
    std::vector<IntegrityFailure> failures;
    std::uint64_t spine_entries = 0;
    std::uint64_t headers = 0;
    std::uint64_t hash_only_heights = 0;  ///< pruned or minimized away; not a failure
    std::uint64_t raw_bodies_verified = 0;
    std::uint64_t compact_bodies_verified = 0;
    std::uint64_t minimized_txs_verified = 0;
    std::uint64_t delegated_txs = 0;      ///< reference a transaction this store no longer holds
    std::uint64_t delegated_bodies = 0;   ///< Merkle check not possible locally for that reason
    std::uint64_t scripts_checked = 0;

    bool ok() const noexcept { return failures.empty(); }
};

/** Structural and cryptographic checks of an in-memory store image. */
IntegrityReport integrity_check(const Ledger& ledger);
/** Read and check the store in @p dir; read errors are reported as failures. */
IntegrityReport integrity_check(const std::filesystem::path& dir);

} // namespace slimchain

#endif // SLIMCHAIN_STORE_HPP
